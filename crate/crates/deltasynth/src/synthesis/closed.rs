//! Closed-condition synthesis. The antichain construction uses the minimal
//! winning configurations as memory and always plays a non-losing action; the
//! pruning construction unfolds the same strategy into a tree and folds each
//! new node back onto an ancestor whose configuration lies below it.
//!
//! The `naive_*` variants skip the class check and the final verification, so
//! they can be run on conditions they are not sound for.

use super::{require_class, verified, Budget, SynthOptions};
use crate::condition::{Game, Kind};
use crate::error::{Error, Result};
use crate::game::{FiniteMemoryMachine, MachineBuilder, Pair};
use crate::order::{min_set, smallest_non_losing, winning_region_capped, Configuration, OrderWitness, Region};
use std::collections::VecDeque;

pub fn synth_closed_antichain(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    synth_closed_antichain_from(&game, &Configuration::initial(&game.monitor), opts)
}

pub fn synth_closed_antichain_from(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    require_class(&game, Kind::K, Some(1), "closed synthesis")?;
    let start = normalize_start(&game, start);
    let machine = naive_antichain(&game, &start, opts)?;
    verified(machine, &game, &start)
}

pub fn synth_closed_pruning(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    synth_closed_pruning_from(&game, &Configuration::initial(&game.monitor), opts)
}

pub fn synth_closed_pruning_from(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    require_class(&game, Kind::K, Some(1), "closed synthesis")?;
    let start = normalize_start(&game, start);
    let machine = naive_pruning(&game, &start, opts)?;
    verified(machine, &game, &start)
}

/// Drops credits when the monitor tracks none.
pub(crate) fn normalize_start(game: &Game, start: &Configuration) -> Configuration {
    if game.monitor.energy_dim() == 0 {
        Configuration::new(start.state, vec![])
    } else {
        start.clone()
    }
}

fn setup(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<(OrderWitness, Region)> {
    let ord = OrderWitness::for_mode(game, opts.order)?;
    let region = winning_region_capped(game, opts.credit_cap)?;
    if !region.contains(start) {
        return Err(Error::NoWinningStrategy);
    }
    Ok((ord, region))
}

/// Antichain construction on any condition, without soundness checks.
pub fn naive_antichain(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let m = &game.monitor;
    let (ord, region) = setup(game, start, opts)?;
    let memory = min_set(&region.minimal_elements(|_| true), &ord).elements;
    let al = m.alphabet().clone();
    let mut b = MachineBuilder::new(&al);
    for c in &memory {
        b.add_state(c.render(m), smallest_non_losing(c, &region, m)?);
    }
    let cover = |c: &Configuration| -> Result<usize> {
        let k = ord
            .smallest_below(&memory, c)
            .ok_or_else(|| Error::Internal(format!("winning configuration {} has no minimal element below it", c.render(m))))?;
        Ok(memory.iter().position(|x| x == k).expect("element of memory"))
    };
    for (i, c) in memory.iter().enumerate() {
        let a = smallest_non_losing(c, &region, m)?;
        for bb in 0..al.num_b() {
            let p = Pair::new(a, bb);
            b.set(i, p, cover(&c.step(m, p))?);
        }
    }
    b.build(cover(start)?)
}

/// Pruned-tree construction on any condition, without soundness checks.
pub fn naive_pruning(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let m = &game.monitor;
    let (ord, region) = setup(game, start, opts)?;
    let al = m.alphabet().clone();
    let mut budget = Budget::new(opts.budget, "pruned closed strategy tree");
    let mut b = MachineBuilder::new(&al);
    // Per tree node: configuration and parent.
    let mut nodes: Vec<(Configuration, Option<usize>)> = Vec::new();
    let root = b.add_state(al.history_label(&[]), 0);
    nodes.push((start.clone(), None));
    let mut histories = vec![Vec::new()];
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        budget.spend()?;
        let c = nodes[node].0.clone();
        let a = smallest_non_losing(&c, &region, m)?;
        b.set_decision(node, a);
        for bb in 0..al.num_b() {
            let p = Pair::new(a, bb);
            let next = c.step(m, p);
            let mut chain = Vec::new();
            let mut cur = Some(node);
            while let Some(x) = cur {
                chain.push(x);
                cur = nodes[x].1;
            }
            let back = chain.into_iter().rev().find(|&x| ord.leq_unchecked(&nodes[x].0, &next));
            let target = match back {
                Some(x) => x,
                None => {
                    let mut h: Vec<Pair> = histories[node].clone();
                    h.push(p);
                    let child = b.add_state(al.history_label(&h), 0);
                    nodes.push((next, Some(node)));
                    histories.push(h);
                    queue.push_back(child);
                    child
                }
            };
            b.set(node, p, target);
        }
    }
    b.build(root)
}

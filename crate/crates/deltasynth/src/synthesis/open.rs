//! Reachability-style synthesis for open conditions: follow attractor ranks
//! from the start until the play is inside the trap on which every
//! continuation wins, then idle in a single absorbing state.

use super::{interior_trap, require_class, verified, Budget, SynthOptions};
use crate::condition::{Game, Kind};
use crate::error::{Error, Result};
use crate::game::{FiniteMemoryMachine, History, MachineBuilder, Pair};
use crate::order::Configuration;
use std::collections::VecDeque;

/// An open-condition machine together with the size of the strategy tree it
/// was folded from.
#[derive(Clone, Debug)]
pub struct OpenTree {
    pub machine: FiniteMemoryMachine,
    /// Nodes of the explored strategy tree, leaves included.
    pub tree_nodes: usize,
    /// Nodes at which the play was not yet decided.
    pub internal_nodes: usize,
}

pub fn synth_open(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    Ok(synth_open_from(&game, &Configuration::initial(&game.monitor), opts)?.machine)
}

pub fn synth_open_from(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<OpenTree> {
    let game = game.effective();
    require_class(&game, Kind::Lambda, Some(1), "open synthesis")?;
    let m = &game.monitor;
    let al = m.alphabet().clone();
    let goal = interior_trap(&game);
    let (attr, rank) = m.attractor(&goal);
    if !attr[start.state] {
        return Err(Error::NoWinningStrategy);
    }
    let start = Configuration::new(start.state, vec![]);
    let mut b = MachineBuilder::new(&al);
    if goal[start.state] {
        let done = b.add_state("done", 0);
        let machine = verified(b.build(done)?, &game, &start)?;
        return Ok(OpenTree { machine, tree_nodes: 1, internal_nodes: 0 });
    }
    let mut budget = Budget::new(opts.budget, "open strategy tree");
    let mut done: Option<usize> = None;
    let mut tree_nodes = 1;
    let mut internal_nodes = 0;
    let root = b.add_state(al.history_label(&[]), 0);
    let mut queue: VecDeque<(usize, usize, History)> = VecDeque::from([(root, start.state, Vec::new())]);
    while let Some((node, q, hist)) = queue.pop_front() {
        budget.spend()?;
        internal_nodes += 1;
        let lower: Vec<bool> = rank.iter().map(|&r| r < rank[q]).collect();
        let a = m
            .controllable_action(q, &lower)
            .ok_or_else(|| Error::Internal(format!("attractor state {} has no rank-decreasing action", m.name(q))))?;
        b.set_decision(node, a);
        for bb in 0..al.num_b() {
            let p = Pair::new(a, bb);
            let next = m.step(q, p);
            tree_nodes += 1;
            let target = if goal[next] {
                *done.get_or_insert_with(|| b.add_state("done", 0))
            } else {
                let mut h = hist.clone();
                h.push(p);
                let child = b.add_state(al.history_label(&h), 0);
                queue.push_back((child, next, h));
                child
            };
            b.set(node, p, target);
        }
    }
    let machine = verified(b.build(root)?, &game, &start)?;
    Ok(OpenTree { machine, tree_nodes, internal_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::verifier::verify_machine;

    #[test]
    fn example10_open_part_reaches_win() {
        let game = catalog::example10_open();
        let start = Configuration::new(catalog::ex10::W2, vec![]);
        let t = synth_open_from(&game, &start, &SynthOptions::default()).unwrap();
        assert!(verify_machine(&t.machine, &game.restarted_at(catalog::ex10::W2)).unwrap().is_winning());
        assert_eq!(t.machine.num_states(), 2);
        assert_eq!(t.machine.decide(0), 1);
        assert!(t.machine.num_states() <= t.tree_nodes);
    }

    #[test]
    fn losing_start_is_reported() {
        let game = catalog::example10_open();
        let err = synth_open(&game, &SynthOptions::default()).unwrap_err();
        assert_eq!(err, Error::NoWinningStrategy);
    }

    #[test]
    fn full_condition_needs_one_state() {
        let game = catalog::w_full();
        let t = synth_open_from(&game, &Configuration::initial(&game.monitor), &SynthOptions::default()).unwrap();
        assert_eq!(t.machine.num_states(), 1);
    }

    #[test]
    fn closed_condition_is_rejected() {
        let game = catalog::example10_closed();
        let err = synth_open(&game, &SynthOptions::default()).unwrap_err();
        assert!(matches!(err, Error::WrongClass(_)));
    }
}

//! Synthesis for Λ conditions of level at least 2 on energy-free games.
//!
//! A Λ condition is an open union of guarded parts. A positional winning
//! strategy for the whole condition is unfolded until the play enters a
//! guard; from there a machine for that guard's part takes over.

use super::closed::normalize_start;
use super::{interior_trap, require_class, synth_from, verified, Budget, SynthOptions};
use crate::condition::{ConditionExpr, Game, Kind};
use crate::error::{Error, Result};
use crate::game::{FiniteMemoryMachine, MachineBuilder, Pair};
use crate::order::{winning_region, Configuration};
use std::collections::{HashMap, VecDeque};

pub fn synth_lambda(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    synth_lambda_from(&game, &Configuration::initial(&game.monitor), opts)
}

/// Guards (as state sets) with the part of the condition that applies once
/// the play is inside them.
fn lambda_branches(game: &Game) -> Result<Vec<(Vec<bool>, ConditionExpr)>> {
    let m = &game.monitor;
    let n = m.num_states();
    let expr = &game.condition;
    if expr.classify()?.level == 1 {
        return Ok(vec![(interior_trap(game), ConditionExpr::open(0..n))]);
    }
    match expr {
        ConditionExpr::OpenUnion(bs) => Ok(bs.iter().map(|b| (m.set_of(b.guard.iter().copied()), b.expr.clone())).collect()),
        ConditionExpr::Not(inner) => match &**inner {
            ConditionExpr::Not(y) => lambda_branches(&game.with_condition((**y).clone())),
            ConditionExpr::Union(c, o) => {
                let guard = interior_trap(&game.with_condition((**c).clone().negate()));
                Ok(vec![(guard, (**o).clone().negate())])
            }
            _ => Err(Error::Unsupported(format!("Λ condition {}", expr.render(m)))),
        },
        _ => Err(Error::Unsupported(format!("Λ condition {}", expr.render(m)))),
    }
}

pub fn synth_lambda_from(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    require_class(&game, Kind::Lambda, None, "Λ synthesis")?;
    if game.uses_energy() {
        return Err(Error::Unsupported("energy inside a Λ condition".into()));
    }
    let start = normalize_start(&game, start);
    let m = &game.monitor;
    let al = m.alphabet().clone();
    let region = winning_region(&game)?;
    if !region.contains(&start) {
        return Err(Error::NoWinningStrategy);
    }
    let seed = region.seed.clone().ok_or_else(|| Error::Internal("no positional strategy for an energy-free game".into()))?;
    let branches = lambda_branches(&game)?;
    let guard_of = |q: usize| branches.iter().position(|(g, _)| g[q]);

    let mut b = MachineBuilder::new(&al);
    let mut entries: HashMap<(usize, usize), usize> = HashMap::new();
    let mut leaf = |b: &mut MachineBuilder, i: usize, q: usize| -> Result<usize> {
        if let Some(&e) = entries.get(&(i, q)) {
            return Ok(e);
        }
        let sub = synth_from(&game.with_condition(branches[i].1.clone()), &Configuration::new(q, vec![]), opts)?;
        let offset = b.embed(&sub, &format!("G{i}@{}:", m.name(q)));
        let e = offset + sub.initial();
        entries.insert((i, q), e);
        Ok(e)
    };
    if let Some(i) = guard_of(start.state) {
        let initial = leaf(&mut b, i, start.state)?;
        return verified(b.build(initial)?, &game, &start);
    }
    let mut budget = Budget::new(opts.budget, "Λ strategy tree");
    let root = b.add_state(al.history_label(&[]), 0);
    let mut queue = VecDeque::from([(root, start.state, Vec::<Pair>::new())]);
    while let Some((node, q, hist)) = queue.pop_front() {
        budget.spend()?;
        let a = seed[q].ok_or_else(|| Error::Internal(format!("winning state {} has no positional move", m.name(q))))?;
        b.set_decision(node, a);
        for bb in 0..al.num_b() {
            let p = Pair::new(a, bb);
            let next = m.step(q, p);
            let target = match guard_of(next) {
                Some(i) => leaf(&mut b, i, next)?,
                None => {
                    let mut h = hist.clone();
                    h.push(p);
                    let child = b.add_state(al.history_label(&h), 0);
                    queue.push_back((child, next, h));
                    child
                }
            };
            b.set(node, p, target);
        }
    }
    verified(b.build(root)?, &game, &start)
}

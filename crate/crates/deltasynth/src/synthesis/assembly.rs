//! Gluing of bounded-depth trees over minimal configurations inside the
//! prefix set of the closed part with machines winning the remaining part.
//!
//! Tree `T_j` starts at `closed_reps[j]` and follows a non-losing action. A
//! successor stays in the tree while the tree is shallower than `depths[j]`
//! and the successor is still in the prefix set. Otherwise it leaves for the
//! open machine of the smallest open representative below it, or restarts the
//! tree of the smallest closed representative below it.

use super::Budget;
use crate::condition::Game;
use crate::error::{Error, Result};
use crate::game::{FiniteMemoryMachine, MachineBuilder, Pair};
use crate::order::{smallest_non_losing, Configuration, OrderWitness, Region};
use std::collections::VecDeque;

pub(crate) struct Parts<'a> {
    pub game: &'a Game,
    pub ord: &'a OrderWitness,
    pub region: &'a Region,
    pub in_prefix: &'a dyn Fn(&Configuration) -> bool,
    pub open_reps: &'a [Configuration],
    pub open_machines: &'a [FiniteMemoryMachine],
    pub closed_reps: &'a [Configuration],
    pub depths: &'a [usize],
}

pub(crate) struct Assembled {
    pub machine: FiniteMemoryMachine,
    /// Per machine state: the configuration of its tree node, if any.
    pub memory_config: Vec<Option<Configuration>>,
    /// Per machine state: the open machine it belongs to, if any.
    pub open_part: Vec<Option<usize>>,
}

fn index_below(ord: &OrderWitness, set: &[Configuration], c: &Configuration) -> Option<usize> {
    let k = ord.smallest_below(set, c)?;
    set.iter().position(|x| x == k)
}

pub(crate) fn assemble(parts: &Parts, start: &Configuration, budget_limit: usize) -> Result<Assembled> {
    let m = &parts.game.monitor;
    let al = m.alphabet().clone();
    let mut b = MachineBuilder::new(&al);
    let mut memory_config: Vec<Option<Configuration>> = Vec::new();
    let mut open_part: Vec<Option<usize>> = Vec::new();
    let mut open_entry = Vec::with_capacity(parts.open_machines.len());
    for (i, sub) in parts.open_machines.iter().enumerate() {
        let offset = b.embed(sub, &format!("M{i}:"));
        open_entry.push(offset + sub.initial());
        memory_config.resize(b.len(), None);
        open_part.resize(b.len(), Some(i));
    }
    let mut budget = Budget::new(budget_limit, "gluing trees");
    let mut roots = Vec::with_capacity(parts.closed_reps.len());
    let mut queue = VecDeque::new();
    for (j, rep) in parts.closed_reps.iter().enumerate() {
        let id = b.add_state(format!("T{j}:{}", al.history_label(&[])), 0);
        memory_config.push(Some(rep.clone()));
        open_part.push(None);
        roots.push(id);
        queue.push_back((id, j, rep.clone(), Vec::<Pair>::new()));
    }
    let leave = |c: &Configuration| -> Result<Option<usize>> {
        if (parts.in_prefix)(c) {
            Ok(None)
        } else {
            let i = index_below(parts.ord, parts.open_reps, c).ok_or_else(|| {
                Error::Internal(format!("no open representative below {}", c.render(m)))
            })?;
            Ok(Some(open_entry[i]))
        }
    };
    while let Some((node, j, c, hist)) = queue.pop_front() {
        budget.spend()?;
        let a = smallest_non_losing(&c, parts.region, m)?;
        b.set_decision(node, a);
        for bb in 0..al.num_b() {
            let p = Pair::new(a, bb);
            let next = c.step(m, p);
            let target = if let Some(t) = leave(&next)? {
                t
            } else if hist.len() < parts.depths[j] {
                let mut h = hist.clone();
                h.push(p);
                let child = b.add_state(format!("T{j}:{}", al.history_label(&h)), 0);
                memory_config.push(Some(next.clone()));
                open_part.push(None);
                queue.push_back((child, j, next, h));
                child
            } else {
                let k = index_below(parts.ord, parts.closed_reps, &next).ok_or_else(|| {
                    Error::Internal(format!("no closed representative below {}", next.render(m)))
                })?;
                roots[k]
            };
            b.set(node, p, target);
        }
    }
    let initial = match leave(start)? {
        Some(t) => t,
        None => {
            let k = index_below(parts.ord, parts.closed_reps, start).ok_or(Error::NoWinningStrategy)?;
            roots[k]
        }
    };
    let (machine, mapping) = b.build_mapped(initial)?;
    let mut cfg = vec![None; machine.num_states()];
    let mut part = vec![None; machine.num_states()];
    for (old, new) in mapping.iter().enumerate() {
        if let Some(n) = new {
            cfg[*n] = memory_config[old].clone();
            part[*n] = open_part[old];
        }
    }
    Ok(Assembled { machine, memory_config: cfg, open_part: part })
}

/// Length of the longest path in the product of the monitor with itself from
/// `(qbar, q)` to a node whose second component is final, moving only through
/// nodes whose first component stays in `prefix` and whose second component
/// is not final. `None` when no such path exists. A cycle of non-final nodes
/// reachable this way is an internal error, as it would make trees unbounded.
pub(crate) fn longest_to_final(
    game: &Game,
    from: (usize, usize),
    prefix: &[bool],
    is_final: &dyn Fn(usize) -> bool,
) -> Result<Option<usize>> {
    let m = &game.monitor;
    let n = m.num_states();
    let np = m.alphabet().num_pairs();
    // 0 unvisited, 1 on the stack, 2 done.
    let mut mark = vec![0u8; n * n];
    let mut best: Vec<Option<usize>> = vec![None; n * n];
    let key = |(a, b): (usize, usize)| a * n + b;
    let mut stack: Vec<((usize, usize), usize)> = vec![(from, 0)];
    mark[key(from)] = 1;
    if is_final(from.1) {
        return Ok(Some(0));
    }
    while let Some(&mut (node, ref mut next_pair)) = stack.last_mut() {
        if *next_pair == np {
            mark[key(node)] = 2;
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                if let Some(v) = best[key(node)] {
                    let slot = &mut best[key(parent)];
                    *slot = Some(slot.map_or(v + 1, |x| x.max(v + 1)));
                }
            }
            continue;
        }
        let pi = *next_pair;
        *next_pair += 1;
        let succ = (m.step_index(node.0, pi), m.step_index(node.1, pi));
        if !prefix[succ.0] {
            continue;
        }
        if is_final(succ.1) {
            let slot = &mut best[key(node)];
            *slot = Some(slot.map_or(1, |x| x.max(1)));
            continue;
        }
        match mark[key(succ)] {
            0 => {
                mark[key(succ)] = 1;
                stack.push((succ, 0));
            }
            1 => {
                return Err(Error::Internal(format!(
                    "unbounded tree depth: ({}, {}) lies on a cycle",
                    m.name(succ.0),
                    m.name(succ.1)
                )))
            }
            _ => {
                if let Some(v) = best[key(succ)] {
                    let slot = &mut best[key(node)];
                    *slot = Some(slot.map_or(v + 1, |x| x.max(v + 1)));
                }
            }
        }
    }
    Ok(best[key(from)])
}

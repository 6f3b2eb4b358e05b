//! Brute-force reference solvers. They share nothing with the synthesis
//! code beyond the monitor itself and are only fit for small games.

use crate::condition::{ConditionExpr, Game};
use crate::error::{Error, Result};
use crate::game::Pair;
use std::collections::HashMap;

/// Largest number of positional strategies [`positional_winner`] will try.
pub const MAX_POSITIONAL: usize = 1 << 16;

/// Whether Player 1 wins an energy-free game from its initial state, by
/// trying every positional strategy over monitor states.
///
/// Values of energy-free conditions only depend on the monitor states seen
/// infinitely often, and stabilise along every play, so a strategy wins iff
/// every state on a reachable cycle of its outcome graph has value 1.
pub fn positional_winner(game: &Game) -> Result<bool> {
    if game.uses_energy() {
        return Err(Error::Unsupported("positional oracle on an energy game".into()));
    }
    let m = &game.monitor;
    let (n, na, nb) = (m.num_states(), m.alphabet().num_a(), m.alphabet().num_b());
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(na).filter(|&t| t <= MAX_POSITIONAL));
    let total = total.ok_or_else(|| Error::BudgetExceeded { budget: MAX_POSITIONAL, context: "enumerating positional strategies".into() })?;
    let value: Vec<bool> = (0..n).map(|q| game.condition.eval_at(q)).collect();
    'strategies: for code in 0..total {
        let mut sigma = vec![0; n];
        let mut c = code;
        for s in sigma.iter_mut() {
            *s = c % na;
            c /= na;
        }
        let sigma = &sigma;
        let succ = |q: usize| (0..nb).map(move |b| m.step(q, Pair::new(sigma[q], b)));
        let mut reach = vec![false; n];
        let mut stack = vec![m.initial()];
        reach[m.initial()] = true;
        while let Some(q) = stack.pop() {
            for t in succ(q) {
                if !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
        for q in (0..n).filter(|&q| reach[q] && !value[q]) {
            // q lies on a cycle iff it can reach itself.
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succ(q).collect();
            while let Some(t) = stack.pop() {
                if t == q {
                    continue 'strategies;
                }
                if !seen[t] {
                    seen[t] = true;
                    stack.extend(succ(t));
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Whether Player 1 wins a multi-energy game from its initial configuration,
/// tracking credits explicitly and clamping them at `cap`.
///
/// Supported conditions are energy safety and energy safety united with an
/// open set. The latter is won by staying safe forever or by reaching the
/// open set, even after a counter went negative.
pub fn energy_winner(game: &Game, cap: i64) -> Result<bool> {
    let m = &game.monitor;
    let target: Vec<bool> = match &game.condition {
        ConditionExpr::EnergySafe => vec![false; m.num_states()],
        ConditionExpr::Union(c, o) if **c == ConditionExpr::EnergySafe => match &**o {
            ConditionExpr::Open(t) => (0..m.num_states()).map(|q| t.contains(&q)).collect(),
            _ => return Err(Error::Unsupported("energy oracle: open part must be a plain open set".into())),
        },
        _ => return Err(Error::Unsupported("energy oracle: condition must be energy safety".into())),
    };
    let (na, nb) = (m.alphabet().num_a(), m.alphabet().num_b());
    // Nodes are (state, Some(credit)) or (state, None) once depleted.
    type Node = (usize, Option<Vec<i64>>);
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut succ: Vec<Vec<Vec<usize>>> = Vec::new();
    let start: Node = (m.initial(), Some(m.initial_credit().iter().map(|&c| c.min(cap)).collect()));
    index.insert(start.clone(), 0);
    nodes.push(start);
    let mut i = 0;
    while i < nodes.len() {
        let (q, credit) = nodes[i].clone();
        let mut rows = Vec::with_capacity(na);
        for a in 0..na {
            let mut row = Vec::with_capacity(nb);
            for b in 0..nb {
                let p = Pair::new(a, b);
                let next_credit = credit.as_ref().and_then(|c| {
                    let v: Vec<i64> = c.iter().zip(m.weight(q, p)).map(|(x, w)| (x + w).min(cap)).collect();
                    v.iter().all(|&x| x >= 0).then_some(v)
                });
                let key = (m.step(q, p), next_credit);
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                row.push(id);
            }
            rows.push(row);
        }
        succ.push(rows);
        i += 1;
    }
    let cpre = |set: &[bool], v: usize| succ[v].iter().any(|row| row.iter().all(|&t| set[t]));
    let k = nodes.len();
    // Attractor to the open target.
    let mut attr: Vec<bool> = nodes.iter().map(|(q, _)| target[*q]).collect();
    loop {
        let next: Vec<bool> = (0..k).map(|v| attr[v] || cpre(&attr, v)).collect();
        if next == attr {
            break;
        }
        attr = next;
    }
    // Stay live inside the winning set, or fall into the attractor.
    let mut win = vec![true; k];
    loop {
        let next: Vec<bool> = (0..k).map(|v| attr[v] || (nodes[v].1.is_some() && cpre(&win, v))).collect();
        if next == win {
            break;
        }
        win = next;
    }
    Ok(win[0])
}

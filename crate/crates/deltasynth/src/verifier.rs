//! Model checking of decision machines against monitor-presented conditions,
//! and a step-by-step simulation harness.

use crate::condition::{ConditionExpr, Game};
use crate::error::{Error, Result};
use crate::game::{BetaWord, FiniteMemoryMachine, History, Lasso, Pair};
use crate::graph::{self, Adjacency, Sccs};
use crate::order::{Configuration, Credit};
use serde_json::{json, Value};
use std::collections::HashMap;

/// Outcome of model checking. A losing witness is a Player-2 word whose play
/// against the machine leaves the winning set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Winning,
    Losing(BetaWord),
}

impl Verdict {
    pub fn is_winning(&self) -> bool {
        matches!(self, Verdict::Winning)
    }
    pub fn witness(&self) -> Option<&BetaWord> {
        match self {
            Verdict::Winning => None,
            Verdict::Losing(w) => Some(w),
        }
    }
    pub fn to_json(&self, game: &Game) -> Value {
        match self {
            Verdict::Winning => json!({ "outcome": "Winning" }),
            Verdict::Losing(w) => json!({ "outcome": "Losing", "witness": beta_json(game, w) }),
        }
    }
}

pub fn beta_json(game: &Game, w: &BetaWord) -> Value {
    let names = |v: &[usize]| v.iter().map(|&b| json!(game.alphabet().b_name(b))).collect::<Vec<_>>();
    json!({ "prefix": names(&w.prefix), "cycle": names(&w.cycle) })
}

/// The machine × monitor product reachable from a starting pair, one edge per
/// Player-2 action.
struct Product {
    nodes: Vec<(usize, usize)>,
    /// `succ[v][b]`.
    succ: Vec<Vec<usize>>,
    /// `weight[v][b]`.
    weight: Vec<Vec<Vec<i64>>>,
    adj: Adjacency,
}

impl Product {
    fn new(machine: &FiniteMemoryMachine, game: &Game, m0: usize, q0: usize) -> Self {
        let monitor = &game.monitor;
        let nb = game.alphabet().num_b();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut nodes = vec![(m0, q0)];
        index.insert((m0, q0), 0);
        let mut succ = Vec::new();
        let mut weight = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (m, q) = nodes[i];
            let a = machine.decide(m);
            let mut row = Vec::with_capacity(nb);
            let mut wrow = Vec::with_capacity(nb);
            for b in 0..nb {
                let p = Pair::new(a, b);
                let key = (machine.update(m, p), monitor.step(q, p));
                let id = *index.entry(key).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                row.push(id);
                wrow.push(monitor.weight(q, p).to_vec());
            }
            succ.push(row);
            weight.push(wrow);
            i += 1;
        }
        let adj = succ
            .iter()
            .map(|r| {
                let mut s = r.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        Product { nodes, succ, weight, adj }
    }

    fn label(&self, u: usize, v: usize) -> usize {
        self.succ[u].iter().position(|&x| x == v).expect("product edge")
    }

    fn actions(&self, path: &[usize]) -> Vec<usize> {
        path.windows(2).map(|w| self.label(w[0], w[1])).collect()
    }

    /// Lasso word: path from the start to `v`, then the cycle through `v`.
    fn lasso_at(&self, v: usize, allowed: &dyn Fn(usize) -> bool) -> BetaWord {
        let to_v = graph::bfs_path(&self.adj, 0, allowed, |x| x == v).expect("reachable node");
        let cyc = graph::cycle_through(&self.adj, v, allowed).expect("node on a cycle");
        let mut closed = cyc.clone();
        closed.push(v);
        Lasso { prefix: self.actions(&to_v), cycle: self.actions(&closed) }.normalized()
    }

    /// Some infinite continuation from `v` inside `allowed`, as a lasso word
    /// whose prefix starts at `v`.
    fn continuation(&self, v: usize, allowed: &dyn Fn(usize) -> bool) -> (Vec<usize>, Vec<usize>) {
        let sub: Adjacency = self.adj.iter().map(|s| s.iter().copied().filter(|&w| allowed(w)).collect()).collect();
        let sccs = Sccs::new(&sub);
        let path = graph::bfs_path(&sub, v, allowed, |x| allowed(x) && sccs.is_recurrent(x)).expect("infinite continuation");
        let u = *path.last().expect("non-empty");
        let mut cyc = graph::cycle_through(&sub, u, allowed).expect("cycle");
        cyc.push(u);
        (self.actions(&path), self.actions(&cyc))
    }
}

/// Model checks `machine` from its initial memory state against the game.
pub fn verify_machine(machine: &FiniteMemoryMachine, game: &Game) -> Result<Verdict> {
    verify_from(machine, machine.initial(), game, &Configuration::initial(&game.monitor))
}

/// Model checks the machine started in memory state `m0` from configuration `start`.
pub fn verify_from(machine: &FiniteMemoryMachine, m0: usize, game: &Game, start: &Configuration) -> Result<Verdict> {
    if machine.alphabet() != game.alphabet() {
        return Err(Error::InvalidAction("machine and game use different alphabets".into()));
    }
    let game = game.effective();
    let product = Product::new(machine, &game, m0, start.state);
    if !game.condition.has_energy() {
        return Ok(verify_regular(&product, &game.condition));
    }
    let target: Vec<bool> = match &game.condition {
        ConditionExpr::EnergySafe => vec![false; game.monitor.num_states()],
        ConditionExpr::Union(c, o) if **c == ConditionExpr::EnergySafe && !o.has_energy() => {
            (0..game.monitor.num_states()).map(|q| o.eval_at(q)).collect()
        }
        _ => return Err(Error::Unsupported("verification of this energy condition".into())),
    };
    Ok(verify_energy(&product, &target, &start.credit))
}

fn verify_regular(product: &Product, expr: &ConditionExpr) -> Verdict {
    let sccs = Sccs::new(&product.adj);
    let bad = (0..product.nodes.len()).find(|&v| sccs.is_recurrent(v) && !expr.eval_at(product.nodes[v].1));
    match bad {
        None => Verdict::Winning,
        Some(v) => Verdict::Losing(product.lasso_at(v, &|_| true)),
    }
}

/// Losing plays stay outside `target` forever and break some counter.
fn verify_energy(product: &Product, target: &[bool], credit: &Credit) -> Verdict {
    let n = product.nodes.len();
    let outside: Vec<bool> = (0..n).map(|v| !target[product.nodes[v].1]).collect();
    let avoid = graph::infinite_inside(&product.adj, &outside);
    if !avoid[0] {
        return Verdict::Winning;
    }
    let allowed = |v: usize| avoid[v];
    let credit = match credit {
        Credit::Depleted => {
            let (prefix, cycle) = product.continuation(0, &allowed);
            return Verdict::Losing(Lasso { prefix, cycle }.normalized());
        }
        Credit::Live(c) => c,
    };
    for (k, &c0) in credit.iter().enumerate() {
        match min_prefix(product, &avoid, k) {
            MinPrefix::NegativeCycle { to_cycle, cycle } => {
                let prefix = product.actions(&to_cycle);
                return Verdict::Losing(Lasso { prefix, cycle }.normalized());
            }
            MinPrefix::Distances { dist, parent, parent_b } => {
                if let Some(v) = (0..n).filter(|&v| avoid[v] && dist[v] != i64::MAX).find(|&v| c0 + dist[v] < 0) {
                    let mut actions = Vec::new();
                    let mut cur = v;
                    while cur != 0 {
                        actions.push(parent_b[cur]);
                        cur = parent[cur];
                    }
                    actions.reverse();
                    let (more, cycle) = product.continuation(v, &allowed);
                    actions.extend(more);
                    return Verdict::Losing(Lasso { prefix: actions, cycle }.normalized());
                }
            }
        }
    }
    Verdict::Winning
}

enum MinPrefix {
    /// Least weight of a path from the start, with the last edge of a
    /// shortest path (`parent`, and the Player-2 action taken).
    Distances { dist: Vec<i64>, parent: Vec<usize>, parent_b: Vec<usize> },
    /// Node path from the start to a negative cycle, and that cycle's actions.
    NegativeCycle { to_cycle: Vec<usize>, cycle: Vec<usize> },
}

/// Bellman-Ford over counter `k`, restricted to `allowed` nodes.
fn min_prefix(product: &Product, allowed: &[bool], k: usize) -> MinPrefix {
    let n = product.nodes.len();
    let mut dist = vec![i64::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut parent_b = vec![0usize; n];
    dist[0] = 0;
    let mut last_changed = None;
    for _ in 0..=n {
        last_changed = None;
        for u in 0..n {
            if dist[u] == i64::MAX || !allowed[u] {
                continue;
            }
            for (b, &v) in product.succ[u].iter().enumerate() {
                if !allowed[v] {
                    continue;
                }
                let nd = dist[u] + product.weight[u][b][k];
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = u;
                    parent_b[v] = b;
                    last_changed = Some(v);
                }
            }
        }
        if last_changed.is_none() {
            break;
        }
    }
    let Some(mut v) = last_changed else {
        return MinPrefix::Distances { dist, parent, parent_b };
    };
    for _ in 0..n {
        v = parent[v];
    }
    // `v` now lies on a negative cycle of the parent graph.
    let mut cycle = Vec::new();
    let mut cur = v;
    loop {
        cycle.push(parent_b[cur]);
        cur = parent[cur];
        if cur == v {
            break;
        }
    }
    cycle.reverse();
    let to_cycle = graph::bfs_path(&product.adj, 0, |x| allowed[x], |x| x == v).expect("reachable cycle");
    MinPrefix::NegativeCycle { to_cycle, cycle }
}

/// One simulation: the history and, for every round boundary, the memory
/// state and configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub history: History,
    pub memory: Vec<usize>,
    pub configs: Vec<Configuration>,
}

impl Trace {
    pub fn to_json(&self, game: &Game, machine: &FiniteMemoryMachine) -> Value {
        let al = game.alphabet();
        json!({
            "history": self.history.iter().map(|p| al.pair_label(*p)).collect::<Vec<_>>(),
            "steps": self.configs.iter().zip(&self.memory).map(|(c, &m)| json!({
                "memory": machine.name(m),
                "configuration": c.to_json(&game.monitor),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs the machine against `beta` for `horizon` rounds.
pub fn simulate(machine: &FiniteMemoryMachine, game: &Game, beta: &BetaWord, horizon: usize) -> Result<Trace> {
    if beta.prefix.iter().chain(&beta.cycle).any(|&b| b >= game.alphabet().num_b()) {
        return Err(Error::InvalidAction("β uses an action outside Player 2's alphabet".into()));
    }
    simulate_with(machine, game, |h| *beta.at(h.len()), horizon)
}

/// Runs the machine against a scripted responder choosing Player 2's action
/// from the history so far.
pub fn simulate_with(
    machine: &FiniteMemoryMachine,
    game: &Game,
    mut responder: impl FnMut(&[Pair]) -> usize,
    horizon: usize,
) -> Result<Trace> {
    let mut m = machine.initial();
    let mut c = Configuration::initial(&game.monitor);
    let mut trace = Trace { history: Vec::new(), memory: vec![m], configs: vec![c.clone()] };
    for _ in 0..horizon {
        let b = responder(&trace.history);
        let p = Pair::new(machine.decide(m), b);
        game.alphabet().check_pair(p)?;
        m = machine.update(m, p);
        c = c.step(&game.monitor, p);
        trace.history.push(p);
        trace.memory.push(m);
        trace.configs.push(c.clone());
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn fig2_loses_with_zero_omega() {
        let v = verify_machine(&catalog::fig2_machine(), &catalog::example10()).unwrap();
        assert_eq!(v, Verdict::Losing(Lasso::constant(0)));
    }

    #[test]
    fn fig3_wins() {
        assert!(verify_machine(&catalog::fig3_machine(), &catalog::example10()).unwrap().is_winning());
        assert!(verify_machine(&catalog::fig2_machine(), &catalog::w_full()).unwrap().is_winning());
    }

    #[test]
    fn witness_replays_outside_w() {
        let g = catalog::example10();
        let m = catalog::fig2_machine();
        let w = verify_machine(&m, &g).unwrap().witness().cloned().unwrap();
        assert!(!g.member(&m.machine_play(&w)).unwrap());
    }

    #[test]
    fn simulation_trace() {
        let g = catalog::example10();
        let m = catalog::fig2_machine();
        let t = simulate(&m, &g, &Lasso::constant(0), 0).unwrap();
        assert!(t.history.is_empty());
        assert_eq!(t.configs, vec![Configuration::initial(&g.monitor)]);
        let t = simulate(&m, &g, &Lasso::constant(0), 4).unwrap();
        assert_eq!(t.history, vec![Pair::new(0, 0); 4]);
    }

    #[test]
    fn energy_verification() {
        let g = catalog::multienergy_d2();
        let al = g.alphabet().clone();
        let mut b = crate::game::MachineBuilder::new(&al);
        let x = b.add_state("x", 0);
        let always0 = b.clone().build(x).unwrap();
        assert!(verify_machine(&always0, &g).unwrap().is_winning());
        b.set_decision(x, 1);
        let always1 = b.build(x).unwrap();
        let v = verify_machine(&always1, &g).unwrap();
        let w = v.witness().unwrap();
        assert!(!g.member(&always1.machine_play(w)).unwrap());
    }
}

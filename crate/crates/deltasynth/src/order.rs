//! Configurations (monitor state plus energy vector) as finite surrogates of
//! histories, the order realizing inclusion of induced winning sets, Min-set
//! extraction, controllable predecessors and winning regions.

use crate::condition::{to_difference_form, ConditionExpr, Game, Kind};
use crate::error::{Error, Result};
use crate::game::{Alphabet, Pair};
use crate::graph::{self, Adjacency, Sccs};
use crate::monitor::ConditionMonitor;
use serde_json::{json, Map, Value};
use std::cmp::Ordering;
use std::fmt;

/// Energy part of a configuration. `Depleted` marks histories along which
/// some counter went negative; they never come back.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Credit {
    Depleted,
    Live(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: usize,
    pub credit: Credit,
}

impl Configuration {
    pub fn new(state: usize, credit: Vec<i64>) -> Self {
        Configuration { state, credit: Credit::Live(credit) }
    }
    pub fn depleted(state: usize) -> Self {
        Configuration { state, credit: Credit::Depleted }
    }
    pub fn initial(m: &ConditionMonitor) -> Self {
        Configuration::new(m.initial(), m.initial_credit().to_vec())
    }
    pub fn is_depleted(&self) -> bool {
        self.credit == Credit::Depleted
    }
    pub fn live(&self) -> Option<&[i64]> {
        match &self.credit {
            Credit::Live(v) => Some(v),
            Credit::Depleted => None,
        }
    }

    /// Configuration after one more round.
    pub fn step(&self, m: &ConditionMonitor, p: Pair) -> Configuration {
        let state = m.step(self.state, p);
        let credit = match &self.credit {
            Credit::Depleted => Credit::Depleted,
            Credit::Live(v) => {
                let next: Vec<i64> = v.iter().zip(m.weight(self.state, p)).map(|(c, w)| c + w).collect();
                if next.iter().any(|&c| c < 0) {
                    Credit::Depleted
                } else {
                    Credit::Live(next)
                }
            }
        };
        Configuration { state, credit }
    }

    pub fn render(&self, m: &ConditionMonitor) -> String {
        match &self.credit {
            Credit::Depleted => format!("({}, depleted)", m.name(self.state)),
            Credit::Live(v) if v.is_empty() => m.name(self.state).to_string(),
            Credit::Live(v) => format!("({}, {:?})", m.name(self.state), v),
        }
    }

    pub fn to_json(&self, m: &ConditionMonitor) -> Value {
        match &self.credit {
            Credit::Depleted => json!({ "state": m.name(self.state), "energy": "depleted" }),
            Credit::Live(v) if v.is_empty() => json!({ "state": m.name(self.state) }),
            Credit::Live(v) => json!({ "state": m.name(self.state), "energy": v }),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.credit {
            Credit::Depleted => write!(f, "({}, depleted)", self.state),
            Credit::Live(v) => write!(f, "({}, {:?})", self.state, v),
        }
    }
}

/// `config(h)`: monitor run on `h` with accumulated weights.
pub fn config(h: &[Pair], m: &ConditionMonitor) -> Result<Configuration> {
    let mut c = Configuration::initial(m);
    for &p in h {
        m.alphabet().check_pair(p)?;
        c = c.step(m, p);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderMode {
    StructuralOnly,
    ExactRegular,
}

impl std::str::FromStr for OrderMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structural" => Ok(OrderMode::StructuralOnly),
            "exact" => Ok(OrderMode::ExactRegular),
            other => Err(Error::InvalidParams(format!("unknown order {other:?} (structural|exact)"))),
        }
    }
}

/// A sound order on configurations: `leq(c1, c2)` implies `W_{c1} ⊆ W_{c2}`.
#[derive(Clone, Debug)]
pub struct OrderWitness {
    mode: OrderMode,
    num_states: usize,
    dim: usize,
    /// `incl[q][q']` iff the winning set from `q` is included in the one from `q'`.
    incl: Option<Vec<Vec<bool>>>,
}

impl OrderWitness {
    pub fn structural(game: &Game) -> Self {
        OrderWitness {
            mode: OrderMode::StructuralOnly,
            num_states: game.monitor.num_states(),
            dim: game.monitor.energy_dim(),
            incl: None,
        }
    }

    /// Exact inclusion of winning sets, decided on the product of the monitor
    /// with itself. Energy-free conditions only.
    pub fn exact(game: &Game) -> Result<Self> {
        if game.condition.has_energy() {
            return Err(Error::Unsupported("the exact order needs an energy-free condition".into()));
        }
        let m = &game.monitor;
        let n = m.num_states();
        let value: Vec<bool> = (0..n).map(|q| game.condition.eval_at(q)).collect();
        let adj: Adjacency = (0..n * n)
            .map(|x| {
                let (p, q) = (x / n, x % n);
                let mut s: Vec<usize> =
                    (0..m.alphabet().num_pairs()).map(|pi| m.step_index(p, pi) * n + m.step_index(q, pi)).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let sccs = Sccs::new(&adj);
        let mut rev: Adjacency = vec![Vec::new(); n * n];
        for (u, succ) in adj.iter().enumerate() {
            for &v in succ {
                rev[v].push(u);
            }
        }
        let bad = (0..n * n).filter(|&x| sccs.is_recurrent(x) && value[x / n] && !value[x % n]);
        let reaches_bad = graph::reachable(&rev, bad);
        let incl = (0..n).map(|p| (0..n).map(|q| !reaches_bad[p * n + q]).collect()).collect();
        Ok(OrderWitness { mode: OrderMode::ExactRegular, num_states: n, dim: m.energy_dim(), incl: Some(incl) })
    }

    pub fn for_mode(game: &Game, mode: OrderMode) -> Result<Self> {
        match mode {
            OrderMode::StructuralOnly => Ok(OrderWitness::structural(game)),
            OrderMode::ExactRegular => OrderWitness::exact(game),
        }
    }

    pub fn mode(&self) -> OrderMode {
        self.mode
    }

    fn check(&self, c: &Configuration) -> Result<()> {
        if c.state >= self.num_states {
            return Err(Error::MonitorMismatch);
        }
        match &c.credit {
            Credit::Live(v) if v.len() != self.dim => Err(Error::MonitorMismatch),
            _ => Ok(()),
        }
    }

    pub fn leq(&self, c1: &Configuration, c2: &Configuration) -> Result<bool> {
        self.check(c1)?;
        self.check(c2)?;
        Ok(self.leq_unchecked(c1, c2))
    }

    pub(crate) fn leq_unchecked(&self, c1: &Configuration, c2: &Configuration) -> bool {
        let states_ok = match &self.incl {
            Some(incl) => incl[c1.state][c2.state],
            None => c1.state == c2.state,
        };
        states_ok
            && match (&c1.credit, &c2.credit) {
                (Credit::Depleted, _) => true,
                (Credit::Live(_), Credit::Depleted) => false,
                (Credit::Live(x), Credit::Live(y)) => x.iter().zip(y).all(|(a, b)| a <= b),
            }
    }

    /// Canonical enumeration order: every element precedes the elements
    /// strictly above it.
    pub fn canonical_cmp(&self, c1: &Configuration, c2: &Configuration) -> Ordering {
        let state_key = |q: usize| match &self.incl {
            Some(incl) => ((0..self.num_states).filter(|&p| incl[p][q]).count(), q),
            None => (0, q),
        };
        let credit_key = |c: &Credit| match c {
            Credit::Depleted => (0, 0, Vec::new()),
            Credit::Live(v) => (1, v.iter().sum::<i64>(), v.clone()),
        };
        match &self.incl {
            Some(_) => (credit_key(&c1.credit), state_key(c1.state)).cmp(&(credit_key(&c2.credit), state_key(c2.state))),
            None => (state_key(c1.state), credit_key(&c1.credit)).cmp(&(state_key(c2.state), credit_key(&c2.credit))),
        }
    }

    /// The smallest element of `set` (canonical order) below `c`.
    pub fn smallest_below<'a>(&self, set: &'a [Configuration], c: &Configuration) -> Option<&'a Configuration> {
        set.iter().filter(|k| self.leq_unchecked(k, c)).min_by(|a, b| self.canonical_cmp(a, b))
    }
}

/// `leq(step(c1, p), step(c2, p))`.
pub fn step_order_preserved(
    c1: &Configuration,
    c2: &Configuration,
    p: Pair,
    ord: &OrderWitness,
    m: &ConditionMonitor,
) -> Result<bool> {
    ord.leq(&c1.step(m, p), &c2.step(m, p))
}

/// A finite antichain covering a domain from below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinSet {
    pub elements: Vec<Configuration>,
}

impl MinSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    /// Index of the smallest element below `c`.
    pub fn cover(&self, ord: &OrderWitness, c: &Configuration) -> Option<usize> {
        let e = ord.smallest_below(&self.elements, c)?;
        self.elements.iter().position(|x| x == e)
    }
    pub fn is_antichain(&self, ord: &OrderWitness) -> bool {
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements.iter().enumerate().all(|(j, b)| i == j || !ord.leq_unchecked(a, b))
        })
    }
}

/// Keeps, in canonical order, the configurations not dominating an
/// already-kept one.
pub fn min_set(domain: &[Configuration], ord: &OrderWitness) -> MinSet {
    let mut sorted: Vec<&Configuration> = domain.iter().collect();
    sorted.sort_by(|a, b| ord.canonical_cmp(a, b));
    let mut kept: Vec<Configuration> = Vec::new();
    for c in sorted {
        if !kept.iter().any(|k| ord.leq_unchecked(k, c)) {
            kept.push(c.clone());
        }
    }
    MinSet { elements: kept }
}

/// Upward-closed sets of credit vectors, given by their minimal elements.
pub mod antichain {
    pub type Frontier = Vec<Vec<i64>>;

    pub fn dominates(x: &[i64], y: &[i64]) -> bool {
        x.iter().zip(y).all(|(a, b)| a >= b)
    }

    pub fn contains(f: &Frontier, x: &[i64]) -> bool {
        f.iter().any(|m| dominates(x, m))
    }

    pub fn minimize(mut v: Frontier) -> Frontier {
        v.sort_by(|a, b| (a.iter().sum::<i64>(), a).cmp(&(b.iter().sum::<i64>(), b)));
        v.dedup();
        let mut out: Frontier = Vec::new();
        for x in v {
            if !out.iter().any(|m| dominates(&x, m)) {
                out.push(x);
            }
        }
        out
    }

    pub fn union(a: &Frontier, b: &Frontier) -> Frontier {
        minimize(a.iter().chain(b).cloned().collect())
    }

    pub fn intersection(a: &Frontier, b: &Frontier) -> Frontier {
        let mut v = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                v.push(x.iter().zip(y).map(|(p, q)| *p.max(q)).collect());
            }
        }
        minimize(v)
    }

    /// Credits `x ≥ 0` with `x + w ∈ ↑f`.
    pub fn pre(f: &Frontier, w: &[i64]) -> Frontier {
        minimize(f.iter().map(|m| m.iter().zip(w).map(|(a, b)| (a - b).max(0)).collect()).collect())
    }

    pub fn everything(dim: usize) -> Frontier {
        vec![vec![0; dim]]
    }
}

use antichain::Frontier;

/// Default bound on the credits tracked by energy fixpoints; elements above
/// it are discarded as losing.
pub const DEFAULT_CREDIT_CAP: i64 = 64;

/// Winning configurations, finitely presented per monitor state: minimal
/// winning credits, plus whether depleted configurations still win.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub dim: usize,
    pub frontier: Vec<Frontier>,
    pub depleted_ok: Vec<bool>,
    /// Positional winning strategy on monitor states, available for
    /// energy-free conditions.
    pub seed: Option<Vec<Option<usize>>>,
}

impl Region {
    pub fn contains(&self, c: &Configuration) -> bool {
        match &c.credit {
            Credit::Depleted => self.depleted_ok[c.state],
            Credit::Live(v) => antichain::contains(&self.frontier[c.state], v),
        }
    }
    pub fn state_winning(&self, q: usize) -> bool {
        !self.frontier[q].is_empty()
    }
    pub fn num_states(&self) -> usize {
        self.frontier.len()
    }

    /// Minimal elements of the region restricted to the states accepted by
    /// `keep`, in canonical order.
    pub fn minimal_elements(&self, keep: impl Fn(usize) -> bool) -> Vec<Configuration> {
        let mut out = Vec::new();
        for q in 0..self.num_states() {
            if !keep(q) {
                continue;
            }
            if self.depleted_ok[q] && self.dim > 0 {
                out.push(Configuration::depleted(q));
            } else {
                out.extend(self.frontier[q].iter().map(|f| Configuration::new(q, f.clone())));
            }
        }
        out
    }

    pub fn to_json(&self, m: &ConditionMonitor) -> Value {
        let mut states = Map::new();
        for q in 0..self.num_states() {
            states.insert(
                m.name(q).to_string(),
                json!({ "minimalCredits": self.frontier[q], "depletedWins": self.depleted_ok[q] }),
            );
        }
        Value::Object(states)
    }
}

/// Player-1 actions keeping every reply inside the region.
pub fn non_losing_actions(c: &Configuration, region: &Region, m: &ConditionMonitor) -> Result<Vec<usize>> {
    if !region.contains(c) {
        return Err(Error::NotWinning);
    }
    let al = m.alphabet();
    Ok((0..al.num_a())
        .filter(|&a| (0..al.num_b()).all(|b| region.contains(&c.step(m, Pair::new(a, b)))))
        .collect())
}

pub(crate) fn smallest_non_losing(c: &Configuration, region: &Region, m: &ConditionMonitor) -> Result<usize> {
    non_losing_actions(c, region, m)?
        .first()
        .copied()
        .ok_or_else(|| Error::Internal(format!("winning configuration {c} has no non-losing action")))
}

/// A controllable-predecessor target: a state set, or per-state credit frontiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    States(Vec<bool>),
    Credits(Vec<Frontier>),
}

/// `∃a ∀b` predecessor of a target.
pub fn cpre(target: &Target, m: &ConditionMonitor) -> Target {
    match target {
        Target::States(t) => Target::States(m.cpre(t)),
        Target::Credits(f) => Target::Credits(energy_pre(m, f, None, true, i64::MAX)),
    }
}

/// One application of the energy predecessor; `attr[q']` successors accept
/// any credit, and `forall` chooses between `∃a∀b` and `∃a∃b`.
fn energy_pre(m: &ConditionMonitor, x: &[Frontier], attr: Option<&[bool]>, forall: bool, cap: i64) -> Vec<Frontier> {
    let al: &Alphabet = m.alphabet();
    let d = m.energy_dim();
    (0..m.num_states())
        .map(|q| {
            let mut acc: Frontier = Vec::new();
            for a in 0..al.num_a() {
                let mut per_a: Option<Frontier> = None;
                for b in 0..al.num_b() {
                    let p = Pair::new(a, b);
                    let t = m.step(q, p);
                    let need = if attr.is_some_and(|s| s[t]) {
                        antichain::everything(d)
                    } else {
                        antichain::pre(&x[t], m.weight(q, p))
                    };
                    per_a = Some(match per_a {
                        None => need,
                        Some(prev) if forall => antichain::intersection(&prev, &need),
                        Some(prev) => antichain::union(&prev, &need),
                    });
                }
                acc = antichain::union(&acc, &per_a.unwrap_or_default());
            }
            acc.retain(|v| v.iter().all(|&c| c <= cap));
            acc
        })
        .collect()
}

/// Greatest fixpoint of the energy predecessor, with states in `attr` fixed
/// to "any credit".
fn energy_fixpoint(m: &ConditionMonitor, attr: &[bool], forall: bool, cap: i64) -> Vec<Frontier> {
    let d = m.energy_dim();
    let mut x: Vec<Frontier> = vec![antichain::everything(d); m.num_states()];
    loop {
        let mut next = energy_pre(m, &x, Some(attr), forall, cap);
        for q in 0..m.num_states() {
            if attr[q] {
                next[q] = antichain::everything(d);
            }
        }
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Configurations with at least one continuation keeping all counters
/// non-negative forever.
pub fn energy_prefix_region(m: &ConditionMonitor, cap: i64) -> Vec<Frontier> {
    energy_fixpoint(m, &vec![false; m.num_states()], false, cap)
}

/// Layered solution of the weak game given by difference-form ranks: returns
/// the winning states and a positional winning strategy.
fn solve_ranked(game: &Game) -> Result<(Vec<bool>, Vec<Option<usize>>)> {
    let m = &game.monitor;
    let n = m.num_states();
    let dform = to_difference_form(&game.condition, m)?;
    let max_rank = dform.rank.iter().copied().max().unwrap_or(0);
    let mut win = vec![false; n];
    let mut strategy: Vec<Option<usize>> = vec![None; n];
    for r in 0..=max_rank {
        let layer: Vec<bool> = dform.rank.iter().map(|&x| x == r).collect();
        if !layer.iter().any(|&x| x) {
            continue;
        }
        let value_one = r < dform.theta && r % 2 != dform.theta % 2;
        if value_one {
            let mut x = layer.clone();
            loop {
                let allowed: Vec<bool> = (0..n).map(|q| x[q] || win[q]).collect();
                let next: Vec<bool> = (0..n).map(|q| x[q] && m.controllable_action(q, &allowed).is_some()).collect();
                if next == x {
                    break;
                }
                x = next;
            }
            let allowed: Vec<bool> = (0..n).map(|q| x[q] || win[q]).collect();
            for q in 0..n {
                if x[q] {
                    strategy[q] = m.controllable_action(q, &allowed);
                    win[q] = true;
                }
            }
        } else {
            loop {
                let fresh: Vec<(usize, usize)> = (0..n)
                    .filter(|&q| layer[q] && !win[q])
                    .filter_map(|q| m.controllable_action(q, &win).map(|a| (q, a)))
                    .collect();
                if fresh.is_empty() {
                    break;
                }
                for (q, a) in fresh {
                    strategy[q] = Some(a);
                    win[q] = true;
                }
            }
        }
    }
    Ok((win, strategy))
}

/// Winning region of a game, with an energy credit cap for multi-energy fixpoints.
pub fn winning_region_capped(game: &Game, cap: i64) -> Result<Region> {
    let m = &game.monitor;
    let n = m.num_states();
    if !game.condition.has_energy() {
        let (win, seed) = solve_ranked(game)?;
        let d = m.energy_dim();
        return Ok(Region {
            dim: d,
            frontier: win.iter().map(|&w| if w { antichain::everything(d) } else { Vec::new() }).collect(),
            depleted_ok: win,
            seed: Some(seed),
        });
    }
    let attr = match &game.condition {
        ConditionExpr::EnergySafe => vec![false; n],
        ConditionExpr::Union(c, o) if **c == ConditionExpr::EnergySafe && !o.has_energy() => {
            if o.classify()?.kind != Kind::Lambda || o.classify()?.level != 1 {
                return Err(Error::Unsupported("energy union with a non-open part".into()));
            }
            let target: Vec<bool> = (0..n).map(|q| o.eval_at(q)).collect();
            m.attractor(&target).0
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "energy condition {} (supported: energySafe, union of energySafe and an open set)",
                game.condition.render(m)
            )))
        }
    };
    let frontier = energy_fixpoint(m, &attr, true, cap);
    Ok(Region { dim: m.energy_dim(), frontier, depleted_ok: attr, seed: None })
}

pub fn winning_region(game: &Game) -> Result<Region> {
    winning_region_capped(game, DEFAULT_CREDIT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, ex10};
    use crate::monitor::EnergySpec;

    fn p(a: usize, b: usize) -> Pair {
        Pair::new(a, b)
    }

    #[test]
    fn config_tracks_state_and_energy() {
        let g = catalog::example10();
        assert_eq!(config(&[], &g.monitor).unwrap(), Configuration::new(ex10::S0, vec![]));
        assert_eq!(config(&[p(0, 0)], &g.monitor).unwrap().state, ex10::S1);

        let al = Alphabet::numeric(1, 1).unwrap();
        let m = ConditionMonitor::from_fn(&al, vec!["q".into()], 0, |_, _| 0)
            .unwrap()
            .with_energy(EnergySpec { weights: vec![vec![vec![-1]]], initial_credit: vec![2] })
            .unwrap();
        assert_eq!(config(&[p(0, 0), p(0, 0)], &m).unwrap(), Configuration::new(0, vec![0]));
        assert!(config(&[p(0, 0); 3], &m).unwrap().is_depleted());
    }

    #[test]
    fn exact_order_on_example10() {
        let g = catalog::example10();
        let ord = OrderWitness::exact(&g).unwrap();
        let c = |q| Configuration::new(q, vec![]);
        assert!(ord.leq(&c(ex10::S0), &c(ex10::S1)).unwrap());
        assert!(!ord.leq(&c(ex10::S1), &c(ex10::S0)).unwrap());
        assert!(!ord.leq(&c(ex10::C), &c(ex10::S0)).unwrap());
        assert!(step_order_preserved(&c(ex10::S0), &c(ex10::S1), p(0, 1), &ord, &g.monitor).unwrap());
        assert!(matches!(ord.leq(&c(17), &c(0)), Err(Error::MonitorMismatch)));
    }

    #[test]
    fn structural_order_compares_credits() {
        let g = catalog::multienergy_d2();
        let ord = OrderWitness::structural(&g);
        assert!(ord.leq(&Configuration::new(0, vec![2, 1]), &Configuration::new(0, vec![3, 1])).unwrap());
        assert!(!ord.leq(&Configuration::new(0, vec![2, 1]), &Configuration::new(1, vec![3, 1])).unwrap());
        assert!(ord.leq(&Configuration::depleted(0), &Configuration::new(0, vec![0, 0])).unwrap());
    }

    #[test]
    fn example10_region_and_actions() {
        let g = catalog::example10();
        let r = winning_region(&g).unwrap();
        let c = |q| Configuration::new(q, vec![]);
        for q in [ex10::S0, ex10::S1, ex10::C, ex10::W2, ex10::WIN] {
            assert!(r.contains(&c(q)), "state {q}");
        }
        assert!(!r.contains(&c(ex10::LOSE)));
        assert_eq!(non_losing_actions(&c(ex10::S0), &r, &g.monitor).unwrap(), vec![0]);
        assert!(matches!(non_losing_actions(&c(ex10::LOSE), &r, &g.monitor), Err(Error::NotWinning)));
    }

    #[test]
    fn min_set_of_chain() {
        let g = catalog::multienergy_d2();
        let ord = OrderWitness::structural(&g);
        let dom: Vec<Configuration> = (2..6).map(|k| Configuration::new(0, vec![k, 0])).collect();
        assert_eq!(min_set(&dom, &ord).elements, vec![Configuration::new(0, vec![2, 0])]);
    }

    #[test]
    fn two_counter_region() {
        let g = catalog::multienergy_d2();
        let r = winning_region(&g).unwrap();
        assert!(r.contains(&Configuration::initial(&g.monitor)));
        assert!(!r.contains(&Configuration::new(0, vec![0, 0])));
    }
}

//! Winning conditions as finite-level expressions over a monitor: hierarchy
//! classification, the closed/Λ decomposition of K-level sets, cylinder
//! intersection, and the interchangeable representations (difference form,
//! eventually constant labelling, Büchi coloring) with their membership tests.

use crate::error::{Error, Result};
use crate::game::{Alphabet, Lasso, Pair, UltimatelyPeriodicPlay};
use crate::graph::{self, Sccs};
use crate::monitor::{ConditionMonitor, EnergySpec};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

/// A branch of an open union: plays entering `guard` and satisfying `expr`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub guard: BTreeSet<usize>,
    pub expr: ConditionExpr,
}

/// Expression tree over the states of a [`ConditionMonitor`].
///
/// State sets used by `Open` and by union guards must be traps of the
/// monitor, so "the play visits T" and "the play eventually stays in T"
/// coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConditionExpr {
    /// Plays that visit the target trap.
    Open(BTreeSet<usize>),
    Not(Box<ConditionExpr>),
    /// Disjointly guarded union.
    OpenUnion(Vec<Branch>),
    /// Every energy counter stays non-negative along the whole play.
    EnergySafe,
    /// Union of a closed set and an open set, the shape `C ∪ O` of the
    /// second level.
    Union(Box<ConditionExpr>, Box<ConditionExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Lambda,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HierarchyClass {
    pub kind: Kind,
    pub level: usize,
}

impl fmt::Display for HierarchyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Lambda => write!(f, "Λ{}", self.level),
            Kind::K => write!(f, "K{}", self.level),
        }
    }
}

impl HierarchyClass {
    pub fn lambda(level: usize) -> Self {
        HierarchyClass { kind: Kind::Lambda, level }
    }
    pub fn k(level: usize) -> Self {
        HierarchyClass { kind: Kind::K, level }
    }
    pub fn dual(self) -> Self {
        HierarchyClass { kind: if self.kind == Kind::K { Kind::Lambda } else { Kind::K }, level: self.level }
    }
    /// Short ASCII tag such as `K2`, used in reports.
    pub fn tag(&self) -> String {
        match self.kind {
            Kind::Lambda => format!("Lambda{}", self.level),
            Kind::K => format!("K{}", self.level),
        }
    }
}

impl ConditionExpr {
    pub fn open(states: impl IntoIterator<Item = usize>) -> Self {
        ConditionExpr::Open(states.into_iter().collect())
    }
    /// Complement, cancelling a double negation.
    pub fn negate(self) -> Self {
        match self {
            ConditionExpr::Not(inner) => *inner,
            other => ConditionExpr::Not(Box::new(other)),
        }
    }
    pub fn closed(avoid: impl IntoIterator<Item = usize>) -> Self {
        ConditionExpr::open(avoid).negate()
    }
    pub fn open_union(branches: impl IntoIterator<Item = (BTreeSet<usize>, ConditionExpr)>) -> Self {
        ConditionExpr::OpenUnion(branches.into_iter().map(|(guard, expr)| Branch { guard, expr }).collect())
    }
    pub fn union(closed: ConditionExpr, open: ConditionExpr) -> Self {
        ConditionExpr::Union(Box::new(closed), Box::new(open))
    }

    pub fn has_energy(&self) -> bool {
        match self {
            ConditionExpr::Open(_) => false,
            ConditionExpr::EnergySafe => true,
            ConditionExpr::Not(e) => e.has_energy(),
            ConditionExpr::OpenUnion(bs) => bs.iter().any(|b| b.expr.has_energy()),
            ConditionExpr::Union(c, o) => c.has_energy() || o.has_energy(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ConditionExpr::Open(_) | ConditionExpr::EnergySafe => 1,
            ConditionExpr::Not(e) => e.depth(),
            ConditionExpr::OpenUnion(bs) => 1 + bs.iter().map(|b| b.expr.depth()).max().unwrap_or(0),
            ConditionExpr::Union(c, o) => 1 + c.depth().max(o.depth()),
        }
    }

    /// Minimal finite level according to the inductive definition of the
    /// fine hierarchy.
    pub fn classify(&self) -> Result<HierarchyClass> {
        match self {
            ConditionExpr::Open(_) => Ok(HierarchyClass::lambda(1)),
            ConditionExpr::EnergySafe => Ok(HierarchyClass::k(1)),
            ConditionExpr::Not(e) => Ok(e.classify()?.dual()),
            ConditionExpr::OpenUnion(bs) => {
                let mut level = 1;
                for b in bs {
                    let c = b.expr.classify()?;
                    level = level.max(match c.kind {
                        Kind::Lambda => c.level,
                        Kind::K => c.level + 1,
                    });
                }
                Ok(HierarchyClass::lambda(level))
            }
            ConditionExpr::Union(c, o) => {
                if c.classify()? != HierarchyClass::k(1) || o.classify()? != HierarchyClass::lambda(1) {
                    return Err(Error::InvalidExpr("union must join a closed set and an open set".into()));
                }
                Ok(HierarchyClass::k(2))
            }
        }
    }

    /// Checks the expression against its monitor: states exist, targets and
    /// guards are traps, guards are pairwise disjoint, energy is only used
    /// positively on monitors with counters.
    pub fn validate(&self, m: &ConditionMonitor) -> Result<()> {
        self.validate_inner(m, true)?;
        self.classify().map(|_| ())
    }

    fn validate_inner(&self, m: &ConditionMonitor, positive: bool) -> Result<()> {
        let check_set = |s: &BTreeSet<usize>, what: &str| -> Result<()> {
            if let Some(&q) = s.iter().find(|&&q| q >= m.num_states()) {
                return Err(Error::InvalidExpr(format!("{what} mentions unknown state {q}")));
            }
            if !m.is_trap(&m.set_of(s.iter().copied())) {
                return Err(Error::InvalidExpr(format!(
                    "{what} {{{}}} is not closed under the monitor's transitions",
                    s.iter().map(|&q| m.name(q)).collect::<Vec<_>>().join(", ")
                )));
            }
            Ok(())
        };
        match self {
            ConditionExpr::Open(t) => check_set(t, "open target"),
            ConditionExpr::EnergySafe => {
                if m.energy_dim() == 0 {
                    Err(Error::InvalidExpr("energySafe requires energy counters".into()))
                } else if !positive {
                    Err(Error::Unsupported("energySafe under a complement".into()))
                } else {
                    Ok(())
                }
            }
            ConditionExpr::Not(e) => e.validate_inner(m, !positive),
            ConditionExpr::OpenUnion(bs) => {
                for (i, b) in bs.iter().enumerate() {
                    check_set(&b.guard, "guard")?;
                    for other in &bs[..i] {
                        if let Some(q) = b.guard.intersection(&other.guard).next() {
                            return Err(Error::InvalidExpr(format!(
                                "open-union guards overlap on state {:?}",
                                m.name(*q)
                            )));
                        }
                    }
                    b.expr.validate_inner(m, positive)?;
                }
                Ok(())
            }
            ConditionExpr::Union(c, o) => {
                c.validate_inner(m, positive)?;
                o.validate_inner(m, positive)
            }
        }
    }

    /// Value of a play whose eventual monitor states include `q`. Only
    /// meaningful for energy-free expressions.
    pub fn eval_at(&self, q: usize) -> bool {
        match self {
            ConditionExpr::Open(t) => t.contains(&q),
            ConditionExpr::EnergySafe => true,
            ConditionExpr::Not(e) => !e.eval_at(q),
            ConditionExpr::OpenUnion(bs) => bs.iter().any(|b| b.guard.contains(&q) && b.expr.eval_at(q)),
            ConditionExpr::Union(c, o) => c.eval_at(q) || o.eval_at(q),
        }
    }

    /// Decides membership of an ultimately periodic play.
    pub fn member(&self, m: &ConditionMonitor, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        let run = MonitorRun::new(m, m.initial(), play)?;
        Ok(self.member_run(m, &run))
    }

    /// Membership of the play read from monitor state `from` with credit `credit`.
    pub fn member_from(
        &self,
        m: &ConditionMonitor,
        from: usize,
        credit: &[i64],
        play: &UltimatelyPeriodicPlay,
    ) -> Result<bool> {
        let mut run = MonitorRun::new(m, from, play)?;
        run.credit = credit.to_vec();
        Ok(self.member_run(m, &run))
    }

    fn member_run(&self, m: &ConditionMonitor, run: &MonitorRun) -> bool {
        match self {
            ConditionExpr::Open(t) => t.contains(&run.eventual),
            ConditionExpr::EnergySafe => run.energy_safe(m),
            ConditionExpr::Not(e) => !e.member_run(m, run),
            ConditionExpr::OpenUnion(bs) => bs.iter().any(|b| b.guard.contains(&run.eventual) && b.expr.member_run(m, run)),
            ConditionExpr::Union(c, o) => c.member_run(m, run) || o.member_run(m, run),
        }
    }

    /// Splits a K-level expression into a closed part and a part of level at
    /// most the input's, whose union is the input.
    pub fn decompose_k(&self) -> Result<(ConditionExpr, ConditionExpr)> {
        let class = self.classify()?;
        if class.kind != Kind::K {
            return Err(Error::WrongClass(format!("decomposition needs a K-level expression, got {class}")));
        }
        match self {
            ConditionExpr::EnergySafe => Ok((self.clone(), ConditionExpr::open([]))),
            ConditionExpr::Union(c, o) => Ok(((**c).clone(), (**o).clone())),
            ConditionExpr::Not(inner) => match &**inner {
                ConditionExpr::Open(_) => Ok((self.clone(), ConditionExpr::open([]))),
                ConditionExpr::Not(x) => x.decompose_k(),
                ConditionExpr::OpenUnion(bs) => {
                    let all_guards: BTreeSet<usize> = bs.iter().flat_map(|b| b.guard.iter().copied()).collect();
                    let lambda = ConditionExpr::OpenUnion(
                        bs.iter().map(|b| Branch { guard: b.guard.clone(), expr: b.expr.clone().negate() }).collect(),
                    );
                    Ok((ConditionExpr::closed(all_guards), lambda))
                }
                _ => Err(Error::Internal("unexpected K-level shape".into())),
            },
            _ => Err(Error::Internal("unexpected K-level shape".into())),
        }
    }

    /// Applies `f` to every state mentioned in the expression.
    pub fn map_states(&self, f: &dyn Fn(usize) -> BTreeSet<usize>) -> ConditionExpr {
        let lift = |s: &BTreeSet<usize>| s.iter().flat_map(|&q| f(q)).collect::<BTreeSet<usize>>();
        match self {
            ConditionExpr::Open(t) => ConditionExpr::Open(lift(t)),
            ConditionExpr::EnergySafe => ConditionExpr::EnergySafe,
            ConditionExpr::Not(e) => ConditionExpr::Not(Box::new(e.map_states(f))),
            ConditionExpr::OpenUnion(bs) => ConditionExpr::OpenUnion(
                bs.iter().map(|b| Branch { guard: lift(&b.guard), expr: b.expr.map_states(f) }).collect(),
            ),
            ConditionExpr::Union(c, o) => ConditionExpr::Union(Box::new(c.map_states(f)), Box::new(o.map_states(f))),
        }
    }

    pub fn to_json(&self, m: &ConditionMonitor) -> Value {
        let names = |s: &BTreeSet<usize>| Value::Array(s.iter().map(|&q| json!(m.name(q))).collect());
        match self {
            ConditionExpr::Open(t) => json!({ "open": names(t) }),
            ConditionExpr::EnergySafe => json!({ "energySafe": true }),
            ConditionExpr::Not(e) => json!({ "not": e.to_json(m) }),
            ConditionExpr::OpenUnion(bs) => json!({
                "openUnion": bs.iter().map(|b| json!({ "guard": names(&b.guard), "expr": b.expr.to_json(m) })).collect::<Vec<_>>()
            }),
            ConditionExpr::Union(c, o) => json!({ "union": [c.to_json(m), o.to_json(m)] }),
        }
    }

    /// Parses the tagged-object syntax; `path` prefixes error locations.
    pub fn from_json(v: &Value, m: &ConditionMonitor, path: &str) -> Result<Self> {
        let schema = |p: &str, msg: &str| Error::Schema { path: p.to_string(), message: msg.to_string() };
        let obj = v.as_object().ok_or_else(|| schema(path, "expected an expression object"))?;
        if obj.len() != 1 {
            return Err(schema(path, "expression objects carry exactly one tag"));
        }
        let (tag, body) = obj.iter().next().expect("one entry");
        let here = format!("{path}.{tag}");
        let states = |v: &Value, p: &str| -> Result<BTreeSet<usize>> {
            v.as_array()
                .ok_or_else(|| schema(p, "expected an array of state names"))?
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let name = s.as_str().ok_or_else(|| schema(&format!("{p}[{i}]"), "expected a state name"))?;
                    m.state_index(name).ok_or_else(|| schema(&format!("{p}[{i}]"), &format!("unknown state {name:?}")))
                })
                .collect()
        };
        match tag.as_str() {
            "open" => Ok(ConditionExpr::Open(states(body, &here)?)),
            "not" => Ok(ConditionExpr::Not(Box::new(ConditionExpr::from_json(body, m, &here)?))),
            "energySafe" => match body {
                Value::Bool(true) => Ok(ConditionExpr::EnergySafe),
                _ => Err(schema(&here, "expected true")),
            },
            "openUnion" => {
                let arr = body.as_array().ok_or_else(|| schema(&here, "expected an array of branches"))?;
                let mut branches = Vec::with_capacity(arr.len());
                for (i, b) in arr.iter().enumerate() {
                    let bp = format!("{here}[{i}]");
                    let guard = states(b.get("guard").ok_or_else(|| schema(&bp, "missing guard"))?, &format!("{bp}.guard"))?;
                    let expr = ConditionExpr::from_json(
                        b.get("expr").ok_or_else(|| schema(&bp, "missing expr"))?,
                        m,
                        &format!("{bp}.expr"),
                    )?;
                    branches.push(Branch { guard, expr });
                }
                Ok(ConditionExpr::OpenUnion(branches))
            }
            "union" => {
                let arr = body.as_array().filter(|a| a.len() == 2).ok_or_else(|| schema(&here, "expected [closed, open]"))?;
                Ok(ConditionExpr::union(
                    ConditionExpr::from_json(&arr[0], m, &format!("{here}[0]"))?,
                    ConditionExpr::from_json(&arr[1], m, &format!("{here}[1]"))?,
                ))
            }
            other => Err(schema(path, &format!("unknown expression tag {other:?}"))),
        }
    }

    /// Compact textual rendering using state names.
    pub fn render(&self, m: &ConditionMonitor) -> String {
        let names = |s: &BTreeSet<usize>| s.iter().map(|&q| m.name(q).to_string()).collect::<Vec<_>>().join(",");
        match self {
            ConditionExpr::Open(t) => format!("OPEN{{{}}}", names(t)),
            ConditionExpr::EnergySafe => "ENERGY_SAFE".into(),
            ConditionExpr::Not(e) => format!("NOT({})", e.render(m)),
            ConditionExpr::OpenUnion(bs) => format!(
                "OPEN_UNION[{}]",
                bs.iter().map(|b| format!("{{{}}}: {}", names(&b.guard), b.expr.render(m))).collect::<Vec<_>>().join("; ")
            ),
            ConditionExpr::Union(c, o) => format!("({}) ∪ ({})", c.render(m), o.render(m)),
        }
    }
}

/// The monitor run along a lasso play, closed into its own lasso over
/// `(state, phase)`.
#[derive(Clone, Debug)]
struct MonitorRun {
    /// Transitions `(state, pair index)` of the prefix followed by one pass of the cycle.
    steps: Vec<(usize, usize)>,
    cycle_start: usize,
    eventual: usize,
    credit: Vec<i64>,
}

impl MonitorRun {
    fn new(m: &ConditionMonitor, from: usize, play: &UltimatelyPeriodicPlay) -> Result<Self> {
        if play.cycle.is_empty() {
            return Err(Error::InvalidParams("play cycle must be non-empty".into()));
        }
        for &p in play.prefix.iter().chain(&play.cycle) {
            m.alphabet().check_pair(p)?;
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut steps = Vec::new();
        let mut q = from;
        let mut t = 0;
        loop {
            if t >= play.prefix.len() {
                if let Some(&first) = seen.get(&(q, play.phase(t))) {
                    return Ok(MonitorRun { eventual: q, cycle_start: first, steps, credit: m.initial_credit().to_vec() });
                }
                seen.insert((q, play.phase(t)), t);
            }
            let pi = m.alphabet().pair_index(*play.at(t));
            steps.push((q, pi));
            q = m.step_index(q, pi);
            t += 1;
        }
    }

    fn energy_safe(&self, m: &ConditionMonitor) -> bool {
        let mut credit = self.credit.clone();
        let mut at_cycle = credit.clone();
        for (t, &(q, pi)) in self.steps.iter().enumerate() {
            if t == self.cycle_start {
                at_cycle = credit.clone();
            }
            for (c, w) in credit.iter_mut().zip(m.weight_index(q, pi)) {
                *c += w;
            }
            if credit.iter().any(|&c| c < 0) {
                return false;
            }
        }
        credit.iter().zip(&at_cycle).all(|(end, start)| end >= start)
    }
}

/// Requires an energy-free reading of the expression.
fn require_energy_free(expr: &ConditionExpr, what: &str) -> Result<()> {
    if expr.has_energy() {
        Err(Error::Unsupported(format!("{what} needs an energy-free expression")))
    } else {
        Ok(())
    }
}

/// `D_θ((O_η)_{η<θ})` over monitor states, each `O_η` a trap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceForm {
    pub theta: usize,
    pub opens: Vec<Vec<bool>>,
    /// Stable rank of each state: least η with the state in `O_η`, or `theta`
    /// and beyond when it lies in none.
    pub rank: Vec<usize>,
}

impl DifferenceForm {
    /// Least η such that the play visits `O_η`; the play is a member iff that η
    /// exists and has parity opposite to θ.
    pub fn member(&self, m: &ConditionMonitor, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        let visited = visited_states(m, play)?;
        let least = (0..self.theta).find(|&eta| visited.iter().any(|&q| self.opens[eta][q]));
        Ok(matches!(least, Some(eta) if eta % 2 != self.theta % 2))
    }

    /// The same set presented at a larger level, by prepending empty opens.
    pub fn padded(&self, theta: usize) -> DifferenceForm {
        assert!(theta >= self.theta);
        let k = theta - self.theta;
        let n = self.rank.len();
        let mut opens = vec![vec![false; n]; k];
        opens.extend(self.opens.iter().cloned());
        DifferenceForm { theta, opens, rank: self.rank.iter().map(|r| r + k).collect() }
    }

    /// Whether the sequence of opens is increasing and each open is a trap.
    pub fn is_well_formed(&self, m: &ConditionMonitor) -> bool {
        self.opens.len() == self.theta
            && self.opens.iter().all(|o| m.is_trap(o))
            && self.opens.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| !a || *b))
    }

    pub fn labelling(&self) -> Labelling {
        Labelling {
            label: self.rank.iter().map(|&r| r < self.theta && r % 2 != self.theta % 2).collect(),
        }
    }
}

fn visited_states(m: &ConditionMonitor, play: &UltimatelyPeriodicPlay) -> Result<Vec<usize>> {
    let run = MonitorRun::new(m, m.initial(), play)?;
    let mut v: Vec<usize> = run.steps.iter().map(|&(q, _)| q).collect();
    v.push(run.eventual);
    Ok(v)
}

/// Ranks computed bottom-up over the monitor's SCCs for a fixed parity of θ.
fn ranks_for_parity(m: &ConditionMonitor, value: &dyn Fn(usize) -> bool, parity: usize) -> (Vec<usize>, usize) {
    let adj = m.adjacency();
    let sccs = Sccs::new(&adj);
    let mut rank = vec![0usize; m.num_states()];
    let mut max_one: Option<usize> = None;
    for (id, members) in sccs.comps.iter().enumerate() {
        let base = members
            .iter()
            .flat_map(|&q| adj[q].iter())
            .filter(|&&t| sccs.comp[t] != id)
            .map(|&t| rank[t])
            .max()
            .unwrap_or(0);
        let r = if sccs.nontrivial[id] {
            let v = value(members[0]);
            let want = if v { 1 - parity } else { parity };
            if base % 2 == want {
                base
            } else {
                base + 1
            }
        } else {
            base
        };
        if sccs.nontrivial[id] && value(members[0]) {
            max_one = Some(max_one.map_or(r, |x: usize| x.max(r)));
        }
        for &q in members {
            rank[q] = r;
        }
    }
    let mut theta = max_one.map_or(1, |x| x + 1).max(1);
    if theta % 2 != parity {
        theta += 1;
    }
    (rank, theta)
}

/// Minimal difference form of an energy-free expression over its monitor.
pub fn to_difference_form(expr: &ConditionExpr, m: &ConditionMonitor) -> Result<DifferenceForm> {
    require_energy_free(expr, "the difference form")?;
    expr.classify()?;
    let value = |q: usize| expr.eval_at(q);
    let candidates = [ranks_for_parity(m, &value, 0), ranks_for_parity(m, &value, 1)];
    let (rank, theta) = candidates.into_iter().min_by_key(|(_, t)| *t).expect("two candidates");
    let opens = (0..theta).map(|eta| rank.iter().map(|&r| r <= eta).collect()).collect();
    Ok(DifferenceForm { theta, opens, rank })
}

/// State-based 0/1 labelling of histories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling {
    pub label: Vec<bool>,
}

impl Labelling {
    /// Whether infinitely many prefixes of the play carry label 1.
    pub fn member(&self, m: &ConditionMonitor, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        let run = MonitorRun::new(m, m.initial(), play)?;
        Ok(run.steps[run.cycle_start..].iter().any(|&(q, _)| self.label[q]))
    }
}

pub fn to_labelling(expr: &ConditionExpr, m: &ConditionMonitor) -> Result<Labelling> {
    if m.energy_dim() > 0 && expr.has_energy() {
        return Err(Error::Unsupported("labellings need an energy-free condition".into()));
    }
    let lbl = to_difference_form(expr, m)?.labelling();
    if let Err(w) = is_eventually_constant(&lbl, m) {
        return Err(Error::NotEventuallyConstant(w));
    }
    Ok(lbl)
}

/// Cheapest pair leading from `u` to `v`.
pub(crate) fn edge_pair(m: &ConditionMonitor, u: usize, v: usize) -> Pair {
    let pi = (0..m.alphabet().num_pairs()).find(|&pi| m.step_index(u, pi) == v).expect("edge exists");
    m.alphabet().pair_at(pi)
}

pub(crate) fn path_pairs(m: &ConditionMonitor, states: &[usize]) -> Vec<Pair> {
    states.windows(2).map(|w| edge_pair(m, w[0], w[1])).collect()
}

/// Whether every reachable cycle is label-constant. On failure the error
/// carries a play along which labels alternate forever.
pub fn is_eventually_constant(lbl: &Labelling, m: &ConditionMonitor) -> std::result::Result<(), UltimatelyPeriodicPlay> {
    let adj = m.adjacency();
    let sccs = Sccs::new(&adj);
    let reach = graph::reachable(&adj, [m.initial()]);
    for (id, members) in sccs.comps.iter().enumerate() {
        if !sccs.nontrivial[id] || !reach[members[0]] {
            continue;
        }
        let p = members[0];
        let Some(&q) = members.iter().find(|&&q| lbl.label[q] != lbl.label[p]) else { continue };
        let inside = |x: usize| sccs.comp[x] == id;
        let to_p = graph::bfs_path(&adj, m.initial(), |_| true, |x| x == p).expect("reachable");
        let p_to_q = graph::bfs_path(&adj, p, inside, |x| x == q).expect("same component");
        let q_to_p = graph::bfs_path(&adj, q, inside, |x| x == p).expect("same component");
        let mut cycle_states = p_to_q.clone();
        cycle_states.extend_from_slice(&q_to_p[1..]);
        let play = Lasso { prefix: path_pairs(m, &to_p), cycle: path_pairs(m, &cycle_states) };
        return Err(play);
    }
    Ok(())
}

/// A Π⁰₂ set presented over a monitor as an intersection of decreasing opens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi02Presentation {
    /// `O_n` = plays that visit the given states at least `n` times (after
    /// the first step); the intersection is "infinitely many visits".
    Hits(Vec<bool>),
    /// Explicit decreasing traps `O_0 = all ⊇ O_1 ⊇ … ⊇ O_k`, with `O_n = O_k`
    /// beyond the list.
    Opens(Vec<Vec<bool>>),
}

/// Coloring of histories, realized on a derived monitor whose states record
/// the last transition of the base monitor.
#[derive(Clone, Debug)]
pub struct BuchiColoring {
    pub monitor: ConditionMonitor,
    /// `(previous base state, current base state)` for each derived state.
    pub origin: Vec<(Option<usize>, usize)>,
    pub color: Vec<bool>,
}

impl BuchiColoring {
    /// Whether infinitely many prefixes are colored 1.
    pub fn member(&self, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        let run = MonitorRun::new(&self.monitor, self.monitor.initial(), play)?;
        Ok(run.steps[run.cycle_start..].iter().any(|&(q, _)| self.color[q]))
    }
}

const INF: usize = usize::MAX;

/// For the hit presentation: least number of future visits forced from each
/// state (visits counted after leaving it), or `INF` when every path visits
/// infinitely often.
fn forced_hits(m: &ConditionMonitor, hits: &[bool]) -> Vec<usize> {
    let adj = m.adjacency();
    let avoid_forever = graph::infinite_inside(&adj, &vec![true; m.num_states()]);
    // A: states with an infinite path whose visits after the start avoid `hits`.
    let mut a: Vec<bool> = avoid_forever.clone();
    loop {
        let next: Vec<bool> = (0..m.num_states()).map(|q| a[q] && adj[q].iter().any(|&t| !hits[t] && a[t])).collect();
        if next == a {
            break;
        }
        a = next;
    }
    // 0/1 shortest distance to A where entering a hit state costs 1.
    let mut g = vec![INF; m.num_states()];
    let mut deque = VecDeque::new();
    for q in 0..m.num_states() {
        if a[q] {
            g[q] = 0;
            deque.push_back(q);
        }
    }
    let mut rev = vec![Vec::new(); m.num_states()];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    while let Some(v) = deque.pop_front() {
        for &u in &rev[v] {
            let cost = g[v] + usize::from(hits[v]);
            if cost < g[u] {
                g[u] = cost;
                if hits[v] {
                    deque.push_back(u);
                } else {
                    deque.push_front(u);
                }
            }
        }
    }
    g
}

/// States from which every path enters the trap `o`.
fn inevitable(m: &ConditionMonitor, o: &[bool]) -> Vec<bool> {
    let adj = m.adjacency();
    let outside: Vec<bool> = o.iter().map(|&x| !x).collect();
    let escape = graph::infinite_inside(&adj, &outside);
    escape.iter().map(|&e| !e).collect()
}

/// Builds the coloring: color 1 when the current history already forces the
/// whole set, or when the largest `n` with the history's cylinder inside
/// `O_n` strictly increases.
pub fn to_buchi_coloring(m: &ConditionMonitor, pres: &Pi02Presentation) -> Result<BuchiColoring> {
    if m.energy_dim() > 0 {
        return Err(Error::InvalidPresentation("Büchi colorings are built over energy-free monitors".into()));
    }
    let n = m.num_states();
    // level(prev, cur): increment of the forced-membership index along an edge;
    // `None` when the cylinder is already inside the set.
    let potential: Box<dyn Fn(usize) -> usize> = match pres {
        Pi02Presentation::Hits(hits) => {
            if hits.len() != n {
                return Err(Error::InvalidPresentation("hit set does not match the monitor".into()));
            }
            let g = forced_hits(m, hits);
            Box::new(move |q| g[q])
        }
        Pi02Presentation::Opens(opens) => {
            if opens.is_empty() || opens.iter().any(|o| o.len() != n) {
                return Err(Error::InvalidPresentation("open list must be non-empty and match the monitor".into()));
            }
            if !opens[0].iter().all(|&x| x) {
                return Err(Error::InvalidPresentation("the first open must be the full space".into()));
            }
            for (i, w) in opens.windows(2).enumerate() {
                if w[1].iter().zip(&w[0]).any(|(a, b)| *a && !*b) {
                    return Err(Error::InvalidPresentation(format!("open {} is not included in open {}", i + 1, i)));
                }
            }
            if let Some(i) = opens.iter().position(|o| !m.is_trap(o)) {
                return Err(Error::InvalidPresentation(format!("open {i} is not a trap")));
            }
            let forced: Vec<Vec<bool>> = opens.iter().map(|o| inevitable(m, o)).collect();
            let last = opens.len() - 1;
            Box::new(move |q| {
                if forced[last][q] {
                    INF
                } else {
                    (0..=last).rev().find(|&k| forced[k][q]).unwrap_or(0)
                }
            })
        }
    };
    let hit = |q: usize| match pres {
        Pi02Presentation::Hits(h) => usize::from(h[q]),
        Pi02Presentation::Opens(_) => 0,
    };
    let color_of = |prev: Option<usize>, cur: usize| -> bool {
        let pc = potential(cur);
        if pc == INF {
            return true;
        }
        match prev {
            None => false,
            Some(p) => hit(cur) + pc > potential(p),
        }
    };
    // Derived monitor over (previous, current) pairs reachable from the start.
    let mut index: HashMap<(Option<usize>, usize), usize> = HashMap::new();
    let mut origin = vec![(None, m.initial())];
    index.insert((None, m.initial()), 0);
    let mut step: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < origin.len() {
        let (_, cur) = origin[i];
        let mut row = Vec::with_capacity(m.alphabet().num_pairs());
        for pi in 0..m.alphabet().num_pairs() {
            let key = (Some(cur), m.step_index(cur, pi));
            let id = *index.entry(key).or_insert_with(|| {
                origin.push(key);
                origin.len() - 1
            });
            row.push(id);
        }
        step.push(row);
        i += 1;
    }
    let names = origin
        .iter()
        .map(|&(p, c)| match p {
            None => format!("^{}", m.name(c)),
            Some(p) => format!("{}>{}", m.name(p), m.name(c)),
        })
        .collect();
    let color = origin.iter().map(|&(p, c)| color_of(p, c)).collect();
    let monitor = ConditionMonitor::new(m.alphabet().clone(), names, 0, step, None)?;
    Ok(BuchiColoring { monitor, origin, color })
}

/// Π⁰₂ presentation of an energy-free expression: the plays visiting
/// label-1 states infinitely often.
pub fn pi02_presentation(expr: &ConditionExpr, m: &ConditionMonitor) -> Result<Pi02Presentation> {
    Ok(Pi02Presentation::Hits(to_labelling(expr, m)?.label))
}

/// Product of the monitor with a tracker of the fixed history `h`, and the
/// expression denoting `W ∩ cyl(h)` over it.
pub fn intersect_cylinder(
    expr: &ConditionExpr,
    m: &ConditionMonitor,
    h: &[Pair],
) -> Result<(ConditionMonitor, ConditionExpr)> {
    for &p in h {
        m.alphabet().check_pair(p)?;
    }
    let class = expr.classify()?;
    if class.kind == Kind::K && expr.has_energy() {
        return Err(Error::Unsupported("cylinder intersection of energy K-level sets".into()));
    }
    // Tracker positions: 0..=|h| matched so far (|h| = inside), |h|+1 = diverged.
    let inside = h.len();
    let out = h.len() + 1;
    let track = |t: usize, p: Pair| -> usize {
        if t == inside || t == out {
            t
        } else if h[t] == p {
            t + 1
        } else {
            out
        }
    };
    let al: &Alphabet = m.alphabet();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = vec![(m.initial(), 0usize)];
    index.insert((m.initial(), 0), 0);
    let mut step = Vec::new();
    let mut weights = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (q, t) = states[i];
        let mut row = Vec::new();
        let mut wrow = Vec::new();
        for p in al.pairs() {
            let key = (m.step(q, p), track(t, p));
            let id = *index.entry(key).or_insert_with(|| {
                states.push(key);
                states.len() - 1
            });
            row.push(id);
            wrow.push(m.weight(q, p).to_vec());
        }
        step.push(row);
        weights.push(wrow);
        i += 1;
    }
    let names = states
        .iter()
        .map(|&(q, t)| {
            let tag = if t == inside { "in".to_string() } else if t == out { "out".to_string() } else { t.to_string() };
            format!("{}@{tag}", m.name(q))
        })
        .collect();
    let energy = (m.energy_dim() > 0).then(|| EnergySpec { weights, initial_credit: m.initial_credit().to_vec() });
    let product = ConditionMonitor::new(al.clone(), names, 0, step, energy)?;
    let lifted_states = states.clone();
    let lift = move |q: usize| -> BTreeSet<usize> {
        lifted_states.iter().enumerate().filter(|(_, &(x, _))| x == q).map(|(i, _)| i).collect()
    };
    let in_set: BTreeSet<usize> = states.iter().enumerate().filter(|(_, &(_, t))| t == inside).map(|(i, _)| i).collect();
    let out_set: BTreeSet<usize> = states.iter().enumerate().filter(|(_, &(_, t))| t == out).map(|(i, _)| i).collect();
    let lifted = expr.map_states(&lift);
    let result = match class.kind {
        Kind::Lambda => ConditionExpr::open_union([(in_set, lifted)]),
        Kind::K => {
            let all: BTreeSet<usize> = (0..product.num_states()).collect();
            ConditionExpr::open_union([(out_set, ConditionExpr::Open(all)), (in_set, lifted.negate())]).negate()
        }
    };
    Ok((product, result))
}

/// A monitor-presented game: the monitor, its winning condition and metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub name: String,
    pub description: String,
    pub monitor: ConditionMonitor,
    pub condition: ConditionExpr,
}

impl Game {
    pub fn new(name: impl Into<String>, monitor: ConditionMonitor, condition: ConditionExpr) -> Result<Self> {
        condition.validate(&monitor)?;
        Ok(Game { name: name.into(), description: String::new(), monitor, condition })
    }
    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }
    pub fn alphabet(&self) -> &Alphabet {
        self.monitor.alphabet()
    }
    pub fn classify(&self) -> Result<HierarchyClass> {
        self.condition.classify()
    }
    pub fn member(&self, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        self.condition.member(&self.monitor, play)
    }
    /// Whether energy counters matter for this game.
    pub fn uses_energy(&self) -> bool {
        self.monitor.energy_dim() > 0 && self.condition.has_energy()
    }
    /// The same game restarted at monitor state `q` (with the initial credit).
    pub fn restarted_at(&self, q: usize) -> Game {
        let mut g = self.clone();
        g.monitor = rebase(&self.monitor, q);
        g
    }
    /// The game with energy annotations dropped when the condition ignores them.
    pub fn effective(&self) -> Game {
        if self.monitor.energy_dim() > 0 && !self.condition.has_energy() {
            Game { monitor: self.monitor.without_energy(), ..self.clone() }
        } else {
            self.clone()
        }
    }
    /// The same monitor with another condition.
    pub fn with_condition(&self, condition: ConditionExpr) -> Game {
        Game { condition, ..self.clone() }
    }
}

/// The monitor with another initial state.
pub fn rebase(m: &ConditionMonitor, q: usize) -> ConditionMonitor {
    let table = (0..m.num_states()).map(|s| m.step_row(s).to_vec()).collect();
    let energy = (m.energy_dim() > 0).then(|| EnergySpec {
        weights: (0..m.num_states())
            .map(|s| (0..m.alphabet().num_pairs()).map(|pi| m.weight_index(s, pi).to_vec()).collect())
            .collect(),
        initial_credit: m.initial_credit().to_vec(),
    });
    ConditionMonitor::new(m.alphabet().clone(), m.names().to_vec(), q, table, energy).expect("rebased monitor stays valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn lasso(prefix: &[(usize, usize)], cycle: &[(usize, usize)]) -> UltimatelyPeriodicPlay {
        let conv = |v: &[(usize, usize)]| v.iter().map(|&(a, b)| Pair::new(a, b)).collect();
        Lasso::new(conv(prefix), conv(cycle)).unwrap()
    }

    #[test]
    fn example10_classifies_k2() {
        let g = catalog::example10();
        assert_eq!(g.classify().unwrap(), HierarchyClass::k(2));
        assert_eq!(ConditionExpr::open([0]).classify().unwrap(), HierarchyClass::lambda(1));
        assert_eq!(ConditionExpr::closed([0]).classify().unwrap(), HierarchyClass::k(1));
    }

    #[test]
    fn example10_membership() {
        let g = catalog::example10();
        assert!(g.member(&lasso(&[(0, 1)], &[(0, 0)])).unwrap());
        assert!(!g.member(&lasso(&[], &[(0, 0)])).unwrap());
        assert!(g.member(&lasso(&[(0, 0), (0, 0), (1, 0)], &[(1, 1)])).unwrap());
        assert!(!g.member(&lasso(&[(0, 0), (1, 0)], &[(0, 0)])).unwrap());
        let all = ConditionExpr::open(0..g.monitor.num_states());
        assert!(all.member(&g.monitor, &lasso(&[], &[(1, 1)])).unwrap());
    }

    #[test]
    fn decomposition_of_example10() {
        let g = catalog::example10();
        let (c, l) = g.condition.decompose_k().unwrap();
        assert_eq!(c.classify().unwrap(), HierarchyClass::k(1));
        assert!(l.classify().unwrap().level <= 2);
        // (0,1)(0,0)^ω lies in C, (0,0)(0,0)(1,0)… lies in the other part.
        assert!(c.member(&g.monitor, &lasso(&[(0, 1)], &[(0, 0)])).unwrap());
        assert!(l.member(&g.monitor, &lasso(&[(0, 0), (0, 0), (1, 0)], &[(0, 0)])).unwrap());
        assert!(matches!(ConditionExpr::open([0]).decompose_k(), Err(Error::WrongClass(_))));
    }

    #[test]
    fn difference_forms_of_basic_sets() {
        let g = catalog::example10();
        let m = &g.monitor;
        let win = m.state_index("win").unwrap();
        let d = to_difference_form(&ConditionExpr::open([win]), m).unwrap();
        assert_eq!(d.theta, 1);
        assert_eq!(d.opens[0], m.set_of([win]));
        let lose = m.state_index("lose").unwrap();
        let d = to_difference_form(&ConditionExpr::closed([lose]), m).unwrap();
        assert_eq!(d.theta, 2);
        assert!(d.opens[1].iter().all(|&x| x));
        assert!(d.is_well_formed(m));
    }

    #[test]
    fn alternating_cycle_is_flagged() {
        let al = Alphabet::numeric(1, 1).unwrap();
        let m = ConditionMonitor::from_fn(&al, vec!["x".into(), "y".into()], 0, |q, _| 1 - q).unwrap();
        let lbl = Labelling { label: vec![false, true] };
        let w = is_eventually_constant(&lbl, &m).unwrap_err();
        assert_eq!(w.cycle.len(), 2);
        assert!(is_eventually_constant(&Labelling { label: vec![true, true] }, &m).is_ok());
    }

    #[test]
    fn buchi_presentation_errors() {
        let g = catalog::example10();
        let n = g.monitor.num_states();
        let bad = Pi02Presentation::Opens(vec![vec![true; n], vec![false; n], vec![true; n]]);
        assert!(matches!(to_buchi_coloring(&g.monitor, &bad), Err(Error::InvalidPresentation(_))));
        let full = to_buchi_coloring(&g.monitor, &Pi02Presentation::Opens(vec![vec![true; n]])).unwrap();
        assert!(full.color.iter().all(|&c| c));
    }

    #[test]
    fn validation_rejects_overlapping_guards_and_non_traps() {
        let g = catalog::example10();
        let m = &g.monitor;
        let win = m.state_index("win").unwrap();
        let s1 = m.state_index("s1").unwrap();
        assert!(matches!(ConditionExpr::open([s1]).validate(m), Err(Error::InvalidExpr(_))));
        let e = ConditionExpr::open_union([
            (BTreeSet::from([win]), ConditionExpr::open([win])),
            (BTreeSet::from([win]), ConditionExpr::open([])),
        ]);
        assert!(matches!(e.validate(m), Err(Error::InvalidExpr(_))));
    }
}

//! Alphabets, histories, ultimately periodic plays and finite-memory decision
//! machines, together with the play-generation semantics used everywhere else.

use crate::error::{Error, Result};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

/// A round of the game: Player 1's action `a` and Player 2's action `b`,
/// both given as indices into the alphabet's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Self {
        Pair { a, b }
    }
}

/// A finite sequence of rounds. The empty vector is the empty history ε.
pub type History = Vec<Pair>;

/// Interned action names for both players.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    actions_a: Vec<String>,
    actions_b: Vec<String>,
}

fn check_names(names: &[String], who: &str) -> Result<()> {
    if names.is_empty() {
        return Err(Error::InvalidAlphabet(format!("{who} has no actions")));
    }
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.contains(',') || n.contains(':') || n.chars().any(char::is_whitespace) {
            return Err(Error::InvalidAlphabet(format!(
                "{who} action {n:?} must be non-empty without commas, colons or whitespace"
            )));
        }
        if names[..i].contains(n) {
            return Err(Error::InvalidAlphabet(format!("{who} action {n:?} declared twice")));
        }
    }
    Ok(())
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        actions_a: impl IntoIterator<Item = S>,
        actions_b: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let actions_a: Vec<String> = actions_a.into_iter().map(Into::into).collect();
        let actions_b: Vec<String> = actions_b.into_iter().map(Into::into).collect();
        check_names(&actions_a, "Player 1")?;
        check_names(&actions_b, "Player 2")?;
        Ok(Alphabet { actions_a, actions_b })
    }

    /// Alphabet whose actions are named `0..na` and `0..nb`.
    pub fn numeric(na: usize, nb: usize) -> Result<Self> {
        Alphabet::new((0..na).map(|i| i.to_string()), (0..nb).map(|i| i.to_string()))
    }

    pub fn num_a(&self) -> usize {
        self.actions_a.len()
    }
    pub fn num_b(&self) -> usize {
        self.actions_b.len()
    }
    pub fn num_pairs(&self) -> usize {
        self.actions_a.len() * self.actions_b.len()
    }
    pub fn actions_a(&self) -> &[String] {
        &self.actions_a
    }
    pub fn actions_b(&self) -> &[String] {
        &self.actions_b
    }
    pub fn a_name(&self, a: usize) -> &str {
        &self.actions_a[a]
    }
    pub fn b_name(&self, b: usize) -> &str {
        &self.actions_b[b]
    }
    pub fn a_index(&self, name: &str) -> Option<usize> {
        self.actions_a.iter().position(|n| n == name)
    }
    pub fn b_index(&self, name: &str) -> Option<usize> {
        self.actions_b.iter().position(|n| n == name)
    }

    /// Dense index of a pair, `a * |B| + b`.
    pub fn pair_index(&self, p: Pair) -> usize {
        p.a * self.num_b() + p.b
    }
    pub fn pair_at(&self, index: usize) -> Pair {
        Pair::new(index / self.num_b(), index % self.num_b())
    }
    /// All pairs in canonical order (Player 1 action major).
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.num_pairs()).map(move |i| self.pair_at(i))
    }
    pub fn contains(&self, p: Pair) -> bool {
        p.a < self.num_a() && p.b < self.num_b()
    }
    pub fn check_pair(&self, p: Pair) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::InvalidAction(format!("pair ({}, {}) outside the alphabet", p.a, p.b)))
        }
    }
    /// The `"a,b"` key used by the file formats.
    pub fn pair_label(&self, p: Pair) -> String {
        format!("{},{}", self.a_name(p.a), self.b_name(p.b))
    }
    pub fn parse_pair(&self, label: &str) -> Result<Pair> {
        let (a, b) = label
            .split_once(',')
            .ok_or_else(|| Error::InvalidAction(format!("pair key {label:?} is not of the form \"a,b\"")))?;
        let a = self
            .a_index(a.trim())
            .ok_or_else(|| Error::InvalidAction(format!("unknown Player 1 action {a:?}")))?;
        let b = self
            .b_index(b.trim())
            .ok_or_else(|| Error::InvalidAction(format!("unknown Player 2 action {b:?}")))?;
        Ok(Pair::new(a, b))
    }
    /// Human readable rendering such as `(0,0)(0,1)`, or `ε` for the empty history.
    pub fn history_label(&self, h: &[Pair]) -> String {
        if h.is_empty() {
            return "ε".to_string();
        }
        h.iter().map(|p| format!("({})", self.pair_label(*p))).collect()
    }
}

/// The infinite word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

/// A play of the game given as a lasso of rounds.
pub type UltimatelyPeriodicPlay = Lasso<Pair>;
/// A Player 2 word given as a lasso of actions.
pub type BetaWord = Lasso<usize>;

impl<T: Clone + PartialEq> Lasso<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidParams("lasso cycle must be non-empty".into()));
        }
        Ok(Lasso { prefix, cycle })
    }

    /// `x^ω`.
    pub fn constant(x: T) -> Self {
        Lasso { prefix: Vec::new(), cycle: vec![x] }
    }

    pub fn at(&self, i: usize) -> &T {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.at(i).clone()).collect()
    }

    /// Letter position modulo the period: positions with equal phase carry
    /// equal suffixes.
    pub fn phase(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            i
        } else {
            self.prefix.len() + (i - self.prefix.len()) % self.cycle.len()
        }
    }

    pub fn period_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Lasso<U> {
        Lasso { prefix: self.prefix.iter().map(&f).collect(), cycle: self.cycle.iter().map(&f).collect() }
    }

    /// Canonical representation of the same infinite word: primitive cycle and
    /// shortest prefix.
    pub fn normalized(&self) -> Self {
        let n = self.cycle.len();
        let mut cycle = self.cycle.clone();
        for p in 1..=n {
            if n.is_multiple_of(p) && (0..n).all(|i| self.cycle[i] == self.cycle[i % p]) {
                cycle.truncate(p);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while let Some(last) = prefix.last() {
            if *last == cycle[cycle.len() - 1] {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { prefix, cycle }
    }

    /// Whether both lassos denote the same infinite word.
    pub fn same_word(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }
}

/// A finite-memory decision machine `(M, σ, μ, m₀)` for Player 1.
///
/// Construction always totalizes the update table (missing entries become
/// self-loops) and prunes the memory to the states reachable from `m₀`,
/// renumbered in breadth-first order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMemoryMachine {
    alphabet: Alphabet,
    names: Vec<String>,
    decide: Vec<usize>,
    update: Vec<Vec<usize>>,
    initial: usize,
}

impl FiniteMemoryMachine {
    /// Builds a machine from explicit tables (`update[m][pair_index]`).
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        decide: Vec<usize>,
        update: Vec<Vec<Option<usize>>>,
        initial: usize,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || decide.len() != n || update.len() != n || initial >= n {
            return Err(Error::InvalidParams("machine tables have inconsistent sizes".into()));
        }
        if let Some(&a) = decide.iter().find(|&&a| a >= alphabet.num_a()) {
            return Err(Error::InvalidAction(format!("decision {a} outside Player 1 alphabet")));
        }
        let mut full = Vec::with_capacity(n);
        for (m, row) in update.iter().enumerate() {
            if row.len() != alphabet.num_pairs() {
                return Err(Error::InvalidParams(format!("update row {m} has wrong width")));
            }
            let mut r = Vec::with_capacity(row.len());
            for t in row {
                let t = t.unwrap_or(m);
                if t >= n {
                    return Err(Error::InvalidParams(format!("update target {t} out of range")));
                }
                r.push(t);
            }
            full.push(r);
        }
        Ok(Self::pruned(alphabet, names, decide, full, initial))
    }

    fn pruned(alphabet: Alphabet, names: Vec<String>, decide: Vec<usize>, update: Vec<Vec<usize>>, initial: usize) -> Self {
        let (order, kept) = reachable_order(&update, initial);
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut new_names = Vec::with_capacity(kept.len());
        for &m in &kept {
            let base = names[m].clone();
            let count = seen.entry(base.clone()).or_insert(0);
            *count += 1;
            new_names.push(if *count == 1 { base } else { format!("{base}#{count}") });
        }
        FiniteMemoryMachine {
            decide: kept.iter().map(|&m| decide[m]).collect(),
            update: kept.iter().map(|&m| update[m].iter().map(|&t| order[t]).collect()).collect(),
            names: new_names,
            alphabet,
            initial: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn num_states(&self) -> usize {
        self.names.len()
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn name(&self, m: usize) -> &str {
        &self.names[m]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    /// σ(m).
    pub fn decide(&self, m: usize) -> usize {
        self.decide[m]
    }
    /// μ(m, (a,b)).
    pub fn update(&self, m: usize, p: Pair) -> usize {
        self.update[m][self.alphabet.pair_index(p)]
    }

    /// μ(m₀, h), extended inductively over the history.
    pub fn machine_run(&self, h: &[Pair]) -> Result<usize> {
        self.run_from(self.initial, h)
    }

    pub fn run_from(&self, start: usize, h: &[Pair]) -> Result<usize> {
        let mut m = start;
        for &p in h {
            self.alphabet.check_pair(p)?;
            m = self.update(m, p);
        }
        Ok(m)
    }

    /// The first `horizon` rounds of out(h, s, β).
    pub fn outcome(&self, h: &[Pair], beta: &BetaWord, horizon: usize) -> Result<History> {
        if horizon < h.len() {
            return Err(Error::InvalidHorizon { horizon, history: h.len() });
        }
        self.check_beta(beta)?;
        let mut m = self.machine_run(h)?;
        let mut out = h.to_vec();
        for k in h.len()..horizon {
            let p = Pair::new(self.decide(m), *beta.at(k - h.len()));
            m = self.update(m, p);
            out.push(p);
        }
        Ok(out)
    }

    fn check_beta(&self, beta: &BetaWord) -> Result<()> {
        if beta.cycle.is_empty() {
            return Err(Error::InvalidParams("β cycle must be non-empty".into()));
        }
        match beta.prefix.iter().chain(&beta.cycle).find(|&&b| b >= self.alphabet.num_b()) {
            Some(b) => Err(Error::InvalidAction(format!("Player 2 action {b} outside the alphabet"))),
            None => Ok(()),
        }
    }

    /// out(ε, s, β) closed into a lasso; the joint state (memory, β phase) is
    /// finite so the run becomes periodic.
    pub fn machine_play(&self, beta: &BetaWord) -> UltimatelyPeriodicPlay {
        self.machine_play_from(self.initial, beta)
    }

    pub fn machine_play_from(&self, start: usize, beta: &BetaWord) -> UltimatelyPeriodicPlay {
        assert!(self.check_beta(beta).is_ok(), "β outside the alphabet");
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = Vec::new();
        let mut m = start;
        let mut t = 0;
        loop {
            let key = (m, beta.phase(t));
            if t >= beta.prefix.len() {
                if let Some(&first) = seen.get(&key) {
                    let cycle = pairs.split_off(first);
                    return Lasso { prefix: pairs, cycle }.normalized();
                }
                seen.insert(key, t);
            }
            let p = Pair::new(self.decide(m), *beta.at(t));
            m = self.update(m, p);
            pairs.push(p);
            t += 1;
        }
    }

    /// DOT digraph: one node per memory state labelled `state-id / σ-action`,
    /// one edge per pair labelled `a,b`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph machine {\n  rankdir=LR;\n  start [shape=point];\n");
        for (m, name) in self.names.iter().enumerate() {
            s.push_str(&format!(
                "  m{m} [label=\"{} / {}\"];\n",
                dot_escape(name),
                dot_escape(self.alphabet.a_name(self.decide[m]))
            ));
        }
        s.push_str(&format!("  start -> m{};\n", self.initial));
        for m in 0..self.num_states() {
            for p in self.alphabet.pairs() {
                s.push_str(&format!(
                    "  m{m} -> m{} [label=\"{}\"];\n",
                    self.update(m, p),
                    dot_escape(&self.alphabet.pair_label(p))
                ));
            }
        }
        s.push_str("}\n");
        s
    }

    /// Canonical JSON form with explicit `decide` and `update` tables.
    pub fn to_json(&self) -> Value {
        let mut decide = Map::new();
        let mut update = Map::new();
        for (m, name) in self.names.iter().enumerate() {
            decide.insert(name.clone(), json!(self.alphabet.a_name(self.decide[m])));
            let mut row = Map::new();
            for p in self.alphabet.pairs() {
                row.insert(self.alphabet.pair_label(p), json!(self.names[self.update(m, p)]));
            }
            update.insert(name.clone(), Value::Object(row));
        }
        json!({
            "states": self.names,
            "initial": self.names[self.initial],
            "decide": decide,
            "update": update,
        })
    }

    /// Reads the JSON form. Missing update entries become self-loops.
    pub fn from_json(alphabet: &Alphabet, v: &Value) -> Result<Self> {
        let schema = |path: &str, message: &str| Error::Schema { path: path.into(), message: message.into() };
        let states: Vec<String> = v
            .get("states")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("states", "expected an array of state names"))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| schema("states", "state names must be strings")))
            .collect::<Result<_>>()?;
        let index: BTreeMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != states.len() {
            return Err(schema("states", "duplicate state name"));
        }
        let lookup = |path: &str, name: Option<&str>| -> Result<usize> {
            let name = name.ok_or_else(|| schema(path, "expected a state name"))?;
            index.get(name).copied().ok_or_else(|| schema(path, &format!("unknown state {name:?}")))
        };
        let initial = lookup("initial", v.get("initial").and_then(Value::as_str))?;
        let decide_obj = v.get("decide").and_then(Value::as_object).ok_or_else(|| schema("decide", "expected an object"))?;
        let mut decide = Vec::with_capacity(states.len());
        for s in &states {
            let path = format!("decide.{s}");
            let a = decide_obj.get(s).and_then(Value::as_str).ok_or_else(|| schema(&path, "missing decision"))?;
            decide.push(alphabet.a_index(a).ok_or_else(|| schema(&path, &format!("unknown Player 1 action {a:?}")))?);
        }
        let update_obj = v.get("update").and_then(Value::as_object).ok_or_else(|| schema("update", "expected an object"))?;
        let mut update = vec![vec![None; alphabet.num_pairs()]; states.len()];
        for (s, row) in update_obj {
            let m = lookup("update", Some(s))?;
            let row = row.as_object().ok_or_else(|| schema(&format!("update.{s}"), "expected an object"))?;
            for (key, target) in row {
                let path = format!("update.{s}.{key}");
                let p = alphabet.parse_pair(key).map_err(|e| schema(&path, &e.to_string()))?;
                update[m][alphabet.pair_index(p)] = Some(lookup(&path, target.as_str())?);
            }
        }
        FiniteMemoryMachine::new(alphabet.clone(), states, decide, update, initial)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl fmt::Display for FiniteMemoryMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in 0..self.num_states() {
            let marker = if m == self.initial { "→" } else { " " };
            write!(f, "{marker} {} plays {}:", self.names[m], self.alphabet.a_name(self.decide[m]))?;
            let a = self.decide[m];
            for b in 0..self.alphabet.num_b() {
                let p = Pair::new(a, b);
                write!(f, " [{}]→{}", self.alphabet.pair_label(p), self.names[self.update(m, p)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Breadth-first numbering of the states reachable from `initial`; unreachable
/// states get `usize::MAX`.
fn reachable_order(update: &[Vec<usize>], initial: usize) -> (Vec<usize>, Vec<usize>) {
    let mut order = vec![usize::MAX; update.len()];
    let mut queue = VecDeque::from([initial]);
    let mut kept = vec![initial];
    order[initial] = 0;
    while let Some(m) = queue.pop_front() {
        for &t in &update[m] {
            if order[t] == usize::MAX {
                order[t] = kept.len();
                kept.push(t);
                queue.push_back(t);
            }
        }
    }
    (order, kept)
}

/// Incremental construction of machines, used by every synthesis procedure.
#[derive(Clone, Debug)]
pub struct MachineBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    decide: Vec<usize>,
    update: Vec<Vec<Option<usize>>>,
}

impl MachineBuilder {
    pub fn new(alphabet: &Alphabet) -> Self {
        MachineBuilder { alphabet: alphabet.clone(), names: Vec::new(), decide: Vec::new(), update: Vec::new() }
    }
    pub fn len(&self) -> usize {
        self.names.len()
    }
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
    pub fn add_state(&mut self, name: impl Into<String>, action: usize) -> usize {
        self.names.push(name.into());
        self.decide.push(action);
        self.update.push(vec![None; self.alphabet.num_pairs()]);
        self.names.len() - 1
    }
    pub fn set_decision(&mut self, m: usize, action: usize) {
        self.decide[m] = action;
    }
    pub fn set(&mut self, from: usize, p: Pair, to: usize) {
        let i = self.alphabet.pair_index(p);
        self.update[from][i] = Some(to);
    }
    /// Copies every state of `machine`, prefixing names; returns the offset of
    /// its first state (so its initial state sits at `offset + machine.initial()`).
    pub fn embed(&mut self, machine: &FiniteMemoryMachine, prefix: &str) -> usize {
        let offset = self.names.len();
        for m in 0..machine.num_states() {
            self.add_state(format!("{prefix}{}", machine.name(m)), machine.decide(m));
        }
        for m in 0..machine.num_states() {
            for p in self.alphabet.clone().pairs() {
                self.set(offset + m, p, offset + machine.update(m, p));
            }
        }
        offset
    }
    pub fn build(self, initial: usize) -> Result<FiniteMemoryMachine> {
        FiniteMemoryMachine::new(self.alphabet, self.names, self.decide, self.update, initial)
    }

    /// Like [`MachineBuilder::build`], also returning where each builder state
    /// ended up in the pruned machine (`None` when unreachable).
    pub fn build_mapped(self, initial: usize) -> Result<(FiniteMemoryMachine, Vec<Option<usize>>)> {
        let full: Vec<Vec<usize>> = self
            .update
            .iter()
            .enumerate()
            .map(|(m, row)| row.iter().map(|t| t.unwrap_or(m)).collect())
            .collect();
        let n = full.len();
        let mapping = if initial < n && full.iter().flatten().all(|&t| t < n) {
            let (order, _) = reachable_order(&full, initial);
            order.into_iter().map(|o| (o != usize::MAX).then_some(o)).collect()
        } else {
            Vec::new()
        };
        let machine = self.build(initial)?;
        Ok((machine, mapping))
    }
}

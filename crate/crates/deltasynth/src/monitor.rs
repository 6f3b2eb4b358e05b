//! Deterministic condition monitors over `A × B`, optionally carrying
//! multi-energy weights, plus the state-level game operators used by the
//! region solvers.

use crate::error::{Error, Result};
use crate::game::{Alphabet, Pair};
use crate::graph::{self, Adjacency};
use std::collections::BTreeSet;

/// Finite deterministic transducer whose state, together with the
/// accumulated energy vector, determines the induced winning set of a history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionMonitor {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    step: Vec<Vec<usize>>,
    energy_dim: usize,
    weights: Vec<Vec<Vec<i64>>>,
    initial_credit: Vec<i64>,
}

/// Energy annotations: `weights[q][pair_index]` has length `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergySpec {
    pub weights: Vec<Vec<Vec<i64>>>,
    pub initial_credit: Vec<i64>,
}

impl ConditionMonitor {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: usize,
        step: Vec<Vec<usize>>,
        energy: Option<EnergySpec>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidMonitor("monitor has no states".into()));
        }
        if initial >= n {
            return Err(Error::InvalidMonitor("initial state out of range".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidMonitor(format!("state {name:?} declared twice")));
            }
        }
        if step.len() != n {
            return Err(Error::InvalidMonitor("step table does not cover every state".into()));
        }
        for (q, row) in step.iter().enumerate() {
            if row.len() != alphabet.num_pairs() {
                return Err(Error::InvalidMonitor(format!("step row of {:?} is not total", names[q])));
            }
            if row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidMonitor(format!("step row of {:?} leaves the monitor", names[q])));
            }
        }
        let (energy_dim, weights, initial_credit) = match energy {
            None => (0, Vec::new(), Vec::new()),
            Some(e) => {
                let d = e.initial_credit.len();
                if d == 0 {
                    return Err(Error::InvalidMonitor("energy dimension must be positive".into()));
                }
                if e.initial_credit.iter().any(|&c| c < 0) {
                    return Err(Error::InvalidMonitor("initial credit must be non-negative".into()));
                }
                if e.weights.len() != n
                    || e.weights.iter().any(|row| row.len() != alphabet.num_pairs() || row.iter().any(|w| w.len() != d))
                {
                    return Err(Error::InvalidMonitor("weight table must give a length-d vector per transition".into()));
                }
                (d, e.weights, e.initial_credit)
            }
        };
        Ok(ConditionMonitor { alphabet, names, initial, step, energy_dim, weights, initial_credit })
    }

    /// Builds an energy-free monitor from a transition function.
    pub fn from_fn(
        alphabet: &Alphabet,
        names: Vec<String>,
        initial: usize,
        step: impl Fn(usize, Pair) -> usize,
    ) -> Result<Self> {
        let table = (0..names.len()).map(|q| alphabet.pairs().map(|p| step(q, p)).collect()).collect();
        ConditionMonitor::new(alphabet.clone(), names, initial, table, None)
    }

    /// Same transition structure with energy annotations attached.
    pub fn with_energy(&self, energy: EnergySpec) -> Result<Self> {
        ConditionMonitor::new(self.alphabet.clone(), self.names.clone(), self.initial, self.step.clone(), Some(energy))
    }

    /// Same transition structure without energy annotations.
    pub fn without_energy(&self) -> Self {
        ConditionMonitor { energy_dim: 0, weights: Vec::new(), initial_credit: Vec::new(), ..self.clone() }
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
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
    pub fn energy_dim(&self) -> usize {
        self.energy_dim
    }
    pub fn initial_credit(&self) -> &[i64] {
        &self.initial_credit
    }
    pub fn step(&self, q: usize, p: Pair) -> usize {
        self.step[q][self.alphabet.pair_index(p)]
    }
    pub fn step_index(&self, q: usize, pair_index: usize) -> usize {
        self.step[q][pair_index]
    }
    pub fn step_row(&self, q: usize) -> &[usize] {
        &self.step[q]
    }
    /// Weight vector of the transition; empty when `d = 0`.
    pub fn weight(&self, q: usize, p: Pair) -> &[i64] {
        if self.energy_dim == 0 {
            &[]
        } else {
            &self.weights[q][self.alphabet.pair_index(p)]
        }
    }
    pub fn weight_index(&self, q: usize, pair_index: usize) -> &[i64] {
        if self.energy_dim == 0 {
            &[]
        } else {
            &self.weights[q][pair_index]
        }
    }

    /// State reached after reading `h` from `from`.
    pub fn run_from(&self, from: usize, h: &[Pair]) -> Result<usize> {
        let mut q = from;
        for &p in h {
            self.alphabet.check_pair(p)?;
            q = self.step(q, p);
        }
        Ok(q)
    }
    pub fn run(&self, h: &[Pair]) -> Result<usize> {
        self.run_from(self.initial, h)
    }

    pub fn adjacency(&self) -> Adjacency {
        self.step
            .iter()
            .map(|row| {
                let s: BTreeSet<usize> = row.iter().copied().collect();
                s.into_iter().collect()
            })
            .collect()
    }

    pub fn reachable_from(&self, q: usize) -> Vec<bool> {
        graph::reachable(&self.adjacency(), [q])
    }
    pub fn reachable_states(&self) -> Vec<bool> {
        self.reachable_from(self.initial)
    }

    /// Smallest forward-closed superset of `set`.
    pub fn trap_closure(&self, set: &[bool]) -> Vec<bool> {
        graph::reachable(&self.adjacency(), (0..set.len()).filter(|&q| set[q]))
    }
    pub fn is_trap(&self, set: &[bool]) -> bool {
        (0..self.num_states()).all(|q| !set[q] || self.step[q].iter().all(|&t| set[t]))
    }

    pub fn set_of(&self, states: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut s = vec![false; self.num_states()];
        for q in states {
            s[q] = true;
        }
        s
    }

    /// Smallest Player-1 action `a` such that every reply leads into `target`.
    pub fn controllable_action(&self, q: usize, target: &[bool]) -> Option<usize> {
        (0..self.alphabet.num_a()).find(|&a| (0..self.alphabet.num_b()).all(|b| target[self.step(q, Pair::new(a, b))]))
    }

    /// One-step controllable predecessor `∃a ∀b`.
    pub fn cpre(&self, target: &[bool]) -> Vec<bool> {
        (0..self.num_states()).map(|q| self.controllable_action(q, target).is_some()).collect()
    }

    /// Player-1 attractor to `target`; returns the attractor and the layer of
    /// each state (`usize::MAX` outside).
    pub fn attractor(&self, target: &[bool]) -> (Vec<bool>, Vec<usize>) {
        let n = self.num_states();
        let mut rank: Vec<usize> = (0..n).map(|q| if target[q] { 0 } else { usize::MAX }).collect();
        let mut layer = 0;
        loop {
            let cur: Vec<bool> = rank.iter().map(|&r| r != usize::MAX).collect();
            let pre = self.cpre(&cur);
            let fresh: Vec<usize> = (0..n).filter(|&q| pre[q] && !cur[q]).collect();
            if fresh.is_empty() {
                return (cur, rank);
            }
            layer += 1;
            for q in fresh {
                rank[q] = layer;
            }
        }
    }

    /// Player-1 safety region inside `safe`.
    pub fn safety_region(&self, safe: &[bool]) -> Vec<bool> {
        let mut x = safe.to_vec();
        loop {
            let pre = self.cpre(&x);
            let next: Vec<bool> = (0..x.len()).map(|q| x[q] && pre[q]).collect();
            if next == x {
                return x;
            }
            x = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> ConditionMonitor {
        let al = Alphabet::numeric(2, 2).unwrap();
        // q0 --(1,·)--> q1 --(·,·)--> q2 (sink); q0 --(0,·)--> q0
        ConditionMonitor::from_fn(&al, vec!["q0".into(), "q1".into(), "q2".into()], 0, |q, p| match q {
            0 if p.a == 1 => 1,
            0 => 0,
            _ => 2,
        })
        .unwrap()
    }

    #[test]
    fn attractor_layers() {
        let m = chain();
        let (attr, rank) = m.attractor(&m.set_of([2]));
        assert_eq!(attr, vec![true, true, true]);
        assert_eq!(rank, vec![2, 1, 0]);
        assert_eq!(m.controllable_action(0, &m.set_of([1, 2])), Some(1));
    }

    #[test]
    fn traps_and_safety() {
        let m = chain();
        assert!(m.is_trap(&m.set_of([2])));
        assert!(!m.is_trap(&m.set_of([1])));
        assert_eq!(m.trap_closure(&m.set_of([1])), vec![false, true, true]);
        assert_eq!(m.safety_region(&m.set_of([0, 1])), vec![true, false, false]);
    }

    #[test]
    fn rejects_partial_tables() {
        let al = Alphabet::numeric(1, 1).unwrap();
        let bad = ConditionMonitor::new(al, vec!["x".into()], 0, vec![vec![]], None);
        assert!(matches!(bad, Err(Error::InvalidMonitor(_))));
    }
}

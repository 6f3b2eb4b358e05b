//! Seeded random games for property tests, acceptance suites and the corpus.
//!
//! Monitors are biased towards "forward" transitions so that they contain
//! both cycles and nested traps, which is where the hierarchy gets
//! interesting.

use crate::condition::{ConditionExpr, Game, HierarchyClass, Kind};
use crate::game::Alphabet;
use crate::monitor::{ConditionMonitor, EnergySpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random monitor with `n` states over `na × nb`.
pub fn random_monitor<R: Rng>(rng: &mut R, n: usize, na: usize, nb: usize) -> ConditionMonitor {
    let al = Alphabet::numeric(na, nb).expect("non-empty alphabet");
    let names = (0..n).map(|q| format!("q{q}")).collect();
    let table: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            al.pairs()
                .map(|_| if rng.gen_bool(0.35) { rng.gen_range(0..n) } else { rng.gen_range(q..n) })
                .collect()
        })
        .collect();
    ConditionMonitor::new(al, names, 0, table, None).expect("total table")
}

/// Forward closure of a random non-empty subset avoiding `forbidden`, if any
/// state's closure avoids it.
pub fn random_trap<R: Rng>(rng: &mut R, m: &ConditionMonitor, forbidden: &[bool]) -> Option<BTreeSet<usize>> {
    let n = m.num_states();
    let candidates: Vec<usize> =
        (0..n).filter(|&q| m.reachable_from(q).iter().zip(forbidden).all(|(&r, &f)| !(r && f))).collect();
    if candidates.is_empty() {
        return None;
    }
    let mut seeds: Vec<usize> = candidates.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
    if seeds.is_empty() {
        seeds.push(*candidates.choose(rng).expect("non-empty"));
    }
    let closure = m.trap_closure(&m.set_of(seeds));
    Some((0..n).filter(|&q| closure[q]).collect())
}

/// Random expression of the given kind at level at most `level`.
pub fn random_expr<R: Rng>(rng: &mut R, m: &ConditionMonitor, kind: Kind, level: usize) -> ConditionExpr {
    let n = m.num_states();
    let none = vec![false; n];
    let open = |rng: &mut R| ConditionExpr::Open(random_trap(rng, m, &none).unwrap_or_default());
    match (kind, level) {
        (Kind::Lambda, 0 | 1) => open(rng),
        (Kind::K, 0 | 1) => open(rng).negate(),
        (Kind::K, 2) if rng.gen_bool(0.3) => ConditionExpr::union(open(rng).negate(), open(rng)),
        (Kind::K, l) => random_expr(rng, m, Kind::Lambda, l).negate(),
        (Kind::Lambda, l) => {
            let mut used = vec![false; n];
            let mut branches = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let Some(guard) = random_trap(rng, m, &used) else { break };
                for &q in &guard {
                    used[q] = true;
                }
                let child_kind = if rng.gen_bool(0.5) { Kind::Lambda } else { Kind::K };
                let child_level = if child_kind == Kind::K { l - 1 } else { rng.gen_range(1..l) };
                branches.push((guard, random_expr(rng, m, child_kind, child_level)));
            }
            ConditionExpr::open_union(branches)
        }
    }
}

/// Target classes for random games.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassTarget {
    Open,
    Closed,
    K2,
    LambdaUpTo3,
    KUpTo3,
}

impl ClassTarget {
    pub const ALL: [ClassTarget; 5] =
        [ClassTarget::Open, ClassTarget::Closed, ClassTarget::K2, ClassTarget::LambdaUpTo3, ClassTarget::KUpTo3];

    pub fn name(self) -> &'static str {
        match self {
            ClassTarget::Open => "open",
            ClassTarget::Closed => "closed",
            ClassTarget::K2 => "k2",
            ClassTarget::LambdaUpTo3 => "lambda3",
            ClassTarget::KUpTo3 => "k3",
        }
    }

    pub fn accepts(self, c: HierarchyClass) -> bool {
        match self {
            ClassTarget::Open => c == HierarchyClass::lambda(1),
            ClassTarget::Closed => c == HierarchyClass::k(1),
            ClassTarget::K2 => c == HierarchyClass::k(2),
            ClassTarget::LambdaUpTo3 => c.kind == Kind::Lambda && c.level <= 3,
            ClassTarget::KUpTo3 => c.kind == Kind::K && c.level <= 3,
        }
    }

    fn draw(self) -> (Kind, usize) {
        match self {
            ClassTarget::Open => (Kind::Lambda, 1),
            ClassTarget::Closed => (Kind::K, 1),
            ClassTarget::K2 => (Kind::K, 2),
            ClassTarget::LambdaUpTo3 => (Kind::Lambda, 3),
            ClassTarget::KUpTo3 => (Kind::K, 3),
        }
    }
}

impl std::str::FromStr for ClassTarget {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        ClassTarget::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| crate::Error::InvalidParams(format!("unknown class target {s:?}")))
    }
}

/// Random energy-free game of the target class with at most `max_states`
/// states. Games whose reachable states all carry the same value are
/// redrawn, since every strategy decides them the same way.
pub fn random_game(seed: u64, target: ClassTarget, max_states: usize) -> Game {
    let mut rng = rng(seed);
    loop {
        let n = rng.gen_range(2..=max_states.max(2));
        let m = random_monitor(&mut rng, n, 2, 2);
        let (kind, level) = target.draw();
        let expr = random_expr(&mut rng, &m, kind, level);
        if let Ok(c) = expr.classify() {
            let reach = m.reachable_from(m.initial());
            let values: BTreeSet<bool> = (0..n).filter(|&q| reach[q]).map(|q| expr.eval_at(q)).collect();
            if target.accepts(c) && values.len() == 2 {
                if let Ok(g) = Game::new(format!("random-{}-{seed}", target.name()), m, expr) {
                    return g;
                }
            }
        }
    }
}

/// Random multi-energy game: at most four states, at most two counters,
/// weights in `[-2, 2]`, initial credits in `[0, 3]`. The condition is energy
/// safety, or (one time in four) energy safety united with reaching a trap.
pub fn random_energy_game(seed: u64) -> Game {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=4);
    let na = rng.gen_range(1..=2);
    let nb = rng.gen_range(1..=2);
    let d = rng.gen_range(1..=2);
    let m = random_monitor(&mut rng, n, na, nb);
    let weights = (0..n)
        .map(|_| (0..na * nb).map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect()).collect())
        .collect();
    let initial_credit = (0..d).map(|_| rng.gen_range(0..=3)).collect();
    let m = m.with_energy(EnergySpec { weights, initial_credit }).expect("consistent weights");
    let expr = if rng.gen_bool(0.25) {
        let target = random_trap(&mut rng, &m, &vec![false; n]).unwrap_or_default();
        ConditionExpr::union(ConditionExpr::EnergySafe, ConditionExpr::Open(target))
    } else {
        ConditionExpr::EnergySafe
    };
    Game::new(format!("random-energy-{seed}"), m, expr).expect("valid energy game")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_hit_their_classes() {
        for target in ClassTarget::ALL {
            for seed in 0..20 {
                let g = random_game(seed, target, 5);
                assert!(target.accepts(g.classify().unwrap()), "{target:?} seed {seed}");
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_game(7, ClassTarget::K2, 4).condition, random_game(7, ClassTarget::K2, 4).condition);
        let a = random_energy_game(3);
        let b = random_energy_game(3);
        assert_eq!(a.monitor, b.monitor);
    }

    #[test]
    fn energy_games_are_small() {
        for seed in 0..50 {
            let g = random_energy_game(seed);
            assert!(g.monitor.num_states() <= 4);
            assert!((1..=2).contains(&g.monitor.energy_dim()));
        }
    }
}

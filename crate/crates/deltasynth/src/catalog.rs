//! Hand-built reference games and machines: the naive-synthesis trap game
//! (`example10`), its closed and open parts, the two strategies drawn for it,
//! and a small two-counter energy game.

use crate::condition::{ConditionExpr, Game};
use crate::game::{Alphabet, FiniteMemoryMachine, MachineBuilder, Pair};
use crate::monitor::{ConditionMonitor, EnergySpec};
use std::collections::BTreeSet;

/// State indices of the `example10` monitor.
pub mod ex10 {
    pub const S0: usize = 0;
    pub const S1: usize = 1;
    pub const C: usize = 2;
    pub const W2: usize = 3;
    pub const WIN: usize = 4;
    pub const LOSE: usize = 5;
}

/// Six-state monitor over `A = B = {0,1}`:
/// `s0 -(0,0)-> s1 -(0,0)-> w2 -(0,0)-> w2`, `(0,1)` from `s0`/`s1` enters `c`
/// (which tolerates Player-1 action 0 only), any other move from `w2`
/// reaches `win`, and every Player-1 action 1 before `w2` reaches `lose`.
pub fn example10_monitor() -> ConditionMonitor {
    use ex10::*;
    let al = Alphabet::numeric(2, 2).expect("binary alphabet");
    let names = ["s0", "s1", "c", "w2", "win", "lose"].iter().map(|s| s.to_string()).collect();
    ConditionMonitor::from_fn(&al, names, S0, |q, p| match (q, p.a, p.b) {
        (S0, 0, 0) => S1,
        (S1, 0, 0) => W2,
        (S0 | S1, 0, 1) => C,
        (S0 | S1, 1, _) => LOSE,
        (C, 0, _) => C,
        (C, 1, _) => LOSE,
        (W2, 0, 0) => W2,
        (W2, _, _) => WIN,
        (WIN, _, _) => WIN,
        _ => LOSE,
    })
    .expect("valid monitor")
}

/// `W = (0,0)*(0,1)({0}×B)^ω + (0,0)²(0,0)*({1}×B + A×{1})(A×B)^ω`, written as
/// the complement of the plays that enter `{w2, win, lose}` without reaching `win`.
pub fn example10() -> Game {
    use ex10::*;
    let guard: BTreeSet<usize> = [W2, WIN, LOSE].into();
    let expr = ConditionExpr::open_union([(guard, ConditionExpr::open([WIN]).negate())]).negate();
    Game::new("example10", example10_monitor(), expr)
        .expect("valid game")
        .with_description("closed part: reach c then play 0 forever; open part: two (0,0) then any 1")
}

/// The closed part `C`: never leave `{s0, s1, c}`.
pub fn example10_closed() -> Game {
    use ex10::*;
    Game::new("example10_closed", example10_monitor(), ConditionExpr::closed([W2, WIN, LOSE]))
        .expect("valid game")
        .with_description("closed part of example10")
}

/// The open part `O`: reach `win`.
pub fn example10_open() -> Game {
    Game::new("example10_open", example10_monitor(), ConditionExpr::open([ex10::WIN]))
        .expect("valid game")
        .with_description("open part of example10")
}

/// `W` = every play, over the `example10` monitor.
pub fn w_full() -> Game {
    let m = example10_monitor();
    let all = 0..m.num_states();
    Game::new("w_full", m, ConditionExpr::open(all)).expect("valid game").with_description("the full play space")
}

fn machine(al: &Alphabet, states: &[(&str, usize)], edges: &[(&str, Pair, &str)]) -> FiniteMemoryMachine {
    let mut b = MachineBuilder::new(al);
    for (name, a) in states {
        b.add_state(*name, *a);
    }
    let idx = |n: &str| states.iter().position(|(s, _)| *s == n).expect("declared state");
    for (from, p, to) in edges {
        b.set(idx(from), *p, idx(to));
    }
    b.build(0).expect("valid machine")
}

/// Two memory states `ε` and `(0,1)`, both playing 0; the machine obtained by
/// the naive antichain and tree-pruning constructions.
pub fn fig2_machine() -> FiniteMemoryMachine {
    let al = Alphabet::numeric(2, 2).expect("binary alphabet");
    let p = Pair::new;
    machine(
        &al,
        &[("ε", 0), ("(0,1)", 0)],
        &[("ε", p(0, 0), "ε"), ("ε", p(0, 1), "(0,1)"), ("(0,1)", p(0, 0), "(0,1)"), ("(0,1)", p(0, 1), "(0,1)")],
    )
}

/// The second-level construction's machine: trees rooted at `ε` and `(0,1)`,
/// a hand-off to the "always play 1" machine `m` after `(0,0)(0,0)`.
pub fn fig3_machine() -> FiniteMemoryMachine {
    let al = Alphabet::numeric(2, 2).expect("binary alphabet");
    let p = Pair::new;
    machine(
        &al,
        &[
            ("ε", 0),
            ("(0,0)", 0),
            ("(0,1)", 0),
            ("(0,0)(0,1)", 0),
            ("(0,1)(0,0)", 0),
            ("(0,1)(0,1)", 0),
            ("(0,1)'", 0),
            ("m", 1),
        ],
        &[
            ("ε", p(0, 0), "(0,0)"),
            ("ε", p(0, 1), "(0,1)"),
            ("(0,0)", p(0, 0), "m"),
            ("(0,0)", p(0, 1), "(0,0)(0,1)"),
            ("(0,1)", p(0, 0), "(0,1)(0,0)"),
            ("(0,1)", p(0, 1), "(0,1)(0,1)"),
            ("(0,0)(0,1)", p(0, 0), "(0,1)'"),
            ("(0,0)(0,1)", p(0, 1), "(0,1)'"),
            ("(0,1)(0,0)", p(0, 0), "(0,1)'"),
            ("(0,1)(0,0)", p(0, 1), "(0,1)'"),
            ("(0,1)(0,1)", p(0, 0), "(0,1)'"),
            ("(0,1)(0,1)", p(0, 1), "(0,1)'"),
            ("(0,1)'", p(0, 0), "(0,1)'"),
            ("(0,1)'", p(0, 1), "(0,1)'"),
            ("m", p(1, 0), "m"),
            ("m", p(1, 1), "m"),
        ],
    )
}

/// Two counters traded against each other: from `p`, action 0 costs the first
/// counter and pays the second, action 1 does the opposite; `q` mirrors it,
/// with Player 2 able to withhold the refund on the second counter.
pub fn multienergy_d2() -> Game {
    let al = Alphabet::numeric(2, 2).expect("binary alphabet");
    let names = vec!["p".to_string(), "q".to_string()];
    let m = ConditionMonitor::from_fn(&al, names, 0, |q, _| 1 - q).expect("valid monitor");
    let w = |q: usize, p: Pair| -> Vec<i64> {
        match (q, p.a, p.b) {
            (0, 0, _) => vec![-1, 1],
            (0, 1, _) => vec![1, -1],
            (1, 0, 0) => vec![1, -1],
            (1, 0, 1) => vec![1, 0],
            _ => vec![-1, 1],
        }
    };
    let weights = (0..2).map(|q| al.pairs().map(|p| w(q, p)).collect()).collect();
    let m = m.with_energy(EnergySpec { weights, initial_credit: vec![1, 0] }).expect("valid energy");
    Game::new("multienergy_d2", m, ConditionExpr::EnergySafe)
        .expect("valid game")
        .with_description("two counters, Player 1 must keep both non-negative")
}

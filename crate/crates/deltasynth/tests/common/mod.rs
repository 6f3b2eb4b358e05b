//! Reference oracles for the integration tests. They only use monitors,
//! machines and lasso membership, never the verifier or the solvers.

#![allow(dead_code)]

use deltasynth::game::BetaWord;
use deltasynth::{Alphabet, FiniteMemoryMachine, Game, Lasso, MachineBuilder, Pair, UltimatelyPeriodicPlay};

/// Every lasso over `letters` symbols with `1 ≤ |cycle|` and
/// `|prefix| + |cycle| ≤ max_len`.
pub fn lassos(letters: usize, max_len: usize) -> Vec<Lasso<usize>> {
    let mut out = Vec::new();
    for total in 1..=max_len {
        for cut in 0..total {
            for code in 0..letters.pow(total as u32) {
                let mut c = code;
                let word: Vec<usize> = (0..total)
                    .map(|_| {
                        let x = c % letters;
                        c /= letters;
                        x
                    })
                    .collect();
                out.push(Lasso::new(word[..cut].to_vec(), word[cut..].to_vec()).unwrap());
            }
        }
    }
    out
}

/// Every play lasso over the pairs of `al` of total length at most `max_len`.
pub fn play_lassos(al: &Alphabet, max_len: usize) -> Vec<UltimatelyPeriodicPlay> {
    lassos(al.num_pairs(), max_len).into_iter().map(|l| l.map(|&i| al.pair_at(i))).collect()
}

/// Game-tree evaluation of a machine: explores every Player-2 continuation
/// until the (memory, monitor state) pair repeats on the current branch,
/// and checks the resulting lasso play for membership. Returns a losing
/// Player-2 word, if any.
///
/// Exhaustive for energy-free games and for a single counter: a losing play
/// can always be shortened to a simple path followed by a simple cycle of
/// the product.
pub fn game_tree_counterexample(machine: &FiniteMemoryMachine, game: &Game) -> Option<BetaWord> {
    let nb = game.alphabet().num_b();
    let mut path: Vec<(usize, usize)> = vec![(machine.initial(), game.monitor.initial())];
    let mut word: Vec<usize> = Vec::new();
    fn go(
        machine: &FiniteMemoryMachine,
        game: &Game,
        nb: usize,
        path: &mut Vec<(usize, usize)>,
        word: &mut Vec<usize>,
    ) -> Option<BetaWord> {
        let (m, q) = *path.last().unwrap();
        for b in 0..nb {
            let p = Pair::new(machine.decide(m), b);
            let next = (machine.update(m, p), game.monitor.step(q, p));
            word.push(b);
            if let Some(i) = path.iter().position(|&x| x == next) {
                let beta = Lasso::new(word[..i].to_vec(), word[i..].to_vec()).unwrap();
                if !game.member(&machine.machine_play(&beta)).unwrap() {
                    return Some(beta);
                }
            } else {
                path.push(next);
                if let Some(w) = go(machine, game, nb, path, word) {
                    return Some(w);
                }
                path.pop();
            }
            word.pop();
        }
        None
    }
    go(machine, game, nb, &mut path, &mut word)
}

/// The positional strategy `sigma` over monitor states as a machine.
pub fn positional_machine(game: &Game, sigma: &[usize]) -> FiniteMemoryMachine {
    let m = &game.monitor;
    let al = m.alphabet();
    let mut b = MachineBuilder::new(al);
    for (q, &a) in sigma.iter().enumerate() {
        b.add_state(m.name(q), a);
    }
    for q in 0..m.num_states() {
        for p in al.pairs() {
            b.set(q, p, m.step(q, p));
        }
    }
    b.build(m.initial()).unwrap()
}

/// Whether some positional strategy wins, each candidate checked by the
/// game tree.
pub fn brute_force_winner(game: &Game) -> bool {
    let n = game.monitor.num_states();
    let na = game.alphabet().num_a();
    (0..na.pow(n as u32)).any(|code| {
        let mut c = code;
        let sigma: Vec<usize> = (0..n)
            .map(|_| {
                let a = c % na;
                c /= na;
                a
            })
            .collect();
        game_tree_counterexample(&positional_machine(game, &sigma), game).is_none()
    })
}

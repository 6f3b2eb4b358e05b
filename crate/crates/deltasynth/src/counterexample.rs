//! Games outside the reach of finite-memory strategies, with membership
//! oracles instead of monitors, and bounded falsification of candidate
//! machines against them.
//!
//! * [`CounterexampleKind::DisjunctivePi02`]: one-player game won by plays
//!   containing infinitely many prefixes of a disjunctive sequence `w` as
//!   factors. Every such play is disjunctive, so no lasso wins.
//! * [`CounterexampleKind::IrregularSuffixSigma02`]: one-player game won by
//!   plays sharing a suffix with a sequence `w` that is not ultimately
//!   periodic. No lasso wins.
//! * [`CounterexampleKind::OpponentGame`]: Player 1 plays `0ⁿ1`, after which
//!   Player 2 must answer with more than `n` zeros and then a 1. Player 2
//!   wins by counting, but no finite-memory Player-2 machine does.

use crate::error::{Error, Result};
use crate::game::{Alphabet, FiniteMemoryMachine, Lasso, Pair, UltimatelyPeriodicPlay};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CounterexampleKind {
    DisjunctivePi02,
    IrregularSuffixSigma02,
    OpponentGame,
}

impl std::str::FromStr for CounterexampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjunctive" => Ok(CounterexampleKind::DisjunctivePi02),
            "irregular-suffix" => Ok(CounterexampleKind::IrregularSuffixSigma02),
            "opponent" => Ok(CounterexampleKind::OpponentGame),
            _ => Err(Error::InvalidParams(format!(
                "unknown counterexample kind {s:?} (expected disjunctive, irregular-suffix or opponent)"
            ))),
        }
    }
}

/// Base sequences over letters `0..k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sequence {
    /// All words in length-lexicographic order, concatenated.
    Champernowne,
    /// Parity of the number of ones in the binary expansion of the index.
    ThueMorse,
}

impl Sequence {
    /// The first `n` letters over an alphabet of size `k`.
    pub fn prefix(self, k: usize, n: usize) -> Vec<usize> {
        match self {
            Sequence::ThueMorse => (0..n).map(|i| (i.count_ones() % 2) as usize).collect(),
            Sequence::Champernowne => {
                let mut out = Vec::with_capacity(n);
                let mut len = 1;
                while out.len() < n {
                    let mut word = vec![0usize; len];
                    'words: loop {
                        out.extend_from_slice(&word);
                        if out.len() >= n {
                            break;
                        }
                        for i in (0..len).rev() {
                            word[i] += 1;
                            if word[i] < k {
                                continue 'words;
                            }
                            word[i] = 0;
                        }
                        break;
                    }
                    len += 1;
                }
                out.truncate(n);
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleGame {
    pub kind: CounterexampleKind,
    pub alphabet: Alphabet,
    pub sequence: Sequence,
    /// Largest window length tried by oracles and falsifiers.
    pub search_limit: usize,
}

/// Builds a counterexample game over `num_a` Player-1 actions with the
/// default base sequence of its kind.
pub fn build_counterexample(kind: CounterexampleKind, num_a: usize) -> Result<CounterexampleGame> {
    let (alphabet, sequence) = match kind {
        CounterexampleKind::DisjunctivePi02 | CounterexampleKind::IrregularSuffixSigma02 => {
            if num_a < 2 {
                return Err(Error::InvalidParams("the base alphabet needs at least two letters".into()));
            }
            let seq = if kind == CounterexampleKind::DisjunctivePi02 { Sequence::Champernowne } else { Sequence::ThueMorse };
            (Alphabet::numeric(num_a, 1)?, seq)
        }
        CounterexampleKind::OpponentGame => {
            if num_a != 2 {
                return Err(Error::InvalidParams("the opponent game is played over A = B = {0,1}".into()));
            }
            (Alphabet::numeric(2, 2)?, Sequence::Champernowne)
        }
    };
    Ok(CounterexampleGame { kind, alphabet, sequence, search_limit: 4096 })
}

/// A finite certificate that a machine does not win.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The prefix of `w` of this length is not a factor of the machine's play,
    /// hence neither is any longer prefix.
    MissingPrefix { length: usize },
    /// No factor of this length of the play, from position `from` on, is a
    /// factor of `w`; so the play shares no suffix with `w`.
    DisjointTail { window: usize, from: usize },
    /// Player 1 plays `0^zeros 1 0^ω`; the resulting play is won by Player 1.
    Prelude { zeros: usize, play: UltimatelyPeriodicPlay },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::MissingPrefix { length } => json!({ "missingPrefix": length }),
            Witness::DisjointTail { window, from } => json!({ "disjointTail": { "window": window, "from": from } }),
            Witness::Prelude { zeros, play } => json!({
                "prelude": zeros,
                "play": {
                    "prefix": play.prefix.iter().map(|p| format!("{},{}", p.a, p.b)).collect::<Vec<_>>(),
                    "cycle": play.cycle.iter().map(|p| format!("{},{}", p.a, p.b)).collect::<Vec<_>>(),
                }
            }),
        }
    }
}

/// Whether `u` occurs in `x·y^ω`.
fn is_factor(u: &[usize], x: &[usize], y: &[usize]) -> bool {
    if u.is_empty() {
        return true;
    }
    let mut s = x.to_vec();
    for _ in 0..u.len() / y.len() + 2 {
        s.extend_from_slice(y);
    }
    s.windows(u.len()).any(|w| w == u)
}

fn primitive(y: &[usize]) -> &[usize] {
    let n = y.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| y[i] == y[i % p])).map_or(y, |p| &y[..p])
}

impl CounterexampleGame {
    fn player1_letters(&self, play: &UltimatelyPeriodicPlay) -> Result<Lasso<usize>> {
        for p in play.prefix.iter().chain(&play.cycle) {
            self.alphabet.check_pair(*p)?;
        }
        Ok(play.map(|p| p.a))
    }

    fn missing_prefix(&self, x: &[usize], y: &[usize]) -> Result<usize> {
        let k = self.alphabet.num_a();
        let w = self.sequence.prefix(k, self.search_limit);
        (1..=self.search_limit).find(|&l| !is_factor(&w[..l], x, y)).ok_or(Error::BudgetExceeded {
            budget: self.search_limit,
            context: "every searched prefix of the base sequence occurs in the play".into(),
        })
    }

    /// Smallest window length whose every window in the periodic part is
    /// absent from the base sequence.
    fn disjoint_window(&self, y: &[usize]) -> Result<usize> {
        let y = primitive(y);
        let p = y.len();
        let k = self.alphabet.num_a();
        for l in 1..=2 * p + 1 {
            let horizon = 64 * l + 1024;
            let w = self.sequence.prefix(k, horizon);
            let windows: Vec<Vec<usize>> = (0..p).map(|r| (0..l).map(|i| y[(r + i) % p]).collect()).collect();
            if windows.iter().all(|u| !w.windows(l).any(|f| f == u.as_slice())) {
                return Ok(l);
            }
        }
        Err(Error::Internal("an overlap of the periodic part occurs in the base sequence".into()))
    }

    /// Membership of an ultimately periodic play.
    pub fn member(&self, play: &UltimatelyPeriodicPlay) -> Result<bool> {
        match self.kind {
            CounterexampleKind::DisjunctivePi02 => {
                let l = self.player1_letters(play)?.normalized();
                self.missing_prefix(&l.prefix, &l.cycle).map(|_| false)
            }
            CounterexampleKind::IrregularSuffixSigma02 => {
                let l = self.player1_letters(play)?.normalized();
                self.disjoint_window(&l.cycle).map(|_| false)
            }
            CounterexampleKind::OpponentGame => {
                for p in play.prefix.iter().chain(&play.cycle) {
                    self.alphabet.check_pair(*p)?;
                }
                Ok(opponent_member(play))
            }
        }
    }
}

fn opponent_member(play: &UltimatelyPeriodicPlay) -> bool {
    let span = play.prefix.len() + play.cycle.len();
    let Some(n) = (0..span).find(|&i| play.at(i).a != 0) else {
        // Player 1 never plays 1.
        return false;
    };
    // Player 2's first 1 strictly after the round in which Player 1 played 1.
    let horizon = n + 1 + span + 1;
    match (n + 1..horizon).find(|&i| play.at(i).b == 1) {
        Some(i) => i - (n + 1) <= n,
        None => true,
    }
}

/// Finds a finite certificate that `machine` loses a one-player counterexample game.
pub fn falsify_machine(machine: &FiniteMemoryMachine, game: &CounterexampleGame) -> Result<Witness> {
    if machine.alphabet() != &game.alphabet {
        return Err(Error::InvalidParams("machine alphabet differs from the game's".into()));
    }
    let play = machine.machine_play(&Lasso::constant(0));
    let letters = game.player1_letters(&play)?.normalized();
    match game.kind {
        CounterexampleKind::DisjunctivePi02 => {
            Ok(Witness::MissingPrefix { length: game.missing_prefix(&letters.prefix, &letters.cycle)? })
        }
        CounterexampleKind::IrregularSuffixSigma02 => {
            Ok(Witness::DisjointTail { window: game.disjoint_window(&letters.cycle)?, from: letters.prefix.len() })
        }
        CounterexampleKind::OpponentGame => {
            Err(Error::InvalidParams("the opponent game falsifies Player-2 machines".into()))
        }
    }
}

/// Re-checks a witness against the machine.
pub fn check_witness(machine: &FiniteMemoryMachine, game: &CounterexampleGame, witness: &Witness) -> Result<bool> {
    let play = machine.machine_play(&Lasso::constant(0));
    let l = game.player1_letters(&play)?;
    let k = game.alphabet.num_a();
    match witness {
        Witness::MissingPrefix { length } => {
            let w = game.sequence.prefix(k, *length);
            Ok(!is_factor(&w, &l.prefix, &l.cycle))
        }
        Witness::DisjointTail { window, from } => {
            if *from < l.prefix.len() {
                return Ok(false);
            }
            let tail: Vec<usize> = (0..l.cycle.len()).map(|r| *l.at(from + r)).collect();
            let y = primitive(&tail).to_vec();
            if *window > 2 * y.len() {
                return Ok(true);
            }
            let w = game.sequence.prefix(k, 64 * window + 1024);
            Ok((0..y.len()).all(|r| {
                let u: Vec<usize> = (0..*window).map(|i| y[(r + i) % y.len()]).collect();
                !w.windows(*window).any(|f| f == u.as_slice())
            }))
        }
        Witness::Prelude { .. } => Ok(false),
    }
}

/// Every machine over `alphabet` with exactly `n` states and initial state 0,
/// with all transitions spelled out.
pub fn all_machines(alphabet: &Alphabet, n: usize) -> Vec<FiniteMemoryMachine> {
    let na = alphabet.num_a();
    let np = alphabet.num_pairs();
    let total = n.pow((n * np) as u32) * na.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let decide: Vec<usize> = (0..n)
            .map(|_| {
                let a = c % na;
                c /= na;
                a
            })
            .collect();
        let update: Vec<Vec<Option<usize>>> = (0..n)
            .map(|_| {
                (0..np)
                    .map(|_| {
                        let t = c % n;
                        c /= n;
                        Some(t)
                    })
                    .collect()
            })
            .collect();
        let names = (0..n).map(|i| format!("m{i}")).collect();
        out.push(FiniteMemoryMachine::new(alphabet.clone(), names, decide, update, 0).expect("well-formed tables"));
    }
    out
}

/// A finite-memory strategy for Player 2 over `A = B = {0,1}`. Only the
/// transitions on its own chosen action can fire; the others are totalized
/// as self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Player2Machine {
    pub decide: Vec<usize>,
    /// `update[m][a]`: next state after Player 1 plays `a` and the machine plays `decide[m]`.
    pub update: Vec<[usize; 2]>,
    pub initial: usize,
}

impl Player2Machine {
    pub fn num_states(&self) -> usize {
        self.decide.len()
    }

    /// Play produced against the Player-1 word `0^zeros 1 0^ω`.
    pub fn play_against_prelude(&self, zeros: usize) -> UltimatelyPeriodicPlay {
        let mut m = self.initial;
        let mut prefix = Vec::new();
        for i in 0..=zeros {
            let a = usize::from(i == zeros);
            prefix.push(Pair::new(a, self.decide[m]));
            m = self.update[m][a];
        }
        let mut seen = vec![usize::MAX; self.num_states()];
        let mut tail = Vec::new();
        while seen[m] == usize::MAX {
            seen[m] = tail.len();
            tail.push(Pair::new(0, self.decide[m]));
            m = self.update[m][0];
        }
        let cycle = tail.split_off(seen[m]);
        prefix.extend(tail);
        Lasso::new(prefix, cycle).expect("non-empty cycle").normalized()
    }
}

/// Every Player-2 machine with `n` states and initial state 0, enumerated lazily.
pub fn all_player2_machines(n: usize) -> impl Iterator<Item = Player2Machine> {
    let total = 2usize.pow(n as u32) * n.pow(2 * n as u32);
    (0..total).map(move |code| {
        let mut c = code;
        let decide = (0..n)
            .map(|_| {
                let b = c % 2;
                c /= 2;
                b
            })
            .collect();
        let update = (0..n)
            .map(|_| {
                let t0 = c % n;
                c /= n;
                let t1 = c % n;
                c /= n;
                [t0, t1]
            })
            .collect();
        Player2Machine { decide, update, initial: 0 }
    })
}

/// Defeats a Player-2 machine with the prelude `0^{n+1} 1` where `n` is its
/// number of states.
pub fn falsify_player2(machine: &Player2Machine, game: &CounterexampleGame) -> Result<Witness> {
    if game.kind != CounterexampleKind::OpponentGame {
        return Err(Error::InvalidParams("Player-2 machines are falsified in the opponent game".into()));
    }
    let zeros = machine.num_states() + 1;
    let play = machine.play_against_prelude(zeros);
    if game.member(&play)? {
        Ok(Witness::Prelude { zeros, play })
    } else {
        Err(Error::Internal(format!("prelude of {zeros} zeros does not defeat the machine")))
    }
}

/// Player 2's counting answer to `0ⁿ1`: `n + 1` zeros, then a 1, then zeros.
pub fn counting_response(n: usize) -> UltimatelyPeriodicPlay {
    let mut prefix: Vec<Pair> = (0..n).map(|_| Pair::new(0, 0)).collect();
    prefix.push(Pair::new(1, 0));
    prefix.extend((0..n + 1).map(|_| Pair::new(0, 0)));
    prefix.push(Pair::new(0, 1));
    Lasso::new(prefix, vec![Pair::new(0, 0)]).expect("non-empty cycle")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_sequences() {
        assert_eq!(Sequence::Champernowne.prefix(2, 10), vec![0, 1, 0, 0, 0, 1, 1, 0, 1, 1]);
        assert_eq!(Sequence::ThueMorse.prefix(2, 8), vec![0, 1, 1, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn constant_play_misses_the_other_letter() {
        let game = build_counterexample(CounterexampleKind::DisjunctivePi02, 2).unwrap();
        let machines = all_machines(&game.alphabet, 1);
        let zero = machines.iter().find(|m| m.decide(0) == 0).unwrap();
        assert_eq!(falsify_machine(zero, &game).unwrap(), Witness::MissingPrefix { length: 2 });
        let one = machines.iter().find(|m| m.decide(0) == 1).unwrap();
        assert_eq!(falsify_machine(one, &game).unwrap(), Witness::MissingPrefix { length: 1 });
    }

    #[test]
    fn thue_morse_rejects_alternation() {
        let game = build_counterexample(CounterexampleKind::IrregularSuffixSigma02, 2).unwrap();
        let play = Lasso::new(vec![], vec![Pair::new(0, 0), Pair::new(1, 0)]).unwrap();
        assert!(!game.member(&play).unwrap());
        assert_eq!(game.disjoint_window(&[0, 1]).unwrap(), 5);
    }

    #[test]
    fn opponent_oracle() {
        assert!(!opponent_member(&counting_response(3)));
        let quick = Lasso::new(vec![Pair::new(0, 0), Pair::new(1, 0), Pair::new(0, 1)], vec![Pair::new(0, 0)]).unwrap();
        assert!(opponent_member(&quick));
        assert!(!opponent_member(&Lasso::constant(Pair::new(0, 1))));
        assert!(opponent_member(&Lasso::new(vec![Pair::new(1, 1)], vec![Pair::new(0, 0)]).unwrap()));
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_counterexample(CounterexampleKind::DisjunctivePi02, 1).is_err());
        assert!(build_counterexample(CounterexampleKind::OpponentGame, 3).is_err());
    }
}

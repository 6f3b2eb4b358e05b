//! Conditions outside the supported classes where finite memory does not
//! suffice: every small machine is refuted with a finite certificate.

use deltasynth::counterexample::{
    all_machines, all_player2_machines, build_counterexample, falsify_machine, falsify_player2, CounterexampleKind,
};
use std::collections::BTreeMap;

fn main() -> deltasynth::Result<()> {
    for kind in [CounterexampleKind::DisjunctivePi02, CounterexampleKind::IrregularSuffixSigma02] {
        let game = build_counterexample(kind, 2)?;
        println!("{kind:?} with base sequence {:?}: first letters {:?}", game.sequence, game.sequence.prefix(2, 24));
        for n in 1..=2 {
            let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
            for machine in all_machines(&game.alphabet, n) {
                *histogram.entry(falsify_machine(&machine, &game)?.to_json().to_string()).or_default() += 1;
            }
            println!("  {n}-state machines:");
            for (w, count) in histogram {
                println!("    {count:>4} × {w}");
            }
        }
    }
    let game = build_counterexample(CounterexampleKind::OpponentGame, 2)?;
    for m in 1..=3 {
        let count = all_player2_machines(m).map(|machine| falsify_player2(&machine, &game)).filter(Result::is_ok).count();
        println!("opponent game: all {count} Player-2 machines with {m} states lose to 0^{}1 0^ω", m + 1);
    }
    Ok(())
}

//! Why the closed-set constructions are not enough beyond level 1: applied
//! directly to the reference K2 game they produce a machine that the
//! verifier refutes, while the K2 construction wins.

use deltasynth::synthesis::{naive_antichain, naive_pruning, synth_k2, SynthOptions};
use deltasynth::verifier::{beta_json, verify_machine, Verdict};
use deltasynth::{catalog, Configuration};

fn main() -> deltasynth::Result<()> {
    let game = catalog::example10();
    let start = Configuration::initial(&game.monitor);
    let opts = SynthOptions::exact();
    let candidates = [
        ("naive antichain", naive_antichain(&game, &start, &opts)?),
        ("naive pruning", naive_pruning(&game, &start, &opts)?),
        ("two-state reference machine", catalog::fig2_machine()),
        ("K2 construction", synth_k2(&game, &opts)?),
    ];
    for (name, machine) in &candidates {
        match verify_machine(machine, &game)? {
            Verdict::Winning => println!("{name:<26} {} states  Winning", machine.num_states()),
            Verdict::Losing(w) => {
                let play = machine.machine_play(&w);
                println!(
                    "{name:<26} {} states  Losing against β = {}  (play {})",
                    machine.num_states(),
                    beta_json(&game, &w),
                    game.alphabet().history_label(&play.take(play.prefix.len() + play.cycle.len()))
                );
            }
        }
    }
    Ok(())
}

//! Multi-energy games: the minimal initial credits per state, a synthesized
//! machine, and a simulation showing the counters.

use deltasynth::order::winning_region_capped;
use deltasynth::synthesis::{self, SynthOptions};
use deltasynth::verifier::{simulate, verify_machine};
use deltasynth::{catalog, oracle, Lasso};

fn main() -> deltasynth::Result<()> {
    let game = catalog::multienergy_d2();
    let m = &game.monitor;
    println!("{} : {} states, {} counters, initial credit {:?}", game.name, m.num_states(), m.energy_dim(), m.initial_credit());
    let region = winning_region_capped(&game, 64)?;
    for q in 0..m.num_states() {
        println!("  minimal credits at {:<3}: {:?}", m.name(q), region.frontier[q]);
    }
    println!("brute-force oracle (cap 16) says Player 1 wins: {}", oracle::energy_winner(&game, 16)?);

    let machine = synthesis::synth(&game, &SynthOptions::default())?;
    println!("machine with {} states, verdict {:?}", machine.num_states(), verify_machine(&machine, &game)?);
    for b in 0..game.alphabet().num_b() {
        let trace = simulate(&machine, &game, &Lasso::constant(b), 6)?;
        let steps: Vec<String> = trace.configs.iter().map(|c| c.render(m)).collect();
        println!("  against {}^ω: {}", game.alphabet().b_name(b), steps.join(" → "));
    }
    Ok(())
}

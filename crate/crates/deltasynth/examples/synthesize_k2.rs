//! Builds the finite-memory winning strategy for the reference K2 game and
//! shows how it was assembled: closed and open representatives, tree depths,
//! and the final machine as a DOT graph.

use deltasynth::synthesis::{compute_depth, plan_k2, SynthOptions};
use deltasynth::verifier::verify_machine;
use deltasynth::{catalog, Configuration};

fn main() -> deltasynth::Result<()> {
    let game = catalog::example10();
    let m = &game.monitor;
    let start = Configuration::initial(m);
    for (label, opts) in [("exact order", SynthOptions::exact()), ("structural order", SynthOptions::default())] {
        let plan = plan_k2(&game, &start, &opts)?;
        println!("== {label}");
        for rep in &plan.closed_reps {
            println!("  closed representative {:<4} depth {:?}", rep.render(m), compute_depth(&plan, rep));
        }
        for rep in &plan.open_reps {
            println!("  open representative   {}", rep.render(m));
        }
        println!("  machine: {} states, verdict {:?}", plan.machine.num_states(), verify_machine(&plan.machine, &game)?);
        if opts.order == SynthOptions::exact().order {
            println!("{}", plan.machine.to_dot());
        }
    }
    Ok(())
}

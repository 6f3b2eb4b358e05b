//! Synthesis above level 2: random Λ and K conditions of level 3, with the
//! rank table that drives the tree depths of the K construction.

use deltasynth::gen::{random_game, ClassTarget};
use deltasynth::synthesis::{self, plan_k_theta, SynthOptions};
use deltasynth::verifier::verify_machine;
use deltasynth::{Configuration, Error};

fn main() -> deltasynth::Result<()> {
    let opts = SynthOptions::default();
    let mut shown = 0;
    for seed in 0.. {
        let game = random_game(seed, ClassTarget::KUpTo3, 5);
        if game.classify()?.level != 3 {
            continue;
        }
        let m = &game.monitor;
        match plan_k_theta(&game, &Configuration::initial(m), &opts) {
            Ok(plan) => {
                println!("{} : {}", game.name, game.condition.render(m));
                if let Some(r) = &plan.ranks {
                    let ranks: Vec<String> = (0..m.num_states()).map(|q| format!("{}:{}", m.name(q), r.rank[q])).collect();
                    println!("  θ = {}, ranks {}", r.theta, ranks.join(" "));
                }
                println!("  depths {:?}, machine {} states, {:?}", plan.depths, plan.machine.num_states(), verify_machine(&plan.machine, &game)?);
                shown += 1;
            }
            Err(Error::NoWinningStrategy) => continue,
            Err(e) => return Err(e),
        }
        if shown == 3 {
            break;
        }
    }
    for seed in 0..3 {
        let game = random_game(seed, ClassTarget::LambdaUpTo3, 5);
        let outcome = synthesis::synth(&game, &opts).map(|mach| mach.num_states());
        println!("{} ({}) → {:?}", game.name, game.classify()?, outcome);
    }
    Ok(())
}

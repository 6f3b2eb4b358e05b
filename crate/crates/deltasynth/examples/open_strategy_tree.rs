//! Open (reachability) synthesis on random games: the explored strategy
//! tree stays finite, and the machine is never larger than the tree.

use deltasynth::gen::{random_game, ClassTarget};
use deltasynth::synthesis::{synth_open_from, SynthOptions};
use deltasynth::{Configuration, Error};

fn main() -> deltasynth::Result<()> {
    println!("{:<18} {:>3} {:>6} {:>9} {:>7}", "game", "|Q|", "tree", "internal", "memory");
    for seed in 0..12 {
        let game = random_game(seed, ClassTarget::Open, 6);
        match synth_open_from(&game, &Configuration::initial(&game.monitor), &SynthOptions::default()) {
            Ok(t) => println!(
                "{:<18} {:>3} {:>6} {:>9} {:>7}",
                game.name,
                game.monitor.num_states(),
                t.tree_nodes,
                t.internal_nodes,
                t.machine.num_states()
            ),
            Err(Error::NoWinningStrategy) => println!("{:<18} {:>3}  (Player 1 cannot force the open set)", game.name, game.monitor.num_states()),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

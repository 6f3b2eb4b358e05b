//! Model checking a machine and replaying its play against an adversary
//! word, reading the game and machine from the bundled data files.

use deltasynth::verifier::{simulate, verify_machine, Verdict};
use deltasynth::{cli, format};

fn main() -> deltasynth::Result<()> {
    let game = format::parse_game_str(cli::bundled("example10.game").expect("bundled game"))?;
    for name in ["fig2.machine.json", "fig3.machine.json"] {
        let machine = format::parse_machine_str(cli::bundled(name).expect("bundled machine"), game.alphabet())?;
        let verdict = verify_machine(&machine, &game)?;
        println!("{name}: {} states, {verdict:?}", machine.num_states());
        let beta = match &verdict {
            Verdict::Losing(w) => w.clone(),
            Verdict::Winning => format::parse_beta("0 : 1", game.alphabet())?,
        };
        let trace = simulate(&machine, &game, &beta, 6)?;
        println!("  β = {}", format::beta_to_string(&beta, game.alphabet()));
        for (i, (mem, c)) in trace.memory.iter().zip(&trace.configs).enumerate() {
            let round = trace.history.get(i).map(|p| game.alphabet().pair_label(*p)).unwrap_or_default();
            println!("  {i}: memory {:<10} monitor {:<5} next {round}", machine.name(*mem), c.render(&game.monitor));
        }
    }
    Ok(())
}

//! Writes the reference games and machines as game documents and machine
//! JSON files.
//!
//! ```text
//! cargo run --example export_catalog -- OUT_DIR
//! ```

use deltasynth::{catalog, format};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "catalog".into()));
    std::fs::create_dir_all(&dir)?;
    let games = [
        catalog::example10(),
        catalog::example10_closed(),
        catalog::example10_open(),
        catalog::w_full(),
        catalog::multienergy_d2(),
    ];
    for game in &games {
        let path = dir.join(format!("{}.game", game.name));
        std::fs::write(&path, format::game_to_string(game))?;
        println!("{} ({} states, class {})", path.display(), game.monitor.num_states(), game.classify()?);
    }
    for (name, machine) in [("fig2", catalog::fig2_machine()), ("fig3", catalog::fig3_machine())] {
        let path = dir.join(format!("{name}.machine.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&machine.to_json())? + "\n")?;
        println!("{} ({} memory states)", path.display(), machine.num_states());
    }
    Ok(())
}

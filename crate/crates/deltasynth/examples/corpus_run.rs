//! Runs the bundled corpus in-process and prints the roll-up.

use deltasynth::cli::{bundled, run_corpus};
use deltasynth::synthesis::SynthOptions;

fn main() -> deltasynth::Result<()> {
    let manifest: serde_json::Value = serde_json::from_str(bundled("corpus.json").expect("bundled manifest")).expect("valid JSON");
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let report = run_corpus(&manifest, None, seed, &SynthOptions::default(), false)?;
    for e in report["entries"].as_array().into_iter().flatten() {
        println!("{:<28} passed={:<5} {:>9} ms", e["name"].as_str().unwrap_or(""), e["passed"], e["timingMs"]);
    }
    println!("{}", report["summary"]);
    Ok(())
}

//! The order on configurations and the finite Min-sets it induces.
//! Compares the structural order with the exact inclusion of winning sets
//! on the reference game, and computes a Min-set of energy configurations.

use deltasynth::order::{min_set, winning_region};
use deltasynth::{catalog, Configuration, OrderWitness};

fn main() -> deltasynth::Result<()> {
    let game = catalog::example10();
    let m = &game.monitor;
    let exact = OrderWitness::exact(&game)?;
    let structural = OrderWitness::structural(&game);
    println!("pairs q ≤ q' (exact order; * = also structural):");
    for p in 0..m.num_states() {
        let above: Vec<String> = (0..m.num_states())
            .filter(|&q| exact.leq(&Configuration::new(p, vec![]), &Configuration::new(q, vec![])).unwrap_or(false))
            .map(|q| {
                let s = structural.leq(&Configuration::new(p, vec![]), &Configuration::new(q, vec![])).unwrap_or(false);
                format!("{}{}", m.name(q), if s { "*" } else { "" })
            })
            .collect();
        println!("  {:<5} ≤ {}", m.name(p), above.join(" "));
    }
    let region = winning_region(&game)?;
    let winning = region.minimal_elements(|_| true);
    let mins = min_set(&winning, &exact);
    println!("winning states: {:?}", winning.iter().map(|c| c.render(m)).collect::<Vec<_>>());
    println!("Min under the exact order: {:?}", mins.elements.iter().map(|c| c.render(m)).collect::<Vec<_>>());

    let energy = catalog::multienergy_d2();
    let em = &energy.monitor;
    let domain: Vec<Configuration> =
        (0..4).flat_map(|x| (0..4).map(move |y| Configuration::new(0, vec![x, y]))).filter(|c| c.live().unwrap().iter().sum::<i64>() >= 3).collect();
    let mins = min_set(&domain, &OrderWitness::structural(&energy));
    println!(
        "Min of {{(q, x, y) : x + y ≥ 3}} at {}: {:?}",
        em.name(0),
        mins.elements.iter().map(|c| c.live().unwrap().to_vec()).collect::<Vec<_>>()
    );
    Ok(())
}

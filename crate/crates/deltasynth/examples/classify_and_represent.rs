//! Classifies the reference game and prints its equivalent presentations:
//! difference form, labelling and Büchi coloring. Membership is compared on
//! a few plays.

use deltasynth::condition::{pi02_presentation, to_buchi_coloring, to_difference_form, to_labelling};
use deltasynth::{catalog, Lasso, Pair};

fn main() -> deltasynth::Result<()> {
    let game = catalog::example10();
    let m = &game.monitor;
    println!("condition : {}", game.condition.render(m));
    println!("class     : {}", game.classify()?);

    let df = to_difference_form(&game.condition, m)?;
    println!("difference form, θ = {}", df.theta);
    for (eta, open) in df.opens.iter().enumerate() {
        let names: Vec<&str> = (0..m.num_states()).filter(|&q| open[q]).map(|q| m.name(q)).collect();
        println!("  O_{eta} = {{{}}}", names.join(", "));
    }
    let lbl = to_labelling(&game.condition, m)?;
    let ones: Vec<&str> = (0..m.num_states()).filter(|&q| lbl.label[q]).map(|q| m.name(q)).collect();
    println!("label-1 states: {{{}}}", ones.join(", "));
    let col = to_buchi_coloring(m, &pi02_presentation(&game.condition, m)?)?;
    println!("coloring monitor: {} states", col.monitor.num_states());

    let plays = [
        ("(0,0)^ω", Lasso::constant(Pair::new(0, 0))),
        ("(0,1)(0,0)^ω", Lasso::new(vec![Pair::new(0, 1)], vec![Pair::new(0, 0)])?),
        ("(0,0)(0,0)(1,0)^ω", Lasso::new(vec![Pair::new(0, 0), Pair::new(0, 0)], vec![Pair::new(1, 0)])?),
        ("(1,1)^ω", Lasso::constant(Pair::new(1, 1))),
    ];
    println!("{:<20} expr  diff  label coloring", "play");
    for (name, play) in &plays {
        println!(
            "{name:<20} {:<5} {:<5} {:<5} {}",
            game.member(play)?,
            df.member(m, play)?,
            lbl.member(m, play)?,
            col.member(play)?
        );
    }
    Ok(())
}

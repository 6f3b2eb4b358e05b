mod common;

use deltasynth::gen::{self, ClassTarget};
use deltasynth::order::{min_set, Configuration};
use deltasynth::synthesis::{self, SynthOptions};
use deltasynth::verifier::{verify_machine, Verdict};
use deltasynth::{format, Alphabet, FiniteMemoryMachine, Game, Lasso, OrderMode, OrderWitness};
use proptest::prelude::*;
use rand::Rng;

fn any_target() -> impl Strategy<Value = ClassTarget> {
    prop::sample::select(ClassTarget::ALL.to_vec())
}

/// Random machine with up to `max_states` states over the game's alphabet.
fn random_machine(game: &Game, seed: u64, max_states: usize) -> FiniteMemoryMachine {
    let mut rng = gen::rng(seed);
    let al = game.alphabet().clone();
    let n = rng.gen_range(1..=max_states);
    let decide = (0..n).map(|_| rng.gen_range(0..al.num_a())).collect();
    let update = (0..n).map(|_| (0..al.num_pairs()).map(|_| Some(rng.gen_range(0..n))).collect()).collect();
    let names = (0..n).map(|i| format!("m{i}")).collect();
    FiniteMemoryMachine::new(al, names, decide, update, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn game_documents_round_trip(seed in any::<u64>(), target in any_target(), energy in any::<bool>()) {
        let game = if energy { gen::random_energy_game(seed) } else { gen::random_game(seed, target, 5) };
        let text = format::game_to_string(&game);
        let back = format::parse_game_str(&text).unwrap();
        prop_assert_eq!(&back.monitor, &game.monitor);
        prop_assert_eq!(&back.condition, &game.condition);
        prop_assert_eq!(format::game_to_string(&back), text);
    }

    #[test]
    fn order_is_sound_on_lassos(seed in any::<u64>(), target in any_target(), exact in any::<bool>()) {
        let game = gen::random_game(seed, target, 4);
        let m = &game.monitor;
        let mode = if exact { OrderMode::ExactRegular } else { OrderMode::StructuralOnly };
        let ord = OrderWitness::for_mode(&game, mode).unwrap();
        let plays = common::play_lassos(m.alphabet(), 4);
        for q1 in 0..m.num_states() {
            for q2 in 0..m.num_states() {
                if !ord.leq(&Configuration::new(q1, vec![]), &Configuration::new(q2, vec![])).unwrap() {
                    continue;
                }
                for play in &plays {
                    let w1 = game.condition.member_from(m, q1, &[], play).unwrap();
                    let w2 = game.condition.member_from(m, q2, &[], play).unwrap();
                    prop_assert!(!w1 || w2, "{} ≤ {} but {:?} separates them", m.name(q1), m.name(q2), play);
                }
            }
        }
    }

    #[test]
    fn verdicts_match_the_game_tree(seed in any::<u64>(), target in any_target(), energy in any::<bool>()) {
        let game = if energy { gen::random_energy_game(seed) } else { gen::random_game(seed, target, 4) };
        prop_assume!(game.monitor.energy_dim() <= 1);
        let machine = random_machine(&game, seed ^ 0x5eed, 3);
        let verdict = verify_machine(&machine, &game).unwrap();
        let tree = common::game_tree_counterexample(&machine, &game);
        prop_assert_eq!(verdict.is_winning(), tree.is_none());
        if let Verdict::Losing(w) = verdict {
            prop_assert!(!game.member(&machine.machine_play(&w)).unwrap(), "witness {:?} does not lose", w);
        }
    }

    #[test]
    fn witnesses_replay_to_losses(seed in any::<u64>()) {
        let game = gen::random_energy_game(seed);
        let machine = random_machine(&game, seed.wrapping_add(1), 3);
        if let Verdict::Losing(w) = verify_machine(&machine, &game).unwrap() {
            prop_assert!(!game.member(&machine.machine_play(&w)).unwrap());
        }
    }

    #[test]
    fn complement_of_a_win_is_a_loss(seed in any::<u64>(), target in any_target()) {
        let game = gen::random_game(seed, target, 5);
        let machine = random_machine(&game, seed, 3);
        if verify_machine(&machine, &game).unwrap().is_winning() {
            let dual = game.with_condition(game.condition.clone().negate());
            match verify_machine(&machine, &dual).unwrap() {
                Verdict::Losing(w) => prop_assert!(!dual.member(&machine.machine_play(&w)).unwrap()),
                Verdict::Winning => prop_assert!(false, "machine wins both a condition and its complement"),
            }
        }
    }

    #[test]
    fn classes_dualise(seed in any::<u64>(), target in any_target()) {
        let game = gen::random_game(seed, target, 5);
        let c = game.classify().unwrap();
        prop_assert_eq!(game.condition.clone().negate().classify().unwrap(), c.dual());
    }

    #[test]
    fn synthesis_is_deterministic_and_sound(seed in any::<u64>(), target in any_target(), exact in any::<bool>()) {
        let game = gen::random_game(seed, target, 5);
        let opts = if exact { SynthOptions::exact() } else { SynthOptions::default() };
        let a = synthesis::synth(&game, &opts);
        let b = synthesis::synth(&game, &opts);
        prop_assert_eq!(&a, &b);
        if let Ok(machine) = a {
            prop_assert!(verify_machine(&machine, &game).unwrap().is_winning());
        }
    }

    #[test]
    fn min_sets_are_covering_antichains(seed in any::<u64>(), points in prop::collection::vec((0usize..4, 0i64..4, 0i64..4), 0..24)) {
        let game = gen::random_energy_game(seed);
        let m = &game.monitor;
        let d = m.energy_dim();
        let domain: Vec<Configuration> = points
            .iter()
            .map(|&(q, x, y)| Configuration::new(q % m.num_states(), [x, y][..d].to_vec()))
            .collect();
        let ord = OrderWitness::structural(&game);
        let min = min_set(&domain, &ord);
        prop_assert!(min.is_antichain(&ord));
        for c in &domain {
            prop_assert!(min.cover(&ord, c).is_some());
        }
        for k in &min.elements {
            prop_assert!(domain.contains(k));
        }
    }

    #[test]
    fn lasso_normal_forms(prefix in prop::collection::vec(0usize..3, 0..6), cycle in prop::collection::vec(0usize..3, 1..6)) {
        let l = Lasso::new(prefix, cycle).unwrap();
        let n = l.normalized();
        prop_assert!(n.same_word(&l));
        prop_assert_eq!(n.normalized(), n.clone());
        let span = l.prefix.len() + 2 * l.cycle.len() + 4;
        prop_assert_eq!(n.take(span), l.take(span));
    }

    #[test]
    fn adversary_words_round_trip(prefix in prop::collection::vec(0usize..3, 0..5), cycle in prop::collection::vec(0usize..3, 1..5)) {
        let al = Alphabet::new(vec!["x"], vec!["b0", "b1", "b2"]).unwrap();
        let beta = Lasso::new(prefix, cycle).unwrap();
        let text = format::beta_to_string(&beta, &al);
        prop_assert_eq!(format::parse_beta(&text, &al).unwrap(), beta);
    }
}

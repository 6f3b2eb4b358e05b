//! Synthesis for unions of a closed and an open set.
//!
//! Histories are split by whether they can still end up winning without ever
//! reaching the open part's absorbing trap (the prefix set `P`). Outside `P`
//! only the open part matters and a reachability machine takes over. Inside
//! `P` the strategy follows bounded-depth trees, long enough that folding back
//! to a smaller representative is safe.

use super::assembly::{assemble, longest_to_final, Parts};
use super::closed::normalize_start;
use super::ktheta::{self, RankTable};
use super::{interior_trap, open, require_class, verified, SynthOptions};
use crate::condition::{ConditionExpr, Game};
use crate::error::{Error, Result};
use crate::game::FiniteMemoryMachine;
use crate::graph::{self, Sccs};
use crate::order::{antichain, energy_prefix_region, min_set, winning_region_capped, Configuration, Credit, OrderWitness};

/// Everything the gluing construction decided, kept for inspection.
#[derive(Clone, Debug)]
pub struct K2Plan {
    pub machine: FiniteMemoryMachine,
    pub open_reps: Vec<Configuration>,
    pub open_machines: Vec<FiniteMemoryMachine>,
    pub closed_reps: Vec<Configuration>,
    /// Tree depth per closed representative.
    pub depths: Vec<usize>,
    /// Per machine state: the configuration held by a tree node.
    pub memory_config: Vec<Option<Configuration>>,
    /// Per machine state: the open machine it was copied from.
    pub open_part: Vec<Option<usize>>,
    /// Ranks used by the higher-level construction, when it was used.
    pub ranks: Option<RankTable>,
}

/// The tree depth chosen for a closed representative.
pub fn compute_depth(plan: &K2Plan, rep: &Configuration) -> Option<usize> {
    plan.closed_reps.iter().position(|c| c == rep).map(|j| plan.depths[j])
}

pub fn synth_k2(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    Ok(plan_k2(&game, &Configuration::initial(&game.monitor), opts)?.machine)
}

pub fn plan_k2(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<K2Plan> {
    let game = game.effective();
    require_class(&game, crate::condition::Kind::K, Some(2), "K2 synthesis")?;
    let start = normalize_start(&game, &start.clone());
    if game.uses_energy() {
        plan_energy(&game, &start, opts)
    } else {
        match split(&game)? {
            Some((goal, prefix)) => plan_regular(&game, &start, opts, goal, prefix),
            None => ktheta::plan_unchecked(&game, &start, opts),
        }
    }
}

/// The open part's absorbing trap `U` and the states outside it from which a
/// play can stay outside `U` forever and still win. `None` when some such
/// state can also stay outside `U` and lose, in which case no clean split
/// exists.
fn split(game: &Game) -> Result<Option<(Vec<bool>, Vec<bool>)>> {
    let m = &game.monitor;
    let n = m.num_states();
    let goal = interior_trap(game);
    let adj: Vec<Vec<usize>> =
        (0..n).map(|q| if goal[q] { Vec::new() } else { m.adjacency()[q].iter().copied().filter(|&t| !goal[t]).collect() }).collect();
    let sccs = Sccs::new(&adj);
    let good: Vec<usize> = (0..n).filter(|&q| !goal[q] && sccs.is_recurrent(q) && game.condition.eval_at(q)).collect();
    let mut rev = vec![Vec::new(); n];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    let prefix = graph::reachable(&rev, good);
    let clean = (0..n).all(|q| !(prefix[q] && sccs.is_recurrent(q) && !game.condition.eval_at(q)));
    Ok(clean.then_some((goal, prefix)))
}

fn plan_regular(game: &Game, start: &Configuration, opts: &SynthOptions, goal: Vec<bool>, prefix: Vec<bool>) -> Result<K2Plan> {
    let m = &game.monitor;
    let ord = OrderWitness::for_mode(game, opts.order)?;
    let region = winning_region_capped(game, opts.credit_cap)?;
    if !region.contains(start) {
        return Err(Error::NoWinningStrategy);
    }
    let open_reps = min_set(&region.minimal_elements(|q| !prefix[q]), &ord).elements;
    let closed_reps = min_set(&region.minimal_elements(|q| prefix[q]), &ord).elements;
    let open_game = game.with_condition(ConditionExpr::open((0..m.num_states()).filter(|&q| goal[q])));
    let open_machines = open_reps
        .iter()
        .map(|c| Ok(open::synth_open_from(&open_game, c, opts)?.machine))
        .collect::<Result<Vec<_>>>()?;
    let outside: Vec<usize> = (0..m.num_states()).filter(|&q| region.state_winning(q) && !prefix[q]).collect();
    let mut depths = Vec::with_capacity(closed_reps.len());
    for hbar in &closed_reps {
        let mut depth = 0;
        for &q in &outside {
            if ord.leq_unchecked(hbar, &Configuration::new(q, vec![])) {
                let d = longest_to_final(game, (hbar.state, q), &prefix, &|x| goal[x])?;
                depth = depth.max(d.unwrap_or(0));
            }
        }
        depths.push(depth);
    }
    let in_prefix = |c: &Configuration| prefix[c.state];
    finish(game, start, opts, &ord, &region, &in_prefix, open_reps, open_machines, closed_reps, depths, None)
}

fn plan_energy(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<K2Plan> {
    let m = &game.monitor;
    let open_part = match &game.condition {
        ConditionExpr::Union(c, o) if **c == ConditionExpr::EnergySafe => (**o).clone(),
        _ => return Err(Error::Unsupported(format!("energy condition {} in K2 synthesis", game.condition.render(m)))),
    };
    if opts.order != crate::order::OrderMode::StructuralOnly {
        return Err(Error::Unsupported("the exact order needs an energy-free condition".into()));
    }
    let ord = OrderWitness::structural(game);
    let region = winning_region_capped(game, opts.credit_cap)?;
    if !region.contains(start) {
        return Err(Error::NoWinningStrategy);
    }
    let pref = energy_prefix_region(m, opts.credit_cap);
    let attr = region.depleted_ok.clone();
    let in_prefix = |c: &Configuration| match &c.credit {
        Credit::Live(v) => antichain::contains(&pref[c.state], v),
        Credit::Depleted => false,
    };
    let mut closed = Vec::new();
    for q in 0..m.num_states() {
        if attr[q] {
            closed.extend(pref[q].iter().map(|v| Configuration::new(q, v.clone())));
        } else {
            for v in &region.frontier[q] {
                if !antichain::contains(&pref[q], v) {
                    return Err(Error::Internal(format!("winning credit {v:?} at {} has no safe continuation", m.name(q))));
                }
                closed.push(Configuration::new(q, v.clone()));
            }
        }
    }
    let closed_reps = min_set(&closed, &ord).elements;
    let open_reps: Vec<Configuration> = (0..m.num_states()).filter(|&q| attr[q]).map(Configuration::depleted).collect();
    let open_game = game.with_condition(open_part).effective();
    let open_machines = open_reps
        .iter()
        .map(|c| Ok(open::synth_open_from(&open_game, &Configuration::new(c.state, vec![]), opts)?.machine))
        .collect::<Result<Vec<_>>>()?;
    let depths = vec![0; closed_reps.len()];
    finish(game, start, opts, &ord, &region, &in_prefix, open_reps, open_machines, closed_reps, depths, None)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    game: &Game,
    start: &Configuration,
    opts: &SynthOptions,
    ord: &OrderWitness,
    region: &crate::order::Region,
    in_prefix: &dyn Fn(&Configuration) -> bool,
    open_reps: Vec<Configuration>,
    open_machines: Vec<FiniteMemoryMachine>,
    closed_reps: Vec<Configuration>,
    depths: Vec<usize>,
    ranks: Option<RankTable>,
) -> Result<K2Plan> {
    let parts = Parts {
        game,
        ord,
        region,
        in_prefix,
        open_reps: &open_reps,
        open_machines: &open_machines,
        closed_reps: &closed_reps,
        depths: &depths,
    };
    let assembled = assemble(&parts, start, opts.budget)?;
    let machine = verified(assembled.machine, game, start)?;
    Ok(K2Plan {
        machine,
        open_reps,
        open_machines,
        closed_reps,
        depths,
        memory_config: assembled.memory_config,
        open_part: assembled.open_part,
        ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, ex10};
    use crate::verifier::verify_machine;

    #[test]
    fn example10_exact_plan_matches_the_hand_analysis() {
        let game = catalog::example10();
        let plan = plan_k2(&game, &Configuration::initial(&game.monitor), &SynthOptions::exact()).unwrap();
        let s0 = Configuration::new(ex10::S0, vec![]);
        let c = Configuration::new(ex10::C, vec![]);
        assert_eq!(plan.closed_reps, vec![s0.clone(), c.clone()]);
        assert_eq!(compute_depth(&plan, &s0), Some(2));
        assert_eq!(compute_depth(&plan, &c), Some(0));
        assert_eq!(plan.open_reps, vec![Configuration::new(ex10::W2, vec![])]);
        assert!(verify_machine(&plan.machine, &game).unwrap().is_winning());
    }

    #[test]
    fn example10_structural_plan_wins() {
        let game = catalog::example10();
        let machine = synth_k2(&game, &SynthOptions::default()).unwrap();
        assert!(verify_machine(&machine, &game).unwrap().is_winning());
    }

    #[test]
    fn closed_condition_is_rejected() {
        let err = synth_k2(&catalog::example10_open(), &SynthOptions::default()).unwrap_err();
        assert!(matches!(err, Error::WrongClass(_)));
    }
}

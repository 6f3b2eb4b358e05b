//! Synthesis for K conditions above level 2 on energy-free games.
//!
//! The condition is split syntactically into a closed part `C` and a Λ part
//! `L`. Outside the prefix set of `C` a machine for `L` takes over. Inside
//! it, tree depths are driven by the ranks of `L`'s difference form: a tree
//! rooted at `h̄` must be deep enough that every comparable history outside
//! the prefix set, of a rank losing for `L`, has dropped to a lower rank.

use super::closed::normalize_start;
use super::k2::{finish, K2Plan};
use super::assembly::longest_to_final;
use super::{can_reach_value_one, require_class, synth_from, SynthOptions};
use crate::condition::{to_difference_form, Game, Kind};
use crate::error::{Error, Result};
use crate::game::FiniteMemoryMachine;
use crate::order::{min_set, winning_region_capped, Configuration, OrderWitness};

/// Ranks of monitor states and, per closed representative, the slices used
/// to pick its tree depth.
/// `(η, minimal elements of the slice, accumulated set)`.
pub type Slice = (usize, Vec<Configuration>, Vec<Configuration>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    pub theta: usize,
    /// Rank of each monitor state, capped at `theta`.
    pub rank: Vec<usize>,
    /// Slices per closed representative.
    pub slices: Vec<Vec<Slice>>,
}

pub fn synth_k_theta(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    Ok(plan_k_theta(&game, &Configuration::initial(&game.monitor), opts)?.machine)
}

pub fn plan_k_theta(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<K2Plan> {
    let game = game.effective();
    require_class(&game, Kind::K, None, "K synthesis")?;
    plan_unchecked(&game, start, opts)
}

pub(crate) fn plan_unchecked(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<K2Plan> {
    if game.uses_energy() {
        return Err(Error::Unsupported("energy conditions above K2".into()));
    }
    let m = &game.monitor;
    let n = m.num_states();
    let start = normalize_start(game, start);
    let (closed, lambda) = game.condition.decompose_k()?;
    let prefix = can_reach_value_one(&game.with_condition(closed));
    let dform = to_difference_form(&lambda, m)?;
    let theta = dform.theta;
    let rank: Vec<usize> = dform.rank.iter().map(|&r| r.min(theta)).collect();

    let ord = OrderWitness::for_mode(game, opts.order)?;
    let region = winning_region_capped(game, opts.credit_cap)?;
    if !region.contains(&start) {
        return Err(Error::NoWinningStrategy);
    }
    let open_reps = min_set(&region.minimal_elements(|q| !prefix[q]), &ord).elements;
    let closed_reps = min_set(&region.minimal_elements(|q| prefix[q]), &ord).elements;
    let lambda_game = game.with_condition(lambda);
    let open_machines =
        open_reps.iter().map(|c| synth_from(&lambda_game, c, opts)).collect::<Result<Vec<_>>>()?;

    let outside: Vec<usize> = (0..n).filter(|&q| region.state_winning(q) && !prefix[q]).collect();
    let mut depths = Vec::with_capacity(closed_reps.len());
    let mut slices = Vec::with_capacity(closed_reps.len());
    for hbar in &closed_reps {
        let mut acc: Vec<Configuration> = Vec::new();
        let mut table = Vec::new();
        for eta in (theta % 2..=theta).step_by(2) {
            let slice: Vec<Configuration> = outside
                .iter()
                .filter(|&&q| rank[q] == eta)
                .map(|&q| Configuration::new(q, vec![]))
                .filter(|c| ord.leq_unchecked(hbar, c))
                .collect();
            let mins = min_set(&slice, &ord).elements;
            let fresh: Vec<Configuration> =
                mins.iter().filter(|h| !acc.iter().any(|k| ord.leq_unchecked(k, h))).cloned().collect();
            acc.extend(fresh);
            table.push((eta, mins, acc.clone()));
        }
        let mut depth = 0;
        for h in &acc {
            let r = rank[h.state];
            let d = longest_to_final(game, (hbar.state, h.state), &prefix, &|x| rank[x] < r)?;
            depth = depth.max(d.unwrap_or(0));
        }
        depths.push(depth);
        slices.push(table);
    }
    let in_prefix = |c: &Configuration| prefix[c.state];
    let ranks = RankTable { theta, rank, slices };
    finish(game, &start, opts, &ord, &region, &in_prefix, open_reps, open_machines, closed_reps, depths, Some(ranks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::verifier::verify_machine;

    #[test]
    fn example10_through_ranks_matches_k2_depths() {
        let game = catalog::example10();
        let plan = plan_k_theta(&game, &Configuration::initial(&game.monitor), &SynthOptions::exact()).unwrap();
        assert_eq!(plan.depths, vec![2, 0]);
        assert!(verify_machine(&plan.machine, &game).unwrap().is_winning());
        let ranks = plan.ranks.unwrap();
        assert_eq!(ranks.rank[catalog::ex10::WIN], 0);
    }

    #[test]
    fn lambda_condition_is_rejected() {
        let err = synth_k_theta(&catalog::example10_open(), &SynthOptions::default()).unwrap_err();
        assert!(matches!(err, Error::WrongClass(_)));
    }
}

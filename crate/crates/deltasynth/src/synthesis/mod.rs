//! Finite-memory strategy constructions for every supported class, and the
//! dispatcher [`synth`]. Every machine returned by this module has been model
//! checked from its start configuration.

mod assembly;
pub mod closed;
pub mod k2;
pub mod ktheta;
pub mod lambda;
pub mod open;

pub use closed::{naive_antichain, naive_pruning, synth_closed_antichain, synth_closed_pruning};
pub use k2::{compute_depth, plan_k2, synth_k2, K2Plan};
pub use ktheta::{plan_k_theta, synth_k_theta, RankTable};
pub use lambda::synth_lambda;
pub use open::{synth_open, synth_open_from, OpenTree};

use crate::condition::{Game, Kind};
use crate::error::{Error, Result};
use crate::game::FiniteMemoryMachine;
use crate::graph::{self, Sccs};
use crate::order::{Configuration, OrderMode, DEFAULT_CREDIT_CAP};
use crate::verifier::{verify_from, Verdict};

/// Default limit on the number of nodes any tree exploration may create.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthOptions {
    pub order: OrderMode,
    pub budget: usize,
    pub credit_cap: i64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { order: OrderMode::StructuralOnly, budget: DEFAULT_BUDGET, credit_cap: DEFAULT_CREDIT_CAP }
    }
}

impl SynthOptions {
    pub fn exact() -> Self {
        SynthOptions { order: OrderMode::ExactRegular, ..Default::default() }
    }
}

/// Counts created nodes and fails loudly past the limit.
pub(crate) struct Budget {
    limit: usize,
    used: usize,
    context: &'static str,
}

impl Budget {
    pub(crate) fn new(limit: usize, context: &'static str) -> Self {
        Budget { limit, used: 0, context }
    }
    pub(crate) fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit, context: self.context.to_string() })
        } else {
            Ok(())
        }
    }
}

/// Synthesizes a winning machine from the initial configuration.
pub fn synth(game: &Game, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    synth_from(game, &Configuration::initial(&game.monitor), opts)
}

/// Dispatches on the hierarchy class of the condition.
pub fn synth_from(game: &Game, start: &Configuration, opts: &SynthOptions) -> Result<FiniteMemoryMachine> {
    let game = game.effective();
    let class = game.classify()?;
    match (class.kind, class.level) {
        (Kind::Lambda, 1) => Ok(open::synth_open_from(&game, start, opts)?.machine),
        (Kind::K, 1) => closed::synth_closed_antichain_from(&game, start, opts),
        (Kind::Lambda, _) => lambda::synth_lambda_from(&game, start, opts),
        (Kind::K, 2) => Ok(k2::plan_k2(&game, start, opts)?.machine),
        (Kind::K, _) => Ok(ktheta::plan_k_theta(&game, start, opts)?.machine),
    }
}

/// Returns the machine if it wins from `start`, and an internal error otherwise.
pub(crate) fn verified(machine: FiniteMemoryMachine, game: &Game, start: &Configuration) -> Result<FiniteMemoryMachine> {
    match verify_from(&machine, machine.initial(), game, start)? {
        Verdict::Winning => Ok(machine),
        Verdict::Losing(w) => Err(Error::Internal(format!(
            "synthesized machine for {} loses against β = {:?}·{:?}^ω",
            game.name, w.prefix, w.cycle
        ))),
    }
}

/// States all of whose reachable recurrent states have value 1: the largest
/// trap on which every play is winning.
pub fn interior_trap(game: &Game) -> Vec<bool> {
    let m = &game.monitor;
    let adj = m.adjacency();
    let sccs = Sccs::new(&adj);
    let bad: Vec<usize> = (0..m.num_states()).filter(|&q| sccs.is_recurrent(q) && !game.condition.eval_at(q)).collect();
    let mut rev = vec![Vec::new(); m.num_states()];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    let reaches_bad = graph::reachable(&rev, bad);
    reaches_bad.iter().map(|&r| !r).collect()
}

/// States from which some play ends in a recurrent component of value 1.
pub(crate) fn can_reach_value_one(game: &Game) -> Vec<bool> {
    let m = &game.monitor;
    let adj = m.adjacency();
    let sccs = Sccs::new(&adj);
    let good: Vec<usize> = (0..m.num_states()).filter(|&q| sccs.is_recurrent(q) && game.condition.eval_at(q)).collect();
    let mut rev = vec![Vec::new(); m.num_states()];
    for (u, succ) in adj.iter().enumerate() {
        for &v in succ {
            rev[v].push(u);
        }
    }
    graph::reachable(&rev, good)
}

pub(crate) fn require_class(game: &Game, kind: Kind, max_level: Option<usize>, what: &str) -> Result<usize> {
    let c = game.classify()?;
    if c.kind != kind || max_level.is_some_and(|l| c.level > l) {
        return Err(Error::WrongClass(format!("{what} does not apply to a {c} condition")));
    }
    Ok(c.level)
}

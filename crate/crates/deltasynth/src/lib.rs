//! Finite-memory strategy synthesis and verification for concurrent games
//! whose winning condition is a finite-level Δ⁰₂ set presented by a
//! deterministic monitor, optionally with multi-energy counters.
//!
//! The crate is organised bottom-up:
//!
//! * [`game`]: alphabets, histories, lasso plays, decision machines.
//! * [`monitor`] and [`condition`]: monitors, condition expressions, hierarchy
//!   classification and the equivalent representations.
//! * [`order`]: configurations, the winning-set order, Min-sets and winning regions.
//! * [`synthesis`]: the strategy constructions for every supported class.
//! * [`verifier`] and [`counterexample`]: model checking of machines and the
//!   bounded falsification demos for conditions outside the supported classes.
//! * [`format`] and [`cli`]: the game file format and the command-line driver.
//!
//! ```
//! use deltasynth::{catalog, synthesis, verifier};
//!
//! let game = catalog::example10();
//! let machine = synthesis::synth(&game, &Default::default()).unwrap();
//! assert!(verifier::verify_machine(&machine, &game).unwrap().is_winning());
//! ```

pub mod catalog;
pub mod cli;
pub mod condition;
pub mod counterexample;
pub mod error;
pub mod format;
pub mod game;
pub mod gen;
pub mod graph;
pub mod monitor;
pub mod oracle;
pub mod order;
pub mod synthesis;
pub mod verifier;

pub use condition::{ConditionExpr, Game, HierarchyClass, Kind};
pub use error::{Error, Result};
pub use game::{Alphabet, FiniteMemoryMachine, History, Lasso, MachineBuilder, Pair, UltimatelyPeriodicPlay};
pub use monitor::ConditionMonitor;
pub use order::{Configuration, Credit, OrderMode, OrderWitness};
pub use verifier::Verdict;

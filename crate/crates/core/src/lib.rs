//! Throwing-ability evaluation for catchers and outfielders.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`event`] ingests opportunity-grain CSV files into typed records.
//! 2. [`catcher`] and [`outfield`] tabulate the records against league
//!    baselines and turn the surplus of successes and failures into runs
//!    with an [`ExpectedRunsMatrix`] and transition tables from [`run_matrix`].
//! 3. [`model`] fits a hierarchical normal model to the per-season run
//!    values with a Gibbs sampler, producing [`PosteriorDraws`].
//! 4. [`report`] summarizes the draws into posterior means and intervals.
//!
//! [`synth`] generates ledgers from known ground truth and holds the
//! brute-force oracles used by the test suites.

pub mod catcher;
pub mod draws;
mod error;
mod table;
pub mod event;
pub mod ledger;
pub mod model;
pub mod outfield;
pub mod report;
pub mod run_matrix;
pub mod synth;

pub use catcher::{CatcherCell, CatcherTabulation, Counts, LeagueCell};
pub use draws::PosteriorDraws;
pub use error::{Error, Result};
pub use event::{
    AdvanceAttempt, BaseConfig, CatcherOpportunity, CatcherOutcome, GameState,
    OutfieldOpportunity, OutfieldOutcome, PlayerSeasonKey, Season, StealAttempt, StealCategory,
    StealSituation,
};
pub use ledger::{RunValueEntry, RunValueLedger};
pub use model::{HyperParams, ModelData, ModelState, SamplerConfig, ScaledObservation};
pub use outfield::{OutfieldCell, OutfieldTabulation, Zone};
pub use report::PosteriorSummary;
pub use run_matrix::{CatcherTransitions, ExpectedRunsMatrix, OutfieldTransitions, RunTables};

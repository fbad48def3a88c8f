//! Expected Runs Matrix and the transition tables that map a throwing
//! outcome to the resulting base/out state.
//!
//! Every run delta is credited to the fielder as `R(start) - R(result)`:
//! positive when the play lowers the batting team's run expectancy.

use std::collections::BTreeMap;
use std::io::Read;

use log::warn;

use crate::event::{
    outfield_eligible, AdvanceAttempt, BaseConfig, GameState, StealAttempt, StealCategory,
    StealSituation,
};
use crate::table::read_rows;
use crate::{Error, Result};

const REFERENCE_MATRIX: &str = include_str!("../data/run_matrix.csv");
const REFERENCE_CATCHER: &str = include_str!("../data/transitions_catcher.csv");
const REFERENCE_OUTFIELD: &str = include_str!("../data/transitions_outfield.csv");

pub const MATRIX_HEADER: &[&str] = &["base_state", "outs", "expected_runs"];
pub const CATCHER_TRANSITION_HEADER: &[&str] =
    &["situation", "outcome", "result_base_state", "outs_delta"];
pub const OUTFIELD_TRANSITION_HEADER: &[&str] =
    &["base_state", "hit", "outcome", "result_base_state", "outs_delta"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRunsMatrix {
    values: [f64; 24],
}

impl ExpectedRunsMatrix {
    pub fn from_fn(mut f: impl FnMut(GameState) -> f64) -> Result<Self> {
        let mut values = [0.0; 24];
        for state in GameState::all() {
            let v = f(state);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Matrix(format!("invalid expected runs {v} for {state}")));
            }
            values[state.index()] = v;
        }
        Ok(ExpectedRunsMatrix { values })
    }

    /// The same value in all 24 states.
    pub fn constant(value: f64) -> Result<Self> {
        Self::from_fn(|_| value)
    }

    /// The bundled reference matrix.
    pub fn reference() -> Self {
        load_matrix(REFERENCE_MATRIX.as_bytes()).expect("bundled matrix is valid")
    }

    pub fn get(&self, state: GameState) -> f64 {
        self.values[state.index()]
    }

    /// Expected runs for `bases` with `outs` outs; zero once the inning is over.
    pub fn value(&self, bases: BaseConfig, outs: u8) -> f64 {
        if outs >= 3 {
            0.0
        } else {
            self.values[GameState { bases, outs }.index()]
        }
    }

    /// Base states whose expected runs increase with an additional out.
    pub fn monotonicity_violations(&self) -> Vec<(BaseConfig, u8)> {
        let mut out = Vec::new();
        for bases in BaseConfig::ALL {
            for outs in 0..2u8 {
                if self.value(bases, outs + 1) > self.value(bases, outs) {
                    out.push((bases, outs));
                }
            }
        }
        out
    }
}

pub fn load_matrix<R: Read>(source: R) -> Result<ExpectedRunsMatrix> {
    let mut seen: BTreeMap<GameState, f64> = BTreeMap::new();
    for row in read_rows(source, MATRIX_HEADER)? {
        let code = row.field("base_state");
        let bases = BaseConfig::from_code(code)
            .ok_or_else(|| row.error("base_state", format!("unknown base state `{code}`")))?;
        let outs: u8 = row.parse("outs")?;
        let state = GameState::new(bases, outs).map_err(|e| row.error("outs", e.to_string()))?;
        let runs: f64 = row.parse("expected_runs")?;
        if !runs.is_finite() || runs < 0.0 {
            return Err(Error::Matrix(format!(
                "line {}: negative or non-finite value {runs} for {state}",
                row.line
            )));
        }
        if seen.insert(state, runs).is_some() {
            return Err(Error::Matrix(format!(
                "line {}: duplicate state {state}",
                row.line
            )));
        }
    }
    if let Some(missing) = GameState::all().find(|s| !seen.contains_key(s)) {
        return Err(Error::Matrix(format!("missing state {missing}")));
    }
    let matrix = ExpectedRunsMatrix::from_fn(|s| seen[&s])?;
    for (bases, outs) in matrix.monotonicity_violations() {
        warn!(
            "expected runs for {bases} increase from {outs} to {} outs",
            outs + 1
        );
    }
    Ok(matrix)
}

/// Resulting base configuration and number of outs added by a play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub bases: BaseConfig,
    pub outs_delta: u8,
}

impl Transition {
    fn parse(code: &str, delta: u8) -> Option<Self> {
        Some(Transition {
            bases: BaseConfig::from_code(code)?,
            outs_delta: delta,
        })
    }
}

fn steal_code(outcome: StealAttempt) -> &'static str {
    match outcome {
        StealAttempt::Stolen => "SB",
        StealAttempt::Caught => "CS",
    }
}

fn advance_code(outcome: AdvanceAttempt) -> &'static str {
    match outcome {
        AdvanceAttempt::ThrownOut => "THROWN_OUT",
        AdvanceAttempt::Advanced => "ADVANCED",
    }
}

/// Steal category × attempt result → resulting state.
#[derive(Debug, Clone, PartialEq)]
pub struct CatcherTransitions {
    table: BTreeMap<(StealCategory, StealAttempt), Transition>,
}

impl CatcherTransitions {
    pub fn reference() -> Self {
        load_catcher_transitions(REFERENCE_CATCHER.as_bytes()).expect("bundled table is valid")
    }

    pub fn get(&self, category: StealCategory, outcome: StealAttempt) -> Transition {
        self.table[&(category, outcome)]
    }

    /// Resulting `(bases, outs)`; `outs` may be 3.
    pub fn result(&self, situation: StealSituation, outcome: StealAttempt) -> (BaseConfig, u8) {
        let t = self.get(situation.category, outcome);
        (t.bases, situation.outs + t.outs_delta)
    }
}

fn check_catcher_transition(
    category: StealCategory,
    outcome: StealAttempt,
    t: Transition,
) -> Result<()> {
    let start = category.bases();
    let ok = match outcome {
        StealAttempt::Stolen => t.outs_delta == 0,
        StealAttempt::Caught => {
            t.outs_delta == 1 && t.bases.runners() + 1 == start.runners()
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Transition(format!(
            "{category} {}: result {} with +{} outs is not a valid {}",
            steal_code(outcome),
            t.bases,
            t.outs_delta,
            match outcome {
                StealAttempt::Stolen => "stolen base (outs must not change)",
                StealAttempt::Caught => "caught stealing (one runner out, +1 out)",
            }
        )))
    }
}

pub fn load_catcher_transitions<R: Read>(source: R) -> Result<CatcherTransitions> {
    let mut table = BTreeMap::new();
    for row in read_rows(source, CATCHER_TRANSITION_HEADER)? {
        let code = row.field("situation");
        let category = StealCategory::from_code(code)
            .ok_or_else(|| row.error("situation", format!("unknown situation code `{code}`")))?;
        let outcome = match row.field("outcome") {
            "SB" => StealAttempt::Stolen,
            "CS" => StealAttempt::Caught,
            other => return Err(row.error("outcome", format!("expected SB or CS, found `{other}`"))),
        };
        let delta: u8 = row.parse("outs_delta")?;
        let code = row.field("result_base_state");
        let t = Transition::parse(code, delta)
            .ok_or_else(|| row.error("result_base_state", format!("unknown base state `{code}`")))?;
        check_catcher_transition(category, outcome, t)?;
        if table.insert((category, outcome), t).is_some() {
            return Err(Error::Transition(format!(
                "line {}: duplicate entry for {category} {}",
                row.line,
                steal_code(outcome)
            )));
        }
    }
    for category in StealCategory::ALL {
        for outcome in [StealAttempt::Stolen, StealAttempt::Caught] {
            if !table.contains_key(&(category, outcome)) {
                return Err(Error::Transition(format!(
                    "missing entry for {category} {}",
                    steal_code(outcome)
                )));
            }
        }
    }
    Ok(CatcherTransitions { table })
}

/// Base configuration × hit flag × attempt result → resulting state.
#[derive(Debug, Clone, PartialEq)]
pub struct OutfieldTransitions {
    table: BTreeMap<(BaseConfig, bool, AdvanceAttempt), Transition>,
}

/// `(bases, hit)` pairs that can be an outfield opportunity with some out count.
pub fn outfield_categories() -> impl Iterator<Item = (BaseConfig, bool)> {
    [true, false].into_iter().flat_map(|hit| {
        BaseConfig::ALL
            .into_iter()
            .filter(move |&b| outfield_eligible(b, 0, hit))
            .map(move |b| (b, hit))
    })
}

impl OutfieldTransitions {
    pub fn reference() -> Self {
        load_outfield_transitions(REFERENCE_OUTFIELD.as_bytes()).expect("bundled table is valid")
    }

    pub fn get(&self, bases: BaseConfig, hit: bool, outcome: AdvanceAttempt) -> Option<Transition> {
        self.table.get(&(bases, hit, outcome)).copied()
    }

    /// Resulting `(bases, outs)` for an eligible start state; `outs` may be 3.
    pub fn result(
        &self,
        start: GameState,
        hit: bool,
        outcome: AdvanceAttempt,
    ) -> Result<(BaseConfig, u8)> {
        if !outfield_eligible(start.bases, start.outs, hit) {
            return Err(Error::InvalidArgument(format!(
                "{} from {start} is not an outfield throwing opportunity",
                if hit { "hit" } else { "out" }
            )));
        }
        let t = self
            .get(start.bases, hit, outcome)
            .expect("table is total over eligible categories");
        Ok((t.bases, start.outs + t.outs_delta))
    }
}

pub fn load_outfield_transitions<R: Read>(source: R) -> Result<OutfieldTransitions> {
    let mut table = BTreeMap::new();
    for row in read_rows(source, OUTFIELD_TRANSITION_HEADER)? {
        let code = row.field("base_state");
        let bases = BaseConfig::from_code(code)
            .ok_or_else(|| row.error("base_state", format!("unknown base state `{code}`")))?;
        let hit = match row.field("hit") {
            "1" => true,
            "0" => false,
            other => return Err(row.error("hit", format!("expected 0 or 1, found `{other}`"))),
        };
        if !outfield_eligible(bases, 0, hit) {
            return Err(row.error(
                "base_state",
                format!("{bases} is never an opportunity with hit={}", hit as u8),
            ));
        }
        let outcome = match row.field("outcome") {
            "THROWN_OUT" => AdvanceAttempt::ThrownOut,
            "ADVANCED" => AdvanceAttempt::Advanced,
            other => {
                return Err(row.error(
                    "outcome",
                    format!("expected THROWN_OUT or ADVANCED, found `{other}`"),
                ))
            }
        };
        let delta: u8 = row.parse("outs_delta")?;
        let expected_delta = match outcome {
            AdvanceAttempt::ThrownOut => 1,
            AdvanceAttempt::Advanced => 0,
        };
        if delta != expected_delta {
            return Err(row.error(
                "outs_delta",
                format!("{} must add {expected_delta} outs", advance_code(outcome)),
            ));
        }
        let code = row.field("result_base_state");
        let t = Transition::parse(code, delta)
            .ok_or_else(|| row.error("result_base_state", format!("unknown base state `{code}`")))?;
        if table.insert((bases, hit, outcome), t).is_some() {
            return Err(Error::Transition(format!(
                "line {}: duplicate entry for {bases} hit={} {}",
                row.line,
                hit as u8,
                advance_code(outcome)
            )));
        }
    }
    for (bases, hit) in outfield_categories() {
        for outcome in [AdvanceAttempt::ThrownOut, AdvanceAttempt::Advanced] {
            if !table.contains_key(&(bases, hit, outcome)) {
                return Err(Error::Transition(format!(
                    "missing entry for {bases} hit={} {}",
                    hit as u8,
                    advance_code(outcome)
                )));
            }
        }
    }
    Ok(OutfieldTransitions { table })
}

/// Runs credited to the catcher for one steal attempt in `situation`.
pub fn delta_runs_catcher(
    situation: StealSituation,
    outcome: StealAttempt,
    matrix: &ExpectedRunsMatrix,
    table: &CatcherTransitions,
) -> f64 {
    let (bases, outs) = table.result(situation, outcome);
    matrix.get(situation.game_state()) - matrix.value(bases, outs)
}

/// Runs credited to the outfielder for one advance attempt.
pub fn delta_runs_outfield(
    start: GameState,
    hit: bool,
    outcome: AdvanceAttempt,
    matrix: &ExpectedRunsMatrix,
    table: &OutfieldTransitions,
) -> Result<f64> {
    let (bases, outs) = table.result(start, hit, outcome)?;
    Ok(matrix.get(start) - matrix.value(bases, outs))
}

/// A matrix together with both transition tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTables {
    pub matrix: ExpectedRunsMatrix,
    pub catcher: CatcherTransitions,
    pub outfield: OutfieldTransitions,
}

impl RunTables {
    pub fn reference() -> Self {
        RunTables {
            matrix: ExpectedRunsMatrix::reference(),
            catcher: CatcherTransitions::reference(),
            outfield: OutfieldTransitions::reference(),
        }
    }

    pub fn with_matrix(matrix: ExpectedRunsMatrix) -> Self {
        RunTables {
            matrix,
            ..Self::reference()
        }
    }
}

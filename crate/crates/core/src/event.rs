//! Game situations, opportunity records, and the opportunity CSV formats.
//!
//! Input files are already at opportunity grain: one row per throwing
//! opportunity. Identical rows are legal and counted separately.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::table::{read_rows, Row};
use crate::{Error, Result};

pub type Season = u16;

/// Occupancy of first, second and third base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseConfig {
    pub first: bool,
    pub second: bool,
    pub third: bool,
}

impl BaseConfig {
    pub const EMPTY: BaseConfig = BaseConfig::new(false, false, false);

    /// All eight configurations in index order.
    pub const ALL: [BaseConfig; 8] = [
        BaseConfig::new(false, false, false),
        BaseConfig::new(true, false, false),
        BaseConfig::new(false, true, false),
        BaseConfig::new(false, false, true),
        BaseConfig::new(true, true, false),
        BaseConfig::new(true, false, true),
        BaseConfig::new(false, true, true),
        BaseConfig::new(true, true, true),
    ];

    pub const fn new(first: bool, second: bool, third: bool) -> Self {
        BaseConfig {
            first,
            second,
            third,
        }
    }

    /// Position in [`BaseConfig::ALL`].
    pub fn index(self) -> usize {
        match (self.first, self.second, self.third) {
            (false, false, false) => 0,
            (true, false, false) => 1,
            (false, true, false) => 2,
            (false, false, true) => 3,
            (true, true, false) => 4,
            (true, false, true) => 5,
            (false, true, true) => 6,
            (true, true, true) => 7,
        }
    }

    pub fn runners(self) -> u8 {
        self.first as u8 + self.second as u8 + self.third as u8
    }

    /// The 3-character code, e.g. `1-3`.
    pub fn code(self) -> String {
        let mut s = String::with_capacity(3);
        s.push(if self.first { '1' } else { '-' });
        s.push(if self.second { '2' } else { '-' });
        s.push(if self.third { '3' } else { '-' });
        s
    }

    pub fn from_code(code: &str) -> Option<Self> {
        let b = code.as_bytes();
        if b.len() != 3 {
            return None;
        }
        let slot = |c: u8, occupied: u8| match c {
            b'-' => Some(false),
            c if c == occupied => Some(true),
            _ => None,
        };
        Some(BaseConfig::new(
            slot(b[0], b'1')?,
            slot(b[1], b'2')?,
            slot(b[2], b'3')?,
        ))
    }
}

impl fmt::Display for BaseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl FromStr for BaseConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseConfig::from_code(s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown base state `{s}`")))
    }
}

/// A non-terminal base/out state. Three-out states are never represented;
/// lookups past the third out resolve to zero expected runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameState {
    pub bases: BaseConfig,
    pub outs: u8,
}

impl GameState {
    pub fn new(bases: BaseConfig, outs: u8) -> Result<Self> {
        if outs > 2 {
            return Err(Error::InvalidArgument(format!(
                "outs out of range: {outs}"
            )));
        }
        Ok(GameState { bases, outs })
    }

    /// Row index into a 24-entry matrix.
    pub fn index(self) -> usize {
        self.bases.index() * 3 + self.outs as usize
    }

    pub fn all() -> impl Iterator<Item = GameState> {
        BaseConfig::ALL
            .into_iter()
            .flat_map(|bases| (0..3).map(move |outs| GameState { bases, outs }))
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.bases, self.outs)
    }
}

/// Base configurations in which a steal opportunity exists. The two
/// first-and-second categories track the lead and the trailing runner of a
/// potential double steal separately. Steals of home are not tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StealCategory {
    R1,
    R2,
    R13,
    R12Lead,
    R12Trail,
}

impl StealCategory {
    pub const ALL: [StealCategory; 5] = [
        StealCategory::R1,
        StealCategory::R2,
        StealCategory::R13,
        StealCategory::R12Lead,
        StealCategory::R12Trail,
    ];

    pub fn code(self) -> &'static str {
        match self {
            StealCategory::R1 => "R1",
            StealCategory::R2 => "R2",
            StealCategory::R13 => "R13",
            StealCategory::R12Lead => "R12L",
            StealCategory::R12Trail => "R12T",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        StealCategory::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn bases(self) -> BaseConfig {
        match self {
            StealCategory::R1 => BaseConfig::new(true, false, false),
            StealCategory::R2 => BaseConfig::new(false, true, false),
            StealCategory::R13 => BaseConfig::new(true, false, true),
            StealCategory::R12Lead | StealCategory::R12Trail => BaseConfig::new(true, true, false),
        }
    }
}

impl fmt::Display for StealCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One of the fifteen steal situations: category × outs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StealSituation {
    pub category: StealCategory,
    pub outs: u8,
}

impl StealSituation {
    pub fn new(category: StealCategory, outs: u8) -> Result<Self> {
        if outs > 2 {
            return Err(Error::InvalidArgument(format!(
                "outs out of range: {outs}"
            )));
        }
        Ok(StealSituation { category, outs })
    }

    pub fn all() -> impl Iterator<Item = StealSituation> {
        StealCategory::ALL
            .into_iter()
            .flat_map(|category| (0..3).map(move |outs| StealSituation { category, outs }))
    }

    /// Dense index in `0..15`.
    pub fn index(self) -> usize {
        self.category.index() * 3 + self.outs as usize
    }

    pub fn game_state(self) -> GameState {
        GameState {
            bases: self.category.bases(),
            outs: self.outs,
        }
    }
}

impl fmt::Display for StealSituation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.category, self.outs)
    }
}

/// Result of a steal attempt, from the runner's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StealAttempt {
    Stolen,
    Caught,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatcherOutcome {
    NoAttempt,
    StolenBase,
    CaughtStealing,
}

impl CatcherOutcome {
    pub fn code(self) -> &'static str {
        match self {
            CatcherOutcome::NoAttempt => "NONE",
            CatcherOutcome::StolenBase => "SB",
            CatcherOutcome::CaughtStealing => "CS",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "NONE" => Some(CatcherOutcome::NoAttempt),
            "SB" => Some(CatcherOutcome::StolenBase),
            "CS" => Some(CatcherOutcome::CaughtStealing),
            _ => None,
        }
    }

    pub fn attempt(self) -> Option<StealAttempt> {
        match self {
            CatcherOutcome::NoAttempt => None,
            CatcherOutcome::StolenBase => Some(StealAttempt::Stolen),
            CatcherOutcome::CaughtStealing => Some(StealAttempt::Caught),
        }
    }
}

/// Result of an extra-base opportunity on a ball in play to the outfield.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdvanceAttempt {
    ThrownOut,
    Advanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutfieldOutcome {
    Hold,
    RunnerThrownOut,
    RunnerAdvanced,
}

impl OutfieldOutcome {
    pub fn code(self) -> &'static str {
        match self {
            OutfieldOutcome::Hold => "HOLD",
            OutfieldOutcome::RunnerThrownOut => "THROWN_OUT",
            OutfieldOutcome::RunnerAdvanced => "ADVANCED",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "HOLD" => Some(OutfieldOutcome::Hold),
            "THROWN_OUT" => Some(OutfieldOutcome::RunnerThrownOut),
            "ADVANCED" => Some(OutfieldOutcome::RunnerAdvanced),
            _ => None,
        }
    }

    pub fn attempt(self) -> Option<AdvanceAttempt> {
        match self {
            OutfieldOutcome::Hold => None,
            OutfieldOutcome::RunnerThrownOut => Some(AdvanceAttempt::ThrownOut),
            OutfieldOutcome::RunnerAdvanced => Some(AdvanceAttempt::Advanced),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerSeasonKey {
    pub player_id: String,
    pub season: Season,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatcherOpportunity {
    pub season: Season,
    pub catcher_id: String,
    pub situation: StealSituation,
    pub outcome: CatcherOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutfieldOpportunity {
    pub season: Season,
    pub fielder_id: String,
    pub start_state: GameState,
    /// True for a hit, false for a caught ball.
    pub hit: bool,
    /// Lateral feet from home plate, negative toward the left-field line.
    pub bip_x: f64,
    /// Depth in feet from home plate.
    pub bip_y: f64,
    pub outcome: OutfieldOutcome,
}

/// Whether `(bases, outs, hit)` is a throwing opportunity for an outfielder.
///
/// A hit qualifies with a runner on first or second; a runner on third
/// alone is assumed to score. A caught ball qualifies with a runner on
/// second or third when it is not the third out. Runners on first never
/// advance on a caught ball.
pub fn outfield_eligible(bases: BaseConfig, outs: u8, hit: bool) -> bool {
    if hit {
        bases.first || bases.second
    } else {
        (bases.second || bases.third) && outs < 2
    }
}

/// Common view of both record kinds for ledger validation.
pub trait OpportunityRecord {
    fn season(&self) -> Season;
    fn player_id(&self) -> &str;
    fn violations(&self) -> Vec<String>;
}

impl OpportunityRecord for CatcherOpportunity {
    fn season(&self) -> Season {
        self.season
    }

    fn player_id(&self) -> &str {
        &self.catcher_id
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.catcher_id.is_empty() {
            out.push("empty catcher_id".to_string());
        }
        if self.situation.outs > 2 {
            out.push(format!("outs out of range: {}", self.situation.outs));
        }
        out
    }
}

impl OpportunityRecord for OutfieldOpportunity {
    fn season(&self) -> Season {
        self.season
    }

    fn player_id(&self) -> &str {
        &self.fielder_id
    }

    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.fielder_id.is_empty() {
            out.push("empty fielder_id".to_string());
        }
        if self.start_state.outs > 2 {
            out.push(format!("outs out of range: {}", self.start_state.outs));
        } else if !outfield_eligible(self.start_state.bases, self.start_state.outs, self.hit) {
            out.push(format!(
                "ineligible opportunity: {} {} with {} outs",
                if self.hit { "hit" } else { "out" },
                self.start_state.bases,
                self.start_state.outs
            ));
        }
        if !self.bip_x.is_finite() || !self.bip_y.is_finite() {
            out.push("non-finite ball-in-play coordinate".to_string());
        } else if self.bip_y < 0.0 {
            out.push(format!("negative bip_y: {}", self.bip_y));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub records: usize,
    pub per_season: BTreeMap<Season, usize>,
    pub per_player: BTreeMap<String, usize>,
    /// `(record index, message)` for each violated invariant.
    pub violations: Vec<(usize, String)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_ledger<R: OpportunityRecord>(records: &[R]) -> ValidationReport {
    let mut report = ValidationReport {
        records: records.len(),
        ..Default::default()
    };
    for (idx, record) in records.iter().enumerate() {
        *report.per_season.entry(record.season()).or_default() += 1;
        *report
            .per_player
            .entry(record.player_id().to_string())
            .or_default() += 1;
        report
            .violations
            .extend(record.violations().into_iter().map(|v| (idx, v)));
    }
    report
}

pub const CATCHER_HEADER: &[&str] = &["season", "catcher_id", "situation", "outs", "outcome"];
pub const OUTFIELD_HEADER: &[&str] = &[
    "season",
    "fielder_id",
    "base_state",
    "outs",
    "hit",
    "bip_x",
    "bip_y",
    "outcome",
];

fn parse_outs(row: &Row) -> Result<u8> {
    let outs: u8 = row.parse("outs")?;
    if outs > 2 {
        return Err(row.error("outs", format!("outs out of range: {outs}")));
    }
    Ok(outs)
}

fn parse_player(row: &Row, field: &str) -> Result<String> {
    let id = row.field(field);
    if id.is_empty() {
        return Err(row.error(field, "empty player identifier"));
    }
    Ok(id.to_string())
}

pub fn parse_catcher_opportunities<R: Read>(source: R) -> Result<Vec<CatcherOpportunity>> {
    read_rows(source, CATCHER_HEADER)?
        .iter()
        .map(|row| {
            let season = row.parse("season")?;
            let catcher_id = parse_player(row, "catcher_id")?;
            let code = row.field("situation");
            let category = StealCategory::from_code(code)
                .ok_or_else(|| row.error("situation", format!("unknown situation code `{code}`")))?;
            let outs = parse_outs(row)?;
            let code = row.field("outcome");
            let outcome = CatcherOutcome::from_code(code)
                .ok_or_else(|| row.error("outcome", format!("unknown outcome code `{code}`")))?;
            Ok(CatcherOpportunity {
                season,
                catcher_id,
                situation: StealSituation { category, outs },
                outcome,
            })
        })
        .collect()
}

pub fn parse_outfield_opportunities<R: Read>(source: R) -> Result<Vec<OutfieldOpportunity>> {
    read_rows(source, OUTFIELD_HEADER)?
        .iter()
        .map(|row| {
            let season = row.parse("season")?;
            let fielder_id = parse_player(row, "fielder_id")?;
            let code = row.field("base_state");
            let bases = BaseConfig::from_code(code)
                .ok_or_else(|| row.error("base_state", format!("unknown base state `{code}`")))?;
            let outs = parse_outs(row)?;
            let hit = match row.field("hit") {
                "1" => true,
                "0" => false,
                other => return Err(row.error("hit", format!("expected 0 or 1, found `{other}`"))),
            };
            let bip_x: f64 = row.parse("bip_x")?;
            let bip_y: f64 = row.parse("bip_y")?;
            if !bip_x.is_finite() {
                return Err(row.error("bip_x", "non-finite coordinate"));
            }
            if !bip_y.is_finite() || bip_y < 0.0 {
                return Err(row.error("bip_y", format!("invalid depth `{bip_y}`")));
            }
            let code = row.field("outcome");
            let outcome = OutfieldOutcome::from_code(code)
                .ok_or_else(|| row.error("outcome", format!("unknown outcome code `{code}`")))?;
            if !outfield_eligible(bases, outs, hit) {
                return Err(row.error(
                    "base_state",
                    format!(
                        "ineligible opportunity: {} with base state {bases} and {outs} outs",
                        if hit { "hit" } else { "out" }
                    ),
                ));
            }
            Ok(OutfieldOpportunity {
                season,
                fielder_id,
                start_state: GameState { bases, outs },
                hit,
                bip_x,
                bip_y,
                outcome,
            })
        })
        .collect()
}

pub fn write_catcher_opportunities<W: Write>(
    mut out: W,
    records: &[CatcherOpportunity],
) -> Result<()> {
    writeln!(out, "{}", CATCHER_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.season,
            r.catcher_id,
            r.situation.category,
            r.situation.outs,
            r.outcome.code()
        )?;
    }
    Ok(())
}

pub fn write_outfield_opportunities<W: Write>(
    mut out: W,
    records: &[OutfieldOpportunity],
) -> Result<()> {
    writeln!(out, "{}", OUTFIELD_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{:?},{:?},{}",
            r.season,
            r.fielder_id,
            r.start_state.bases,
            r.start_state.outs,
            r.hit as u8,
            r.bip_x,
            r.bip_y,
            r.outcome.code()
        )?;
    }
    Ok(())
}

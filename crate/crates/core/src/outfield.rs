//! Outfield throwing opportunities: zone assignment, tabulation and run
//! values.
//!
//! Opportunities are grouped by fielder, season, 12 ft × 10 ft zone, start
//! state and hit flag. The start state includes the out count, since the
//! run deltas of a thrown-out or advancing runner depend on it. Holds add
//! to the opportunity count only and act through the expected counts.

use std::collections::BTreeMap;
use std::io::Write;

use log::warn;

use crate::event::{AdvanceAttempt, GameState, OutfieldOpportunity, OutfieldOutcome, Season};
use crate::ledger::{RunValueEntry, RunValueLedger};
use crate::run_matrix::{delta_runs_outfield, ExpectedRunsMatrix, OutfieldTransitions};
use crate::{Error, Result};

pub const ZONE_WIDTH_FT: f64 = 12.0;
pub const ZONE_DEPTH_FT: f64 = 10.0;

/// Grid cell of the outfield surface. Intervals are `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Zone {
    pub x: i32,
    pub y: i32,
}

pub fn assign_zone(bip_x: f64, bip_y: f64) -> Result<Zone> {
    if !bip_x.is_finite() || !bip_y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "non-finite ball-in-play location ({bip_x}, {bip_y})"
        )));
    }
    if bip_y < 0.0 {
        return Err(Error::InvalidArgument(format!("negative depth {bip_y}")));
    }
    Ok(Zone {
        x: (bip_x / ZONE_WIDTH_FT).floor() as i32,
        y: (bip_y / ZONE_DEPTH_FT).floor() as i32,
    })
}

/// Opportunities, runners thrown out, runners advanced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutfieldCounts {
    pub n: u64,
    pub s: u64,
    pub f: u64,
}

impl OutfieldCounts {
    fn record(&mut self, outcome: OutfieldOutcome) {
        self.n += 1;
        match outcome {
            OutfieldOutcome::Hold => {}
            OutfieldOutcome::RunnerThrownOut => self.s += 1,
            OutfieldOutcome::RunnerAdvanced => self.f += 1,
        }
    }
}

/// Situation shared by a player cell and its league cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutfieldCategory {
    pub zone: Zone,
    pub start: GameState,
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutfieldCell {
    pub player_id: String,
    pub season: Season,
    pub category: OutfieldCategory,
    pub counts: OutfieldCounts,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutfieldTabulation {
    cells: BTreeMap<(String, Season, OutfieldCategory), OutfieldCounts>,
    league: BTreeMap<(Season, OutfieldCategory), OutfieldCounts>,
}

impl OutfieldTabulation {
    pub fn cells(&self) -> impl Iterator<Item = OutfieldCell> + '_ {
        self.cells.iter().map(|((p, season, category), counts)| OutfieldCell {
            player_id: p.clone(),
            season: *season,
            category: *category,
            counts: *counts,
        })
    }

    pub fn league(&self, season: Season, category: OutfieldCategory) -> Option<OutfieldCounts> {
        self.league.get(&(season, category)).copied()
    }

    pub fn league_cells(
        &self,
    ) -> impl Iterator<Item = (Season, OutfieldCategory, OutfieldCounts)> + '_ {
        self.league.iter().map(|((s, c), k)| (*s, *c, *k))
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

pub fn tabulate_outfield(records: &[OutfieldOpportunity]) -> Result<OutfieldTabulation> {
    let mut tab = OutfieldTabulation::default();
    for r in records {
        let category = OutfieldCategory {
            zone: assign_zone(r.bip_x, r.bip_y)?,
            start: r.start_state,
            hit: r.hit,
        };
        tab.cells
            .entry((r.fielder_id.clone(), r.season, category))
            .or_default()
            .record(r.outcome);
        tab.league
            .entry((r.season, category))
            .or_default()
            .record(r.outcome);
    }
    Ok(tab)
}

/// Expected thrown-out and advanced counts for `n` opportunities at the
/// league's rates. `None` when the league has no opportunities.
pub fn expected_outfield_counts(n: u64, league: &OutfieldCounts) -> Option<(f64, f64)> {
    if league.n == 0 {
        return None;
    }
    let n = n as f64;
    let total = league.n as f64;
    Some((n * league.s as f64 / total, n * league.f as f64 / total))
}

/// Per fielder-season run value over all zones, start states and hit flags.
pub fn outfield_run_value(
    tab: &OutfieldTabulation,
    matrix: &ExpectedRunsMatrix,
    table: &OutfieldTransitions,
) -> Result<RunValueLedger> {
    let mut totals: BTreeMap<(String, Season), (u64, f64)> = BTreeMap::new();
    for ((player, season, cat), counts) in &tab.cells {
        let league = &tab.league[&(*season, *cat)];
        let Some((exp_s, exp_f)) = expected_outfield_counts(counts.n, league) else {
            warn!("no league opportunities in {season} {cat:?}; skipped");
            continue;
        };
        let delta_out = delta_runs_outfield(cat.start, cat.hit, AdvanceAttempt::ThrownOut, matrix, table)?;
        let delta_adv = delta_runs_outfield(cat.start, cat.hit, AdvanceAttempt::Advanced, matrix, table)?;
        let value = (counts.s as f64 - exp_s) * delta_out + (counts.f as f64 - exp_f) * delta_adv;
        let t = totals.entry((player.clone(), *season)).or_default();
        t.0 += counts.n;
        t.1 += value;
    }
    let entries = totals
        .into_iter()
        .filter(|(_, (n, _))| *n > 0)
        .map(|((player_id, season), (n, x))| RunValueEntry {
            player_id,
            season,
            n_opportunities: n,
            run_value: x,
        })
        .collect();
    RunValueLedger::new(entries)
}

pub const CELLS_HEADER: &str = "player_id,season,zone_x,zone_y,base_state,outs,hit,n,s,f";

pub fn write_cells<W: Write>(mut out: W, tab: &OutfieldTabulation) -> Result<()> {
    writeln!(out, "{CELLS_HEADER}")?;
    for c in tab.cells() {
        let cat = c.category;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.player_id,
            c.season,
            cat.zone.x,
            cat.zone.y,
            cat.start.bases,
            cat.start.outs,
            cat.hit as u8,
            c.counts.n,
            c.counts.s,
            c.counts.f
        )?;
    }
    Ok(())
}

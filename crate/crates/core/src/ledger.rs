//! Per-player, per-season run values: the hand-off between the tabulation
//! stages and the hierarchical model.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::event::{PlayerSeasonKey, Season};
use crate::table::read_rows;
use crate::{Error, Result};

pub const LEDGER_HEADER: &[&str] = &["player_id", "season", "n_opportunities", "run_value"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunValueEntry {
    pub player_id: String,
    pub season: Season,
    pub n_opportunities: u64,
    pub run_value: f64,
}

impl RunValueEntry {
    pub fn key(&self) -> PlayerSeasonKey {
        PlayerSeasonKey {
            player_id: self.player_id.clone(),
            season: self.season,
        }
    }
}

/// Entries are unique per (player, season).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunValueLedger {
    entries: Vec<RunValueEntry>,
}

impl RunValueLedger {
    pub fn new(entries: Vec<RunValueEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.key()) {
                return Err(Error::Ledger(format!(
                    "duplicate entry for player {} season {}",
                    e.player_id, e.season
                )));
            }
            if !e.run_value.is_finite() {
                return Err(Error::Ledger(format!(
                    "non-finite run value for player {} season {}",
                    e.player_id, e.season
                )));
            }
        }
        Ok(RunValueLedger { entries })
    }

    pub fn entries(&self) -> &[RunValueEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct players in order of first appearance.
    pub fn players(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.entries
            .iter()
            .filter(|e| seen.insert(e.player_id.as_str()))
            .map(|e| e.player_id.as_str())
            .collect()
    }

    pub fn for_player<'a>(&'a self, player_id: &'a str) -> impl Iterator<Item = &'a RunValueEntry> {
        self.entries.iter().filter(move |e| e.player_id == player_id)
    }

    /// Mean opportunities per player-season.
    pub fn mean_opportunities(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let total: f64 = self.entries.iter().map(|e| e.n_opportunities as f64).sum();
        Some(total / self.entries.len() as f64)
    }
}

pub fn read_ledger<R: Read>(source: R) -> Result<RunValueLedger> {
    let entries = read_rows(source, LEDGER_HEADER)?
        .iter()
        .map(|row| {
            let player_id = row.field("player_id");
            if player_id.is_empty() {
                return Err(row.error("player_id", "empty player identifier"));
            }
            Ok(RunValueEntry {
                player_id: player_id.to_string(),
                season: row.parse("season")?,
                n_opportunities: row.parse("n_opportunities")?,
                run_value: row.parse("run_value")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RunValueLedger::new(entries)
}

pub fn write_ledger<W: Write>(mut out: W, ledger: &RunValueLedger) -> Result<()> {
    writeln!(out, "{}", LEDGER_HEADER.join(","))?;
    for e in ledger.entries() {
        writeln!(
            out,
            "{},{},{},{:?}",
            e.player_id, e.season, e.n_opportunities, e.run_value
        )?;
    }
    Ok(())
}

//! Steal-opportunity tabulation and catcher run values.
//!
//! For each catcher, season and steal situation the observed stolen bases
//! and caught stealings are compared with the counts expected from the
//! league's per-opportunity rates in the same season and situation. The
//! surplus of each is priced with the run delta of the corresponding play.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use log::warn;

use crate::event::{CatcherOpportunity, CatcherOutcome, Season, StealAttempt, StealCategory, StealSituation};
use crate::ledger::{RunValueEntry, RunValueLedger};
use crate::run_matrix::{delta_runs_catcher, CatcherTransitions, ExpectedRunsMatrix};
use crate::table::read_rows;
use crate::Result;

/// Opportunities, attempts, successful steals and caught stealings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub n: u64,
    pub a: u64,
    pub s: u64,
    pub f: u64,
}

impl Counts {
    pub fn record(&mut self, outcome: CatcherOutcome) {
        self.n += 1;
        match outcome {
            CatcherOutcome::NoAttempt => {}
            CatcherOutcome::StolenBase => {
                self.a += 1;
                self.s += 1;
            }
            CatcherOutcome::CaughtStealing => {
                self.a += 1;
                self.f += 1;
            }
        }
    }

    pub fn add(&mut self, other: &Counts) {
        self.n += other.n;
        self.a += other.a;
        self.s += other.s;
        self.f += other.f;
    }

    pub fn is_consistent(&self) -> bool {
        self.a == self.s + self.f && self.a <= self.n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatcherCell {
    pub player_id: String,
    pub season: Season,
    pub situation: StealSituation,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeagueCell {
    pub season: Season,
    pub situation: StealSituation,
    pub counts: Counts,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatcherTabulation {
    cells: BTreeMap<(String, Season, StealSituation), Counts>,
    league: BTreeMap<(Season, StealSituation), Counts>,
}

impl CatcherTabulation {
    /// Builds a tabulation from player cells; league cells are their sums.
    pub fn from_cells(cells: impl IntoIterator<Item = CatcherCell>) -> Self {
        let mut tab = CatcherTabulation::default();
        for c in cells {
            tab.cells
                .entry((c.player_id, c.season, c.situation))
                .or_default()
                .add(&c.counts);
            tab.league
                .entry((c.season, c.situation))
                .or_default()
                .add(&c.counts);
        }
        tab
    }

    /// Player cells ordered by (player, season, situation).
    pub fn cells(&self) -> impl Iterator<Item = CatcherCell> + '_ {
        self.cells.iter().map(|((p, season, situation), counts)| CatcherCell {
            player_id: p.clone(),
            season: *season,
            situation: *situation,
            counts: *counts,
        })
    }

    pub fn league_cells(&self) -> impl Iterator<Item = LeagueCell> + '_ {
        self.league.iter().map(|((season, situation), counts)| LeagueCell {
            season: *season,
            situation: *situation,
            counts: *counts,
        })
    }

    pub fn league(&self, season: Season, situation: StealSituation) -> Option<LeagueCell> {
        self.league.get(&(season, situation)).map(|counts| LeagueCell {
            season,
            situation,
            counts: *counts,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Attempts per opportunity for each catcher, pooled over all seasons.
    pub fn attempt_rates(&self) -> BTreeMap<String, f64> {
        let mut totals: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        for ((p, _, _), c) in &self.cells {
            let t = totals.entry(p.clone()).or_default();
            t.0 += c.a;
            t.1 += c.n;
        }
        totals
            .into_iter()
            .filter(|(_, (_, n))| *n > 0)
            .map(|(p, (a, n))| (p, a as f64 / n as f64))
            .collect()
    }
}

pub fn tabulate(records: &[CatcherOpportunity]) -> CatcherTabulation {
    let mut tab = CatcherTabulation::default();
    for r in records {
        tab.cells
            .entry((r.catcher_id.clone(), r.season, r.situation))
            .or_default()
            .record(r.outcome);
        tab.league
            .entry((r.season, r.situation))
            .or_default()
            .record(r.outcome);
    }
    tab
}

/// Expected stolen bases and caught stealings for `n` opportunities at the
/// league's rates. `None` when the league has no opportunities.
pub fn expected_counts(n: u64, league: &Counts) -> Option<(f64, f64)> {
    if league.n == 0 {
        return None;
    }
    let n = n as f64;
    let total = league.n as f64;
    Some((n * league.s as f64 / total, n * league.f as f64 / total))
}

/// Runs saved in one situation from the caught-stealing and stolen-base
/// surpluses (observed minus expected).
pub fn situation_value(
    caught_surplus: f64,
    stolen_surplus: f64,
    situation: StealSituation,
    matrix: &ExpectedRunsMatrix,
    table: &CatcherTransitions,
) -> f64 {
    caught_surplus * delta_runs_catcher(situation, StealAttempt::Caught, matrix, table)
        + stolen_surplus * delta_runs_catcher(situation, StealAttempt::Stolen, matrix, table)
}

/// One catcher × season × situation term of the run value.
#[derive(Debug, Clone, PartialEq)]
pub struct SituationValue {
    pub player_id: String,
    pub season: Season,
    pub situation: StealSituation,
    pub counts: Counts,
    pub expected_stolen: f64,
    pub expected_caught: f64,
    pub delta_caught: f64,
    pub delta_stolen: f64,
    pub value: f64,
}

pub fn situation_values(
    tab: &CatcherTabulation,
    matrix: &ExpectedRunsMatrix,
    table: &CatcherTransitions,
) -> Vec<SituationValue> {
    let mut out = Vec::with_capacity(tab.cells.len());
    for ((player, season, situation), counts) in &tab.cells {
        let league = &tab.league[&(*season, *situation)];
        let Some((exp_s, exp_f)) = expected_counts(counts.n, league) else {
            warn!("no league opportunities in {season} {situation}; skipped");
            continue;
        };
        let delta_caught = delta_runs_catcher(*situation, StealAttempt::Caught, matrix, table);
        let delta_stolen = delta_runs_catcher(*situation, StealAttempt::Stolen, matrix, table);
        let value = (counts.f as f64 - exp_f) * delta_caught + (counts.s as f64 - exp_s) * delta_stolen;
        out.push(SituationValue {
            player_id: player.clone(),
            season: *season,
            situation: *situation,
            counts: *counts,
            expected_stolen: exp_s,
            expected_caught: exp_f,
            delta_caught,
            delta_stolen,
            value,
        });
    }
    out
}

/// Per catcher-season run value summed over all fifteen situations.
/// Catcher-seasons without opportunities produce no entry.
pub fn catcher_run_value(
    tab: &CatcherTabulation,
    matrix: &ExpectedRunsMatrix,
    table: &CatcherTransitions,
) -> RunValueLedger {
    let mut totals: BTreeMap<(String, Season), (u64, f64)> = BTreeMap::new();
    for sv in situation_values(tab, matrix, table) {
        let t = totals.entry((sv.player_id, sv.season)).or_default();
        t.0 += sv.counts.n;
        t.1 += sv.value;
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
    RunValueLedger::new(entries).expect("keys are unique by construction")
}

pub const CELLS_HEADER: &[&str] = &["player_id", "season", "situation", "outs", "n", "a", "s", "f"];
pub const SITUATION_VALUES_HEADER: &str =
    "player_id,season,situation,outs,n,a,s,f,expected_sb,expected_cs,delta_cs,delta_sb,run_value";

pub fn write_cells<W: Write>(mut out: W, tab: &CatcherTabulation) -> Result<()> {
    writeln!(out, "{}", CELLS_HEADER.join(","))?;
    for c in tab.cells() {
        let k = c.counts;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.player_id, c.season, c.situation.category, c.situation.outs, k.n, k.a, k.s, k.f
        )?;
    }
    Ok(())
}

pub fn read_cells<R: Read>(source: R) -> Result<CatcherTabulation> {
    let cells = read_rows(source, CELLS_HEADER)?
        .iter()
        .map(|row| {
            let code = row.field("situation");
            let category = StealCategory::from_code(code)
                .ok_or_else(|| row.error("situation", format!("unknown situation code `{code}`")))?;
            let outs: u8 = row.parse("outs")?;
            let situation =
                StealSituation::new(category, outs).map_err(|e| row.error("outs", e.to_string()))?;
            let counts = Counts {
                n: row.parse("n")?,
                a: row.parse("a")?,
                s: row.parse("s")?,
                f: row.parse("f")?,
            };
            if !counts.is_consistent() {
                return Err(row.error("a", "counts violate n >= a = s + f"));
            }
            Ok(CatcherCell {
                player_id: row.field("player_id").to_string(),
                season: row.parse("season")?,
                situation,
                counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CatcherTabulation::from_cells(cells))
}

pub fn write_situation_values<W: Write>(mut out: W, values: &[SituationValue]) -> Result<()> {
    writeln!(out, "{SITUATION_VALUES_HEADER}")?;
    for v in values {
        let k = v.counts;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:?},{:?},{:?},{:?},{:?}",
            v.player_id,
            v.season,
            v.situation.category,
            v.situation.outs,
            k.n,
            k.a,
            k.s,
            k.f,
            v.expected_stolen,
            v.expected_caught,
            v.delta_caught,
            v.delta_stolen,
            v.value
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::StealCategory;

    fn opp(id: &str, season: Season, cat: StealCategory, outs: u8, o: CatcherOutcome) -> CatcherOpportunity {
        CatcherOpportunity {
            season,
            catcher_id: id.into(),
            situation: StealSituation::new(cat, outs).unwrap(),
            outcome: o,
        }
    }

    fn r1_0() -> StealSituation {
        StealSituation::new(StealCategory::R1, 0).unwrap()
    }

    #[test]
    fn empty_ledger_gives_empty_cells() {
        let tab = tabulate(&[]);
        assert!(tab.is_empty());
        assert_eq!(tab.league_cells().count(), 0);
    }

    #[test]
    fn single_caught_stealing() {
        let tab = tabulate(&[opp("a", 2002, StealCategory::R1, 0, CatcherOutcome::CaughtStealing)]);
        let cells: Vec<_> = tab.cells().collect();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].counts, Counts { n: 1, a: 1, s: 0, f: 1 });
    }

    #[test]
    fn partition_holds() {
        let outcomes = [
            CatcherOutcome::NoAttempt,
            CatcherOutcome::StolenBase,
            CatcherOutcome::NoAttempt,
            CatcherOutcome::CaughtStealing,
            CatcherOutcome::StolenBase,
        ];
        let recs: Vec<_> = outcomes
            .iter()
            .map(|&o| opp("a", 2002, StealCategory::R2, 1, o))
            .collect();
        let c = tabulate(&recs).cells().next().unwrap().counts;
        assert_eq!(c.n, 2 + c.s + c.f);
        assert_eq!(c.a, c.s + c.f);
        assert_eq!((c.s, c.f), (2, 1));
    }

    #[test]
    fn table_one_expected_counts() {
        let league = Counts { n: 12361, a: 831, s: 519, f: 312 };
        let (es, ef) = expected_counts(241, &league).unwrap();
        assert!((es - 241.0 * 519.0 / 12361.0).abs() < 1e-12);
        assert!((es - 10.12).abs() < 0.005, "{es}");
        assert!((ef - 6.08).abs() < 0.005, "{ef}");
        assert_eq!(expected_counts(0, &league), Some((0.0, 0.0)));
        assert_eq!(expected_counts(5, &Counts::default()), None);
    }

    #[test]
    fn league_rates_give_zero_residuals() {
        let league = Counts { n: 1000, a: 100, s: 70, f: 30 };
        let (es, ef) = expected_counts(100, &league).unwrap();
        assert!((7.0 - es).abs() < 1e-12 && (3.0 - ef).abs() < 1e-12);
    }

    #[test]
    fn worked_situation_value() {
        let m = ExpectedRunsMatrix::reference();
        let t = CatcherTransitions::reference();
        let v = situation_value(4.93, 3.92, r1_0(), &m, &t);
        assert!((v - 2.12).abs() < 0.005, "{v}");
    }

    #[test]
    fn halves_of_league_are_zero() {
        let mut recs = Vec::new();
        for id in ["a", "b"] {
            for _ in 0..40 {
                recs.push(opp(id, 2003, StealCategory::R1, 0, CatcherOutcome::NoAttempt));
            }
            for _ in 0..6 {
                recs.push(opp(id, 2003, StealCategory::R1, 0, CatcherOutcome::StolenBase));
            }
            for _ in 0..3 {
                recs.push(opp(id, 2003, StealCategory::R1, 0, CatcherOutcome::CaughtStealing));
            }
        }
        let ledger = catcher_run_value(
            &tabulate(&recs),
            &ExpectedRunsMatrix::reference(),
            &CatcherTransitions::reference(),
        );
        assert_eq!(ledger.len(), 2);
        for e in ledger.entries() {
            assert!(e.run_value.abs() < 1e-12);
            assert_eq!(e.n_opportunities, 49);
        }
    }

    #[test]
    fn more_opportunities_with_same_outcomes_is_rewarded() {
        // The league's net per-opportunity delta at (R1,0) is negative
        // whenever stolen bases outnumber caught stealings enough; holding
        // S and F fixed, extra non-attempts lower both expectations.
        let league = Counts { n: 1000, a: 100, s: 80, f: 20 };
        let m = ExpectedRunsMatrix::reference();
        let t = CatcherTransitions::reference();
        let net = (league.s as f64 * delta_runs_catcher(r1_0(), StealAttempt::Stolen, &m, &t)
            + league.f as f64 * delta_runs_catcher(r1_0(), StealAttempt::Caught, &m, &t))
            / league.n as f64;
        assert!(net < 0.0);
        let value = |n: u64| {
            let (es, ef) = expected_counts(n, &league).unwrap();
            situation_value(2.0 - ef, 3.0 - es, r1_0(), &m, &t)
        };
        let (es1, ef1) = expected_counts(50, &league).unwrap();
        let (es2, ef2) = expected_counts(60, &league).unwrap();
        assert!(es2 > es1 && ef2 > ef1);
        assert!((es2 / es1 - 60.0 / 50.0).abs() < 1e-12);
        assert!(value(60) > value(50));
    }

    #[test]
    fn attempt_rates_pool_seasons() {
        let recs = vec![
            opp("a", 2002, StealCategory::R1, 0, CatcherOutcome::NoAttempt),
            opp("a", 2002, StealCategory::R1, 0, CatcherOutcome::StolenBase),
            opp("a", 2003, StealCategory::R2, 1, CatcherOutcome::NoAttempt),
            opp("a", 2003, StealCategory::R2, 1, CatcherOutcome::NoAttempt),
        ];
        let rates = tabulate(&recs).attempt_rates();
        assert_eq!(rates["a"], 0.25);
    }

    #[test]
    fn cells_round_trip() {
        let recs = vec![
            opp("a", 2002, StealCategory::R12Lead, 2, CatcherOutcome::CaughtStealing),
            opp("b", 2002, StealCategory::R12Trail, 0, CatcherOutcome::StolenBase),
            opp("b", 2002, StealCategory::R12Trail, 0, CatcherOutcome::NoAttempt),
        ];
        let tab = tabulate(&recs);
        let mut buf = Vec::new();
        write_cells(&mut buf, &tab).unwrap();
        assert_eq!(read_cells(buf.as_slice()).unwrap(), tab);
    }
}

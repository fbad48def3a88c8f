//! Posterior summaries: means, 95% intervals, rescaling to each player's
//! own opportunity volume, rankings and plot data.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use crate::draws::PosteriorDraws;
use crate::ledger::RunValueLedger;
use crate::{Error, Result};

pub const SUMMARY_HEADER: &str = "player_id,mean_scaled,lo_scaled,hi_scaled,avg_opps,mean_individual,lo_individual,hi_individual,significant,attempt_pct";
pub const PLOT_HEADER: &str = "rank,player_id,mean,lower,upper";

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub player_id: String,
    /// Runs per season at the league-average opportunity count.
    pub mean_scaled: f64,
    pub interval_scaled: (f64, f64),
    /// Mean opportunities per season for this player.
    pub avg_opportunities: f64,
    /// Runs per season at the player's own average opportunity count.
    pub mean_individual: f64,
    pub interval_individual: (f64, f64),
    pub significant: bool,
    /// Steal attempts per opportunity, in percent (catchers only).
    pub attempt_pct: Option<f64>,
}

/// Empirical quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean and central 95% interval of a set of draws.
pub fn summarize_draws(draws: &[f64]) -> (f64, (f64, f64)) {
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    (mean, (quantile(&sorted, 0.025), quantile(&sorted, 0.975)))
}

/// An interval excludes zero only if both closed endpoints are strictly
/// on one side of it.
pub fn excludes_zero(interval: (f64, f64)) -> bool {
    interval.0 > 0.0 || interval.1 < 0.0
}

pub fn summarize(
    draws: &PosteriorDraws,
    ledger: &RunValueLedger,
    attempt_rates: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<PosteriorSummary>> {
    if draws.n_draws() == 0 {
        return Err(Error::InvalidArgument("no posterior draws".into()));
    }
    let n_bar = ledger
        .mean_opportunities()
        .ok_or_else(|| Error::InvalidArgument("empty ledger".into()))?;
    ledger
        .players()
        .into_iter()
        .map(|player| {
            let idx = draws.index_of(player).ok_or_else(|| {
                Error::InvalidArgument(format!("player {player} has no posterior draws"))
            })?;
            let (mean, interval) = summarize_draws(&draws.mu(idx));
            let seasons: Vec<_> = ledger.for_player(player).collect();
            let avg = seasons.iter().map(|e| e.n_opportunities as f64).sum::<f64>()
                / seasons.len() as f64;
            let factor = avg / n_bar;
            Ok(PosteriorSummary {
                player_id: player.to_string(),
                mean_scaled: mean,
                interval_scaled: interval,
                avg_opportunities: avg,
                mean_individual: mean * factor,
                interval_individual: (interval.0 * factor, interval.1 * factor),
                significant: excludes_zero(interval),
                attempt_pct: attempt_rates.and_then(|r| r.get(player)).map(|r| 100.0 * r),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Best,
    Worst,
}

fn by_individual_mean(a: &PosteriorSummary, b: &PosteriorSummary) -> Ordering {
    a.mean_individual
        .total_cmp(&b.mean_individual)
        .then_with(|| a.player_id.cmp(&b.player_id))
}

/// Top or bottom `k` players by individual posterior mean. Ties go to the
/// lexicographically smaller player id in both directions.
pub fn rank(summaries: &[PosteriorSummary], k: usize, direction: Direction) -> Result<Vec<PosteriorSummary>> {
    if k > summaries.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot rank {k} of {} players",
            summaries.len()
        )));
    }
    let mut sorted = summaries.to_vec();
    sorted.sort_by(|a, b| match direction {
        Direction::Worst => by_individual_mean(a, b),
        Direction::Best => b
            .mean_individual
            .total_cmp(&a.mean_individual)
            .then_with(|| a.player_id.cmp(&b.player_id)),
    });
    sorted.truncate(k);
    Ok(sorted)
}

pub fn significance_count(summaries: &[PosteriorSummary]) -> usize {
    summaries.iter().filter(|s| excludes_zero(s.interval_scaled)).count()
}

pub fn write_summary<W: Write>(mut out: W, summaries: &[PosteriorSummary]) -> Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for s in summaries {
        let attempt = s.attempt_pct.map(|p| format!("{p:.4}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            s.player_id,
            s.mean_scaled,
            s.interval_scaled.0,
            s.interval_scaled.1,
            s.avg_opportunities,
            s.mean_individual,
            s.interval_individual.0,
            s.interval_individual.1,
            s.significant,
            attempt
        )?;
    }
    Ok(())
}

/// Interval plot data on the individual scale, ascending by posterior mean.
pub fn export_interval_plot_data<W: Write>(mut out: W, summaries: &[PosteriorSummary]) -> Result<()> {
    let mut sorted: Vec<_> = summaries.iter().collect();
    sorted.sort_by(|a, b| by_individual_mean(a, b));
    writeln!(out, "{PLOT_HEADER}")?;
    for (i, s) in sorted.iter().enumerate() {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6}",
            i + 1,
            s.player_id,
            s.mean_individual,
            s.interval_individual.0,
            s.interval_individual.1
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::RunValueEntry;
    use proptest::prelude::*;

    fn summary(id: &str, mean: f64, lo: f64, hi: f64) -> PosteriorSummary {
        PosteriorSummary {
            player_id: id.into(),
            mean_scaled: mean,
            interval_scaled: (lo, hi),
            avg_opportunities: 1.0,
            mean_individual: mean,
            interval_individual: (lo, hi),
            significant: excludes_zero((lo, hi)),
            attempt_pct: None,
        }
    }

    fn ledger(entries: &[(&str, u16, u64)]) -> RunValueLedger {
        RunValueLedger::new(
            entries
                .iter()
                .map(|&(p, s, n)| RunValueEntry {
                    player_id: p.into(),
                    season: s,
                    n_opportunities: n,
                    run_value: 0.0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn quantile_interpolates() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 5.0);
        assert_eq!(quantile(&xs, 0.5), 3.0);
        assert_eq!(quantile(&xs, 0.1), 1.4);
        assert_eq!(quantile(&[7.0], 0.975), 7.0);
    }

    #[test]
    fn constant_draws() {
        let l = ledger(&[("a", 2002, 10), ("b", 2002, 10)]);
        let d = PosteriorDraws::from_mu_columns(
            vec!["a".into(), "b".into()],
            &[vec![2.5; 100], vec![0.0; 100]],
        )
        .unwrap();
        let s = summarize(&d, &l, None).unwrap();
        assert_eq!(s[0].mean_scaled, 2.5);
        assert_eq!(s[0].interval_scaled, (2.5, 2.5));
        assert!(s[0].significant);
        assert!(!s[1].significant);
    }

    #[test]
    fn symmetric_draws_are_not_significant() {
        let l = ledger(&[("a", 2002, 10), ("b", 2003, 30)]);
        let col: Vec<f64> = (-500..=500).map(|i| i as f64 / 100.0).collect();
        let d = PosteriorDraws::from_mu_columns(vec!["b".into(), "a".into()], &[col.clone(), col])
            .unwrap();
        let s = summarize(&d, &l, None).unwrap();
        assert!(s.iter().all(|x| !x.significant));
        // n̄ = 20: player b averages 30 opportunities
        let b = &s[1];
        assert_eq!(b.player_id, "b");
        assert!((b.interval_individual.1 - 1.5 * b.interval_scaled.1).abs() < 1e-12);
    }

    #[test]
    fn missing_player_is_an_error() {
        let l = ledger(&[("a", 2002, 10), ("z", 2002, 10)]);
        let d = PosteriorDraws::from_mu_columns(vec!["a".into()], &[vec![1.0; 4]]).unwrap();
        assert!(summarize(&d, &l, None).is_err());
    }

    #[test]
    fn attempt_percentage() {
        let l = ledger(&[("a", 2002, 10), ("b", 2002, 10)]);
        let d = PosteriorDraws::from_mu_columns(vec!["a".into(), "b".into()], &[vec![1.0], vec![1.0]])
            .unwrap();
        let rates = BTreeMap::from([("a".to_string(), 0.0347)]);
        let s = summarize(&d, &l, Some(&rates)).unwrap();
        assert!((s[0].attempt_pct.unwrap() - 3.47).abs() < 1e-12);
        assert_eq!(s[1].attempt_pct, None);
    }

    #[test]
    fn ranking() {
        let s = vec![summary("p1", 1.0, 0.5, 2.0), summary("p2", -2.0, -3.0, -1.0), summary("p3", 0.0, -1.0, 1.0)];
        let best = rank(&s, 1, Direction::Best).unwrap();
        assert_eq!(best[0].player_id, "p1");
        let worst = rank(&s, 1, Direction::Worst).unwrap();
        assert_eq!(worst[0].player_id, "p2");
        let all = rank(&s, 3, Direction::Best).unwrap();
        let ids: Vec<_> = all.iter().map(|x| x.player_id.as_str()).collect();
        assert_eq!(ids, ["p1", "p3", "p2"]);
        assert!(rank(&s, 4, Direction::Best).is_err());

        let tied = vec![summary("b", 1.0, 0.0, 2.0), summary("a", 1.0, 0.0, 2.0)];
        for dir in [Direction::Best, Direction::Worst] {
            let r = rank(&tied, 2, dir).unwrap();
            assert_eq!(r[0].player_id, "a");
        }
    }

    #[test]
    fn significance_boundaries() {
        let s = vec![summary("a", 0.0, -1.0, 1.0), summary("b", 0.0, -1.0, 1.0)];
        assert_eq!(significance_count(&s), 0);
        let s = vec![summary("a", 1.0, 0.0, 2.0)];
        assert_eq!(significance_count(&s), 0);
        let s = vec![summary("a", 1.0, 0.1, 2.0), summary("b", -1.0, -2.0, -0.1)];
        assert_eq!(significance_count(&s), 2);
    }

    #[test]
    fn plot_export() {
        let s = vec![summary("x", 1.0, 0.0, 2.0), summary("y", -3.0, -4.0, -2.0), summary("z", 0.5, 0.0, 1.0)];
        let mut buf = Vec::new();
        export_interval_plot_data(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], PLOT_HEADER);
        assert!(lines[1].starts_with("1,y,"));
        assert!(lines[2].starts_with("2,z,"));
        assert!(lines[3].starts_with("3,x,"));

        let mut buf = Vec::new();
        export_interval_plot_data(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{PLOT_HEADER}\n"));
    }

    #[test]
    fn summary_csv_columns() {
        let mut buf = Vec::new();
        write_summary(&mut buf, &[summary("a", 6.55, 3.60, 8.36)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<_> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), SUMMARY_HEADER.split(',').count());
        assert_eq!(row[1], "6.550000");
        assert_eq!(row[8], "true");
        assert_eq!(row[9], "");
    }

    proptest! {
        #[test]
        fn shift_moves_summary(draws in proptest::collection::vec(-50.0f64..50.0, 1..200), c in -20.0f64..20.0) {
            let (m, (lo, hi)) = summarize_draws(&draws);
            let shifted: Vec<f64> = draws.iter().map(|x| x + c).collect();
            let (m2, (lo2, hi2)) = summarize_draws(&shifted);
            prop_assert!((m2 - m - c).abs() < 1e-9);
            prop_assert!((lo2 - lo - c).abs() < 1e-9);
            prop_assert!((hi2 - hi - c).abs() < 1e-9);
            prop_assert!(lo <= m + 1e-12 && m <= hi + 1e-12);
        }

        #[test]
        fn positive_rescaling_keeps_significance(lo in -10.0f64..10.0, width in 0.0f64..10.0, k in 0.01f64..100.0) {
            let iv = (lo, lo + width);
            prop_assert_eq!(excludes_zero(iv), excludes_zero((iv.0 * k, iv.1 * k)));
        }
    }
}

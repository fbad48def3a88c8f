//! Synthetic ledgers with known ground truth, and the per-record oracles
//! the tabulation pipeline is checked against.
//!
//! Two generation modes exist. Event-level generation draws individual
//! opportunities from per-player attempt and success probabilities and
//! exercises tabulation and run values. Model-level generation draws season
//! run values directly from the hierarchical model and exercises the
//! sampler.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Deserialize;

use crate::event::{
    outfield_eligible, AdvanceAttempt, CatcherOpportunity, CatcherOutcome, GameState,
    OutfieldOpportunity, OutfieldOutcome, Season, StealAttempt, StealSituation,
};
use crate::ledger::{RunValueEntry, RunValueLedger};
use crate::model::{run_gibbs, HyperParams, ModelData, SamplerConfig};
use crate::report::summarize_draws;
use crate::run_matrix::RunTables;
use crate::{Error, Result};

/// Independent, reproducible seed for stream `stream` of `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be in [0, 1], got {p}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatcherPlayerTruth {
    pub player_id: String,
    /// Attempt probability per steal situation, indexed by
    /// [`StealSituation::index`].
    pub attempt_prob: [f64; 15],
    /// Probability that an attempt is a stolen base.
    pub steal_success_prob: f64,
    pub opportunities: Vec<(Season, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatcherTruth {
    pub players: Vec<CatcherPlayerTruth>,
    /// Relative frequency of each steal situation.
    pub situation_weights: [f64; 15],
    pub seed: u64,
}

pub fn generate_catcher_ledger(truth: &CatcherTruth) -> Result<Vec<CatcherOpportunity>> {
    for p in &truth.players {
        check_prob("steal_success_prob", p.steal_success_prob)?;
        for &a in &p.attempt_prob {
            check_prob("attempt_prob", a)?;
        }
    }
    let situations: Vec<StealSituation> = StealSituation::all().collect();
    let pick = WeightedIndex::new(truth.situation_weights)
        .map_err(|e| Error::InvalidArgument(format!("situation weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(truth.seed);
    let mut out = Vec::new();
    for p in &truth.players {
        for &(season, count) in &p.opportunities {
            for _ in 0..count {
                let situation = situations[pick.sample(&mut rng)];
                let outcome = if rng.random_bool(p.attempt_prob[situation.index()]) {
                    if rng.random_bool(p.steal_success_prob) {
                        CatcherOutcome::StolenBase
                    } else {
                        CatcherOutcome::CaughtStealing
                    }
                } else {
                    CatcherOutcome::NoAttempt
                };
                out.push(CatcherOpportunity {
                    season,
                    catcher_id: p.player_id.clone(),
                    situation,
                    outcome,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutfieldPlayerTruth {
    pub player_id: String,
    pub throw_out_prob: f64,
    pub advance_prob: f64,
    pub opportunities: Vec<(Season, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutfieldTruth {
    pub players: Vec<OutfieldPlayerTruth>,
    /// Lateral range of ball-in-play locations, feet.
    pub x_range: (f64, f64),
    /// Depth range of ball-in-play locations, feet.
    pub y_range: (f64, f64),
    pub seed: u64,
}

/// Every `(start state, hit)` pair that is an outfield opportunity.
pub fn outfield_situations() -> Vec<(GameState, bool)> {
    let mut out = Vec::new();
    for hit in [true, false] {
        for state in GameState::all() {
            if outfield_eligible(state.bases, state.outs, hit) {
                out.push((state, hit));
            }
        }
    }
    out
}

pub fn generate_outfield_ledger(truth: &OutfieldTruth) -> Result<Vec<OutfieldOpportunity>> {
    for p in &truth.players {
        check_prob("throw_out_prob", p.throw_out_prob)?;
        check_prob("advance_prob", p.advance_prob)?;
        check_prob("throw_out_prob + advance_prob", p.throw_out_prob + p.advance_prob)?;
    }
    let (x0, x1) = truth.x_range;
    let (y0, y1) = truth.y_range;
    if !(x0 < x1 && 0.0 <= y0 && y0 < y1) {
        return Err(Error::InvalidArgument("empty or negative coordinate range".into()));
    }
    let situations = outfield_situations();
    let mut rng = ChaCha8Rng::seed_from_u64(truth.seed);
    let mut out = Vec::new();
    for p in &truth.players {
        for &(season, count) in &p.opportunities {
            for _ in 0..count {
                let (start_state, hit) = situations[rng.random_range(0..situations.len())];
                let bip_x = (rng.random_range(x0..x1) * 10.0).round() / 10.0;
                let bip_y = (rng.random_range(y0..y1) * 10.0).round() / 10.0;
                let u: f64 = rng.random();
                let outcome = if u < p.throw_out_prob {
                    OutfieldOutcome::RunnerThrownOut
                } else if u < p.throw_out_prob + p.advance_prob {
                    OutfieldOutcome::RunnerAdvanced
                } else {
                    OutfieldOutcome::Hold
                };
                out.push(OutfieldOpportunity {
                    season,
                    fielder_id: p.player_id.clone(),
                    start_state,
                    hit,
                    bip_x,
                    bip_y,
                    outcome,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPlayerTruth {
    pub player_id: String,
    /// Latent ability on the league-average opportunity scale.
    pub mu: f64,
    pub sigma2: f64,
    pub opportunities: Vec<(Season, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelTruth {
    pub players: Vec<ModelPlayerTruth>,
    pub seed: u64,
}

/// Draws `Y_ij ~ Normal(mu_i, sigma2_i / n*_ij)` and returns the
/// unscaled run values `X_ij = Y_ij n_ij / n̄`.
pub fn generate_model_observations(truth: &ModelTruth) -> Result<RunValueLedger> {
    let all_n: Vec<u64> = truth
        .players
        .iter()
        .flat_map(|p| p.opportunities.iter().map(|&(_, n)| n))
        .collect();
    if all_n.is_empty() || all_n.contains(&0) {
        return Err(Error::InvalidArgument(
            "every player-season needs a positive opportunity count".into(),
        ));
    }
    let n_bar = all_n.iter().sum::<u64>() as f64 / all_n.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(truth.seed);
    let mut entries = Vec::with_capacity(all_n.len());
    for p in &truth.players {
        if !(p.sigma2 >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative sigma2 for {}", p.player_id)));
        }
        for &(season, n) in &p.opportunities {
            let n_star = n as f64 / n_bar;
            let sd = (p.sigma2 / n_star).sqrt();
            let y = if sd > 0.0 {
                Normal::new(p.mu, sd)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?
                    .sample(&mut rng)
            } else {
                p.mu
            };
            entries.push(RunValueEntry {
                player_id: p.player_id.clone(),
                season,
                n_opportunities: n,
                run_value: y * n as f64 / n_bar,
            });
        }
    }
    RunValueLedger::new(entries)
}

/// Population from which [`random_model_truth`] draws players.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ModelPopulation {
    pub players: usize,
    pub seasons: Vec<Season>,
    pub mu0: f64,
    pub tau2: f64,
    /// Uniform range of per-player `sigma2`.
    pub sigma2: (f64, f64),
    /// Uniform range of opportunities per season.
    pub opportunities: (u64, u64),
}

/// Players with `mu_i ~ Normal(mu0, tau2)`.
pub fn random_model_truth(pop: &ModelPopulation, seed: u64) -> Result<ModelTruth> {
    if pop.sigma2.0 > pop.sigma2.1 || pop.opportunities.0 > pop.opportunities.1 || pop.opportunities.0 == 0 {
        return Err(Error::InvalidArgument("invalid population ranges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let ability = Normal::new(pop.mu0, pop.tau2.sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let players = (0..pop.players)
        .map(|i| ModelPlayerTruth {
            player_id: format!("p{i:04}"),
            mu: ability.sample(&mut rng),
            sigma2: rng.random_range(pop.sigma2.0..=pop.sigma2.1),
            opportunities: pop
                .seasons
                .iter()
                .map(|&s| (s, rng.random_range(pop.opportunities.0..=pop.opportunities.1)))
                .collect(),
        })
        .collect();
    Ok(ModelTruth {
        players,
        seed: derive_seed(seed, 1),
    })
}

/// Catcher run values recomputed record by record, with league rates found
/// by scanning the whole ledger for each record.
pub fn brute_force_catcher_run_value(
    records: &[CatcherOpportunity],
    tables: &RunTables,
) -> BTreeMap<(String, Season), f64> {
    let mut out = BTreeMap::new();
    for r in records {
        let (mut n, mut s, mut f) = (0u64, 0u64, 0u64);
        for o in records {
            if o.season == r.season && o.situation == r.situation {
                n += 1;
                s += (o.outcome == CatcherOutcome::StolenBase) as u64;
                f += (o.outcome == CatcherOutcome::CaughtStealing) as u64;
            }
        }
        let start = tables.matrix.get(r.situation.game_state());
        let cat = r.situation.category;
        let after = |t: crate::run_matrix::Transition| {
            tables.matrix.value(t.bases, r.situation.outs + t.outs_delta)
        };
        let d_cs = start - after(tables.catcher.get(cat, StealAttempt::Caught));
        let d_sb = start - after(tables.catcher.get(cat, StealAttempt::Stolen));
        let is_sb = (r.outcome == CatcherOutcome::StolenBase) as u8 as f64;
        let is_cs = (r.outcome == CatcherOutcome::CaughtStealing) as u8 as f64;
        let v = (is_cs - f as f64 / n as f64) * d_cs + (is_sb - s as f64 / n as f64) * d_sb;
        *out.entry((r.catcher_id.clone(), r.season)).or_insert(0.0) += v;
    }
    out
}

/// Outfield counterpart of [`brute_force_catcher_run_value`].
pub fn brute_force_outfield_run_value(
    records: &[OutfieldOpportunity],
    tables: &RunTables,
) -> BTreeMap<(String, Season), f64> {
    let zone = |o: &OutfieldOpportunity| ((o.bip_x / 12.0).floor() as i64, (o.bip_y / 10.0).floor() as i64);
    let mut out = BTreeMap::new();
    for r in records {
        let (mut n, mut s, mut f) = (0u64, 0u64, 0u64);
        for o in records {
            if o.season == r.season && o.start_state == r.start_state && o.hit == r.hit && zone(o) == zone(r) {
                n += 1;
                s += (o.outcome == OutfieldOutcome::RunnerThrownOut) as u64;
                f += (o.outcome == OutfieldOutcome::RunnerAdvanced) as u64;
            }
        }
        let start = tables.matrix.get(r.start_state);
        let after = |a: AdvanceAttempt| {
            let t = tables
                .outfield
                .get(r.start_state.bases, r.hit, a)
                .expect("eligible record");
            tables.matrix.value(t.bases, r.start_state.outs + t.outs_delta)
        };
        let d_out = start - after(AdvanceAttempt::ThrownOut);
        let d_adv = start - after(AdvanceAttempt::Advanced);
        let is_out = (r.outcome == OutfieldOutcome::RunnerThrownOut) as u8 as f64;
        let is_adv = (r.outcome == OutfieldOutcome::RunnerAdvanced) as u8 as f64;
        let v = (is_out - s as f64 / n as f64) * d_out + (is_adv - f as f64 / n as f64) * d_adv;
        *out.entry((r.fielder_id.clone(), r.season)).or_insert(0.0) += v;
    }
    out
}

/// Inclusive range read from a two-element TOML array.
pub type Range<T> = (T, T);

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatcherPopulation {
    pub players: usize,
    pub opportunities: Range<u32>,
    pub attempt_rate: Range<f64>,
    pub steal_success: Range<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutfieldPopulation {
    pub players: usize,
    pub opportunities: Range<u32>,
    pub throw_out_rate: Range<f64>,
    pub advance_rate: Range<f64>,
    #[serde(default = "default_x_range")]
    pub x_range: Range<f64>,
    #[serde(default = "default_y_range")]
    pub y_range: Range<f64>,
}

fn default_x_range() -> Range<f64> {
    (-150.0, 150.0)
}

fn default_y_range() -> Range<f64> {
    (180.0, 330.0)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub players: usize,
    pub opportunities: Range<u64>,
    pub mu0: f64,
    pub tau2: f64,
    pub sigma2: Range<f64>,
}

/// Simulation recipe, typically read from TOML.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub seasons: Vec<Season>,
    pub catcher: Option<CatcherPopulation>,
    pub outfield: Option<OutfieldPopulation>,
    pub model: Option<ModelSection>,
}

/// Relative steal-situation frequencies by category; outs are uniform.
const CATEGORY_WEIGHTS: [f64; 5] = [0.55, 0.20, 0.09, 0.08, 0.08];
/// Attempt propensity of each category relative to a runner on first.
const CATEGORY_ATTEMPT: [f64; 5] = [1.0, 0.4, 0.6, 0.3, 0.1];

fn uniform(rng: &mut ChaCha8Rng, r: Range<f64>) -> f64 {
    if r.0 == r.1 {
        r.0
    } else {
        rng.random_range(r.0..r.1)
    }
}

impl CatcherPopulation {
    pub fn truth(&self, seasons: &[Season], seed: u64) -> Result<CatcherTruth> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 10));
        let mut weights = [0.0; 15];
        for s in StealSituation::all() {
            weights[s.index()] = CATEGORY_WEIGHTS[s.category.index()] / 3.0;
        }
        let players = (0..self.players)
            .map(|i| {
                let base = uniform(&mut rng, self.attempt_rate);
                let mut attempt_prob = [0.0; 15];
                for s in StealSituation::all() {
                    attempt_prob[s.index()] = (base * CATEGORY_ATTEMPT[s.category.index()]).min(1.0);
                }
                CatcherPlayerTruth {
                    player_id: format!("c{i:04}"),
                    attempt_prob,
                    steal_success_prob: uniform(&mut rng, self.steal_success),
                    opportunities: seasons
                        .iter()
                        .map(|&s| (s, rng.random_range(self.opportunities.0..=self.opportunities.1)))
                        .collect(),
                }
            })
            .collect();
        Ok(CatcherTruth {
            players,
            situation_weights: weights,
            seed: derive_seed(seed, 11),
        })
    }
}

impl OutfieldPopulation {
    pub fn truth(&self, seasons: &[Season], seed: u64) -> Result<OutfieldTruth> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 20));
        let players = (0..self.players)
            .map(|i| OutfieldPlayerTruth {
                player_id: format!("f{i:04}"),
                throw_out_prob: uniform(&mut rng, self.throw_out_rate),
                advance_prob: uniform(&mut rng, self.advance_rate),
                opportunities: seasons
                    .iter()
                    .map(|&s| (s, rng.random_range(self.opportunities.0..=self.opportunities.1)))
                    .collect(),
            })
            .collect();
        Ok(OutfieldTruth {
            players,
            x_range: self.x_range,
            y_range: self.y_range,
            seed: derive_seed(seed, 21),
        })
    }
}

impl ModelSection {
    pub fn population(&self, seasons: &[Season]) -> ModelPopulation {
        ModelPopulation {
            players: self.players,
            seasons: seasons.to_vec(),
            mu0: self.mu0,
            tau2: self.tau2,
            sigma2: self.sigma2,
            opportunities: self.opportunities,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    pub replications: usize,
    pub trials: usize,
    pub covered: usize,
}

impl CalibrationReport {
    pub fn coverage(&self) -> f64 {
        self.covered as f64 / self.trials as f64
    }
}

/// Fits `replications` independent datasets drawn from `pop` and counts
/// how often each player's 95% interval contains the true ability.
/// Replications run in parallel with seeds derived from `master_seed`.
pub fn calibrate(
    pop: &ModelPopulation,
    replications: usize,
    hyper: &HyperParams,
    sampler: &SamplerConfig,
    master_seed: u64,
) -> Result<CalibrationReport> {
    let per_rep = (0..replications)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(master_seed, r as u64);
            let truth = random_model_truth(pop, seed)?;
            let ledger = generate_model_observations(&truth)?;
            let data = ModelData::from_ledger(&ledger)?;
            let config = SamplerConfig {
                seed: derive_seed(seed, 2),
                ..*sampler
            };
            let draws = run_gibbs(&data, hyper, &config)?;
            let covered = truth
                .players
                .iter()
                .filter(|p| {
                    let idx = draws.index_of(&p.player_id).expect("fitted player");
                    let (_, (lo, hi)) = summarize_draws(&draws.mu(idx));
                    lo <= p.mu && p.mu <= hi
                })
                .count();
            Ok((truth.players.len(), covered))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationReport {
        replications,
        trials: per_rep.iter().map(|r| r.0).sum(),
        covered: per_rep.iter().map(|r| r.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::StealCategory;

    fn catcher_player(id: &str, attempt: f64, success: f64, n: u32) -> CatcherPlayerTruth {
        CatcherPlayerTruth {
            player_id: id.into(),
            attempt_prob: [attempt; 15],
            steal_success_prob: success,
            opportunities: vec![(2002, n)],
        }
    }

    fn catcher_truth(players: Vec<CatcherPlayerTruth>, seed: u64) -> CatcherTruth {
        CatcherTruth {
            players,
            situation_weights: [1.0; 15],
            seed,
        }
    }

    #[test]
    fn zero_attempt_probability() {
        let recs = generate_catcher_ledger(&catcher_truth(vec![catcher_player("a", 0.0, 0.5, 500)], 1)).unwrap();
        assert_eq!(recs.len(), 500);
        assert!(recs.iter().all(|r| r.outcome == CatcherOutcome::NoAttempt));
    }

    #[test]
    fn certain_success_never_caught() {
        let recs = generate_catcher_ledger(&catcher_truth(vec![catcher_player("a", 0.3, 1.0, 500)], 2)).unwrap();
        assert!(recs.iter().all(|r| r.outcome != CatcherOutcome::CaughtStealing));
        assert!(recs.iter().any(|r| r.outcome == CatcherOutcome::StolenBase));
    }

    #[test]
    fn empirical_attempt_rate() {
        // binomial sd at p = 0.05, n = 1e5 is 6.9e-4; 0.005 is > 7 sd
        let recs =
            generate_catcher_ledger(&catcher_truth(vec![catcher_player("a", 0.05, 0.7, 100_000)], 3)).unwrap();
        let rate = recs.iter().filter(|r| r.outcome != CatcherOutcome::NoAttempt).count() as f64 / 1e5;
        assert!((rate - 0.05).abs() < 0.005, "{rate}");
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(generate_catcher_ledger(&catcher_truth(vec![catcher_player("a", 1.5, 0.5, 1)], 1)).is_err());
        let truth = OutfieldTruth {
            players: vec![OutfieldPlayerTruth {
                player_id: "f".into(),
                throw_out_prob: 0.6,
                advance_prob: 0.6,
                opportunities: vec![(2002, 1)],
            }],
            x_range: (-10.0, 10.0),
            y_range: (200.0, 210.0),
            seed: 0,
        };
        assert!(generate_outfield_ledger(&truth).is_err());
    }

    #[test]
    fn outfield_records_are_eligible() {
        let truth = OutfieldTruth {
            players: vec![OutfieldPlayerTruth {
                player_id: "f".into(),
                throw_out_prob: 0.1,
                advance_prob: 0.3,
                opportunities: vec![(2002, 2000)],
            }],
            x_range: (-100.0, 100.0),
            y_range: (200.0, 300.0),
            seed: 5,
        };
        let recs = generate_outfield_ledger(&truth).unwrap();
        let report = crate::event::validate_ledger(&recs);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(outfield_situations().len(), 30);
    }

    fn model_truth(sigma2: f64, seed: u64) -> ModelTruth {
        ModelTruth {
            players: vec![
                ModelPlayerTruth {
                    player_id: "a".into(),
                    mu: 2.0,
                    sigma2,
                    opportunities: vec![(2002, 100), (2003, 300)],
                },
                ModelPlayerTruth {
                    player_id: "b".into(),
                    mu: -1.0,
                    sigma2,
                    opportunities: vec![(2002, 200)],
                },
            ],
            seed,
        }
    }

    #[test]
    fn noiseless_model_observations() {
        let ledger = generate_model_observations(&model_truth(0.0, 1)).unwrap();
        // n̄ = 200
        let xs: Vec<f64> = ledger.entries().iter().map(|e| e.run_value).collect();
        assert_eq!(xs, vec![1.0, 3.0, -1.0]);
    }

    #[test]
    fn model_observations_are_seeded() {
        let a = generate_model_observations(&model_truth(1.0, 9)).unwrap();
        let b = generate_model_observations(&model_truth(1.0, 9)).unwrap();
        let c = generate_model_observations(&model_truth(1.0, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn many_seasons_mean_is_within_clt_bound() {
        let truth = ModelTruth {
            players: vec![
                ModelPlayerTruth {
                    player_id: "a".into(),
                    mu: 1.5,
                    sigma2: 4.0,
                    opportunities: (0..2000).map(|s| (s as Season, 50 + (s as u64 % 7) * 20)).collect(),
                },
            ],
            seed: 77,
        };
        let ledger = generate_model_observations(&truth).unwrap();
        let data = ModelData::from_ledger(&ledger).unwrap();
        let g = &data.groups[0];
        let bound = 3.0 * (4.0 / g.sum_n_star()).sqrt();
        assert!((g.weighted_mean() - 1.5).abs() < bound);
        let plain_mean = g.y.iter().sum::<f64>() / g.y.len() as f64;
        let plain_sd = (4.0 * g.n_star.iter().map(|w| 1.0 / w).sum::<f64>()).sqrt() / g.y.len() as f64;
        assert!((plain_mean - 1.5).abs() < 3.0 * plain_sd);
    }

    #[test]
    fn brute_force_trivial_cases() {
        let tables = RunTables::reference();
        assert!(brute_force_catcher_run_value(&[], &tables).is_empty());
        // a single record is its own league: zero
        let one = CatcherOpportunity {
            season: 2002,
            catcher_id: "a".into(),
            situation: StealSituation::new(StealCategory::R1, 0).unwrap(),
            outcome: CatcherOutcome::CaughtStealing,
        };
        let v = brute_force_catcher_run_value(&[one.clone()], &tables);
        assert_eq!(v[&("a".to_string(), 2002)], 0.0);
        // two records: a caught stealing and a stolen base by another catcher
        let other = CatcherOpportunity {
            catcher_id: "b".into(),
            outcome: CatcherOutcome::StolenBase,
            ..one.clone()
        };
        let v = brute_force_catcher_run_value(&[one, other], &tables);
        // a: (1 - 0.5)(0.62) + (0 - 0.5)(-0.24) = 0.43
        assert!((v[&("a".to_string(), 2002)] - 0.43).abs() < 1e-12);
        assert!((v[&("b".to_string(), 2002)] + 0.43).abs() < 1e-12);
    }

    #[test]
    fn seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(derive_seed(1, 2), derive_seed(1, 2));
    }

    #[test]
    fn spec_parses_from_toml_shape() {
        let pop = CatcherPopulation {
            players: 3,
            opportunities: (10, 20),
            attempt_rate: (0.05, 0.05),
            steal_success: (0.7, 0.7),
        };
        let truth = pop.truth(&[2002, 2003], 4).unwrap();
        assert_eq!(truth.players.len(), 3);
        assert_eq!(truth.players[0].opportunities.len(), 2);
        assert_eq!(truth.players[0].attempt_prob[0], 0.05);
    }
}

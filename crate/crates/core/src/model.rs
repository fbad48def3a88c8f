//! Hierarchical normal model for multi-season run values, fit by Gibbs
//! sampling.
//!
//! Season run values `X_ij` are rescaled to a common opportunity count,
//! `Y_ij = X_ij * n̄ / n_ij`, and modelled as
//!
//! ```text
//! Y_ij ~ Normal(mu_i, sigma2_i / n*_ij)      n*_ij = n_ij / n̄
//! mu_i ~ Normal(mu0, tau2)                   sigma2_i ~ Inv-chi2(nu)
//! mu0  ~ Normal(0, beta)                     tau2 ~ Inv-chi2(gamma)
//! ```
//!
//! Each sweep draws `mu`, `sigma2`, `mu0`, `tau2` in that order from their
//! full conditionals. The default hyper-parameters (`nu = gamma = 0`,
//! `beta = 1e12`) make the priors non-influential.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::draws::PosteriorDraws;
use crate::event::Season;
use crate::ledger::RunValueLedger;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledObservation {
    pub player_index: usize,
    pub season: Season,
    /// Run value rescaled to `n̄` opportunities.
    pub y: f64,
    /// `n_ij / n̄`.
    pub n_star: f64,
}

/// Rescales every ledger entry to the mean opportunity count. Player
/// indices follow [`RunValueLedger::players`]. Returns the observations
/// and `n̄`.
pub fn scale_observations(ledger: &RunValueLedger) -> Result<(Vec<ScaledObservation>, f64)> {
    let n_bar = ledger
        .mean_opportunities()
        .ok_or_else(|| Error::Model("empty ledger".into()))?;
    let players = ledger.players();
    let mut out = Vec::with_capacity(ledger.len());
    for e in ledger.entries() {
        if e.n_opportunities == 0 {
            return Err(Error::Model(format!(
                "player {} season {} has no opportunities",
                e.player_id, e.season
            )));
        }
        let n = e.n_opportunities as f64;
        out.push(ScaledObservation {
            player_index: players.iter().position(|p| *p == e.player_id).unwrap(),
            season: e.season,
            y: e.run_value * n_bar / n,
            n_star: n / n_bar,
        });
    }
    Ok((out, n_bar))
}

/// Observations of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerGroup {
    pub player_id: String,
    pub y: Vec<f64>,
    pub n_star: Vec<f64>,
    sum_n_star: f64,
    sum_n_star_y: f64,
}

impl PlayerGroup {
    pub fn new(player_id: impl Into<String>, y: Vec<f64>, n_star: Vec<f64>) -> Result<Self> {
        let player_id = player_id.into();
        if y.is_empty() || y.len() != n_star.len() {
            return Err(Error::Model(format!(
                "player {player_id}: need matching, non-empty observations"
            )));
        }
        if n_star.iter().any(|&w| !(w > 0.0 && w.is_finite())) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Model(format!(
                "player {player_id}: weights must be positive and values finite"
            )));
        }
        let sum_n_star = n_star.iter().sum();
        let sum_n_star_y = n_star.iter().zip(&y).map(|(w, v)| w * v).sum();
        Ok(PlayerGroup {
            player_id,
            y,
            n_star,
            sum_n_star,
            sum_n_star_y,
        })
    }

    /// Number of seasons `m_i`.
    pub fn seasons(&self) -> usize {
        self.y.len()
    }

    pub fn sum_n_star(&self) -> f64 {
        self.sum_n_star
    }

    pub fn sum_n_star_y(&self) -> f64 {
        self.sum_n_star_y
    }

    /// `Σ n* Y / Σ n*`.
    pub fn weighted_mean(&self) -> f64 {
        self.sum_n_star_y / self.sum_n_star
    }

    /// `Σ n* (Y - mu)²`.
    pub fn weighted_rss(&self, mu: f64) -> f64 {
        self.n_star
            .iter()
            .zip(&self.y)
            .map(|(w, v)| w * (v - mu) * (v - mu))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelData {
    pub groups: Vec<PlayerGroup>,
    /// Mean opportunities per player-season, when built from a ledger.
    pub n_bar: Option<f64>,
}

impl ModelData {
    pub fn from_ledger(ledger: &RunValueLedger) -> Result<Self> {
        let (obs, n_bar) = scale_observations(ledger)?;
        let players = ledger.players();
        let mut ys = vec![Vec::new(); players.len()];
        let mut ws = vec![Vec::new(); players.len()];
        for o in obs {
            ys[o.player_index].push(o.y);
            ws[o.player_index].push(o.n_star);
        }
        let groups = players
            .into_iter()
            .zip(ys.into_iter().zip(ws))
            .map(|(p, (y, w))| PlayerGroup::new(p, y, w))
            .collect::<Result<_>>()?;
        Ok(ModelData {
            groups,
            n_bar: Some(n_bar),
        })
    }

    pub fn from_groups(groups: Vec<PlayerGroup>) -> Self {
        ModelData {
            groups,
            n_bar: None,
        }
    }

    pub fn n_players(&self) -> usize {
        self.groups.len()
    }

    pub fn player_ids(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.player_id.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Degrees of freedom of the `sigma2_i` prior.
    pub nu: f64,
    /// Prior variance of `mu0`.
    pub beta: f64,
    /// Degrees of freedom of the `tau2` prior.
    pub gamma: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            nu: 0.0,
            beta: 1e12,
            gamma: 0.0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub burnin: usize,
    pub draws: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burnin: 2_000,
            draws: 20_000,
            thin: 1,
            seed: 20020405,
        }
    }
}

impl SamplerConfig {
    pub fn retained(&self) -> usize {
        self.draws / self.thin
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub mu0: f64,
    pub tau2: f64,
}

fn sample_variance(xs: impl ExactSizeIterator<Item = f64> + Clone) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    let v = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (v > 0.0 && v.is_finite()).then_some(v)
}

impl ModelState {
    /// Starting point: weighted player means, per-player sample variances,
    /// and their population mean and variance. Variances fall back to 1
    /// when undefined or zero.
    pub fn initial(data: &ModelData) -> Self {
        let mu: Vec<f64> = data.groups.iter().map(PlayerGroup::weighted_mean).collect();
        let sigma2 = data
            .groups
            .iter()
            .map(|g| sample_variance(g.y.iter().copied()).unwrap_or(1.0))
            .collect();
        let mu0 = mu.iter().sum::<f64>() / mu.len() as f64;
        let tau2 = sample_variance(mu.iter().copied()).unwrap_or(1.0);
        ModelState {
            mu,
            sigma2,
            mu0,
            tau2,
        }
    }
}

/// The shrinkage estimate of a group mean when the variances and the
/// population mean are known.
pub fn shrinkage_estimate(ybar: f64, m: usize, sigma2: f64, tau2: f64, mu0: f64) -> f64 {
    let data_precision = m as f64 / sigma2;
    let prior_precision = 1.0 / tau2;
    (data_precision * ybar + prior_precision * mu0) / (data_precision + prior_precision)
}

/// Mean and variance of `mu_i` given everything else.
pub fn mu_conditional(group: &PlayerGroup, sigma2: f64, mu0: f64, tau2: f64) -> (f64, f64) {
    let precision = group.sum_n_star() / sigma2 + 1.0 / tau2;
    let mean = (group.sum_n_star_y() / sigma2 + mu0 / tau2) / precision;
    (mean, 1.0 / precision)
}

/// Inverse-gamma shape and scale of `sigma2_i` given everything else.
pub fn sigma2_conditional(group: &PlayerGroup, mu: f64, nu: f64) -> (f64, f64) {
    (
        (group.seasons() as f64 + nu) / 2.0,
        (group.weighted_rss(mu) + 1.0) / 2.0,
    )
}

/// Mean and variance of `mu0` given the player means.
pub fn mu0_conditional(mu: &[f64], tau2: f64, beta: f64) -> (f64, f64) {
    let n = mu.len() as f64;
    let mu_bar = mu.iter().sum::<f64>() / n;
    let precision = n / tau2 + 1.0 / beta;
    ((n / tau2) * mu_bar / precision, 1.0 / precision)
}

/// Inverse-gamma shape and scale of `tau2` given the player means and `mu0`.
pub fn tau2_conditional(mu: &[f64], mu0: f64, gamma: f64) -> (f64, f64) {
    let ss: f64 = mu.iter().map(|m| (m - mu0) * (m - mu0)).sum();
    ((mu.len() as f64 + gamma) / 2.0, (ss + 1.0) / 2.0)
}

/// Source of draws from the two conditional families of the sampler.
pub trait ConditionalDraw {
    fn normal(&mut self, mean: f64, variance: f64) -> f64;
    fn inverse_gamma(&mut self, shape: f64, scale: f64) -> f64;
}

/// Random draws from a seeded generator.
#[derive(Debug, Clone)]
pub struct RandomDraws<R> {
    rng: R,
}

impl RandomDraws<ChaCha8Rng> {
    pub fn seeded(seed: u64) -> Self {
        RandomDraws {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<R: Rng> RandomDraws<R> {
    pub fn new(rng: R) -> Self {
        RandomDraws { rng }
    }
}

impl<R: Rng> ConditionalDraw for RandomDraws<R> {
    fn normal(&mut self, mean: f64, variance: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        mean + variance.sqrt() * z
    }

    fn inverse_gamma(&mut self, shape: f64, scale: f64) -> f64 {
        let gamma = Gamma::new(shape, 1.0 / scale).expect("positive shape and scale");
        loop {
            let x: f64 = gamma.sample(&mut self.rng);
            let v = 1.0 / x;
            if v.is_finite() && v > 0.0 {
                return v;
            }
        }
    }
}

/// Returns each distribution's mean (the mode for an inverse gamma whose
/// mean is undefined).
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanDraws;

impl ConditionalDraw for MeanDraws {
    fn normal(&mut self, mean: f64, _variance: f64) -> f64 {
        mean
    }

    fn inverse_gamma(&mut self, shape: f64, scale: f64) -> f64 {
        if shape > 1.0 {
            scale / (shape - 1.0)
        } else {
            scale / (shape + 1.0)
        }
    }
}

/// One chain of the sampler over borrowed data.
#[derive(Debug, Clone)]
pub struct GibbsSampler<'a> {
    data: &'a ModelData,
    hyper: HyperParams,
    pub state: ModelState,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(data: &'a ModelData, hyper: HyperParams) -> Result<Self> {
        hyper.validate()?;
        if data.n_players() < 2 {
            return Err(Error::Model(format!(
                "need at least 2 players to estimate the population variance, got {}",
                data.n_players()
            )));
        }
        Ok(GibbsSampler {
            data,
            hyper,
            state: ModelState::initial(data),
        })
    }

    pub fn with_state(data: &'a ModelData, hyper: HyperParams, state: ModelState) -> Result<Self> {
        let mut s = Self::new(data, hyper)?;
        if state.mu.len() != data.n_players() || state.sigma2.len() != data.n_players() {
            return Err(Error::Model("state does not match data".into()));
        }
        s.state = state;
        Ok(s)
    }

    pub fn step_mu(&mut self, draw: &mut impl ConditionalDraw) {
        let st = &mut self.state;
        for (i, g) in self.data.groups.iter().enumerate() {
            let (mean, var) = mu_conditional(g, st.sigma2[i], st.mu0, st.tau2);
            st.mu[i] = draw.normal(mean, var);
        }
    }

    pub fn step_sigma2(&mut self, draw: &mut impl ConditionalDraw) {
        let st = &mut self.state;
        for (i, g) in self.data.groups.iter().enumerate() {
            let (shape, scale) = sigma2_conditional(g, st.mu[i], self.hyper.nu);
            st.sigma2[i] = draw.inverse_gamma(shape, scale);
        }
    }

    pub fn step_mu0(&mut self, draw: &mut impl ConditionalDraw) {
        let (mean, var) = mu0_conditional(&self.state.mu, self.state.tau2, self.hyper.beta);
        self.state.mu0 = draw.normal(mean, var);
    }

    pub fn step_tau2(&mut self, draw: &mut impl ConditionalDraw) {
        let (shape, scale) = tau2_conditional(&self.state.mu, self.state.mu0, self.hyper.gamma);
        self.state.tau2 = draw.inverse_gamma(shape, scale);
    }

    pub fn sweep(&mut self, draw: &mut impl ConditionalDraw) {
        self.step_mu(draw);
        self.step_sigma2(draw);
        self.step_mu0(draw);
        self.step_tau2(draw);
    }

    /// Runs burn-in, then keeps every `thin`-th of `draws` sweeps.
    pub fn run(&mut self, config: &SamplerConfig, draw: &mut impl ConditionalDraw) -> PosteriorDraws {
        for _ in 0..config.burnin {
            self.sweep(draw);
        }
        let mut out = PosteriorDraws::with_capacity(self.data.player_ids(), config.retained());
        for k in 0..config.draws {
            self.sweep(draw);
            if (k + 1) % config.thin == 0 {
                out.push(&self.state);
            }
        }
        out
    }
}

/// Fits the model with a generator seeded from `config.seed`.
pub fn run_gibbs(data: &ModelData, hyper: &HyperParams, config: &SamplerConfig) -> Result<PosteriorDraws> {
    if config.thin == 0 || config.draws < config.thin {
        return Err(Error::InvalidArgument(format!(
            "need draws >= thin >= 1, got draws={} thin={}",
            config.draws, config.thin
        )));
    }
    if config.retained() < 1000 {
        warn!(
            "only {} retained draws; posterior intervals will be noisy",
            config.retained()
        );
    }
    let mut sampler = GibbsSampler::new(data, *hyper)?;
    let mut draw = RandomDraws::seeded(config.seed);
    Ok(sampler.run(config, &mut draw))
}

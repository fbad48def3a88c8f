use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use armvalue::HyperParams;
use clap::ValueEnum;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Catcher,
    Outfield,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub burnin: Option<usize>,
    pub draws: Option<usize>,
    pub thin: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub nu: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

/// Settings shared by all subcommands. Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub role: Option<Role>,
    pub seed: Option<u64>,
    pub input: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub transitions: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub top: Option<usize>,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub prior: PriorSection,
}

impl RunConfig {
    /// Reads a TOML config. Relative paths are taken from the config's
    /// directory; input files must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.matrix, &mut cfg.transitions, &mut cfg.out_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for p in [&cfg.input, &cfg.matrix, &cfg.transitions].into_iter().flatten() {
            if !p.exists() {
                bail!("{}: file named in {} does not exist", p.display(), path.display());
            }
        }
        cfg.validate().with_context(|| format!("invalid config {}", path.display()))?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let d = HyperParams::default();
        HyperParams {
            nu: self.prior.nu.unwrap_or(d.nu),
            beta: self.prior.beta.unwrap_or(d.beta),
            gamma: self.prior.gamma.unwrap_or(d.gamma),
        }
        .validate()?;
        let (thin, draws) = (self.sampler.thin.unwrap_or(1), self.sampler.draws.unwrap_or(usize::MAX));
        if thin == 0 || draws < thin {
            bail!("sampler needs draws >= thin >= 1");
        }
        Ok(())
    }
}

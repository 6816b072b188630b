//! Random variate generators, Gibbs samplers and chain diagnostics.

mod data;
mod diagnostics;
mod gibbs;
mod prior;
mod spike_slab;
mod variates;

pub use data::{ChainDraws, ChainState, Chain, RegressionData};
pub(crate) use data::SuffStats;
pub use diagnostics::{chain_diagnostics, effective_sample_size, split_rhat, ParamSummary};
pub use gibbs::{gibbs_high_dim, gibbs_low_dim};
pub use prior::PriorSpec;
pub use spike_slab::{spike_slab_gibbs, spike_slab_gibbs_with, SpikeSlabControl};
pub use variates::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Auto,
    LowDim,
    HighDim,
    SpikeSlab,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "low_dim" | "low" => Ok(Algorithm::LowDim),
            "high_dim" | "high" => Ok(Algorithm::HighDim),
            "spike_slab" => Ok(Algorithm::SpikeSlab),
            _ => Err(Error::Config(format!("unknown algorithm '{s}' (auto, low_dim, high_dim)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_chains: usize,
    pub seed: u64,
    /// Inverse-gamma (shape, rate) prior on σ².
    pub sigma2_prior: (f64, f64),
    pub algorithm: Algorithm,
    /// Hold σ² at this value instead of sampling it.
    pub sigma2_fixed: Option<f64>,
    /// Coordinate sweeps per truncated-normal update in the low-dimensional sampler.
    pub tmvn_sweeps: usize,
    /// Keep every retained draw; otherwise only running means are stored.
    pub keep_draws: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_iter: 5000,
            burn_in: 1500,
            thin: 1,
            n_chains: 3,
            seed: 1,
            sigma2_prior: (0.01, 0.01),
            algorithm: Algorithm::Auto,
            sigma2_fixed: None,
            tmvn_sweeps: 1,
            keep_draws: true,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.n_iter {
            return Err(Error::Config(format!("burn_in ({}) must be below n_iter ({})", self.burn_in, self.n_iter)));
        }
        if self.thin == 0 || self.n_chains == 0 || self.tmvn_sweeps == 0 {
            return Err(Error::Config("thin, n_chains and tmvn_sweeps must be at least 1".into()));
        }
        let (a, b) = self.sigma2_prior;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Config(format!("sigma2 prior needs positive shape and rate, got ({a}, {b})")));
        }
        if let Some(s) = self.sigma2_fixed {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("fixed sigma2 must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Retained rows per chain.
    pub fn retained(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }

    pub(crate) fn keeps(&self, iter: usize) -> bool {
        iter >= self.burn_in && (iter - self.burn_in + 1) % self.thin == 0
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a path of stream indices; distinct paths give unrelated seeds.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |s, &k| splitmix64(s ^ splitmix64(k.wrapping_add(0xD1B5_4A32_D192_ED03))))
}

pub fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[chain as u64]))
}

/// Which sampler `fit` would use.
pub fn resolve_algorithm(data: &RegressionData, prior: &PriorSpec, config: &McmcConfig) -> Result<Algorithm> {
    if let PriorSpec::SpikeSlab { .. } = prior {
        return match config.algorithm {
            Algorithm::Auto | Algorithm::SpikeSlab => Ok(Algorithm::SpikeSlab),
            other => Err(Error::Config(format!("spike-and-slab prior cannot use the {other:?} sampler"))),
        };
    }
    match config.algorithm {
        Algorithm::SpikeSlab => Err(Error::Config("spike_slab algorithm needs a spike-and-slab prior".into())),
        Algorithm::Auto => Ok(if data.p() < data.n() { Algorithm::LowDim } else { Algorithm::HighDim }),
        a => Ok(a),
    }
}

/// Run `config.n_chains` independent chains in parallel with derived seeds.
pub fn fit(data: &RegressionData, prior: &PriorSpec, config: &McmcConfig) -> Result<ChainDraws> {
    let stats = SuffStats::new(data);
    fit_prepared(data, &stats, prior, config)
}

pub(crate) fn fit_prepared(data: &RegressionData, stats: &SuffStats, prior: &PriorSpec, config: &McmcConfig) -> Result<ChainDraws> {
    config.validate()?;
    prior.validate()?;
    let algorithm = resolve_algorithm(data, prior, config)?;
    let chains: Vec<Result<Chain>> = (0..config.n_chains)
        .into_par_iter()
        .map(|k| {
            let mut rng = chain_rng(config.seed, k);
            let mut chain = match algorithm {
                Algorithm::LowDim => gibbs::low_dim(data, stats, prior, config, &mut rng),
                Algorithm::HighDim => gibbs::high_dim(data, stats, prior, config, &mut rng),
                _ => spike_slab::run(data, stats, prior, config, &SpikeSlabControl::default(), &mut rng),
            }?;
            chain.index = k;
            chain.seed = derive_seed(config.seed, &[k as u64]);
            Ok(chain)
        })
        .collect();
    let chains = chains.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ChainDraws { p: data.p(), algorithm, prior: *prior, config: config.clone(), chains })
}

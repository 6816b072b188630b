use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::data::{Chain, RegressionData, SuffStats};
use super::gibbs::draw_sigma2;
use super::{McmcConfig, PriorSpec};
use crate::error::{Error, Result};

/// Optional clamps on the spike-and-slab sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpikeSlabControl {
    /// Hold the inclusion probability π fixed.
    pub fix_pi: Option<f64>,
    /// Keep every coefficient in the slab.
    pub force_inclusion: bool,
}

pub fn spike_slab_gibbs<R: Rng + ?Sized>(data: &RegressionData, prior: &PriorSpec, config: &McmcConfig, rng: &mut R) -> Result<Chain> {
    spike_slab_gibbs_with(data, prior, config, &SpikeSlabControl::default(), rng)
}

pub fn spike_slab_gibbs_with<R: Rng + ?Sized>(
    data: &RegressionData,
    prior: &PriorSpec,
    config: &McmcConfig,
    control: &SpikeSlabControl,
    rng: &mut R,
) -> Result<Chain> {
    config.validate()?;
    data.validate()?;
    run(data, &SuffStats::new(data), prior, config, control, rng)
}

pub(crate) fn run<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    prior: &PriorSpec,
    config: &McmcConfig,
    control: &SpikeSlabControl,
    rng: &mut R,
) -> Result<Chain> {
    prior.validate()?;
    let (slab, alpha, beta) = match *prior {
        PriorSpec::SpikeSlab { slab_variance, alpha, beta } => (slab_variance, alpha, beta),
        _ => return Err(Error::Config("spike_slab_gibbs needs a spike-and-slab prior".into())),
    };
    if let Some(pi) = control.fix_pi {
        if !(pi > 0.0 && pi <= 1.0) {
            return Err(Error::Config(format!("fixed pi must lie in (0, 1], got {pi}")));
        }
    }
    let p = stats.p;
    let mut theta: DVector<f64> = DVector::zeros(p);
    let mut incl = vec![control.force_inclusion; p];
    // Gθ, kept current as coordinates change
    let mut g_theta: DVector<f64> = DVector::zeros(p);
    let mut sigma2 = config.sigma2_fixed.unwrap_or(if stats.y_var > 0.0 { stats.y_var } else { 1.0 });
    let mut pi: f64 = control.fix_pi.unwrap_or(alpha / (alpha + beta));
    let mut chain = Chain::new(p, config);
    let mut incl_count = vec![0usize; p];
    for it in 0..config.n_iter {
        for j in 0..p {
            let gjj = stats.gram_diag[j];
            let old = theta[j];
            // x_j'(y - X_{-j}θ_{-j})
            let xr = stats.xty[j] - g_theta[j] + gjj * old;
            let v = 1.0 / (gjj / sigma2 + 1.0 / slab);
            let m = v * xr / sigma2;
            let z = if control.force_inclusion {
                true
            } else if pi >= 1.0 {
                true
            } else {
                let log_bf = 0.5 * (v / slab).ln() + 0.5 * m * m / v;
                let log_odds = (pi / (1.0 - pi)).ln() + log_bf;
                rng.random::<f64>() < 1.0 / (1.0 + (-log_odds).exp())
            };
            incl[j] = z;
            let new = if z {
                let e: f64 = StandardNormal.sample(rng);
                m + v.sqrt() * e
            } else {
                0.0
            };
            let delta = new - old;
            if delta != 0.0 {
                theta[j] = new;
                match &stats.gram {
                    Some(g) => g_theta.axpy(delta, &g.column(j), 1.0),
                    None => g_theta[j] += gjj * delta,
                }
            }
        }
        sigma2 = match config.sigma2_fixed {
            Some(s) => s,
            None => draw_sigma2(config.sigma2_prior, stats.n, stats.rss(data, &theta), rng),
        };
        if control.fix_pi.is_none() {
            let k = incl.iter().filter(|&&z| z).count() as f64;
            pi = Beta::new(alpha + k, beta + p as f64 - k)
                .map_err(|e| Error::Sampler(format!("iteration {}: {e}", it + 1)))?
                .sample(rng);
        }
        if config.keeps(it) {
            chain.record(it, &theta, sigma2, config.keep_draws);
            chain.pi.push(pi);
            for (c, &z) in incl_count.iter_mut().zip(&incl) {
                *c += z as usize;
            }
        }
    }
    chain.inclusion = incl_count.iter().map(|&c| c as f64 / chain.retained as f64).collect();
    Ok(chain)
}

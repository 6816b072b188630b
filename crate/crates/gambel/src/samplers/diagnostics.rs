use serde::{Deserialize, Serialize};

use super::ChainDraws;
use crate::error::{Error, Result};

/// Posterior summary of one scalar parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub ess: f64,
    pub rhat: f64,
}

fn check(chains: &[Vec<f64>]) -> Result<usize> {
    let n = chains.first().map_or(0, |c| c.len());
    if chains.is_empty() || n < 4 {
        return Err(Error::Config("diagnostics need at least one chain of 4 or more draws".into()));
    }
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::Dimension("chains differ in length".into()));
    }
    Ok(n)
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

// (within-chain variance W, between-chain variance of means B/n)
fn w_and_b(parts: &[&[f64]]) -> (f64, f64) {
    let stats: Vec<(f64, f64)> = parts.iter().map(|c| mean_var(c)).collect();
    let m = parts.len() as f64;
    let w = stats.iter().map(|s| s.1).sum::<f64>() / m;
    let grand = stats.iter().map(|s| s.0).sum::<f64>() / m;
    let b_n = if parts.len() > 1 { stats.iter().map(|s| (s.0 - grand).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    (w, b_n)
}

/// Split-R̂: each chain is halved and the halves compared. Constant chains at
/// different values give +∞.
pub fn split_rhat(chains: &[Vec<f64>]) -> Result<f64> {
    let n = check(chains)?;
    let half = n / 2;
    let parts: Vec<&[f64]> = chains.iter().flat_map(|c| [&c[..half], &c[n - half..]]).collect();
    let (w, b_n) = w_and_b(&parts);
    if w == 0.0 {
        return Ok(if b_n == 0.0 { 1.0 } else { f64::INFINITY });
    }
    let nf = half as f64;
    let var_plus = (nf - 1.0) / nf * w + b_n;
    Ok((var_plus / w).sqrt())
}

/// Multi-chain effective sample size with Geyer's initial monotone sequence.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> Result<f64> {
    let n = check(chains)?;
    let m = chains.len();
    let parts: Vec<&[f64]> = chains.iter().map(|c| c.as_slice()).collect();
    let (w, b_n) = w_and_b(&parts);
    let nf = n as f64;
    let var_plus = (nf - 1.0) / nf * w + b_n;
    let total = (m * n) as f64;
    if !(var_plus > 0.0) {
        return Ok(f64::NAN);
    }
    let centred: Vec<Vec<f64>> = chains
        .iter()
        .map(|c| {
            let mu = c.iter().sum::<f64>() / nf;
            c.iter().map(|v| v - mu).collect()
        })
        .collect();
    // average autocovariance at lag t, biased estimator
    let acov = |t: usize| -> f64 {
        centred.iter().map(|c| c[..n - t].iter().zip(&c[t..]).map(|(a, b)| a * b).sum::<f64>() / nf).sum::<f64>() / m as f64
    };
    let rho = |t: usize| 1.0 - (w - acov(t) * nf / (nf - 1.0)) / var_plus;
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut t = 0;
    while t + 1 < n {
        let mut pair = rho(t) + rho(t + 1);
        if pair <= 0.0 {
            break;
        }
        pair = pair.min(prev);
        tau += 2.0 * pair;
        prev = pair;
        t += 2;
    }
    let tau = tau.max(1.0 / total.log10().max(1.0));
    Ok(total / tau)
}

/// ESS and R̂ for every θ_j and σ².
pub fn chain_diagnostics(draws: &ChainDraws) -> Result<Vec<ParamSummary>> {
    if !draws.config.keep_draws {
        return Err(Error::Config("diagnostics need stored draws".into()));
    }
    let mut out = Vec::with_capacity(draws.p + 1);
    let summarise = |name: String, cols: Vec<Vec<f64>>| -> Result<ParamSummary> {
        let all: Vec<f64> = cols.iter().flatten().copied().collect();
        let (mean, var) = mean_var(&all);
        Ok(ParamSummary { name, mean, sd: var.sqrt(), ess: effective_sample_size(&cols)?, rhat: split_rhat(&cols)? })
    };
    for j in 0..draws.p {
        out.push(summarise(format!("theta_{}", j + 1), draws.theta_columns(j))?);
    }
    out.push(summarise("sigma2".into(), draws.sigma2_columns())?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn iid(seed: u64, m: usize, n: usize) -> Vec<Vec<f64>> {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        (0..m).map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect()).collect()
    }

    #[test]
    fn iid_chains() {
        let c = iid(1, 4, 2000);
        let ess = effective_sample_size(&c).unwrap();
        assert!((ess / 8000.0 - 1.0).abs() < 0.1, "{ess}");
        assert!(split_rhat(&c).unwrap() < 1.01);
    }

    #[test]
    fn duplicated_chains() {
        let c = iid(2, 1, 1000);
        let dup = vec![c[0].clone(), c[0].clone()];
        let r = split_rhat(&dup).unwrap();
        let single = split_rhat(&c).unwrap();
        assert!(r.is_finite() && (r - 1.0).abs() < 0.05);
        assert!(single.is_finite());
    }

    #[test]
    fn constant_chains() {
        let c = vec![vec![1.0; 10], vec![2.0; 10]];
        assert_eq!(split_rhat(&c).unwrap(), f64::INFINITY);
        assert!(split_rhat(&[vec![1.0; 3]]).is_err());
    }

    #[test]
    fn autocorrelated_chain_has_lower_ess() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let rho: f64 = 0.9;
        let mut chains = Vec::new();
        for _ in 0..2 {
            let mut x = 0.0;
            let c: Vec<f64> = (0..20_000)
                .map(|_| {
                    let e: f64 = StandardNormal.sample(&mut r);
                    x = rho * x + (1.0 - rho * rho).sqrt() * e;
                    x
                })
                .collect();
            chains.push(c);
        }
        // AR(1): ESS/N = (1-ρ)/(1+ρ)
        let ess = effective_sample_size(&chains).unwrap();
        let want = 40_000.0 * (1.0 - rho) / (1.0 + rho);
        assert!((ess / want - 1.0).abs() < 0.2, "{ess} vs {want}");
    }
}

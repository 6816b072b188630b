//! Shrinkage diagnostics: hazard rates, Lorenz curves and Gini indexes,
//! curvature calibration, shrinkage profiles and tail fits.

mod curvature;
mod inequality;

pub use curvature::*;
pub use inequality::*;

use serde::{Deserialize, Serialize};

use crate::distributions::{gambel_pdf, Consts, GambelParams};
use crate::error::{domain, Error, Result};
use crate::quad::tanh_sinh;
use crate::samplers::PriorSpec;

/// Hazard rates of the folded law on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardReport {
    pub grid: Vec<f64>,
    pub rates: Vec<f64>,
    /// First grid point after which the rates never increase; +inf if none.
    pub monotone_decreasing_from: f64,
    /// sup |x r(x) − aq| over grid points x ≥ 1e3, if there are any.
    pub asymptote_check: Option<f64>,
}

/// r(x) = f(x)/S(x) for the folded law, with S computed directly in the tail.
pub fn hazard_rate(params: &GambelParams, x: f64) -> Result<f64> {
    let c = Consts::new(params)?;
    hazard_with(&c, x)
}

fn hazard_with(c: &Consts, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("hazard needs finite x > 0, got {x}"));
    }
    let f = 2.0 * c.pdf(x)?;
    let s = c.sf(x)?;
    if s <= 0.0 {
        return Err(Error::Quadrature(format!("survival underflow at x={x}")));
    }
    Ok(f / s)
}

pub fn hazard_profile(params: &GambelParams, grid: &[f64]) -> Result<HazardReport> {
    let c = Consts::new(params)?;
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("hazard grid must be positive and strictly increasing");
    }
    let rates = grid.iter().map(|&x| hazard_with(&c, x)).collect::<Result<Vec<_>>>()?;
    let mut start = grid.len() - 1;
    while start > 0 && rates[start] <= rates[start - 1] {
        start -= 1;
    }
    let monotone_decreasing_from = if start == grid.len() - 1 && grid.len() > 1 { f64::INFINITY } else { grid[start] };
    let aq = params.a * params.q;
    let asymptote_check = grid
        .iter()
        .zip(&rates)
        .filter(|(x, _)| **x >= 1e3)
        .map(|(x, r)| (x * r - aq).abs())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    Ok(HazardReport { grid: grid.to_vec(), rates, monotone_decreasing_from, asymptote_check })
}

/// Least-squares slope of ln f against ln θ over 21 points in [1e2, 1e4].
pub fn tail_index_fit(params: &GambelParams) -> Result<f64> {
    let pts = (0..21)
        .map(|i| {
            let t = 10f64.powf(2.0 + 0.1 * i as f64);
            Ok((t.ln(), gambel_pdf(params, t, true)?.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// ξ = (C / (p n^ρ ln n))^{q/2}.
pub fn xi_consistent(q: f64, p: usize, n: usize, rho: f64, c: f64) -> Result<f64> {
    if !(q > 0.0) || p < 1 || n < 2 || !(rho > 0.0) || !(c > 0.0) {
        return domain(format!("xi_consistent needs q>0, p>=1, n>=2, rho>0, C>0; got q={q} p={p} n={n} rho={rho} C={c}"));
    }
    let nf = n as f64;
    Ok((c / (p as f64 * nf.powf(rho) * nf.ln())).powf(q / 2.0))
}

/// Posterior mean E[θ|y] under y ~ N(θ, 1) for each y in the grid.
pub fn shrinkage_profile(prior: &PriorSpec, y_grid: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    prior.validate()?;
    if let PriorSpec::SpikeSlab { slab_variance: v, alpha, beta } = *prior {
        let w = alpha / (alpha + beta);
        return Ok(y_grid
            .iter()
            .map(|&y| {
                // log N(y|0,1+v) - log N(y|0,1)
                let lr = -0.5 * (1.0 + v).ln() + 0.5 * y * y * v / (1.0 + v);
                let odds = (w / (1.0 - w)).ln() + lr;
                let incl = 1.0 / (1.0 + (-odds).exp());
                incl * v / (1.0 + v) * y
            })
            .collect());
    }
    y_grid.iter().map(|&y| posterior_mean(prior, y, rel_tol)).collect()
}

fn posterior_mean(prior: &PriorSpec, y: f64, rel_tol: f64) -> Result<f64> {
    let mut cuts = vec![y - 40.0, y, y + 40.0];
    if y.abs() < 40.0 && y != 0.0 {
        cuts.push(0.0);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut num = 0.0;
    let mut den = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut err = None;
        let mut weight = |t: f64| -> f64 {
            match prior.density(t) {
                Ok(p) if p.is_finite() => p * (-0.5 * (y - t) * (y - t)).exp(),
                Ok(_) => 0.0,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        // evaluate from the nearer endpoint so the origin is approached exactly
        let d = tanh_sinh(|_x, dl, dr| weight(if dl <= dr { lo + dl } else { hi - dr }), lo, hi, rel_tol)?;
        let n = tanh_sinh(
            |_x, dl, dr| {
                let t = if dl <= dr { lo + dl } else { hi - dr };
                t * weight(t)
            },
            lo,
            hi,
            rel_tol,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        num += n.value;
        den += d.value;
    }
    if !(den > 0.0) {
        return Err(Error::Quadrature(format!("posterior normaliser vanished at y={y}")));
    }
    Ok(num / den)
}

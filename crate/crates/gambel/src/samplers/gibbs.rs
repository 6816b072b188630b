use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::data::{Chain, ChainState, RegressionData, SuffStats};
use super::variates::{box_sweep, rand_gig, rand_tilted_stable, rand_truncated_exp, rand_truncated_gamma};
use super::{McmcConfig, PriorSpec};
use crate::error::{Error, Result};
use crate::specfun::phi_unchecked;

// D_j = γ_j²/(φ²τ_j) is kept inside this range so that 1/D stays finite
const MIN_VAR: f64 = 1e-150;
const MAX_VAR: f64 = 1e150;
const MIN_SIGMA2: f64 = 1e-300;
const MAX_SIGMA2: f64 = 1e300;

#[derive(Debug, Clone, Copy)]
enum ScaleLayer {
    Hier { a: f64, b: f64, xi: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    q: f64,
    phi: f64,
    phiq: f64,
    layer: ScaleLayer,
}

impl Shape {
    fn new(prior: &PriorSpec) -> Result<Self> {
        prior.validate()?;
        let (q, layer) = match *prior {
            PriorSpec::Gambel(g) => (g.q, ScaleLayer::Hier { a: g.a, b: g.b, xi: g.xi }),
            // exponential power with q = 1 and standard deviation γ has rate √2/γ
            PriorSpec::Laplace { rate } => (1.0, ScaleLayer::Fixed(std::f64::consts::SQRT_2 / rate)),
            PriorSpec::SpikeSlab { .. } => {
                return Err(Error::Config("the scale-mixture samplers need a Gambel or Laplace prior".into()))
            }
        };
        let phi = phi_unchecked(q);
        Ok(Shape { q, phi, phiq: phi.powf(q), layer })
    }

    fn init_gamma(&self) -> f64 {
        match self.layer {
            ScaleLayer::Hier { .. } => 1.0,
            ScaleLayer::Fixed(g) => g,
        }
    }

    fn update_lambda<R: Rng + ?Sized>(&self, s: &mut ChainState, rng: &mut R) {
        if let ScaleLayer::Hier { a, b, xi } = self.layer {
            let g = Gamma::new(a + b, 1.0).expect("positive shape");
            for j in 0..s.lambda.len() {
                let rate = s.gamma[j].powf(self.q) + xi;
                s.lambda[j] = (g.sample(rng) / rate).max(f64::MIN_POSITIVE);
            }
        }
    }
}

pub(crate) fn draw_sigma2<R: Rng + ?Sized>(prior: (f64, f64), n: usize, rss: f64, rng: &mut R) -> f64 {
    let shape = prior.0 + 0.5 * n as f64;
    let g: f64 = Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
    ((prior.1 + 0.5 * rss) / g).clamp(MIN_SIGMA2, MAX_SIGMA2)
}

fn update_sigma2<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    config: &McmcConfig,
    s: &mut ChainState,
    rng: &mut R,
) {
    s.sigma2 = match config.sigma2_fixed {
        Some(v) => v,
        None => draw_sigma2(config.sigma2_prior, stats.n, stats.rss(data, &s.theta), rng),
    };
}

fn initial_sigma2(stats: &SuffStats, config: &McmcConfig) -> f64 {
    config.sigma2_fixed.unwrap_or(if stats.y_var > 0.0 { stats.y_var } else { 1.0 })
}

fn drive<R: Rng + ?Sized>(
    p: usize,
    config: &McmcConfig,
    mut state: ChainState,
    mut step: impl FnMut(&mut ChainState, usize, &mut R) -> Result<()>,
    hook: &mut dyn FnMut(&ChainState),
    rng: &mut R,
) -> Result<Chain> {
    let mut chain = Chain::new(p, config);
    for it in 0..config.n_iter {
        step(&mut state, it, rng)?;
        if config.keeps(it) {
            hook(&state);
            chain.record(it, &state.theta, state.sigma2, config.keep_draws);
        }
    }
    Ok(chain)
}

/// One chain of the uniform-mixture sampler (p ≤ n, full column rank).
pub fn gibbs_low_dim<R: Rng + ?Sized>(data: &RegressionData, prior: &PriorSpec, config: &McmcConfig, rng: &mut R) -> Result<Chain> {
    config.validate()?;
    data.validate()?;
    low_dim(data, &SuffStats::new(data), prior, config, rng)
}

pub(crate) fn low_dim<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    prior: &PriorSpec,
    config: &McmcConfig,
    rng: &mut R,
) -> Result<Chain> {
    low_dim_traced(data, stats, prior, config, &mut |_| {}, rng)
}

pub(crate) fn low_dim_traced<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    prior: &PriorSpec,
    config: &McmcConfig,
    hook: &mut dyn FnMut(&ChainState),
    rng: &mut R,
) -> Result<Chain> {
    let sh = Shape::new(prior)?;
    let p = stats.p;
    if !stats.no_information() {
        if p > stats.n {
            return Err(Error::RankDeficient(format!("p = {p} exceeds n = {}; use the high-dimensional sampler", stats.n)));
        }
        check_rank(stats)?;
    }
    let u_prior = Gamma::new(1.0 + 1.0 / sh.q, 1.0 / sh.phiq).expect("valid gamma");
    let state = ChainState {
        theta: DVector::zeros(p),
        sigma2: initial_sigma2(stats, config),
        gamma: DVector::from_element(p, sh.init_gamma()),
        lambda: DVector::from_element(p, 1.0),
        u: Some(DVector::from_iterator(p, (0..p).map(|_| u_prior.sample(rng)))),
        tau: None,
    };
    let inv_q = 1.0 / sh.q;
    let mut bounds = vec![0.0; p];
    let step = |s: &mut ChainState, _it: usize, rng: &mut R| -> Result<()> {
        let u = s.u.as_mut().expect("low-dim state has u");
        for j in 0..p {
            bounds[j] = s.gamma[j] * u[j].powf(inv_q);
        }
        box_sweep(p, |j, k| stats.g(j, k), &stats.xty, s.sigma2, &bounds, &mut s.theta, stats.is_diagonal(), config.tmvn_sweeps, rng)?;
        update_sigma2(data, stats, config, s, rng);
        let u = s.u.as_mut().expect("low-dim state has u");
        for j in 0..p {
            let lower = (s.theta[j].abs() / s.gamma[j]).powf(sh.q);
            u[j] = rand_truncated_exp(sh.phiq, lower, rng)?;
        }
        if let ScaleLayer::Hier { b, .. } = sh.layer {
            for j in 0..p {
                let lower = s.theta[j].abs() / u[j].powf(inv_q);
                let lam = s.lambda[j];
                let y = rand_truncated_gamma(b - inv_q, lam * lower.powf(sh.q), rng)?;
                s.gamma[j] = (y / lam).powf(inv_q).max(lower * (1.0 + 4.0 * f64::EPSILON)).max(f64::MIN_POSITIVE);
            }
        }
        sh.update_lambda(s, rng);
        Ok(())
    };
    drive(p, config, state, step, hook, rng)
}

fn check_rank(stats: &SuffStats) -> Result<()> {
    let p = stats.p;
    let gram = match &stats.gram {
        None => {
            return if stats.gram_diag.iter().all(|&v| v > 0.0) {
                Ok(())
            } else {
                Err(Error::RankDeficient("a column of X is identically zero; use the high-dimensional sampler".into()))
            };
        }
        Some(g) => g,
    };
    // scale to unit diagonal so the pivot test is dimensionless
    let d: Vec<f64> = (0..p).map(|j| gram[(j, j)].sqrt()).collect();
    if d.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::RankDeficient("a column of X is identically zero; use the high-dimensional sampler".into()));
    }
    let corr = DMatrix::from_fn(p, p, |i, j| gram[(i, j)] / (d[i] * d[j]));
    match corr.cholesky() {
        Some(ch) if ch.l().diagonal().iter().all(|&v| v > 1e-7) => Ok(()),
        _ => Err(Error::RankDeficient("X'X is singular; use the high-dimensional sampler".into())),
    }
}

/// One chain of the normal-mixture sampler; any p and n.
pub fn gibbs_high_dim<R: Rng + ?Sized>(data: &RegressionData, prior: &PriorSpec, config: &McmcConfig, rng: &mut R) -> Result<Chain> {
    config.validate()?;
    data.validate()?;
    high_dim(data, &SuffStats::new(data), prior, config, rng)
}

pub(crate) fn high_dim<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    prior: &PriorSpec,
    config: &McmcConfig,
    rng: &mut R,
) -> Result<Chain> {
    high_dim_traced(data, stats, prior, config, &mut |_| {}, rng)
}

pub(crate) fn high_dim_traced<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    prior: &PriorSpec,
    config: &McmcConfig,
    hook: &mut dyn FnMut(&ChainState),
    rng: &mut R,
) -> Result<Chain> {
    let sh = Shape::new(prior)?;
    if sh.q > 2.0 {
        return Err(Error::Config(format!("the high-dimensional sampler needs q <= 2, got {}", sh.q)));
    }
    let p = stats.p;
    let stable = sh.q < 2.0;
    let state = ChainState {
        theta: DVector::zeros(p),
        sigma2: initial_sigma2(stats, config),
        gamma: DVector::from_element(p, sh.init_gamma()),
        lambda: DVector::from_element(p, 1.0),
        u: None,
        // at q = 2 the mixing law is a point mass at 2, giving θ | γ ~ N(0, γ²)
        tau: Some(DVector::from_element(p, if stable { 1.0 } else { 2.0 })),
    };
    let inv_q = 1.0 / sh.q;
    let phi2 = sh.phi * sh.phi;
    let mut prior_var = DVector::zeros(p);
    let step = |s: &mut ChainState, it: usize, rng: &mut R| -> Result<()> {
        let tau = s.tau.as_ref().expect("high-dim state has tau");
        for j in 0..p {
            prior_var[j] = (s.gamma[j] * s.gamma[j] / (phi2 * tau[j])).clamp(MIN_VAR, MAX_VAR);
        }
        draw_normal_theta(data, stats, s.sigma2, &prior_var, &mut s.theta, rng)
            .map_err(|e| Error::Sampler(format!("iteration {}: {e}", it + 1)))?;
        update_sigma2(data, stats, config, s, rng);
        if let ScaleLayer::Hier { b, .. } = sh.layer {
            for j in 0..p {
                let chi = 2.0 * (sh.phi * s.theta[j].abs()).powf(sh.q);
                let y = rand_gig(b - inv_q, chi, 2.0 * s.lambda[j], rng)?;
                s.gamma[j] = y.powf(inv_q).max(f64::MIN_POSITIVE);
            }
        }
        if stable {
            let tau = s.tau.as_mut().expect("high-dim state has tau");
            for j in 0..p {
                let r = s.theta[j] / s.gamma[j];
                let tilt = 0.5 * phi2 * r * r;
                tau[j] = rand_tilted_stable(0.5 * sh.q, tilt.min(1e300), rng)?.max(f64::MIN_POSITIVE);
            }
        }
        sh.update_lambda(s, rng);
        Ok(())
    };
    drive(p, config, state, step, hook, rng)
}

// θ ~ N(A⁻¹X'y/σ², A⁻¹), A = X'X/σ² + diag(1/d)
fn draw_normal_theta<R: Rng + ?Sized>(
    data: &RegressionData,
    stats: &SuffStats,
    sigma2: f64,
    d: &DVector<f64>,
    theta: &mut DVector<f64>,
    rng: &mut R,
) -> Result<()> {
    let p = stats.p;
    let n = stats.n;
    let z = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(rng)));
    if stats.is_diagonal() {
        for j in 0..p {
            let a = stats.gram_diag[j] / sigma2 + 1.0 / d[j];
            theta[j] = stats.xty[j] / sigma2 / a + z[j] / a.sqrt();
        }
        return Ok(());
    }
    let gram = stats.gram.as_ref().expect("dense gram");
    if p <= n {
        let mut a = gram / sigma2;
        for j in 0..p {
            a[(j, j)] += 1.0 / d[j];
        }
        let ch = a.cholesky().ok_or_else(|| Error::Sampler("posterior precision is not positive definite".into()))?;
        let mean = ch.solve(&(&stats.xty / sigma2));
        let noise = ch
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::Sampler("triangular solve failed".into()))?;
        *theta = mean + noise;
    } else {
        // Woodbury form: only an n×n system is factorised
        let sd = 1.0 / sigma2.sqrt();
        let phi = &data.x * sd;
        let u = d.zip_map(&z, |dj, zj| dj.sqrt() * zj);
        let delta = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)));
        let v = &phi * &u + delta;
        let phid = DMatrix::from_fn(n, p, |i, j| phi[(i, j)] * d[j]);
        let mut m = &phid * phi.transpose();
        for i in 0..n {
            m[(i, i)] += 1.0;
        }
        let ch = m.cholesky().ok_or_else(|| Error::Sampler("Woodbury system is not positive definite".into()))?;
        let w = ch.solve(&(&data.y * sd - v));
        *theta = u + phid.tr_mul(&w);
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Sampler("non-finite coefficient draw".into()));
    }
    Ok(())
}

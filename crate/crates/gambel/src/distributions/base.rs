use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{EPParams, G3BParams, GB2Params, GGParams};
use crate::error::{domain, Result};
use crate::specfun::{ln_beta, ln_gamma, p_unchecked, phi_unchecked, reg_inc_beta};

pub(crate) fn rademacher<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// EP density qφ exp(-(φ|x|/λ)^q) / (2λΓ(1/q)).
pub fn ep_pdf(params: &EPParams, x: f64) -> Result<f64> {
    params.validate()?;
    let q = params.q;
    let phi = phi_unchecked(q);
    let lam = params.sd();
    let ln = q.ln() + phi.ln() - (phi * x.abs() / lam).powf(q) - std::f64::consts::LN_2 - lam.ln() - ln_gamma(1.0 / q);
    Ok(ln.exp())
}

/// EP cumulative distribution function.
pub fn ep_cdf(params: &EPParams, x: f64) -> Result<f64> {
    params.validate()?;
    let phi = phi_unchecked(params.q);
    let p = p_unchecked(1.0 / params.q, (phi * x.abs() / params.sd()).powf(params.q));
    Ok(if x >= 0.0 { 0.5 + 0.5 * p } else { 0.5 - 0.5 * p })
}

pub fn ep_sample<R: Rng + ?Sized>(params: &EPParams, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let q = params.q;
    let scale = params.sd() / phi_unchecked(q);
    let g = Gamma::new(1.0 / q, 1.0).expect("positive shape");
    Ok((0..n).map(|_| rademacher(rng) * scale * g.sample(rng).powf(1.0 / q)).collect())
}

/// GG density and cdf at x > 0.
pub fn gg_pdf_cdf(params: &GGParams, x: f64) -> Result<(f64, f64)> {
    params.validate()?;
    if !(x > 0.0) {
        return domain(format!("GG support is x > 0, got {x}"));
    }
    let GGParams { a, d, q } = *params;
    let r = x / a;
    let ln = q.ln() + (d - 1.0) * r.ln() - r.powf(q) - a.ln() - ln_gamma(d / q);
    Ok((ln.exp(), p_unchecked(d / q, r.powf(q))))
}

pub fn gg_sample<R: Rng + ?Sized>(params: &GGParams, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let g = Gamma::new(params.d / params.q, 1.0).expect("positive shape");
    Ok((0..n).map(|_| params.a * g.sample(rng).powf(1.0 / params.q)).collect())
}

pub fn gb2_pdf(params: &GB2Params, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x > 0.0) {
        return domain(format!("GB2 support is x > 0, got {x}"));
    }
    let GB2Params { p, q_scale, a, b } = *params;
    let w = (x / q_scale).ln();
    let ln = p.ln() + (a * p - 1.0) * w - (a + b) * (p * w).exp().ln_1p() - q_scale.ln() - ln_beta(a, b);
    Ok(ln.exp())
}

pub fn gb2_cdf(params: &GB2Params, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let w = (x / params.q_scale).powf(params.p);
    reg_inc_beta(params.a, params.b, w / (1.0 + w))
}

pub fn gb2_sample<R: Rng + ?Sized>(params: &GB2Params, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let ga = Gamma::new(params.a, 1.0).expect("positive shape");
    let gb = Gamma::new(params.b, 1.0).expect("positive shape");
    Ok((0..n)
        .map(|_| {
            let r = ga.sample(rng).ln() - gb.sample(rng).ln();
            params.q_scale * (r / params.p).exp()
        })
        .collect())
}

pub fn g3b_pdf(params: &G3BParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("G3B support is (0,1), got {x}"));
    }
    let G3BParams { a, b, xi } = *params;
    let ln = a * xi.ln() + (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()
        - (a + b) * (1.0 - (1.0 - xi) * x).ln()
        - ln_beta(a, b);
    Ok(ln.exp())
}

/// κ = X₁/(X₀+X₁) with X₁ ~ Gamma(a, rate β₁), X₀ ~ Gamma(b, rate β₀), ξ = β₁/β₀.
pub fn g3b_sample<R: Rng + ?Sized>(params: &G3BParams, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let ga = Gamma::new(params.a, 1.0).expect("positive shape");
    let gb = Gamma::new(params.b, 1.0).expect("positive shape");
    Ok((0..n)
        .map(|_| {
            let x1 = ga.sample(rng);
            let x0 = params.xi * gb.sample(rng);
            x1 / (x1 + x0)
        })
        .collect())
}

/// Law of λ² = (1-κ)/κ when κ ~ G3B(a, b, ξ): GB2(1, ξ, b, a).
pub fn weight_to_coefficient(g3b: &G3BParams) -> GB2Params {
    GB2Params { p: 1.0, q_scale: g3b.xi, a: g3b.b, b: g3b.a }
}

use serde::{Deserialize, Serialize};

use crate::distributions::{gambel_moment, quantile_with, Consts, GambelParams};
use crate::error::{domain, Error, Result};
use crate::quad::{gauss_kronrod, QuadTol};
use crate::specfun::{gamma_sign, gen_hyp, int_distance, ln_gamma, SpecialValue};

/// Default upper limit for integrals whose mean diverges.
pub const DEFAULT_TRUNCATION: f64 = 1e6;

const NODES_PER_DECADE: usize = 64;
const DECADES: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzResult {
    pub p_grid: Vec<f64>,
    pub l_values: Vec<f64>,
    pub gini: f64,
    pub truncation_bound: f64,
    /// True iff the mean exists (aq > 1); otherwise the curve is of the law truncated at `truncation_bound`.
    pub mean_finite: bool,
}

/// Gini index G = 1 − ∫S² / ∫S over (0, truncation), S the survival of `density`.
pub fn gini_numeric<F: FnMut(f64) -> f64>(mut density: F, truncation: f64, tol: QuadTol) -> Result<f64> {
    if !(truncation > 0.0) || !truncation.is_finite() {
        return domain(format!("truncation must be positive and finite, got {truncation}"));
    }
    // log-spaced nodes x_0 < ... < x_m = T, m even
    let mut m = (DECADES * NODES_PER_DECADE as f64) as usize;
    m += m % 2;
    let u0 = truncation.ln() - DECADES * std::f64::consts::LN_10;
    let h = (truncation.ln() - u0) / m as f64;
    let xs: Vec<f64> = (0..=m).map(|i| if i == m { truncation } else { (u0 + h * i as f64).exp() }).collect();

    let mut s = vec![0.0; m + 1];
    s[m] = gauss_kronrod(&mut density, truncation, f64::INFINITY, tol)?.value;
    for i in (0..m).rev() {
        s[i] = s[i + 1] + gauss_kronrod(&mut density, xs[i], xs[i + 1], tol)?.value;
    }
    // Simpson in u = ln x on x S(x) and x S(x)^2, the first panel taken as flat
    let mut i1 = xs[0] * (1.0 + s[0]) / 2.0;
    let mut i2 = xs[0] * (1.0 + s[0] * s[0]) / 2.0;
    for k in (0..m).step_by(2) {
        let g1 = |j: usize| xs[j] * s[j];
        let g2 = |j: usize| xs[j] * s[j] * s[j];
        i1 += h / 3.0 * (g1(k) + 4.0 * g1(k + 1) + g1(k + 2));
        i2 += h / 3.0 * (g2(k) + 4.0 * g2(k + 1) + g2(k + 2));
    }
    if !(i1 > 0.0) {
        return Err(Error::Quadrature("survival integral vanished".into()));
    }
    Ok((1.0 - i2 / i1).clamp(0.0, 1.0))
}

// ∫₀^t x f(x) dx for the folded law
fn partial_mean(c: &Consts, t: f64) -> Result<f64> {
    let tol = QuadTol { abs: 0.0, rel: 1e-11, max_subdivisions: 4000 };
    let mut err = None;
    let mut xf = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match c.pdf(x) {
            Ok(f) if f.is_finite() => 2.0 * x * f,
            Ok(_) => 0.0,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let head = gauss_kronrod(&mut xf, 0.0, t.min(1.0), tol)?.value;
    let tail = if t > 1.0 {
        gauss_kronrod(|u: f64| { let x = u.exp(); x * xf(x) }, 0.0, t.ln(), tol)?.value
    } else {
        0.0
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(head + tail)
}

/// Lorenz curve by quadrature of the partial mean up to the quantile.
pub fn lorenz_numeric(params: &GambelParams, p_grid: &[f64], truncation: Option<f64>) -> Result<LorenzResult> {
    let c = Consts::new(params)?;
    if p_grid.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return domain("Lorenz p grid must lie in (0,1)");
    }
    let t = truncation.unwrap_or(DEFAULT_TRUNCATION);
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("truncation must be positive and finite, got {t}"));
    }
    let mean_finite = params.mean_finite();
    let mu = if mean_finite { gambel_moment(params, 1)? } else { partial_mean(&c, t)? };
    let mut l_values = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let th = quantile_with(&c, p)?;
        let upper = if mean_finite { th } else { th.min(t) };
        l_values.push((partial_mean(&c, upper)? / mu).clamp(0.0, 1.0));
    }
    let tol = QuadTol { abs: 0.0, rel: 1e-10, max_subdivisions: 2000 };
    let gini = gini_numeric(|x| if x > 0.0 { 2.0 * c.pdf(x).unwrap_or(0.0) } else { 0.0 }, t, tol)?;
    Ok(LorenzResult { p_grid: p_grid.to_vec(), l_values, gini, truncation_bound: t, mean_finite })
}

/// Closed-form Lorenz curve through two ₂F₂ series at Z = (φθ*)^q/ξ.
/// Needs a finite mean (aq > 1). Integer b − 1/q is handled by symmetric averages
/// over b ± δ and b ± 2δ combined by Richardson extrapolation.
pub fn lorenz_closed_form(params: &GambelParams, p: f64) -> Result<f64> {
    let c = Consts::new(params)?;
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0,1), got {p}"));
    }
    if !params.mean_finite() {
        return Err(Error::MomentNonexistent { k: 1, aq: params.a * params.q });
    }
    let zz = c.z(quantile_with(&c, p)?);
    let (q, a, b) = (params.q, params.a, params.b);
    let l = if int_distance(b - 1.0 / q) < 1e-6 {
        let d = 1e-3;
        let avg = |h: f64| -> Result<f64> { Ok(0.5 * (lorenz_terms(q, a, b - h, zz)? + lorenz_terms(q, a, b + h, zz)?)) };
        (4.0 * avg(d)? - avg(2.0 * d)?) / 3.0
    } else {
        lorenz_terms(q, a, b, zz)?
    };
    Ok(l.clamp(0.0, 1.0))
}

fn lorenz_terms(q: f64, a: f64, b: f64, zz: f64) -> Result<f64> {
    let s = 1.0 / q;
    let lz = zz.ln();
    let h1 = gen_hyp(&[2.0 * s, a + s], &[1.0 + 2.0 * s, 1.0 + s - b], zz)?;
    let h2 = gen_hyp(&[a + b, b + s], &[b + s + 1.0, 1.0 + b - s], zz)?;
    let (l1, g1) = ln_abs(&h1);
    let (l2, g2) = ln_abs(&h2);
    let t1 = gamma_sign(b - s) * g1 * (2.0 * s * lz + (0.5 * q).ln() + ln_gamma(a + s) + ln_gamma(b - s) - ln_gamma(a + b) + l1).exp();
    let t2 = gamma_sign(s - b) * g2 * ((b + s) * lz + ln_gamma(s - b) - (b + s).ln() + l2).exp();
    let i = t1 + t2;
    let scale = ln_gamma(a + b) - ln_gamma(2.0 * s) - ln_gamma(a - s) - ln_gamma(b + s);
    let err = (t1.abs() * (h1.est_error + 1e-15) + t2.abs() * (h2.est_error + 1e-15)) / i.abs();
    if !(err < 1e-6) {
        return Err(Error::Convergence(format!("Lorenz series cancels at Z={zz} (relative error {err:.1e})")));
    }
    Ok(i * scale.exp())
}

fn ln_abs(v: &SpecialValue) -> (f64, f64) {
    if v.log_scaled {
        (v.value, 1.0)
    } else {
        (v.value.abs().ln(), v.value.signum())
    }
}

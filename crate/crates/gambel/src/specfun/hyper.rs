use super::{SeriesControl, SpecialValue};
use crate::error::{domain, Error, Result};

const LN_RESCALE: f64 = 575.646_273_248_511_4; // 250 ln 10
const RESCALE: f64 = 1e-250;

fn is_nonpos_int(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Generalized hypergeometric series pFq(a; b; z) with default control.
pub fn gen_hyp(a: &[f64], b: &[f64], z: f64) -> Result<SpecialValue> {
    gen_hyp_with(a, b, z, &SeriesControl::default())
}

pub fn gen_hyp_with(a: &[f64], b: &[f64], z: f64, ctrl: &SeriesControl) -> Result<SpecialValue> {
    ctrl.validate()?;
    if !z.is_finite() {
        return domain(format!("pFq argument must be finite, got {z}"));
    }
    // cancel identical numerator/denominator pairs
    let mut num: Vec<f64> = a.to_vec();
    let mut den: Vec<f64> = Vec::with_capacity(b.len());
    for &bj in b {
        if let Some(i) = num.iter().position(|&ai| ai == bj) {
            num.swap_remove(i);
        } else {
            den.push(bj);
        }
    }
    if let Some(&bad) = den.iter().find(|&&x| is_nonpos_int(x)) {
        return Err(Error::Pole(format!("denominator parameter {bad} is a nonpositive integer")));
    }
    if z == 0.0 {
        return Ok(SpecialValue::linear(1.0, 0.0));
    }
    let (p, q) = (num.len(), den.len());
    if p > q + 1 {
        return domain(format!("{p}F{q} diverges for nonzero argument"));
    }
    if p == q + 1 && z.abs() >= 1.0 {
        return domain(format!("{p}F{q} needs |z| < 1, got {z}"));
    }

    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut max_term = 1.0f64;
    let mut log_offset = 0.0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let mut ratio = z / (kf + 1.0);
        for &ai in &num {
            ratio *= ai + kf;
        }
        for &bj in &den {
            ratio /= bj + kf;
        }
        term *= ratio;
        if term == 0.0 {
            let err = f64::EPSILON * (kf + 1.0) * max_term / sum.abs();
            return finish(sum, log_offset, err);
        }
        // Kahan summation
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_term = max_term.max(term.abs());
        if sum.abs() > 1e250 || term.abs() > 1e250 {
            sum *= RESCALE;
            term *= RESCALE;
            comp *= RESCALE;
            max_term *= RESCALE;
            log_offset += LN_RESCALE;
        }
        let r = ratio.abs();
        // sum past the requested tolerance: the extra terms are cheap and
        // callers combine values with cancellation
        if r < 0.5 && term.abs() <= 1e-3 * ctrl.rel_tol * sum.abs() {
            let tail = term.abs() * r / (1.0 - r);
            let err = tail / sum.abs() + f64::EPSILON * (kf + 2.0) * max_term / sum.abs();
            return finish(sum, log_offset, err);
        }
    }
    Err(Error::Convergence(format!(
        "{p}F{q} at z={z} not converged after {} terms",
        ctrl.max_terms
    )))
}

fn finish(sum: f64, log_offset: f64, err: f64) -> Result<SpecialValue> {
    if log_offset == 0.0 {
        return Ok(SpecialValue::linear(sum, err));
    }
    if sum <= 0.0 {
        return Err(Error::Convergence("series overflowed with a nonpositive sum".into()));
    }
    Ok(SpecialValue { value: sum.ln() + log_offset, log_scaled: true, est_error: err })
}

/// Kummer's M(x, y, z) = 1F1(x; y; z).
pub fn kummer_m(x: f64, y: f64, z: f64) -> Result<SpecialValue> {
    kummer_m_with(x, y, z, &SeriesControl::default())
}

pub fn kummer_m_with(x: f64, y: f64, z: f64, ctrl: &SeriesControl) -> Result<SpecialValue> {
    if is_nonpos_int(y) {
        return Err(Error::Pole(format!("M(x, y, z) has a pole at y = {y}")));
    }
    if z >= 0.0 || is_nonpos_int(x) {
        return gen_hyp_with(&[x], &[y], z, ctrl);
    }
    // Kummer transformation turns the alternating series into a positive one
    let t = gen_hyp_with(&[y - x], &[y], -z, ctrl)?;
    if t.log_scaled {
        return Ok(SpecialValue { value: t.value + z, ..t });
    }
    let err = t.est_error + f64::EPSILON * z.abs();
    Ok(SpecialValue::linear(t.value * z.exp(), err))
}

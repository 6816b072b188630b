//! Numerical integration: adaptive Gauss-Kronrod and double-exponential rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol { abs: 0.0, rel: 1e-10, max_subdivisions: 2000 }
    }
}

impl QuadTol {
    pub fn rel(rel: f64) -> Self {
        QuadTol { rel, ..Default::default() }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64 + ?Sized>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_finite<F: FnMut(f64) -> f64 + ?Sized>(f: &mut F, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(f, a, b);
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    heap.push(Panel { a, b, value: v, error: e });
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if heap.len() >= tol.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "subdivision limit reached on [{a}, {b}], estimate {total} +- {err}"
            )));
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // panel cannot be split further; accept what we have
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
    }
    // resum to shed accumulated rounding from the running updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, evals })
}

/// Adaptive 7/15-point Gauss-Kronrod on [a, b]; either limit may be infinite.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult> {
    gk_dyn(&mut f, a, b, tol)
}

fn gk_dyn(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    if a > b {
        let r = gk_dyn(f, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive_finite(f, a, b, tol),
        (true, false) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                f(a + t / s) / (s * s)
            };
            adaptive_finite(&mut g, 0.0, 1.0, tol)
        }
        (false, true) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                f(b - t / s) / (s * s)
            };
            adaptive_finite(&mut g, 0.0, 1.0, tol)
        }
        (false, false) => {
            let left = gk_dyn(f, f64::NEG_INFINITY, 0.0, tol)?;
            let right = gk_dyn(f, 0.0, f64::INFINITY, tol)?;
            Ok(QuadResult {
                value: left.value + right.value,
                error: left.error + right.error,
                evals: left.evals + right.evals,
            })
        }
    }
}

const TS_TMAX: f64 = 6.0;
const DE_MAX_LEVEL: u32 = 8;

/// Tanh-sinh rule on a finite interval. The integrand receives
/// `(x, x - a, b - x)` with the two distances computed without cancellation,
/// so endpoint singularities can be evaluated accurately.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    let half = 0.5 * (b - a);
    let mut evals = 0;
    let node = |t: f64, f: &mut F| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // complement distance to the nearer endpoint: (b-a) e/(1+e)
        let near = (b - a) * e / (1.0 + e);
        let far = (b - a) - near;
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if near == 0.0 || w == 0.0 {
            return 0.0;
        }
        let (x, dl, dr) = if t >= 0.0 { (b - near, far, near) } else { (a + near, near, far) };
        w * f(x, dl, dr)
    };
    let mut h = 1.0;
    let mut sum = node(0.0, &mut f);
    evals += 1;
    let mut k = 1;
    while k as f64 * h <= TS_TMAX {
        let t = k as f64 * h;
        sum += node(t, &mut f) + node(-t, &mut f);
        evals += 2;
        k += 1;
    }
    let mut est = sum * h;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TS_TMAX {
            let t = k as f64 * h;
            sum += node(t, &mut f) + node(-t, &mut f);
            evals += 2;
            k += 2;
        }
        let new = sum * h;
        let err = (new - est).abs();
        est = new;
        if !est.is_finite() {
            return Err(Error::Quadrature("non-finite tanh-sinh sum".into()));
        }
        if level >= 3 && err <= rel_tol * est.abs() {
            return Ok(QuadResult { value: est, error: err, evals });
        }
    }
    Err(Error::Quadrature(format!("tanh-sinh did not reach tolerance {rel_tol} on [{a}, {b}], estimate {est}")))
}

const ES_TLO: f64 = -6.5;
const ES_THI: f64 = 5.0;

/// Exp-sinh rule on [a, inf). The integrand receives `(x, x - a)`; `scale`
/// sets where the rule's nodes are centred relative to `a`.
pub fn exp_sinh<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, scale: f64, rel_tol: f64) -> Result<QuadResult> {
    let mut evals = 0;
    let node = |t: f64, f: &mut F| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let d = scale * u.exp();
        let w = FRAC_PI_2 * t.cosh() * d;
        if d == 0.0 || !d.is_finite() {
            return 0.0;
        }
        let v = f(a + d, d);
        if v == 0.0 {
            return 0.0;
        }
        w * v
    };
    let mut h = 1.0;
    let mut sum = 0.0;
    let kmin = (ES_TLO / h).ceil() as i64;
    let kmax = (ES_THI / h).floor() as i64;
    for k in kmin..=kmax {
        sum += node(k as f64 * h, &mut f);
        evals += 1;
    }
    let mut est = sum * h;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let kmin = (ES_TLO / h).ceil() as i64;
        let kmax = (ES_THI / h).floor() as i64;
        let mut k = kmin;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= kmax {
            sum += node(k as f64 * h, &mut f);
            evals += 1;
            k += 2;
        }
        let new = sum * h;
        let err = (new - est).abs();
        est = new;
        if !est.is_finite() {
            return Err(Error::Quadrature("non-finite exp-sinh sum".into()));
        }
        if level >= 3 && err <= rel_tol * est.abs() {
            return Ok(QuadResult { value: est, error: err, evals });
        }
    }
    Err(Error::Quadrature(format!("exp-sinh did not reach tolerance {rel_tol} on [{a}, inf), estimate {est}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let r = gauss_kronrod(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, QuadTol::default()).unwrap();
        assert!((r.value - 3.75).abs() < 1e-13);
    }

    #[test]
    fn gk_semi_infinite() {
        let r = gauss_kronrod(|x: f64| (-x).exp(), 0.0, f64::INFINITY, QuadTol::rel(1e-12)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = gauss_kronrod(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, QuadTol::rel(1e-12)).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // Beta(0.3, 0.6) normaliser = Γ(0.3)Γ(0.6)/Γ(0.9)
        let r = tanh_sinh(|_, dl: f64, dr: f64| dl.powf(-0.7) * dr.powf(-0.4), 0.0, 1.0, 1e-13).unwrap();
        let exact = 4.168_914_178_907_89;
        assert!((r.value - exact).abs() < 1e-11 * exact, "{}", r.value);
    }

    #[test]
    fn exp_sinh_gamma_integral() {
        // Γ(0.4) = ∫ s^{-0.6} e^{-s}
        let r = exp_sinh(|x: f64, _| x.powf(-0.6) * (-x).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((r.value - 2.218_159_543_757_688).abs() < 1e-12, "{}", r.value);
        // algebraic decay
        let r = exp_sinh(|x: f64, _| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }
}

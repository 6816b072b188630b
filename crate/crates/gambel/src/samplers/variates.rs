use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{domain, Result};

fn unif<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // open interval (0, 1)
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

fn gamma1<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0).expect("positive shape").sample(rng)
}

/// Draw from y^{s-1} e^{-y} restricted to y > c. Any real s is allowed when c > 0.
pub fn rand_truncated_gamma<R: Rng + ?Sized>(s: f64, c: f64, rng: &mut R) -> Result<f64> {
    if !s.is_finite() || !(c >= 0.0) || !c.is_finite() {
        return domain(format!("truncated gamma needs finite shape and lower >= 0, got s={s}, c={c}"));
    }
    if c == 0.0 {
        if s <= 0.0 {
            return domain(format!("untruncated gamma needs shape > 0, got {s}"));
        }
        return Ok(gamma1(s, rng));
    }
    if s > 1.0 {
        if c <= s - 1.0 {
            // truncation below the mode: plain rejection keeps at least half the mass
            loop {
                let y = gamma1(s, rng);
                if y > c {
                    return Ok(y);
                }
            }
        }
        // shifted exponential envelope matched to the log-slope at c
        let r = 1.0 - (s - 1.0) / c;
        loop {
            let y = c + exp1(rng) / r;
            let log_acc = (s - 1.0) * (y / c).ln() - (1.0 - r) * (y - c);
            if unif(rng).ln() <= log_acc {
                return Ok(y);
            }
        }
    }
    if c >= 1.0 {
        loop {
            let y = c + exp1(rng);
            if unif(rng).ln() <= (s - 1.0) * (y / c).ln() {
                return Ok(y);
            }
        }
    }
    // s <= 1, c < 1: power envelope on (c, 1), exponential on (1, inf)
    let lc = c.ln();
    let m1 = if s == 0.0 { (-c).exp() * (-lc) } else { (-c).exp() * (-(s * lc).exp_m1()) / s };
    let m2 = (-1.0f64).exp();
    loop {
        if unif(rng) * (m1 + m2) < m1 {
            let u = unif(rng);
            let y = if s == 0.0 {
                c.powf(1.0 - u)
            } else {
                ((1.0 - u) * (s * lc).exp_m1()).ln_1p().exp().powf(1.0 / s)
            };
            let y = y.clamp(c, 1.0);
            if unif(rng).ln() <= -(y - c) {
                return Ok(y);
            }
        } else {
            let y = 1.0 + exp1(rng);
            if unif(rng).ln() <= (s - 1.0) * y.ln() {
                return Ok(y);
            }
        }
    }
}

/// GG(a, d, q) conditioned on exceeding `lower`; x = a y^{1/q} with y a gamma(d/q) variable truncated at (lower/a)^q.
pub fn rand_truncated_gg<R: Rng + ?Sized>(a: f64, d: f64, q: f64, lower: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0) || !(q > 0.0) || !d.is_finite() {
        return domain(format!("truncated GG needs a > 0, q > 0, finite d; got a={a}, d={d}, q={q}"));
    }
    if !(lower >= 0.0) {
        return domain(format!("truncated GG needs lower >= 0, got {lower}"));
    }
    let c = (lower / a).powf(q);
    let y = rand_truncated_gamma(d / q, c, rng)?;
    Ok((a * y.powf(1.0 / q)).max(lower))
}

/// lower + Exp(rate).
pub fn rand_truncated_exp<R: Rng + ?Sized>(rate: f64, lower: f64, rng: &mut R) -> Result<f64> {
    if !(rate > 0.0) || !(lower >= 0.0) {
        return domain(format!("truncated exponential needs rate > 0 and lower >= 0, got {rate}, {lower}"));
    }
    Ok(lower + exp1(rng) / rate)
}

// standard normal truncated to (l, inf), l >= 0 handled by the exponential proposal
fn tail_normal<R: Rng + ?Sized>(l: f64, rng: &mut R) -> f64 {
    if l < 0.45 {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > l {
                return z;
            }
        }
    }
    let alpha = 0.5 * (l + (l * l + 4.0).sqrt());
    loop {
        let z = l + exp1(rng) / alpha;
        if unif(rng).ln() <= -0.5 * (z - alpha) * (z - alpha) {
            return z;
        }
    }
}

/// Standard normal restricted to (lo, hi).
fn std_truncated_normal<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if lo < 0.0 && hi > 0.0 {
        if hi - lo < 2.5066282746310002 {
            // uniform proposal under the peak
            loop {
                let z = lo + (hi - lo) * unif(rng);
                if unif(rng).ln() <= -0.5 * z * z {
                    return z;
                }
            }
        }
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > lo && z < hi {
                return z;
            }
        }
    }
    // one-sided region: mirror onto the positive axis
    let (l, h, sign) = if lo >= 0.0 { (lo, hi, 1.0) } else { (-hi, -lo, -1.0) };
    if h - l < 0.3 || (h.is_finite() && h - l < 2.0 / (l + 1.0)) {
        // narrow window: uniform proposal bounded by the density at l
        loop {
            let z = l + (h - l) * unif(rng);
            if unif(rng).ln() <= -0.5 * (z * z - l * l) {
                return sign * z;
            }
        }
    }
    loop {
        let z = tail_normal(l, rng);
        if z < h {
            return sign * z;
        }
    }
}

/// N(mean, sd²) restricted to (lo, hi).
pub fn rand_truncated_normal<R: Rng + ?Sized>(mean: f64, sd: f64, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
    if !(sd > 0.0) || !(lo < hi) || mean.is_nan() {
        return domain(format!("truncated normal needs sd > 0 and lo < hi, got sd={sd}, [{lo}, {hi}]"));
    }
    let z = std_truncated_normal((lo - mean) / sd, (hi - mean) / sd, rng);
    Ok((mean + sd * z).clamp(lo, hi))
}

/// Systematic-scan Gibbs sweeps for N(m, Σ) with precision Σ⁻¹ = `prec`
/// restricted to the box |θ_j| < bounds_j. Updates `theta` in place.
pub fn rand_box_truncated_normal<R: Rng + ?Sized>(
    prec: &nalgebra::DMatrix<f64>,
    prec_mean: &nalgebra::DVector<f64>,
    bounds: &[f64],
    theta: &mut nalgebra::DVector<f64>,
    sweeps: usize,
    rng: &mut R,
) -> Result<()> {
    let p = theta.len();
    if prec.nrows() != p || prec.ncols() != p || prec_mean.len() != p || bounds.len() != p {
        return Err(crate::Error::Dimension("box-truncated normal inputs disagree in size".into()));
    }
    for j in 0..p {
        if !(bounds[j] > 0.0) || theta[j].abs() >= bounds[j] {
            return Err(crate::Error::Sampler(format!("infeasible start at coordinate {j}")));
        }
    }
    box_sweep(p, |j, k| prec[(j, k)], prec_mean, 1.0, bounds, theta, false, sweeps, rng)
}

/// Coordinate sweeps for precision g/s2 and precision-mean h/s2 inside the box.
#[allow(clippy::too_many_arguments)]
pub(crate) fn box_sweep<R: Rng + ?Sized, G: Fn(usize, usize) -> f64>(
    p: usize,
    g: G,
    h: &nalgebra::DVector<f64>,
    s2: f64,
    bounds: &[f64],
    theta: &mut nalgebra::DVector<f64>,
    diagonal: bool,
    sweeps: usize,
    rng: &mut R,
) -> Result<()> {
    for _ in 0..sweeps {
        for j in 0..p {
            let c = bounds[j];
            let gjj = g(j, j);
            if gjj <= 0.0 {
                theta[j] = c * (2.0 * unif(rng) - 1.0);
                continue;
            }
            let off: f64 = if diagonal { 0.0 } else { (0..p).filter(|&k| k != j).map(|k| g(j, k) * theta[k]).sum() };
            let m = (h[j] - off) / gjj;
            let v = rand_truncated_normal(m, (s2 / gjj).sqrt(), -c, c, rng)?;
            theta[j] = if v.abs() < c { v } else { v.signum() * c * (1.0 - f64::EPSILON) };
        }
    }
    Ok(())
}

/// GIG with density ∝ x^{order-1} exp(-(chi/x + psi x)/2).
pub fn rand_gig<R: Rng + ?Sized>(order: f64, chi: f64, psi: f64, rng: &mut R) -> Result<f64> {
    if !order.is_finite() || !(chi >= 0.0) || !(psi >= 0.0) || !chi.is_finite() || !psi.is_finite() {
        return domain(format!("invalid GIG parameters order={order}, chi={chi}, psi={psi}"));
    }
    if (chi == 0.0 && order <= 0.0) || (psi == 0.0 && order >= 0.0) {
        return domain(format!("GIG(order={order}, chi={chi}, psi={psi}) is improper"));
    }
    if chi == 0.0 {
        return Ok(gamma1(order, rng) * 2.0 / psi);
    }
    if psi == 0.0 {
        return Ok(chi / (2.0 * gamma1(-order, rng)));
    }
    let omega = (psi * chi).sqrt();
    let alpha = (chi / psi).sqrt();
    let lam = order.abs();
    if omega < 1e-10 && lam > 0.0 {
        // the standardized law is numerically a gamma (or inverse gamma) limit
        let x = if order > 0.0 { gamma1(order, rng) * 2.0 / psi } else { chi / (2.0 * gamma1(-order, rng)) };
        return Ok(x);
    }
    let x = if lam > 2.0 || omega > 3.0 {
        gig_rou_shift(lam, omega, rng)
    } else if lam >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        gig_rou_noshift(lam, omega, rng)
    } else {
        gig_concave(lam, omega, rng)
    };
    Ok(if order < 0.0 { alpha / x } else { alpha * x })
}

fn gig_mode(lam: f64, omega: f64) -> f64 {
    if lam >= 1.0 {
        ((lam - 1.0) * (lam - 1.0) + omega * omega).sqrt() + (lam - 1.0)
    } else {
        omega * omega / (((1.0 - lam) * (1.0 - lam) + omega * omega).sqrt() + (1.0 - lam))
    }
    .max(f64::MIN_POSITIVE)
        / omega
}

fn gig_rou_noshift<R: Rng + ?Sized>(lam: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lam - 1.0);
    let s = 0.25 * omega;
    let xm = gig_mode(lam, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lam + 1.0) + ((lam + 1.0) * (lam + 1.0) + omega * omega).sqrt()) / omega;
    let um = (0.5 * (lam + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * unif(rng);
        let v = unif(rng);
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn gig_rou_shift<R: Rng + ?Sized>(lam: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lam - 1.0);
    let s = 0.25 * omega;
    let xm = gig_mode(lam, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    // extremal points of the shifted bounding rectangle, roots of a cubic (Cardano)
    let a = -(2.0 * (lam + 1.0) / omega + xm);
    let b = 2.0 * (lam - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let fi = (-q / (2.0 * (-p * p * p / 27.0).sqrt())).clamp(-1.0, 1.0).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (fi / 3.0).cos() - a / 3.0;
    let y2 = fak * (fi / 3.0 + 4.0 / 3.0 * PI).cos() - a / 3.0;
    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + unif(rng) * (uplus - uminus);
        let v = unif(rng);
        let x = u / v + xm;
        if x <= 0.0 {
            continue;
        }
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

// log-concave-free envelope for 0 <= lam < 1 and small omega
fn gig_concave<R: Rng + ?Sized>(lam: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = gig_mode(lam, omega);
    let x0 = omega / (1.0 - lam);
    let k0 = ((lam - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lam - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lam == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lam * ((2.0 / omega).powf(lam) - x0.powf(lam))
        };
        k2 = (2.0 / omega).powf(lam - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * unif(rng);
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else {
            v -= a0;
            if v <= a1 {
                if lam == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lam) + lam / k1 * v).powf(1.0 / lam);
                    hx = k1 * x.powf(lam - 1.0);
                }
            } else {
                v -= a1;
                let a = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * a).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        if !(x > 0.0) || !x.is_finite() {
            continue;
        }
        let u = unif(rng) * hx;
        if u.ln() <= (lam - 1.0) * x.ln() - 0.5 * omega * (x + 1.0 / x) {
            return x;
        }
    }
}

/// Positive α-stable variable with Laplace transform exp(-s^α) (Kanter's representation).
pub fn rand_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("positive stable needs alpha in (0,1), got {alpha}"));
    }
    Ok(kanter(alpha, rng))
}

fn kanter<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = unif(rng);
    let e = exp1(rng);
    let a = ((alpha * PI * u).sin() / (PI * u).sin().powf(1.0 / alpha)) * (((1.0 - alpha) * PI * u).sin() / e).powf((1.0 - alpha) / alpha);
    a
}

// Kanter-standard stable tilted by exp(-t x): sum of m = ceil(t^α) pieces,
// each a stable with Laplace exponent s^α/m accepted with probability exp(-t x).
fn tilted_standard<R: Rng + ?Sized>(alpha: f64, t: f64, rng: &mut R) -> f64 {
    let m = t.powf(alpha).ceil().max(1.0);
    let scale = m.powf(-1.0 / alpha);
    let mut total = 0.0;
    for _ in 0..m as u64 {
        loop {
            let x = scale * kanter(alpha, rng);
            if unif(rng).ln() <= -t * x {
                total += x;
                break;
            }
        }
    }
    total
}

/// Draw from p_α(x) e^{-tilt x} / normaliser, where p_α has Laplace transform exp(-(2s)^α)
/// (so p_{1/2}(x) = (2π x³)^{-1/2} e^{-1/(2x)}).
pub fn rand_tilted_stable<R: Rng + ?Sized>(alpha: f64, tilt: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("tilted stable needs alpha in (0,1), got {alpha}"));
    }
    if !(tilt >= 0.0) || !tilt.is_finite() {
        return domain(format!("tilt must be finite and >= 0, got {tilt}"));
    }
    if alpha == 0.5 {
        // inverse Gaussian: x^{-3/2} exp(-1/(2x) - tilt x)
        if tilt == 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            return Ok(1.0 / (z * z));
        }
        return rand_gig(-0.5, 1.0, 2.0 * tilt, rng);
    }
    Ok(2.0 * tilted_standard(alpha, 2.0 * tilt, rng))
}

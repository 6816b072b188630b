use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::base::rademacher;
use super::GambelParams;
use crate::error::{domain, Error, Result};
use crate::specfun::{
    gamma_ratio, gamma_sign, gen_hyp, int_distance, ln_beta, ln_gamma, p_unchecked, phi_unchecked, q_unchecked,
    tricomi_psi,
};

const SERIES_SWITCH: f64 = 30.0;
const SERIES_TOL: f64 = 1e-11;
const MIX_STEP: f64 = 0.25;
const MIX_MAX_NODES: usize = 40_000;

/// Quantities shared by every evaluation for one parameter set.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Consts {
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    pub phi: f64,
    /// ln of Γ(a+1/q)/Γ(1/q) · q/(2B(a,b)) · φ/ξ^{1/q}
    pub ln_c: f64,
    pub ln_beta: f64,
}

impl Consts {
    pub fn new(p: &GambelParams) -> Result<Self> {
        p.validate()?;
        let GambelParams { q, a, b, xi } = *p;
        let phi = phi_unchecked(q);
        let ln_beta = ln_beta(a, b);
        let ln_c = ln_gamma(a + 1.0 / q) - ln_gamma(1.0 / q) + q.ln() - std::f64::consts::LN_2 - ln_beta + phi.ln()
            - xi.ln() / q;
        Ok(Consts { q, a, b, xi, phi, ln_c, ln_beta })
    }

    /// z = (φ t)^q / ξ
    pub fn z(&self, t: f64) -> f64 {
        (self.q * (self.phi * t).ln() - self.xi.ln()).exp()
    }

    fn psi_args(&self) -> (f64, f64) {
        (self.a + 1.0 / self.q, 1.0 + 1.0 / self.q - self.b)
    }

    /// Unfolded density at |θ| = t.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t == 0.0 {
            if self.b <= 1.0 / self.q {
                return Ok(f64::INFINITY);
            }
            // Ψ(x, y, 0) = Γ(1-y)/Γ(1+x-y) for y < 1
            let ln = self.ln_c + ln_gamma(self.b - 1.0 / self.q) - ln_gamma(self.a + self.b);
            return Ok(ln.exp());
        }
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        let (x, y) = self.psi_args();
        let z = self.z(t);
        if z == 0.0 {
            return self.pdf(0.0);
        }
        if z == f64::INFINITY {
            return Ok(0.0);
        }
        let psi = tricomi_psi(x, y, z)?;
        Ok((self.ln_c + psi.ln()).exp())
    }

    /// Unfolded density and its derivative at t > 0.
    pub fn pdf_d1(&self, t: f64) -> Result<(f64, f64)> {
        let (x, y) = self.psi_args();
        let z = self.z(t);
        let f = (self.ln_c + tricomi_psi(x, y, z)?.ln()).exp();
        // dΨ/dz = -x Ψ(x+1, y+1, z), dz/dt = q z / t
        let d = -(self.ln_c + x.ln() + tricomi_psi(x + 1.0, y + 1.0, z)?.ln() + self.q.ln() + z.ln() - t.ln()).exp();
        Ok((f, d))
    }

    fn cdf_series(&self, zz: f64) -> Option<f64> {
        let (q, a, b) = (self.q, self.a, self.b);
        let s = 1.0 / q;
        if int_distance(b - s) < 1e-8 || zz > SERIES_SWITCH {
            return None;
        }
        let h1 = gen_hyp(&[s, a + s], &[1.0 + s, 1.0 + s - b], zz).ok()?;
        let h2 = gen_hyp(&[b, a + b], &[1.0 + b, 1.0 + b - s], zz).ok()?;
        if h1.log_scaled || h2.log_scaled {
            return None;
        }
        let lz = zz.ln();
        let c1 = gamma_sign(b - s)
            * (s * lz + q.ln() + ln_gamma(a + s) + ln_gamma(b - s) - ln_gamma(a + b) - ln_gamma(s) - self.ln_beta).exp();
        let c2 = gamma_sign(s - b) * (b * lz + ln_gamma(s - b) - b.ln() - ln_gamma(s) - self.ln_beta).exp();
        let t1 = c1 * h1.value;
        let t2 = c2 * h2.value;
        let f = t1 + t2;
        let err = (t1.abs() * (h1.est_error + 1e-14) + t2.abs() * (h2.est_error + 1e-14)) / f.abs();
        if err < SERIES_TOL && f > -SERIES_TOL && f < 1.0 + SERIES_TOL {
            Some(f.clamp(0.0, 1.0))
        } else {
            None
        }
    }

    // F = E_W[P(1/q, z W)] and S = E_W[Q(1/q, z W)] with W = G_a/G_b.
    // In w = ln W the integrand is analytic and decays exponentially, so the
    // trapezoidal rule converges geometrically in 1/h.
    fn mixture(&self, zz: f64, upper: bool) -> f64 {
        let (a, b, s, lb) = (self.a, self.b, 1.0 / self.q, self.ln_beta);
        let lz = zz.ln();
        let term = |w: f64| {
            let x = (lz + w).exp();
            let k = if upper { q_unchecked(s, x) } else { p_unchecked(s, x) };
            if k == 0.0 {
                return 0.0;
            }
            k * (a * w - (a + b) * softplus(w) - lb).exp()
        };
        // start at the peak of a coarse scan so the outward sweeps only see decaying tails
        let mut c = 0.0;
        let mut peak = -1.0;
        for k in -40..=40 {
            let w = 2.0 * k as f64;
            let t = term(w);
            if t > peak {
                peak = t;
                c = w;
            }
        }
        let mut sum = term(c);
        for dir in [1.0, -1.0] {
            let mut small = 0;
            for k in 1..MIX_MAX_NODES {
                let t = term(c + dir * MIX_STEP * k as f64);
                sum += t;
                if t <= 1e-17 * sum {
                    small += 1;
                    if small == 3 {
                        break;
                    }
                } else {
                    small = 0;
                }
            }
        }
        (sum * MIX_STEP).clamp(0.0, 1.0)
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(0.0);
        }
        if t == f64::INFINITY {
            return Ok(1.0);
        }
        let zz = self.z(t);
        if zz == 0.0 {
            return Ok(0.0);
        }
        if let Some(f) = self.cdf_series(zz) {
            return Ok(f);
        }
        if zz < 1.0 {
            Ok(self.mixture(zz, false))
        } else {
            Ok(1.0 - self.mixture(zz, true))
        }
    }

    pub fn sf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(1.0);
        }
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        let zz = self.z(t);
        if zz == 0.0 {
            return Ok(1.0);
        }
        if zz < 1.0 {
            let f = match self.cdf_series(zz) {
                Some(f) => f,
                None => self.mixture(zz, false),
            };
            return Ok(1.0 - f);
        }
        if zz == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(self.mixture(zz, true))
    }
}

/// Gambel density. Unfolded it is symmetric in θ; folded (θ ≥ 0) it is doubled.
/// At θ = 0 returns +inf when the density is singular there.
pub fn gambel_pdf(params: &GambelParams, theta: f64, folded: bool) -> Result<f64> {
    let c = Consts::new(params)?;
    if folded && theta < 0.0 {
        return domain(format!("folded density needs theta >= 0, got {theta}"));
    }
    if theta.is_nan() {
        return domain("theta is NaN");
    }
    let f = c.pdf(theta)?;
    Ok(if folded { 2.0 * f } else { f })
}

/// Unfolded density and its first derivative at θ > 0.
pub fn gambel_pdf_d1(params: &GambelParams, theta: f64) -> Result<(f64, f64)> {
    let c = Consts::new(params)?;
    if !(theta > 0.0) || !theta.is_finite() {
        return domain(format!("derivative needs finite theta > 0, got {theta}"));
    }
    c.pdf_d1(theta)
}

/// Cdf of the folded Gambel law, P(|θ| ≤ t).
pub fn gambel_cdf(params: &GambelParams, theta: f64) -> Result<f64> {
    Consts::new(params)?.cdf(theta)
}

/// Survival function of the folded law, P(|θ| > t), accurate in the far tail.
pub fn gambel_sf(params: &GambelParams, theta: f64) -> Result<f64> {
    Consts::new(params)?.sf(theta)
}

/// Cdf of the symmetric (unfolded) law.
pub fn gambel_cdf_unfolded(params: &GambelParams, theta: f64) -> Result<f64> {
    let c = Consts::new(params)?;
    if theta >= 0.0 {
        Ok(0.5 + 0.5 * c.cdf(theta)?)
    } else {
        Ok(0.5 * c.sf(-theta)?)
    }
}

/// Inverse of the folded cdf.
pub fn gambel_quantile(params: &GambelParams, p: f64) -> Result<f64> {
    let c = Consts::new(params)?;
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("quantile needs p in (0,1), got {p}"));
    }
    quantile_with(&c, p)
}

pub(crate) fn quantile_with(c: &Consts, p: f64) -> Result<f64> {
    // increasing in u = ln t; use the survival side above the median
    let g = |u: f64| -> Result<f64> {
        let t = u.exp();
        if p <= 0.5 {
            Ok(c.cdf(t)? - p)
        } else {
            Ok((1.0 - p) - c.sf(t)?)
        }
    };
    let mut lo = (1e-12f64).ln();
    let mut glo = g(lo)?;
    while glo > 0.0 {
        lo -= 10.0;
        if lo < -690.0 {
            return Err(Error::Bracketing(format!("no lower bracket for p={p}")));
        }
        glo = g(lo)?;
    }
    let mut hi = 0.0f64;
    let mut ghi = g(hi)?;
    while ghi < 0.0 {
        hi += std::f64::consts::LN_2;
        if hi > 690.0 {
            return Err(Error::Bracketing(format!("no upper bracket for p={p}")));
        }
        ghi = g(hi)?;
    }
    if glo == 0.0 {
        return Ok(lo.exp());
    }
    if ghi == 0.0 {
        return Ok(hi.exp());
    }
    // Illinois regula falsi with bisection safeguard
    let mut side = 0i32;
    for _ in 0..200 {
        let mut m = (lo * ghi - hi * glo) / (ghi - glo);
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let gm = g(m)?;
        if gm.abs() < 1e-13 || (hi - lo) < 1e-15 * hi.abs().max(1.0) {
            return Ok(m.exp());
        }
        if gm < 0.0 {
            lo = m;
            glo = gm;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = m;
            ghi = gm;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// E|θ|^k, defined for k < aq.
pub fn gambel_moment(params: &GambelParams, k: u32) -> Result<f64> {
    params.validate()?;
    let GambelParams { q, a, b, xi } = *params;
    let kf = k as f64;
    if kf >= a * q {
        return Err(Error::MomentNonexistent { k, aq: a * q });
    }
    if k == 0 {
        return Ok(1.0);
    }
    let phi = phi_unchecked(q);
    let g = gamma_ratio(&[(1.0 + kf) / q, a - kf / q, b + kf / q], &[1.0 / q, a, b])?;
    let ln = kf * (xi.ln() / q - phi.ln()) + g.ln();
    Ok(ln.exp())
}

pub fn gambel_variance(params: &GambelParams) -> Result<f64> {
    gambel_moment(params, 2)
}

/// Exact kurtosis E θ⁴ / (E θ²)².
pub fn gambel_kurtosis(params: &GambelParams) -> Result<f64> {
    let m2 = gambel_moment(params, 2)?;
    Ok(gambel_moment(params, 4)? / (m2 * m2))
}

/// Large-parameter kurtosis approximation (3a(qb+2)/(b(qa-4)))^{2/q}.
pub fn gambel_kurtosis_approx(params: &GambelParams) -> Result<f64> {
    params.validate()?;
    let GambelParams { q, a, b, .. } = *params;
    if a <= 4.0 / q {
        return domain(format!("kurtosis approximation needs a > 4/q, got a={a}, q={q}"));
    }
    Ok((3.0 * a * (q * b + 2.0) / (b * (q * a - 4.0))).powf(2.0 / q))
}

/// Draws θ = X/Y with X ~ GG(ξ^{1/q}, 1, q) and Y ~ GB2(q, φ(q), a, b).
pub fn gambel_sample<R: Rng + ?Sized>(params: &GambelParams, rng: &mut R, n: usize, folded: bool) -> Result<Vec<f64>> {
    params.validate()?;
    let GambelParams { q, a, b, xi } = *params;
    let phi = phi_unchecked(q);
    let g0 = Gamma::new(1.0 / q, 1.0).expect("positive shape");
    let ga = Gamma::new(a, 1.0).expect("positive shape");
    let gb = Gamma::new(b, 1.0).expect("positive shape");
    let lxi = xi.ln();
    let lphi = phi.ln();
    Ok((0..n)
        .map(|_| {
            let l = (lxi + g0.sample(rng).ln() - ga.sample(rng).ln() + gb.sample(rng).ln()) / q - lphi;
            let t = l.exp();
            if folded {
                t
            } else {
                rademacher(rng) * t
            }
        })
        .collect())
}

// ln(1 + e^w)
fn softplus(w: f64) -> f64 {
    if w > 0.0 {
        w + (-w).exp().ln_1p()
    } else {
        w.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_kronrod, QuadTol};

    fn hs() -> GambelParams {
        GambelParams::horseshoe()
    }

    #[test]
    fn singular_flag() {
        assert!(hs().singular_at_zero());
        assert!(!GambelParams::new(2.0, 0.5, 0.52, 1.0).unwrap().singular_at_zero());
        assert_eq!(gambel_pdf(&hs(), 0.0, false).unwrap(), f64::INFINITY);
        assert!(gambel_pdf(&GambelParams::new(2.0, 0.5, 0.52, 1.0).unwrap(), 0.0, false).unwrap().is_finite());
    }

    #[test]
    fn horseshoe_mixture_oracle() {
        // ∫₀¹ EP(1 | 2, κ) G3B(κ | ½, ½, 1) dκ by Gauss-Kronrod
        let f = |k: f64| {
            if k <= 0.0 || k >= 1.0 {
                return 0.0;
            }
            let lam2 = (1.0 - k) / k;
            (-0.5 / lam2).exp() / (2.0 * std::f64::consts::PI * lam2).sqrt() / (std::f64::consts::PI * (k * (1.0 - k)).sqrt())
        };
        let want = gauss_kronrod(f, 0.0, 1.0, QuadTol { abs: 0.0, rel: 1e-13, max_subdivisions: 5000 }).unwrap().value;
        let got = gambel_pdf(&hs(), 1.0, false).unwrap();
        assert!(((got - want) / want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = GambelParams::new(1.3, 0.8, 0.9, 2.0).unwrap();
        for &t in &[0.05, 0.7, 3.0, 40.0] {
            let (_, d) = gambel_pdf_d1(&p, t).unwrap();
            let h = 1e-6 * t;
            let fd = (gambel_pdf(&p, t + h, false).unwrap() - gambel_pdf(&p, t - h, false).unwrap()) / (2.0 * h);
            assert!(((d - fd) / d).abs() < 1e-6, "t={t}: {d} vs {fd}");
        }
    }

    #[test]
    fn moments() {
        let p = GambelParams::new(2.0, 5.0, 5.0, 1.0).unwrap();
        assert_eq!(gambel_moment(&p, 0).unwrap(), 1.0);
        assert!((gambel_variance(&p).unwrap() - 1.25).abs() < 1e-12);
        assert!((gambel_kurtosis(&p).unwrap() - 4.8).abs() < 1e-11);
        assert!((gambel_moment(&p, 1).unwrap() - 0.843_370_871_820_275_3).abs() < 1e-12);
        assert!(matches!(gambel_moment(&hs(), 1), Err(Error::MomentNonexistent { .. })));
    }

    #[test]
    fn kurtosis_approximation() {
        let p = GambelParams::new(2.0, 5.0, 5.0, 1.0).unwrap();
        assert!((gambel_kurtosis_approx(&p).unwrap() - 6.0).abs() < 1e-12);
        let p = GambelParams::new(2.0, 50.0, 50.0, 1.0).unwrap();
        let r = gambel_kurtosis_approx(&p).unwrap() / gambel_kurtosis(&p).unwrap();
        assert!((r - 1.0).abs() < 0.05);
        assert!(gambel_kurtosis_approx(&GambelParams::new(2.0, 2.0, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn cdf_limits_and_branches_agree() {
        let p = GambelParams::new(1.0, 2.3, 2.7, 1.5).unwrap();
        let c = Consts::new(&p).unwrap();
        for &t in &[0.01, 0.3, 1.0, 4.0, 10.0] {
            let zz = c.z(t);
            let Some(s) = c.cdf_series(zz) else {
                assert!(zz > 2.0, "series rejected at z={zz}");
                continue;
            };
            let m = if zz < 1.0 { c.mixture(zz, false) } else { 1.0 - c.mixture(zz, true) };
            assert!((s - m).abs() < 1e-10, "t={t}: {s} vs {m}");
        }
        assert_eq!(gambel_cdf(&p, 0.0).unwrap(), 0.0);
        assert!(gambel_cdf(&p, 1e9).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn quantile_round_trip() {
        for p in [hs(), GambelParams::new(1.0, 2.0, 2.0, 3.0).unwrap(), GambelParams::new(0.5, 5.0, 5.0, 5.0).unwrap()] {
            for &t in &[0.1, 1.0, 10.0] {
                let u = gambel_cdf(&p, t).unwrap();
                let back = gambel_quantile(&p, u).unwrap();
                assert!(((back - t) / t).abs() < 1e-8, "{p:?} t={t} back={back}");
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::distributions::{Consts, GambelParams};
use crate::error::{domain, Error, Result};

pub const PMCURV_LOWER: f64 = 1e-6;
pub const PMCURV_UPPER: f64 = 50.0;

const GRID_POINTS: usize = 400;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub pm_curv: f64,
    /// P(|θ| < pm_curv)
    pub modal_mass: f64,
}

/// A density on x > 0 with an analytic first derivative.
pub trait CurvatureDensity {
    /// (f(x), f′(x))
    fn value_d1(&self, x: f64) -> Result<(f64, f64)>;
    /// Prior mass of |θ| < x.
    fn mass_within(&self, x: f64) -> Result<f64>;
}

/// The unfolded Gambel density.
#[derive(Debug, Clone, Copy)]
pub struct GambelCurvature {
    c: Consts,
}

impl GambelCurvature {
    pub fn new(params: &GambelParams) -> Result<Self> {
        Ok(GambelCurvature { c: Consts::new(params)? })
    }
}

impl CurvatureDensity for GambelCurvature {
    fn value_d1(&self, x: f64) -> Result<(f64, f64)> {
        self.c.pdf_d1(x)
    }

    fn mass_within(&self, x: f64) -> Result<f64> {
        self.c.cdf(x)
    }
}

/// Laplace(rate) taken on the magnitude |θ|, i.e. the Exp(rate) density.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceCurvature {
    pub rate: f64,
}

impl CurvatureDensity for LaplaceCurvature {
    fn value_d1(&self, x: f64) -> Result<(f64, f64)> {
        let f = self.rate * (-self.rate * x).exp();
        Ok((f, -self.rate * f))
    }

    fn mass_within(&self, x: f64) -> Result<f64> {
        Ok(-(-self.rate * x).exp_m1())
    }
}

/// f″/(1+f′²)^{3/2}, with f″ a central difference of the analytic f′.
pub fn curvature_at<D: CurvatureDensity + ?Sized>(d: &D, x: f64) -> Result<f64> {
    let h = FD_STEP * x;
    let (_, f1) = d.value_d1(x)?;
    let (_, lo) = d.value_d1(x - h)?;
    let (_, hi) = d.value_d1(x + h)?;
    let f2 = (hi - lo) / (2.0 * h);
    Ok(f2 / (1.0 + f1 * f1).powf(1.5))
}

/// Point of maximum curvature on [lo, hi]: log grid search refined by golden section.
pub fn pm_curvature<D: CurvatureDensity + ?Sized>(d: &D, lo: f64, hi: f64) -> Result<CurvatureReport> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return domain(format!("search interval must satisfy 0 < lo < hi, got [{lo}, {hi}]"));
    }
    let (ul, uh) = (lo.ln(), hi.ln());
    let step = (uh - ul) / (GRID_POINTS - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..GRID_POINTS {
        let k = curvature_at(d, (ul + step * i as f64).exp())?;
        if k > best.1 {
            best = (i, k);
        }
    }
    if best.0 == 0 || best.0 == GRID_POINTS - 1 {
        return Err(Error::NoInteriorMaximum(format!(
            "curvature maximised at the boundary x={}",
            (ul + step * best.0 as f64).exp()
        )));
    }
    let mut a = ul + step * (best.0 - 1) as f64;
    let mut b = ul + step * (best.0 + 1) as f64;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let mut kc = curvature_at(d, c.exp())?;
    let mut ke = curvature_at(d, e.exp())?;
    while b - a > 1e-12 {
        if kc > ke {
            b = e;
            e = c;
            ke = kc;
            c = b - g * (b - a);
            kc = curvature_at(d, c.exp())?;
        } else {
            a = c;
            c = e;
            kc = ke;
            e = a + g * (b - a);
            ke = curvature_at(d, e.exp())?;
        }
    }
    let pm_curv = (0.5 * (a + b)).exp();
    Ok(CurvatureReport { pm_curv, modal_mass: d.mass_within(pm_curv)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_row() {
        let r = pm_curvature(&LaplaceCurvature { rate: 1.0 }, PMCURV_LOWER, PMCURV_UPPER).unwrap();
        // a flat maximum of a finite-difference curvature pins the argmax to ~1e-6
        assert!((r.pm_curv - 2f64.sqrt().ln()).abs() < 1e-5, "{r:?}");
        assert!((r.modal_mass - (1.0 - 0.5f64.sqrt())).abs() < 1e-5);
    }

    #[test]
    fn horseshoe_row() {
        let d = GambelCurvature::new(&GambelParams::horseshoe()).unwrap();
        let r = pm_curvature(&d, PMCURV_LOWER, PMCURV_UPPER).unwrap();
        assert!((r.pm_curv - 0.195).abs() < 5e-4, "{r:?}");
        assert!((r.modal_mass - 0.27).abs() < 5e-3);
    }

    #[test]
    fn boundary_maximum_is_an_error() {
        let r = pm_curvature(&LaplaceCurvature { rate: 1.0 }, 1.0, 5.0);
        assert!(matches!(r, Err(Error::NoInteriorMaximum(_))));
    }
}

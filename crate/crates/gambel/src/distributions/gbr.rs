use super::GammaBetaRatioParams;
use crate::error::{domain, Result};
use crate::specfun::{gen_hyp, kummer_m, ln_beta, ln_gamma};

/// Density and cdf of Z = X/W with X ~ Gamma(β, λ) and W ~ Beta(a, b).
pub fn gamma_beta_ratio(params: &GammaBetaRatioParams, z: f64) -> Result<(f64, f64)> {
    params.validate()?;
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("gamma_beta_ratio needs finite z > 0, got {z}"));
    }
    let GammaBetaRatioParams { beta, lambda, a, b } = *params;
    let lz = lambda * z;
    let lb = ln_beta(beta + a, b) - ln_beta(a, b);
    let m = kummer_m(beta + a, beta + a + b, -lz)?;
    let dens = (beta * lambda.ln() + lb - ln_gamma(beta) + (beta - 1.0) * z.ln()).exp() * m.get();
    let h = gen_hyp(&[beta, a + beta], &[beta + 1.0, a + b + beta], -lz)?;
    let cdf = (beta * lz.ln() + lb - ln_gamma(beta + 1.0)).exp() * h.get();
    Ok((dens, cdf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_kronrod, QuadTol};

    #[test]
    fn density_near_zero() {
        let p = GammaBetaRatioParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (d, c) = gamma_beta_ratio(&p, 1e-12).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        assert!(c < 1e-11);
    }

    #[test]
    fn normalised_and_cdf_matches_quadrature() {
        let p = GammaBetaRatioParams::new(1.5, 0.8, 2.0, 3.0).unwrap();
        let tol = QuadTol { abs: 0.0, rel: 1e-12, max_subdivisions: 4000 };
        let f = |z: f64| if z > 0.0 { gamma_beta_ratio(&p, z).unwrap().0 } else { 0.0 };
        let total = gauss_kronrod(f, 0.0, f64::INFINITY, tol).unwrap().value;
        assert!((total - 1.0).abs() < 1e-7, "{total}");
        for &z in &[0.5, 2.0, 8.0] {
            let want = gauss_kronrod(f, 0.0, z, tol).unwrap().value;
            let got = gamma_beta_ratio(&p, z).unwrap().1;
            assert!((got - want).abs() < 1e-7, "z={z}: {got} vs {want}");
        }
    }
}

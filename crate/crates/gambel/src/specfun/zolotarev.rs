use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Zolotarev's function s(u) = (sin(πuq/2)/sin(πu))^{2/(q-2)} · sin((1-q/2)πu)/sin(πuq/2).
pub fn zolotarev_s(u: f64, q: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("zolotarev_s needs u in (0,1), got {u}"));
    }
    if !(q > 0.0 && q < 2.0) {
        return domain(format!("zolotarev_s needs q in (0,2), got {q}"));
    }
    let h = 0.5 * q;
    if u < 1e-4 {
        // sin x ≈ x(1 - x²/6): expand each ratio to second order in u
        let x2 = (PI * u) * (PI * u);
        let r1 = h * (1.0 - h * h * x2 / 6.0) / (1.0 - x2 / 6.0);
        let r2 = (1.0 - h) * (1.0 - (1.0 - h) * (1.0 - h) * x2 / 6.0) / (h * (1.0 - h * h * x2 / 6.0));
        return Ok(r1.powf(2.0 / (q - 2.0)) * r2);
    }
    let a = (PI * u * h).sin();
    let b = (PI * u).sin();
    let c = ((1.0 - h) * PI * u).sin();
    Ok((a / b).powf(2.0 / (q - 2.0)) * c / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sines() {
        assert!((zolotarev_s(0.5, 1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn small_u_limit() {
        assert!((zolotarev_s(1e-6, 1.0).unwrap() - 4.0).abs() < 1e-9);
        // continuity across the series switch
        let lo = zolotarev_s(0.999_999e-4, 0.7).unwrap();
        let hi = zolotarev_s(1.000_001e-4, 0.7).unwrap();
        assert!((lo - hi).abs() < 1e-9 * hi);
    }

    #[test]
    fn high_precision_reference() {
        let v = zolotarev_s(0.5, 0.5).unwrap();
        assert!((v - 8.689_393_629_902_502).abs() < 1e-12, "{v}");
    }

    #[test]
    fn domain() {
        assert!(zolotarev_s(0.0, 1.0).is_err());
        assert!(zolotarev_s(0.5, 2.0).is_err());
    }
}

//! The base families (EP, GG, GB2, G3B), the Gamma-Beta ratio and the Gambel family.

mod base;
mod gambel;
mod gbr;

pub use base::*;
pub use gambel::*;
pub use gbr::*;
pub(crate) use gambel::{quantile_with, Consts};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

/// Hyperparameters (q, a, b, ξ) of the Gambel family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GambelParams {
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub xi: f64,
}

impl GambelParams {
    pub fn new(q: f64, a: f64, b: f64, xi: f64) -> Result<Self> {
        let p = GambelParams { q, a, b, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn horseshoe() -> Self {
        GambelParams { q: 2.0, a: 0.5, b: 0.5, xi: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        positive("q", self.q)?;
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("xi", self.xi)
    }

    /// Density is unbounded at the origin iff b ≤ 1/q.
    pub fn singular_at_zero(&self) -> bool {
        self.b <= 1.0 / self.q
    }

    /// Density tails decay like |θ|^{-(aq+1)}.
    pub fn tail_exponent(&self) -> f64 {
        self.a * self.q + 1.0
    }

    /// The mean of |θ| is finite iff aq > 1.
    pub fn mean_finite(&self) -> bool {
        self.a * self.q > 1.0
    }
}

/// Exponential power law with shape q and shrinkage weight κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EPParams {
    pub q: f64,
    pub kappa: f64,
}

impl EPParams {
    pub fn new(q: f64, kappa: f64) -> Result<Self> {
        let p = EPParams { q, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("q", self.q)?;
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return domain(format!("kappa must lie in (0,1), got {}", self.kappa));
        }
        Ok(())
    }

    /// Standard deviation λ = ((1-κ)/κ)^{1/q}.
    pub fn sd(&self) -> f64 {
        ((1.0 - self.kappa) / self.kappa).powf(1.0 / self.q)
    }
}

/// Generalized gamma with scale a, shape d and power q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GGParams {
    pub a: f64,
    pub d: f64,
    pub q: f64,
}

impl GGParams {
    pub fn new(a: f64, d: f64, q: f64) -> Result<Self> {
        let p = GGParams { a, d, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        positive("d", self.d)?;
        positive("q", self.q)
    }
}

/// Generalized beta of the second kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GB2Params {
    pub p: f64,
    pub q_scale: f64,
    pub a: f64,
    pub b: f64,
}

impl GB2Params {
    pub fn new(p: f64, q_scale: f64, a: f64, b: f64) -> Result<Self> {
        let v = GB2Params { p, q_scale, a, b };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        positive("p", self.p)?;
        positive("q_scale", self.q_scale)?;
        positive("a", self.a)?;
        positive("b", self.b)
    }
}

/// Three-parameter generalized beta on (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G3BParams {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
}

impl G3BParams {
    pub fn new(a: f64, b: f64, xi: f64) -> Result<Self> {
        let p = G3BParams { a, b, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("xi", self.xi)
    }
}

/// Ratio of a Gamma(β, rate λ) variable to an independent Beta(a, b) variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBetaRatioParams {
    pub beta: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

impl GammaBetaRatioParams {
    pub fn new(beta: f64, lambda: f64, a: f64, b: f64) -> Result<Self> {
        let p = GammaBetaRatioParams { beta, lambda, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("beta", self.beta)?;
        positive("lambda", self.lambda)?;
        positive("a", self.a)?;
        positive("b", self.b)
    }
}

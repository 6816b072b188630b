use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{gambel_pdf, GambelParams};
use crate::error::{domain, Error, Result};

/// Prior placed on each regression coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    Gambel(GambelParams),
    Laplace { rate: f64 },
    SpikeSlab { slab_variance: f64, alpha: f64, beta: f64 },
}

impl PriorSpec {
    pub fn horseshoe() -> Self {
        PriorSpec::Gambel(GambelParams::horseshoe())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PriorSpec::Gambel(p) => p.validate(),
            PriorSpec::Laplace { rate } => {
                if *rate > 0.0 && rate.is_finite() {
                    Ok(())
                } else {
                    domain(format!("Laplace rate must be positive, got {rate}"))
                }
            }
            PriorSpec::SpikeSlab { slab_variance, alpha, beta } => {
                for (n, v) in [("slab variance", slab_variance), ("alpha", alpha), ("beta", beta)] {
                    if !(*v > 0.0 && v.is_finite()) {
                        return domain(format!("spike-and-slab {n} must be positive, got {v}"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Symmetric prior density of one coefficient; +inf at a singular origin.
    /// Spike-and-slab has a point mass and no density.
    pub fn density(&self, theta: f64) -> Result<f64> {
        match self {
            PriorSpec::Gambel(p) => gambel_pdf(p, theta, false),
            PriorSpec::Laplace { rate } => Ok(0.5 * rate * (-rate * theta.abs()).exp()),
            PriorSpec::SpikeSlab { .. } => Err(Error::Config("spike-and-slab prior has no density".into())),
        }
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorSpec::Gambel(p) if *p == GambelParams::horseshoe() => write!(f, "horseshoe"),
            PriorSpec::Gambel(p) => write!(f, "gambel:{},{},{},{}", p.q, p.a, p.b, p.xi),
            PriorSpec::Laplace { rate } => write!(f, "laplace:{rate}"),
            PriorSpec::SpikeSlab { slab_variance, alpha, beta } => write!(f, "sns:{slab_variance},{alpha},{beta}"),
        }
    }
}

/// Parses `horseshoe`, `gambel:q,a,b,xi`, `laplace:rate` or `sns:var,alpha,beta`.
impl FromStr for PriorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{t}' in prior '{s}'"))))
                .collect::<Result<_>>()?
        };
        let want = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("prior '{name}' takes {k} numbers, got {}", nums.len())))
            }
        };
        let prior = match name.to_ascii_lowercase().as_str() {
            "horseshoe" | "hs" => {
                want(0)?;
                PriorSpec::horseshoe()
            }
            "gambel" => {
                want(4)?;
                PriorSpec::Gambel(GambelParams { q: nums[0], a: nums[1], b: nums[2], xi: nums[3] })
            }
            "laplace" => {
                want(1)?;
                PriorSpec::Laplace { rate: nums[0] }
            }
            "sns" | "spikeslab" => {
                want(3)?;
                PriorSpec::SpikeSlab { slab_variance: nums[0], alpha: nums[1], beta: nums[2] }
            }
            _ => return Err(Error::Config(format!("unknown prior '{name}'"))),
        };
        prior.validate()?;
        Ok(prior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["horseshoe", "gambel:2,0.5,0.52,1", "laplace:1", "sns:1000,2.85,1"] {
            let p: PriorSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("gambel:2,0.5".parse::<PriorSpec>().is_err());
        assert!("laplace:-1".parse::<PriorSpec>().is_err());
        assert!("cauchy".parse::<PriorSpec>().is_err());
    }
}

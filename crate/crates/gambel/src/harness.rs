//! Data generation, losses and orchestration for the two simulation studies.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::GambelParams;
use crate::error::{domain, Error, Result};
use crate::samplers::{derive_seed, fit_prepared, McmcConfig, PriorSpec, RegressionData, SuffStats};
use crate::stats::median;

/// Observations in study 2.
pub const STUDY2_N: usize = 1000;

/// The five priors compared in both studies, with display names.
pub fn standard_priors() -> Vec<(&'static str, PriorSpec)> {
    vec![
        ("Horseshoe", PriorSpec::horseshoe()),
        ("Gambel 1", PriorSpec::Gambel(GambelParams { q: 2.0, a: 0.5, b: 0.52, xi: 1.0 })),
        ("Gambel 2", PriorSpec::Gambel(GambelParams { q: 2.0, a: 0.3, b: 1.6, xi: 1.0 })),
        ("Laplace", PriorSpec::Laplace { rate: 1.0 }),
        ("Spike and slab", PriorSpec::SpikeSlab { slab_variance: 1000.0, alpha: 2.85, beta: 1.0 }),
    ]
}

pub fn prior_label(prior: &PriorSpec) -> String {
    standard_priors().into_iter().find(|(_, p)| p == prior).map_or_else(|| prior.to_string(), |(n, _)| n.to_string())
}

fn rep(v: f64, k: usize) -> impl Iterator<Item = f64> {
    std::iter::repeat_n(v, k)
}

struct Study1Spec {
    theta: Vec<f64>,
    sigma: f64,
    n: usize,
    factor_design: bool,
}

fn study1_spec(config_id: u8) -> Result<Study1Spec> {
    let block = |a: f64, b: f64| -> Vec<f64> { rep(a, 7).chain(rep(b, 8)).chain(rep(0.0, 15)).collect() };
    let s = match config_id {
        1 => Study1Spec { theta: vec![20.0, 20.0, 40.0, 40.0, 0.0, 0.0, 0.0, 0.0], sigma: 3.0, n: 50, factor_design: false },
        2 => Study1Spec { theta: vec![1.0, 1.0, 20.0, 20.0, 0.0, 0.0, 0.0, 0.0], sigma: 3.0, n: 50, factor_design: false },
        3 => Study1Spec { theta: block(20.0, 5.0), sigma: 15.0, n: 300, factor_design: false },
        4 => Study1Spec { theta: block(20.0, 5.0), sigma: 15.0, n: 300, factor_design: true },
        5 => Study1Spec { theta: block(1.0, 50.0), sigma: 15.0, n: 500, factor_design: true },
        6 => Study1Spec {
            theta: rep(0.5, 5).chain(rep(5.0, 5)).chain(rep(40.0, 7)).chain(rep(0.0, 15)).collect(),
            sigma: 15.0,
            n: 300,
            factor_design: false,
        },
        _ => return domain(format!("study 1 configuration must be 1..6, got {config_id}")),
    };
    Ok(s)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Study 1 data set for configuration 1..6.
pub fn gen_study1(config_id: u8, seed: u64) -> Result<RegressionData> {
    let spec = study1_spec(config_id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, p) = (spec.n, spec.theta.len());
    let x = if spec.factor_design {
        // three latent factors shared by blocks of five columns, the rest independent
        let mut x = DMatrix::zeros(n, p);
        for i in 0..n {
            let z = [normal(&mut rng), normal(&mut rng), normal(&mut rng)];
            for j in 0..p {
                x[(i, j)] = if j < 15 { z[j / 5] + 0.1 * normal(&mut rng) } else { normal(&mut rng) };
            }
        }
        x
    } else {
        let corr = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.5 });
        let l = corr.cholesky().expect("compound symmetry is positive definite").l();
        let z = DMatrix::from_fn(n, p, |_, _| normal(&mut rng));
        z * l.transpose()
    };
    let theta = DVector::from_vec(spec.theta);
    let e = DVector::from_fn(n, |_, _| spec.sigma * normal(&mut rng));
    RegressionData::new(x.clone(), &x * &theta + e, Some(theta))
}

/// Study 2 normal-means data: θ_i ~ w·3t_ν + (1−w)δ₀, y_i ~ N(θ_i, 1), identity design.
pub fn gen_study2(w: f64, nu: f64, seed: u64) -> Result<RegressionData> {
    if !(w > 0.0 && w < 1.0) {
        return domain(format!("w must lie in (0, 1), got {w}"));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return domain(format!("nu must be positive, got {nu}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = StudentT::new(nu).map_err(|e| Error::Domain(e.to_string()))?;
    let theta = DVector::from_fn(STUDY2_N, |_, _| if rng.random::<f64>() < w { 3.0 * t.sample(&mut rng) } else { 0.0 });
    let y = DVector::from_fn(STUDY2_N, |i, _| theta[i] + normal(&mut rng));
    RegressionData::new(DMatrix::identity(STUDY2_N, STUDY2_N), y, Some(theta))
}

/// Mean squared error over the coefficients.
pub fn sq_error_loss(theta_hat: &[f64], theta_true: &[f64]) -> Result<f64> {
    if theta_hat.len() != theta_true.len() || theta_hat.is_empty() {
        return Err(Error::Dimension(format!("loss needs equal nonzero lengths, got {} and {}", theta_hat.len(), theta_true.len())));
    }
    Ok(theta_hat.iter().zip(theta_true).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / theta_hat.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "study", rename_all = "snake_case")]
pub enum StudyDesign {
    Study1 { config_id: u8 },
    Study2 { w: f64, nu: f64 },
}

impl StudyDesign {
    pub fn label(&self) -> String {
        match self {
            StudyDesign::Study1 { config_id } => format!("Conf. {config_id}"),
            StudyDesign::Study2 { w, nu } => format!("nu={nu} w={w}"),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<RegressionData> {
        match *self {
            StudyDesign::Study1 { config_id } => gen_study1(config_id, seed),
            StudyDesign::Study2 { w, nu } => gen_study2(w, nu, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub design: StudyDesign,
    pub replicates: usize,
    pub mcmc: McmcConfig,
    pub priors: Vec<PriorSpec>,
    pub seed: u64,
}

impl StudyConfig {
    /// Desk-scale defaults: 20 replicates, 3 chains of 5000 iterations with 1500 burn-in, all five priors.
    pub fn desk(design: StudyDesign, seed: u64) -> Self {
        StudyConfig {
            design,
            replicates: 20,
            mcmc: McmcConfig { keep_draws: false, ..McmcConfig::default() },
            priors: standard_priors().into_iter().map(|(_, p)| p).collect(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.priors.is_empty() {
            return Err(Error::Config("no priors given".into()));
        }
        match self.design {
            StudyDesign::Study1 { config_id } => {
                study1_spec(config_id)?;
            }
            StudyDesign::Study2 { w, nu } => {
                if !(w > 0.0 && w < 1.0 && nu > 0.0) {
                    return domain(format!("study 2 needs w in (0,1) and nu > 0, got w={w}, nu={nu}"));
                }
            }
        }
        for p in &self.priors {
            p.validate()?;
        }
        self.mcmc.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorLosses {
    pub prior: PriorSpec,
    pub label: String,
    /// Loss per replicate; `None` where the fit failed.
    pub losses: Vec<Option<f64>>,
    pub errors: Vec<String>,
    /// Median over the successful replicates (NaN if none succeeded).
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub priors: Vec<PriorLosses>,
}

impl StudyResult {
    pub fn median_for(&self, prior: &PriorSpec) -> Option<f64> {
        self.priors.iter().find(|p| &p.prior == prior).map(|p| p.median)
    }
}

/// Seed of replicate r's data.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, &[r as u64, 0])
}

/// Fit every prior to every replicate and collect squared-error losses.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let per_rep: Vec<Result<Vec<std::result::Result<f64, String>>>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let data = cfg.design.generate(replicate_seed(cfg.seed, r))?;
            let stats = SuffStats::new(&data);
            let truth: Vec<f64> = data.theta_true.as_ref().expect("simulated data carry the truth").iter().copied().collect();
            Ok(cfg
                .priors
                .iter()
                .enumerate()
                .map(|(k, prior)| {
                    let mcmc = McmcConfig { seed: derive_seed(cfg.seed, &[r as u64, 1 + k as u64]), ..cfg.mcmc.clone() };
                    fit_prepared(&data, &stats, prior, &mcmc)
                        .and_then(|d| sq_error_loss(&d.posterior_mean(), &truth))
                        .map_err(|e| format!("replicate {r}: {e}"))
                })
                .collect())
        })
        .collect();
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let priors = cfg
        .priors
        .iter()
        .enumerate()
        .map(|(k, prior)| {
            let losses: Vec<Option<f64>> = per_rep.iter().map(|row| row[k].as_ref().ok().copied()).collect();
            let errors = per_rep.iter().filter_map(|row| row[k].as_ref().err().cloned()).collect();
            let ok: Vec<f64> = losses.iter().flatten().copied().collect();
            let median = if ok.is_empty() { f64::NAN } else { median(&ok) };
            PriorLosses { prior: *prior, label: prior_label(prior), losses, errors, median }
        })
        .collect();
    Ok(StudyResult { config: cfg.clone(), priors })
}

/// Rows of prior labels by columns of designs, holding median losses.
pub fn study_table(results: &[StudyResult]) -> (Vec<String>, Vec<(String, Vec<f64>)>) {
    let header = results.iter().map(|r| r.config.design.label()).collect();
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for res in results {
        for pl in &res.priors {
            if !rows.iter().any(|(l, _)| *l == pl.label) {
                rows.push((pl.label.clone(), Vec::new()));
            }
        }
    }
    for (label, cells) in rows.iter_mut() {
        for res in results {
            cells.push(res.priors.iter().find(|p| p.label == *label).map_or(f64::NAN, |p| p.median));
        }
    }
    (header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean, variance};

    #[test]
    fn study1_dimensions() {
        let d = gen_study1(1, 1).unwrap();
        assert_eq!((d.n(), d.p()), (50, 8));
        assert_eq!(d.theta_true.as_ref().unwrap().as_slice(), &[20.0, 20.0, 40.0, 40.0, 0.0, 0.0, 0.0, 0.0]);
        let d = gen_study1(3, 1).unwrap();
        assert_eq!((d.n(), d.p()), (300, 30));
        let t = d.theta_true.unwrap();
        assert_eq!(t.iter().filter(|&&v| v == 20.0).count(), 7);
        assert_eq!(t.iter().filter(|&&v| v == 5.0).count(), 8);
        assert_eq!(t.iter().filter(|&&v| v == 0.0).count(), 15);
        assert_eq!(gen_study1(6, 1).unwrap().p(), 32);
        assert_eq!(gen_study1(5, 1).unwrap().n(), 500);
        assert!(gen_study1(7, 1).is_err());
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let (ma, mb) = (mean(a), mean(b));
        let c: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() - 1) as f64;
        c / (variance(a) * variance(b)).sqrt()
    }

    #[test]
    fn study1_designs_have_stated_correlation() {
        let d = gen_study1(4, 2).unwrap();
        let c = |j: usize| d.x.column(j).iter().copied().collect::<Vec<f64>>();
        let r = corr(&c(0), &c(1));
        // 1/(1 + 0.01); sampling SD at n = 300 is about 0.001
        assert!((r - 1.0 / 1.01).abs() < 0.005, "{r}");
        assert!(corr(&c(0), &c(5)).abs() < 0.2);
        let mut acc = Vec::new();
        for s in 0..20 {
            let d = gen_study1(3, 100 + s).unwrap();
            acc.push(corr(&d.x.column(0).iter().copied().collect::<Vec<_>>(), &d.x.column(7).iter().copied().collect::<Vec<_>>()));
        }
        assert!((mean(&acc) - 0.5).abs() < 0.03);
    }

    #[test]
    fn study2_construction() {
        let d = gen_study2(0.05, 2.0, 3).unwrap();
        let t = d.theta_true.as_ref().unwrap();
        let k = t.iter().filter(|&&v| v != 0.0).count() as f64;
        assert!((k - 50.0).abs() < 3.0 * (1000.0f64 * 0.05 * 0.95).sqrt());
        let resid: Vec<f64> = (0..1000).map(|i| d.y[i] - t[i]).collect();
        assert!((variance(&resid) - 1.0).abs() < 0.15);
        assert!(gen_study2(1.0, 2.0, 3).is_err() && gen_study2(0.5, 0.0, 3).is_err());
        let heavy = (0..20).filter(|&s| gen_study2(0.2, 2.0, s).unwrap().theta_true.unwrap().amax() > 9.0).count();
        assert!(heavy >= 18);
    }

    #[test]
    fn loss_arithmetic() {
        assert_eq!(sq_error_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(sq_error_loss(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap(), 0.25);
        assert_eq!(sq_error_loss(&[3.0, 1.0, 2.0], &[0.0; 3]).unwrap(), sq_error_loss(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap());
        assert!(sq_error_loss(&[1.0], &[1.0, 2.0]).is_err());
        let t = [20.0, 40.0, 0.0];
        assert!((sq_error_loss(&[0.0; 3], &t).unwrap() - 2000.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_study_is_deterministic() {
        let mut cfg = StudyConfig::desk(StudyDesign::Study1 { config_id: 1 }, 5);
        cfg.replicates = 3;
        cfg.mcmc = McmcConfig { n_iter: 300, burn_in: 100, n_chains: 2, keep_draws: false, ..Default::default() };
        cfg.priors = vec![PriorSpec::horseshoe(), PriorSpec::Laplace { rate: 1.0 }, standard_priors()[4].1];
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        assert_eq!(a, b);
        for pl in &a.priors {
            assert!(pl.errors.is_empty(), "{:?}", pl.errors);
            let ls: Vec<f64> = pl.losses.iter().flatten().copied().collect();
            assert_eq!(ls.len(), 3);
            assert!(ls.iter().all(|&l| l >= 0.0));
            assert_eq!(pl.median, median(&ls));
        }
        let (header, rows) = study_table(&[a]);
        assert_eq!(header, vec!["Conf. 1"]);
        assert_eq!(rows[0].0, "Horseshoe");
        // replicate data depend only on (seed, r)
        let d0 = gen_study1(1, replicate_seed(5, 1)).unwrap();
        let d1 = gen_study1(1, replicate_seed(5, 1)).unwrap();
        assert_eq!(d0, d1);
    }
}

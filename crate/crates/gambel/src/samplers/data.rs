use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Algorithm, McmcConfig, PriorSpec};
use crate::error::{Error, Result};

/// y = Xθ + ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub theta_true: Option<DVector<f64>>,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, theta_true: Option<DVector<f64>>) -> Result<Self> {
        let d = RegressionData { x, y, theta_true };
        d.validate()?;
        Ok(d)
    }

    /// No observations at all: the posterior is the prior.
    pub fn empty(p: usize) -> Self {
        RegressionData { x: DMatrix::zeros(0, p), y: DVector::zeros(0), theta_true: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.nrows() != self.y.len() {
            return Err(Error::Dimension(format!("X has {} rows but y has {} entries", self.x.nrows(), self.y.len())));
        }
        if self.x.ncols() == 0 {
            return Err(Error::Dimension("X has no columns".into()));
        }
        if let Some(t) = &self.theta_true {
            if t.len() != self.x.ncols() {
                return Err(Error::Dimension(format!("theta_true has {} entries, X has {} columns", t.len(), self.x.ncols())));
            }
        }
        if self.x.iter().chain(self.y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Dimension("data contain non-finite values".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Gram matrix and cross products, computed once per data set.
#[derive(Debug, Clone)]
pub(crate) struct SuffStats {
    pub n: usize,
    pub p: usize,
    pub gram_diag: DVector<f64>,
    /// Full Gram matrix; `None` when it is diagonal.
    pub gram: Option<DMatrix<f64>>,
    pub xty: DVector<f64>,
    pub yty: f64,
    pub y_var: f64,
}

impl SuffStats {
    pub fn new(data: &RegressionData) -> Self {
        let (n, p) = (data.n(), data.p());
        let x = &data.x;
        // at most one nonzero per row means orthogonal columns
        let sparse_rows = (0..n).all(|i| x.row(i).iter().filter(|v| **v != 0.0).count() <= 1);
        let gram_diag = DVector::from_iterator(p, x.column_iter().map(|c| c.norm_squared()));
        let gram = if sparse_rows { None } else { Some(x.tr_mul(x)) };
        let xty = x.tr_mul(&data.y);
        let yty = data.y.norm_squared();
        let y_var = if n > 1 {
            let m = data.y.mean();
            data.y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SuffStats { n, p, gram_diag, gram, xty, yty, y_var }
    }

    pub fn is_diagonal(&self) -> bool {
        self.gram.is_none()
    }

    pub fn no_information(&self) -> bool {
        self.gram_diag.iter().all(|&v| v == 0.0)
    }

    pub fn g(&self, j: usize, k: usize) -> f64 {
        match &self.gram {
            Some(g) => g[(j, k)],
            None if j == k => self.gram_diag[j],
            None => 0.0,
        }
    }

    /// Residual sum of squares ‖y − Xθ‖².
    pub fn rss(&self, data: &RegressionData, theta: &DVector<f64>) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        if self.is_diagonal() {
            let quad: f64 = (0..self.p).map(|j| theta[j] * (self.gram_diag[j] * theta[j] - 2.0 * self.xty[j])).sum();
            return (self.yty + quad).max(0.0);
        }
        (&data.y - &data.x * theta).norm_squared()
    }
}

/// Current values of every block of a Gibbs sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub theta: DVector<f64>,
    pub sigma2: f64,
    pub gamma: DVector<f64>,
    pub lambda: DVector<f64>,
    /// Uniform-mixture latent of the low-dimensional sampler.
    pub u: Option<DVector<f64>>,
    /// Normal-mixture latent of the high-dimensional sampler.
    pub tau: Option<DVector<f64>>,
}

/// Retained output of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub index: usize,
    pub seed: u64,
    /// 1-based iteration numbers of the retained rows.
    pub iters: Vec<usize>,
    /// Row-major retained θ draws (empty unless draws are kept).
    pub theta: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Spike-and-slab inclusion probability π per retained row.
    pub pi: Vec<f64>,
    /// Spike-and-slab inclusion frequency per coefficient.
    pub inclusion: Vec<f64>,
    pub theta_mean: Vec<f64>,
    pub retained: usize,
}

impl Chain {
    pub(crate) fn new(p: usize, config: &McmcConfig) -> Self {
        let r = if config.keep_draws { config.retained() } else { 0 };
        Chain {
            index: 0,
            seed: 0,
            iters: Vec::with_capacity(r),
            theta: Vec::with_capacity(r * p),
            sigma2: Vec::with_capacity(config.retained()),
            pi: Vec::new(),
            inclusion: Vec::new(),
            theta_mean: vec![0.0; p],
            retained: 0,
        }
    }

    pub(crate) fn record(&mut self, iter: usize, theta: &DVector<f64>, sigma2: f64, keep_draws: bool) {
        self.retained += 1;
        let w = 1.0 / self.retained as f64;
        for (m, t) in self.theta_mean.iter_mut().zip(theta.iter()) {
            *m += (t - *m) * w;
        }
        self.sigma2.push(sigma2);
        if keep_draws {
            self.iters.push(iter + 1);
            self.theta.extend(theta.iter());
        }
    }

    /// Retained draws of θ_j.
    pub fn theta_column(&self, p: usize, j: usize) -> Vec<f64> {
        self.theta.iter().skip(j).step_by(p).copied().collect()
    }
}

/// Draws from all chains plus an echo of the run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDraws {
    pub p: usize,
    pub algorithm: Algorithm,
    pub prior: PriorSpec,
    pub config: McmcConfig,
    pub chains: Vec<Chain>,
}

impl ChainDraws {
    /// Posterior mean of θ pooled over chains.
    pub fn posterior_mean(&self) -> Vec<f64> {
        let total: usize = self.chains.iter().map(|c| c.retained).sum();
        let mut m = vec![0.0; self.p];
        for c in &self.chains {
            let w = c.retained as f64 / total as f64;
            for (acc, v) in m.iter_mut().zip(&c.theta_mean) {
                *acc += w * v;
            }
        }
        m
    }

    pub fn theta_columns(&self, j: usize) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.theta_column(self.p, j)).collect()
    }

    pub fn sigma2_columns(&self) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.sigma2.clone()).collect()
    }
}

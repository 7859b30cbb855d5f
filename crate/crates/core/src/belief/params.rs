//! Beta and Dirichlet evidence with closed-form conjugate updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occupancy evidence for one voxel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    /// Pseudo-count of occupied evidence.
    pub alpha: f64,
    /// Pseudo-count of free evidence.
    pub beta: f64,
}

/// Binary sensor evidence for a voxel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Hit,
    Miss,
}

impl BetaParams {
    pub const PRIOR: BetaParams = BetaParams {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Range {
                field: "alpha",
                value: alpha,
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Range {
                field: "beta",
                value: beta,
            });
        }
        Ok(BetaParams { alpha, beta })
    }

    /// Expected occupancy probability.
    #[inline]
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Epistemic occupancy uncertainty `u_o`.
    #[inline]
    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }

    /// `mean() >= threshold` without the division.
    #[inline]
    pub fn is_occupied(&self, threshold: f64) -> bool {
        self.alpha >= threshold * (self.alpha + self.beta)
    }

    /// Conjugate Bernoulli update. `weight` must be positive.
    #[inline]
    pub fn fused(self, evidence: Evidence, weight: f64) -> Self {
        debug_assert!(weight > 0.0);
        match evidence {
            Evidence::Hit => BetaParams {
                alpha: self.alpha + weight,
                beta: self.beta,
            },
            Evidence::Miss => BetaParams {
                alpha: self.alpha,
                beta: self.beta + weight,
            },
        }
    }

    #[inline]
    pub fn fuse(&mut self, evidence: Evidence, weight: f64) {
        *self = self.fused(evidence, weight);
    }
}

impl Default for BetaParams {
    fn default() -> Self {
        Self::PRIOR
    }
}

pub fn beta_mean(p: BetaParams) -> f64 {
    p.mean()
}

pub fn beta_variance(p: BetaParams) -> f64 {
    p.variance()
}

pub fn fuse_occupancy(cell: BetaParams, evidence: Evidence, weight: f64) -> Result<BetaParams> {
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::Range {
            field: "weight",
            value: weight,
        });
    }
    Ok(cell.fused(evidence, weight))
}

/// Semantic evidence for one footprint cell: a Dirichlet over `N` classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams {
    lambdas: Vec<f64>,
}

impl DirichletParams {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::Contract(format!(
                "a Dirichlet needs at least 2 classes, got {}",
                lambdas.len()
            )));
        }
        if let Some(&bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::Range {
                field: "lambda",
                value: bad,
            });
        }
        Ok(DirichletParams { lambdas })
    }

    pub fn prior(n_classes: usize) -> Self {
        DirichletParams {
            lambdas: vec![1.0; n_classes],
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn n_classes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn strength(&self) -> f64 {
        strength(&self.lambdas)
    }

    pub fn expectation(&self) -> Vec<f64> {
        expectation(&self.lambdas)
    }

    pub fn uncertainty(&self) -> f64 {
        uncertainty(&self.lambdas)
    }

    pub fn hard_label(&self) -> usize {
        hard_label(&self.lambdas)
    }

    pub fn fused(mut self, class: usize, weight: f64) -> Result<Self> {
        fuse_class(&mut self.lambdas, class, weight)?;
        Ok(self)
    }
}

pub fn dirichlet_expectation(p: &DirichletParams) -> Vec<f64> {
    p.expectation()
}

pub fn dirichlet_uncertainty(p: &DirichletParams) -> f64 {
    p.uncertainty()
}

pub fn fuse_semantic(cell: DirichletParams, class: usize, weight: f64) -> Result<DirichletParams> {
    cell.fused(class, weight)
}

// Slice kernels. The belief grid stores all lambdas in one flat buffer and
// calls these directly on per-cell slices.

/// Total evidence `S`.
#[inline]
pub fn strength(lambdas: &[f64]) -> f64 {
    lambdas.iter().sum()
}

/// Predictive class probabilities `λ_n / S`.
pub fn expectation(lambdas: &[f64]) -> Vec<f64> {
    let s = strength(lambdas);
    lambdas.iter().map(|l| l / s).collect()
}

/// `u_s = N / S`.
#[inline]
pub fn uncertainty(lambdas: &[f64]) -> f64 {
    lambdas.len() as f64 / strength(lambdas)
}

/// Arg-max class; ties go to the lowest index.
#[inline]
pub fn hard_label(lambdas: &[f64]) -> usize {
    let mut best = 0;
    for (i, &l) in lambdas.iter().enumerate().skip(1) {
        if l > lambdas[best] {
            best = i;
        }
    }
    best
}

#[inline]
pub fn fuse_class(lambdas: &mut [f64], class: usize, weight: f64) -> Result<()> {
    if class >= lambdas.len() {
        return Err(Error::Contract(format!(
            "class {class} out of range for {} classes",
            lambdas.len()
        )));
    }
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::Range {
            field: "weight",
            value: weight,
        });
    }
    lambdas[class] += weight;
    Ok(())
}

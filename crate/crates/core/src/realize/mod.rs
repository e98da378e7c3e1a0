//! Explicit momentum configurations for prescribed strata.
//!
//! A configuration is `p_i = lambda_i (1, x_i)` with `x_i` on the unit
//! sphere in `R^(r-1)`. Elements in one part share a point; loops have
//! `lambda_i = 0`.

mod cyclic;
mod dimension;
mod mmc;
mod perturb;
mod sample;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::CensusError;
use crate::classify::{ClassifyError, LabelError};
use crate::exactmat::{numerical_rank, singular_values, SymmetricMatrix};
use crate::matroid::MatroidError;
use crate::util::mix_seed;

pub use cyclic::{canonical_cycle, cyclic_order};
pub use dimension::{estimate_dimension, DimensionEstimate, FD_STEP, JACOBIAN_CUTOFF};
pub use mmc::{sample_mmc, MAX_NEWTON_ITERS};
pub use perturb::{perturb_to_refinement, Refinement};
pub use sample::{sample_stratum, MAX_ATTEMPTS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("no generic sample found after {attempts} attempts")]
    Degenerate { attempts: usize },
    #[error("momentum-conservation correction did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("cyclic orders need rank 3, got rank {0}")]
    RankNotThree(usize),
    #[error("circle angles are inconsistent (residual {0:e})")]
    InconsistentAngles(f64),
    #[error("{source_label} is not below {target} in the signed poset")]
    Incomparable { source_label: String, target: String },
    #[error("configuration has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumConfig {
    pub n: usize,
    pub r: usize,
    pub lambdas: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
}

impl MomentumConfig {
    pub fn validate(&self) -> Result<(), RealizeError> {
        if self.lambdas.len() != self.n {
            return Err(RealizeError::LengthMismatch { expected: self.n, got: self.lambdas.len() });
        }
        if self.points.len() != self.n {
            return Err(RealizeError::LengthMismatch { expected: self.n, got: self.points.len() });
        }
        let k = self.r.saturating_sub(1);
        if let Some(bad) = self.points.iter().find(|x| x.len() != k) {
            return Err(RealizeError::LengthMismatch { expected: k, got: bad.len() });
        }
        Ok(())
    }

    /// `p_i = lambda_i (1, x_i)` in `R^r`.
    pub fn momenta(&self) -> Vec<Vec<f64>> {
        self.lambdas
            .iter()
            .zip(&self.points)
            .map(|(&l, x)| std::iter::once(l).chain(x.iter().map(|v| l * v)).collect())
            .collect()
    }

    /// Componentwise `sum_i p_i`.
    pub fn total_momentum(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.r];
        for p in self.momenta() {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        acc
    }
}

/// Minkowski product with signature `(+, -, ..., -)`.
pub fn minkowski(p: &[f64], q: &[f64]) -> f64 {
    p[0] * q[0] - p[1..].iter().zip(&q[1..]).map(|(a, b)| a * b).sum::<f64>()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix `s_ij = lambda_i lambda_j (1 - <x_i, x_j>)`, zero diagonal.
pub fn gram(c: &MomentumConfig) -> SymmetricMatrix {
    SymmetricMatrix::from_float_fn(c.n, |i, j| {
        if i == j {
            0.0
        } else {
            c.lambdas[i] * c.lambdas[j] * (1.0 - dot(&c.points[i], &c.points[j]))
        }
    })
    .expect("n >= 1 and finite entries")
}

/// `t_{mu nu} = 1 - <x_mu, x_nu>` for points on a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGram {
    t: Vec<Vec<f64>>,
}

impl NormalizedGram {
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        let m = points.len();
        let t = (0..m)
            .map(|a| (0..m).map(|b| if a == b { 0.0 } else { 1.0 - dot(&points[a], &points[b]) }).collect())
            .collect();
        NormalizedGram { t }
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.t[a][b]
    }

    pub fn m(&self) -> usize {
        self.t.len()
    }

    /// Smallest off-diagonal entry.
    pub fn min_separation(&self) -> f64 {
        let m = self.m();
        (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).map(|(a, b)| self.t[a][b]).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn rng_for(seed: u64, attempt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, attempt))
}

pub(crate) fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Uniform point on the unit sphere in `R^k` (`k = 1` gives `±1`).
pub(crate) fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            normalize(&mut v);
            return v;
        }
    }
}

pub(crate) fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Distinct, affinely spanning points: the rows `(1, x)` have full rank
/// `r` with a condition number below `1/tol`, and every pair is at least
/// `tol` apart in `t`.
pub(crate) fn points_are_generic(points: &[Vec<f64>], r: usize, tol: f64) -> bool {
    if NormalizedGram::from_points(points).min_separation() < tol {
        return false;
    }
    let a = DMatrix::from_fn(points.len(), r, |i, j| if j == 0 { 1.0 } else { points[i][j - 1] });
    let sv = singular_values(&a);
    numerical_rank(&a, tol) == r && sv[r - 1] >= tol * sv[0]
}

/// Orthonormal basis of the tangent space `x^perp` in `R^k`.
pub(crate) fn tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let k = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k.saturating_sub(1));
    let mut axes: Vec<usize> = (0..k).collect();
    axes.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()));
    for &axis in &axes {
        if basis.len() + 1 == k {
            break;
        }
        let mut v = vec![0.0; k];
        v[axis] = 1.0;
        for b in std::iter::once(x).chain(basis.iter().map(Vec::as_slice)) {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|t| *t /= norm);
            basis.push(v);
        }
    }
    basis
}

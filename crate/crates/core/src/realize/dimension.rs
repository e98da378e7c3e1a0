use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::census::{dim_massless, dim_mmc};
use crate::exactmat::numerical_rank;
use crate::matroid::SignedMatroid;

use super::{normalize, sample_mmc, sample_stratum, tangent_basis, MomentumConfig, RealizeError};

pub const FD_STEP: f64 = 1e-6;
pub const JACOBIAN_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionEstimate {
    pub estimated: usize,
    pub formula: i64,
    pub parameters: usize,
}

impl DimensionEstimate {
    pub fn agrees(&self) -> bool {
        self.estimated as i64 == self.formula
    }
}

/// Local chart around a sampled configuration: `r - 2` tangent
/// coordinates per part followed by one multiplier per non-loop.
struct Chart {
    n: usize,
    r: usize,
    base: Vec<Vec<f64>>,
    tangents: Vec<Vec<Vec<f64>>>,
    part_of: Vec<Option<usize>>,
    non_loops: Vec<usize>,
    lambda0: Vec<f64>,
}

impl Chart {
    fn new(sm: &SignedMatroid, c: &MomentumConfig) -> Self {
        let p = sm.matroid();
        let part_of = p.part_index();
        let base: Vec<Vec<f64>> = p.parts().iter().map(|part| c.points[part[0]].clone()).collect();
        let tangents = base.iter().map(|x| tangent_basis(x)).collect();
        let non_loops = p.non_loops();
        let lambda0 = non_loops.iter().map(|&i| c.lambdas[i]).collect();
        Chart { n: c.n, r: c.r, base, tangents, part_of, non_loops, lambda0 }
    }

    fn point_params(&self) -> usize {
        self.tangents.iter().map(Vec::len).sum()
    }

    fn len(&self) -> usize {
        self.point_params() + self.non_loops.len()
    }

    fn initial(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.point_params()];
        v.extend_from_slice(&self.lambda0);
        v
    }

    fn unpack(&self, theta: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut k = 0;
        let points = self
            .base
            .iter()
            .zip(&self.tangents)
            .map(|(y, basis)| {
                let mut x = y.clone();
                for t in basis {
                    for (xi, ti) in x.iter_mut().zip(t) {
                        *xi += theta[k] * ti;
                    }
                    k += 1;
                }
                normalize(&mut x);
                x
            })
            .collect();
        let mut lambdas = vec![0.0; self.n];
        for (&i, &l) in self.non_loops.iter().zip(&theta[k..]) {
            lambdas[i] = l;
        }
        (points, lambdas)
    }

    /// Upper off-diagonal Mandelstam variables.
    fn mandelstams(&self, theta: &[f64]) -> Vec<f64> {
        let (points, lambdas) = self.unpack(theta);
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let s = match (self.part_of[i], self.part_of[j]) {
                    (Some(a), Some(b)) => {
                        let dot: f64 = points[a].iter().zip(&points[b]).map(|(u, v)| u * v).sum();
                        lambdas[i] * lambdas[j] * (1.0 - dot)
                    }
                    _ => 0.0,
                };
                out.push(s);
            }
        }
        out
    }

    /// Derivative of the total momentum at `theta = 0`, where each chart
    /// point moves along its tangent vectors to first order.
    fn momentum_jacobian(&self) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.r, self.len());
        let mut part_sum = vec![0.0; self.base.len()];
        let offset = self.point_params();
        for (a, &i) in self.non_loops.iter().enumerate() {
            let mu = self.part_of[i].unwrap();
            part_sum[mu] += self.lambda0[a];
            j[(0, offset + a)] = 1.0;
            for k in 1..self.r {
                j[(k, offset + a)] = self.base[mu][k - 1];
            }
        }
        let mut col = 0;
        for (mu, basis) in self.tangents.iter().enumerate() {
            for t in basis {
                for k in 1..self.r {
                    j[(k, col)] = part_sum[mu] * t[k - 1];
                }
                col += 1;
            }
        }
        j
    }
}

/// Orthonormal basis of `ker jg` as columns: the eigenvectors of
/// `jg^T jg` for its smallest `cols - rank` eigenvalues.
fn constraint_kernel(jg: &DMatrix<f64>) -> DMatrix<f64> {
    let k = jg.ncols() - numerical_rank(jg, JACOBIAN_CUTOFF);
    let eig = SymmetricEigen::new(jg.transpose() * jg);
    let mut order: Vec<usize> = (0..jg.ncols()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cols: Vec<DVector<f64>> = order[..k].iter().map(|&c| eig.eigenvectors.column(c).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

fn central_jacobian(theta: &[f64], rows: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(rows, theta.len());
    let mut probe = theta.to_vec();
    for c in 0..theta.len() {
        probe[c] = theta[c] + FD_STEP;
        let plus = f(&probe);
        probe[c] = theta[c] - FD_STEP;
        let minus = f(&probe);
        probe[c] = theta[c];
        for r in 0..rows {
            j[(r, c)] = (plus[r] - minus[r]) / (2.0 * FD_STEP);
        }
    }
    j
}

/// Numerical rank of the parametrization into `s`-coordinates at a
/// sampled interior point. With `mmc`, the Jacobian is restricted to the
/// kernel of the momentum-conservation constraints, whose derivative is
/// linear in the chart and taken in closed form.
pub fn estimate_dimension(
    sm: &SignedMatroid,
    r: usize,
    mmc: bool,
    seed: u64,
) -> Result<DimensionEstimate, RealizeError> {
    let (c, formula) = if mmc {
        (sample_mmc(sm, r, seed)?, dim_mmc(sm, r)?)
    } else {
        (sample_stratum(sm, r, seed)?, dim_massless(sm.matroid(), r)?)
    };
    let chart = Chart::new(sm, &c);
    let theta = chart.initial();
    let n = chart.n;
    let mut js = central_jacobian(&theta, n * (n - 1) / 2, |t| chart.mandelstams(t));
    if mmc {
        js = js * constraint_kernel(&chart.momentum_jacobian());
    }
    Ok(DimensionEstimate { estimated: numerical_rank(&js, JACOBIAN_CUTOFF), formula, parameters: chart.len() })
}

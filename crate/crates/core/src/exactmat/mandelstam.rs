//! Principal-minor sign test, eigen-signature and the Mandelstam verdict.

use nalgebra::linalg::SymmetricEigen;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use serde::Serialize;

use super::det::{bareiss_det, exact_det, exact_rank, float_det, numerical_rank, RANK_CUTOFF};
use super::matrix::{Entries, SymmetricMatrix};
use super::scalar::Scalar;
use super::MatrixError;
use crate::util::combinations;

/// Largest `n` for which all `2^n - 1` principal minors are enumerated.
pub const MAX_MINOR_N: usize = 20;

/// Relative factor of the float zero test for a `k x k` minor:
/// `MINOR_TOL * max|s_ij|^k`.
pub const MINOR_TOL: f64 = 1e-9;

/// Default eigenvalue cutoff relative to the largest `|eigenvalue|`.
pub const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub rank: usize,
}

/// A principal minor whose sign violates `(-1)^(|I|-1) det(S_I) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorWitness {
    /// Zero-based, sorted.
    pub subset: Vec<usize>,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeDiagonal { index: usize, value: Scalar },
    Minor(MinorWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MandelstamVerdict {
    Mandelstam { rank: usize },
    NotMandelstam(Violation),
}

impl MandelstamVerdict {
    pub fn is_mandelstam(&self) -> bool {
        matches!(self, MandelstamVerdict::Mandelstam { .. })
    }
}

fn checked_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>, MatrixError> {
    if subset.is_empty() {
        return Err(MatrixError::EmptySubset);
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= n) {
        return Err(MatrixError::IndexOutOfRange { index: bad, n });
    }
    let mut idx = subset.to_vec();
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// `det(S_I)` for a nonempty zero-based index set `I`.
pub fn principal_minor(s: &SymmetricMatrix, subset: &[usize]) -> Result<Scalar, MatrixError> {
    let idx = checked_subset(s.n(), subset)?;
    Ok(match s.exact_submatrix(&idx) {
        Some(rows) => Scalar::Exact(exact_det(&rows)),
        None => Scalar::Float(float_det(&s.float_submatrix(&idx))),
    })
}

/// Float tolerance applied to a `k x k` minor of `s`.
pub fn minor_tolerance(s: &SymmetricMatrix, k: usize) -> f64 {
    MINOR_TOL * s.max_abs().powi(k as i32)
}

/// The first principal minor (by size, then lexicographically) violating the
/// alternating sign condition, if any.
pub fn find_minor_violation(s: &SymmetricMatrix) -> Result<Option<MinorWitness>, MatrixError> {
    let n = s.n();
    if n > MAX_MINOR_N {
        return Err(MatrixError::TooLarge { n, limit: MAX_MINOR_N });
    }
    match s.entries() {
        Entries::Exact(_) => {
            // one common denominator for the whole matrix
            let rows = s.exact_submatrix(&(0..n).collect::<Vec<_>>()).unwrap_or_default();
            let mut l = BigInt::one();
            for q in rows.iter().flatten() {
                l = l.lcm(q.denom());
            }
            let ints: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|row| row.iter().map(|q| q.numer() * (&l / q.denom())).collect())
                .collect();
            for k in 1..=n {
                for idx in combinations(n, k) {
                    let sub: Vec<Vec<BigInt>> =
                        idx.iter().map(|&i| idx.iter().map(|&j| ints[i][j].clone()).collect()).collect();
                    let d = bareiss_det(sub);
                    let bad = if k % 2 == 1 { d.is_negative() } else { d.is_positive() };
                    if bad {
                        let value = BigRational::new(d, Pow::pow(&l, k as u32));
                        return Ok(Some(MinorWitness { subset: idx, value: Scalar::Exact(value) }));
                    }
                }
            }
            Ok(None)
        }
        Entries::Float(_) => {
            let scale = s.max_abs();
            if scale == 0.0 {
                return Ok(None);
            }
            for k in 1..=n {
                let tol = MINOR_TOL * scale.powi(k as i32);
                for idx in combinations(n, k) {
                    let d = float_det(&s.float_submatrix(&idx));
                    let signed = if k % 2 == 1 { d } else { -d };
                    if signed < -tol {
                        return Ok(Some(MinorWitness { subset: idx, value: Scalar::Float(d) }));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// True iff `(-1)^(|I|-1) det(S_I) >= 0` for every nonempty `I`.
pub fn minor_sign_test(s: &SymmetricMatrix) -> Result<bool, MatrixError> {
    Ok(find_minor_violation(s)?.is_none())
}

/// Counts eigenvalues above `tol * sigma_max` and below `-tol * sigma_max`.
///
/// Exact matrices are converted to doubles first.
pub fn eigen_signature(s: &SymmetricMatrix, tol: f64) -> Result<Signature, MatrixError> {
    let m = s.to_dmatrix();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000).ok_or(MatrixError::EigenFailure)?;
    let top = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(Signature { n_pos: 0, n_neg: 0, rank: 0 });
    }
    let n_pos = eig.eigenvalues.iter().filter(|&&x| x > tol * top).count();
    let n_neg = eig.eigenvalues.iter().filter(|&&x| x < -tol * top).count();
    Ok(Signature { n_pos, n_neg, rank: n_pos + n_neg })
}

/// Exact rank in exact mode; singular-value rank (cutoff `1e-8 sigma_max`) otherwise.
pub fn rank(s: &SymmetricMatrix) -> usize {
    match s.exact_submatrix(&(0..s.n()).collect::<Vec<_>>()) {
        Some(rows) => exact_rank(&rows),
        None => numerical_rank(&s.to_dmatrix(), RANK_CUTOFF),
    }
}

/// Decides membership in the Mandelstam region.
///
/// The zero matrix has no positive eigenvalue and is refused with
/// [`MatrixError::ZeroMatrix`].
pub fn is_mandelstam(s: &SymmetricMatrix) -> Result<MandelstamVerdict, MatrixError> {
    if s.is_zero() {
        return Err(MatrixError::ZeroMatrix);
    }
    let n = s.n();
    let diag_tol = minor_tolerance(s, 1);
    for i in 0..n {
        let v = s.get(i, i);
        let negative = match &v {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Float(x) => *x < -diag_tol,
        };
        if negative {
            return Ok(MandelstamVerdict::NotMandelstam(Violation::NegativeDiagonal { index: i, value: v }));
        }
    }
    if let Some(w) = find_minor_violation(s)? {
        return Ok(MandelstamVerdict::NotMandelstam(Violation::Minor(w)));
    }
    Ok(MandelstamVerdict::Mandelstam { rank: rank(s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn exact(rows: &[&[i64]]) -> SymmetricMatrix {
        let r: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        SymmetricMatrix::from_exact_rows(&r).unwrap()
    }

    fn float(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn antidiagonal_two_by_two_minor() {
        for x in [-3i64, 1, 7] {
            let s = exact(&[&[0, x], &[x, 0]]);
            let m = principal_minor(&s, &[0, 1]).unwrap();
            assert_eq!(m, Scalar::Exact(BigRational::from_integer(BigInt::from(-x * x))));
        }
    }

    #[test]
    fn massless_triple_minor_is_twice_the_product() {
        // for zero diagonal the 3x3 determinant expands to 2 s12 s13 s23
        let s = exact(&[&[0, 2, -3], &[2, 0, 5], &[-3, 5, 0]]);
        let m = principal_minor(&s, &[0, 1, 2]).unwrap();
        assert_eq!(m.to_f64(), 2.0 * 2.0 * -3.0 * 5.0);
    }

    #[test]
    fn subset_errors() {
        let s = exact(&[&[0, 1], &[1, 0]]);
        assert_eq!(principal_minor(&s, &[]), Err(MatrixError::EmptySubset));
        assert_eq!(principal_minor(&s, &[0, 2]), Err(MatrixError::IndexOutOfRange { index: 2, n: 2 }));
    }

    #[test]
    fn minor_test_basic_cases() {
        assert!(minor_sign_test(&exact(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(minor_sign_test(&exact(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(!minor_sign_test(&exact(&[&[1, 0], &[0, 1]])).unwrap());
        assert!(!minor_sign_test(&float(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap());
    }

    #[test]
    fn minor_test_refuses_large_n() {
        let s = SymmetricMatrix::zeros(21, super::super::Mode::Float).unwrap();
        assert_eq!(minor_sign_test(&s), Err(MatrixError::TooLarge { n: 21, limit: 20 }));
    }

    #[test]
    fn signature_of_simple_matrices() {
        let d = float(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, -1.0]]);
        assert_eq!(eigen_signature(&d, EIGEN_TOL).unwrap(), Signature { n_pos: 1, n_neg: 2, rank: 3 });
        let a = float(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(eigen_signature(&a, EIGEN_TOL).unwrap(), Signature { n_pos: 1, n_neg: 1, rank: 2 });
    }

    #[test]
    fn mandelstam_verdicts() {
        assert_eq!(
            is_mandelstam(&exact(&[&[0, 1], &[1, 0]])).unwrap(),
            MandelstamVerdict::Mandelstam { rank: 2 }
        );
        let bad = exact(&[&[0, 1, 1], &[1, 0, -1], &[1, -1, 0]]);
        match is_mandelstam(&bad).unwrap() {
            MandelstamVerdict::NotMandelstam(Violation::Minor(w)) => {
                assert_eq!(w.subset, vec![0, 1, 2]);
                assert_eq!(w.value, Scalar::Exact(BigRational::from_integer(BigInt::from(-2))));
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        assert_eq!(is_mandelstam(&exact(&[&[0, 0], &[0, 0]])), Err(MatrixError::ZeroMatrix));
        match is_mandelstam(&exact(&[&[0, 1], &[1, -2]])).unwrap() {
            MandelstamVerdict::NotMandelstam(Violation::NegativeDiagonal { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn exact_rank_of_block_matrix() {
        let s = exact(&[&[0, 0, 2, 4], &[0, 0, 1, 2], &[2, 1, 0, 0], &[4, 2, 0, 0]]);
        assert_eq!(rank(&s), 2);
        assert_eq!(rank(&s.to_float()), 2);
    }
}

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::scalar::{rational_to_f64, Mode, Scalar};
use super::MatrixError;
use crate::Sign;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Entries {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Symmetric `n x n` matrix storing only its upper triangle, row-major,
/// diagonal included.
///
/// All entries share one [`Mode`]; a matrix can never mix exact and
/// floating values.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Entries,
}

#[inline]
pub(crate) fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..i hold n, n-1, ..., n-i+1 entries
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymmetricMatrix {
    fn check_n(n: usize) -> Result<(), MatrixError> {
        if n == 0 {
            Err(MatrixError::EmptyMatrix)
        } else {
            Ok(())
        }
    }

    pub fn zeros(n: usize, mode: Mode) -> Result<Self, MatrixError> {
        Self::check_n(n)?;
        let len = n * (n + 1) / 2;
        let entries = match mode {
            Mode::Exact => Entries::Exact(vec![BigRational::zero(); len]),
            Mode::Float => Entries::Float(vec![0.0; len]),
        };
        Ok(SymmetricMatrix { n, entries })
    }

    /// Builds an exact matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_exact_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> BigRational,
    ) -> Result<Self, MatrixError> {
        Self::check_n(n)?;
        let mut v = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                v.push(f(i, j));
            }
        }
        Ok(SymmetricMatrix { n, entries: Entries::Exact(v) })
    }

    /// Builds a floating matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_float_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, MatrixError> {
        Self::check_n(n)?;
        let mut v = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                v.push(f(i, j));
            }
        }
        Ok(SymmetricMatrix { n, entries: Entries::Float(v) })
    }

    /// Upper triangle, row-major, including the diagonal.
    pub fn from_upper_exact(n: usize, upper: Vec<BigRational>) -> Result<Self, MatrixError> {
        Self::check_n(n)?;
        if upper.len() != n * (n + 1) / 2 {
            return Err(MatrixError::Format(format!(
                "expected {} upper-triangle entries for n = {n}, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        Ok(SymmetricMatrix { n, entries: Entries::Exact(upper) })
    }

    pub fn from_upper_float(n: usize, upper: Vec<f64>) -> Result<Self, MatrixError> {
        Self::check_n(n)?;
        if upper.len() != n * (n + 1) / 2 {
            return Err(MatrixError::Format(format!(
                "expected {} upper-triangle entries for n = {n}, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(MatrixError::NotANumber);
        }
        Ok(SymmetricMatrix { n, entries: Entries::Float(upper) })
    }

    /// Floating matrix from full rows; the rows must be exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        Self::check_n(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::Format(format!("row {i} has length {}", row.len())));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MatrixError::NotSymmetric { i, j });
                }
            }
        }
        Self::from_float_fn(n, |i, j| rows[i][j])
    }

    /// Exact matrix from full rows of rationals; the rows must be symmetric.
    pub fn from_exact_rows(rows: &[Vec<BigRational>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        Self::check_n(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::Format(format!("row {i} has length {}", row.len())));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MatrixError::NotSymmetric { i, j });
                }
            }
        }
        Self::from_exact_fn(n, |i, j| rows[i][j].clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        match self.entries {
            Entries::Exact(_) => Mode::Exact,
            Entries::Float(_) => Mode::Float,
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        upper_index(self.n, i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        let k = self.idx(i, j);
        match &self.entries {
            Entries::Exact(v) => Scalar::Exact(v[k].clone()),
            Entries::Float(v) => Scalar::Float(v[k]),
        }
    }

    /// Entry as a double regardless of mode.
    pub fn get_f64(&self, i: usize, j: usize) -> f64 {
        let k = self.idx(i, j);
        match &self.entries {
            Entries::Exact(v) => rational_to_f64(&v[k]),
            Entries::Float(v) => v[k],
        }
    }

    pub fn exact_entry(&self, i: usize, j: usize) -> Option<&BigRational> {
        let k = self.idx(i, j);
        match &self.entries {
            Entries::Exact(v) => Some(&v[k]),
            Entries::Float(_) => None,
        }
    }

    pub(crate) fn entries(&self) -> &Entries {
        &self.entries
    }

    /// Upper triangle in storage order.
    pub fn upper(&self) -> Vec<Scalar> {
        match &self.entries {
            Entries::Exact(v) => v.iter().cloned().map(Scalar::Exact).collect(),
            Entries::Float(v) => v.iter().copied().map(Scalar::Float).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            Entries::Exact(v) => v.iter().all(Zero::is_zero),
            Entries::Float(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    /// Largest absolute entry, as a double.
    pub fn max_abs(&self) -> f64 {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(|q| rational_to_f64(&q.abs())).fold(0.0, f64::max),
            Entries::Float(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    pub fn max_abs_exact(&self) -> Option<BigRational> {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(|q| q.abs()).max(),
            Entries::Float(_) => None,
        }
    }

    /// Floating copy (identity on float matrices).
    pub fn to_float(&self) -> SymmetricMatrix {
        match &self.entries {
            Entries::Exact(v) => SymmetricMatrix {
                n: self.n,
                entries: Entries::Float(v.iter().map(rational_to_f64).collect()),
            },
            Entries::Float(_) => self.clone(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get_f64(i, j))
    }

    pub fn to_rows_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get_f64(i, j)).collect()).collect()
    }

    /// Principal submatrix on the given (sorted, distinct) indices as exact rows.
    pub(crate) fn exact_submatrix(&self, idx: &[usize]) -> Option<Vec<Vec<BigRational>>> {
        match &self.entries {
            Entries::Exact(v) => Some(
                idx.iter()
                    .map(|&i| idx.iter().map(|&j| v[self.idx(i, j)].clone()).collect())
                    .collect(),
            ),
            Entries::Float(_) => None,
        }
    }

    pub(crate) fn float_submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.get_f64(idx[a], idx[b]))
    }

    /// The map `S -> J S J` with `J = diag(signs)`: entry `(i, j)` becomes
    /// `signs[i] * signs[j] * s_ij`.
    pub fn conjugate_by_signs(&self, signs: &[Sign]) -> Result<SymmetricMatrix, MatrixError> {
        if signs.len() != self.n {
            return Err(MatrixError::LengthMismatch { expected: self.n, got: signs.len() });
        }
        let n = self.n;
        Ok(match &self.entries {
            Entries::Exact(_) => SymmetricMatrix::from_exact_fn(n, |i, j| {
                let q = self.exact_entry(i, j).cloned().unwrap_or_default();
                if signs[i] * signs[j] == Sign::Plus {
                    q
                } else {
                    -q
                }
            })?,
            Entries::Float(_) => SymmetricMatrix::from_float_fn(n, |i, j| {
                (signs[i] * signs[j]).as_f64() * self.get_f64(i, j)
            })?,
        })
    }

    /// Row sums `sum_j s_ij` for each row `i`.
    pub fn row_sums(&self) -> Vec<Scalar> {
        let n = self.n;
        match &self.entries {
            Entries::Exact(v) => (0..n)
                .map(|i| {
                    let mut acc = BigRational::zero();
                    for j in 0..n {
                        acc += &v[self.idx(i, j)];
                    }
                    Scalar::Exact(acc)
                })
                .collect(),
            Entries::Float(v) => (0..n)
                .map(|i| Scalar::Float((0..n).map(|j| v[self.idx(i, j)]).sum()))
                .collect(),
        }
    }
}

//! Determinants and ranks.
//!
//! Exact values go through fraction-free (Bareiss) elimination on an
//! integer matrix obtained by clearing denominators, so every division
//! performed is exact and intermediate entries stay minors of the input.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Determinant of a square integer matrix by Bareiss elimination with
/// row pivoting on zero pivots.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Rank of an integer matrix by fraction-free row echelon reduction.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Scales rational rows by the lcm of all denominators.
/// Returns the integer rows and the common factor.
fn clear_denominators(rows: &[Vec<BigRational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut l = BigInt::one();
    for q in rows.iter().flatten() {
        l = l.lcm(q.denom());
    }
    let ints = rows
        .iter()
        .map(|row| row.iter().map(|q| q.numer() * (&l / q.denom())).collect())
        .collect();
    (ints, l)
}

pub fn exact_det(rows: &[Vec<BigRational>]) -> BigRational {
    let k = rows.len();
    let (ints, l) = clear_denominators(rows);
    let d = bareiss_det(ints);
    BigRational::new(d, Pow::pow(&l, k as u32))
}

pub fn exact_rank(rows: &[Vec<BigRational>]) -> usize {
    let (ints, _) = clear_denominators(rows);
    bareiss_rank(ints)
}

/// Floating determinant by LU with partial pivoting.
pub fn float_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    let mut a = m.clone();
    let mut det = 1.0;
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pv == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap_rows(p, k);
            det = -det;
        }
        let piv = a[(k, k)];
        det *= piv;
        for i in k + 1..n {
            let f = a[(i, k)] / piv;
            if f != 0.0 {
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
    }
    det
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank: singular values above `cutoff * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, cutoff: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff * top).count()
}

//! Dense tableau simplex over exact rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: BigRational, x: Vec<BigRational> },
    Unbounded,
}

/// Maximizes `c . x` subject to `A x <= b`, `x >= 0`, for `b >= 0` (the
/// origin is feasible, so no first phase is needed).
pub fn maximize(c: &[BigRational], a: &[Vec<BigRational>], b: &[BigRational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert!(b.iter().all(|v| !v.is_negative()), "origin must be feasible");
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = vec![BigRational::zero(); width];
            row[..n].clone_from_slice(&a[i]);
            row[n + i] = BigRational::from_integer(1.into());
            row[width - 1] = b[i].clone();
            row
        })
        .collect();
    let mut z = vec![BigRational::zero(); width];
    for j in 0..n {
        z[j] = -c[j].clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| z[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((row, _)) = leave else { return LpOutcome::Unbounded };
        pivot(&mut t, &mut z, row, enter);
        basis[row] = enter;
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            x[v] = t[i][width - 1].clone();
        }
    }
    LpOutcome::Optimal { value: z[width - 1].clone(), x }
}

fn pivot(t: &mut [Vec<BigRational>], z: &mut [BigRational], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[row].clone();
    let eliminate = |target: &mut [BigRational]| {
        let f = target[col].clone();
        if f.is_zero() {
            return;
        }
        for (v, pv) in target.iter_mut().zip(&pivot_row) {
            *v -= &f * pv;
        }
    };
    for (i, r) in t.iter_mut().enumerate() {
        if i != row {
            eliminate(r);
        }
    }
    eliminate(z);
}

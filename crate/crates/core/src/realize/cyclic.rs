use std::f64::consts::TAU;

use crate::classify::classify_massless;
use crate::exactmat::SymmetricMatrix;

use super::{NormalizedGram, RealizeError};

const ANGLE_TOL: f64 = 1e-7;

/// Cyclic order of the parts of a rank-3 massless Gram matrix, as part
/// indices, canonical up to rotation and reflection.
pub fn cyclic_order(s: &SymmetricMatrix) -> Result<Vec<usize>, RealizeError> {
    let label = classify_massless(s)?.label;
    if label.r() != 3 {
        return Err(RealizeError::RankNotThree(label.r()));
    }
    let reps = label.matroid().representatives();
    let points = circle_points(s, &reps);
    let t = NormalizedGram::from_points(&points);
    let angles = angles_from_gram(&t)?;
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]));
    Ok(canonical_cycle(&order))
}

/// Rotates `order` to start at its smallest entry and picks the
/// lexicographically smaller of the two directions.
pub fn canonical_cycle(order: &[usize]) -> Vec<usize> {
    if order.is_empty() {
        return Vec::new();
    }
    let start = order.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
    let forward: Vec<usize> = order[start..].iter().chain(&order[..start]).copied().collect();
    let mut backward = vec![forward[0]];
    backward.extend(forward[1..].iter().rev());
    forward.min(backward)
}

/// Light-like vectors `q` with `q_i . q_j = s_ij` from the eigenvectors,
/// projected to the circle as `x = (q_1, q_2) / q_0`.
fn circle_points(s: &SymmetricMatrix, reps: &[usize]) -> Vec<Vec<f64>> {
    let eig = s.to_dmatrix().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let pos = idx[0];
    let mut neg: Vec<usize> = idx[1..].to_vec();
    neg.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cols = [pos, neg[0], neg[1]];
    reps.iter()
        .map(|&i| {
            let q: Vec<f64> =
                cols.iter().map(|&c| eig.eigenvalues[c].abs().sqrt() * eig.eigenvectors[(i, c)]).collect();
            let mut x = vec![q[1] / q[0], q[2] / q[0]];
            super::normalize(&mut x);
            x
        })
        .collect()
}

/// `theta_0 = 0`, `theta_1 in [0, pi]`; later angles take the branch of
/// `arccos(1 - t_0mu)` consistent with `t_1mu`.
fn angles_from_gram(t: &NormalizedGram) -> Result<Vec<f64>, RealizeError> {
    let m = t.m();
    let arc = |v: f64| (1.0 - v).clamp(-1.0, 1.0).acos();
    let mut angles = vec![0.0; m];
    if m < 2 {
        return Ok(angles);
    }
    angles[1] = arc(t.get(0, 1));
    for mu in 2..m {
        let a = arc(t.get(0, mu));
        let want = t.get(1, mu);
        let miss = |th: f64| (1.0 - (th - angles[1]).cos() - want).abs();
        let (up, down) = (miss(a), miss(-a));
        if up.min(down) > ANGLE_TOL {
            return Err(RealizeError::InconsistentAngles(up.min(down)));
        }
        angles[mu] = if up <= down { a } else { TAU - a };
    }
    Ok(angles)
}

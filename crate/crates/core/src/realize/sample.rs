use rand::Rng;

use crate::census::{nonempty_massless, CensusError};
use crate::classify::{classify_massless, StratumLabel};
use crate::matroid::SignedMatroid;

use super::{gram, log_uniform, points_are_generic, random_unit, rng_for, MomentumConfig, RealizeError};

pub const MAX_ATTEMPTS: u64 = 100;

/// Separation and conditioning floor for sampled points.
const GENERIC_TOL: f64 = 1e-2;

/// Places one point per part and draws multipliers with the prescribed
/// signs, retrying until the Gram matrix classifies back to `(sm, r)`.
pub fn sample_stratum(sm: &SignedMatroid, r: usize, seed: u64) -> Result<MomentumConfig, RealizeError> {
    let p = sm.matroid();
    if !nonempty_massless(p, r) {
        return Err(CensusError::EmptyStratum { matroid: p.to_string(), r }.into());
    }
    let target = StratumLabel::massless(sm.clone(), r)?;
    let k = r - 1;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_for(seed, attempt);
        let part_points: Vec<Vec<f64>> = if r == 2 {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            vec![vec![s], vec![-s]]
        } else {
            (0..p.m()).map(|_| random_unit(&mut rng, k)).collect()
        };
        if !points_are_generic(&part_points, r, GENERIC_TOL) {
            continue;
        }
        let c = assemble(sm, r, &part_points, seed, |sign| sign * log_uniform(&mut rng, 0.5, 2.0));
        match classify_massless(&gram(&c)) {
            Ok(found) if found.label == target => return Ok(c),
            _ => continue,
        }
    }
    Err(RealizeError::Degenerate { attempts: MAX_ATTEMPTS as usize })
}

/// Expands part points to all elements; loops get `lambda = 0` and the
/// first part's point.
pub(crate) fn assemble(
    sm: &SignedMatroid,
    r: usize,
    part_points: &[Vec<f64>],
    seed: u64,
    mut multiplier: impl FnMut(f64) -> f64,
) -> MomentumConfig {
    let idx = sm.matroid().part_index();
    let sigma = sm.sigma().to_f64();
    let n = sm.n();
    let mut lambdas = vec![0.0; n];
    let mut points = vec![part_points[0].clone(); n];
    for i in 0..n {
        if let Some(mu) = idx[i] {
            lambdas[i] = multiplier(sigma[i]);
            points[i] = part_points[mu].clone();
        }
    }
    MomentumConfig { n, r, lambdas, points, seed }
}

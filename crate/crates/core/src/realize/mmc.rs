//! Momentum-conserving samples.
//!
//! When every part carries both signs (`r = m`), each part's multipliers
//! are balanced to sum to zero. Otherwise a seed quadruple `i, j` (+) and
//! `k, l` (-) with `x_i + x_j = x_k + x_l` conserves momentum on its own;
//! the remaining elements start with small multipliers and damped
//! Gauss-Newton pulls the whole configuration back onto `sum p = 0`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::census::{mmc_admissible, mmc_quadruple, CensusError};
use crate::classify::{classify_massless, StratumLabel};
use crate::matroid::SignedMatroid;

use super::sample::assemble;
use super::{
    gram, log_uniform, normalize, points_are_generic, random_unit, rng_for, tangent_basis, MomentumConfig,
    RealizeError,
};

pub const MAX_NEWTON_ITERS: usize = 200;

const RESIDUAL_TOL: f64 = 1e-10;
const GENERIC_TOL: f64 = 1e-3;
const ATTEMPTS: u64 = 100;

pub fn sample_mmc(sm: &SignedMatroid, r: usize, seed: u64) -> Result<MomentumConfig, RealizeError> {
    if !mmc_admissible(sm, r)? {
        return Err(CensusError::Inadmissible { label: sm.to_string(), r }.into());
    }
    let target = StratumLabel::mmc(sm.clone(), r)?;
    let mut last_failure = RealizeError::Degenerate { attempts: ATTEMPTS as usize };
    for attempt in 0..ATTEMPTS {
        let mut rng = rng_for(seed, attempt);
        let built = if r == sm.m() { balanced(sm, r, seed, &mut rng) } else { seeded(sm, r, seed, &mut rng) };
        let c = match built {
            Ok(Some(c)) => c,
            Ok(None) => continue,
            Err(e) => {
                last_failure = e;
                continue;
            }
        };
        let residual = c.total_momentum().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if residual > RESIDUAL_TOL {
            continue;
        }
        if matches!(classify_massless(&gram(&c)), Ok(found) if found.label == target) {
            return Ok(c);
        }
    }
    Err(last_failure)
}

/// `r = m`: generic points, and inside each part the positive multipliers
/// are rescaled to cancel the negative ones.
fn balanced(sm: &SignedMatroid, r: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<Option<MomentumConfig>, RealizeError> {
    let p = sm.matroid();
    let part_points: Vec<Vec<f64>> = if r == 2 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..p.m()).map(|_| random_unit(rng, r - 1)).collect()
    };
    if !points_are_generic(&part_points, r, GENERIC_TOL) {
        return Ok(None);
    }
    let mut c = assemble(sm, r, &part_points, seed, |s| s * log_uniform(rng, 0.5, 2.0));
    for part in p.parts() {
        let pos: f64 = part.iter().map(|&i| c.lambdas[i]).filter(|&l| l > 0.0).sum();
        let neg: f64 = -part.iter().map(|&i| c.lambdas[i]).filter(|&l| l < 0.0).sum::<f64>();
        for &i in part {
            if c.lambdas[i] > 0.0 {
                c.lambdas[i] *= neg / pos;
            }
        }
    }
    Ok(Some(c))
}

/// Unknowns: `u_i` with `lambda_i = sigma_i exp(u_i)` for non-loops, and
/// one point per part moved along its tangent space.
struct Problem {
    r: usize,
    part_of: Vec<usize>,
    sigma: Vec<f64>,
    u: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl Problem {
    fn lambda(&self, a: usize) -> f64 {
        self.sigma[a] * self.u[a].exp()
    }

    fn residual(&self) -> DVector<f64> {
        let mut f = DVector::zeros(self.r);
        for a in 0..self.u.len() {
            let l = self.lambda(a);
            let x = &self.points[self.part_of[a]];
            f[0] += l;
            for k in 1..self.r {
                f[k] += l * x[k - 1];
            }
        }
        f
    }

    fn jacobian(&self, bases: &[Vec<Vec<f64>>]) -> DMatrix<f64> {
        let nvar = self.u.len() + bases.iter().map(Vec::len).sum::<usize>();
        let mut j = DMatrix::zeros(self.r, nvar);
        let mut part_sum = vec![0.0; self.points.len()];
        for a in 0..self.u.len() {
            let l = self.lambda(a);
            let x = &self.points[self.part_of[a]];
            part_sum[self.part_of[a]] += l;
            j[(0, a)] = l;
            for k in 1..self.r {
                j[(k, a)] = l * x[k - 1];
            }
        }
        let mut col = self.u.len();
        for (mu, basis) in bases.iter().enumerate() {
            for t in basis {
                for k in 1..self.r {
                    j[(k, col)] = part_sum[mu] * t[k - 1];
                }
                col += 1;
            }
        }
        j
    }

    fn step(&self, bases: &[Vec<Vec<f64>>], delta: &DVector<f64>, alpha: f64) -> Problem {
        let mut next = Problem {
            r: self.r,
            part_of: self.part_of.clone(),
            sigma: self.sigma.clone(),
            u: self.u.iter().enumerate().map(|(a, &u)| u + alpha * delta[a]).collect(),
            points: self.points.clone(),
        };
        let mut col = self.u.len();
        for (mu, basis) in bases.iter().enumerate() {
            for t in basis {
                for (x, tv) in next.points[mu].iter_mut().zip(t) {
                    *x += alpha * delta[col] * tv;
                }
                col += 1;
            }
            normalize(&mut next.points[mu]);
        }
        next
    }

    /// Damped Gauss-Newton with minimum-norm steps; a step is taken only
    /// if it lowers the residual.
    fn solve(mut self) -> Result<Problem, RealizeError> {
        let mut norm = self.residual().amax();
        for _ in 0..MAX_NEWTON_ITERS {
            if norm <= 1e-14 {
                return Ok(self);
            }
            let bases: Vec<Vec<Vec<f64>>> = self.points.iter().map(|x| tangent_basis(x)).collect();
            let j = self.jacobian(&bases);
            let f = self.residual();
            let svd = j.svd(true, true);
            let Ok(delta) = svd.solve(&(-f), 1e-12) else { break };
            let mut alpha = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial = self.step(&bases, &delta, alpha);
                let tn = trial.residual().amax();
                if tn < norm {
                    self = trial;
                    norm = tn;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if norm <= RESIDUAL_TOL * 1e-2 {
            Ok(self)
        } else {
            Err(RealizeError::NoConvergence { iterations: MAX_NEWTON_ITERS, residual: norm })
        }
    }

    fn perturb(&mut self, rng: &mut ChaCha8Rng, size: f64) {
        for u in &mut self.u {
            *u += size * rng.sample::<f64, _>(StandardNormal);
        }
        for x in &mut self.points {
            for v in x.iter_mut() {
                *v += size * rng.sample::<f64, _>(StandardNormal);
            }
            normalize(x);
        }
    }
}

fn seeded(sm: &SignedMatroid, r: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<Option<MomentumConfig>, RealizeError> {
    let p = sm.matroid();
    let q = mmc_quadruple(sm).expect("admissible with r < m has a quadruple");
    let idx = p.part_index();
    let k = r - 1;
    let mut points: Vec<Vec<f64>> = (0..p.m()).map(|_| random_unit(rng, k)).collect();
    let a = random_unit(rng, k);
    let b = random_unit(rng, k);
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let (pi, pj, pk, pl) = (idx[q.i].unwrap(), idx[q.j].unwrap(), idx[q.k].unwrap(), idx[q.l].unwrap());
    if q.uniform {
        points[pi] = a.clone();
        points[pj] = neg(&a);
        points[pk] = b.clone();
        points[pl] = neg(&b);
    } else {
        points[pi] = a;
        points[pj] = b;
    }
    let non_loops = p.non_loops();
    let sigma_all = sm.sigma().to_f64();
    let seeds = [q.i, q.j, q.k, q.l];
    let u: Vec<f64> = non_loops
        .iter()
        .map(|e| if seeds.contains(e) { 0.0 } else { (0.1 * log_uniform(rng, 0.5, 2.0)).ln() })
        .collect();
    let problem = Problem {
        r,
        part_of: non_loops.iter().map(|&e| idx[e].unwrap()).collect(),
        sigma: non_loops.iter().map(|&e| sigma_all[e]).collect(),
        u,
        points,
    };
    let mut solved = problem.solve()?;
    solved.perturb(rng, 0.05);
    let solved = solved.solve()?;
    if !points_are_generic(&solved.points, r, GENERIC_TOL) {
        return Ok(None);
    }
    let mut c = assemble(sm, r, &solved.points, seed, |_| 0.0);
    for (a, &e) in non_loops.iter().enumerate() {
        c.lambdas[e] = solved.lambda(a);
    }
    Ok(Some(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Kind;
    use crate::matroid::{enumerate_signed, RankTwoMatroid};
    use crate::regioncheck::{igusa_quartic, Mmc5Point};
    use crate::Sign::{Minus as M, Plus as P};

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    #[test]
    fn four_particle_cone() {
        let sm = SignedMatroid::with_signs(RankTwoMatroid::uniform(4), &[P, M, P, M]).unwrap();
        let c = sample_mmc(&sm, 3, 11).unwrap();
        let s = gram(&c);
        assert!(max_abs(&c.total_momentum()) <= 1e-10);
        // x = s12 and y = s14 are both negative on this cone.
        assert!(s.get_f64(0, 1) < 0.0 && s.get_f64(0, 3) < 0.0);
    }

    #[test]
    fn five_particle_top_stratum_has_negative_quartic() {
        let sm = SignedMatroid::with_signs(RankTwoMatroid::uniform(5), &[M, M, P, P, P]).unwrap();
        let c = sample_mmc(&sm, 4, 3).unwrap();
        let s = gram(&c);
        let pt = Mmc5Point::from_gram(&s).unwrap();
        assert!(igusa_quartic(&pt) < num_rational::BigRational::from_integer(0.into()));
    }

    #[test]
    fn all_small_admissible_labels_conserve_momentum() {
        for n in 4..=5 {
            for sm in enumerate_signed(n, 2).unwrap() {
                for r in 2..=sm.m().min(4) {
                    if !matches!(mmc_admissible(&sm, r), Ok(true)) {
                        continue;
                    }
                    let c = sample_mmc(&sm, r, 1).unwrap_or_else(|e| panic!("{sm} r={r}: {e}"));
                    assert!(max_abs(&c.total_momentum()) <= 1e-10);
                    let s = gram(&c);
                    assert!(s.row_sums().iter().all(|x| x.to_f64().abs() <= 1e-9));
                    let label = classify_massless(&s).unwrap().label;
                    assert_eq!(label.kind(), Kind::Mmc);
                    assert_eq!(label.signed(), &sm);
                }
            }
        }
    }

    #[test]
    fn inadmissible_is_refused() {
        let sm = SignedMatroid::with_signs(RankTwoMatroid::uniform(4), &[P, P, P, M]).unwrap();
        assert!(matches!(sample_mmc(&sm, 3, 0), Err(RealizeError::Census(CensusError::Inadmissible { .. }))));
    }
}

//! Moving a configuration into a stratum whose closure contains it.
//!
//! Entries that vanish on the source but not on the target are of size
//! `eta` or `eta^2`, far below any float threshold once `eta` is small, so
//! the candidate Gram matrix is built and classified in exact arithmetic.
//! Sphere points are carried as stereographic coordinates, which keeps the
//! rational points exactly on the unit sphere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::census::{nonempty_massless, CensusError};
use crate::classify::{classify_massless, StratumLabel};
use crate::exactmat::{rational_to_f64, SymmetricMatrix};
use crate::matroid::{signed_leq, SignedMatroid};
use crate::Sign;

use super::{gram, rng_for, MomentumConfig, RealizeError};

const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone, Serialize)]
pub struct Refinement {
    pub config: MomentumConfig,
    pub gram: SymmetricMatrix,
    pub distance: f64,
    pub label: StratumLabel,
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(lo..=hi)), BigInt::from(den))
}

/// Stereographic chart of the unit sphere in `R^k` from the pole
/// `pole_sign * e_axis`.
struct Stereo {
    k: usize,
    axis: usize,
    pole_sign: f64,
}

impl Stereo {
    /// Chooses the pole farthest from every given point.
    fn avoiding(points: &[Vec<f64>], k: usize) -> Stereo {
        let mut best = Stereo { k, axis: 0, pole_sign: 1.0 };
        let mut best_gap = f64::NEG_INFINITY;
        for axis in 0..k {
            for pole_sign in [1.0, -1.0] {
                let gap = points.iter().map(|x| 1.0 - pole_sign * x[axis]).fold(f64::INFINITY, f64::min);
                if gap > best_gap {
                    best_gap = gap;
                    best = Stereo { k, axis, pole_sign };
                }
            }
        }
        best
    }

    fn chart(&self, x: &[f64]) -> Vec<f64> {
        let denom = 1.0 - self.pole_sign * x[self.axis];
        (0..self.k).filter(|&a| a != self.axis).map(|a| x[a] / denom).collect()
    }

    /// `x = (2t, s(|t|^2 - 1)) / (|t|^2 + 1)` with the pole coordinate in
    /// slot `axis`; exact unit norm.
    fn point(&self, t: &[BigRational]) -> Vec<BigRational> {
        let norm2: BigRational = t.iter().map(|v| v * v).sum();
        let denom = &norm2 + BigRational::one();
        let two = BigRational::from_integer(2.into());
        let mut rest = t.iter().map(|v| &two * v / &denom);
        let mut pole = (&norm2 - BigRational::one()) / &denom;
        if self.pole_sign < 0.0 {
            pole = -pole;
        }
        (0..self.k).map(|a| if a == self.axis { pole.clone() } else { rest.next().unwrap() }).collect()
    }
}

fn exact_gram(lambdas: &[BigRational], points: &[Vec<BigRational>]) -> SymmetricMatrix {
    let n = lambdas.len();
    SymmetricMatrix::from_exact_fn(n, |i, j| {
        if i == j || lambdas[i].is_zero() || lambdas[j].is_zero() {
            return BigRational::zero();
        }
        let dot: BigRational = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
        &lambdas[i] * &lambdas[j] * (BigRational::one() - dot)
    })
    .expect("n >= 1")
}

/// Finds a configuration in the stratum `(target, r)` whose Gram matrix is
/// within `eps` of `gram(c)` entrywise. `c` must lie in a stratum below it.
pub fn perturb_to_refinement(
    c: &MomentumConfig,
    target: &SignedMatroid,
    r: usize,
    eps: f64,
) -> Result<Refinement, RealizeError> {
    c.validate()?;
    let s0 = gram(c);
    let source = classify_massless(&s0)?.label;
    if !nonempty_massless(target.matroid(), r) {
        return Err(CensusError::EmptyStratum { matroid: target.matroid().to_string(), r }.into());
    }
    if !signed_leq(source.signed(), target)? || r < source.r() {
        return Err(RealizeError::Incomparable {
            source_label: format!("{} r={}", source.signed(), source.r()),
            target: format!("{target} r={r}"),
        });
    }
    if source.signed() == target && source.r() == r {
        return Ok(Refinement { config: c.clone(), gram: s0, distance: 0.0, label: source });
    }

    let n = c.n;
    let k = r - 1;
    let src_parts = source.matroid().part_index();
    let tgt = target.matroid();
    let sign_f = |s: Option<Sign>| s.map_or(0.0, Sign::as_f64);

    // Global orientation taking target signs to the signs of `c`.
    let anchor = source.matroid().non_loops()[0];
    let orient = c.lambdas[anchor].signum() * sign_f(target.sigma().get(anchor));

    let padded: Vec<Vec<f64>> =
        c.points.iter().map(|x| x.iter().copied().chain(std::iter::repeat(0.0)).take(k).collect()).collect();
    let used: Vec<Vec<f64>> = source.matroid().representatives().iter().map(|&i| padded[i].clone()).collect();
    let stereo = (k >= 2).then(|| Stereo::avoiding(&used, k));

    let mut rng = rng_for(c.seed, 0x9e37);
    // Per target part: the source part it came from, if any, and a direction.
    let origin: Vec<Option<usize>> =
        tgt.parts().iter().map(|part| part.iter().find_map(|&i| src_parts[i])).collect();
    let deltas: Vec<Vec<BigRational>> =
        (0..tgt.m()).map(|_| (0..k.saturating_sub(1)).map(|_| random_rational(&mut rng, -1000, 1000, 1000)).collect()).collect();
    let fresh: Vec<Vec<BigRational>> =
        (0..tgt.m()).map(|_| (0..k.saturating_sub(1)).map(|_| random_rational(&mut rng, -2000, 2000, 1000)).collect()).collect();
    let rho: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 500, 2000, 1000)).collect();

    let base_chart: Vec<Vec<BigRational>> = match &stereo {
        Some(st) => (0..source.matroid().m())
            .map(|mu| st.chart(&used[mu]).into_iter().map(q).collect())
            .collect(),
        None => Vec::new(),
    };

    let target_label = StratumLabel::massless(target.clone(), r)?;
    let tgt_index = tgt.part_index();
    let mut eta = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    for _ in 0..=MAX_HALVINGS {
        let part_points: Vec<Vec<BigRational>> = (0..tgt.m())
            .map(|nu| match (&stereo, origin[nu]) {
                (Some(st), Some(mu)) => {
                    let t: Vec<BigRational> = base_chart[mu].iter().zip(&deltas[nu]).map(|(b, d)| b + &eta * d).collect();
                    st.point(&t)
                }
                (Some(st), None) => st.point(&fresh[nu]),
                (None, Some(mu)) => vec![q(used[mu][0])],
                (None, None) => vec![BigRational::one()],
            })
            .collect();
        let mut lambdas = vec![BigRational::zero(); n];
        let mut points = vec![vec![BigRational::zero(); k]; n];
        for i in 0..n {
            let Some(nu) = tgt_index[i] else { continue };
            points[i] = part_points[nu].clone();
            lambdas[i] = if src_parts[i].is_some() {
                q(c.lambdas[i])
            } else {
                q(orient * sign_f(target.sigma().get(i))) * &eta * &rho[i]
            };
        }
        let s = exact_gram(&lambdas, &points);
        let distance = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (s.get_f64(i, j) - s0.get_f64(i, j)).abs())
            .fold(0.0, f64::max);
        let lands = matches!(classify_massless(&s), Ok(found)
            if found.label.signed() == target_label.signed() && found.label.r() == r);
        if distance <= eps && lands {
            let label = classify_massless(&s)?.label;
            let config = MomentumConfig {
                n,
                r,
                lambdas: lambdas.iter().map(rational_to_f64).collect(),
                points: points.iter().map(|x| x.iter().map(rational_to_f64).collect()).collect(),
                seed: c.seed,
            };
            return Ok(Refinement { config, gram: s, distance, label });
        }
        eta *= &half;
    }
    Err(RealizeError::Degenerate { attempts: MAX_HALVINGS as usize + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::Mode;
    use crate::matroid::RankTwoMatroid;
    use crate::realize::sample_stratum;
    use crate::Sign::{Minus as M, Plus as P};

    fn two_blocks() -> MomentumConfig {
        let p = RankTwoMatroid::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        sample_stratum(&SignedMatroid::positive(p), 2, 4).unwrap()
    }

    #[test]
    fn stereographic_points_are_exact_unit_vectors() {
        let st = Stereo { k: 3, axis: 1, pole_sign: -1.0 };
        let x = st.point(&[BigRational::new(1.into(), 3.into()), BigRational::new((-7).into(), 5.into())]);
        let norm: BigRational = x.iter().map(|v| v * v).sum();
        assert_eq!(norm, BigRational::one());
        let back = st.chart(&x.iter().map(rational_to_f64).collect::<Vec<_>>());
        assert!((back[0] - 1.0 / 3.0).abs() < 1e-12 && (back[1] + 1.4).abs() < 1e-12);
    }

    #[test]
    fn splits_blocks_into_uniform_rank_three() {
        let c = two_blocks();
        let target = SignedMatroid::positive(RankTwoMatroid::uniform(4));
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let out = perturb_to_refinement(&c, &target, 3, eps).unwrap();
            assert!(out.distance <= eps && out.distance <= last);
            assert_eq!(out.gram.mode(), Mode::Exact);
            assert_eq!(out.label.signed(), &target);
            assert_eq!(out.label.r(), 3);
            last = out.distance;
        }
    }

    #[test]
    fn unloops_with_prescribed_sign() {
        let p = RankTwoMatroid::new(4, vec![vec![0], vec![1], vec![2]]).unwrap();
        let src = SignedMatroid::new(p, crate::matroid::SignVector::new(vec![Some(P), Some(M), Some(P), None])).unwrap();
        let c = sample_stratum(&src, 3, 2).unwrap();
        let target = SignedMatroid::with_signs(RankTwoMatroid::uniform(4), &[P, M, P, M]).unwrap();
        let out = perturb_to_refinement(&c, &target, 4, 1e-3).unwrap();
        assert_eq!(out.label.signed(), &target);
        assert_eq!(out.label.r(), 4);
    }

    #[test]
    fn identity_target_returns_input() {
        let c = two_blocks();
        let p = RankTwoMatroid::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let out = perturb_to_refinement(&c, &SignedMatroid::positive(p), 2, 1e-3).unwrap();
        assert_eq!(out.config, c);
        assert_eq!(out.distance, 0.0);
    }

    #[test]
    fn incomparable_is_refused() {
        let c = two_blocks();
        let other = RankTwoMatroid::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let err = perturb_to_refinement(&c, &SignedMatroid::positive(other), 2, 1e-3).unwrap_err();
        assert!(matches!(err, RealizeError::Incomparable { .. }));
    }
}

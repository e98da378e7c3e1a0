//! Exact checks of the momentum-conserving regions for four and five
//! massless particles.
//!
//! For `n = 4` the momentum-conserving matrices form a plane with
//! coordinates `(x, y)`; for `n = 5` a five-dimensional space with
//! coordinates `(a, b, c, d, e) = (s12, s23, s34, s45, s15)`.

mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify_massless, ClassifyError, StratumLabel};
use crate::exactmat::{MatrixError, Scalar, SymmetricMatrix};
use crate::matroid::{RankTwoMatroid, SignedMatroid};
use crate::util::combinations;
use crate::Sign;

pub use simplex::{maximize, LpOutcome};

/// Column order of the five-particle sign table.
pub const PAIRS5: [(usize, usize); 10] =
    [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn rational_str<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Mmc4Point {
    #[serde(serialize_with = "rational_str")]
    pub x: BigRational,
    #[serde(serialize_with = "rational_str")]
    pub y: BigRational,
}

impl Mmc4Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Mmc4Point { x, y }
    }
}

pub fn mmc4_matrix(p: &Mmc4Point) -> SymmetricMatrix {
    let (x, y) = (&p.x, &p.y);
    let w = -(x + y);
    let z = BigRational::zero();
    let rows = vec![
        vec![z.clone(), x.clone(), w.clone(), y.clone()],
        vec![x.clone(), z.clone(), y.clone(), w.clone()],
        vec![w.clone(), y.clone(), z.clone(), x.clone()],
        vec![y.clone(), w, x.clone(), z],
    ];
    SymmetricMatrix::from_exact_rows(&rows).expect("symmetric by construction")
}

/// `-2xy(x+y)`, the common value of every 3x3 principal minor.
pub fn mmc4_cubic(p: &Mmc4Point) -> BigRational {
    int(-2) * &p.x * &p.y * (&p.x + &p.y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "region", rename_all = "lowercase")]
pub enum Mmc4Region {
    Stratum(StratumLabel),
    Outside,
    Origin,
}

pub fn mmc4_classify(p: &Mmc4Point) -> Mmc4Region {
    if p.x.is_zero() && p.y.is_zero() {
        return Mmc4Region::Origin;
    }
    if mmc4_cubic(p).is_negative() {
        return Mmc4Region::Outside;
    }
    let label = classify_massless(&mmc4_matrix(p)).expect("closed region away from the origin classifies").label;
    Mmc4Region::Stratum(label)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Mmc5Point {
    #[serde(serialize_with = "rational_str")]
    pub a: BigRational,
    #[serde(serialize_with = "rational_str")]
    pub b: BigRational,
    #[serde(serialize_with = "rational_str")]
    pub c: BigRational,
    #[serde(serialize_with = "rational_str")]
    pub d: BigRational,
    #[serde(serialize_with = "rational_str")]
    pub e: BigRational,
}

impl Mmc5Point {
    pub fn new(v: [BigRational; 5]) -> Self {
        let [a, b, c, d, e] = v;
        Mmc5Point { a, b, c, d, e }
    }

    pub fn from_ints(v: [i64; 5]) -> Self {
        Mmc5Point::new(v.map(int))
    }

    pub fn coords(&self) -> [&BigRational; 5] {
        [&self.a, &self.b, &self.c, &self.d, &self.e]
    }

    /// Reads `(s12, s23, s34, s45, s15)`; float entries are converted
    /// exactly to rationals.
    pub fn from_gram(s: &SymmetricMatrix) -> Result<Self, MatrixError> {
        if s.n() != 5 {
            return Err(MatrixError::LengthMismatch { expected: 5, got: s.n() });
        }
        let read = |i: usize, j: usize| -> Result<BigRational, MatrixError> {
            match s.get(i, j) {
                Scalar::Exact(q) => Ok(q),
                Scalar::Float(f) => BigRational::from_float(f).ok_or(MatrixError::NotANumber),
            }
        };
        Ok(Mmc5Point::new([read(0, 1)?, read(1, 2)?, read(2, 3)?, read(3, 4)?, read(0, 4)?]))
    }

    fn combine(&self, other: &Mmc5Point, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Mmc5Point {
        let (x, y) = (self.coords(), other.coords());
        Mmc5Point::new(std::array::from_fn(|k| f(x[k], y[k])))
    }
}

pub fn mmc5_matrix(p: &Mmc5Point) -> SymmetricMatrix {
    let Mmc5Point { a, b, c, d, e } = p;
    let z = BigRational::zero();
    let s13 = -a - b + d;
    let s14 = b - d - e;
    let s24 = -b - c + e;
    let s25 = -a + c - e;
    let s35 = a - c - d;
    let rows = vec![
        vec![z.clone(), a.clone(), s13.clone(), s14.clone(), e.clone()],
        vec![a.clone(), z.clone(), b.clone(), s24.clone(), s25.clone()],
        vec![s13, b.clone(), z.clone(), c.clone(), s35.clone()],
        vec![s14, s24, c.clone(), z.clone(), d.clone()],
        vec![e.clone(), s25, s35, d.clone(), z],
    ];
    SymmetricMatrix::from_exact_rows(&rows).expect("symmetric by construction")
}

pub fn igusa_quartic(p: &Mmc5Point) -> BigRational {
    let Mmc5Point { a, b, c, d, e } = p;
    let sq = |x: &BigRational| x * x;
    let two = int(2);
    let squares = sq(a) * sq(b) + sq(b) * sq(c) + sq(c) * sq(d) + sq(d) * sq(e) + sq(a) * sq(e);
    let fours = a * b * c * d + a * b * c * e + a * b * d * e + a * c * d * e + b * c * d * e;
    let chains = a * sq(b) * c + b * sq(c) * d + c * sq(d) * e + a * d * sq(e) + sq(a) * b * e;
    squares + &two * fours - two * chains
}

/// The ten entries `s_ij`, in [`PAIRS5`] order, as linear forms in
/// `(a, b, c, d, e)`.
pub fn entry_forms() -> [[BigRational; 5]; 10] {
    let columns: Vec<SymmetricMatrix> = (0..5)
        .map(|k| {
            let mut v = [0i64; 5];
            v[k] = 1;
            mmc5_matrix(&Mmc5Point::from_ints(v))
        })
        .collect();
    std::array::from_fn(|row| {
        let (i, j) = PAIRS5[row];
        std::array::from_fn(|k| columns[k].exact_entry(i, j).cloned().expect("exact"))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementRegion {
    /// Signs of the ten entries in [`PAIRS5`] order.
    pub signs: Vec<Sign>,
    /// A point where every entry has the prescribed sign.
    pub witness: Mmc5Point,
}

impl ArrangementRegion {
    /// Whether `s_ij s_ik s_jk > 0` for every triple.
    pub fn triple_consistent(&self) -> bool {
        let sign = |i: usize, j: usize| {
            let k = PAIRS5.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
            self.signs[k]
        };
        combinations(5, 3).all(|t| sign(t[0], t[1]) * sign(t[0], t[2]) * sign(t[1], t[2]) == Sign::Plus)
    }

    /// For a triple-consistent region, the particle signs with exactly
    /// two minus entries (the minority sign is written as minus).
    pub fn sigma(&self) -> Option<Vec<Sign>> {
        if !self.triple_consistent() {
            return None;
        }
        let mut sigma = vec![Sign::Plus; 5];
        for j in 1..5 {
            sigma[j] = self.signs[j - 1];
        }
        if sigma.iter().filter(|&&s| s == Sign::Minus).count() > 2 {
            sigma.iter_mut().for_each(|s| *s = -*s);
        }
        Some(sigma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementCensus {
    pub region_count: usize,
    pub regions: Vec<ArrangementRegion>,
    /// Triple-consistent regions, ordered by their sign vectors with minus
    /// before plus.
    pub consistent: Vec<ArrangementRegion>,
}

/// Decides strict feasibility of `eps_k f_k(p) > 0` for all ten forms by
/// maximizing a common slack `t <= 1`; the cone is homogeneous, so it is
/// nonempty exactly when the optimum is positive.
pub fn region_witness(signs: &[Sign], forms: &[[BigRational; 5]; 10]) -> Option<Mmc5Point> {
    // Variables: p+ (5), p- (5), t.
    let mut a = Vec::with_capacity(11);
    for (form, &s) in forms.iter().zip(signs) {
        let eps = int(s.as_f64() as i64);
        let mut row = Vec::with_capacity(11);
        row.extend(form.iter().map(|f| -(&eps * f)));
        row.extend(form.iter().map(|f| &eps * f));
        row.push(BigRational::one());
        a.push(row);
    }
    let mut bound = vec![BigRational::zero(); 11];
    bound[10] = BigRational::one();
    a.push(bound);
    let mut b = vec![BigRational::zero(); 10];
    b.push(BigRational::one());
    let mut c = vec![BigRational::zero(); 11];
    c[10] = BigRational::one();
    match maximize(&c, &a, &b) {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            Some(Mmc5Point::new(std::array::from_fn(|k| &x[k] - &x[k + 5])))
        }
        LpOutcome::Optimal { .. } => None,
        LpOutcome::Unbounded => unreachable!("slack is bounded by 1"),
    }
}

pub fn arrangement_census() -> ArrangementCensus {
    let forms = entry_forms();
    let regions: Vec<ArrangementRegion> = (0u32..1 << 10)
        .into_par_iter()
        .filter_map(|bits| {
            let signs: Vec<Sign> =
                (0..10).map(|k| if bits >> (9 - k) & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
            region_witness(&signs, &forms).map(|witness| ArrangementRegion { signs, witness })
        })
        .collect();
    let mut consistent: Vec<ArrangementRegion> = regions.iter().filter(|r| r.triple_consistent()).cloned().collect();
    consistent.sort_by_key(|r| r.sigma().map(|s| s.iter().map(|&x| x == Sign::Plus).collect::<Vec<_>>()));
    ArrangementCensus { region_count: regions.len(), regions, consistent }
}

/// First `k / steps` on the segment from `p` to `q` where the quartic
/// vanishes exactly.
pub fn boundary_on_segment(p: &Mmc5Point, q: &Mmc5Point, steps: u32) -> Option<(BigRational, Mmc5Point)> {
    (0..=steps).find_map(|k| {
        let t = BigRational::new(BigInt::from(k), BigInt::from(steps));
        let x = p.combine(q, |u, v| u + &t * (v - u));
        igusa_quartic(&x).is_zero().then_some((t, x))
    })
}

/// A rational point of the rank-3 stratum of `U_5` with signs
/// `(-,-,+,+,+)`, built from rational points on the circle.
pub fn rational_boundary_point() -> Mmc5Point {
    let us: Vec<BigRational> = [(-3, 1), (-2, 1), (-1, 1), (-1, 2), (-1, 3), (0, 1), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1)]
        .iter()
        .map(|&(p, q)| BigRational::new(p.into(), q.into()))
        .collect();
    let circle: Vec<[BigRational; 2]> = us
        .iter()
        .map(|u| {
            let d = BigRational::one() + u * u;
            [(BigRational::one() - u * u) / &d, int(2) * u / &d]
        })
        .collect();
    let sm = SignedMatroid::with_signs(RankTwoMatroid::uniform(5), &[Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus, Sign::Plus])
        .expect("full support");
    let want = StratumLabel::mmc(sm, 3).expect("admissible");
    let k = circle.len();
    for i0 in 0..k {
        for i1 in i0 + 1..k {
            for i2 in 0..k {
                for i3 in i2 + 1..k {
                    for i4 in i3 + 1..k {
                        let idx = [i0, i1, i2, i3, i4];
                        if (0..5).any(|x| (x + 1..5).any(|y| idx[x] == idx[y])) {
                            continue;
                        }
                        let pts: Vec<&[BigRational; 2]> = idx.iter().map(|&i| &circle[i]).collect();
                        if let Some(s) = conserving_gram(&pts) {
                            if matches!(classify_massless(&s), Ok(c) if c.label == want) {
                                return Mmc5Point::from_gram(&s).expect("n = 5");
                            }
                        }
                    }
                }
            }
        }
    }
    unreachable!("the search space contains rank-3 configurations")
}

/// With `lambda_4 = lambda_5 = 1`, solves for the other three multipliers
/// so that `sum lambda_i (1, x_i) = 0`, and returns the Gram matrix.
fn conserving_gram(pts: &[&[BigRational; 2]]) -> Option<SymmetricMatrix> {
    let col = |i: usize| [BigRational::one(), pts[i][0].clone(), pts[i][1].clone()];
    let m: Vec<[BigRational; 3]> = (0..3).map(col).collect();
    let rhs: Vec<BigRational> = (0..3).map(|r| -(&col(3)[r] + &col(4)[r])).collect();
    let det3 = |c: [&[BigRational; 3]; 3]| {
        &c[0][0] * (&c[1][1] * &c[2][2] - &c[2][1] * &c[1][2]) - &c[1][0] * (&c[0][1] * &c[2][2] - &c[2][1] * &c[0][2])
            + &c[2][0] * (&c[0][1] * &c[1][2] - &c[1][1] * &c[0][2])
    };
    let rhs_arr: [BigRational; 3] = [rhs[0].clone(), rhs[1].clone(), rhs[2].clone()];
    let d = det3([&m[0], &m[1], &m[2]]);
    if d.is_zero() {
        return None;
    }
    let lam = |k: usize| {
        let mut cols = [&m[0], &m[1], &m[2]];
        cols[k] = &rhs_arr;
        det3(cols) / &d
    };
    let lambdas = [lam(0), lam(1), lam(2), BigRational::one(), BigRational::one()];
    SymmetricMatrix::from_exact_fn(5, |i, j| {
        if i == j {
            return BigRational::zero();
        }
        let dot = &pts[i][0] * &pts[j][0] + &pts[i][1] * &pts[j][1];
        &lambdas[i] * &lambdas[j] * (BigRational::one() - dot)
    })
    .ok()
}

/// Classification of an explicit five-particle point, or the reason it
/// lies outside every stratum.
pub fn mmc5_classify(p: &Mmc5Point) -> Result<StratumLabel, ClassifyError> {
    classify_massless(&mmc5_matrix(p)).map(|c| c.label)
}

//! Massless Mandelstam matrix to stratum label.
//!
//! Zero rows are loops. On the remaining indices, `i ~ j` iff `s_ij = 0`
//! must be an equivalence relation; its classes are the parts. The signs
//! come from 2-colouring the graph of nonzero entries so that
//! `sign(s_ij) = sigma_i sigma_j`, and the rank finishes the label.

use std::collections::VecDeque;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::census::{dim_massless, dim_mmc, mmc_admissible, nonempty_massless, CensusError};
use crate::exactmat::{
    is_mandelstam, minor_tolerance, rank, MandelstamVerdict, MatrixError, Mode, Scalar, SymmetricMatrix, Violation,
};
use crate::matroid::{MatroidError, RankTwoMatroid, SignVector, SignedMatroid, SignedMatroidJson};
use crate::Sign;

/// Entries with `|s_ij| <= ZERO_TOL * max|s|` count as zero in float mode.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Mandelstam,
    Lorentzian,
    /// Massless and momentum conserving: every row sums to zero.
    Mmc,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Mandelstam => "mandelstam",
            Kind::Lorentzian => "lorentzian",
            Kind::Mmc => "mmc",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("a Lorentzian label needs all-plus signs, got {0}")]
    NotAllPlus(String),
    #[error("stated dimension {stated} differs from the formula value {derived}")]
    DimensionMismatch { stated: i64, derived: i64 },
}

/// A nonempty stratum: signed matroid, rank, region kind and dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumLabel {
    signed: SignedMatroid,
    r: usize,
    kind: Kind,
    d: i64,
}

impl StratumLabel {
    pub fn new(signed: SignedMatroid, r: usize, kind: Kind) -> Result<Self, LabelError> {
        let d = match kind {
            Kind::Mmc => dim_mmc(&signed, r)?,
            Kind::Lorentzian if !signed.is_all_plus() => {
                return Err(LabelError::NotAllPlus(signed.sigma().to_string()));
            }
            _ => dim_massless(signed.matroid(), r)?,
        };
        Ok(StratumLabel { signed, r, kind, d })
    }

    /// Massless label whose kind follows from the signs: Lorentzian when
    /// all signs are `+`, Mandelstam otherwise.
    pub fn massless(signed: SignedMatroid, r: usize) -> Result<Self, LabelError> {
        let kind = if signed.is_all_plus() { Kind::Lorentzian } else { Kind::Mandelstam };
        StratumLabel::new(signed, r, kind)
    }

    pub fn mmc(signed: SignedMatroid, r: usize) -> Result<Self, LabelError> {
        StratumLabel::new(signed, r, Kind::Mmc)
    }

    pub fn signed(&self) -> &SignedMatroid {
        &self.signed
    }

    pub fn matroid(&self) -> &RankTwoMatroid {
        self.signed.matroid()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub(crate) fn write_fields<M: SerializeMap>(&self, map: &mut M) -> Result<(), M::Error> {
        self.signed.write_fields(map)?;
        map.serialize_entry("r", &self.r)?;
        map.serialize_entry("kind", &self.kind)?;
        map.serialize_entry("d", &self.d)
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} r={} {} d={}", self.signed, self.r, self.kind, self.d)
    }
}

impl Serialize for StratumLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(6))?;
        self.write_fields(&mut map)?;
        map.end()
    }
}

#[derive(Deserialize)]
struct LabelJson {
    #[serde(flatten)]
    signed: SignedMatroidJson,
    r: usize,
    kind: Option<Kind>,
    d: Option<i64>,
}

impl<'de> Deserialize<'de> for StratumLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = LabelJson::deserialize(deserializer)?;
        let signed = raw.signed.build().map_err(D::Error::custom)?;
        let label = match raw.kind {
            Some(kind) => StratumLabel::new(signed, raw.r, kind),
            None => StratumLabel::massless(signed, raw.r),
        }
        .map_err(D::Error::custom)?;
        if let Some(stated) = raw.d {
            if stated != label.d {
                return Err(D::Error::custom(LabelError::DimensionMismatch { stated, derived: label.d }));
            }
        }
        Ok(label)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("diagonal entry {} is nonzero", index + 1)]
    NonzeroDiagonal { index: usize },
    #[error("zero pattern is not transitive: s_{}{} = s_{}{} = 0 but s_{}{} != 0", pivot + 1, a + 1, pivot + 1, b + 1, a + 1, b + 1)]
    IntransitiveZeros { pivot: usize, a: usize, b: usize },
    #[error("entry signs admit no consistent colouring around {}", one_based(cycle))]
    InconsistentSigns { cycle: Vec<usize> },
    #[error("rank {r} is not allowed with {m} parts")]
    RankOutOfRange { r: usize, m: usize },
    #[error("matrix is not Mandelstam")]
    NotMandelstam(Violation),
    #[error("row sums vanish but the signed matroid is not {r}-momentum conserving")]
    Inadmissible { r: usize },
}

fn one_based(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

impl ClassifyError {
    pub fn code(&self) -> &'static str {
        match self {
            ClassifyError::Matrix(e) => e.code(),
            ClassifyError::NonzeroDiagonal { .. } => "nonzero_diagonal",
            ClassifyError::IntransitiveZeros { .. } => "intransitive_zero_pattern",
            ClassifyError::InconsistentSigns { .. } => "inconsistent_sign_colouring",
            ClassifyError::RankOutOfRange { .. } => "rank_out_of_range",
            ClassifyError::NotMandelstam(_) => "not_mandelstam",
            ClassifyError::Inadmissible { .. } => "not_momentum_conserving",
        }
    }

    /// Machine-readable evidence, indices one-based.
    pub fn witness(&self) -> Value {
        match self {
            ClassifyError::Matrix(e) => json!({ "detail": e.to_string() }),
            ClassifyError::NonzeroDiagonal { index } => json!({ "index": index + 1 }),
            ClassifyError::IntransitiveZeros { pivot, a, b } => {
                json!({ "zero": [[pivot + 1, a + 1], [pivot + 1, b + 1]], "nonzero": [a + 1, b + 1] })
            }
            ClassifyError::InconsistentSigns { cycle } => {
                json!({ "cycle": cycle.iter().map(|i| i + 1).collect::<Vec<_>>() })
            }
            ClassifyError::RankOutOfRange { r, m } => json!({ "rank": r, "parts": m }),
            ClassifyError::NotMandelstam(v) => violation_json(v),
            ClassifyError::Inadmissible { r } => json!({ "rank": r }),
        }
    }
}

pub fn violation_json(v: &Violation) -> Value {
    match v {
        Violation::NegativeDiagonal { index, value } => {
            json!({ "negative_diagonal": index + 1, "value": value.to_string() })
        }
        Violation::Minor(w) => json!({
            "subset": w.subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "minor": w.value.to_string(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: StratumLabel,
    /// Smallest `|s_ij|` treated as nonzero.
    pub margin: f64,
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(7))?;
        self.label.write_fields(&mut map)?;
        map.serialize_entry("margin", &self.margin)?;
        map.end()
    }
}

struct Pattern {
    n: usize,
    zero: Vec<bool>,
    sign: Vec<Option<Sign>>,
}

impl Pattern {
    fn read(s: &SymmetricMatrix) -> (Pattern, f64) {
        let n = s.n();
        let thresh = ZERO_TOL * s.max_abs();
        let mut zero = vec![true; n * n];
        let mut sign = vec![None; n * n];
        let mut margin = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let v = s.get(i, j);
                let sg = match &v {
                    Scalar::Exact(_) => match v.signum() {
                        1 => Some(Sign::Plus),
                        -1 => Some(Sign::Minus),
                        _ => None,
                    },
                    Scalar::Float(x) if x.abs() <= thresh => None,
                    Scalar::Float(x) => Sign::from_f64(*x),
                };
                if sg.is_some() {
                    zero[i * n + j] = false;
                    margin = margin.min(v.to_f64().abs());
                }
                sign[i * n + j] = sg;
            }
        }
        (Pattern { n, zero, sign }, margin)
    }

    fn is_zero(&self, i: usize, j: usize) -> bool {
        self.zero[i * self.n + j]
    }

    fn sign(&self, i: usize, j: usize) -> Option<Sign> {
        self.sign[i * self.n + j]
    }
}

/// Parts from the zero relation on the non-loops.
fn zero_classes(p: &Pattern, non_loops: &[usize]) -> Result<Vec<Vec<usize>>, ClassifyError> {
    for &i in non_loops {
        for &a in non_loops {
            if a == i || !p.is_zero(i, a) {
                continue;
            }
            for &b in non_loops {
                if b != i && b != a && p.is_zero(i, b) && !p.is_zero(a, b) {
                    let (a, b) = (a.min(b), a.max(b));
                    return Err(ClassifyError::IntransitiveZeros { pivot: i, a, b });
                }
            }
        }
    }
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &i in non_loops {
        match parts.iter_mut().find(|part| p.is_zero(part[0], i)) {
            Some(part) => part.push(i),
            None => parts.push(vec![i]),
        }
    }
    Ok(parts)
}

/// Colours the non-loops so that `sign(s_ij) = sigma_i sigma_j` on every
/// nonzero entry.
fn colour(p: &Pattern, non_loops: &[usize]) -> Result<Vec<Option<Sign>>, ClassifyError> {
    let mut sigma: Vec<Option<Sign>> = vec![None; p.n];
    let mut conflict = false;
    for &root in non_loops {
        if sigma[root].is_some() {
            continue;
        }
        sigma[root] = Some(Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in non_loops {
                let Some(e) = p.sign(u, v) else { continue };
                let want = sigma[u].unwrap() * e;
                match sigma[v] {
                    None => {
                        sigma[v] = Some(want);
                        queue.push_back(v);
                    }
                    Some(c) if c != want => conflict = true,
                    _ => {}
                }
            }
        }
    }
    if conflict {
        return Err(ClassifyError::InconsistentSigns { cycle: negative_cycle(p, non_loops) });
    }
    Ok(sigma)
}

/// A triangle or 4-cycle of nonzero entries with negative sign product.
fn negative_cycle(p: &Pattern, nl: &[usize]) -> Vec<usize> {
    let prod = |cycle: &[usize]| -> Option<Sign> {
        let mut acc = Sign::Plus;
        for t in 0..cycle.len() {
            acc = acc * p.sign(cycle[t], cycle[(t + 1) % cycle.len()])?;
        }
        Some(acc)
    };
    for (x, &i) in nl.iter().enumerate() {
        for (y, &j) in nl.iter().enumerate().skip(x + 1) {
            for &k in &nl[y + 1..] {
                if prod(&[i, j, k]) == Some(Sign::Minus) {
                    return vec![i, j, k];
                }
            }
        }
    }
    for &i in nl {
        for &j in nl {
            for &k in nl {
                for &l in nl {
                    let c = [i, j, k, l];
                    let distinct = (0..4).all(|a| (a + 1..4).all(|b| c[a] != c[b]));
                    if distinct && i < j && i < k && i < l && prod(&c) == Some(Sign::Minus) {
                        return c.to_vec();
                    }
                }
            }
        }
    }
    Vec::new()
}

fn rows_sum_to_zero(s: &SymmetricMatrix) -> bool {
    let tol = ZERO_TOL * s.max_abs() * s.n() as f64;
    s.row_sums().iter().all(|x| match x {
        Scalar::Exact(_) => x.is_zero(),
        Scalar::Float(v) => v.abs() <= tol,
    })
}

/// Classifies a massless Mandelstam matrix into its stratum.
pub fn classify_massless(s: &SymmetricMatrix) -> Result<Classification, ClassifyError> {
    if s.is_zero() {
        return Err(MatrixError::ZeroMatrix.into());
    }
    let n = s.n();
    let diag_tol = minor_tolerance(s, 1);
    for i in 0..n {
        let v = s.get(i, i);
        let nonzero = match s.mode() {
            Mode::Exact => !v.is_zero(),
            Mode::Float => v.to_f64().abs() > diag_tol,
        };
        if nonzero {
            return Err(ClassifyError::NonzeroDiagonal { index: i });
        }
    }
    let (pattern, margin) = Pattern::read(s);
    let non_loops: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| !pattern.is_zero(i, j))).collect();
    let parts = zero_classes(&pattern, &non_loops)?;
    let sigma = colour(&pattern, &non_loops)?;
    let m = parts.len();
    let r = rank(s);
    let matroid = RankTwoMatroid::new(n, parts).map_err(|_| ClassifyError::RankOutOfRange { r, m })?;
    if !nonempty_massless(&matroid, r) {
        return Err(ClassifyError::RankOutOfRange { r, m });
    }
    if let MandelstamVerdict::NotMandelstam(v) = is_mandelstam(s)? {
        return Err(ClassifyError::NotMandelstam(v));
    }
    let signed = SignedMatroid::new(matroid, SignVector::new(sigma)).expect("support is the non-loop set");
    let label = if rows_sum_to_zero(s) {
        if !mmc_admissible(&signed, r).unwrap_or(false) {
            return Err(ClassifyError::Inadmissible { r });
        }
        StratumLabel::mmc(signed, r)
    } else {
        StratumLabel::massless(signed, r)
    }
    .expect("nonempty stratum has a label");
    Ok(Classification { label, margin })
}

/// Every off-diagonal block `s[P_mu, P_nu]` has vanishing 2x2 minors.
pub fn check_rank_one_blocks(s: &SymmetricMatrix, p: &RankTwoMatroid) -> bool {
    let parts = p.parts();
    let tol = ZERO_TOL * s.max_abs() * s.max_abs();
    let vanishes = |i: usize, j: usize, k: usize, l: usize| -> bool {
        match (s.exact_entry(i, k), s.exact_entry(j, l), s.exact_entry(i, l), s.exact_entry(j, k)) {
            (Some(a), Some(b), Some(c), Some(d)) => a * b == c * d,
            _ => (s.get_f64(i, k) * s.get_f64(j, l) - s.get_f64(i, l) * s.get_f64(j, k)).abs() <= tol,
        }
    };
    for (mu, pm) in parts.iter().enumerate() {
        for pn in &parts[mu + 1..] {
            for (x, &i) in pm.iter().enumerate() {
                for &j in &pm[x + 1..] {
                    for (y, &k) in pn.iter().enumerate() {
                        for &l in &pn[y + 1..] {
                            if !vanishes(i, j, k, l) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

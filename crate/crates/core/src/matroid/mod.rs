//! Rank-two matroids as partitions with loops, and their signed versions.
//!
//! Elements are zero-based internally. JSON uses one-based labels, e.g.
//! `{"n":5,"parts":[[1,2],[3],[4,5]],"signs":{"1":"+","2":"-",...}}`.

mod combinat;
mod enumerate;

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::Sign;

pub use combinat::{binomial, factorial, pow2, stirling2};
pub use enumerate::{enumerate_matroids, enumerate_signed, sign_vectors, MAX_ENUM_N};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("n = {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("ground sets differ: {a} vs {b}")]
    GroundSetMismatch { a: usize, b: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("sign vector support does not match the non-loops")]
    SupportMismatch,
}

/// A partition `P_1 ⊔ ... ⊔ P_m` of a subset of `0..n` with `m >= 2`.
/// Elements outside every part are loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankTwoMatroid {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl RankTwoMatroid {
    /// Validates and canonicalizes: each part sorted, parts sorted by minimum.
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self, MatroidError> {
        if parts.len() < 2 {
            return Err(MatroidError::InvalidPartition(format!("need at least 2 parts, got {}", parts.len())));
        }
        let mut seen = vec![false; n];
        let mut parts = parts;
        for part in &mut parts {
            if part.is_empty() {
                return Err(MatroidError::InvalidPartition("empty part".into()));
            }
            part.sort_unstable();
            for &e in part.iter() {
                if e >= n {
                    return Err(MatroidError::InvalidPartition(format!("element {} outside 1..{n}", e + 1)));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(MatroidError::InvalidPartition(format!("element {} in two parts", e + 1)));
                }
            }
        }
        parts.sort_unstable_by_key(|p| p[0]);
        Ok(RankTwoMatroid { n, parts })
    }

    /// Trusted constructor for already canonical data.
    pub(crate) fn from_canonical(n: usize, parts: Vec<Vec<usize>>) -> Self {
        debug_assert!(parts.len() >= 2 && parts.windows(2).all(|w| w[0][0] < w[1][0]));
        RankTwoMatroid { n, parts }
    }

    /// The uniform matroid `U_n`: every element its own part.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 2, "U_n needs n >= 2");
        RankTwoMatroid { n, parts: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn m(&self) -> usize {
        self.parts.len()
    }

    pub fn l(&self) -> usize {
        self.n - self.parts.iter().map(Vec::len).sum::<usize>()
    }

    /// Part index of each element, `None` for loops.
    pub fn part_index(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (k, part) in self.parts.iter().enumerate() {
            for &e in part {
                out[e] = Some(k);
            }
        }
        out
    }

    pub fn loops(&self) -> Vec<usize> {
        let idx = self.part_index();
        (0..self.n).filter(|&i| idx[i].is_none()).collect()
    }

    pub fn non_loops(&self) -> Vec<usize> {
        let idx = self.part_index();
        (0..self.n).filter(|&i| idx[i].is_some()).collect()
    }

    pub fn is_loop(&self, i: usize) -> bool {
        !self.parts.iter().any(|p| p.contains(&i))
    }

    /// Minimum element of each part.
    pub fn representatives(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p[0]).collect()
    }
}

impl fmt::Display for RankTwoMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for part in &self.parts {
            write!(f, "{{")?;
            let labels: Vec<String> = part.iter().map(|e| (e + 1).to_string()).collect();
            let sep = if self.n >= 10 { "," } else { "" };
            write!(f, "{}", labels.join(sep))?;
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// The simple matroid underlying `p`: the part representatives (minimum
/// elements, in part order) together with `U_m` on them.
pub fn underlying_simple(p: &RankTwoMatroid) -> (Vec<usize>, RankTwoMatroid) {
    (p.representatives(), RankTwoMatroid::uniform(p.m()))
}

/// Signs on a support set, identified with their global negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    signs: Vec<Option<Sign>>,
}

impl SignVector {
    pub fn new(signs: Vec<Option<Sign>>) -> Self {
        SignVector { signs }
    }

    pub fn full(signs: &[Sign]) -> Self {
        SignVector { signs: signs.iter().copied().map(Some).collect() }
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn get(&self, i: usize) -> Option<Sign> {
        self.signs[i]
    }

    pub fn as_slice(&self) -> &[Option<Sign>] {
        &self.signs
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i].is_some()).collect()
    }

    pub fn negated(&self) -> Self {
        SignVector { signs: self.signs.iter().map(|s| s.map(|x| -x)).collect() }
    }

    /// The representative with `+` at the smallest support element.
    pub fn canonical(&self) -> Self {
        match self.signs.iter().flatten().next() {
            Some(Sign::Minus) => self.negated(),
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        !matches!(self.signs.iter().flatten().next(), Some(Sign::Minus))
    }

    /// Signs as `±1.0`, with `0.0` off the support.
    pub fn to_f64(&self) -> Vec<f64> {
        self.signs.iter().map(|s| s.map_or(0.0, Sign::as_f64)).collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.map_or('0', Sign::as_char))?;
        }
        Ok(())
    }
}

/// A rank-two matroid with a canonical sign vector on its non-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedMatroid {
    matroid: RankTwoMatroid,
    sigma: SignVector,
}

impl SignedMatroid {
    pub fn new(matroid: RankTwoMatroid, sigma: SignVector) -> Result<Self, MatroidError> {
        if sigma.n() != matroid.n() {
            return Err(MatroidError::GroundSetMismatch { a: matroid.n(), b: sigma.n() });
        }
        let idx = matroid.part_index();
        if (0..matroid.n()).any(|i| idx[i].is_some() != sigma.get(i).is_some()) {
            return Err(MatroidError::SupportMismatch);
        }
        Ok(SignedMatroid { matroid, sigma: sigma.canonical() })
    }

    /// Restricts a full-length sign vector to the non-loops.
    pub fn with_signs(matroid: RankTwoMatroid, signs: &[Sign]) -> Result<Self, MatroidError> {
        if signs.len() != matroid.n() {
            return Err(MatroidError::GroundSetMismatch { a: matroid.n(), b: signs.len() });
        }
        let idx = matroid.part_index();
        let sigma = SignVector::new((0..matroid.n()).map(|i| idx[i].map(|_| signs[i])).collect());
        SignedMatroid::new(matroid, sigma)
    }

    /// All-plus signs on the non-loops.
    pub fn positive(matroid: RankTwoMatroid) -> Self {
        let signs = vec![Sign::Plus; matroid.n()];
        SignedMatroid::with_signs(matroid, &signs).expect("lengths agree")
    }

    pub(crate) fn from_canonical(matroid: RankTwoMatroid, sigma: SignVector) -> Self {
        debug_assert!(sigma.is_canonical());
        SignedMatroid { matroid, sigma }
    }

    pub fn matroid(&self) -> &RankTwoMatroid {
        &self.matroid
    }

    pub fn sigma(&self) -> &SignVector {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.matroid.n()
    }

    pub fn m(&self) -> usize {
        self.matroid.m()
    }

    pub fn l(&self) -> usize {
        self.matroid.l()
    }

    pub fn is_all_plus(&self) -> bool {
        self.sigma.as_slice().iter().flatten().all(|&s| s == Sign::Plus)
    }

    /// Multiplies the signs entrywise by `j` and re-canonicalizes.
    pub fn conjugated(&self, j: &[Sign]) -> Self {
        let sigma = SignVector::new(
            self.sigma.as_slice().iter().zip(j).map(|(s, &t)| s.map(|x| x * t)).collect(),
        );
        SignedMatroid { matroid: self.matroid.clone(), sigma: sigma.canonical() }
    }
}

impl fmt::Display for SignedMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.matroid, self.sigma)
    }
}

/// `a <= b`: loops of `b` are loops of `a`, `b` refines `a` on the
/// non-loops of `a`, and the signs agree there up to global negation.
pub fn signed_leq(a: &SignedMatroid, b: &SignedMatroid) -> Result<bool, MatroidError> {
    if a.n() != b.n() {
        return Err(MatroidError::GroundSetMismatch { a: a.n(), b: b.n() });
    }
    let pa = a.matroid.part_index();
    let pb = b.matroid.part_index();
    let n = a.n();
    if (0..n).any(|i| pb[i].is_none() && pa[i].is_some()) {
        return Ok(false);
    }
    let nl: Vec<usize> = (0..n).filter(|&i| pa[i].is_some()).collect();
    for (x, &i) in nl.iter().enumerate() {
        for &j in &nl[x + 1..] {
            if pb[i] == pb[j] && pa[i] != pa[j] {
                return Ok(false);
            }
        }
    }
    let agree = nl.iter().all(|&i| a.sigma.get(i) == b.sigma.get(i));
    let opposite = nl.iter().all(|&i| a.sigma.get(i) == b.sigma.get(i).map(|s| -s));
    Ok(agree || opposite)
}

#[derive(Serialize, Deserialize)]
struct MatroidJson {
    n: usize,
    parts: Vec<Vec<usize>>,
}

fn parts_to_one_based(p: &RankTwoMatroid) -> Vec<Vec<usize>> {
    p.parts.iter().map(|part| part.iter().map(|e| e + 1).collect()).collect()
}

fn parts_from_one_based(parts: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>, MatroidError> {
    parts
        .into_iter()
        .map(|part| {
            part.into_iter()
                .map(|e| e.checked_sub(1).ok_or_else(|| MatroidError::InvalidPartition("labels start at 1".into())))
                .collect()
        })
        .collect()
}

impl Serialize for RankTwoMatroid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatroidJson { n: self.n, parts: parts_to_one_based(self) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RankTwoMatroid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatroidJson::deserialize(deserializer)?;
        let parts = parts_from_one_based(raw.parts).map_err(D::Error::custom)?;
        RankTwoMatroid::new(raw.n, parts).map_err(D::Error::custom)
    }
}

/// Signs keyed by one-based label, written in numeric order.
struct SignMap<'a>(&'a SignVector);

impl Serialize for SignMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let support = self.0.support();
        let mut map = serializer.serialize_map(Some(support.len()))?;
        for i in support {
            map.serialize_entry(&(i + 1).to_string(), &self.0.get(i).unwrap())?;
        }
        map.end()
    }
}

impl SignedMatroid {
    /// Writes the JSON fields into an existing object (used by labels).
    pub(crate) fn write_fields<M: SerializeMap>(&self, map: &mut M) -> Result<(), M::Error> {
        map.serialize_entry("n", &self.n())?;
        map.serialize_entry("parts", &parts_to_one_based(&self.matroid))?;
        map.serialize_entry("signs", &SignMap(&self.sigma))
    }
}

impl Serialize for SignedMatroid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        self.write_fields(&mut map)?;
        map.end()
    }
}

#[derive(Deserialize)]
pub(crate) struct SignedMatroidJson {
    n: usize,
    parts: Vec<Vec<usize>>,
    #[serde(default)]
    signs: BTreeMap<String, Sign>,
}

impl SignedMatroidJson {
    pub(crate) fn build(self) -> Result<SignedMatroid, MatroidError> {
        let matroid = RankTwoMatroid::new(self.n, parts_from_one_based(self.parts)?)?;
        let mut signs = vec![None; self.n];
        for (k, s) in self.signs {
            let i: usize = k
                .parse()
                .ok()
                .filter(|&i| (1..=self.n).contains(&i))
                .ok_or_else(|| MatroidError::InvalidPartition(format!("bad sign label {k:?}")))?;
            signs[i - 1] = Some(s);
        }
        SignedMatroid::new(matroid, SignVector::new(signs))
    }
}

impl<'de> Deserialize<'de> for SignedMatroid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        SignedMatroidJson::deserialize(deserializer)?.build().map_err(D::Error::custom)
    }
}

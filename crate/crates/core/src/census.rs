//! Nonemptiness, dimensions and stratum counts.
//!
//! Closed forms live next to a brute-force census that enumerates
//! canonical signed matroids; the two are required to agree.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::matroid::{
    binomial, enumerate_matroids, factorial, pow2, sign_vectors, stirling2, MatroidError, RankTwoMatroid, SignedMatroid,
};
use crate::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("stratum of {matroid} at rank {r} is empty")]
    EmptyStratum { matroid: String, r: usize },
    #[error("{label} is not {r}-momentum conserving")]
    Inadmissible { label: String, r: usize },
    #[error("n must be at least 2, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Massless Mandelstam region; the fixed-σ column is its Lorentzian part.
    #[serde(rename = "massless")]
    MasslessMandelstam,
    Lorentzian,
    #[serde(rename = "mmc")]
    Mmc,
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "massless" | "mandelstam" => Ok(Region::MasslessMandelstam),
            "lorentzian" => Ok(Region::Lorentzian),
            "mmc" => Ok(Region::Mmc),
            other => Err(format!("unknown region {other:?} (expected massless, lorentzian or mmc)")),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::MasslessMandelstam => "massless",
            Region::Lorentzian => "lorentzian",
            Region::Mmc => "mmc",
        })
    }
}

fn choose2(r: usize) -> i64 {
    (r * r.saturating_sub(1) / 2) as i64
}

pub fn nonempty_massless(p: &RankTwoMatroid, r: usize) -> bool {
    let m = p.m();
    (3 <= r && r <= m) || (r == 2 && m == 2)
}

pub fn dim_massless(p: &RankTwoMatroid, r: usize) -> Result<i64, CensusError> {
    if !nonempty_massless(p, r) {
        return Err(CensusError::EmptyStratum { matroid: p.to_string(), r });
    }
    let (n, m, l) = (p.n() as i64, p.m() as i64, p.l() as i64);
    Ok(m * (r as i64 - 2) + n - l - choose2(r))
}

/// Range of part counts `m` contributing to dimension `d`, together with
/// the loop count each one forces. Loop counts outside `0..=n-m` drop out.
fn shapes(n: usize, r: usize, upper: i64, loops: impl Fn(i64) -> i64) -> Vec<(usize, usize)> {
    let top = if r == 2 { 2 } else { upper };
    (r as i64..=top)
        .filter_map(|m| {
            let l = loops(m);
            (l >= 0 && l <= n as i64 - m).then_some((m as usize, l as usize))
        })
        .collect()
}

fn massless_shapes(n: usize, r: usize, d: i64) -> Vec<(usize, usize)> {
    if r < 2 {
        return Vec::new();
    }
    let upper = (d + choose2(r)).div_euclid(r as i64 - 1);
    shapes(n, r, upper, |m| m * (r as i64 - 2) + n as i64 - choose2(r) - d)
}

/// Number of nonempty massless strata of dimension `d` at rank `r`, for one
/// fixed sign vector or summed over all of them.
pub fn count_massless(n: usize, r: usize, d: i64, all_sigma: bool) -> BigUint {
    massless_shapes(n, r, d)
        .into_iter()
        .map(|(m, l)| {
            let base = binomial(n, l) * stirling2(n - l, m);
            if all_sigma {
                base * pow2(n - l - 1)
            } else {
                base
            }
        })
        .sum()
}

/// Rank-two strata of dimension `d`: `(2^d - 1) C(n, d+1)` Lorentzian,
/// `(4^d - 2^d) C(n, d+1)` Mandelstam.
pub fn count_rank2(n: usize, d: usize, region: Region) -> BigUint {
    if d == 0 || d >= n {
        return BigUint::zero();
    }
    let c = binomial(n, d + 1);
    match region {
        Region::Lorentzian => (pow2(d) - 1u32) * c,
        Region::MasslessMandelstam => (pow2(2 * d) - pow2(d)) * c,
        Region::Mmc => count_mmc(n, 2, d as i64),
    }
}

/// The quadruple certifying condition 1 of the momentum-conservation
/// criterion: `i, j` share one sign, `k, l` the other, and the restriction
/// to `{i,j,k,l}` is `U_4` or pairs `i` with `k` and `j` with `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub uniform: bool,
}

pub fn mmc_quadruple(sm: &SignedMatroid) -> Option<Quadruple> {
    let part = sm.matroid().part_index();
    let sigma = sm.sigma();
    let plus: Vec<usize> = (0..sm.n()).filter(|&i| sigma.get(i) == Some(Sign::Plus)).collect();
    let minus: Vec<usize> = (0..sm.n()).filter(|&i| sigma.get(i) == Some(Sign::Minus)).collect();
    let mut paired = None;
    for (a, &i) in plus.iter().enumerate() {
        for &j in &plus[a + 1..] {
            if part[i] == part[j] {
                continue;
            }
            for (b, &k) in minus.iter().enumerate() {
                for &l in &minus[b + 1..] {
                    if part[k] == part[l] {
                        continue;
                    }
                    let ps = [part[i], part[j], part[k], part[l]];
                    let distinct = (0..4).all(|x| (x + 1..4).all(|y| ps[x] != ps[y]));
                    if distinct {
                        return Some(Quadruple { i, j, k, l, uniform: true });
                    }
                    if paired.is_none() {
                        if part[i] == part[k] && part[j] == part[l] {
                            paired = Some(Quadruple { i, j, k, l, uniform: false });
                        } else if part[i] == part[l] && part[j] == part[k] {
                            paired = Some(Quadruple { i, j, k: l, l: k, uniform: false });
                        }
                    }
                }
            }
        }
    }
    paired
}

/// Whether the MMC stratum of `sm` at rank `r` is nonempty.
pub fn mmc_admissible(sm: &SignedMatroid, r: usize) -> Result<bool, CensusError> {
    let p = sm.matroid();
    if !nonempty_massless(p, r) {
        return Err(CensusError::EmptyStratum { matroid: p.to_string(), r });
    }
    if r < p.m() {
        return Ok(mmc_quadruple(sm).is_some());
    }
    let sigma = sm.sigma();
    Ok(p.parts().iter().all(|part| {
        let first = sigma.get(part[0]);
        part.iter().any(|&e| sigma.get(e) != first)
    }))
}

pub fn dim_mmc(sm: &SignedMatroid, r: usize) -> Result<i64, CensusError> {
    if !mmc_admissible(sm, r)? {
        return Err(CensusError::Inadmissible { label: sm.to_string(), r });
    }
    Ok(mmc_dim_formula(sm.n(), sm.m(), sm.l(), r))
}

fn mmc_dim_formula(n: usize, m: usize, l: usize, r: usize) -> i64 {
    let (n, m, l, r) = (n as i64, m as i64, l as i64, r as i64);
    (m - 1) * (r - 1) - choose2(r as usize) + (n - l - m) - 1
}

/// Loopless `r`-momentum-conserving signed matroids on `k` elements with
/// `m` parts.
pub fn mmc_loopless_count(k: usize, m: usize, r: usize) -> BigUint {
    if m < 2 || r > m {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    if r == m {
        // Every part carries both signs: split the p positives and k-p
        // negatives into m blocks each and match them up.
        let mf = factorial(m);
        for p in m..=k.saturating_sub(m) {
            total += binomial(k, p) * stirling2(p, m) * stirling2(k - p, m) * &mf;
        }
    } else {
        for p in 2..=k.saturating_sub(2) {
            let c = binomial(k, p);
            for a in 2..=m {
                for b in 2..=m {
                    if a + b < m {
                        continue;
                    }
                    let arrangements =
                        factorial(a) * factorial(b) / (factorial(m - a) * factorial(m - b) * factorial(a + b - m));
                    total += &c * stirling2(p, a) * stirling2(k - p, b) * arrangements;
                }
            }
        }
    }
    total / 2u32
}

fn mmc_shapes(n: usize, r: usize, d: i64) -> Vec<(usize, usize)> {
    if r < 2 {
        return Vec::new();
    }
    let upper = (d + r as i64 + choose2(r)).div_euclid(r as i64 - 1);
    shapes(n, r, upper, |m| {
        (m - 1) * (r as i64 - 1) - choose2(r) + (n as i64 - d - m) - 1
    })
}

/// Number of MMC strata of dimension `d` at rank `r`, over all sign vectors.
pub fn count_mmc(n: usize, r: usize, d: i64) -> BigUint {
    mmc_shapes(n, r, d)
        .into_iter()
        .map(|(m, l)| binomial(n, l) * mmc_loopless_count(n - l, m, r))
        .sum()
}

/// Full-dimensional MMC strata: `2^(n-1) - n - 1`.
pub fn mmc_top_count(n: usize) -> BigUint {
    if n < 4 {
        return BigUint::zero();
    }
    pow2(n - 1) - BigUint::from(n + 1)
}

/// `(m-1)!/2` circular arrangements of `m` labeled points up to reflection.
pub fn components_r3(m: usize) -> BigUint {
    if m < 3 {
        return BigUint::from(1u32);
    }
    factorial(m - 1) / 2u32
}

/// Dimension range that can carry strata, `1..=top`.
pub fn max_dimension(n: usize, region: Region) -> i64 {
    let n = n as i64;
    match region {
        Region::Mmc => n * (n - 1) / 2 - n,
        _ => n * (n - 1) / 2,
    }
}

/// The fixed sign vector used for fixed-σ MMC counts: minus on the first
/// two elements, plus elsewhere.
pub fn mmc_reference_signs(n: usize) -> Vec<Sign> {
    (0..n).map(|i| if i < 2 { Sign::Minus } else { Sign::Plus }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    All,
    Only(i64),
}

impl Selector {
    fn admits(&self, x: i64) -> bool {
        match self {
            Selector::All => true,
            Selector::Only(v) => *v == x,
        }
    }
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Selector::All);
        }
        s.parse().map(Selector::Only).map_err(|_| format!("expected an integer or \"all\", got {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusQuery {
    pub n: usize,
    pub region: Region,
    pub r: Selector,
    pub d: Selector,
}

impl CensusQuery {
    pub fn full(n: usize, region: Region) -> Self {
        CensusQuery { n, region, r: Selector::All, d: Selector::All }
    }
}

fn big_as_number<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub n: usize,
    pub r: usize,
    pub d: i64,
    #[serde(rename = "fixed", serialize_with = "big_as_number")]
    pub count_fixed_sigma: BigUint,
    #[serde(rename = "all", serialize_with = "big_as_number")]
    pub count_all_sigma: BigUint,
}

fn closed_form_cell(n: usize, region: Region, r: usize, d: i64) -> (BigUint, Option<BigUint>) {
    match region {
        Region::MasslessMandelstam => (count_massless(n, r, d, false), Some(count_massless(n, r, d, true))),
        Region::Lorentzian => {
            let c = count_massless(n, r, d, false);
            (c.clone(), Some(c))
        }
        Region::Mmc => (BigUint::zero(), Some(count_mmc(n, r, d))),
    }
}

/// Assembles the census table. Cells with no strata are omitted. Fixed-σ
/// MMC counts come from enumeration, so MMC tables need `n <= 10`.
pub fn build_table(q: &CensusQuery) -> Result<Vec<CensusRow>, CensusError> {
    if q.n < 2 {
        return Err(CensusError::TooSmall(q.n));
    }
    let n = q.n;
    let fixed_mmc = if q.region == Region::Mmc { Some(brute_force(n, Region::Mmc)?) } else { None };
    let mut rows = Vec::new();
    for d in 1..=max_dimension(n, q.region) {
        if !q.d.admits(d) {
            continue;
        }
        for r in 2..=n {
            if !q.r.admits(r as i64) {
                continue;
            }
            let (mut fixed, all) = closed_form_cell(n, q.region, r, d);
            let all = all.unwrap();
            if let Some(bf) = &fixed_mmc {
                fixed = bf.get(&(r, d)).map(|c| BigUint::from(c.fixed)).unwrap_or_default();
            }
            if all.is_zero() {
                continue;
            }
            rows.push(CensusRow { n, r, d, count_fixed_sigma: fixed, count_all_sigma: all });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BruteCell {
    pub fixed: u64,
    pub all: u64,
}

/// Classifies one signed matroid for `region`: the `(r, d)` cells it
/// lands in and whether it uses the reference sign vector.
fn cells_of(sm: &SignedMatroid, region: Region, reference: &[Sign]) -> Vec<(usize, i64, bool)> {
    let p = sm.matroid();
    let mut out = Vec::new();
    let fixed = match region {
        Region::Mmc => SignedMatroid::with_signs(p.clone(), reference).unwrap() == *sm,
        _ => sm.is_all_plus(),
    };
    for r in 2..=p.m() {
        if !nonempty_massless(p, r) {
            continue;
        }
        match region {
            Region::Mmc => {
                if mmc_admissible(sm, r).unwrap() {
                    out.push((r, mmc_dim_formula(sm.n(), sm.m(), sm.l(), r), fixed));
                }
            }
            Region::MasslessMandelstam | Region::Lorentzian => {
                if region == Region::Lorentzian && !fixed {
                    continue;
                }
                out.push((r, dim_massless(p, r).unwrap(), fixed));
            }
        }
    }
    out
}

/// Counts strata by `(r, d)` by enumerating every canonical signed
/// matroid on `n` elements.
pub fn brute_force(n: usize, region: Region) -> Result<BTreeMap<(usize, i64), BruteCell>, CensusError> {
    if n < 2 {
        return Err(CensusError::TooSmall(n));
    }
    let reference = mmc_reference_signs(n);
    let matroids: Vec<RankTwoMatroid> = enumerate_matroids(n, 2)?.collect();
    let partials: Vec<BTreeMap<(usize, i64), BruteCell>> = matroids
        .par_iter()
        .map(|p| {
            let mut acc: BTreeMap<(usize, i64), BruteCell> = BTreeMap::new();
            for sigma in sign_vectors(p) {
                let sm = SignedMatroid::new(p.clone(), sigma).unwrap();
                for (r, d, fixed) in cells_of(&sm, region, &reference) {
                    let cell = acc.entry((r, d)).or_default();
                    cell.all += 1;
                    cell.fixed += fixed as u64;
                }
            }
            acc
        })
        .collect();
    let mut total = BTreeMap::new();
    for part in partials {
        for (k, v) in part {
            let cell: &mut BruteCell = total.entry(k).or_default();
            cell.all += v.all;
            cell.fixed += v.fixed;
        }
    }
    Ok(total)
}

/// Compares every cell of `build_table` with the enumeration census.
/// Returns the mismatching `(r, d)` cells.
pub fn check_against_brute_force(q: &CensusQuery) -> Result<Vec<(usize, i64)>, CensusError> {
    let table = build_table(q)?;
    let brute = brute_force(q.n, q.region)?;
    let mut bad = Vec::new();
    for row in &table {
        let cell = brute.get(&(row.r, row.d)).copied().unwrap_or_default();
        let fixed_ok = row.count_fixed_sigma == BigUint::from(cell.fixed);
        if !fixed_ok || row.count_all_sigma != BigUint::from(cell.all) {
            bad.push((row.r, row.d));
        }
    }
    for (&(r, d), cell) in &brute {
        let listed = table.iter().any(|row| row.r == r && row.d == d);
        if cell.all > 0 && !listed && q.r.admits(r as i64) && q.d.admits(d) {
            bad.push((r, d));
        }
    }
    Ok(bad)
}

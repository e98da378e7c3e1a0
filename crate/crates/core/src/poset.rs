//! Hasse diagrams of strata at a fixed rank.
//!
//! Every cover of the full signed poset is an elementary move: a loop
//! joins an existing part with either sign, or a part splits in two. Covers
//! of the subposet on a vertex set `V` are the minimal elements of `V`
//! reachable from a vertex through paths whose interior avoids `V`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::census::{mmc_admissible, nonempty_massless, CensusError, Region};
use crate::classify::{LabelError, StratumLabel};
use crate::matroid::{enumerate_signed, signed_leq, MatroidError, RankTwoMatroid, SignVector, SignedMatroid};
use crate::Sign;

pub const MAX_POSET_N: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosetError {
    #[error("posets are exported for n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("label is not a vertex of this poset")]
    NotAVertex,
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poset {
    pub n: usize,
    pub r: usize,
    pub region: Region,
    pub vertices: Vec<StratumLabel>,
    /// Cover relations `(lower, upper)` as vertex indices, sorted.
    pub edges: Vec<(usize, usize)>,
}

fn is_vertex(sm: &SignedMatroid, r: usize, region: Region) -> bool {
    if !nonempty_massless(sm.matroid(), r) {
        return false;
    }
    match region {
        Region::MasslessMandelstam => true,
        Region::Lorentzian => sm.is_all_plus(),
        Region::Mmc => mmc_admissible(sm, r).unwrap_or(false),
    }
}

/// Signed matroids covering `sm` in the full signed poset.
pub fn elementary_moves(sm: &SignedMatroid) -> Vec<SignedMatroid> {
    let p = sm.matroid();
    let n = sm.n();
    let mut out = Vec::new();
    for e in p.loops() {
        for (mu, _) in p.parts().iter().enumerate() {
            for s in [Sign::Plus, Sign::Minus] {
                let mut parts = p.parts().to_vec();
                parts[mu].push(e);
                let mut signs = sm.sigma().as_slice().to_vec();
                signs[e] = Some(s);
                let m = RankTwoMatroid::new(n, parts).expect("valid partition");
                out.push(SignedMatroid::new(m, SignVector::new(signs)).expect("support matches"));
            }
        }
    }
    for (mu, part) in p.parts().iter().enumerate() {
        let k = part.len();
        // The first element stays in the first block.
        for mask in 1u32..(1 << (k - 1)) {
            let (mut a, mut b) = (vec![part[0]], Vec::new());
            for (t, &x) in part[1..].iter().enumerate() {
                if mask >> t & 1 == 1 {
                    b.push(x);
                } else {
                    a.push(x);
                }
            }
            let mut parts: Vec<Vec<usize>> = p.parts().iter().enumerate().filter(|&(nu, _)| nu != mu).map(|(_, q)| q.clone()).collect();
            parts.push(a);
            parts.push(b);
            let m = RankTwoMatroid::new(n, parts).expect("valid partition");
            out.push(SignedMatroid::new(m, sm.sigma().clone()).expect("support matches"));
        }
    }
    out
}

fn label(sm: SignedMatroid, r: usize, region: Region) -> Result<StratumLabel, LabelError> {
    match region {
        Region::Mmc => StratumLabel::mmc(sm, r),
        _ => StratumLabel::massless(sm, r),
    }
}

pub fn export_poset(n: usize, r: usize, region: Region) -> Result<Poset, PosetError> {
    if n > MAX_POSET_N {
        return Err(PosetError::TooLarge { n, limit: MAX_POSET_N });
    }
    let members: Vec<SignedMatroid> = enumerate_signed(n, 2)?.filter(|sm| is_vertex(sm, r, region)).collect();
    let index: HashMap<&SignedMatroid, usize> = members.iter().enumerate().map(|(i, sm)| (sm, i)).collect();
    let mut edges = Vec::new();
    for (i, a) in members.iter().enumerate() {
        let mut seen: HashSet<SignedMatroid> = HashSet::new();
        let mut queue: VecDeque<SignedMatroid> = VecDeque::from([a.clone()]);
        let mut candidates: BTreeSet<usize> = BTreeSet::new();
        while let Some(x) = queue.pop_front() {
            for y in elementary_moves(&x) {
                if !seen.insert(y.clone()) {
                    continue;
                }
                match index.get(&y) {
                    Some(&j) => {
                        candidates.insert(j);
                    }
                    None => queue.push_back(y),
                }
            }
        }
        for &j in &candidates {
            let covered = candidates.iter().any(|&k| k != j && signed_leq(&members[k], &members[j]).unwrap_or(false));
            if !covered {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    let vertices = members.into_iter().map(|sm| label(sm, r, region)).collect::<Result<_, _>>()?;
    Ok(Poset { n, r, region, vertices, edges })
}

impl Poset {
    /// The order ideal of elements below `top`, with its covers.
    pub fn ideal_below(&self, top: &SignedMatroid) -> Result<Poset, PosetError> {
        let t = self.vertices.iter().position(|v| v.signed() == top).ok_or(PosetError::NotAVertex)?;
        let keep: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| i == t || signed_leq(self.vertices[i].signed(), top).unwrap_or(false))
            .collect();
        let renumber: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(a, b)| Some((*renumber.get(a)?, *renumber.get(b)?)))
            .collect();
        Ok(Poset {
            n: self.n,
            r: self.r,
            region: self.region,
            vertices: keep.iter().map(|&i| self.vertices[i].clone()).collect(),
            edges,
        })
    }

    /// Number of vertices per stratum dimension.
    pub fn dimension_profile(&self) -> Vec<(i64, usize)> {
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for v in &self.vertices {
            *counts.entry(v.d()).or_default() += 1;
        }
        let mut out: Vec<(i64, usize)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }
}

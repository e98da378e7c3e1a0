use crate::util::combinations;
use crate::Sign;

use super::{MatroidError, RankTwoMatroid, SignVector, SignedMatroid};

pub const MAX_ENUM_N: usize = 10;

/// Set partitions of `elems` (sorted) with at least `min_parts` blocks,
/// via restricted growth strings. Blocks come out ordered by minimum.
fn set_partitions(elems: &[usize], min_parts: usize, out: &mut Vec<Vec<Vec<usize>>>) {
    let k = elems.len();
    if k == 0 {
        return;
    }
    let mut rgs = vec![0usize; k];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        if blocks >= min_parts {
            let mut parts = vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                parts[b].push(elems[i]);
            }
            out.push(parts);
        }
        // Next restricted growth string.
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            let prefix_max = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in &mut rgs[i + 1..] {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every rank-two matroid on `0..n` with at least `max(min_parts, 2)`
/// parts, ordered by loop count and then by parts.
pub fn enumerate_matroids(
    n: usize,
    min_parts: usize,
) -> Result<impl Iterator<Item = RankTwoMatroid>, MatroidError> {
    if n > MAX_ENUM_N {
        return Err(MatroidError::TooLarge { n, limit: MAX_ENUM_N });
    }
    let min_parts = min_parts.max(2);
    Ok((0..=n).flat_map(move |l| {
        let mut batch = Vec::new();
        for loops in combinations(n, l) {
            let rest: Vec<usize> = (0..n).filter(|i| !loops.contains(i)).collect();
            let mut parts = Vec::new();
            set_partitions(&rest, min_parts, &mut parts);
            batch.extend(parts.into_iter().map(|p| RankTwoMatroid::from_canonical(n, p)));
        }
        batch.sort_unstable_by(|a, b| a.parts.cmp(&b.parts));
        batch
    }))
}

/// The `2^(n-l-1)` canonical sign vectors on the non-loops of `p`, in
/// lexicographic order with `+` before `-`.
pub fn sign_vectors(p: &RankTwoMatroid) -> impl Iterator<Item = SignVector> {
    let nl = p.non_loops();
    let n = p.n();
    let free = nl.len() - 1;
    (0u64..1 << free).map(move |bits| {
        let mut signs = vec![None; n];
        signs[nl[0]] = Some(Sign::Plus);
        for (t, &e) in nl[1..].iter().enumerate() {
            let minus = bits >> (free - 1 - t) & 1 == 1;
            signs[e] = Some(if minus { Sign::Minus } else { Sign::Plus });
        }
        SignVector::new(signs)
    })
}

/// Every signed matroid on `0..n` with at least `max(min_parts, 2)` parts.
pub fn enumerate_signed(
    n: usize,
    min_parts: usize,
) -> Result<impl Iterator<Item = SignedMatroid>, MatroidError> {
    Ok(enumerate_matroids(n, min_parts)?.flat_map(|p| {
        let signs: Vec<SignVector> = sign_vectors(&p).collect();
        signs.into_iter().map(move |s| SignedMatroid::from_canonical(p.clone(), s))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{binomial, pow2, stirling2};
    use num_bigint::BigUint;
    use std::collections::{BTreeMap, HashSet};

    #[test]
    fn n3_has_seven_matroids() {
        let all: Vec<String> = enumerate_matroids(3, 2).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(all, vec!["{1}{2}{3}", "{1}{23}", "{12}{3}", "{13}{2}", "{1}{2}", "{1}{3}", "{2}{3}"]);
    }

    #[test]
    fn counts_per_shape_match_stirling() {
        for n in 2..=7 {
            let mut by_shape: BTreeMap<(usize, usize), u64> = BTreeMap::new();
            let mut signed: BTreeMap<(usize, usize), u64> = BTreeMap::new();
            for sm in enumerate_signed(n, 2).unwrap() {
                *signed.entry((sm.l(), sm.m())).or_default() += 1;
            }
            for p in enumerate_matroids(n, 2).unwrap() {
                *by_shape.entry((p.l(), p.m())).or_default() += 1;
            }
            for l in 0..=n {
                for m in 2..=n - l {
                    let want = binomial(n, l) * stirling2(n - l, m);
                    let got = BigUint::from(by_shape.get(&(l, m)).copied().unwrap_or(0));
                    assert_eq!(got, want, "n={n} l={l} m={m}");
                    let got_signed = BigUint::from(signed.get(&(l, m)).copied().unwrap_or(0));
                    assert_eq!(got_signed, want * pow2(n - l - 1));
                }
            }
        }
    }

    #[test]
    fn enumeration_is_duplicate_free_and_ordered() {
        let all: Vec<SignedMatroid> = enumerate_signed(5, 2).unwrap().collect();
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for w in all.windows(2) {
            let ka = (w[0].l(), w[0].matroid().parts().to_vec());
            let kb = (w[1].l(), w[1].matroid().parts().to_vec());
            assert!(ka <= kb);
            assert!(w[0].sigma().is_canonical());
        }
    }

    #[test]
    fn min_parts_filters() {
        assert_eq!(enumerate_matroids(4, 4).unwrap().count(), 1);
        assert!(enumerate_matroids(11, 2).is_err());
        let u2: Vec<String> = enumerate_signed(2, 2).unwrap().map(|s| s.sigma().to_string()).collect();
        assert_eq!(u2, vec!["++", "+-"]);
        let two_blocks = enumerate_signed(4, 2).unwrap().filter(|s| s.l() == 0 && s.m() == 2).count();
        assert_eq!(two_blocks, 56);
    }
}

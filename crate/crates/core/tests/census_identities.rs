use std::collections::BTreeMap;

use kinstrata::census::{
    brute_force, build_table, count_massless, count_mmc, max_dimension, mmc_admissible, nonempty_massless,
    CensusQuery, Region,
};
use kinstrata::matroid::{enumerate_matroids, enumerate_signed, pow2, stirling2};
use num_bigint::BigUint;
use num_traits::Zero;

#[test]
fn row_sums_count_nonempty_labels() {
    for n in 2..=6 {
        let mut per_rank: BTreeMap<usize, u64> = BTreeMap::new();
        for sm in enumerate_signed(n, 2).unwrap() {
            for r in 2..=n {
                if nonempty_massless(sm.matroid(), r) {
                    *per_rank.entry(r).or_default() += 1;
                }
            }
        }
        for (&r, &want) in &per_rank {
            let total: BigUint = (1..=max_dimension(n, Region::MasslessMandelstam))
                .map(|d| count_massless(n, r, d, true))
                .sum();
            assert_eq!(total, BigUint::from(want), "n={n} r={r}");
        }
    }
}

#[test]
fn every_signed_matroid_is_counted_once_per_rank() {
    // Rank 2 admits exactly the matroids with two parts.
    for n in 2..=7 {
        let two_parts = enumerate_matroids(n, 2).unwrap().filter(|p| p.m() == 2).count();
        let by_stirling: BigUint =
            (0..=n - 2).map(|l| kinstrata::matroid::binomial(n, l) * stirling2(n - l, 2)).sum();
        assert_eq!(BigUint::from(two_parts), by_stirling);
    }
}

#[test]
fn top_rank_multiplies_by_sign_choices() {
    // At r = n only the loopless uniform matroid survives, with 2^(n-1) signs.
    for n in 3..=8 {
        let top = max_dimension(n, Region::MasslessMandelstam);
        let fixed = count_massless(n, n, top, false);
        assert_eq!(fixed, BigUint::from(1u32));
        assert_eq!(count_massless(n, n, top, true), fixed * pow2(n - 1));
    }
}

#[test]
fn closed_forms_equal_enumeration() {
    for n in 2..=6 {
        for region in [Region::MasslessMandelstam, Region::Lorentzian, Region::Mmc] {
            let table = build_table(&CensusQuery::full(n, region)).unwrap();
            let brute = brute_force(n, region).unwrap();
            let listed: BTreeMap<(usize, i64), (BigUint, BigUint)> = table
                .into_iter()
                .map(|row| ((row.r, row.d), (row.count_fixed_sigma, row.count_all_sigma)))
                .collect();
            let enumerated: BTreeMap<(usize, i64), (BigUint, BigUint)> = brute
                .into_iter()
                .filter(|(_, c)| c.all > 0)
                .map(|(k, c)| (k, (c.fixed.into(), c.all.into())))
                .collect();
            assert_eq!(listed, enumerated, "n={n} {region}");
        }
    }
}

#[test]
fn mmc_counts_vanish_outside_admissible_ranks() {
    for n in 4..=6 {
        let admissible_top = enumerate_signed(n, 2)
            .unwrap()
            .filter(|sm| sm.m() == n && mmc_admissible(sm, n).unwrap_or(false))
            .count();
        // r = n needs every part to hold both signs, impossible for singletons.
        assert_eq!(admissible_top, 0);
        for d in 1..=max_dimension(n, Region::Mmc) {
            assert!(count_mmc(n, n, d).is_zero());
        }
    }
}

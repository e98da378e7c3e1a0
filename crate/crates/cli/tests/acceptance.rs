//! Acceptance suite. Every test prints one `[criterion N] PASS|FAIL` line;
//! run with `--nocapture` to see them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use kinstrata::census::{
    brute_force, build_table, check_against_brute_force, mmc_admissible, mmc_top_count, nonempty_massless,
    CensusQuery, Region,
};
use kinstrata::classify::classify_massless;
use kinstrata::exactmat::{eigen_signature, minor_sign_test, principal_minor, rank, Scalar, SymmetricMatrix};
use kinstrata::matroid::{enumerate_signed, sign_vectors, RankTwoMatroid, SignVector, SignedMatroid};
use kinstrata::poset::elementary_moves;
use kinstrata::realize::{
    canonical_cycle, cyclic_order, estimate_dimension, gram, perturb_to_refinement, sample_mmc, sample_stratum,
};
use kinstrata::regioncheck::{
    arrangement_census, igusa_quartic, mmc4_classify, mmc4_cubic, mmc4_matrix, mmc5_matrix, rational_boundary_point,
    Mmc4Point, Mmc4Region, Mmc5Point,
};
use kinstrata::Sign;
use num_rational::BigRational;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn report(n: u32, ok: bool, detail: &str, elapsed: Duration, limit: Duration) {
    let within = elapsed <= limit;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "[criterion {n}] {verdict} {detail} ({:.2} s, limit {} s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n}: {detail}");
    assert!(within, "criterion {n}: took {elapsed:?}, limit {limit:?}");
}

fn kinstrata(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kinstrata")).args(args).output().expect("binary runs")
}

/// `(d, r, fixed, all)` cells transcribed from the printed census tables.
const MASSLESS_4: &[(i64, usize, u64, u64)] =
    &[(1, 2, 6, 12), (2, 2, 12, 48), (3, 2, 7, 56), (3, 3, 4, 16), (4, 3, 6, 48), (5, 3, 1, 8), (6, 4, 1, 8)];
const MASSLESS_5: &[(i64, usize, u64, u64)] = &[
    (1, 2, 10, 20),
    (2, 2, 30, 120),
    (3, 2, 35, 280),
    (3, 3, 10, 40),
    (4, 2, 15, 240),
    (4, 3, 30, 240),
    (5, 3, 30, 440),
    (6, 3, 10, 160),
    (6, 4, 5, 40),
    (7, 3, 1, 16),
    (7, 4, 10, 160),
    (9, 4, 1, 16),
    (10, 5, 1, 16),
];
const MMC_4: &[(i64, usize, u64, u64)] = &[(1, 2, 2, 6), (2, 3, 1, 3)];
const MMC_5: &[(i64, usize, u64, u64)] =
    &[(1, 2, 6, 30), (2, 2, 6, 60), (2, 3, 3, 15), (3, 3, 9, 90), (4, 3, 1, 10), (5, 4, 1, 10)];

fn expected_csv(cells: &[(i64, usize, u64, u64)]) -> String {
    let mut out = String::from("d,r,fixed,all\n");
    for (d, r, fixed, all) in cells {
        out.push_str(&format!("{d},{r},{fixed},{all}\n"));
    }
    out
}

#[test]
fn criterion_01_table_reproduction() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (n, region, cells) in
        [("4", "massless", MASSLESS_4), ("5", "massless", MASSLESS_5), ("4", "mmc", MMC_4), ("5", "mmc", MMC_5)]
    {
        let out = kinstrata(&["census", "--n", n, "--region", region, "--format", "csv"]);
        let text = String::from_utf8(out.stdout).unwrap();
        if !out.status.success() || text != expected_csv(cells) {
            bad.push(format!("n={n} {region}"));
        }
    }
    let cell = kinstrata(&["count", "--n", "5", "--r", "3", "--d", "5", "--format", "csv"]);
    let cell_ok = String::from_utf8(cell.stdout).unwrap() == "d,r,fixed,all\n5,3,30,440\n";
    let ok = bad.is_empty() && cell_ok;
    report(1, ok, &format!("4 tables byte-identical, mismatches {bad:?}"), start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_02_brute_force_cross_check() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=6 {
        for region in [Region::MasslessMandelstam, Region::Lorentzian, Region::Mmc] {
            let cells = check_against_brute_force(&CensusQuery::full(n, region)).unwrap();
            if !cells.is_empty() {
                bad.push((n, region.to_string(), cells));
            }
            // Every enumerated cell must also appear in the closed-form table.
            let table = build_table(&CensusQuery::full(n, region)).unwrap();
            let listed: BTreeSet<(usize, i64)> = table.iter().map(|row| (row.r, row.d)).collect();
            for (key, cell) in brute_force(n, region).unwrap() {
                if cell.all > 0 && !listed.contains(&key) {
                    bad.push((n, region.to_string(), vec![key]));
                }
            }
        }
    }
    report(2, bad.is_empty(), &format!("n = 2..6, 3 regions, mismatches {bad:?}"), start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_03_top_mmc_count() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 4..=10 {
        let u = RankTwoMatroid::uniform(n);
        let brute = sign_vectors(&u)
            .filter(|s| mmc_admissible(&SignedMatroid::new(u.clone(), s.clone()).unwrap(), n - 1).unwrap())
            .count() as u64;
        let closed = (1u64 << (n - 1)) - n as u64 - 1;
        if brute != closed || mmc_top_count(n) != closed.into() {
            bad.push((n, brute, closed));
        }
    }
    report(3, bad.is_empty(), &format!("n = 4..10, mismatches {bad:?}"), start.elapsed(), Duration::from_secs(5));
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

/// Gram matrix of `n` random vectors in signature `(p, q)`, each vector
/// pushed into the closed cone `v0^2 >= |v_space|^2` when `causal`.
fn signature_gram(rng: &mut impl Rng, n: usize, p: usize, q: usize, causal: bool, massless: bool) -> Vec<Vec<f64>> {
    let dim = p + q;
    let vecs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
            if causal {
                let space: f64 = v[p..].iter().map(|x| x * x).sum::<f64>().sqrt();
                let extra = if massless { 0.0 } else { rng.random_range(0.0..1.0) };
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                v[0] = sign * (space + extra);
                for x in &mut v[1..p] {
                    *x = 0.0;
                }
            }
            v
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        (0..dim).map(|k| if k < p { a[k] * b[k] } else { -a[k] * b[k] }).sum()
    };
    (0..n).map(|i| (0..n).map(|j| dot(&vecs[i], &vecs[j])).collect()).collect()
}

fn lemma_verdicts(s: &SymmetricMatrix) -> (bool, bool) {
    let minors = minor_sign_test(s).unwrap();
    let sig = eigen_signature(s, 1e-8).unwrap();
    let diag_ok = (0..s.n()).all(|i| s.get_f64(i, i) >= -1e-9 * s.max_abs());
    let eigen = (sig.n_pos == 1 || sig.rank == 0) && diag_ok;
    (minors, eigen)
}

#[test]
fn criterion_04_lemma_equivalence() {
    let start = Instant::now();
    let families = ["causal gram", "massless gram", "two time directions", "symmetric gaussian"];
    let mut disagreements = Vec::new();
    let mut per_family = BTreeMap::new();
    for (f, family) in families.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + f as u64);
        let mut seen = 0;
        for n in 3..=7 {
            for _ in 0..250 {
                let rows = match f {
                    0 => {
                        let r = rng.random_range(1..=n);
                        signature_gram(&mut rng, n, 1, r - 1, true, false)
                    }
                    1 => {
                        let r = rng.random_range(2..=n);
                        signature_gram(&mut rng, n, 1, r - 1, true, true)
                    }
                    2 => {
                        let q = rng.random_range(1..=n.saturating_sub(2).max(1));
                        signature_gram(&mut rng, n, 2, q, false, false)
                    }
                    _ => {
                        let mut m = vec![vec![0.0; n]; n];
                        for i in 0..n {
                            for j in i..n {
                                let x = gaussian(&mut rng);
                                m[i][j] = x;
                                m[j][i] = x;
                            }
                            m[i][i] = m[i][i].abs();
                        }
                        m
                    }
                };
                let s = SymmetricMatrix::from_rows(&rows).unwrap();
                let (minors, eigen) = lemma_verdicts(&s);
                if minors != eigen {
                    disagreements.push((family.to_string(), rows));
                }
                seen += 1;
            }
        }
        per_family.insert(*family, seen);
    }

    // Exact subsample: integer vectors in mixed signatures.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact_bad = 0;
    for _ in 0..100 {
        let n = rng.random_range(3..=6);
        let p = rng.random_range(1..=2);
        let q = rng.random_range(0..=2);
        let vecs: Vec<Vec<i64>> = (0..n).map(|_| (0..p + q).map(|_| rng.random_range(-3..=3)).collect()).collect();
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v: i64 = (0..p + q).map(|k| if k < p { 1 } else { -1 } * vecs[i][k] * vecs[j][k]).sum();
                        BigRational::from_integer(v.into())
                    })
                    .collect()
            })
            .collect();
        let exact = SymmetricMatrix::from_exact_rows(&rows).unwrap();
        if minor_sign_test(&exact).unwrap() != minor_sign_test(&exact.to_float()).unwrap() {
            exact_bad += 1;
        }
    }
    let ok = disagreements.is_empty() && exact_bad == 0;
    let detail = format!(
        "{} families x {} matrices, {} float disagreements, {exact_bad} exact/float disagreements of 100",
        families.len(),
        per_family.values().next().unwrap(),
        disagreements.len()
    );
    if let Some((family, rows)) = disagreements.first() {
        println!("first disagreement ({family}): {rows:?}");
    }
    report(4, ok, &detail, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_05_dimension_formulas() {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for n in 2..=6 {
        for sm in enumerate_signed(n, 2).unwrap() {
            for r in 2..=4 {
                if !nonempty_massless(sm.matroid(), r) {
                    continue;
                }
                jobs.push((sm.clone(), r, false));
                if mmc_admissible(&sm, r).unwrap_or(false) {
                    jobs.push((sm.clone(), r, true));
                }
            }
        }
    }
    let failures: Vec<String> = jobs
        .par_iter()
        .flat_map_iter(|(sm, r, mmc)| {
            (0..3u64).filter_map(move |seed| match estimate_dimension(sm, *r, *mmc, seed) {
                Ok(e) if e.agrees() => None,
                Ok(e) => Some(format!("{sm} r={r} mmc={mmc} seed={seed}: {} vs {}", e.estimated, e.formula)),
                Err(err) => Some(format!("{sm} r={r} mmc={mmc} seed={seed}: {err}")),
            })
        })
        .collect();
    for f in &failures {
        println!("  {f}");
    }
    let detail = format!("{} labels x 3 seeds, {} mismatches {:?}", jobs.len(), failures.len(), failures.first());
    report(5, failures.is_empty(), &detail, start.elapsed(), Duration::from_secs(120));
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn signed(n: usize, parts: &[&[usize]], signs: &str) -> SignedMatroid {
    let parts = parts.iter().map(|p| p.iter().map(|e| e - 1).collect()).collect();
    let m = RankTwoMatroid::new(n, parts).unwrap();
    let mut v = vec![None; n];
    for (i, c) in signs.chars().enumerate() {
        v[i] = Sign::from_char(c);
    }
    SignedMatroid::new(m, SignVector::new(v)).unwrap()
}

#[test]
fn criterion_06_four_particle_example() {
    let start = Instant::now();
    let mut mismatches = 0;
    let mut strata: BTreeSet<(String, usize)> = BTreeSet::new();
    let mut points = 0;
    for x in -3..=3 {
        for y in -3..=3 {
            let p = Mmc4Point::new(q(x), q(y));
            points += 1;
            let member = minor_sign_test(&mmc4_matrix(&p)).unwrap();
            let cubic = mmc4_cubic(&p);
            let want = BigRational::from_integer((-2 * x * y * (x + y)).into());
            if member != (want >= q(0)) || cubic != want {
                mismatches += 1;
            }
            if let Mmc4Region::Stratum(label) = mmc4_classify(&p) {
                if rank(&mmc4_matrix(&p)) != label.r() {
                    mismatches += 1;
                }
                strata.insert((label.signed().to_string(), label.r()));
            }
        }
    }
    let cones: BTreeSet<(String, usize)> = [
        ((-1, -1), "+-+-"),
        ((-1, 2), "+--+"),
        ((2, -1), "++--"),
    ]
    .iter()
    .map(|((x, y), s)| {
        let label = match mmc4_classify(&Mmc4Point::new(q(*x), q(*y))) {
            Mmc4Region::Stratum(l) => l,
            other => panic!("({x},{y}) gave {other:?}"),
        };
        assert_eq!(*label.signed(), signed(4, &[&[1], &[2], &[3], &[4]], s));
        (label.signed().to_string(), 3)
    })
    .collect();
    let rays: Vec<&(String, usize)> = strata.iter().filter(|(_, r)| *r == 2).collect();
    let ray_matroids: BTreeMap<String, usize> = rays.iter().fold(BTreeMap::new(), |mut acc, (s, _)| {
        *acc.entry(s.split(' ').next().unwrap().to_string()).or_default() += 1;
        acc
    });
    let want_rays: BTreeMap<String, usize> =
        ["{12}{34}", "{13}{24}", "{14}{23}"].iter().map(|m| (m.to_string(), 2)).collect();
    let cone_hits = strata.iter().filter(|(_, r)| *r == 3).cloned().collect::<BTreeSet<_>>();
    let ok = points == 49 && mismatches == 0 && strata.len() == 9 && cone_hits == cones && ray_matroids == want_rays;
    let detail = format!("{points} points, {mismatches} mismatches, {} strata ({} cones, {} rays)", strata.len(), cone_hits.len(), rays.len());
    report(6, ok, &detail, start.elapsed(), Duration::from_secs(10));
}

/// The published sign table, with the seventh row's sigma read as
/// `(+,-,+,+,-)`: the printed `(+,-,-,+,+)` repeats row five and is not
/// the product pattern of its own row.
const SIGN_TABLE: [(&str, &str); 10] = [
    ("--+++", "+------+++"),
    ("-+-++", "-+---++--+"),
    ("-++-+", "--+-+-+-+-"),
    ("-+++-", "---+++-+--"),
    ("+--++", "--+++----+"),
    ("+-+-+", "-+-+-+--+-"),
    ("+-++-", "-++---++--"),
    ("++--+", "+--+--++--"),
    ("++-+-", "+-+--+--+-"),
    ("+++--", "++--+----+"),
];

fn parse_signs(s: &str) -> Vec<Sign> {
    s.chars().map(|c| Sign::from_char(c).unwrap()).collect()
}

#[test]
fn criterion_07_five_particle_example() {
    let start = Instant::now();
    let census = arrangement_census();
    let got: BTreeSet<(Vec<Sign>, Vec<Sign>)> = census
        .consistent
        .iter()
        .map(|row| (row.sigma().unwrap(), row.signs.clone()))
        .collect();
    let want: BTreeSet<(Vec<Sign>, Vec<Sign>)> =
        SIGN_TABLE.iter().map(|(s, e)| (parse_signs(s), parse_signs(e))).collect();
    let table_ok = got == want;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut identity_bad = 0;
    for _ in 0..100 {
        let coords: [BigRational; 5] =
            std::array::from_fn(|_| BigRational::new(rng.random_range(-40..=40).into(), rng.random_range(1..=9).into()));
        let p = Mmc5Point::new(coords);
        let minor = principal_minor(&mmc5_matrix(&p), &[0, 1, 2, 3]).unwrap();
        if minor != Scalar::Exact(igusa_quartic(&p)) {
            identity_bad += 1;
        }
    }

    // Interior point of the (-,-,+,+,+) cone, from a momentum-conserving
    // sample at rank 4 read back in exact coordinates.
    let top = signed(5, &[&[1], &[2], &[3], &[4], &[5]], "--+++");
    let interior = (0..20u64)
        .filter_map(|seed| sample_mmc(&top, 4, seed).ok())
        .map(|c| Mmc5Point::from_gram(&gram(&c)).unwrap())
        .find(|p| igusa_quartic(p) < q(0) && minor_sign_test(&mmc5_matrix(p)).unwrap());
    let interior_rank = interior.as_ref().map(|p| rank(&mmc5_matrix(p)));
    let boundary = rational_boundary_point();
    let boundary_ok = igusa_quartic(&boundary) == q(0) && rank(&mmc5_matrix(&boundary)) == 3;

    let ok = census.region_count == 332
        && census.consistent.len() == 10
        && table_ok
        && identity_bad == 0
        && interior_rank == Some(4)
        && boundary_ok;
    let detail = format!(
        "{} regions, {} consistent, table match {table_ok}, identity failures {identity_bad}, interior rank {interior_rank:?}, boundary rank 3 {boundary_ok}",
        census.region_count,
        census.consistent.len()
    );
    report(7, ok, &detail, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_08_cyclic_orders() {
    let start = Instant::now();
    let sm = signed(5, &[&[1], &[2], &[3], &[4], &[5]], "++-+-");
    let u5: HashSet<Vec<usize>> = (0..10_000u64)
        .into_par_iter()
        .map(|seed| cyclic_order(&gram(&sample_stratum(&sm, 3, seed).unwrap())).unwrap())
        .collect();
    let mut counts = Vec::new();
    for m in 3..=6usize {
        let sm = SignedMatroid::positive(RankTwoMatroid::uniform(m));
        let seen: HashSet<Vec<usize>> = (0..4_000u64)
            .into_par_iter()
            .map(|seed| cyclic_order(&gram(&sample_stratum(&sm, 3, 1_000_000 + seed).unwrap())).unwrap())
            .collect();
        assert!(seen.iter().all(|o| canonical_cycle(o) == *o));
        let want = (1..m).product::<usize>() / 2;
        counts.push((m, seen.len(), want));
    }
    let ok = u5.len() == 12 && counts.iter().all(|(_, a, b)| a == b);
    let detail = format!("U5 orders {} of 12, per m (m, seen, (m-1)!/2) {counts:?}", u5.len());
    report(8, ok, &detail, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_09_closure_incidence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = Vec::new();
    let sources: Vec<(SignedMatroid, usize)> = (3..=5)
        .flat_map(|n| enumerate_signed(n, 2).unwrap())
        .flat_map(|sm| {
            let ranks: Vec<usize> = (2..=4).filter(|&r| nonempty_massless(sm.matroid(), r)).collect();
            ranks.into_iter().map(move |r| (sm.clone(), r))
        })
        .collect();
    while pairs.len() < 50 {
        let (src, r0) = sources.choose(&mut rng).unwrap().clone();
        let mut target = src.clone();
        for _ in 0..rng.random_range(1..=3) {
            let moves = elementary_moves(&target);
            if moves.is_empty() {
                break;
            }
            target = moves.choose(&mut rng).unwrap().clone();
        }
        let ranks: Vec<usize> = (r0..=target.m()).filter(|&r| nonempty_massless(target.matroid(), r)).collect();
        let Some(&r1) = ranks.choose(&mut rng) else { continue };
        if target == src && r1 == r0 {
            continue;
        }
        pairs.push((src, r0, target, r1, rng.random::<u64>()));
    }
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|(src, r0, target, r1, seed)| {
            let c = sample_stratum(src, *r0, *seed).unwrap();
            let mut last = f64::INFINITY;
            for eps in [1e-2, 1e-3, 1e-4] {
                let refined = match perturb_to_refinement(&c, target, *r1, eps) {
                    Ok(x) => x,
                    Err(e) => return Some(format!("{src} r={r0} -> {target} r={r1}: {e}")),
                };
                let hit = classify_massless(&refined.gram).map(|c| c.label).ok();
                let in_target = hit.as_ref().is_some_and(|l| l.signed() == target && l.r() == *r1);
                if !in_target || refined.distance > eps || refined.distance >= last {
                    return Some(format!(
                        "{src} r={r0} -> {target} r={r1} eps={eps}: distance {} landed {:?}",
                        refined.distance,
                        hit.map(|l| l.to_string())
                    ));
                }
                last = refined.distance;
            }
            None
        })
        .collect();
    let detail = format!("{} pairs x 3 eps, {} failures {:?}", pairs.len(), failures.len(), failures.first());
    report(9, failures.is_empty(), &detail, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_10_round_trip() {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for n in 2..=6 {
        for sm in enumerate_signed(n, 2).unwrap() {
            for r in 2..=4 {
                if nonempty_massless(sm.matroid(), r) {
                    jobs.push((sm.clone(), r));
                }
            }
        }
    }
    let failures: Vec<String> = jobs
        .par_iter()
        .flat_map_iter(|(sm, r)| {
            (0..5u64).filter_map(move |seed| {
                let c = match sample_stratum(sm, *r, seed) {
                    Ok(c) => c,
                    Err(e) => return Some(format!("{sm} r={r} seed={seed}: {e}")),
                };
                match classify_massless(&gram(&c)) {
                    Ok(got) if got.label.signed() == sm && got.label.r() == *r => None,
                    Ok(got) => Some(format!("{sm} r={r} seed={seed}: got {}", got.label)),
                    Err(e) => Some(format!("{sm} r={r} seed={seed}: {e}")),
                }
            })
        })
        .collect();
    let detail = format!("{} labels x 5 seeds, {} failures {:?}", jobs.len(), failures.len(), failures.first());
    report(10, failures.is_empty(), &detail, start.elapsed(), Duration::from_secs(120));
}

use std::io::Read;
use std::path::Path;

use kinstrata::census::{
    build_table, check_against_brute_force, mmc_admissible, nonempty_massless, CensusQuery, CensusRow, Selector,
};
use kinstrata::classify::{classify_massless, violation_json, Kind, StratumLabel};
use kinstrata::exactmat::{is_mandelstam, parse_rational, rank, MandelstamVerdict, SymmetricMatrix};
use kinstrata::matroid::{enumerate_signed, SignedMatroid};
use kinstrata::poset::export_poset;
use kinstrata::realize::{estimate_dimension, gram, sample_mmc, sample_stratum};
use kinstrata::regioncheck::{
    arrangement_census, igusa_quartic, mmc4_classify, mmc4_cubic, mmc5_classify, mmc5_matrix, rational_boundary_point,
    Mmc4Point, Mmc4Region, Mmc5Point,
};
use kinstrata::Sign;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::render::{census_csv, census_pretty, csv_records, text_table};
use crate::{Cli, Command, Example, Format};

/// Text for standard output, plus a failure to report after printing it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Outcome { text, failure: None }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Check { input } => check(fmt, input.as_deref()),
        Command::Classify { input } => classify(fmt, input.as_deref()),
        Command::Census { n, region, r, d, check_bruteforce } => {
            census(fmt, CensusQuery { n: *n, region: *region, r: r.clone(), d: d.clone() }, *check_bruteforce, false)
        }
        Command::Count { n, region, r, d, check_bruteforce } => {
            let q = CensusQuery { n: *n, region: *region, r: Selector::Only(*r as i64), d: Selector::Only(*d) };
            census(fmt, q, *check_bruteforce, true)
        }
        Command::Sample { label, mmc } => sample(fmt, label.as_deref(), *mmc, cli.seed),
        Command::DimVerify { n, r, mmc, seeds } => dim_verify(fmt, *n, *r, *mmc, *seeds, cli.seed),
        Command::Poset { n, r, region, below } => poset(fmt, *n, *r, *region, below.as_deref()),
        Command::Examples { which } => match which {
            Example::N4 { point, grid } => example_n4(fmt, point.as_deref(), *grid),
            Example::N5 { census, point, boundary } => example_n5(fmt, *census, point.as_deref(), *boundary),
        },
    }
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p).map_err(|e| CliError::io(Some(p), e)),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(None, e))?;
            Ok(s)
        }
    }
}

fn no_csv(verb: &str) -> CliError {
    CliError::usage(format!("{verb} has no tabular output; use --format pretty or json"))
}

fn to_json<T: Serialize>(fmt: Format, value: &T) -> String {
    let text = match fmt {
        Format::Json => serde_json::to_string(value),
        _ => serde_json::to_string_pretty(value),
    };
    text.expect("output serializes") + "\n"
}

fn signs_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

fn check(fmt: Format, input: Option<&Path>) -> Result<Outcome, CliError> {
    let s = SymmetricMatrix::from_json_str(&read_input(input)?)?;
    let verdict = is_mandelstam(&s)?;
    let value = match &verdict {
        MandelstamVerdict::Mandelstam { rank } => json!({ "mandelstam": true, "rank": rank }),
        MandelstamVerdict::NotMandelstam(v) => json!({ "mandelstam": false, "witness": violation_json(v) }),
    };
    Ok(match fmt {
        Format::Csv => return Err(no_csv("check")),
        Format::Json => to_json(fmt, &value),
        Format::Pretty => match &verdict {
            MandelstamVerdict::Mandelstam { rank } => format!("mandelstam (rank {rank})\n"),
            MandelstamVerdict::NotMandelstam(v) => format!("not mandelstam; witness {}\n", violation_json(v)),
        },
    }
    .into())
}

fn classify(fmt: Format, input: Option<&Path>) -> Result<Outcome, CliError> {
    let s = SymmetricMatrix::from_json_str(&read_input(input)?)?;
    let c = classify_massless(&s)?;
    Ok(match fmt {
        Format::Csv => return Err(no_csv("classify")),
        Format::Json => to_json(fmt, &c),
        Format::Pretty => format!("{} (margin {:.3e})\n", c.label, c.margin),
    }
    .into())
}

fn census(fmt: Format, q: CensusQuery, brute: bool, single: bool) -> Result<Outcome, CliError> {
    let mut rows = build_table(&q)?;
    if single && rows.is_empty() {
        if let (Selector::Only(r), Selector::Only(d)) = (&q.r, &q.d) {
            rows.push(CensusRow { n: q.n, r: *r as usize, d: *d, count_fixed_sigma: 0u32.into(), count_all_sigma: 0u32.into() });
        }
    }
    let failure = if brute {
        let bad = check_against_brute_force(&q)?;
        (!bad.is_empty()).then(|| {
            CliError::domain(
                "bruteforce_mismatch",
                format!("{} census cells disagree with enumeration", bad.len()),
                json!({ "cells": bad.iter().map(|(r, d)| json!({ "r": r, "d": d })).collect::<Vec<_>>() }),
            )
        })
    } else {
        None
    };
    let text = match fmt {
        Format::Json => to_json(fmt, &rows),
        Format::Csv => census_csv(&rows)?,
        Format::Pretty if single => {
            let row = &rows[0];
            format!("n = {}, region = {}, r = {}, d = {}: {}/{}\n", q.n, q.region, row.r, row.d, row.count_fixed_sigma, row.count_all_sigma)
        }
        Format::Pretty => census_pretty(q.n, q.region, &rows),
    };
    Ok(Outcome { text, failure })
}

fn sample(fmt: Format, path: Option<&Path>, mmc: bool, seed: u64) -> Result<Outcome, CliError> {
    let label: StratumLabel = serde_json::from_str(&read_input(path)?)?;
    let mmc = mmc || label.kind() == Kind::Mmc;
    let config = if mmc {
        sample_mmc(label.signed(), label.r(), seed)?
    } else {
        sample_stratum(label.signed(), label.r(), seed)?
    };
    let s = gram(&config);
    let found = classify_massless(&s)?;
    let value = json!({ "label": found.label, "config": config, "gram": s.to_json_value() });
    Ok(match fmt {
        Format::Csv => return Err(no_csv("sample")),
        _ => to_json(fmt, &value),
    }
    .into())
}

#[derive(Serialize)]
struct DimRow {
    label: String,
    r: usize,
    formula: i64,
    estimated: Vec<Option<usize>>,
    pass: bool,
}

fn dim_verify(fmt: Format, n: usize, r: usize, mmc: bool, seeds: u64, seed: u64) -> Result<Outcome, CliError> {
    let labels: Vec<SignedMatroid> = enumerate_signed(n, 2)?
        .filter(|sm| nonempty_massless(sm.matroid(), r) && (!mmc || mmc_admissible(sm, r).unwrap_or(false)))
        .collect();
    let rows: Vec<DimRow> = labels
        .par_iter()
        .map(|sm| {
            let estimates: Vec<_> =
                (0..seeds).map(|k| estimate_dimension(sm, r, mmc, seed.wrapping_add(k))).collect();
            let formula = estimates.iter().find_map(|e| e.as_ref().ok().map(|e| e.formula)).unwrap_or(-1);
            let estimated: Vec<Option<usize>> = estimates.iter().map(|e| e.as_ref().ok().map(|e| e.estimated)).collect();
            let pass = estimates.iter().all(|e| matches!(e, Ok(e) if e.agrees()));
            DimRow { label: sm.to_string(), r, formula, estimated, pass }
        })
        .collect();
    let failed: Vec<&str> = rows.iter().filter(|row| !row.pass).map(|row| row.label.as_str()).collect();
    let failure = (!failed.is_empty()).then(|| {
        CliError::domain(
            "dimension_mismatch",
            format!("{} of {} labels disagree with the dimension formula", failed.len(), rows.len()),
            json!({ "labels": failed }),
        )
    });
    let show = |e: &[Option<usize>]| {
        e.iter().map(|x| x.map_or("error".to_string(), |v| v.to_string())).collect::<Vec<_>>().join(" ")
    };
    let text = match fmt {
        Format::Json => to_json(fmt, &rows),
        Format::Csv => csv_records(
            &["label", "r", "formula", "estimated", "pass"],
            rows.iter().map(|row| {
                [row.label.clone(), row.r.to_string(), row.formula.to_string(), show(&row.estimated), row.pass.to_string()]
            }),
        )?,
        Format::Pretty => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let status = if row.pass { "pass" } else { "FAIL" };
                    vec![row.label.clone(), row.formula.to_string(), show(&row.estimated), status.to_string()]
                })
                .collect();
            let mut text = text_table(&["label", "formula", "estimated", "status"], &table);
            text.push_str(&format!("{} labels, {} failed\n", rows.len(), failed.len()));
            text
        }
    };
    Ok(Outcome { text, failure })
}

fn poset(fmt: Format, n: usize, r: usize, region: kinstrata::census::Region, below: Option<&str>) -> Result<Outcome, CliError> {
    let mut poset = export_poset(n, r, region)?;
    if let Some(text) = below {
        let top: SignedMatroid = serde_json::from_str(text)?;
        poset = poset.ideal_below(&top)?;
    }
    let name = |i: usize| format!("{}", poset.vertices[i].signed());
    Ok(match fmt {
        Format::Json => to_json(fmt, &poset),
        Format::Csv => csv_records(
            &["lower", "upper", "lower_label", "upper_label"],
            poset.edges.iter().map(|&(a, b)| [a.to_string(), b.to_string(), name(a), name(b)]),
        )?,
        Format::Pretty => {
            let vertices: Vec<Vec<String>> = (0..poset.vertices.len())
                .map(|i| vec![i.to_string(), name(i), poset.vertices[i].d().to_string()])
                .collect();
            let mut text = text_table(&["#", "label", "d"], &vertices);
            text.push_str(&format!("\n{} covers\n", poset.edges.len()));
            for &(a, b) in &poset.edges {
                text.push_str(&format!("{a} -> {b}\n"));
            }
            text
        }
    }
    .into())
}

fn rationals<const K: usize>(raw: &[String]) -> Result<[BigRational; K], CliError> {
    let parsed: Vec<BigRational> = raw.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
    parsed.try_into().map_err(|_| CliError::usage(format!("expected {K} coordinates")))
}

fn region_text(region: &Mmc4Region) -> String {
    match region {
        Mmc4Region::Stratum(label) => label.to_string(),
        Mmc4Region::Outside => "outside".into(),
        Mmc4Region::Origin => "origin".into(),
    }
}

fn example_n4(fmt: Format, point: Option<&[String]>, grid: bool) -> Result<Outcome, CliError> {
    let points: Vec<Mmc4Point> = match (point, grid) {
        (Some(raw), _) => {
            let [x, y] = rationals::<2>(raw)?;
            vec![Mmc4Point::new(x, y)]
        }
        (None, true) => (-3..=3)
            .flat_map(|x| (-3..=3).map(move |y| (x, y)))
            .map(|(x, y)| Mmc4Point::new(BigRational::from_integer(x.into()), BigRational::from_integer(y.into())))
            .collect(),
        (None, false) => return Err(CliError::usage("examples n4 needs --point X Y or --grid")),
    };
    let results: Vec<(Mmc4Point, String, Mmc4Region)> = points
        .into_iter()
        .map(|p| {
            let cubic = mmc4_cubic(&p).to_string();
            let region = mmc4_classify(&p);
            (p, cubic, region)
        })
        .collect();
    let values: Vec<Value> = results
        .iter()
        .map(|(p, cubic, region)| json!({ "x": p.x.to_string(), "y": p.y.to_string(), "cubic": cubic, "classification": region }))
        .collect();
    Ok(match fmt {
        Format::Json if !grid => to_json(fmt, &values[0]),
        Format::Json => to_json(fmt, &values),
        Format::Csv => csv_records(
            &["x", "y", "cubic", "stratum"],
            results.iter().map(|(p, c, r)| [p.x.to_string(), p.y.to_string(), c.clone(), region_text(r)]),
        )?,
        Format::Pretty => {
            let rows: Vec<Vec<String>> =
                results.iter().map(|(p, c, r)| vec![p.x.to_string(), p.y.to_string(), c.clone(), region_text(r)]).collect();
            text_table(&["x", "y", "-2xy(x+y)", "stratum"], &rows)
        }
    }
    .into())
}

fn example_n5(fmt: Format, census: bool, point: Option<&[String]>, boundary: bool) -> Result<Outcome, CliError> {
    if census {
        let c = arrangement_census();
        let table: Vec<(String, String)> = c
            .consistent
            .iter()
            .map(|row| (signs_string(&row.sigma().expect("consistent")), signs_string(&row.signs)))
            .collect();
        const COLS: [&str; 11] = ["sigma", "s12", "s13", "s14", "s15", "s23", "s24", "s25", "s34", "s35", "s45"];
        let split = |sigma: &str, signs: &str| -> Vec<String> {
            std::iter::once(sigma.to_string()).chain(signs.chars().map(String::from)).collect()
        };
        return Ok(match fmt {
            Format::Json => to_json(
                fmt,
                &json!({
                    "region_count": c.region_count,
                    "consistent_count": c.consistent.len(),
                    "table": c.consistent.iter().zip(&table).map(|(row, (sigma, signs))| {
                        json!({ "sigma": sigma, "signs": signs, "witness": row.witness })
                    }).collect::<Vec<_>>(),
                }),
            ),
            Format::Csv => csv_records(&COLS, table.iter().map(|(a, b)| split(a, b)))?,
            Format::Pretty => {
                let rows: Vec<Vec<String>> = table.iter().map(|(a, b)| split(a, b)).collect();
                format!(
                    "regions: {}\ntriple-consistent: {}\n\n{}",
                    c.region_count,
                    c.consistent.len(),
                    text_table(&COLS, &rows)
                )
            }
        }
        .into());
    }
    let p = match (point, boundary) {
        (Some(raw), _) => Mmc5Point::new(rationals::<5>(raw)?),
        (None, true) => rational_boundary_point(),
        (None, false) => return Err(CliError::usage("examples n5 needs --census, --point A B C D E or --boundary")),
    };
    let quartic = igusa_quartic(&p);
    let s = mmc5_matrix(&p);
    let exact_rank = rank(&s);
    let label = mmc5_classify(&p)?;
    let value = json!({ "point": p, "quartic": quartic.to_string(), "rank": exact_rank, "label": label });
    Ok(match fmt {
        Format::Csv => return Err(no_csv("examples n5 --point")),
        Format::Json => to_json(fmt, &value),
        Format::Pretty => format!(
            "(a, b, c, d, e) = ({}, {}, {}, {}, {})\nquartic: {quartic}\nrank: {exact_rank}\nstratum: {label}\n",
            p.a, p.b, p.c, p.d, p.e
        ),
    }
    .into())
}

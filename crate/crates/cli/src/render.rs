use std::collections::BTreeMap;
use std::fmt::Write as _;

use kinstrata::census::{CensusRow, Region};

use crate::error::CliError;

/// Census rows as in the printed tables: one line per dimension `d`, one
/// column per rank `r`, each cell `fixed/all`.
pub fn census_pretty(n: usize, region: Region, rows: &[CensusRow]) -> String {
    let mut out = format!("n = {n}, region = {region} (fixed/all)\n");
    if rows.is_empty() {
        out.push_str("(no nonempty strata)\n");
        return out;
    }
    let cells: BTreeMap<(i64, usize), String> =
        rows.iter().map(|row| ((row.d, row.r), format!("{}/{}", row.count_fixed_sigma, row.count_all_sigma))).collect();
    let max_d = rows.iter().map(|row| row.d).max().unwrap();
    let ranks: Vec<usize> = (2..=rows.iter().map(|row| row.r).max().unwrap()).collect();
    let width = cells.values().map(String::len).max().unwrap().max(3);
    let dw = max_d.to_string().len().max(5);

    let _ = write!(out, "{:>dw$}", "d \\ r");
    for r in &ranks {
        let _ = write!(out, " | {r:>width$}");
    }
    out.push('\n');
    out.push_str(&"-".repeat(dw));
    for _ in &ranks {
        let _ = write!(out, "-+-{}", "-".repeat(width));
    }
    out.push('\n');
    for d in 1..=max_d {
        let _ = write!(out, "{d:>dw$}");
        for r in &ranks {
            let cell = cells.get(&(d, *r)).map_or("", String::as_str);
            let _ = write!(out, " | {cell:>width$}");
        }
        out.push('\n');
    }
    out
}

/// Long format `d,r,fixed,all`, ordered by `d` and then `r`.
pub fn census_csv(rows: &[CensusRow]) -> Result<String, CliError> {
    let mut sorted: Vec<&CensusRow> = rows.iter().collect();
    sorted.sort_by_key(|row| (row.d, row.r));
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::domain("format", e.to_string(), serde_json::json!({}));
    w.write_record(["d", "r", "fixed", "all"]).map_err(fail)?;
    for row in sorted {
        w.write_record([
            row.d.to_string(),
            row.r.to_string(),
            row.count_fixed_sigma.to_string(),
            row.count_all_sigma.to_string(),
        ])
        .map_err(fail)?;
    }
    csv_string(w)
}

pub fn csv_records<I, R>(header: &[&str], records: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::domain("format", e.to_string(), serde_json::json!({}));
    w.write_record(header).map_err(fail)?;
    for rec in records {
        w.write_record(rec).map_err(fail)?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::io(None, e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// Left-aligned text table with a rule under the header.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().take(cols).map(String::as_str).collect()));
    }
    out
}

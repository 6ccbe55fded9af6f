//! Reading samples from CSV: one observation per row, one column per
//! coordinate, optional header.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use seblocks_core::Sample;

/// Parses a sample from CSV text. The first row is treated as a header when
/// any of its fields fails to parse as a number.
pub fn read_sample_from<R: Read>(reader: R, source: &str) -> Result<Sample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut dim = None;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.with_context(|| format!("{source}: cannot read row {row}"))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if i == 0 && points.is_empty() && parsed.iter().any(Option::is_none) {
            continue;
        }
        let mut point = Vec::with_capacity(parsed.len());
        for (col, (value, raw)) in parsed.iter().zip(record.iter()).enumerate() {
            match value {
                Some(v) if v.is_finite() => point.push(*v),
                Some(_) => bail!(
                    "{source}: row {row}, column {}: value '{raw}' is not finite",
                    col + 1
                ),
                None => bail!(
                    "{source}: row {row}, column {}: '{raw}' is not a number",
                    col + 1
                ),
            }
        }
        match dim {
            None => dim = Some(point.len()),
            Some(d) if d != point.len() => {
                bail!(
                    "{source}: row {row} has {} columns, expected {d}",
                    point.len()
                )
            }
            _ => {}
        }
        points.push(point);
    }
    if points.is_empty() {
        bail!("{source}: no observations");
    }
    Sample::new(points).with_context(|| format!("{source}: invalid sample"))
}

/// Reads a sample from a CSV file.
pub fn read_sample(path: &Path) -> Result<Sample> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_sample_from(file, &path.display().to_string())
}

/// Parses a comma-separated list of block frequencies such as `4,1,0,2`.
pub fn parse_frequencies(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<u64>()
                .with_context(|| format!("frequency '{f}' is not a non-negative integer"))
        })
        .collect()
}

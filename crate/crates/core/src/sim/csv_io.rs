use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::config::Scheme;
use crate::sim::sweep::SweepRecord;

pub const CSV_HEADER: [&str; 8] = [
    "noise_db",
    "scheme",
    "mean_objective",
    "mean_constraint",
    "mean_info_count",
    "mean_harvest_count",
    "infeasible_fraction",
    "trials",
];

/// Extra column in verbose output: bits fed back per trial (one per subcarrier).
pub const FEEDBACK_COLUMN: &str = "feedback_bits";

/// Formats with 12 significant digits, trailing zeros trimmed, no exponent
/// for magnitudes in `[1e-5, 1e15)`.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        let s = format!("{x:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        return format!("{}e{exponent}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes records sorted by `(noise_db, scheme)`.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W, feedback_bits: Option<usize>) -> std::result::Result<(), csv::Error> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.noise_db.total_cmp(&b.noise_db).then_with(|| a.scheme.name().cmp(b.scheme.name())));

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if feedback_bits.is_some() {
        header.push(FEEDBACK_COLUMN);
    }
    w.write_record(&header)?;
    for r in sorted {
        let mut row = vec![
            format_sig12(r.noise_db),
            r.scheme.name().to_string(),
            format_sig12(r.mean_objective),
            format_sig12(r.mean_constraint),
            format_sig12(r.mean_info_count),
            format_sig12(r.mean_harvest_count),
            format_sig12(r.infeasible_fraction),
            r.trials.to_string(),
        ];
        if let Some(bits) = feedback_bits {
            row.push(bits.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], destination: &Path) -> Result<()> {
    emit_csv_with(records, destination, None)
}

/// Like [`emit_csv`], optionally appending the constant feedback column.
pub fn emit_csv_with(records: &[SweepRecord], destination: &Path, feedback_bits: Option<usize>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyResult);
    }
    let file = File::create(destination).map_err(|source| Error::Io { path: destination.to_owned(), source })?;
    write_csv(records, file, feedback_bits).map_err(|source| Error::Csv { path: destination.to_owned(), source })
}

pub fn read_csv<R: Read>(input: R) -> std::result::Result<Vec<SweepRecord>, String> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| e.to_string())?.clone();
    if header.len() < CSV_HEADER.len() || header.iter().zip(CSV_HEADER).any(|(a, b)| a != b) {
        return Err(format!("unexpected header {header:?}"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| e.to_string())?;
        out.push(SweepRecord {
            noise_db: num(&row[0])?,
            scheme: row[1].parse::<Scheme>().map_err(|e| e.to_string())?,
            mean_objective: num(&row[2])?,
            mean_constraint: num(&row[3])?,
            mean_info_count: num(&row[4])?,
            mean_harvest_count: num(&row[5])?,
            infeasible_fraction: num(&row[6])?,
            trials: row[7].parse().map_err(|e| format!("bad trial count `{}`: {e}", &row[7]))?,
        });
    }
    Ok(out)
}

pub fn load_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    read_csv(file).map_err(|msg| Error::Config(format!("{}: {msg}", path.display())))
}

/// Minimal matplotlib script that plots every scheme's mean objective
/// against the noise grid from a sweep CSV.
pub fn plot_script(csv_path: &Path) -> String {
    format!(
        r#"import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(list)
with open({path:?}) as f:
    for row in csv.DictReader(f):
        series[row["scheme"]].append((float(row["noise_db"]), float(row["mean_objective"])))

for scheme, points in sorted(series.items()):
    xs, ys = zip(*sorted(points))
    plt.plot(xs, ys, marker="o", label=scheme)
plt.xlabel("1/sigma_z^2 (dB)")
plt.ylabel("mean objective")
plt.legend()
plt.grid(True)
plt.show()
"#,
        path = csv_path.display().to_string()
    )
}

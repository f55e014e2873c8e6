//! CSV readers and writers. Numbers are written with 15 significant
//! digits so every value survives a write/read cycle to ~1e-15.

use std::fs;
use std::io::Write;
use std::path::Path;

use oscphasor::pmu_pipeline::{PhasorPoint, PhasorSeries, SpectrumLine};
use oscphasor::signal_model::SampledWaveform;

use crate::error::{CliError, CliResult};

/// Shortest decimal rendering with at most 15 significant digits.
pub fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    if (-5..15).contains(&exp) {
        // reparse the rounded value and print it positionally
        let rounded: f64 = format!("{mantissa}e{exp}").parse().expect("valid float");
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{rounded:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{mantissa}e{exp}")
    }
}

pub fn ensure_parent(path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

/// Writes rows of numbers under `header`.
pub fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> CliResult<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| {
                CliError::input(format!(
                    "no column `{name}`; available: {}",
                    self.headers.join(", ")
                ))
            })?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let read = || -> CliResult<Table> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let row = rec
                .iter()
                .enumerate()
                .map(|(c, field)| {
                    field.parse::<f64>().map_err(|_| {
                        CliError::input(format!(
                            "line {line}, column {} ({}): cannot parse {field:?} as a number",
                            c + 1,
                            headers.get(c).map_or("?", String::as_str)
                        ))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::input("no data rows"));
        }
        Ok(Table { headers, rows })
    };
    read().map_err(|e| e.in_file(path))
}

fn expect_header(path: &Path, t: &Table, expected: &[&str]) -> CliResult<()> {
    if t.headers.iter().map(String::as_str).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "header is `{}`, expected `{}`",
            t.headers.join(","),
            expected.join(",")
        ))
        .in_file(path))
    }
}

const WAVEFORM_HEADER: [&str; 2] = ["time", "value"];
const PHASOR_HEADER: [&str; 5] = ["time", "amplitude", "phase", "real", "imag"];

pub fn write_waveform(path: &Path, w: &SampledWaveform) -> CliResult<()> {
    write_rows(
        path,
        &WAVEFORM_HEADER,
        w.samples.iter().enumerate().map(|(k, &v)| vec![w.time(k), v]),
    )
}

pub fn read_waveform(path: &Path) -> CliResult<SampledWaveform> {
    let t = read_table(path)?;
    expect_header(path, &t, &WAVEFORM_HEADER)?;
    let times: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
    let values: Vec<f64> = t.rows.iter().map(|r| r[1]).collect();
    SampledWaveform::from_timestamps(&times, values).map_err(|e| CliError::from(e).in_file(path))
}

pub fn write_phasors(path: &Path, s: &PhasorSeries) -> CliResult<()> {
    write_rows(
        path,
        &PHASOR_HEADER,
        s.points
            .iter()
            .map(|p| vec![p.timestamp, p.amplitude(), p.phase(), p.xr, p.xi]),
    )
}

pub fn read_phasors(path: &Path) -> CliResult<PhasorSeries> {
    let t = read_table(path)?;
    expect_header(path, &t, &PHASOR_HEADER)?;
    let points: Vec<PhasorPoint> = t
        .rows
        .iter()
        .map(|r| PhasorPoint {
            timestamp: r[0],
            xr: r[3],
            xi: r[4],
        })
        .collect();
    let rate = uniform_rate(&points.iter().map(|p| p.timestamp).collect::<Vec<_>>())
        .map_err(|e| e.in_file(path))?;
    Ok(PhasorSeries { rate, points })
}

pub fn write_spectrum(path: &Path, lines: &[SpectrumLine]) -> CliResult<()> {
    write_rows(
        path,
        &["frequency", "magnitude"],
        lines.iter().map(|l| vec![l.frequency, l.magnitude]),
    )
}

/// Sample rate of a uniformly spaced time column.
pub fn uniform_rate(times: &[f64]) -> CliResult<f64> {
    if times.len() < 2 {
        return Err(CliError::input("need at least 2 rows to infer a rate"));
    }
    let n = times.len();
    let step = (times[n - 1] - times[0]) / (n - 1) as f64;
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::input("time column must be increasing"));
    }
    for (k, &t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * step)).abs() > 1e-6 * step + 1e-9 {
            return Err(CliError::input(format!("non-uniform time spacing at row {}", k + 1)));
        }
    }
    Ok(1.0 / step)
}

/// Plain text file with a trailing newline.
pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    ensure_parent(path)?;
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        f.write_all(b"\n")?;
    }
    Ok(())
}

/// A named gnuplot block: title, column names, rows.
pub type Block<'a> = (&'a str, &'a [&'a str], Vec<Vec<f64>>);

/// Gnuplot data file: one block per series, separated by two blank lines
/// so each can be addressed with `index`.
pub fn write_blocks(path: &Path, blocks: &[Block<'_>]) -> CliResult<()> {
    let mut out = String::new();
    for (i, (name, cols, rows)) in blocks.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# index {i}: {name}\n# {}\n", cols.join(" ")));
        for r in rows {
            let line: Vec<String> = r.iter().map(|&v| fmt(v)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    write_text(path, &out)
}

//! End-to-end reference scenarios. Each artifact writes its data files to
//! `<out>/<name>/` and a `summary.txt` with one PASS/FAIL line per check.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use oscphasor::estimator::dft_reconstruction_error;
use oscphasor::gain_analysis::{
    applicability_table, f_gain, f_gain_exact, flip_frequencies, gain_profile,
    timestamp_phase_error, GainModel, StampPosition,
};
use oscphasor::pmu_pipeline::{
    alias_frequency, dominant_peak, fit_tones, phasor_stream, simulate_pmu, spectrum, PmuOutput,
};
use oscphasor::signal_model::{check_representability, synthesize_am, synthesize_general};
use oscphasor::{estimate, presets, wrap_phase, AmplitudeModSignal, EstimatorConfig, PhasorSeries};

use crate::csvio::{self, fmt};
use crate::error::{CliError, CliResult};
use crate::report::RunReport;

pub const ARTIFACTS: [&str; 12] = [
    "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6", "table1", "table2", "sec4d", "sec5",
    "appendixB", "cases",
];

#[derive(Debug, Clone, Default)]
pub struct Summary {
    checks: Vec<(bool, String)>,
}

impl Summary {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks.push((ok, what.into()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(ok, _)| *ok)
    }

    pub fn render(&self, name: &str) -> String {
        let mut out = String::new();
        for (ok, what) in &self.checks {
            let tag = if *ok { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {name}: {what}");
        }
        let good = self.checks.iter().filter(|(ok, _)| *ok).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{name}: {verdict} ({good}/{} checks)", self.checks.len());
        out
    }
}

/// Runs one artifact, or all of them in parallel for `"all"`. Returns the
/// rendered summaries in artifact order and whether every check passed.
pub fn run(name: &str, out_dir: &Path) -> CliResult<(String, bool)> {
    let names: Vec<&str> = if name == "all" {
        ARTIFACTS.to_vec()
    } else if ARTIFACTS.contains(&name) {
        vec![name]
    } else {
        return Err(CliError::input(format!(
            "unknown artifact {name:?}; valid names: {}, all",
            ARTIFACTS.join(", ")
        )));
    };
    let results: Vec<CliResult<Summary>> = std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|&n| s.spawn(move || run_one(n, &out_dir.join(n))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("artifact thread panicked"))
            .collect()
    });
    let mut text = String::new();
    let mut all_passed = true;
    for (n, r) in names.iter().zip(results) {
        let summary = r?;
        let rendered = summary.render(n);
        csvio::write_text(&out_dir.join(n).join("summary.txt"), &rendered)?;
        all_passed &= summary.passed();
        text.push_str(&rendered);
    }
    Ok((text, all_passed))
}

fn run_one(name: &str, dir: &Path) -> CliResult<Summary> {
    fs::create_dir_all(dir)?;
    match name {
        "fig2a" => fig2a(dir),
        "fig2b" => fig2b(dir),
        "fig3" => fig3(dir),
        "fig4" => fig4(dir),
        "fig5" => fig5(dir),
        "fig6" => fig6(dir),
        "table1" => table1(dir),
        "table2" => table2(dir),
        "sec4d" => sec4d(dir),
        "sec5" => sec5(dir),
        "appendixB" => appendix_b(dir),
        "cases" => cases(dir),
        _ => unreachable!("names are validated by run"),
    }
}

/// Gnuplot overlay of the three PMU stages. Block 0 is the envelope on
/// the raw timestamps; blocks 1-3 are `time amplitude envelope` for the
/// raw, filtered and reported streams. The envelope is `nan` when unknown.
pub fn write_overlay(path: &Path, out: &PmuOutput, envelope: Option<&dyn Fn(f64) -> f64>) -> CliResult<()> {
    let env = |t: f64| envelope.map_or(f64::NAN, |f| f(t));
    let stage = |s: &PhasorSeries| -> Vec<Vec<f64>> {
        s.points
            .iter()
            .map(|p| vec![p.timestamp, p.amplitude(), env(p.timestamp)])
            .collect()
    };
    let envelope_rows = out
        .raw
        .points
        .iter()
        .map(|p| vec![p.timestamp, env(p.timestamp)])
        .collect();
    let cols3: &[&str] = &["time", "amplitude", "envelope"];
    csvio::write_blocks(
        path,
        &[
            ("envelope", &["time", "envelope"], envelope_rows),
            ("raw", cols3, stage(&out.raw)),
            ("filtered", cols3, stage(&out.filtered)),
            ("reported", cols3, stage(&out.reported)),
        ],
    )
}

pub fn write_pmu_output(prefix: &Path, out: &PmuOutput) -> CliResult<()> {
    for (stage, s) in [("raw", &out.raw), ("filtered", &out.filtered), ("reported", &out.reported)] {
        csvio::write_phasors(&with_suffix(prefix, &format!("_{stage}.csv")), s)?;
    }
    Ok(())
}

pub fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

/// Amplitude and phase of the `f` component of a phasor amplitude curve,
/// fitted together with the carrier-ripple tones.
fn amplitude_tone(s: &PhasorSeries, f: f64) -> CliResult<(f64, f64)> {
    let fit = fit_tones(&s.times(), &s.amplitudes(), &[f, 120.0 - f, 120.0, 120.0 + f])?;
    let t = fit
        .tone(f)
        .ok_or_else(|| CliError::Numerical(format!("no {f} Hz tone in fit")))?;
    Ok((t.amplitude, t.phase))
}

fn reported_peak(out: &PmuOutput, count: usize) -> CliResult<f64> {
    let amps: Vec<f64> = out.reported.amplitudes().into_iter().take(count).collect();
    let lines = spectrum(&amps, out.reported.rate)?;
    Ok(dominant_peak(&lines).map_or(f64::NAN, |l| l.frequency))
}

fn am_pmu(dir: &Path, p: &AmplitudeModSignal, fs: f64, duration: f64) -> CliResult<PmuOutput> {
    let w = synthesize_am(p, fs, duration, 0.0)?;
    let out = simulate_pmu(&w, &presets::one_cycle_pmu())?;
    csvio::write_waveform(&dir.join("waveform.csv"), &w)?;
    write_pmu_output(&dir.join("pmu"), &out)?;
    write_overlay(&dir.join("overlay.dat"), &out, Some(&|t| p.envelope(t)))?;
    Ok(out)
}

fn fig2a(dir: &Path) -> CliResult<Summary> {
    let sc = presets::slow_am();
    let out = am_pmu(dir, &sc.signal, sc.fs, sc.duration)?;
    let mut s = Summary::default();
    for (label, series) in [("raw", &out.raw), ("filtered", &out.filtered), ("reported", &out.reported)] {
        let worst = series
            .points
            .iter()
            .map(|p| (p.amplitude() / sc.signal.envelope(p.timestamp) - 1.0).abs())
            .fold(0.0, f64::max);
        s.check(worst < 0.01, format!("{label} amplitude within {:.3}% of envelope (tol 1%)", 100.0 * worst));
    }
    Ok(s)
}

fn fig2b(dir: &Path) -> CliResult<Summary> {
    let sc = presets::fast_am();
    let out = am_pmu(dir, &sc.signal, sc.fs, sc.duration)?;
    let amps: Vec<f64> = out.reported.amplitudes().into_iter().take(60).collect();
    let lines = spectrum(&amps, out.reported.rate)?;
    csvio::write_spectrum(&dir.join("reported_spectrum.csv"), &lines)?;
    let mut s = Summary::default();
    let peak = dominant_peak(&lines).map_or(f64::NAN, |l| l.frequency);
    s.check(
        (peak - 10.0).abs() <= 0.1,
        format!("reported amplitude peak at {peak:.3} Hz (10 ± 0.1)"),
    );
    let (amp, _) = amplitude_tone(&out.raw, sc.signal.f_os)?;
    let ratio = amp / (sc.signal.amplitude * sc.signal.depth);
    let closed = f_gain(60.0, sc.signal.f_os, 1).abs();
    let exact = f_gain_exact(60.0, sc.signal.f_os, 1).abs();
    s.check(
        (ratio - closed).abs() <= 0.01,
        format!("raw depth ratio {ratio:.4} vs closed-form |F_gain| {closed:.4} (tol 0.01)"),
    );
    s.check(
        (ratio - exact).abs() <= 0.01,
        format!("raw depth ratio {ratio:.4} vs exact window gain {exact:.4} (tol 0.01)"),
    );
    Ok(s)
}

fn fig3(dir: &Path) -> CliResult<Summary> {
    let f1 = 60.0;
    let grid: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.05).collect();
    let blocks: Vec<(String, Vec<Vec<f64>>)> = (1..=6)
        .map(|n| {
            let prof = gain_profile(f1, n, &grid, GainModel::ClosedForm);
            let rows = prof.points.iter().map(|&(f, g)| vec![f, g]).collect();
            (format!("N={n}"), rows)
        })
        .collect();
    let cols: &[&str] = &["f_os", "gain"];
    let refs: Vec<csvio::Block<'_>> =
        blocks.iter().map(|(n, r)| (n.as_str(), cols, r.clone())).collect();
    csvio::write_blocks(&dir.join("gain.dat"), &refs)?;

    let mut s = Summary::default();
    let unit = (1..=6).all(|n| (f_gain(f1, 0.0, n) - 1.0).abs() < 1e-12);
    s.check(unit, "unit gain at f_os = 0 for N = 1..6");
    let mut flips = true;
    for n in 1..=6 {
        let first = f1 / n as f64;
        flips &= f_gain(f1, first - 0.05, n) > 0.0 && f_gain(f1, first + 0.05, n) < 0.0;
    }
    s.check(flips, "gain changes sign at f1/N for N = 1..6");
    Ok(s)
}

fn fig4(dir: &Path) -> CliResult<Summary> {
    let p = AmplitudeModSignal {
        f1: 60.0,
        amplitude: 2.0,
        phase: 0.0,
        depth: 0.2,
        f_os: 5.0,
        osc_phase: 0.0,
    };
    let w = synthesize_am(&p, 15360.0, 1.0, 0.0)?;
    let cfg = presets::one_cycle_pmu();
    let center = phasor_stream(&w, &cfg)?;
    let end = center.shift_timestamps(StampPosition::WindowEnd.offset_from_center(1, p.f1));
    csvio::write_phasors(&dir.join("center_stamped.csv"), &center)?;
    csvio::write_phasors(&dir.join("end_stamped.csv"), &end)?;
    let rows = |s: &PhasorSeries| -> Vec<Vec<f64>> {
        s.points
            .iter()
            .step_by(16)
            .map(|q| vec![q.timestamp, q.amplitude(), p.envelope(q.timestamp)])
            .collect()
    };
    let cols: &[&str] = &["time", "amplitude", "envelope"];
    csvio::write_blocks(
        &dir.join("timestamping.dat"),
        &[("center", cols, rows(&center)), ("end", cols, rows(&end))],
    )?;

    let (_, phase_c) = amplitude_tone(&center, p.f_os)?;
    let (_, phase_e) = amplitude_tone(&end, p.f_os)?;
    let shift = wrap_phase(phase_c - phase_e);
    let expected = timestamp_phase_error(p.f_os, 1, p.f1, StampPosition::WindowEnd);
    let mut s = Summary::default();
    s.check(
        (expected - PI / 12.0).abs() < 1e-12,
        format!("predicted shift {expected:.5} rad equals pi/12"),
    );
    s.check(
        (shift - expected).abs() <= 0.01,
        format!("measured end-of-window shift {shift:.5} rad (tol 0.01)"),
    );
    Ok(s)
}

/// Synthesized mixed-modulation record, its estimate and the one-cycle
/// DFT phasors at every sample.
struct MixedRun {
    signal: oscphasor::GeneralOscSignal,
    w: oscphasor::SampledWaveform,
    est: oscphasor::EstimationResult,
    dft: PhasorSeries,
}

fn mixed_run() -> CliResult<MixedRun> {
    let sc = presets::mixed_modulation();
    let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0)?;
    let est = estimate(&w, 60.0)?;
    let dft = phasor_stream(&w, &presets::one_cycle_pmu())?;
    Ok(MixedRun {
        signal: sc.signal,
        w,
        est,
        dft,
    })
}

fn fig5(dir: &Path) -> CliResult<Summary> {
    let r = mixed_run()?;
    let f1 = r.signal.f1;
    let rows: Vec<Vec<f64>> = r
        .dft
        .points
        .iter()
        .map(|p| {
            let t = p.timestamp;
            let dft_value = p.amplitude() * (2.0 * PI * f1 * t + p.phase()).cos();
            vec![t, r.signal.eval(t), dft_value, r.est.params.eval(t)]
        })
        .collect();
    csvio::write_rows(&dir.join("waveforms.csv"), &["time", "original", "dft", "proposed"], rows)?;

    let dft = dft_reconstruction_error(&r.w, f1, r.signal.amplitude)?;
    let mut s = Summary::default();
    s.check(
        (dft.e_pow_pct - 9.0).abs() <= 1.0,
        format!("one-cycle DFT reconstruction E_PoW {:.3}% (9 ± 1)", dft.e_pow_pct),
    );
    s.check(
        r.est.e_pow_pct <= 1e-3,
        format!("proposed reconstruction E_PoW {:.3e}% (<= 1e-3)", r.est.e_pow_pct),
    );
    Ok(s)
}

fn fig6(dir: &Path) -> CliResult<Summary> {
    let r = mixed_run()?;
    let mut worst_dft = 0.0f64;
    let mut worst_est = 0.0f64;
    let rows: Vec<Vec<f64>> = r
        .dft
        .points
        .iter()
        .map(|p| {
            let t = p.timestamp;
            let truth = r.signal.true_phasor(t).norm();
            let proposed = r.est.params.true_phasor(t).norm();
            worst_dft = worst_dft.max((p.amplitude() - truth).abs() / r.signal.amplitude);
            worst_est = worst_est.max((proposed - truth).abs() / r.signal.amplitude);
            vec![t, truth, p.amplitude(), proposed]
        })
        .collect();
    csvio::write_rows(&dir.join("amplitudes.csv"), &["time", "true", "dft", "proposed"], rows)?;
    let mut s = Summary::default();
    s.check(
        worst_est <= 1e-4,
        format!("proposed amplitude within {worst_est:.2e} of the true phasor (tol 1e-4 of a)"),
    );
    s.check(
        worst_dft > 0.01,
        format!("one-cycle DFT amplitude departs by up to {:.2}% of a", 100.0 * worst_dft),
    );
    Ok(s)
}

/// Lowest flipping frequency for N = 1..n_max.
pub fn table1_rows(f1: f64, n_max: usize) -> Vec<(usize, f64)> {
    (1..=n_max)
        .map(|n| (n, flip_frequencies(f1, n, f1)[0]))
        .collect()
}

pub fn write_table1(path: &Path, f1: f64, n_max: usize) -> CliResult<Vec<(usize, f64)>> {
    let rows = table1_rows(f1, n_max);
    csvio::write_rows(
        path,
        &["n_cycles", "lowest_flip_hz"],
        rows.iter().map(|&(n, f)| vec![n as f64, f]),
    )?;
    Ok(rows)
}

/// Renders a gain percentage the way the reference table does: more
/// digits the closer the value is to 100, `-` once the gain is negative
/// or the frequency is past the first flip.
pub fn display_percent(percent: f64, f_os: f64, first_flip: f64) -> String {
    if f_os > first_flip || percent < -0.5 {
        return "-".into();
    }
    let loss = 100.0 - percent;
    let decimals = if loss < 0.1 {
        2
    } else if loss < 1.0 {
        1
    } else {
        0
    };
    let s = format!("{percent:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" { "0".into() } else { s }
}

/// Applicability table in long format: `f_os,n_cycles,display,percent`.
pub fn write_table2(path: &Path, f1: f64, n_max: usize, f_os: &[f64]) -> CliResult<()> {
    csvio::ensure_parent(path)?;
    let n_list: Vec<usize> = (1..=n_max).collect();
    let table = applicability_table(f1, &n_list, f_os);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["f_os", "n_cycles", "display", "percent"])?;
    for row in &table.rows {
        for cell in row {
            let flip = f1 / cell.n_cycles as f64;
            w.write_record([
                fmt(cell.f_os),
                cell.n_cycles.to_string(),
                display_percent(cell.percent, cell.f_os, flip),
                fmt(cell.percent),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn table1(dir: &Path) -> CliResult<Summary> {
    let rows = write_table1(&dir.join("table1.csv"), 60.0, 6)?;
    let got: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let mut s = Summary::default();
    s.check(got == presets::LOWEST_FLIP_HZ, format!("lowest flips {got:?} Hz"));
    Ok(s)
}

fn table2(dir: &Path) -> CliResult<Summary> {
    write_table2(&dir.join("table2.csv"), 60.0, 6, &presets::APPLICABILITY_F_OS)?;
    let mut worst = 0.0f64;
    let mut blanks_ok = true;
    for (i, &f_os) in presets::APPLICABILITY_F_OS.iter().enumerate() {
        for (j, cell) in presets::APPLICABILITY_PERCENT[i].iter().enumerate() {
            let n = j + 1;
            let g = 100.0 * f_gain(60.0, f_os, n);
            match cell {
                Some(v) => worst = worst.max((g - v).abs()),
                None => blanks_ok &= g < 0.0 || f_os >= 60.0 / n as f64,
            }
        }
    }
    let mut s = Summary::default();
    s.check(worst <= 1.0, format!("largest cell deviation {worst:.3} pp (tol 1)"));
    s.check(blanks_ok, "blank cells are negative or past the first flip");
    Ok(s)
}

fn sec4d(dir: &Path) -> CliResult<Summary> {
    let r = mixed_run()?;
    let csv_path = dir.join("waveform.csv");
    csvio::write_waveform(&csv_path, &r.w)?;
    let bytes = fs::read(&csv_path)?;
    let report = RunReport::new("waveform.csv", &bytes, &r.w, 60.0, &EstimatorConfig::default(), &r.est);
    csvio::write_text(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let dft = dft_reconstruction_error(&r.w, r.signal.f1, r.signal.amplitude)?;
    let mut s = Summary::default();
    s.check(
        (dft.e_pow_pct - 9.0).abs() <= 1.0,
        format!("one-cycle DFT E_PoW {:.3}% (9 ± 1)", dft.e_pow_pct),
    );
    s.check(
        r.est.e_pow_pct <= 1e-3,
        format!("proposed E_PoW {:.3e}% (<= 1e-3)", r.est.e_pow_pct),
    );
    Ok(s)
}

fn sec5(dir: &Path) -> CliResult<Summary> {
    let c1 = presets::symmetric_sidebands();
    let c2 = presets::asymmetric_sidebands();
    let mut violated = c1.signal;
    violated.sub_phase = -3.0 * PI / 20.0;
    let r1 = check_representability(&c1.signal, c1.fs, c1.duration)?;
    let r2 = check_representability(&c2.signal, c2.fs, c2.duration)?;
    let r3 = check_representability(&violated, c1.fs, c1.duration)?;
    for (file, r) in [("case1.json", &r1), ("case2.json", &r2), ("phase_violated.json", &r3)] {
        csvio::write_text(&dir.join(file), &serde_json::to_string_pretty(r).expect("serializes"))?;
    }
    let e1 = r1.fit_error_pct.unwrap_or(f64::NAN);
    let e2 = r2.fit_error_pct.unwrap_or(f64::NAN);
    let constructed = wrap_phase(violated.sub_phase + violated.sup_phase - 2.0 * violated.phase);
    let mut s = Summary::default();
    s.check(r1.representable && e1 < 1e-10, format!("case 1 representable, fit error {e1:.3e}% (< 1e-10)"));
    s.check(
        !r2.representable && (e2 - 2.5).abs() <= 0.3,
        format!("case 2 not representable, fit error {e2:.3}% (2.5 ± 0.3)"),
    );
    s.check(
        !r3.representable && (r3.phase_residual - constructed).abs() < 1e-12,
        format!("violated phase condition leaves residual {:.5} rad", r3.phase_residual),
    );
    Ok(s)
}

fn appendix_b(dir: &Path) -> CliResult<Summary> {
    let sc = presets::sideband_am();
    let w = synthesize_am(&sc.signal, sc.fs, sc.duration, 0.0)?;
    let lines = spectrum(&w.samples, sc.fs)?;
    csvio::write_waveform(&dir.join("waveform.csv"), &w)?;
    csvio::write_spectrum(&dir.join("waveform_spectrum.csv"), &lines)?;
    let mut s = Summary::default();
    for (f, mag) in [(55.0, 0.2), (60.0, 2.0), (65.0, 0.2)] {
        let got = lines
            .iter()
            .find(|l| (l.frequency - f).abs() < 1e-9)
            .map_or(0.0, |l| l.magnitude);
        s.check(
            (got / mag - 1.0).abs() <= 0.01,
            format!("waveform line at {f} Hz: {got:.4} ({mag} ± 1%)"),
        );
    }

    let long = synthesize_am(&sc.signal, sc.fs, 3.0, 0.0)?;
    let out = simulate_pmu(&long, &presets::one_cycle_pmu())?;
    csvio::write_phasors(&dir.join("pmu_reported.csv"), &out.reported)?;
    let amps: Vec<f64> = out.reported.amplitudes().into_iter().take(60).collect();
    let pmu_lines = spectrum(&amps, out.reported.rate)?;
    csvio::write_spectrum(&dir.join("pmu_spectrum.csv"), &pmu_lines)?;
    let peak = dominant_peak(&pmu_lines).map_or(f64::NAN, |l| l.frequency);
    s.check((peak - 5.0).abs() <= 0.1, format!("reported amplitude peak at {peak:.3} Hz (5 ± 0.1)"));
    Ok(s)
}

/// Three single-oscillation records: the estimator against what a 30-fps
/// PMU reports.
fn cases(dir: &Path) -> CliResult<Summary> {
    let mut s = Summary::default();
    let mut rows = Vec::new();
    for (i, sc) in presets::oscillation_cases().iter().enumerate() {
        let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0)?;
        let est = estimate(&w, 60.0)?;
        let out = simulate_pmu(&w, &presets::one_cycle_pmu())?;
        write_pmu_output(&dir.join(format!("case{}", i + 1)), &out)?;
        let count = out.reported.len();
        let peak = reported_peak(&out, count)?;
        let bin = out.reported.rate / count as f64;
        let alias = alias_frequency(sc.signal.f_os, out.reported.rate);
        rows.push(vec![sc.signal.f_os, est.f_os_est, est.e_pow_pct, alias, peak]);
        let f = sc.signal.f_os;
        s.check(
            (est.f_os_est - f).abs() <= 1e-3 * f && est.e_pow_pct <= 1e-3,
            format!("{f} Hz: estimated {:.5} Hz, E_PoW {:.2e}%", est.f_os_est, est.e_pow_pct),
        );
        s.check(
            (peak - alias).abs() <= bin,
            format!("{f} Hz: reported amplitude peak {peak:.3} Hz, expected alias {alias:.3} Hz (± {bin:.3})"),
        );
    }
    csvio::write_rows(
        &dir.join("cases.csv"),
        &["f_os", "f_os_est", "e_pow_pct", "alias_hz", "reported_peak_hz"],
        rows,
    )?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_display() {
        assert_eq!(display_percent(99.9992, 0.2, 60.0), "100");
        assert_eq!(display_percent(99.987, 0.2, 30.0), "99.99");
        assert_eq!(display_percent(99.68, 2.5, 60.0), "99.7");
        assert_eq!(display_percent(79.4, 7.4, 20.0), "79");
        assert_eq!(display_percent(-1e-14, 20.0, 20.0), "0");
        assert_eq!(display_percent(-12.0, 14.0, 15.0), "-");
        assert_eq!(display_percent(3.0, 14.0, 12.0), "-");
    }

    #[test]
    fn unknown_artifact() {
        let e = run("fig9", Path::new("unused")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("appendixB"));
    }
}

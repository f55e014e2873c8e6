//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oscphasor::estimator::{dft_reconstruction_error, estimate_with, model_jacobian, EstimatorConfig};
use oscphasor::gain_analysis::{f_gain, flip_frequencies};
use oscphasor::metrics::{e_ls, e_pow, e_pow_from_ls};
use oscphasor::modal::{matrix_pencil, Mode, PencilOptions};
use oscphasor::pmu_pipeline::{
    dominant_peak, fit_tones, phasor_stream, simulate_pmu, spectrum, PhasorSeries, PmuConfig,
};
use oscphasor::presets;
use oscphasor::signal_model::{
    polar_to_rect, rect_to_polar, synthesize_am, synthesize_general, check_representability,
    AmplitudeModSignal, GeneralOscSignal,
};
use oscphasor::{estimate, wrap_phase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !ok {
            self.detail.push_str(" [miss]");
        }
        self.pass &= ok;
    }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.check(
        elapsed <= budget,
        format!("runtime {:.2}s of {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()),
    );
    let tag = if out.pass { "PASS" } else { "FAIL" };
    println!("{tag} [{id}] {name}: {}", out.detail);
    out.pass
}

fn amplitude_tone(s: &PhasorSeries, f: f64) -> (f64, f64) {
    let fit = fit_tones(&s.times(), &s.amplitudes(), &[f, 120.0 - f, 120.0, 120.0 + f]).unwrap();
    let t = fit.tone(f).unwrap();
    (t.amplitude, t.phase)
}

fn raw_amplitudes(p: &AmplitudeModSignal, fs: f64, duration: f64) -> PhasorSeries {
    let w = synthesize_am(p, fs, duration, 0.0).unwrap();
    phasor_stream(&w, &PmuConfig::default()).unwrap()
}

fn table_one() -> Outcome {
    let mut o = Outcome::new();
    let got: Vec<f64> = (1..=6)
        .map(|n| flip_frequencies(60.0, n, 70.0)[0])
        .collect();
    o.check(got == presets::LOWEST_FLIP_HZ, format!("first flips {got:?}"));
    o
}

fn table_two() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    let mut blanks_ok = true;
    for (i, &f_os) in presets::APPLICABILITY_F_OS.iter().enumerate() {
        for (j, cell) in presets::APPLICABILITY_PERCENT[i].iter().enumerate() {
            let n = j + 1;
            let g = 100.0 * f_gain(60.0, f_os, n);
            match cell {
                Some(v) => worst = worst.max((g - v).abs()),
                None => {
                    let past_flip = f_os >= flip_frequencies(60.0, n, 70.0)[0];
                    blanks_ok &= g < 0.0 || past_flip;
                }
            }
        }
    }
    o.check(worst <= 1.0, format!("max cell deviation {worst:.3} pp (tol 1)"));
    o.check(blanks_ok, "blank cells negative or past flip");
    o
}

fn mixed_case() -> Outcome {
    let mut o = Outcome::new();
    let sc = presets::mixed_modulation();
    let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0).unwrap();
    match estimate(&w, 60.0) {
        Ok(r) => o.check(r.e_pow_pct <= 1e-3, format!("proposed E_PoW {:.3e}% (tol 1e-3)", r.e_pow_pct)),
        Err(e) => o.check(false, format!("estimate failed: {e}")),
    }
    let dft = dft_reconstruction_error(&w, 60.0, sc.signal.amplitude).unwrap();
    o.check(
        (dft.e_pow_pct - 9.0).abs() <= 1.0,
        format!("one-cycle DFT E_PoW {:.3}% (9 ± 1)", dft.e_pow_pct),
    );
    o
}

fn representability() -> Outcome {
    let mut o = Outcome::new();
    let c1 = presets::symmetric_sidebands();
    let c2 = presets::asymmetric_sidebands();
    let e1 = check_representability(&c1.signal, c1.fs, c1.duration).unwrap().fit_error_pct;
    let e2 = check_representability(&c2.signal, c2.fs, c2.duration).unwrap().fit_error_pct;
    o.check(
        e1.is_some_and(|e| e < 1e-10),
        format!("case 1 fit error {:.3e}% (< 1e-10)", e1.unwrap_or(f64::NAN)),
    );
    o.check(
        e2.is_some_and(|e| (e - 2.5).abs() <= 0.3),
        format!("case 2 fit error {:.3}% (2.5 ± 0.3)", e2.unwrap_or(f64::NAN)),
    );
    o
}

fn measured_curves() -> Outcome {
    let mut o = Outcome::new();
    let slow = presets::slow_am();
    let w = synthesize_am(&slow.signal, slow.fs, slow.duration, 0.0).unwrap();
    let out = simulate_pmu(&w, &presets::one_cycle_pmu()).unwrap();
    for (label, s) in [("raw", &out.raw), ("filtered", &out.filtered), ("reported", &out.reported)] {
        let worst = s
            .points
            .iter()
            .map(|p| (p.amplitude() / slow.signal.envelope(p.timestamp) - 1.0).abs())
            .fold(0.0, f64::max);
        o.check(worst < 0.01, format!("2 Hz {label} within {:.3}% of envelope", 100.0 * worst));
    }

    let fast = presets::fast_am();
    let w = synthesize_am(&fast.signal, fast.fs, fast.duration, 0.0).unwrap();
    let out = simulate_pmu(&w, &presets::one_cycle_pmu()).unwrap();
    // 2 s of reports: 0.5-Hz bins
    let amps: Vec<f64> = out.reported.amplitudes().into_iter().take(60).collect();
    let peak = dominant_peak(&spectrum(&amps, 30.0).unwrap()).unwrap();
    o.check(
        (peak.frequency - 10.0).abs() <= 0.1,
        format!("40 Hz reported peak {:.3} Hz (10 ± 0.1)", peak.frequency),
    );
    let (amp, _) = amplitude_tone(&out.raw, 40.0);
    let ratio = amp / (fast.signal.amplitude * fast.signal.depth);
    let gain = f_gain(60.0, 40.0, 1).abs();
    o.check(
        (ratio - gain).abs() <= 0.01,
        format!("raw depth ratio {ratio:.4} vs |F_gain| {gain:.4} (tol 0.01)"),
    );
    o
}

fn sideband_spectra() -> Outcome {
    let mut o = Outcome::new();
    let sc = presets::sideband_am();
    let w = synthesize_am(&sc.signal, sc.fs, sc.duration, 0.0).unwrap();
    let lines = spectrum(&w.samples, sc.fs).unwrap();
    for (f, mag) in [(55.0, 0.2), (60.0, 2.0), (65.0, 0.2)] {
        let got = lines
            .iter()
            .find(|l| (l.frequency - f).abs() < 1e-9)
            .map_or(0.0, |l| l.magnitude);
        o.check((got / mag - 1.0).abs() <= 0.01, format!("{f} Hz line {got:.4}"));
    }
    let w = synthesize_am(&sc.signal, sc.fs, 3.0, 0.0).unwrap();
    let out = simulate_pmu(&w, &presets::one_cycle_pmu()).unwrap();
    let amps: Vec<f64> = out.reported.amplitudes().into_iter().take(60).collect();
    let peak = dominant_peak(&spectrum(&amps, 30.0).unwrap()).unwrap();
    o.check(
        (peak.frequency - 5.0).abs() <= 0.1,
        format!("30 fps amplitude peak {:.3} Hz", peak.frequency),
    );
    o
}

fn flip_and_stamp() -> Outcome {
    let mut o = Outcome::new();
    let base = presets::slow_am().signal;
    let phase_at = |f: f64| {
        let p = AmplitudeModSignal { f_os: f, ..base };
        amplitude_tone(&raw_amplitudes(&p, 15360.0, 1.0), f).1
    };
    let jump = wrap_phase(phase_at(59.0) - phase_at(61.0)).abs().to_degrees();
    o.check((jump - 180.0).abs() <= 2.0, format!("flip across 60 Hz {jump:.2}°"));

    let p = AmplitudeModSignal { f_os: 5.0, ..base };
    let raw = raw_amplitudes(&p, 15360.0, 1.0);
    let (_, centered) = amplitude_tone(&raw, 5.0);
    let (_, late) = amplitude_tone(&raw.shift_timestamps(1.0 / 120.0), 5.0);
    let shift = wrap_phase(centered - late);
    o.check(
        (shift - PI / 12.0).abs() <= 0.01,
        format!("end-of-window shift {shift:.5} rad (π/12 = {:.5})", PI / 12.0),
    );
    o
}

fn random_signal(rng: &mut ChaCha8Rng) -> GeneralOscSignal {
    let a = rng.random_range(0.5..3.0);
    GeneralOscSignal {
        amplitude: a,
        f1: 60.0 + rng.random_range(-0.5..0.5),
        phase: rng.random_range(-PI..PI),
        f_os: rng.random_range(1.0..55.0),
        osc_phase: rng.random_range(-PI..PI),
        angle_depth: rng.random_range(0.0..0.2),
        sub_amplitude: rng.random_range(0.0..0.3 * a),
        sub_phase: rng.random_range(-PI..PI),
        sup_amplitude: rng.random_range(0.0..0.3 * a),
        sup_phase: rng.random_range(-PI..PI),
    }
}

fn as_array(p: &GeneralOscSignal) -> [f64; 10] {
    [
        p.amplitude,
        p.f1,
        p.phase,
        p.f_os,
        p.osc_phase,
        p.angle_depth,
        p.sub_amplitude,
        p.sub_phase,
        p.sup_amplitude,
        p.sup_phase,
    ]
}

fn from_array(v: [f64; 10]) -> GeneralOscSignal {
    GeneralOscSignal {
        amplitude: v[0],
        f1: v[1],
        phase: v[2],
        f_os: v[3],
        osc_phase: v[4],
        angle_depth: v[5],
        sub_amplitude: v[6],
        sub_phase: v[7],
        sup_amplitude: v[8],
        sup_phase: v[9],
    }
}

/// Worst parameter mismatch: phases in radians (skipped when their
/// component is below 1e-3 of the carrier), the rest relative.
fn parameter_error(est: &GeneralOscSignal, truth: &GeneralOscSignal) -> f64 {
    let (e, t) = (as_array(est), as_array(truth));
    let a = truth.amplitude;
    let scale = [a, truth.f1, 0.0, truth.f_os, 0.0, 1.0, a, 0.0, a, 0.0];
    let owner = [None, None, Some(0), None, Some(5), None, None, Some(6), None, Some(8)];
    let mut worst = 0.0f64;
    for j in 0..10 {
        let err = match owner[j] {
            Some(k) => {
                let size = if k == 5 { t[k] } else { t[k] / a };
                if size < 1e-3 {
                    continue;
                }
                wrap_phase(e[j] - t[j]).abs()
            }
            None => (e[j] - t[j]).abs() / t[j].abs().max(scale[j]),
        };
        worst = worst.max(err);
    }
    worst
}

fn property_suites() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // polar and rectangular forms of the same three-component signal
    let mut eq = 0.0f64;
    let mut trip = 0.0f64;
    for _ in 0..200 {
        let p = GeneralOscSignal {
            angle_depth: 0.0,
            ..random_signal(&mut rng)
        }
        .to_three_component();
        let rect = polar_to_rect(&p);
        for k in 0..50 {
            let t = k as f64 * 1.3e-3;
            eq = eq.max((rect.eval(t) - p.eval(t)).abs() / p.amplitude);
        }
        let back = polar_to_rect(&rect_to_polar(&rect).signal);
        for (x, y) in rect.coefficients().iter().zip(back.coefficients()) {
            trip = trip.max((x - y).abs() / p.amplitude);
        }
    }
    o.check(eq <= 1e-12, format!("rect/polar sample equivalence {eq:.1e}"));
    o.check(trip <= 1e-12, format!("rect/polar round trip {trip:.1e}"));

    let mut ident = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..500);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let yh: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a = rng.random_range(0.1..5.0);
        let direct = e_pow(&y, &yh, a, 1.0 / 7680.0).unwrap();
        let via = e_pow_from_ls(e_ls(&y, &yh).unwrap(), n, a).unwrap();
        ident = ident.max((direct - via).abs() / direct);
    }
    o.check(ident <= 1e-12, format!("E_PoW/E_LS identity {ident:.1e}"));

    let mut pencil = 0.0f64;
    for _ in 0..100 {
        let count = rng.random_range(1..=3usize);
        let truth: Vec<Mode> = (0..count)
            .map(|i| Mode {
                frequency: 1.0 + 7.0 * i as f64 + rng.random_range(0.0..5.0),
                damping: rng.random_range(-0.5..0.0),
                amplitude: rng.random_range(0.2..2.0),
                phase: rng.random_range(-PI..PI),
                ill_conditioned: false,
            })
            .collect();
        let y: Vec<f64> = (0..300)
            .map(|k| truth.iter().map(|m| m.eval(k as f64 / 60.0)).sum())
            .collect();
        let found = matrix_pencil(&y, 60.0, PencilOptions::default()).unwrap();
        for m in &truth {
            let err = found
                .iter()
                .map(|g| {
                    (g.frequency - m.frequency)
                        .abs()
                        .max((g.damping - m.damping).abs())
                        .max((g.amplitude - m.amplitude).abs() / m.amplitude)
                        .max(wrap_phase(g.phase - m.phase).abs())
                })
                .fold(f64::INFINITY, f64::min);
            pencil = pencil.max(err);
        }
    }
    o.check(pencil <= 1e-6, format!("pencil recovery {pencil:.1e}"));

    let mut jac = 0.0f64;
    for _ in 0..20 {
        let p = random_signal(&mut rng);
        let t = rng.random_range(-1.0..1.0);
        let g = model_jacobian(&p, t);
        let base = as_array(&p);
        for j in 0..10 {
            let h = 1e-6 * base[j].abs().max(1.0);
            let (mut up, mut dn) = (base, base);
            up[j] += h;
            dn[j] -= h;
            let fd = (from_array(up).eval(t) - from_array(dn).eval(t)) / (2.0 * h);
            jac = jac.max((fd - g[j]).abs() / g[j].abs().max(1.0));
        }
    }
    o.check(jac <= 1e-5, format!("Jacobian vs finite differences {jac:.1e}"));

    let cfg = EstimatorConfig::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let truth = random_signal(&mut rng);
        let w = synthesize_general(&truth, 7680.0, 2.0, 0.0).unwrap();
        match estimate_with(&w, 60.0, &cfg) {
            Ok(r) => worst = worst.max(parameter_error(&r.params, &truth)),
            Err(_) => failures += 1,
        }
    }
    o.check(
        failures == 0 && worst <= 1e-3,
        format!("identifiability over 100 draws: worst {worst:.1e}, {failures} failures"),
    );
    o
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "lowest flipping frequencies", secs(1), table_one),
        run(2, "applicability table", secs(1), table_two),
        run(3, "mixed-modulation estimate", secs(10), mixed_case),
        run(4, "representability cases", secs(10), representability),
        run(5, "measured amplitude curves", secs(10), measured_curves),
        run(6, "sideband spectra", secs(5), sideband_spectra),
        run(7, "phase flip and timestamping", secs(10), flip_and_stamp),
        run(8, "property suites", secs(60), property_suites),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

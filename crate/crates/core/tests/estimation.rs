use std::f64::consts::PI;

use oscphasor::estimator::{
    amplitude_curve, dft_reconstruction_error, estimate_osc_frequency, estimate_with,
    EstimatorConfig, PARAM_NAMES,
};
use oscphasor::modal::{dominant_mode, matrix_pencil, PencilOptions};
use oscphasor::pmu_pipeline::phasor_stream;
use oscphasor::presets;
use oscphasor::signal_model::{synthesize_am, synthesize_general, GeneralOscSignal};
use oscphasor::{estimate, wrap_phase, PmuConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(p: &GeneralOscSignal) -> [f64; 10] {
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

/// Per-parameter mismatch: phases in radians, everything else relative to
/// the larger of the true value and a natural scale. Phases whose
/// component is too small to observe are skipped.
fn mismatches(est: &GeneralOscSignal, truth: &GeneralOscSignal) -> Vec<(&'static str, f64)> {
    let (e, t) = (params(est), params(truth));
    let a = truth.amplitude;
    let scale = [a, truth.f1, 0.0, truth.f_os, 0.0, 1.0, a, 0.0, a, 0.0];
    let owner = [None, None, Some(0), None, Some(5), None, None, Some(6), None, Some(8)];
    let mut out = Vec::new();
    for j in 0..10 {
        let err = match owner[j] {
            Some(k) => {
                let observable = if k == 5 { t[k] } else { t[k] / a };
                if observable < 1e-3 {
                    continue;
                }
                wrap_phase(e[j] - t[j]).abs()
            }
            None => (e[j] - t[j]).abs() / t[j].abs().max(scale[j]),
        };
        out.push((PARAM_NAMES[j], err));
    }
    out
}

#[test]
fn mixed_modulation_recovered() {
    let sc = presets::mixed_modulation();
    let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0).unwrap();
    let r = estimate(&w, 60.0).unwrap();
    assert!((r.f1_est - 60.0).abs() < 0.01);
    assert!((r.f_os_est - 40.0).abs() < 0.05, "{}", r.f_os_est);
    assert!(r.e_pow_pct <= 1e-3);
    for (name, err) in mismatches(&r.params, &sc.signal) {
        assert!(err < 1e-3, "{name}: {err}");
    }
    let dft = dft_reconstruction_error(&w, 60.0, sc.signal.amplitude).unwrap();
    assert!((dft.e_pow_pct - 9.0).abs() <= 1.0, "{}", dft.e_pow_pct);
}

#[test]
fn random_draws_are_identifiable() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = EstimatorConfig::default();
    let mut worst = (0.0f64, "", 0usize);
    for draw in 0..100 {
        let a = rng.random_range(0.5..3.0);
        let truth = GeneralOscSignal {
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
        };
        let w = synthesize_general(&truth, 7680.0, 2.0, 0.0).unwrap();
        let r = estimate_with(&w, 60.0, &cfg).unwrap_or_else(|e| panic!("draw {draw}: {e}"));
        for (name, err) in mismatches(&r.params, &truth) {
            if err > worst.0 {
                worst = (err, name, draw);
            }
        }
    }
    assert!(worst.0 < 1e-3, "draw {}: {} off by {}", worst.2, worst.1, worst.0);
}

#[test]
fn estimate_scales_with_amplitude() {
    let sc = presets::mixed_modulation();
    let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0).unwrap();
    let base = estimate(&w, 60.0).unwrap();
    for c in [0.01, 3.0, 1000.0] {
        let r = estimate(&w.scaled(c), 60.0).unwrap();
        let (x, y) = (params(&base.params), params(&r.params));
        for j in [0, 6, 8] {
            assert!((y[j] / (c * x[j]) - 1.0).abs() < 1e-6, "{}", PARAM_NAMES[j]);
        }
        for j in [1, 2, 3, 4, 5, 7, 9] {
            assert!((y[j] - x[j]).abs() < 1e-6, "{}", PARAM_NAMES[j]);
        }
        assert!((r.e_pow_pct - base.e_pow_pct).abs() < 1e-6);
    }
}

#[test]
fn pure_tone_has_no_modulation() {
    let truth = GeneralOscSignal::pure_tone(1.5, 60.0, 0.7);
    let w = synthesize_general(&truth, 7680.0, 1.0, 0.0).unwrap();
    let r = estimate(&w, 60.0).unwrap();
    assert!(!r.oscillation_detected);
    assert!((r.params.amplitude - 1.5).abs() < 1e-9);
    assert!(wrap_phase(r.params.phase - 0.7).abs() < 1e-9);
    assert!(r.params.sub_amplitude < 1e-9 && r.params.sup_amplitude < 1e-9);
    assert_eq!(r.params.angle_depth, 0.0);
}

#[test]
fn pencil_on_measured_amplitude_curves() {
    let slow = presets::slow_am();
    let w = synthesize_am(&slow.signal, slow.fs, slow.duration, 0.0).unwrap();
    let raw = phasor_stream(&w, &PmuConfig::default()).unwrap();
    let curve: Vec<f64> = raw.amplitudes().into_iter().step_by(10).collect();
    let modes = matrix_pencil(&curve, raw.rate / 10.0, PencilOptions::default()).unwrap();
    let m = dominant_mode(&modes, 0.5, 30.0).unwrap();
    assert!((m.frequency - 2.0).abs() < 0.01, "{}", m.frequency);

    let fast = presets::fast_am();
    let w = synthesize_am(&fast.signal, fast.fs, fast.duration, 0.0).unwrap();
    let raw = phasor_stream(&w, &PmuConfig::default()).unwrap();
    let modes = matrix_pencil(&raw.amplitudes()[..1000], raw.rate, PencilOptions::default()).unwrap();
    let m = dominant_mode(&modes, 0.5, 60.0).unwrap();
    assert!((m.frequency - 40.0).abs() < 0.1, "{}", m.frequency);
}

#[test]
fn step_two_curve_reveals_oscillation() {
    let sc = presets::mixed_modulation();
    let w = synthesize_general(&sc.signal, sc.fs, sc.duration, 0.0).unwrap();
    let curve = amplitude_curve(&w, 60.0, 32).unwrap();
    let f = estimate_osc_frequency(&curve, 60.0).unwrap().unwrap();
    assert!((f - 40.0).abs() < 0.05, "{f}");
}

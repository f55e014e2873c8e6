//! Matrix Pencil extraction of damped sinusoidal modes from a uniformly
//! sampled real series.

use std::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energy tolerance suited to noisy measurements.
pub const NOISY_ENERGY_TOL: f64 = 1e-3;

/// One real mode `amplitude·e^{damping·t}·cos(2π·frequency·t + phase)`,
/// with `t` measured from the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub frequency: f64,
    /// 1/s, negative for decaying modes.
    pub damping: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// Set when the Vandermonde system for the residues was
    /// ill-conditioned, making amplitude and phase unreliable.
    pub ill_conditioned: bool,
}

impl Mode {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.damping * t).exp() * (2.0 * PI * self.frequency * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PencilOptions {
    /// Pencil parameter as a fraction of the series length.
    pub pencil_ratio: f64,
    /// Singular values below `energy_tol·σ_max` are treated as noise.
    pub energy_tol: f64,
}

impl Default for PencilOptions {
    fn default() -> Self {
        Self {
            pencil_ratio: 1.0 / 3.0,
            energy_tol: 1e-8,
        }
    }
}

/// Vandermonde condition number above which modes are flagged.
const VANDERMONDE_COND_LIMIT: f64 = 1e12;

/// Extracts modes from `samples` taken at `rate` Hz.
///
/// The mean is removed before the pencil is formed and returned as a
/// 0-Hz mode. A constant series yields no modes. Modes are sorted by
/// frequency.
pub fn matrix_pencil(samples: &[f64], rate: f64, opts: PencilOptions) -> Result<Vec<Mode>> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::invalid("samples", "need at least 8 samples"));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid("rate", "must be positive"));
    }
    if !(opts.pencil_ratio > 0.0 && opts.pencil_ratio < 1.0) {
        return Err(Error::invalid("pencil_ratio", "must lie in (0, 1)"));
    }
    if !(opts.energy_tol > 0.0 && opts.energy_tol < 1.0) {
        return Err(Error::invalid("energy_tol", "must lie in (0, 1)"));
    }

    let mean = samples.iter().sum::<f64>() / n as f64;
    let y: Vec<f64> = samples.iter().map(|v| v - mean).collect();
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spread = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || spread <= 1e-13 * peak {
        return Ok(Vec::new());
    }

    let l = ((opts.pencil_ratio * n as f64).round() as usize).clamp(1, n - 2);
    let hankel = Mat::from_fn(n - l, l + 1, |i, j| y[i + j]);
    let svd = hankel
        .thin_svd()
        .map_err(|_| Error::Numerical("Hankel SVD did not converge".into()))?;
    crate::clear_vector_state();
    let sv = svd.S().column_vector();
    let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    // the shifted pencil has only L rows
    let order = sv
        .iter()
        .filter(|&&s| s > opts.energy_tol * smax)
        .count()
        .min(l);
    if order == 0 {
        return Ok(Vec::new());
    }
    // leading right singular vectors as columns, (L+1) × p
    let v = svd.V().subcols(0, order);
    let v1 = v.subrows(0, l).to_owned();
    let v2 = v.subrows(1, l).to_owned();
    let a = v1.qr().solve_lstsq(&v2);
    let z = a
        .eigenvalues()
        .map_err(|_| Error::Numerical("pencil eigenvalues did not converge".into()))?;

    // residues on the Vandermonde system
    // growing poles are referenced to the last sample so no column overflows
    let last = (n - 1) as i32;
    let origin: Vec<i32> = z.iter().map(|zi| if zi.norm() > 1.0 { last } else { 0 }).collect();
    let vander = Mat::from_fn(n, order, |k, i| z[i].powi(k as i32 - origin[i]));
    let rhs = Mat::from_fn(n, 1, |k, _| c64::new(y[k], 0.0));
    let vs = vander
        .singular_values()
        .map_err(|_| Error::Numerical("Vandermonde SVD did not converge".into()))?;
    let vmax = vs.iter().fold(0.0f64, |m, &s| m.max(s));
    let vmin = vs.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    let cond = vmax / vmin;
    let ill_conditioned = !cond.is_finite() || cond > VANDERMONDE_COND_LIMIT;
    let residues = vander.qr().solve_lstsq(&rhs);
    crate::clear_vector_state();
    if (0..order).any(|i| !residues[(i, 0)].re.is_finite() || !residues[(i, 0)].im.is_finite()) {
        return Err(Error::Numerical("Vandermonde system is singular".into()));
    }

    let mut modes = Vec::new();
    let mut dc = mean;
    for i in 0..order {
        let zi = z[i];
        let r = residues[(i, 0)] * zi.powi(-origin[i]);
        let s = zi.ln() * rate;
        let real_pole = zi.im.abs() <= 1e-12 * zi.norm().max(1.0);
        if real_pole {
            if zi.re > 0.0 && s.re.abs() * (n as f64 / rate) < 1e-6 {
                // undamped z ≈ 1 belongs with the mean
                dc += r.re;
                continue;
            }
            let frequency = if zi.re > 0.0 { 0.0 } else { rate / 2.0 };
            modes.push(Mode {
                frequency,
                damping: s.re,
                amplitude: r.norm(),
                phase: if r.re < 0.0 { PI } else { 0.0 },
                ill_conditioned,
            });
        } else if zi.im > 0.0 {
            modes.push(Mode {
                frequency: s.im / (2.0 * PI),
                damping: s.re,
                amplitude: 2.0 * r.norm(),
                phase: r.arg(),
                ill_conditioned,
            });
        }
    }
    if dc.abs() > 1e-12 * peak {
        modes.push(Mode {
            frequency: 0.0,
            damping: 0.0,
            amplitude: dc.abs(),
            phase: if dc < 0.0 { PI } else { 0.0 },
            ill_conditioned,
        });
    }
    modes.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    Ok(modes)
}

/// Largest-amplitude mode with frequency strictly inside `(f_min, f_max)`;
/// ties go to the lower frequency.
pub fn dominant_mode(modes: &[Mode], f_min: f64, f_max: f64) -> Result<Mode> {
    modes
        .iter()
        .filter(|m| m.frequency > f_min && m.frequency < f_max)
        .fold(None::<Mode>, |best, m| match best {
            Some(b)
                if b.amplitude > m.amplitude
                    || (b.amplitude == m.amplitude && b.frequency <= m.frequency) =>
            {
                Some(b)
            }
            _ => Some(*m),
        })
        .ok_or(Error::NoModeInBand { f_min, f_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synth(modes: &[Mode], rate: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let t = k as f64 / rate;
                modes.iter().map(|m| m.eval(t)).sum()
            })
            .collect()
    }

    fn mode(frequency: f64, damping: f64, amplitude: f64, phase: f64) -> Mode {
        Mode {
            frequency,
            damping,
            amplitude,
            phase,
            ill_conditioned: false,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_undamped_cosine() {
        let x = synth(&[mode(5.0, 0.0, 1.0, 0.0)], 100.0, 200);
        let modes = matrix_pencil(&x, 100.0, PencilOptions::default()).unwrap();
        assert_eq!(modes.len(), 1, "{modes:?}");
        let m = modes[0];
        assert!((m.frequency - 5.0).abs() < 1e-6);
        assert!(m.damping.abs() < 1e-6);
        assert!((m.amplitude - 1.0).abs() < 1e-6);
        assert!(m.phase.abs() < 1e-6);
    }

    #[test]
    fn two_damped_modes() {
        let truth = [mode(2.0, -0.1, 1.0, 0.3), mode(8.0, -0.5, 0.3, -1.2)];
        let x = synth(&truth, 100.0, 400);
        let modes = matrix_pencil(&x, 100.0, PencilOptions::default()).unwrap();
        let osc: Vec<_> = modes.iter().filter(|m| m.frequency > 0.0).collect();
        assert_eq!(osc.len(), 2, "{modes:?}");
        for (m, t) in osc.iter().zip(&truth) {
            assert!(rel(m.frequency, t.frequency) < 1e-4);
            assert!(rel(m.damping, t.damping) < 1e-4);
            assert!(rel(m.amplitude, t.amplitude) < 1e-4);
            assert!(rel(m.phase, t.phase) < 1e-4);
        }
    }

    #[test]
    fn constant_and_zero_series() {
        let opts = PencilOptions::default();
        assert!(matrix_pencil(&[2.0; 50], 10.0, opts).unwrap().is_empty());
        assert!(matrix_pencil(&[0.0; 50], 10.0, opts).unwrap().is_empty());
        assert!(matrix_pencil(&[1.0; 5], 10.0, opts).is_err());
    }

    #[test]
    fn mean_is_returned_as_dc_mode() {
        let mut x = synth(&[mode(3.0, 0.0, 0.5, 1.0)], 60.0, 120);
        x.iter_mut().for_each(|v| *v += 2.0);
        let modes = matrix_pencil(&x, 60.0, PencilOptions::default()).unwrap();
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].frequency, 0.0);
        assert!((modes[0].amplitude - 2.0).abs() < 1e-9);
        assert!((modes[1].frequency - 3.0).abs() < 1e-9);
    }

    #[test]
    fn dominant_selection() {
        let modes = [mode(2.0, 0.0, 0.1, 0.0), mode(40.0, 0.0, 0.05, 0.0)];
        assert_eq!(dominant_mode(&modes, 0.1, 60.0).unwrap().frequency, 2.0);
        assert_eq!(dominant_mode(&modes[1..], 0.1, 60.0).unwrap().frequency, 40.0);
        let tie = [mode(9.0, 0.0, 0.1, 0.0), mode(3.0, 0.0, 0.1, 0.0)];
        assert_eq!(dominant_mode(&tie, 0.1, 60.0).unwrap().frequency, 3.0);
        assert!(matches!(
            dominant_mode(&modes, 50.0, 60.0),
            Err(Error::NoModeInBand { .. })
        ));
    }

    fn mode_set() -> impl Strategy<Value = Vec<Mode>> {
        (1usize..=3).prop_flat_map(|count| {
            proptest::collection::vec(
                (0.5f64..1.0, -0.3f64..0.0, 0.2f64..2.0, -3.0f64..3.0),
                count,
            )
            .prop_map(|raw| {
                // spread frequencies over distinct bands so modes stay resolvable
                raw.iter()
                    .enumerate()
                    .map(|(i, &(f, d, a, p))| mode(f + 2.5 * i as f64, d, a, p))
                    .collect()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_recovery(truth in mode_set()) {
            // highest frequency below 6 Hz: 50 Hz gives > 8 samples per period,
            // 4 s covers > 2 periods of the slowest mode
            let rate = 50.0;
            let x = synth(&truth, rate, 200);
            let modes = matrix_pencil(&x, rate, PencilOptions::default()).unwrap();
            let osc: Vec<_> = modes.iter().filter(|m| m.frequency > 0.0).collect();
            prop_assert_eq!(osc.len(), truth.len());
            for (m, t) in osc.iter().zip(&truth) {
                prop_assert!(rel(m.frequency, t.frequency) < 1e-6);
                prop_assert!((m.damping - t.damping).abs() < 1e-6 * t.damping.abs().max(1.0));
                prop_assert!(rel(m.amplitude, t.amplitude) < 1e-6);
                prop_assert!(crate::wrap_phase(m.phase - t.phase).abs() < 1e-6);
            }
        }

        #[test]
        fn offset_only_moves_dc(truth in mode_set(), offset in -5.0f64..5.0) {
            let rate = 50.0;
            let x = synth(&truth, rate, 200);
            let shifted: Vec<f64> = x.iter().map(|v| v + offset).collect();
            let a = matrix_pencil(&x, rate, PencilOptions::default()).unwrap();
            let b = matrix_pencil(&shifted, rate, PencilOptions::default()).unwrap();
            let osc = |ms: &[Mode]| ms.iter().filter(|m| m.frequency > 0.0).copied().collect::<Vec<_>>();
            let (a, b) = (osc(&a), osc(&b));
            prop_assert_eq!(a.len(), b.len());
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p.frequency - q.frequency).abs() < 1e-8);
                prop_assert!((p.damping - q.damping).abs() < 1e-8);
                prop_assert!((p.amplitude - q.amplitude).abs() < 1e-8);
            }
        }

        #[test]
        fn amplitude_scaling(truth in mode_set(), c in 0.1f64..10.0) {
            let rate = 50.0;
            let x = synth(&truth, rate, 200);
            let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
            let a = matrix_pencil(&x, rate, PencilOptions::default()).unwrap();
            let b = matrix_pencil(&scaled, rate, PencilOptions::default()).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p.frequency - q.frequency).abs() <= 1e-10 * p.frequency.max(1.0));
                prop_assert!((p.damping - q.damping).abs() <= 1e-10 * p.damping.abs().max(1.0));
                prop_assert!((c * p.amplitude - q.amplitude).abs() <= 1e-10 * q.amplitude.max(1.0));
            }
        }
    }
}

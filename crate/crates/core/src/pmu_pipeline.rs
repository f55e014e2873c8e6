//! DFT phasor measurement chain: sliding N-cycle DFT with window-center
//! timestamps, FIR low-pass filtering of the phasor stream, and decimation
//! to a reporting rate.

use std::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_model::SampledWaveform;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasorPoint {
    /// Center of the DFT window, s.
    pub timestamp: f64,
    pub xr: f64,
    pub xi: f64,
}

impl PhasorPoint {
    pub fn from_complex(timestamp: f64, x: Complex64) -> Self {
        Self {
            timestamp,
            xr: x.re,
            xi: x.im,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.xr, self.xi)
    }

    pub fn amplitude(&self) -> f64 {
        self.xr.hypot(self.xi)
    }

    pub fn phase(&self) -> f64 {
        self.xi.atan2(self.xr)
    }
}

/// Uniformly timestamped phasor estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasorSeries {
    pub rate: f64,
    pub points: Vec<PhasorPoint>,
}

impl PhasorSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.timestamp).collect()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.points.iter().map(PhasorPoint::amplitude).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.points.iter().map(PhasorPoint::phase).collect()
    }

    /// Same values relabelled `dt` later, e.g. to emulate end-of-window
    /// timestamps.
    pub fn shift_timestamps(&self, dt: f64) -> Self {
        Self {
            rate: self.rate,
            points: self
                .points
                .iter()
                .map(|p| PhasorPoint {
                    timestamp: p.timestamp + dt,
                    ..*p
                })
                .collect(),
        }
    }

    /// Checks for strictly increasing timestamps spaced `1/rate` apart.
    pub fn validate(&self) -> Result<()> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::invalid("rate", "must be positive"));
        }
        let step = 1.0 / self.rate;
        for (k, w) in self.points.windows(2).enumerate() {
            let dt = w[1].timestamp - w[0].timestamp;
            if dt <= 0.0 || (dt - step).abs() > 1e-9 {
                return Err(Error::invalid(
                    "timestamps",
                    format!("spacing {dt} at point {} differs from 1/rate = {step}", k + 1),
                ));
            }
        }
        Ok(())
    }

    /// Carrier waveform `Re{X·e^{j2π f1 t}}` evaluated at each timestamp.
    pub fn waveform(&self, f1: f64) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| (p.value() * carrier(f1, p.timestamp)).re)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpfSpec {
    pub cutoff: f64,
    pub taps: usize,
}

impl Default for LpfSpec {
    fn default() -> Self {
        Self {
            cutoff: 60.0,
            taps: 129,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmuConfig {
    pub n_cycles: usize,
    pub f_nominal: f64,
    /// Phasor stream rate before decimation; `None` means one window per
    /// input sample.
    pub internal_rate: Option<f64>,
    pub lpf: LpfSpec,
    pub report_rate: f64,
}

impl Default for PmuConfig {
    fn default() -> Self {
        Self {
            n_cycles: 1,
            f_nominal: 60.0,
            internal_rate: None,
            lpf: LpfSpec::default(),
            report_rate: 30.0,
        }
    }
}

impl PmuConfig {
    pub fn internal_rate_for(&self, fs: f64) -> f64 {
        self.internal_rate.unwrap_or(fs)
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if self.n_cycles == 0 {
            return Err(Error::invalid("n_cycles", "must be at least 1"));
        }
        if !(self.f_nominal.is_finite() && self.f_nominal > 0.0) {
            return Err(Error::invalid("f_nominal", "must be positive"));
        }
        let rate = self.internal_rate_for(fs);
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("internal_rate", "must be positive"));
        }
        if !(self.report_rate.is_finite() && self.report_rate > 0.0) {
            return Err(Error::invalid("report_rate", "must be positive"));
        }
        if self.report_rate > rate * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "report_rate",
                format!("{} exceeds the internal rate {rate}", self.report_rate),
            ));
        }
        Ok(())
    }
}

/// `e^{j2π f t}` with the argument reduced before scaling, which keeps
/// full precision for large `t`.
#[inline]
fn carrier(f: f64, t: f64) -> Complex64 {
    let cycles = f * t;
    Complex64::from_polar(1.0, TWO_PI * (cycles - cycles.round()))
}

/// Four-point Lagrange interpolation at fractional sample index `u`,
/// the stencil clamped to the record.
fn interpolate(samples: &[f64], u: f64) -> f64 {
    let n = samples.len();
    let base = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let x = u - base as f64;
    let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
    let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
    let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
    l0 * samples[base] + l1 * samples[base + 1] + l2 * samples[base + 2] + l3 * samples[base + 3]
}

/// Window length in samples for an `n_cycles` window at `f1`.
pub fn window_samples(fs: f64, n_cycles: usize, f1: f64) -> usize {
    (n_cycles as f64 * fs / f1).round() as usize
}

/// N-cycle DFT phasor `X = (2/K)·Σ v[k]·e^{−j2π f1 t_k}` over the window
/// starting at `window_start`, stamped at the window center.
///
/// When the window does not hold a whole number of samples, or does not
/// start on a sample, `K` points are resampled uniformly over exactly
/// `N/f1` seconds by cubic interpolation.
pub fn dft_phasor(
    w: &SampledWaveform,
    window_start: f64,
    n_cycles: usize,
    f1: f64,
) -> Result<PhasorPoint> {
    if n_cycles == 0 {
        return Err(Error::invalid("n_cycles", "must be at least 1"));
    }
    if !(f1.is_finite() && f1 > 0.0) {
        return Err(Error::invalid("f1", "must be positive"));
    }
    let span = n_cycles as f64 / f1;
    let exact_k = span * w.fs;
    let k = exact_k.round() as usize;
    if k < 4 {
        return Err(Error::invalid(
            "n_cycles",
            format!("window holds {k} samples, need at least 4"),
        ));
    }
    let record_end = w.t0 + w.duration();
    let slack = 1e-9 / w.fs;
    if window_start < w.t0 - slack || window_start + span > record_end + slack {
        return Err(Error::WindowOutOfRange {
            start: window_start,
            end: window_start + span,
            record_start: w.t0,
            record_end,
        });
    }

    let offset = (window_start - w.t0) * w.fs;
    let i0 = offset.round();
    let aligned = (offset - i0).abs() < 1e-6 && (exact_k - k as f64).abs() < 1e-9;
    let mut acc = Complex64::new(0.0, 0.0);
    if aligned {
        let i0 = i0 as usize;
        for j in 0..k.min(w.len() - i0) {
            let idx = i0 + j;
            acc += w.samples[idx] * carrier(f1, w.time(idx)).conj();
        }
    } else {
        let dt = span / k as f64;
        for j in 0..k {
            let t = window_start + j as f64 * dt;
            let v = interpolate(&w.samples, (t - w.t0) * w.fs);
            acc += v * carrier(f1, t).conj();
        }
    }
    Ok(PhasorPoint::from_complex(
        window_start + 0.5 * span,
        acc * (2.0 / k as f64),
    ))
}

/// Sliding-window phasors at `cfg.internal_rate`, windows starting at the
/// first sample.
pub fn phasor_stream(w: &SampledWaveform, cfg: &PmuConfig) -> Result<PhasorSeries> {
    cfg.validate(w.fs)?;
    let rate = cfg.internal_rate_for(w.fs);
    sliding_phasors(w, cfg.n_cycles, cfg.f_nominal, rate)
}

pub(crate) fn sliding_phasors(
    w: &SampledWaveform,
    n_cycles: usize,
    f1: f64,
    rate: f64,
) -> Result<PhasorSeries> {
    let span = n_cycles as f64 / f1;
    let available = w.duration() - span;
    if available < 1.0 / rate - 1e-9 / w.fs {
        return Err(Error::RecordTooShort {
            reason: format!(
                "{:.6} s record cannot hold two {n_cycles}-cycle windows {:.6} s apart",
                w.duration(),
                1.0 / rate
            ),
        });
    }
    let count = (available * rate + 1e-6).floor() as usize + 1;
    let points = (0..count)
        .map(|k| dft_phasor(w, w.t0 + k as f64 / rate, n_cycles, f1))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhasorSeries { rate, points })
}

/// Hamming-windowed sinc low-pass taps, normalized to unit DC gain.
pub fn lpf_taps(cutoff: f64, rate: f64, taps: usize) -> Vec<f64> {
    let fc = cutoff / rate;
    let mid = (taps as f64 - 1.0) / 2.0;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let x = n as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * fc
            } else {
                (TWO_PI * fc * x).sin() / (PI * x)
            };
            let window = if taps > 1 {
                0.54 - 0.46 * (TWO_PI * n as f64 / (taps as f64 - 1.0)).cos()
            } else {
                1.0
            };
            sinc * window
        })
        .collect();
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= sum);
    h
}

/// Linear-phase FIR on the real and imaginary parts. Only fully
/// overlapped outputs are kept, each stamped with the timestamp of the
/// input at the filter center, so the output is time-aligned and shorter
/// by `taps − 1` points.
pub fn apply_lpf(s: &PhasorSeries, cutoff: f64, taps: usize) -> Result<PhasorSeries> {
    if taps.is_multiple_of(2) {
        return Err(Error::invalid("taps", "must be a positive odd integer"));
    }
    if taps >= s.len() {
        return Err(Error::invalid(
            "taps",
            format!("{taps} taps need a series longer than {} points", s.len()),
        ));
    }
    if !(cutoff.is_finite() && cutoff > 0.0 && cutoff < s.rate / 2.0) {
        return Err(Error::invalid(
            "cutoff",
            format!("must lie in (0, {}) Hz", s.rate / 2.0),
        ));
    }
    let h = lpf_taps(cutoff, s.rate, taps);
    let delay = (taps - 1) / 2;
    let points = (0..=s.len() - taps)
        .map(|j| {
            let window = &s.points[j..j + taps];
            let (xr, xi) = window
                .iter()
                .zip(&h)
                .fold((0.0, 0.0), |(r, i), (p, c)| (r + c * p.xr, i + c * p.xi));
            PhasorPoint {
                timestamp: s.points[j + delay].timestamp,
                xr,
                xi,
            }
        })
        .collect();
    Ok(PhasorSeries {
        rate: s.rate,
        points,
    })
}

/// Decimates to `fps` by picking, for each point of the uniform grid
/// `t_first + k/fps`, the nearest input point. The picked values carry the
/// grid timestamps so the output spacing is exactly `1/fps`.
pub fn report(s: &PhasorSeries, fps: f64) -> Result<PhasorSeries> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::invalid("fps", "must be positive"));
    }
    if fps > s.rate * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "fps",
            format!("{fps} exceeds the series rate {}", s.rate),
        ));
    }
    if (fps - s.rate).abs() <= 1e-12 * s.rate || s.is_empty() {
        return Ok(s.clone());
    }
    let t_first = s.points[0].timestamp;
    let span = s.points[s.len() - 1].timestamp - t_first;
    let count = (span * fps + 1e-9).floor() as usize + 1;
    let points = (0..count)
        .map(|k| {
            let t = t_first + k as f64 / fps;
            let idx = (((t - t_first) * s.rate).round() as usize).min(s.len() - 1);
            PhasorPoint {
                timestamp: t,
                ..s.points[idx]
            }
        })
        .collect();
    Ok(PhasorSeries { rate: fps, points })
}

/// Apparent frequency of an `f_os` oscillation sampled at `fps`.
pub fn alias_frequency(f_os: f64, fps: f64) -> f64 {
    (f_os - fps * (f_os / fps).round()).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmuOutput {
    pub raw: PhasorSeries,
    pub filtered: PhasorSeries,
    pub reported: PhasorSeries,
}

pub fn simulate_pmu(w: &SampledWaveform, cfg: &PmuConfig) -> Result<PmuOutput> {
    let raw = phasor_stream(w, cfg)?;
    let filtered = apply_lpf(&raw, cfg.lpf.cutoff, cfg.lpf.taps)?;
    let reported = report(&filtered, cfg.report_rate)?;
    Ok(PmuOutput {
        raw,
        filtered,
        reported,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub frequency: f64,
    pub magnitude: f64,
}

/// Single-sided amplitude spectrum of the whole record, scaled so that a
/// sinusoid of amplitude `c` on an exact bin reads `c` (and a constant `c`
/// reads `c` at 0 Hz).
pub fn spectrum(values: &[f64], rate: f64) -> Result<Vec<SpectrumLine>> {
    let m = values.len();
    if m < 8 {
        return Err(Error::invalid("values", "need at least 8 samples"));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid("rate", "must be positive"));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mf = m as f64;
    Ok((0..=m / 2)
        .map(|k| {
            let edge = k == 0 || (m.is_multiple_of(2) && k == m / 2);
            let scale = if edge { 1.0 } else { 2.0 };
            SpectrumLine {
                frequency: k as f64 * rate / mf,
                magnitude: scale * buf[k].norm() / mf,
            }
        })
        .collect())
}

/// Largest non-DC line.
pub fn dominant_peak(lines: &[SpectrumLine]) -> Option<SpectrumLine> {
    lines
        .iter()
        .skip(1)
        .copied()
        .max_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub frequency: f64,
    pub amplitude: f64,
    /// Phase of `amplitude·cos(2π f t + phase)`.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneFit {
    pub dc: f64,
    /// One entry per distinct requested frequency, in request order.
    pub tones: Vec<Tone>,
}

impl ToneFit {
    pub fn tone(&self, frequency: f64) -> Option<&Tone> {
        self.tones
            .iter()
            .find(|t| (t.frequency - frequency).abs() <= 1e-9 * frequency.abs().max(1.0))
    }
}

/// Linear least-squares fit of a constant plus sinusoids at known
/// frequencies. Duplicate and zero frequencies are dropped so the design
/// matrix keeps full column rank.
pub fn fit_tones(times: &[f64], values: &[f64], freqs: &[f64]) -> Result<ToneFit> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch(format!(
            "{} times for {} values",
            times.len(),
            values.len()
        )));
    }
    let mut distinct: Vec<f64> = Vec::new();
    for &f in freqs {
        let f = f.abs();
        let dup = f <= 1e-9 || distinct.iter().any(|g| (g - f).abs() <= 1e-9 * f.max(1.0));
        if !dup {
            distinct.push(f);
        }
    }
    let cols = 1 + 2 * distinct.len();
    if values.len() < cols {
        return Err(Error::invalid("values", "fewer samples than fit terms"));
    }
    let t_ref = times.first().copied().unwrap_or(0.0);
    let a = Mat::from_fn(values.len(), cols, |r, c| {
        if c == 0 {
            return 1.0;
        }
        let f = distinct[(c - 1) / 2];
        let arg = TWO_PI * f * (times[r] - t_ref);
        if c % 2 == 1 {
            arg.cos()
        } else {
            arg.sin()
        }
    });
    let b = Mat::from_fn(values.len(), 1, |r, _| values[r]);
    let x = a.col_piv_qr().solve_lstsq(&b);
    crate::clear_vector_state();
    let x: Vec<f64> = (0..cols).map(|j| x[(j, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("tone fit is singular".into()));
    }
    let tones = distinct
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let c = x[1 + 2 * i];
            let s = x[2 + 2 * i];
            // shift the phase back to absolute time
            let phase = (-s).atan2(c) - TWO_PI * f * t_ref;
            Tone {
                frequency: f,
                amplitude: c.hypot(s),
                phase: crate::wrap_phase(phase),
            }
        })
        .collect();
    Ok(ToneFit { dc: x[0], tones })
}

/// Pairs each phasor with the input sample at its timestamp and returns
/// `(measured, reconstructed)` waveforms for error metrics. Timestamps
/// must fall on samples.
pub fn reconstruct_from_phasors(
    w: &SampledWaveform,
    s: &PhasorSeries,
    f1: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut y = Vec::with_capacity(s.len());
    let mut y_hat = Vec::with_capacity(s.len());
    for p in &s.points {
        let u = (p.timestamp - w.t0) * w.fs;
        let idx = u.round();
        if (u - idx).abs() > 1e-6 || idx < 0.0 || idx as usize >= w.len() {
            return Err(Error::invalid(
                "timestamps",
                format!("phasor at {} s does not fall on a sample", p.timestamp),
            ));
        }
        y.push(w.samples[idx as usize]);
        y_hat.push((p.value() * carrier(f1, p.timestamp)).re);
    }
    Ok((y, y_hat))
}

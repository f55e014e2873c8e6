//! Closed-form DFT measurement gain for amplitude-modulated waveforms.
//!
//! Two gain functions are provided:
//!
//! - [`f_gain`]: the classical closed form
//!   `(2/(πN))·sin(π f_os N/f1)·(2f1³ − f_os² f1)/(f_os (4f1² − f_os²))`,
//!   which reproduces the usual applicability tables.
//! - [`f_gain_exact`]: `sinc(π f_os N/f1)`, the exact first-order gain of
//!   an N-cycle DFT on an AM envelope. It is what a simulated PMU actually
//!   measures. The two differ by the factor
//!   `2(2f1² − f_os²)/(4f1² − f_os²)`, which is within 1% of unity below
//!   about 10 Hz for a 60 Hz carrier.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::signal_model::AmplitudeModSignal;

const TWO_PI: f64 = 2.0 * PI;

/// `sin(π z)` with exact zeros at integers.
pub fn sin_pi(z: f64) -> f64 {
    let r = z - 2.0 * (z / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

/// `sin(π z)/(π z)`, 1 at `z = 0`.
pub fn sinc_pi(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        sin_pi(z) / (PI * z)
    }
}

/// `sin(π f_os N/f1) / (π f_os (4f1² − f_os²))`, evaluated without the
/// removable singularities at `f_os = 0` and `f_os = 2f1`.
fn kernel(f1: f64, f_os: f64, n_cycles: usize) -> f64 {
    let n = n_cycles as f64;
    if (f_os - 2.0 * f1).abs() < 0.5 * f1 {
        let w = n * (f_os - 2.0 * f1) / f1;
        -(n / f1) * sinc_pi(w) / (f_os * (2.0 * f1 + f_os))
    } else {
        (n / f1) * sinc_pi(f_os * n / f1) / (4.0 * f1 * f1 - f_os * f_os)
    }
}

/// Signed measurement gain in its classical closed form. Returns the
/// limits 1 at `f_os = 0` and 1/2 at `f_os = 2·f1`.
pub fn f_gain(f1: f64, f_os: f64, n_cycles: usize) -> f64 {
    let n = n_cycles as f64;
    (2.0 / n) * f1 * (2.0 * f1 * f1 - f_os * f_os) * kernel(f1, f_os, n_cycles)
}

/// Exact first-order gain of the N-cycle DFT, `sinc(π f_os N/f1)`.
pub fn f_gain_exact(f1: f64, f_os: f64, n_cycles: usize) -> f64 {
    sinc_pi(f_os * n_cycles as f64 / f1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GainModel {
    /// [`f_gain`]
    #[default]
    ClosedForm,
    /// [`f_gain_exact`]
    Exact,
}

impl GainModel {
    pub fn gain(self, f1: f64, f_os: f64, n_cycles: usize) -> f64 {
        match self {
            GainModel::ClosedForm => f_gain(f1, f_os, n_cycles),
            GainModel::Exact => f_gain_exact(f1, f_os, n_cycles),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    /// Slow envelope only: `A·[1 + m·F_gain·cos(2π f_os τ + π f_os N/f1 + φ2)]`.
    Envelope,
    /// Full DFT amplitude including the fast ripple terms.
    Exact,
}

/// DFT amplitude of an AM signal over the window `[τ, τ + N/f1]`.
pub fn predicted_amplitude(
    p: &AmplitudeModSignal,
    n_cycles: usize,
    tau: f64,
    mode: Prediction,
) -> f64 {
    let (f1, fo, m, a) = (p.f1, p.f_os, p.depth, p.amplitude);
    let n = n_cycles as f64;
    let psi = p.osc_phase + TWO_PI * fo * tau + PI * fo * n / f1;
    match mode {
        Prediction::Envelope => a * (1.0 + m * f_gain(f1, fo, n_cycles) * psi.cos()),
        Prediction::Exact => {
            if fo == 0.0 {
                return a * (1.0 + m * p.osc_phase.cos());
            }
            let phi1 = p.phase;
            let q = kernel(f1, fo, n_cycles);
            let w = TWO_PI * f1 * tau;
            let (sp, cp) = psi.sin_cos();
            let c = q
                * (fo * f1 * sp * (2.0 * w + phi1).sin()
                    + fo * fo * (w + phi1).cos() * w.cos() * cp
                    - 2.0 * f1 * f1 * phi1.cos() * cp);
            let d = q
                * (fo * f1 * sp * (2.0 * w + phi1).cos()
                    - fo * fo * (w + phi1).cos() * w.sin() * cp
                    - 2.0 * f1 * f1 * phi1.sin() * cp);
            let k = 2.0 * f1 * m / n;
            let xr = phi1.cos() - k * c;
            let xi = phi1.sin() - k * d;
            a * xr.hypot(xi)
        }
    }
}

/// Zeros of `sin(π f_os N/f1)` up to `f_max`, i.e. `k·f1/N`, skipping
/// `2·f1` where the closed form's rational factor cancels the zero.
pub fn flip_frequencies(f1: f64, n_cycles: usize, f_max: f64) -> Vec<f64> {
    let step = f1 / n_cycles as f64;
    (1..)
        .map(|k| k as f64 * step)
        .take_while(|&f| f <= f_max * (1.0 + 1e-12))
        .filter(|&f| (f - 2.0 * f1).abs() > 1e-9 * f1)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainCell {
    pub n_cycles: usize,
    pub f_os: f64,
    /// `100·F_gain`, signed.
    pub percent: f64,
}

impl GainCell {
    /// Whole-percent rendering, sign kept.
    pub fn rounded(&self) -> f64 {
        self.percent.round()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicabilityTable {
    pub f1: f64,
    pub n_list: Vec<usize>,
    pub f_os_list: Vec<f64>,
    /// One row per `f_os`, one cell per `N`.
    pub rows: Vec<Vec<GainCell>>,
}

pub fn applicability_table(f1: f64, n_list: &[usize], f_os_list: &[f64]) -> ApplicabilityTable {
    let rows = f_os_list
        .iter()
        .map(|&f_os| {
            n_list
                .iter()
                .map(|&n| GainCell {
                    n_cycles: n,
                    f_os,
                    percent: 100.0 * f_gain(f1, f_os, n),
                })
                .collect()
        })
        .collect();
    ApplicabilityTable {
        f1,
        n_list: n_list.to_vec(),
        f_os_list: f_os_list.to_vec(),
        rows,
    }
}

/// Where a phasor timestamp sits relative to its DFT window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StampPosition {
    Center,
    WindowEnd,
    WindowStart,
    /// Offset from the window center, s (positive = later).
    Offset(f64),
}

impl StampPosition {
    pub fn offset_from_center(self, n_cycles: usize, f1: f64) -> f64 {
        let half = n_cycles as f64 / (2.0 * f1);
        match self {
            StampPosition::Center => 0.0,
            StampPosition::WindowEnd => half,
            StampPosition::WindowStart => -half,
            StampPosition::Offset(dt) => dt,
        }
    }
}

/// Phase error of the measured oscillation (rad) caused by stamping away
/// from the window center: `2π·f_os·offset`. End-of-window stamping gives
/// `π·f_os·N/f1`.
pub fn timestamp_phase_error(f_os: f64, n_cycles: usize, f1: f64, stamp: StampPosition) -> f64 {
    TWO_PI * f_os * stamp.offset_from_center(n_cycles, f1)
}

/// Longest window (in cycles, up to `n_search`) whose gain stays within
/// `tolerance` of 1 at `f_os`, or `None` if even N = 1 does not.
pub fn max_n_cycles(
    f1: f64,
    f_os: f64,
    tolerance: f64,
    model: GainModel,
    n_search: usize,
) -> Option<usize> {
    (1..=n_search)
        .take_while(|&n| (1.0 - model.gain(f1, f_os, n)).abs() <= tolerance)
        .last()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    pub f1: f64,
    pub n_cycles: usize,
    pub model: GainModel,
    /// `(f_os, gain)` pairs.
    pub points: Vec<(f64, f64)>,
}

pub fn gain_profile(f1: f64, n_cycles: usize, f_os: &[f64], model: GainModel) -> GainProfile {
    GainProfile {
        f1,
        n_cycles,
        model,
        points: f_os
            .iter()
            .map(|&f| (f, model.gain(f1, f, n_cycles)))
            .collect(),
    }
}

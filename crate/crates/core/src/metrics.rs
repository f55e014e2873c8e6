//! Waveform error metrics and reconstruction.
//!
//! `E_PoW` is the RMS residual as a percentage of a reference amplitude.
//! The integral form averages over `T2 − T1`, which is taken as `M·ts` for
//! `M` samples, so it coincides exactly with the discrete form
//! `100·√(E_LS/M)/a`.
//!
//! For two pure sinusoids `E_PoW` equals the total vector error divided by
//! √2, since it compares RMS error against peak amplitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_model::{synthesize_general, GeneralOscSignal, SampledWaveform};

fn check_lengths(y: &[f64], y_hat: &[f64]) -> Result<()> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch(format!(
            "{} measured vs {} reconstructed samples",
            y.len(),
            y_hat.len()
        )));
    }
    Ok(())
}

fn check_reference(a_ref: f64) -> Result<()> {
    if a_ref.is_finite() && a_ref > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("a_ref", "must be positive"))
    }
}

/// Sum of squared differences.
pub fn e_ls(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_lengths(y, y_hat)?;
    Ok(y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `(100/a_ref)·√(E_LS·ts/(T2 − T1))` with `T2 − T1 = M·ts`.
pub fn e_pow(y: &[f64], y_hat: &[f64], a_ref: f64, ts: f64) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::invalid("y", "need at least 2 samples"));
    }
    if !(ts.is_finite() && ts > 0.0) {
        return Err(Error::invalid("ts", "must be positive"));
    }
    check_reference(a_ref)?;
    let ls = e_ls(y, y_hat)?;
    let span = y.len() as f64 * ts;
    Ok(100.0 * (ls * ts / span).sqrt() / a_ref)
}

/// `100·√(E_LS/M)/a_ref`.
pub fn e_pow_from_ls(e_ls: f64, m: usize, a_ref: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    if !(e_ls.is_finite() && e_ls >= 0.0) {
        return Err(Error::invalid("e_ls", "must be finite and non-negative"));
    }
    check_reference(a_ref)?;
    Ok(100.0 * (e_ls / m as f64).sqrt() / a_ref)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e_ls: f64,
    pub e_pow_pct: f64,
    pub m_samples: usize,
    pub t1: f64,
    /// `t1 + M·ts`
    pub t2: f64,
    pub ts: f64,
    pub a_ref: f64,
}

/// Compares a record against a reconstruction sampled on the same grid.
pub fn compare(y: &SampledWaveform, y_hat: &[f64], a_ref: f64) -> Result<ErrorReport> {
    let e = e_ls(&y.samples, y_hat)?;
    let pct = e_pow(&y.samples, y_hat, a_ref, y.ts())?;
    Ok(ErrorReport {
        e_ls: e,
        e_pow_pct: pct,
        m_samples: y.len(),
        t1: y.t0,
        t2: y.t0 + y.duration(),
        ts: y.ts(),
        a_ref,
    })
}

pub fn reconstruct(
    p: &GeneralOscSignal,
    fs: f64,
    duration: f64,
    t0: f64,
) -> Result<SampledWaveform> {
    synthesize_general(p, fs, duration, t0)
}

/// Evaluates `p` on the sample grid of `w`.
pub fn reconstruct_like(p: &GeneralOscSignal, w: &SampledWaveform) -> Vec<f64> {
    (0..w.len()).map(|k| p.eval(w.time(k))).collect()
}

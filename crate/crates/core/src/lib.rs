//! Waveform and phasor analysis for oscillation-modulated power-system
//! signals.
//!
//! The crate covers three concerns:
//!
//! - simulating the measurement chain of a DFT-based PMU (sliding N-cycle
//!   DFT, anti-aliasing FIR, decimation to a reporting rate) in
//!   [`pmu_pipeline`];
//! - quantifying how that chain distorts amplitude oscillations through the
//!   closed-form measurement gain in [`gain_analysis`];
//! - recovering the full parameter set of a waveform carrying amplitude
//!   and angle modulation with asymmetric sub-/super-synchronous sidebands
//!   in [`estimator`], built on the Matrix Pencil routine in [`modal`] and
//!   the error metrics in [`metrics`].
//!
//! Signal parameterizations, synthesis and the phasor-representability
//! test live in [`signal_model`]. All amplitudes are peak values.

pub mod error;
pub mod estimator;
pub mod gain_analysis;
pub mod lsq;
pub mod metrics;
pub mod modal;
pub mod pmu_pipeline;
pub mod presets;
pub mod signal_model;

pub use error::{Error, Result};
pub use estimator::{estimate, EstimationResult, EstimatorConfig, Refinement};
pub use pmu_pipeline::{PhasorPoint, PhasorSeries, PmuConfig};
pub use signal_model::{
    AmplitudeModSignal, GeneralOscSignal, RectCoefficients, SampledWaveform, ThreeComponentSignal,
};

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(angle: f64) -> f64 {
    use std::f64::consts::PI;
    let mut w = angle.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// faer's AVX kernels can return with the upper vector registers dirty,
/// which makes the SSE code that follows (our trig-heavy model loops)
/// pay a transition penalty on every instruction. Clearing the state
/// after each dense factorization restores full speed.
#[inline]
pub(crate) fn clear_vector_state() {
    #[cfg(target_arch = "x86_64")]
    {
        #[target_feature(enable = "avx")]
        unsafe fn zeroupper() {
            std::arch::x86_64::_mm256_zeroupper();
        }
        if std::arch::is_x86_feature_detected!("avx") {
            // SAFETY: guarded by the runtime feature check above.
            unsafe { zeroupper() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::wrap_phase;
    use std::f64::consts::PI;

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_phase(0.25) - 0.25).abs() < 1e-15);
        assert!((wrap_phase(-7.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }
}

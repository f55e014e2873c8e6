//! Reference scenarios: signal parameters and recording settings used by
//! the reproduction commands and the test suites.

use std::f64::consts::PI;

use crate::pmu_pipeline::PmuConfig;
use crate::signal_model::{AmplitudeModSignal, GeneralOscSignal, ThreeComponentSignal};

/// A signal together with how it is recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<P> {
    pub signal: P,
    pub fs: f64,
    pub duration: f64,
}

/// 2-Hz, 5% amplitude oscillation on a 60-Hz carrier, recorded at 2 kHz.
pub fn slow_am() -> Scenario<AmplitudeModSignal> {
    Scenario {
        signal: AmplitudeModSignal {
            f1: 60.0,
            amplitude: 2.0,
            phase: PI / 4.0,
            depth: 0.05,
            f_os: 2.0,
            osc_phase: PI / 5.0,
        },
        fs: 2000.0,
        duration: 2.0,
    }
}

/// Same as [`slow_am`] at 40 Hz, which a 30-fps PMU reports as 10 Hz.
pub fn fast_am() -> Scenario<AmplitudeModSignal> {
    let mut s = slow_am();
    s.signal.f_os = 40.0;
    s.duration = 2.5;
    s
}

/// One-cycle DFT at the input rate with the default filter and 30 fps.
pub fn one_cycle_pmu() -> PmuConfig {
    PmuConfig::default()
}

/// 5-Hz, 20% amplitude oscillation whose spectrum has lines at 55, 60 and
/// 65 Hz.
pub fn sideband_am() -> Scenario<AmplitudeModSignal> {
    Scenario {
        signal: AmplitudeModSignal {
            f1: 60.0,
            amplitude: 2.0,
            phase: PI / 4.0,
            depth: 0.2,
            f_os: 5.0,
            osc_phase: PI / 5.0,
        },
        fs: 2000.0,
        duration: 1.0,
    }
}

/// 40-Hz angle and asymmetric-sideband modulation, sampled at 7.68 kHz.
pub fn mixed_modulation() -> Scenario<GeneralOscSignal> {
    Scenario {
        signal: GeneralOscSignal {
            amplitude: 2.0,
            f1: 60.0,
            phase: PI / 3.0,
            f_os: 40.0,
            osc_phase: PI / 6.0,
            angle_depth: 0.1,
            sub_amplitude: 0.25,
            sub_phase: 3.0 * PI / 10.0,
            sup_amplitude: 0.25,
            sup_phase: 11.0 * PI / 30.0,
        },
        fs: 7680.0,
        duration: 2.0,
    }
}

/// Symmetric 2.8-Hz sidebands meeting the phase condition, so the signal
/// is an envelope times a carrier.
pub fn symmetric_sidebands() -> Scenario<ThreeComponentSignal> {
    Scenario {
        signal: ThreeComponentSignal {
            amplitude: 2.0,
            f1: 60.0,
            phase: PI / 3.0,
            f_os: 2.8,
            sub_amplitude: 0.2,
            sub_phase: 29.0 * PI / 60.0,
            sup_amplitude: 0.2,
            sup_phase: 11.0 * PI / 60.0,
        },
        fs: 2000.0,
        duration: 1.0,
    }
}

/// [`symmetric_sidebands`] with the super-synchronous side halved.
pub fn asymmetric_sidebands() -> Scenario<ThreeComponentSignal> {
    let mut s = symmetric_sidebands();
    s.signal.sup_amplitude = 0.1;
    s
}

/// Three single-oscillation cases at 3, 8.4 and 37.25 Hz on a 1-p.u.
/// carrier, recorded at 7.68 kHz. The last one aliases to 7.25 Hz at
/// 30 fps.
pub fn oscillation_cases() -> [Scenario<GeneralOscSignal>; 3] {
    let case = |f_os: f64, h: f64, sub: f64, sup: f64| Scenario {
        signal: GeneralOscSignal {
            amplitude: 1.0,
            f1: 60.0,
            phase: 0.2,
            f_os,
            osc_phase: 0.9,
            angle_depth: h,
            sub_amplitude: sub,
            sub_phase: 0.5,
            sup_amplitude: sup,
            sup_phase: -0.4,
        },
        fs: 7680.0,
        duration: 2.0,
    };
    [
        case(3.0, 0.02, 0.05, 0.04),
        case(8.4, 0.01, 0.06, 0.03),
        case(37.25, 0.005, 0.02, 0.01),
    ]
}

/// Lowest flipping frequency (Hz) for one- to six-cycle windows at 60 Hz.
pub const LOWEST_FLIP_HZ: [f64; 6] = [60.0, 30.0, 20.0, 15.0, 12.0, 10.0];

/// Oscillation frequencies (Hz) of the reference applicability table.
pub const APPLICABILITY_F_OS: [f64; 8] = [0.2, 2.5, 3.0, 3.7, 5.0, 7.4, 14.0, 20.0];

/// Published gain percentages for N = 1..6 at each of
/// [`APPLICABILITY_F_OS`]; `None` marks cells left blank because the
/// gain is negative or the frequency is past the first flip.
pub const APPLICABILITY_PERCENT: [[Option<f64>; 6]; 8] = [
    [Some(100.0), Some(99.99), Some(99.98), Some(99.97), Some(99.95), Some(99.93)],
    [Some(99.7), Some(99.0), Some(97.0), Some(96.0), Some(93.0), Some(90.0)],
    [Some(99.5), Some(98.0), Some(96.0), Some(93.0), Some(90.0), Some(86.0)],
    [Some(99.3), Some(97.0), Some(94.0), Some(90.0), Some(85.0), Some(79.0)],
    [Some(99.0), Some(95.0), Some(90.0), Some(83.0), Some(74.0), Some(64.0)],
    [Some(97.0), Some(90.0), Some(79.0), Some(64.0), Some(48.0), Some(31.0)],
    [Some(90.0), Some(67.0), Some(36.0), Some(7.0), None, None],
    [Some(80.0), Some(40.0), Some(0.0), None, None, None],
];

//! Structured estimation report.

use oscphasor::{EstimationResult, EstimatorConfig, GeneralOscSignal, Refinement, SampledWaveform};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where a report came from. Contains no wall-clock data so reruns on the
/// same input are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input: String,
    pub input_sha256: String,
    /// Hash of the estimator settings as serialized JSON.
    pub config_sha256: String,
}

/// The ten model parameters under their conventional short names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub a: f64,
    pub f1: f64,
    pub phi1: f64,
    pub f_os: f64,
    pub phi_os: f64,
    pub h: f64,
    pub b1: f64,
    pub phi_sub: f64,
    pub b2: f64,
    pub phi_sup: f64,
}

impl From<&GeneralOscSignal> for Parameters {
    fn from(p: &GeneralOscSignal) -> Self {
        Self {
            a: p.amplitude,
            f1: p.f1,
            phi1: p.phase,
            f_os: p.f_os,
            phi_os: p.osc_phase,
            h: p.angle_depth,
            b1: p.sub_amplitude,
            phi_sub: p.sub_phase,
            b2: p.sup_amplitude,
            phi_sup: p.sup_phase,
        }
    }
}

impl From<Parameters> for GeneralOscSignal {
    fn from(p: Parameters) -> Self {
        GeneralOscSignal {
            amplitude: p.a,
            f1: p.f1,
            phase: p.phi1,
            f_os: p.f_os,
            osc_phase: p.phi_os,
            angle_depth: p.h,
            sub_amplitude: p.b1,
            sub_phase: p.phi_sub,
            sup_amplitude: p.b2,
            sup_phase: p.phi_sup,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub f_nominal: f64,
    pub samples: usize,
    pub fs: f64,
    pub refinement: Refinement,
    pub parameters: Parameters,
    pub f1_est: f64,
    pub f_os_est: f64,
    pub oscillation_detected: bool,
    pub e_ls: f64,
    pub e_pow_pct: f64,
    pub e_ls_step5: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RunReport {
    pub fn new(
        input: &str,
        input_bytes: &[u8],
        w: &SampledWaveform,
        f_nominal: f64,
        cfg: &EstimatorConfig,
        r: &EstimationResult,
    ) -> Self {
        let cfg_json = serde_json::to_vec(cfg).expect("config serializes");
        Self {
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                input: input.into(),
                input_sha256: sha256_hex(input_bytes),
                config_sha256: sha256_hex(&cfg_json),
            },
            f_nominal,
            samples: w.len(),
            fs: w.fs,
            refinement: cfg.refinement,
            parameters: (&r.params).into(),
            f1_est: r.f1_est,
            f_os_est: r.f_os_est,
            oscillation_detected: r.oscillation_detected,
            e_ls: r.e_ls,
            e_pow_pct: r.e_pow_pct,
            e_ls_step5: r.e_ls_step5,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let report = RunReport {
            provenance: Provenance {
                tool: "t".into(),
                version: "0".into(),
                input: "x.csv".into(),
                input_sha256: sha256_hex(b"x"),
                config_sha256: sha256_hex(b"y"),
            },
            f_nominal: 60.0,
            samples: 15360,
            fs: 7680.0,
            refinement: Refinement::Full,
            parameters: Parameters {
                a: 2.0000000000000004,
                f1: 60.00000000001,
                phi1: std::f64::consts::FRAC_PI_3,
                f_os: 40.0,
                phi_os: 0.1 + 0.2,
                h: 1e-300,
                b1: 0.25,
                phi_sub: -3.0,
                b2: 0.24999999999999997,
                phi_sup: 1.0 / 3.0,
            },
            f1_est: 59.999_999_7,
            f_os_est: 40.000_1,
            oscillation_detected: true,
            e_ls: 1.234_567_890_123_456_7e-17,
            e_pow_pct: 4.5e-12,
            e_ls_step5: 0.0123,
            iterations: 7,
            converged: true,
        };
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}

//! Signal and PMU configuration files.
//!
//! A signal config is a flat JSON object with a `model` tag
//! (`am`, `three_component` or `general`), the model's parameters, and
//! `fs`, `duration` and optionally `t0`. Phases may be numbers in radians
//! or strings such as `"pi/3"`, `"-3pi/20"` or `"11*pi/30"`.

use std::f64::consts::PI;

use oscphasor::pmu_pipeline::{LpfSpec, PmuConfig};
use oscphasor::signal_model::{
    synthesize_am, synthesize_general, synthesize_three, AmplitudeModSignal, GeneralOscSignal,
    SampledWaveform, ThreeComponentSignal,
};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Am(AmplitudeModSignal),
    ThreeComponent(ThreeComponentSignal),
    General(GeneralOscSignal),
}

impl Signal {
    /// True phasor amplitude at `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        match self {
            Signal::Am(p) => p.envelope(t),
            Signal::ThreeComponent(p) => p.to_general().true_phasor(t).norm(),
            Signal::General(p) => p.true_phasor(t).norm(),
        }
    }

    /// Three-component form, unavailable when angle modulation is present.
    pub fn three_component(&self) -> Option<ThreeComponentSignal> {
        match self {
            Signal::Am(p) => Some(p.to_three_component()),
            Signal::ThreeComponent(p) => Some(*p),
            Signal::General(p) if p.angle_depth == 0.0 => Some(p.to_three_component()),
            Signal::General(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    pub signal: Signal,
    pub fs: f64,
    pub duration: f64,
    pub t0: f64,
}

impl SignalConfig {
    pub fn synthesize(&self) -> CliResult<SampledWaveform> {
        let w = match &self.signal {
            Signal::Am(p) => synthesize_am(p, self.fs, self.duration, self.t0),
            Signal::ThreeComponent(p) => synthesize_three(p, self.fs, self.duration, self.t0),
            Signal::General(p) => synthesize_general(p, self.fs, self.duration, self.t0),
        };
        Ok(w?)
    }
}

const COMMON_KEYS: [&str; 4] = ["model", "fs", "duration", "t0"];
const AM_KEYS: [&str; 6] = ["f1", "A", "phi1", "m", "f_os", "phi2"];
const THREE_KEYS: [&str; 8] = ["f1", "a", "phi1", "f_os", "b1", "phi_sub", "b2", "phi_sup"];
const GENERAL_KEYS: [&str; 10] = [
    "f1", "a", "phi1", "f_os", "phi_os", "h", "b1", "phi_sub", "b2", "phi_sup",
];

/// Parses `"pi/3"`, `"-3pi/20"`, `"11*pi/30"`, `"2.5"` and the like.
pub fn parse_phase(text: &str) -> Option<f64> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
        .replace('π', "pi");
    let Some(at) = s.find("pi") else {
        return s.parse().ok();
    };
    let (head, tail) = (&s[..at], &s[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().ok()?,
    };
    let den = match tail {
        "" => 1.0,
        t => t.strip_prefix('/')?.parse::<f64>().ok()?,
    };
    (den != 0.0).then(|| coef * PI / den)
}

struct Fields<'a> {
    obj: &'a Map<String, Value>,
}

impl Fields<'_> {
    fn number(&self, key: &str) -> CliResult<f64> {
        match self.obj.get(key) {
            Some(Value::Number(n)) => n
                .as_f64()
                .ok_or_else(|| CliError::input(format!("key `{key}`: not a finite number"))),
            Some(other) => Err(CliError::input(format!("key `{key}`: expected a number, got {other}"))),
            None => Err(CliError::input(format!("missing key `{key}`"))),
        }
    }

    fn phase(&self, key: &str) -> CliResult<f64> {
        match self.obj.get(key) {
            Some(Value::String(s)) => parse_phase(s)
                .ok_or_else(|| CliError::input(format!("key `{key}`: cannot read phase {s:?}"))),
            Some(_) => self.number(key),
            None => Err(CliError::input(format!("missing key `{key}`"))),
        }
    }
}

pub fn parse_signal_config(text: &str) -> CliResult<SignalConfig> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::input("config must be a JSON object"))?;
    let model = match obj.get("model") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(CliError::input("key `model`: expected a string")),
        None => return Err(CliError::input("missing key `model`")),
    };
    let keys: &[&str] = match model {
        "am" => &AM_KEYS,
        "three_component" => &THREE_KEYS,
        "general" => &GENERAL_KEYS,
        other => {
            return Err(CliError::input(format!(
                "unknown model {other:?} (expected am, three_component or general)"
            )))
        }
    };
    for key in obj.keys() {
        if !COMMON_KEYS.contains(&key.as_str()) && !keys.contains(&key.as_str()) {
            return Err(CliError::input(format!(
                "unknown key `{key}` for model `{model}`; allowed: {}",
                keys.join(", ")
            )));
        }
    }
    let f = Fields { obj };
    let signal = match model {
        "am" => Signal::Am(AmplitudeModSignal {
            f1: f.number("f1")?,
            amplitude: f.number("A")?,
            phase: f.phase("phi1")?,
            depth: f.number("m")?,
            f_os: f.number("f_os")?,
            osc_phase: f.phase("phi2")?,
        }),
        "three_component" => Signal::ThreeComponent(ThreeComponentSignal {
            amplitude: f.number("a")?,
            f1: f.number("f1")?,
            phase: f.phase("phi1")?,
            f_os: f.number("f_os")?,
            sub_amplitude: f.number("b1")?,
            sub_phase: f.phase("phi_sub")?,
            sup_amplitude: f.number("b2")?,
            sup_phase: f.phase("phi_sup")?,
        }),
        _ => Signal::General(GeneralOscSignal {
            amplitude: f.number("a")?,
            f1: f.number("f1")?,
            phase: f.phase("phi1")?,
            f_os: f.number("f_os")?,
            osc_phase: f.phase("phi_os")?,
            angle_depth: f.number("h")?,
            sub_amplitude: f.number("b1")?,
            sub_phase: f.phase("phi_sub")?,
            sup_amplitude: f.number("b2")?,
            sup_phase: f.phase("phi_sup")?,
        }),
    };
    let t0 = if obj.contains_key("t0") { f.number("t0")? } else { 0.0 };
    Ok(SignalConfig {
        signal,
        fs: f.number("fs")?,
        duration: f.number("duration")?,
        t0,
    })
}

/// PMU settings file; every key is optional.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PmuSettings {
    pub n_cycles: usize,
    pub f_nominal: f64,
    pub internal_rate: Option<f64>,
    pub lpf_cutoff: f64,
    pub lpf_taps: usize,
    pub report_rate: f64,
}

impl Default for PmuSettings {
    fn default() -> Self {
        let c = PmuConfig::default();
        Self {
            n_cycles: c.n_cycles,
            f_nominal: c.f_nominal,
            internal_rate: c.internal_rate,
            lpf_cutoff: c.lpf.cutoff,
            lpf_taps: c.lpf.taps,
            report_rate: c.report_rate,
        }
    }
}

impl From<PmuSettings> for PmuConfig {
    fn from(s: PmuSettings) -> Self {
        PmuConfig {
            n_cycles: s.n_cycles,
            f_nominal: s.f_nominal,
            internal_rate: s.internal_rate,
            lpf: LpfSpec {
                cutoff: s.lpf_cutoff,
                taps: s.lpf_taps,
            },
            report_rate: s.report_rate,
        }
    }
}

pub fn parse_pmu_settings(text: &str) -> CliResult<PmuConfig> {
    let s: PmuSettings = serde_json::from_str(text)?;
    Ok(s.into())
}

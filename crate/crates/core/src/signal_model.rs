//! Signal parameterizations, waveform synthesis, rectangular/polar
//! conversion and the phasor-representability check.
//!
//! Every model is a carrier at `f1` with at most one oscillation frequency
//! `f_os`:
//!
//! - [`AmplitudeModSignal`]: `A·[1 + m·cos(2π f_os t + φ2)]·cos(2π f1 t + φ1)`
//! - [`GeneralOscSignal`]: carrier plus sub- (`f1 − f_os`) and
//!   super-synchronous (`f1 + f_os`) components, all three sharing the angle
//!   modulation `h·cos(2π f_os t + φ_os)`
//! - [`ThreeComponentSignal`]: the general model with `h = 0`, which is
//!   linear in the rectangular coefficients of [`RectCoefficients`].
//!
//! The angle-modulation term is a function of time, `h·cos(2π f_os t + φ_os)`.
//! Printed versions of this model sometimes drop the `t`; without it the
//! term would be a constant phase offset and `h` would be unidentifiable.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq::{self, LeastSquaresProblem, SolverOptions};
use crate::metrics;
use crate::wrap_phase;

const TWO_PI: f64 = 2.0 * PI;

/// Tolerance (amplitude ratio and radians) under which a sideband pair is
/// reported as phasor representable.
pub const REPRESENTABILITY_TOLERANCE: f64 = 1e-6;

fn require(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(name, reason))
    }
}

fn require_finite(values: &[(&'static str, f64)]) -> Result<()> {
    for &(name, v) in values {
        require(v.is_finite(), name, "must be finite")?;
    }
    Ok(())
}

/// Carrier with sinusoidal amplitude modulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeModSignal {
    /// Fundamental frequency, Hz.
    pub f1: f64,
    /// Peak amplitude of the carrier.
    pub amplitude: f64,
    /// Carrier initial phase, rad.
    pub phase: f64,
    /// Modulation depth `m`, per unit of `amplitude`.
    pub depth: f64,
    /// Oscillation frequency, Hz.
    pub f_os: f64,
    /// Oscillation initial phase `φ2`, rad.
    pub osc_phase: f64,
}

impl AmplitudeModSignal {
    pub fn validate(&self) -> Result<()> {
        require_finite(&[
            ("f1", self.f1),
            ("A", self.amplitude),
            ("phi1", self.phase),
            ("m", self.depth),
            ("f_os", self.f_os),
            ("phi2", self.osc_phase),
        ])?;
        require(self.f1 > 0.0, "f1", "must be positive")?;
        require(self.amplitude > 0.0, "A", "must be positive")?;
        require(self.depth >= 0.0, "m", "must be non-negative")?;
        require(self.f_os >= 0.0, "f_os", "must be non-negative")
    }

    /// True amplitude envelope `A·[1 + m·cos(2π f_os t + φ2)]`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.amplitude * (1.0 + self.depth * (TWO_PI * self.f_os * t + self.osc_phase).cos())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.envelope(t) * (TWO_PI * self.f1 * t + self.phase).cos()
    }

    /// Highest frequency present in the spectrum.
    pub fn bandwidth(&self) -> f64 {
        self.f1 + self.f_os
    }

    /// Product-to-sum expansion into carrier plus two equal sidebands.
    /// Only meaningful for `f_os < f1`.
    pub fn to_three_component(&self) -> ThreeComponentSignal {
        let side = 0.5 * self.amplitude * self.depth;
        ThreeComponentSignal {
            amplitude: self.amplitude,
            f1: self.f1,
            phase: self.phase,
            f_os: self.f_os,
            sub_amplitude: side,
            sub_phase: wrap_phase(self.phase - self.osc_phase),
            sup_amplitude: side,
            sup_phase: wrap_phase(self.phase + self.osc_phase),
        }
    }
}

/// Carrier and sub/super-synchronous components with common angle
/// modulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralOscSignal {
    /// Carrier peak amplitude `a`.
    pub amplitude: f64,
    pub f1: f64,
    /// Carrier phase `φ1`, rad.
    pub phase: f64,
    pub f_os: f64,
    /// Phase of the angle modulation `φ_os`, rad.
    pub osc_phase: f64,
    /// Angle-modulation depth `h`, rad.
    pub angle_depth: f64,
    /// Sub-synchronous amplitude `b1`.
    pub sub_amplitude: f64,
    pub sub_phase: f64,
    /// Super-synchronous amplitude `b2`.
    pub sup_amplitude: f64,
    pub sup_phase: f64,
}

impl GeneralOscSignal {
    pub fn pure_tone(amplitude: f64, f1: f64, phase: f64) -> Self {
        Self {
            amplitude,
            f1,
            phase,
            f_os: 0.0,
            osc_phase: 0.0,
            angle_depth: 0.0,
            sub_amplitude: 0.0,
            sub_phase: 0.0,
            sup_amplitude: 0.0,
            sup_phase: 0.0,
        }
    }

    /// True when no sideband or angle modulation is present, in which case
    /// `f_os` carries no information.
    pub fn is_unmodulated(&self) -> bool {
        self.angle_depth == 0.0 && self.sub_amplitude == 0.0 && self.sup_amplitude == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        require_finite(&[
            ("a", self.amplitude),
            ("f1", self.f1),
            ("phi1", self.phase),
            ("f_os", self.f_os),
            ("phi_os", self.osc_phase),
            ("h", self.angle_depth),
            ("b1", self.sub_amplitude),
            ("phi_sub", self.sub_phase),
            ("b2", self.sup_amplitude),
            ("phi_sup", self.sup_phase),
        ])?;
        require(self.f1 > 0.0, "f1", "must be positive")?;
        require(self.amplitude > 0.0, "a", "must be positive")?;
        require(self.sub_amplitude >= 0.0, "b1", "must be non-negative")?;
        require(self.sup_amplitude >= 0.0, "b2", "must be non-negative")?;
        require(self.angle_depth >= 0.0, "h", "must be non-negative")?;
        require(self.f_os < self.f1, "f_os", "must be below f1")?;
        if self.is_unmodulated() {
            require(self.f_os >= 0.0, "f_os", "must be non-negative")
        } else {
            require(
                self.f_os > 0.0,
                "f_os",
                "must be positive when the signal is modulated",
            )
        }
    }

    pub fn bandwidth(&self) -> f64 {
        if self.is_unmodulated() {
            self.f1
        } else {
            self.f1 + self.f_os
        }
    }

    /// Angle-modulation term `h·cos(2π f_os t + φ_os)`.
    #[inline]
    pub fn angle_modulation(&self, t: f64) -> f64 {
        self.angle_depth * (TWO_PI * self.f_os * t + self.osc_phase).cos()
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let hc = self.angle_modulation(t);
        let w1 = TWO_PI * self.f1 * t;
        let wo = TWO_PI * self.f_os * t;
        self.amplitude * (w1 + self.phase + hc).cos()
            + self.sub_amplitude * (w1 - wo + self.sub_phase + hc).cos()
            + self.sup_amplitude * (w1 + wo + self.sup_phase + hc).cos()
    }

    /// Complex envelope `E(t)` with `x(t) = Re{E(t)·e^{j2π f1 t}}`; its
    /// magnitude is the ground-truth phasor amplitude.
    pub fn true_phasor(&self, t: f64) -> Complex64 {
        let wo = TWO_PI * self.f_os * t;
        let base = Complex64::from_polar(self.amplitude, self.phase)
            + Complex64::from_polar(self.sub_amplitude, self.sub_phase - wo)
            + Complex64::from_polar(self.sup_amplitude, self.sup_phase + wo);
        base * Complex64::from_polar(1.0, self.angle_modulation(t))
    }

    /// Drops the angle modulation.
    pub fn to_three_component(&self) -> ThreeComponentSignal {
        ThreeComponentSignal {
            amplitude: self.amplitude,
            f1: self.f1,
            phase: self.phase,
            f_os: self.f_os,
            sub_amplitude: self.sub_amplitude,
            sub_phase: self.sub_phase,
            sup_amplitude: self.sup_amplitude,
            sup_phase: self.sup_phase,
        }
    }

    /// Re-expresses the phases for a time axis shifted by `dt`, so that
    /// `self.eval(t) == shifted.eval(t - dt)`.
    pub fn shift_time_origin(&self, dt: f64) -> Self {
        let w1 = TWO_PI * self.f1 * dt;
        let wo = TWO_PI * self.f_os * dt;
        Self {
            phase: wrap_phase(self.phase + w1),
            osc_phase: wrap_phase(self.osc_phase + wo),
            sub_phase: wrap_phase(self.sub_phase + w1 - wo),
            sup_phase: wrap_phase(self.sup_phase + w1 + wo),
            ..*self
        }
    }
}

/// Carrier plus sub/super-synchronous components, no angle modulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeComponentSignal {
    pub amplitude: f64,
    pub f1: f64,
    pub phase: f64,
    pub f_os: f64,
    pub sub_amplitude: f64,
    pub sub_phase: f64,
    pub sup_amplitude: f64,
    pub sup_phase: f64,
}

impl ThreeComponentSignal {
    pub fn to_general(&self) -> GeneralOscSignal {
        GeneralOscSignal {
            amplitude: self.amplitude,
            f1: self.f1,
            phase: self.phase,
            f_os: self.f_os,
            osc_phase: 0.0,
            angle_depth: 0.0,
            sub_amplitude: self.sub_amplitude,
            sub_phase: self.sub_phase,
            sup_amplitude: self.sup_amplitude,
            sup_phase: self.sup_phase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.to_general().validate()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w1 = TWO_PI * self.f1 * t;
        let wo = TWO_PI * self.f_os * t;
        self.amplitude * (w1 + self.phase).cos()
            + self.sub_amplitude * (w1 - wo + self.sub_phase).cos()
            + self.sup_amplitude * (w1 + wo + self.sup_phase).cos()
    }
}

/// Rectangular coefficients of the three-component model:
/// `y = Σ C·cos(2π f t) + S·sin(2π f t)` over `f ∈ {f1, f1 − f_os, f1 + f_os}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectCoefficients {
    pub f1: f64,
    pub f_os: f64,
    /// `A1`, `B1`
    pub fund_cos: f64,
    pub fund_sin: f64,
    /// `A2`, `B2` at `f1 − f_os`
    pub sub_cos: f64,
    pub sub_sin: f64,
    /// `A3`, `B3` at `f1 + f_os`
    pub sup_cos: f64,
    pub sup_sin: f64,
}

impl RectCoefficients {
    /// The six basis functions in coefficient order.
    pub fn basis(f1: f64, f_os: f64, t: f64) -> [f64; 6] {
        let w1 = TWO_PI * f1 * t;
        let ws = TWO_PI * (f1 - f_os) * t;
        let wp = TWO_PI * (f1 + f_os) * t;
        let (s1, c1) = w1.sin_cos();
        let (ss, cs) = ws.sin_cos();
        let (sp, cp) = wp.sin_cos();
        [c1, s1, cs, ss, cp, sp]
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [
            self.fund_cos,
            self.fund_sin,
            self.sub_cos,
            self.sub_sin,
            self.sup_cos,
            self.sup_sin,
        ]
    }

    pub fn from_coefficients(f1: f64, f_os: f64, c: [f64; 6]) -> Self {
        Self {
            f1,
            f_os,
            fund_cos: c[0],
            fund_sin: c[1],
            sub_cos: c[2],
            sub_sin: c[3],
            sup_cos: c[4],
            sup_sin: c[5],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        Self::basis(self.f1, self.f_os, t)
            .iter()
            .zip(self.coefficients())
            .map(|(f, c)| f * c)
            .sum()
    }
}

/// Which components of a polar conversion had zero amplitude (and were
/// assigned phase 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegenerateComponents {
    pub fundamental: bool,
    pub sub: bool,
    pub sup: bool,
}

impl DegenerateComponents {
    pub fn any(&self) -> bool {
        self.fundamental || self.sub || self.sup
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarConversion {
    pub signal: ThreeComponentSignal,
    pub degenerate: DegenerateComponents,
}

/// `c·cos(ωt) + s·sin(ωt) = r·cos(ωt + φ)` with `c = r cos φ`, `s = −r sin φ`.
fn to_polar(c: f64, s: f64) -> (f64, f64, bool) {
    let r = c.hypot(s);
    if r == 0.0 {
        (0.0, 0.0, true)
    } else {
        (r, (-s).atan2(c), false)
    }
}

pub fn rect_to_polar(r: &RectCoefficients) -> PolarConversion {
    let (a, phase, d1) = to_polar(r.fund_cos, r.fund_sin);
    let (b1, sub_phase, d2) = to_polar(r.sub_cos, r.sub_sin);
    let (b2, sup_phase, d3) = to_polar(r.sup_cos, r.sup_sin);
    PolarConversion {
        signal: ThreeComponentSignal {
            amplitude: a,
            f1: r.f1,
            phase,
            f_os: r.f_os,
            sub_amplitude: b1,
            sub_phase,
            sup_amplitude: b2,
            sup_phase,
        },
        degenerate: DegenerateComponents {
            fundamental: d1,
            sub: d2,
            sup: d3,
        },
    }
}

pub fn polar_to_rect(p: &ThreeComponentSignal) -> RectCoefficients {
    let (s1, c1) = p.phase.sin_cos();
    let (ss, cs) = p.sub_phase.sin_cos();
    let (sp, cp) = p.sup_phase.sin_cos();
    RectCoefficients {
        f1: p.f1,
        f_os: p.f_os,
        fund_cos: p.amplitude * c1,
        fund_sin: -p.amplitude * s1,
        sub_cos: p.sub_amplitude * cs,
        sub_sin: -p.sub_amplitude * ss,
        sup_cos: p.sup_amplitude * cp,
        sup_sin: -p.sup_amplitude * sp,
    }
}

/// Uniformly sampled point-on-wave record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveform {
    pub fs: f64,
    pub t0: f64,
    pub samples: Vec<f64>,
}

impl SampledWaveform {
    pub fn new(fs: f64, t0: f64, samples: Vec<f64>) -> Result<Self> {
        require(fs.is_finite() && fs > 0.0, "fs", "must be positive")?;
        require(t0.is_finite(), "t0", "must be finite")?;
        require(samples.len() >= 2, "samples", "need at least 2 samples")?;
        Ok(Self { fs, t0, samples })
    }

    /// Builds a record from explicit timestamps, checking that they are
    /// uniformly spaced.
    pub fn from_timestamps(times: &[f64], samples: Vec<f64>) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(Error::LengthMismatch(format!(
                "{} timestamps for {} samples",
                times.len(),
                samples.len()
            )));
        }
        require(times.len() >= 2, "samples", "need at least 2 samples")?;
        let n = times.len();
        let ts = (times[n - 1] - times[0]) / (n - 1) as f64;
        require(ts > 0.0, "time", "timestamps must be strictly increasing")?;
        for (k, &t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * ts;
            if (t - expected).abs() > 1e-6 * ts.max(1e-9) + 1e-9 {
                return Err(Error::invalid(
                    "time",
                    format!("non-uniform spacing at row {}", k + 1),
                ));
            }
        }
        Self::new(1.0 / ts, times[0], samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ts(&self) -> f64 {
        1.0 / self.fs
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.fs
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Record span `len / fs`.
    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.fs
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

fn sample_count(fs: f64, duration: f64, t0: f64, bandwidth: f64) -> Result<usize> {
    require(fs.is_finite() && fs > 0.0, "fs", "must be positive")?;
    require(
        duration.is_finite() && duration > 0.0,
        "duration",
        "must be positive",
    )?;
    require(t0.is_finite(), "t0", "must be finite")?;
    if fs <= 2.0 * bandwidth {
        return Err(Error::BelowNyquist {
            fs,
            required: 2.0 * bandwidth,
        });
    }
    let n = (duration * fs).round() as usize;
    require(n >= 2, "duration", "yields fewer than 2 samples")?;
    Ok(n)
}

fn sample_fn(fs: f64, t0: f64, n: usize, f: impl Fn(f64) -> f64) -> SampledWaveform {
    let samples = (0..n).map(|k| f(t0 + k as f64 / fs)).collect();
    SampledWaveform { fs, t0, samples }
}

pub fn synthesize_am(
    p: &AmplitudeModSignal,
    fs: f64,
    duration: f64,
    t0: f64,
) -> Result<SampledWaveform> {
    p.validate()?;
    let n = sample_count(fs, duration, t0, p.bandwidth())?;
    Ok(sample_fn(fs, t0, n, |t| p.eval(t)))
}

pub fn synthesize_general(
    p: &GeneralOscSignal,
    fs: f64,
    duration: f64,
    t0: f64,
) -> Result<SampledWaveform> {
    p.validate()?;
    let n = sample_count(fs, duration, t0, p.bandwidth())?;
    Ok(sample_fn(fs, t0, n, |t| p.eval(t)))
}

pub fn synthesize_three(
    p: &ThreeComponentSignal,
    fs: f64,
    duration: f64,
    t0: f64,
) -> Result<SampledWaveform> {
    synthesize_general(&p.to_general(), fs, duration, t0)
}

/// Parameters of the phasor-representable form
/// `[a + b·cos(2π f_os t + φ2)]·cos(2π f1 t + φ1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeForm {
    pub amplitude: f64,
    pub envelope_amplitude: f64,
    pub phase: f64,
    pub envelope_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentabilityReport {
    pub b1: f64,
    pub b2: f64,
    /// `|b1 − b2| / max(b1, b2)`, 0 when both vanish.
    pub amplitude_asymmetry: f64,
    /// `φ_sub + φ_sup − 2φ1` wrapped into `(−π, π]`.
    pub phase_residual: f64,
    /// `b = 2·b1`
    pub equivalent_b: f64,
    /// `φ2 = φ_sup − φ1`, wrapped.
    pub equivalent_phi2: f64,
    /// E_PoW (%) of the best envelope-form fit; `None` when the fit diverged.
    pub fit_error_pct: Option<f64>,
    pub fit: Option<EnvelopeForm>,
    pub fit_iterations: usize,
    pub fit_converged: bool,
    pub representable: bool,
}

struct EnvelopeFit<'a> {
    f1: f64,
    f_os: f64,
    times: &'a [f64],
    y: &'a [f64],
}

impl EnvelopeFit<'_> {
    fn eval(f1: f64, f_os: f64, p: &[f64], t: f64) -> f64 {
        let env = p[0] + p[1] * (TWO_PI * f_os * t + p[3]).cos();
        env * (TWO_PI * f1 * t + p[2]).cos()
    }
}

impl LeastSquaresProblem for EnvelopeFit<'_> {
    fn num_params(&self) -> usize {
        4
    }
    fn num_residuals(&self) -> usize {
        self.y.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = Self::eval(self.f1, self.f_os, p, self.times[k]) - self.y[k];
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut Mat<f64>) {
        for (k, &t) in self.times.iter().enumerate() {
            let (sp, cp) = (TWO_PI * self.f_os * t + p[3]).sin_cos();
            let (sc, cc) = (TWO_PI * self.f1 * t + p[2]).sin_cos();
            out[(k, 0)] = cc;
            out[(k, 1)] = cp * cc;
            out[(k, 2)] = -(p[0] + p[1] * cp) * sc;
            out[(k, 3)] = -p[1] * sp * cc;
        }
    }
}

/// Decides whether a three-component signal can be written as a real
/// envelope times a single carrier.
///
/// The analytic fields come straight from the parameters. In addition the
/// envelope form is fitted to the synthesized waveform by Gauss-Newton
/// (100 iterations, step tolerance 1e-12) and its E_PoW reported.
pub fn check_representability(
    p: &ThreeComponentSignal,
    fs: f64,
    duration: f64,
) -> Result<RepresentabilityReport> {
    p.validate()?;
    let w = synthesize_three(p, fs, duration, 0.0)?;
    let (b1, b2) = (p.sub_amplitude, p.sup_amplitude);
    let bmax = b1.max(b2);
    let amplitude_asymmetry = if bmax > 0.0 {
        (b1 - b2).abs() / bmax
    } else {
        0.0
    };
    let phase_residual = wrap_phase(p.sub_phase + p.sup_phase - 2.0 * p.phase);
    let equivalent_phi2 = wrap_phase(p.sup_phase - p.phase);
    let representable = amplitude_asymmetry <= REPRESENTABILITY_TOLERANCE
        && (bmax == 0.0 || phase_residual.abs() <= REPRESENTABILITY_TOLERANCE);

    let times = w.times();
    let problem = EnvelopeFit {
        f1: p.f1,
        f_os: p.f_os,
        times: &times,
        y: &w.samples,
    };
    let init = [p.amplitude, b1 + b2, p.phase, equivalent_phi2];
    let opts = SolverOptions {
        max_iterations: 100,
        step_tolerance: 1e-12,
    };
    let solution = lsq::gauss_newton(&problem, &init, opts);
    let (fit, fit_error_pct, fit_iterations, fit_converged) = match solution {
        Some(sol) => {
            let fitted: Vec<f64> = times
                .iter()
                .map(|&t| EnvelopeFit::eval(p.f1, p.f_os, &sol.params, t))
                .collect();
            let err = metrics::e_pow(&w.samples, &fitted, p.amplitude, w.ts())?;
            let form = EnvelopeForm {
                amplitude: sol.params[0],
                envelope_amplitude: sol.params[1],
                phase: wrap_phase(sol.params[2]),
                envelope_phase: wrap_phase(sol.params[3]),
            };
            (Some(form), Some(err), sol.iterations, sol.converged)
        }
        None => (None, None, 0, false),
    };

    Ok(RepresentabilityReport {
        b1,
        b2,
        amplitude_asymmetry,
        phase_residual,
        equivalent_b: 2.0 * b1,
        equivalent_phi2,
        fit_error_pct,
        fit,
        fit_iterations,
        fit_converged,
        representable,
    })
}

/// Per-sample space-vector magnitude and angle of a three-phase record.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkeSeries {
    pub fs: f64,
    pub t0: f64,
    pub magnitude: Vec<f64>,
    /// `None` where the magnitude vanishes and the angle is undefined.
    pub phase: Vec<Option<f64>>,
}

/// Point-by-point αβ transform. For a balanced set
/// `v_a = A cos θ, v_b = A cos(θ − 2π/3), v_c = A cos(θ + 2π/3)` the result
/// is magnitude `A` and phase `θ`.
pub fn clarke_magnitude(
    va: &SampledWaveform,
    vb: &SampledWaveform,
    vc: &SampledWaveform,
) -> Result<ClarkeSeries> {
    for other in [vb, vc] {
        if other.len() != va.len() {
            return Err(Error::LengthMismatch(format!(
                "phase records have {} and {} samples",
                va.len(),
                other.len()
            )));
        }
        if other.fs != va.fs || other.t0 != va.t0 {
            return Err(Error::LengthMismatch(
                "phase records differ in sample rate or start time".into(),
            ));
        }
    }
    let peak = va
        .samples
        .iter()
        .chain(&vb.samples)
        .chain(&vc.samples)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let sqrt3 = 3f64.sqrt();
    let mut magnitude = Vec::with_capacity(va.len());
    let mut phase = Vec::with_capacity(va.len());
    for k in 0..va.len() {
        let (a, b, c) = (va.samples[k], vb.samples[k], vc.samples[k]);
        let alpha = (2.0 * a - b - c) / 3.0;
        let beta = (b - c) / sqrt3;
        let mag = alpha.hypot(beta);
        magnitude.push(mag);
        phase.push(if mag > 1e-12 * peak {
            Some(beta.atan2(alpha))
        } else {
            None
        });
    }
    Ok(ClarkeSeries {
        fs: va.fs,
        t0: va.t0,
        magnitude,
        phase,
    })
}

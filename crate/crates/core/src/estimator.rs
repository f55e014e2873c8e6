//! Multi-step estimation of the general oscillation model from a
//! point-on-wave record.
//!
//! 1. Fundamental frequency from the phase advance of one-cycle DFT
//!    phasors, re-windowed at the refined frequency.
//! 2. One-cycle DFT phasor curve at hop `fs/240`.
//! 3. Oscillation frequency: the dominant Matrix Pencil mode of the
//!    relative amplitude curve and of the detrended phase curve, whichever
//!    is larger. Steps 2 and 3 repeat until the curve covers 1.5
//!    oscillation periods.
//! 4. Linear least squares for the six rectangular coefficients.
//! 5. Conversion to amplitudes and phases.
//! 6. Levenberg-Marquardt on the angle modulation `(h, φ_os)` from zero,
//!    then by default on all ten parameters.

use std::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Step};
use crate::lsq::{self, LeastSquaresProblem, SolverOptions};
use crate::metrics::{self, ErrorReport};
use crate::modal::{self, PencilOptions};
use crate::pmu_pipeline::{self, PhasorSeries};
use crate::signal_model::{rect_to_polar, GeneralOscSignal, RectCoefficients, SampledWaveform};
use crate::wrap_phase;

const TWO_PI: f64 = 2.0 * PI;

/// What Step 6 re-optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Refinement {
    /// Only `(h, φ_os)`, everything else held at the Step 5 values.
    AngleModulationOnly,
    /// `(h, φ_os)` first, then all ten parameters jointly.
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Accepted deviation of the fundamental from nominal, Hz.
    pub fundamental_band: f64,
    /// Step 2 hop is `fs/curve_rate_divisor` samples.
    pub curve_rate_divisor: f64,
    /// Step 2 starts from at most this many seconds of record.
    pub initial_curve_span: f64,
    pub max_curve_iterations: usize,
    /// Lowest oscillation frequency Step 3 accepts, Hz.
    pub f_os_min: f64,
    /// Relative curve fluctuation below which no oscillation is reported.
    pub no_oscillation_tol: f64,
    pub pencil: PencilOptions,
    pub refinement: Refinement,
    pub solver: SolverOptions,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            fundamental_band: 5.0,
            curve_rate_divisor: 240.0,
            initial_curve_span: 2.0,
            max_curve_iterations: 3,
            f_os_min: 0.1,
            no_oscillation_tol: 1e-6,
            pencil: PencilOptions::default(),
            refinement: Refinement::Full,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    /// Final parameter estimates, phases wrapped to `(−π, π]`.
    pub params: GeneralOscSignal,
    /// Step 1 estimate.
    pub f1_est: f64,
    /// Step 3 estimate, 0 when no oscillation was detected.
    pub f_os_est: f64,
    pub oscillation_detected: bool,
    /// Step 4 output.
    pub rect: RectCoefficients,
    /// Step 5 model (no angle modulation).
    pub step5: GeneralOscSignal,
    pub e_ls_step5: f64,
    pub e_ls: f64,
    pub e_pow_pct: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Step 2 curve used by the final Step 3 pass.
    pub curve: PhasorSeries,
}

/// Step 1: fundamental frequency from one-cycle DFT phase advance.
pub fn estimate_fundamental(w: &SampledWaveform, f_nominal: f64) -> Result<f64> {
    estimate_fundamental_with(w, f_nominal, EstimatorConfig::default().fundamental_band)
}

fn estimate_fundamental_with(w: &SampledWaveform, f_nominal: f64, band: f64) -> Result<f64> {
    if !(f_nominal.is_finite() && f_nominal > 0.0) {
        return Err(Error::invalid("f_nominal", "must be positive"));
    }
    let cycles = w.duration() * f_nominal;
    if cycles < 10.0 - 1e-9 {
        return Err(Error::RecordTooShort {
            reason: format!("{cycles:.3} nominal cycles, need at least 10"),
        });
    }
    let hop = (w.fs / f_nominal).round().max(1.0);
    let hop_time = hop / w.fs;
    let mut f = f_nominal;
    for _ in 0..3 {
        let series = pmu_pipeline::sliding_phasors(w, 1, f, 1.0 / hop_time)?;
        let phases = series.phases();
        let advance: f64 = phases
            .windows(2)
            .map(|p| wrap_phase(p[1] - p[0]))
            .sum::<f64>()
            / (phases.len() - 1) as f64;
        f += advance / (TWO_PI * hop_time);
        if !f.is_finite() || (f - f_nominal).abs() > band {
            return Err(Error::OutOfBand {
                value: f,
                low: f_nominal - band,
                high: f_nominal + band,
            });
        }
    }
    Ok(f)
}

/// Step 2: one-cycle DFT phasors at `f1`, windows starting every
/// `hop_samples` samples.
pub fn amplitude_curve(w: &SampledWaveform, f1: f64, hop_samples: usize) -> Result<PhasorSeries> {
    if hop_samples == 0 {
        return Err(Error::invalid("hop_samples", "must be at least 1"));
    }
    pmu_pipeline::sliding_phasors(w, 1, f1, w.fs / hop_samples as f64)
}

fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (k, &p) in phases.iter().enumerate() {
        if k > 0 {
            let d = p - phases[k - 1];
            offset -= TWO_PI * (d / TWO_PI).round();
        }
        out.push(p + offset);
    }
    out
}

/// Subtracts the least-squares line.
fn detrend(times: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let vm = v.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in times.iter().zip(v) {
        sxy += (t - tm) * (y - vm);
        sxx += (t - tm) * (t - tm);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    times
        .iter()
        .zip(v)
        .map(|(t, y)| y - vm - slope * (t - tm))
        .collect()
}

/// Step 3: oscillation frequency of a Step 2 curve, `None` when the curve
/// shows no oscillation in `(f_os_min, f1)`.
pub fn estimate_osc_frequency(curve: &PhasorSeries, f1: f64) -> Result<Option<f64>> {
    osc_frequency_with(curve, f1, &EstimatorConfig::default())
}

fn osc_frequency_with(curve: &PhasorSeries, f1: f64, cfg: &EstimatorConfig) -> Result<Option<f64>> {
    if curve.len() < 8 {
        return Err(Error::RecordTooShort {
            reason: format!("{} curve points, need at least 8", curve.len()),
        });
    }
    let amps = curve.amplitudes();
    let mean = amps.iter().sum::<f64>() / amps.len() as f64;
    if mean <= 0.0 {
        return Err(Error::Numerical("amplitude curve is identically zero".into()));
    }
    let rel: Vec<f64> = amps.iter().map(|a| a / mean - 1.0).collect();
    let phase = detrend(&curve.times(), &unwrap(&curve.phases()));

    let fluctuation = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if fluctuation(&rel).max(fluctuation(&phase)) < cfg.no_oscillation_tol {
        return Ok(None);
    }

    let mut best: Option<modal::Mode> = None;
    for series in [&rel, &phase] {
        let modes = modal::matrix_pencil(series, curve.rate, cfg.pencil)?;
        if let Ok(m) = modal::dominant_mode(&modes, cfg.f_os_min, f1) {
            if best.is_none_or(|b| m.amplitude > b.amplitude) {
                best = Some(m);
            }
        }
    }
    Ok(best
        .filter(|m| m.amplitude >= cfg.no_oscillation_tol)
        .map(|m| m.frequency))
}

/// Steps 2 and 3 with span extension. Returns the last curve and the
/// oscillation frequency, if any.
fn curve_and_frequency(
    w: &SampledWaveform,
    f1: f64,
    cfg: &EstimatorConfig,
) -> Result<(PhasorSeries, Option<f64>)> {
    let hop = (w.fs / cfg.curve_rate_divisor).round().max(1.0) as usize;
    let cycle = 1.0 / f1;
    let mut span = w.duration().min(cfg.initial_curve_span.max(10.0 * cycle));
    let mut last = None;
    for _ in 0..cfg.max_curve_iterations.max(1) {
        let n = ((span * w.fs).round() as usize).min(w.len());
        let part = SampledWaveform {
            samples: w.samples[..n].to_vec(),
            ..w.clone()
        };
        let curve = amplitude_curve(&part, f1, hop).map_err(|e| e.at(Step::AmplitudeCurve))?;
        let f_os = osc_frequency_with(&curve, f1, cfg).map_err(|e| e.at(Step::OscillationFrequency))?;
        let needed = f_os.map_or(0.0, |f| 1.5 / f + cycle);
        let covered = span >= needed - 1e-12;
        last = Some((curve, f_os));
        if covered {
            break;
        }
        if span >= w.duration() {
            let f = f_os.unwrap_or(0.0);
            return Err(Error::RecordTooShort {
                reason: format!(
                    "{:.4} s record covers fewer than 1.5 periods of the {f:.4} Hz oscillation",
                    w.duration()
                ),
            }
            .at(Step::AmplitudeCurve));
        }
        span = needed.min(w.duration());
    }
    Ok(last.expect("at least one iteration"))
}

fn solve_columns(w: &SampledWaveform, cols: usize, basis: impl Fn(f64, &mut [f64])) -> Result<Vec<f64>> {
    let n = w.len();
    if n < cols {
        return Err(Error::RecordTooShort {
            reason: format!("{n} samples for {cols} unknowns"),
        });
    }
    let mut row = vec![0.0; cols];
    let mut a = Mat::zeros(n, cols);
    for k in 0..n {
        basis(w.time(k), &mut row);
        for (j, v) in row.iter().enumerate() {
            a[(k, j)] = *v;
        }
    }
    let qr = a.qr();
    let r = qr.thin_R();
    let rmax = (0..cols).fold(0.0f64, |m, i| m.max(r[(i, i)].abs()));
    if (0..cols).any(|i| r[(i, i)].abs() <= 1e-10 * rmax) {
        return Err(Error::RankDeficient(
            "basis columns are collinear for this oscillation frequency".into(),
        ));
    }
    let rhs = Mat::from_fn(n, 1, |k, _| w.samples[k]);
    let x = qr.solve_lstsq(&rhs);
    crate::clear_vector_state();
    let x: Vec<f64> = (0..cols).map(|j| x[(j, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankDeficient("singular triangular factor".into()));
    }
    Ok(x)
}

/// Step 4: least-squares rectangular coefficients for known `f1`, `f_os`.
pub fn linear_ls_fit(w: &SampledWaveform, f1: f64, f_os: f64) -> Result<RectCoefficients> {
    let separated = f_os > 0.0 && f_os != f1;
    if !separated {
        return Err(Error::RankDeficient(format!(
            "f_os = {f_os} makes the sideband basis degenerate"
        )));
    }
    let c = solve_columns(w, 6, |t, row| {
        row.copy_from_slice(&RectCoefficients::basis(f1, f_os, t));
    })?;
    Ok(RectCoefficients::from_coefficients(
        f1,
        f_os,
        [c[0], c[1], c[2], c[3], c[4], c[5]],
    ))
}

fn fit_fundamental(w: &SampledWaveform, f1: f64) -> Result<RectCoefficients> {
    let c = solve_columns(w, 2, |t, row| {
        let (s, c) = (TWO_PI * f1 * t).sin_cos();
        row[0] = c;
        row[1] = s;
    })?;
    Ok(RectCoefficients::from_coefficients(
        f1,
        0.0,
        [c[0], c[1], 0.0, 0.0, 0.0, 0.0],
    ))
}

/// Parameter order used by [`model_jacobian`] and the full refinement.
pub const PARAM_NAMES: [&str; 10] = [
    "a", "f1", "phi1", "f_os", "phi_os", "h", "b1", "phi_sub", "b2", "phi_sup",
];

fn to_vector(p: &GeneralOscSignal) -> [f64; 10] {
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

fn from_vector(v: &[f64]) -> GeneralOscSignal {
    GeneralOscSignal {
        amplitude: v[0],
        f1: v[1],
        phase: v[2],
        f_os: v[3],
        osc_phase: v[4],
        angle_depth: v[5],
        sub_amplitude: v[6],
        sub_phase: v[7],
        sup_amplitude: v[8],
        sup_phase: v[9],
    }
}

/// Gradient of the model value at time `t` with respect to the ten
/// parameters in [`PARAM_NAMES`] order.
pub fn model_jacobian(p: &GeneralOscSignal, t: f64) -> [f64; 10] {
    let wo = TWO_PI * p.f_os * t;
    let (so, co) = (wo + p.osc_phase).sin_cos();
    let hc = p.angle_depth * co;
    let w1 = TWO_PI * p.f1 * t;
    let (s1, c1) = (w1 + p.phase + hc).sin_cos();
    let (ss, cs) = (w1 - wo + p.sub_phase + hc).sin_cos();
    let (sp, cp) = (w1 + wo + p.sup_phase + hc).sin_cos();
    let s_sum = p.amplitude * s1 + p.sub_amplitude * ss + p.sup_amplitude * sp;
    let d_hc_d_fo = -p.angle_depth * so * TWO_PI * t;
    [
        c1,
        -TWO_PI * t * s_sum,
        -p.amplitude * s1,
        -s_sum * d_hc_d_fo + TWO_PI * t * (p.sub_amplitude * ss - p.sup_amplitude * sp),
        s_sum * p.angle_depth * so,
        -s_sum * co,
        cs,
        -p.sub_amplitude * ss,
        cp,
        -p.sup_amplitude * sp,
    ]
}

/// Full model fit on a time axis centered at `tc`.
struct FullFit<'a> {
    w: &'a SampledWaveform,
    tc: f64,
    /// Parameter indices being optimized; the rest come from `base`.
    active: &'a [usize],
    base: [f64; 10],
}

impl FullFit<'_> {
    fn expand(&self, x: &[f64]) -> GeneralOscSignal {
        let mut v = self.base;
        for (i, &j) in self.active.iter().enumerate() {
            v[j] = x[i];
        }
        from_vector(&v)
    }
}

impl LeastSquaresProblem for FullFit<'_> {
    fn num_params(&self) -> usize {
        self.active.len()
    }
    fn num_residuals(&self) -> usize {
        self.w.len()
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let p = self.expand(x);
        for (k, o) in out.iter_mut().enumerate() {
            *o = p.eval(self.w.time(k) - self.tc) - self.w.samples[k];
        }
    }
    fn jacobian(&self, x: &[f64], out: &mut Mat<f64>) {
        let p = self.expand(x);
        for k in 0..self.w.len() {
            let g = model_jacobian(&p, self.w.time(k) - self.tc);
            for (i, &j) in self.active.iter().enumerate() {
                out[(k, i)] = g[j];
            }
        }
    }
}

/// Angle modulation as `p·cos(ωo t) − q·sin(ωo t)`, which is smooth
/// through `h = 0` unlike `(h, φ_os)`.
struct AngleFit<'a> {
    w: &'a SampledWaveform,
    tc: f64,
    base: GeneralOscSignal,
}

impl AngleFit<'_> {
    fn model(&self, x: &[f64]) -> GeneralOscSignal {
        GeneralOscSignal {
            angle_depth: x[0].hypot(x[1]),
            osc_phase: x[1].atan2(x[0]),
            ..self.base
        }
    }
}

impl LeastSquaresProblem for AngleFit<'_> {
    fn num_params(&self) -> usize {
        2
    }
    fn num_residuals(&self) -> usize {
        self.w.len()
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let p = self.model(x);
        for (k, o) in out.iter_mut().enumerate() {
            *o = p.eval(self.w.time(k) - self.tc) - self.w.samples[k];
        }
    }
    fn jacobian(&self, x: &[f64], out: &mut Mat<f64>) {
        let b = &self.base;
        for k in 0..self.w.len() {
            let t = self.w.time(k) - self.tc;
            let wo = TWO_PI * b.f_os * t;
            let (so, co) = wo.sin_cos();
            let hc = x[0] * co - x[1] * so;
            let w1 = TWO_PI * b.f1 * t;
            let s_sum = b.amplitude * (w1 + b.phase + hc).sin()
                + b.sub_amplitude * (w1 - wo + b.sub_phase + hc).sin()
                + b.sup_amplitude * (w1 + wo + b.sup_phase + hc).sin();
            out[(k, 0)] = -s_sum * co;
            out[(k, 1)] = s_sum * so;
        }
    }
}

/// Flips negative amplitudes into the phase, makes `f_os` non-negative and
/// wraps every phase.
fn normalize(mut p: GeneralOscSignal) -> GeneralOscSignal {
    if p.f_os < 0.0 {
        p.f_os = -p.f_os;
        p.osc_phase = -p.osc_phase;
        std::mem::swap(&mut p.sub_amplitude, &mut p.sup_amplitude);
        std::mem::swap(&mut p.sub_phase, &mut p.sup_phase);
    }
    let flip = |amp: &mut f64, phase: &mut f64| {
        if *amp < 0.0 {
            *amp = -*amp;
            *phase += PI;
        }
        *phase = wrap_phase(*phase);
    };
    flip(&mut p.amplitude, &mut p.phase);
    flip(&mut p.angle_depth, &mut p.osc_phase);
    flip(&mut p.sub_amplitude, &mut p.sub_phase);
    flip(&mut p.sup_amplitude, &mut p.sup_phase);
    p
}

fn record_center(w: &SampledWaveform) -> f64 {
    0.5 * (w.t0 + w.end_time())
}

/// Step 6: Levenberg-Marquardt over `(h, φ_os)` starting from zero, all
/// other parameters held at `init`. Returns the refined model, the
/// iteration count and whether the step-norm criterion was met.
pub fn nonlinear_refine(
    w: &SampledWaveform,
    init: &GeneralOscSignal,
    opts: SolverOptions,
) -> (GeneralOscSignal, usize, bool) {
    let tc = record_center(w);
    let local = init.shift_time_origin(tc);
    let problem = AngleFit {
        w,
        tc,
        base: GeneralOscSignal {
            angle_depth: 0.0,
            osc_phase: 0.0,
            ..local
        },
    };
    let sol = lsq::levenberg_marquardt(&problem, &[0.0, 0.0], opts);
    let refined = normalize(problem.model(&sol.params)).shift_time_origin(-tc);
    (normalize(refined), sol.iterations, sol.converged)
}

/// Joint refinement of the parameters in `active` (indices into
/// [`PARAM_NAMES`]).
fn refine_subset(
    w: &SampledWaveform,
    init: &GeneralOscSignal,
    active: &[usize],
    opts: SolverOptions,
) -> (GeneralOscSignal, usize, bool) {
    let tc = record_center(w);
    let base = to_vector(&init.shift_time_origin(tc));
    let problem = FullFit {
        w,
        tc,
        active,
        base,
    };
    let x0: Vec<f64> = active.iter().map(|&j| base[j]).collect();
    let sol = lsq::levenberg_marquardt(&problem, &x0, opts);
    let refined = normalize(problem.expand(&sol.params)).shift_time_origin(-tc);
    (normalize(refined), sol.iterations, sol.converged)
}

/// All ten parameters jointly, starting from `init`.
pub fn full_refine(
    w: &SampledWaveform,
    init: &GeneralOscSignal,
    opts: SolverOptions,
) -> (GeneralOscSignal, usize, bool) {
    refine_subset(w, init, &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9], opts)
}

fn sum_sq_residual(w: &SampledWaveform, p: &GeneralOscSignal) -> f64 {
    (0..w.len())
        .map(|k| {
            let r = p.eval(w.time(k)) - w.samples[k];
            r * r
        })
        .sum()
}

pub fn estimate(w: &SampledWaveform, f_nominal: f64) -> Result<EstimationResult> {
    estimate_with(w, f_nominal, &EstimatorConfig::default())
}

pub fn estimate_with(
    w: &SampledWaveform,
    f_nominal: f64,
    cfg: &EstimatorConfig,
) -> Result<EstimationResult> {
    let f1 = estimate_fundamental_with(w, f_nominal, cfg.fundamental_band)
        .map_err(|e| e.at(Step::Fundamental))?;
    let (curve, f_os) = curve_and_frequency(w, f1, cfg)?;

    let rect = match f_os {
        Some(f) => linear_ls_fit(w, f1, f),
        None => fit_fundamental(w, f1),
    }
    .map_err(|e| e.at(Step::LinearFit))?;

    let polar = rect_to_polar(&rect).signal;
    if polar.amplitude <= 0.0 {
        return Err(Error::Numerical("fundamental amplitude vanished".into()).at(Step::Polar));
    }
    let step5 = normalize(polar.to_general());
    let e_ls_step5 = sum_sq_residual(w, &step5);

    let (params, iterations, converged) = match (f_os, cfg.refinement) {
        (Some(_), Refinement::AngleModulationOnly) => nonlinear_refine(w, &step5, cfg.solver),
        (Some(_), Refinement::Full) => {
            let (stage, it1, _) = nonlinear_refine(w, &step5, cfg.solver);
            let (p, it2, conv) = full_refine(w, &stage, cfg.solver);
            (p, it1 + it2, conv)
        }
        (None, Refinement::AngleModulationOnly) => (step5, 0, true),
        (None, Refinement::Full) => refine_subset(w, &step5, &[0, 1, 2], cfg.solver),
    };
    if !to_vector(&params).iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("refinement produced non-finite parameters".into())
            .at(Step::NonlinearRefine));
    }
    // LM only accepts decreasing steps; guard against round-off anyway
    let e_ls_refined = sum_sq_residual(w, &params);
    let (params, e_ls) = if e_ls_refined <= e_ls_step5 {
        (params, e_ls_refined)
    } else {
        (step5, e_ls_step5)
    };
    let e_pow_pct = metrics::e_pow_from_ls(e_ls, w.len(), params.amplitude)
        .map_err(|e| e.at(Step::NonlinearRefine))?;

    Ok(EstimationResult {
        params,
        f1_est: f1,
        f_os_est: f_os.unwrap_or(0.0),
        oscillation_detected: f_os.is_some(),
        rect,
        step5,
        e_ls_step5,
        e_ls,
        e_pow_pct,
        iterations,
        converged,
        curve,
    })
}

/// Reconstruction error of the classical alternative: one-cycle DFT
/// phasors at every sample, each turned back into a waveform value at its
/// own timestamp, `ŷ = Re{X·e^{j2π f1 t}}`.
pub fn dft_reconstruction_error(
    w: &SampledWaveform,
    f1: f64,
    a_ref: f64,
) -> Result<ErrorReport> {
    let series = pmu_pipeline::sliding_phasors(w, 1, f1, w.fs)?;
    let (y, y_hat) = pmu_pipeline::reconstruct_from_phasors(w, &series, f1)?;
    let e_ls = metrics::e_ls(&y, &y_hat)?;
    Ok(ErrorReport {
        e_ls,
        e_pow_pct: metrics::e_pow(&y, &y_hat, a_ref, w.ts())?,
        m_samples: y.len(),
        t1: series.points[0].timestamp,
        t2: series.points[0].timestamp + y.len() as f64 * w.ts(),
        ts: w.ts(),
        a_ref,
    })
}

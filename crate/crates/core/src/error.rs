use std::fmt;

/// Stage of the multi-step estimator, attached to failures so callers can
/// tell which step rejected the record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Fundamental,
    AmplitudeCurve,
    OscillationFrequency,
    LinearFit,
    Polar,
    NonlinearRefine,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::Fundamental => "step 1 (fundamental frequency)",
            Step::AmplitudeCurve => "step 2 (phasor amplitude curve)",
            Step::OscillationFrequency => "step 3 (oscillation frequency)",
            Step::LinearFit => "step 4 (linear least squares)",
            Step::Polar => "step 5 (polar conversion)",
            Step::NonlinearRefine => "step 6 (nonlinear refinement)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sample rate {fs} Hz is below the Nyquist rate {required} Hz of the signal content")]
    BelowNyquist { fs: f64, required: f64 },

    #[error("record too short: {reason}")]
    RecordTooShort { reason: String },

    #[error("DFT window [{start}, {end}] s lies outside the record [{record_start}, {record_end}] s")]
    WindowOutOfRange {
        start: f64,
        end: f64,
        record_start: f64,
        record_end: f64,
    },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("no oscillation detected")]
    NoOscillation,

    #[error("no mode with frequency in ({f_min}, {f_max}) Hz")]
    NoModeInBand { f_min: f64, f_max: f64 },

    #[error("estimate {value} Hz is outside the accepted band [{low}, {high}] Hz")]
    OutOfBand { value: f64, low: f64, high: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{step}: {source}")]
    Estimation {
        step: Step,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at(self, step: Step) -> Self {
        Error::Estimation {
            step,
            source: Box::new(self),
        }
    }

    /// True for failures caused by the input (bad parameters, short records)
    /// rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::BelowNyquist { .. }
            | Error::RecordTooShort { .. }
            | Error::WindowOutOfRange { .. }
            | Error::LengthMismatch(_) => true,
            Error::Estimation { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

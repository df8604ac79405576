use thiserror::Error;

/// Errors raised by grid construction, state preparation, propagation and
/// measurement evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate interval: x_min = {0} must be strictly below x_max = {1}")]
    DegenerateInterval(f64, f64),

    #[error("grid size {0} is not a power of two >= 16")]
    BadGridSize(usize),

    #[error("packet does not fit grid: {0}")]
    PacketDoesNotFit(String),

    #[error("unsupported representation transform: {0}")]
    UnsupportedTransform(String),

    #[error("excessive negative-momentum mass {mass:.3e} (tolerance {tol:.1e})")]
    NegativeMomentumMass { mass: f64, tol: f64 },

    #[error("excessive near-zero-momentum mass {mass:.3e} below k = {k_cut:.3e} (tolerance {tol:.1e})")]
    ZeroMomentumMass { mass: f64, k_cut: f64, tol: f64 },

    #[error("mask removed essentially all probability mass (remaining norm^2 = {0:.3e})")]
    MaskRemovedAllMass(f64),

    #[error("nonpositive segment width {0}")]
    NonpositiveWidth(f64),

    #[error("sampled potential needs at least one segment (got m = {0})")]
    EmptySampling(usize),

    #[error("potential support [{0}, {1}] exceeds grid [{2}, {3}]")]
    SupportExceedsGrid(f64, f64, f64, f64),

    #[error("numerically singular plane-wave matching at k = {k:?} (|denominator| = {denom:.3e})")]
    SingularMatching { k: num_complex::Complex64, denom: f64 },

    #[error("k-grid must be positive and strictly increasing")]
    BadKGrid,

    #[error("scattering curve does not cover the state's momentum grid: {0}")]
    CurveMismatch(String),

    #[error("guard-band mass {mass:.3e} exceeded {threshold:.1e} at t = {t:.6}")]
    GuardBandContamination { mass: f64, threshold: f64, t: f64 },

    #[error("potential failed the tunnel conditions: {0} bound state(s) detected")]
    NotATunnel(usize),

    #[error("time step dt = {dt:.3e} violates the phase-resolution bound (dt * k_eff^2 = {phase:.3} >= pi)")]
    PhaseBound { dt: f64, phase: f64 },

    #[error("detector is invalid: {0}")]
    BadDetector(String),

    #[error("approach III cross-check discrepancy {disc:.3e} exceeds eps_disc = {tol:.1e}")]
    CrossCheckFailed { disc: f64, tol: f64 },

    #[error("race configuration violates a precondition: {0}")]
    BadRaceConfig(String),

    #[error("discrete model dimension {0} must be a power of two >= 64")]
    BadModelDim(usize),

    #[error("flat or empty density: {0}")]
    FlatDensity(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Exit-code class used by the CLI: 2 = usage/config, 3 = numerical health.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io { .. } | Error::BadRaceConfig(_) => 2,
            Error::GuardBandContamination { .. } | Error::CrossCheckFailed { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("{0} is outside the open unit interval")]
    OutsideUnitInterval(String),

    #[error("{lo} and {hi} do not bound a Farey domain")]
    NotFareyDomain { lo: String, hi: String },

    #[error("code length {len} exceeds the limit of {max}")]
    CodeTooLong { len: usize, max: usize },

    #[error("harmonic pick {pick} exceeds the limit of {max}")]
    PickTooLarge { pick: i64, max: i64 },

    #[error("critical exponent must be an odd integer >= 3, got {0}")]
    InvalidCriticalExponent(u32),

    #[error("unknown family selector `{0}`")]
    UnknownFamily(String),

    #[error("derivative {value:e} at step {step} is degenerate")]
    DegenerateDerivative { step: usize, value: f64 },

    #[error("cross-ratio requires a < b < c < d")]
    NonMonotonePoints,

    #[error("denominator {den} exceeds the configured limit {max}")]
    DenominatorTooLarge { den: String, max: u64 },

    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),

    #[error("atlas has no center for {0}")]
    MissingCenter(String),

    #[error("atlas has no locking interval for {0}")]
    MissingLocking(String),

    #[error("degenerate orbit interval of length {0:e}")]
    DegenerateInterval(f64),

    #[error("maximal orbit longer than {0} points")]
    OverflowGuard(u64),

    #[error("cover-sum exponent did not stabilize: {0}")]
    InsufficientDepth(String),

    #[error("box size {eps:e} is below the resolved scale {resolved:e}")]
    ScaleTooFine { eps: f64, resolved: f64 },

    #[error("cutoff {cutoff} too small: mass inequality fails at cell {cell}")]
    CutoffTooSmall { cutoff: i64, cell: String },

    #[error("corrupt atlas: {0}")]
    CorruptAtlas(String),

    #[error("unsupported atlas format version {0}")]
    VersionMismatch(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

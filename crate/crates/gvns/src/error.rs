use thiserror::Error;

/// Errors surfaced by the solver and diagnostics stack.
#[derive(Debug, Error)]
pub enum GvnsError {
    #[error("non-finite input value at flat index {index}")]
    NonFiniteInput { index: usize },

    #[error("conjugate-symmetry violation: relative residual {residual:.3e} exceeds {threshold:.1e}")]
    SymmetryViolation { residual: f64, threshold: f64 },

    #[error("Gevrey multiplier overflow: exponent {exponent:.1} exceeds {limit}; shrink lambda or the grid")]
    MultiplierOverflow { exponent: f64, limit: f64 },

    #[error("spectral fit underresolved: {found} usable shells, need at least {needed}")]
    Underresolved { found: usize, needed: usize },

    #[error("regularity radius collapsed below {floor:.1e} at t = {t}")]
    RadiusCollapsed { t: f64, floor: f64 },

    #[error("instability sentinel at t = {t}: field magnitude grew {factor:.2}x in one step")]
    Instability { t: f64, factor: f64 },

    #[error("velocity support reached the box edge at t = {t}: boundary mass fraction {fraction:.3e} > {limit:.1e}")]
    BoundaryMassEscape { t: f64, fraction: f64, limit: f64 },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config error: {message}")]
    ConfigGeneral { message: String },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("snapshot checksum mismatch at byte offset {offset}: stored {stored:#010x}, computed {computed:#010x}")]
    SnapshotCrc { offset: u64, stored: u32, computed: u32 },

    #[error("unsupported snapshot version {found} (supported: {supported})")]
    SnapshotVersion { found: u32, supported: u32 },

    #[error("verification failed: {0}")]
    BoundViolated(String),

    #[error("run horizon {t_end} exceeds fitted short-time limit T0 = {t0}")]
    HorizonExceedsT0 { t_end: f64, t0: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GvnsError>;

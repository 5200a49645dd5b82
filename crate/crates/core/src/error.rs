use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid register size {size}: must be between 1 and {max}")]
    InvalidSize { size: usize, max: usize },

    #[error("invalid Dicke target (N = {num_qubits}, 2m = {two_m}): need |2m| <= N and 2m = N mod 2")]
    InvalidTarget { num_qubits: usize, two_m: i64 },

    #[error("invalid basis string {0:?}")]
    InvalidBasis(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("support strings carry different excitation counts")]
    MixedExcitations,

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("state still contains excited emitters")]
    ExcitedState,

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid emission amplitudes: |c0|^2 + |c1|^2 = {0}, expected 1")]
    InvalidEmission(f64),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("detector is in exact-phase mode; no geometric phase defined")]
    ModeMismatch,

    #[error("geometry infeasible: only {available} detector directions with phase = 0 mod 2pi, {requested} requested")]
    GeometryInfeasible { requested: usize, available: usize },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("no excited emitter left to detect a photon from")]
    ProtocolOverrun,

    #[error("destructive interference: heralded state has squared norm {0:e}")]
    DestructiveInterference(f64),

    #[error("brute-force path enumeration limited to N <= {max}, got {size}")]
    OracleTooLarge { size: usize, max: usize },

    #[error("fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GeometryInfeasible { .. } => 3,
            Error::DestructiveInterference(_) | Error::ZeroNorm => 4,
            Error::Io(_) => 5,
            _ => 2,
        }
    }

    /// Stable snake_case tag written into error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSize { .. } => "invalid_size",
            Error::InvalidTarget { .. } => "invalid_target",
            Error::InvalidBasis(_) => "invalid_basis",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::MixedExcitations => "mixed_excitations",
            Error::NotNormalized(_) => "not_normalized",
            Error::ExcitedState => "excited_state",
            Error::ZeroNorm => "zero_norm",
            Error::InvalidEmission(_) => "invalid_emission",
            Error::InvalidGeometry(_) => "invalid_geometry",
            Error::ModeMismatch => "mode_mismatch",
            Error::GeometryInfeasible { .. } => "geometry_infeasible",
            Error::InvalidPerturbation(_) => "invalid_perturbation",
            Error::ProtocolOverrun => "protocol_overrun",
            Error::DestructiveInterference(_) => "destructive_interference",
            Error::OracleTooLarge { .. } => "oracle_too_large",
            Error::FidelityOutOfRange(_) => "fidelity_out_of_range",
            Error::InvalidScan(_) => "invalid_scan",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or running an experiment.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateTargets(Vec<usize>),

    #[error("state dimensions do not match: {left} vs {right} qubit(s)")]
    DimensionMismatch { left: usize, right: usize },

    #[error("at least one shot is required")]
    ZeroShots,

    #[error("at least one qubit per state is required")]
    ZeroQubits,

    #[error("amplitude vector length {0} is not a power of two")]
    BadStateLength(usize),

    #[error("statevector norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("depolarizing strength {strength} outside [0, {max}] for {qubits}-qubit gates")]
    NoiseStrengthOutOfBounds {
        strength: f64,
        max: f64,
        qubits: usize,
    },

    #[error("readout flip probability {0} outside [0, 1]")]
    ReadoutOutOfBounds(f64),

    #[error("exact mode cannot be combined with a noise model")]
    ExactModeWithNoise,

    #[error("outcome strings have different lengths: {0} vs {1}")]
    OutcomeLengthMismatch(usize, usize),

    #[error("image has no nonzero pixel, cannot encode")]
    AllZeroImage,

    #[error("negative pixel value {value} at row {row}, column {col}")]
    NegativePixel { row: usize, col: usize, value: f64 },

    #[error("pixel count {0} cannot be amplitude-encoded (need a power of two, at least 2)")]
    PixelCountNotPowerOfTwo(usize),

    #[error("block dimensions {block_rows}x{block_cols} do not divide image {rows}x{cols}")]
    BlocksDontDivide {
        block_rows: usize,
        block_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("image dimensions do not match: {0}x{1} vs {2}x{3}")]
    ImageDimensionMismatch(usize, usize, usize, usize),

    #[error("malformed {format} input: {reason}")]
    MalformedImage { format: &'static str, reason: String },

    #[error("image index {index} out of range, file holds {count}")]
    ImageIndexOutOfRange { index: usize, count: usize },

    #[error("both images are all-zero, average overlap is undefined")]
    UndefinedScore,

    #[error("at least one run is required")]
    ZeroRuns,

    #[error("reference set is empty")]
    EmptyReferences,

    #[error("duplicate reference label {0:?}")]
    DuplicateLabel(String),

    #[error("label {label:?} is invalid: {reason}")]
    BadLabel { label: String, reason: String },

    #[error("linear fit needs at least two distinct abscissa values")]
    DegenerateFit,

    #[error("fidelity sample {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

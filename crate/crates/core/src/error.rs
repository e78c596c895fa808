//! Crate-wide error type.

use std::fmt;

/// Errors produced by workload construction, parsing, configuration, and
/// engine runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Workload has no layers; nothing to profile or run.
    EmptyWorkload,
    /// A qubit index is out of range for the owning object.
    IndexOutOfRange { index: usize, bound: usize },
    /// A qubit appears in more than one gate of the same layer.
    QubitReuse { layer: usize, qubit: usize },
    /// Quantile of an empty sequence.
    EmptySequence,
    /// Quantile fraction outside [0, 1].
    InvalidQuantile(f64),
    /// QASM syntax error.
    Syntax { line: usize, col: usize, msg: String },
    /// Gate outside the supported Clifford+T set.
    UnsupportedGate { gate: String, line: usize },
    /// More than one quantum register declared.
    MultipleQregs { line: usize },
    /// Workload execution scheme does not match the architecture's compute scheme.
    SchemeMismatch { expected: &'static str, found: &'static str },
    /// Profile scheme does not match what the preset's sizing rules need.
    ProfileMismatch { scheme: &'static str, profile: &'static str },
    /// A PPM layer's Pauli weight exceeds the compute region capacity.
    PpmInfeasible { layer: usize, weight: usize, n_comp: usize },
    /// Memory-compute interchange is needed but the swap buffer has size zero.
    BufferRequired { layer: usize },
    /// A layer demands more magic states than the magic buffer can hold.
    MagicBufferTooSmall { layer: usize, demand: usize, q_magic: usize },
    /// No code distance up to the search bound meets the error target.
    DistanceUnreachable { target: f64, logical_ops: u64 },
    /// Invalid configuration value.
    InvalidConfig(String),
    /// Malformed trace or config document.
    Format(String),
    /// Closed-form model assumptions violated (non-uniform workload).
    NonUniformWorkload(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyWorkload => write!(f, "empty workload"),
            Self::IndexOutOfRange { index, bound } => {
                write!(f, "qubit index {index} out of range (n_total = {bound})")
            }
            Self::QubitReuse { layer, qubit } => {
                write!(f, "qubit {qubit} used by more than one gate in layer {layer}")
            }
            Self::EmptySequence => write!(f, "quantile of empty sequence"),
            Self::InvalidQuantile(a) => write!(f, "quantile fraction {a} outside [0, 1]"),
            Self::Syntax { line, col, msg } => {
                write!(f, "syntax error at line {line}, column {col}: {msg}")
            }
            Self::UnsupportedGate { gate, line } => {
                write!(f, "unsupported gate {gate} at line {line}")
            }
            Self::MultipleQregs { line } => {
                write!(f, "multiple quantum registers (second declared at line {line})")
            }
            Self::SchemeMismatch { expected, found } => {
                write!(f, "scheme mismatch: architecture executes {expected}, workload is {found}")
            }
            Self::ProfileMismatch { scheme, profile } => {
                write!(f, "profile/scheme mismatch: {scheme} sizing needs a {profile} profile")
            }
            Self::PpmInfeasible { layer, weight, n_comp } => {
                write!(f, "PPM infeasible: layer {layer} weight {weight} exceeds compute size {n_comp}")
            }
            Self::BufferRequired { layer } => {
                write!(f, "buffer required: layer {layer} swaps qubits but q_buff = 0")
            }
            Self::MagicBufferTooSmall { layer, demand, q_magic } => {
                write!(f, "layer {layer} demands {demand} magic states but q_magic = {q_magic}")
            }
            Self::DistanceUnreachable { target, logical_ops } => {
                write!(f, "no distance <= 99 meets target {target} over {logical_ops} operations")
            }
            Self::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Self::Format(msg) => write!(f, "format error: {msg}"),
            Self::NonUniformWorkload(msg) => write!(f, "non-uniform workload: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

//! `qipc` - measuring how incompatible a physical context is.
//!
//! A context is a quantum state together with two measurements that are
//! carried out on it in sequence. This crate models the full pipeline at
//! desk scale: dense complex matrices, density operators, POVMs, quantum
//! instruments (including Naimark-dilation parent instruments) and the
//! entropic bookkeeping needed to express context incompatibility as the
//! Holevo-bound information an eavesdropper leaks out of the channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] — dense complex matrix kernel (Hermitian eigensolver,
//!   PSD square root, Kronecker product, partial trace).
//! * [`states`] — density matrices, ensembles and contexts.
//! * [`measurements`] — observables (POVM/PVM), Born probabilities,
//!   measurement models.
//! * [`instruments`] — Kraus maps, channels, instruments, Naimark
//!   extensions and parent instruments.
//! * [`info`] — von Neumann entropy, Holevo bound, mutual/conditional
//!   entropy, coherent information, two-qubit concurrence.
//! * [`ipc`] — the incompatibility measures themselves, with and without
//!   a memory system.
//! * [`scenarios`] — worked QKD-style averaging and memory-sweep drivers.
//! * [`verify`] — seeded property suites shared by tests and the CLI.
//!
//! All information quantities are in nats.

pub mod info;
pub mod instruments;
pub mod ipc;
pub mod linalg;
pub mod measurements;
pub mod scenarios;
pub mod states;
pub mod verify;

pub use info::{
    coherent_information, concurrence, conditional_entropy, entropy, holevo_chi,
    mutual_information, old_information,
};
pub use instruments::{Channel, Instrument, KrausMap, NaimarkExtension};
pub use ipc::{LeakReport, MemoryContext};
pub use linalg::{ComplexMatrix, SubsystemDims, C64};
pub use measurements::{MeasurementModel, Observable};
pub use states::{Context, DensityMatrix, Ensemble};

/// Absolute max-norm tolerance for Hermiticity checks.
pub const EPS_HERM: f64 = 1e-9;
/// Most negative eigenvalue accepted before an operator is rejected as not PSD.
pub const EPS_PSD: f64 = 1e-9;
/// Reconstruction tolerance for eigendecompositions and matrix square roots.
pub const EPS_RECON: f64 = 1e-9;
/// Tolerance on trace / probability normalisation.
pub const EPS_TRACE: f64 = 1e-9;
/// Branch weights at or below this floor are treated as vanishing outcomes.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid subsystem dims: {0}")]
    InvalidDims(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("matrix is not Hermitian (max violation {violation:.3e})")]
    NotHermitian { violation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("probabilities sum to {sum} (must be 1 within 1e-9)")]
    ProbabilitySum { sum: f64 },
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("operation requires a sharp observable: {0}")]
    RequiresSharp(String),
    #[error("unsupported pointer observable: {0}")]
    UnsupportedPointer(String),
    #[error("outcome labels do not match: {0}")]
    LabelMismatch(String),
    #[error("outcome labels do not form a product grid: {0}")]
    InvalidLabels(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

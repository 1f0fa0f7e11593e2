use crate::state::QubitRef;

/// Errors produced by the simulation and compilation layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a register must contain at least one electron")]
    EmptyRegister,

    #[error("a register of {0} electrons exceeds the supported maximum of {max}", max = crate::state::MAX_ELECTRONS)]
    RegisterTooLarge(usize),

    #[error("qubit {0} is out of range for a {1}-electron register")]
    QubitOutOfRange(QubitRef, usize),

    #[error("target qubits must be distinct")]
    DuplicateTargets,

    #[error("gates act on 1 or 2 qubits, got {0} targets")]
    UnsupportedArity(usize),

    #[error("matrix is not unitary within tolerance {0:e}")]
    NotUnitary(f64),

    #[error("matrix has dimension {0}, expected {1}")]
    DimensionMismatch(usize, usize),

    #[error("measurement requires at least one target qubit")]
    EmptyMeasurement,

    #[error("this operation requires a {1}-electron register, got {0} electrons")]
    WrongRegisterSize(usize, usize),

    #[error("basis index {0} out of range for dimension {1}")]
    BasisIndexOutOfRange(usize, usize),

    #[error("kept qubits must form a nonempty proper subset of the register")]
    InvalidSubset,

    #[error("gate kind {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("gate kind {0} takes no angle")]
    UnexpectedAngle(&'static str),

    #[error("angles must be finite")]
    NonFiniteAngle,

    #[error("detectors have no unitary; use a shot-based simulation instead")]
    DetectorInUnitary,

    #[error("coulomb couplers require two distinct electrons")]
    CouplerSameElectron,

    #[error("no hardware realization for {0}")]
    UnsupportedGate(String),

    #[error("rewriting did not reach a fixpoint within {0} iterations")]
    NonTerminatingRules(usize),

    #[error("rewrite rule {0:?} does not preserve the circuit unitary")]
    InvalidRule(String),

    #[error("spin amplitudes must be normalized: |a|^2 + |b|^2 = {0}")]
    UnnormalizedSpin(f64),

    #[error("state vector must have unit norm, got squared norm {0}")]
    UnnormalizedState(f64),

    #[error("density matrix is not Hermitian positive semidefinite within tolerance")]
    InvalidDensityMatrix,

    #[error("polarization fit needs at least 4 samples with distinct angles")]
    DegenerateFit,
}

pub type Result<T> = std::result::Result<T, Error>;

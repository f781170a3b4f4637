use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("group order {order} exceeds the supported maximum of {max}")]
    GroupTooLarge { order: usize, max: usize },

    #[error("matrix for element {element} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { element: usize, deviation: f64 },

    #[error("matrices do not respect the group law at ({left}, {right}) (deviation {deviation:.3e})")]
    NotHomomorphism {
        left: usize,
        right: usize,
        deviation: f64,
    },

    #[error("representation is not faithful: elements {first} and {second} map to the same matrix")]
    NotFaithful { first: usize, second: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid character table: {0}")]
    InvalidCharacterTable(String),

    #[error("multiplicity of irrep {irrep} is not an integer (residue {residue:.3e})")]
    NonIntegerMultiplicity { irrep: usize, residue: f64 },

    #[error("tensor power {power} is projective (phases do not cancel), multiplicities are undefined")]
    ProjectivePower { power: usize },

    #[error("no tensor power up to {r_max} contains the regular representation")]
    RMaxExceeded { r_max: usize },

    #[error("explicit irrep matrices are required for irrep {irrep} of dimension {dim}")]
    MissingIrrepMatrices { irrep: usize, dim: usize },

    #[error("numerical degeneracy in irrep {irrep}: found {found} multiplicity vectors, expected {expected}")]
    NumericalDegeneracy {
        irrep: usize,
        found: usize,
        expected: usize,
    },

    #[error("regular representation missing: irrep {irrep} has multiplicity {multiplicity} < dimension {dim}")]
    RegularRepMissing {
        irrep: usize,
        multiplicity: usize,
        dim: usize,
    },

    #[error("token states are not orthonormal (max Gram residue {residue:.3e})")]
    ConditionOneViolated { residue: f64 },

    #[error("token set not closed under the collective action: U_{applied} psi({token}) has overlap {overlap} with psi({expected})")]
    ConditionTwoViolated {
        applied: usize,
        token: usize,
        expected: usize,
        overlap: String,
    },

    #[error("measurement returned the complement outcome (probability {probability:.3e}); input is not a valid encoded state")]
    PerpOutcome { probability: f64 },

    #[error("qudit index {target} out of range for {qudits} qudits")]
    BadTarget { target: usize, qudits: usize },

    #[error("duplicate qudit {0} in target list")]
    DuplicateTargets(usize),

    #[error("control and target sets overlap at qudit {0}")]
    ControlTargetOverlap(usize),

    #[error("projectors are not mutually orthogonal (overlap {overlap:.3e})")]
    NonOrthogonalProjectors { overlap: f64 },

    #[error("state shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("gate-level synthesis needs qubits, representation has dimension {0}")]
    UnsupportedDimension(usize),

    #[error("group is not abelian")]
    NotAbelian,

    #[error("generators do not decompose the group as a direct product: {0}")]
    BadGenerators(String),

    #[error("bad normalization: {0}")]
    BadNormalization(String),

    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

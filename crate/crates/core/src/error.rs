use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("side chain does not close: {0}")]
    ClosureViolation(String),
    #[error("polygon boundary self-intersects between sides {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("closure system is singular for the unknown sides")]
    SingularSystem,
    #[error("closure gives a non-positive length for side {0}")]
    NonpositiveLength(usize),
    #[error("no angle assignment with denominators <= {0} sums to (n-2)π")]
    CannotBalance(i64),
    #[error("unfolding orbit exceeded {0} images")]
    OrbitExplosion(usize),
    #[error("genus formula is not an integer: {0}")]
    NonIntegerGenus(String),
    #[error("homology rank {found} does not match 2g = {expected}")]
    RankMismatch { found: usize, expected: usize },
    #[error("periods {0} and {1} are collinear")]
    DegeneratePair(usize, usize),
    #[error("vector is not an integer combination of D1/C1 and D2/C2")]
    NotInLattice,
    #[error("period relations are not all rational")]
    NotDoublyRational,
    #[error("period pair admits no periodic skeleton")]
    NotPeriodicSkeleton,
    #[error("momentum is not quantized on this lattice: {0}")]
    UnquantizedMomentum(String),
    #[error("plane-wave momenta have different norms")]
    MomentumMismatch,
    #[error("map does not send the polygon onto itself")]
    SymmetryNotAutomorphism,
    #[error("no consistent sign prescription with id {0}")]
    BadPrescription(usize),
    #[error("grid spacing {h} exceeds min edge/8 = {limit}")]
    TooCoarse { h: f64, limit: f64 },
    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("deformation parameter out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

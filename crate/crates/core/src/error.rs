use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("mesh is not orientable")]
    NonOrientable,
    #[error("operation requires a closed mesh, found {0} boundary edges")]
    HasBoundary(usize),
    #[error("mesh has {0} connected components")]
    Disconnected(usize),
    #[error("degenerate face {face}: area {area:e}")]
    DegenerateFace { face: usize, area: f64 },
    #[error("zero normal at vertex {0}")]
    ZeroNormal(usize),
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("normal is not tangent to the sphere (<p, eta> = {0:e})")]
    NotTangent(f64),
    #[error("lattice matrix is singular")]
    SingularLattice,
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("vertex {vertex} has only {directions} distinct neighbour directions")]
    InsufficientNeighbors { vertex: usize, directions: usize },
    #[error("harmonic kernel has dimension {found}, expected 2g = {expected}")]
    KernelDimensionMismatch { found: usize, expected: usize },
    #[error("field is not harmonic (relative residual {0:e})")]
    NotHarmonic(f64),
    #[error("shifted operator is not positive definite (shift {0:e})")]
    NotDefinite(f64),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("cut-off is nonzero on or next to the boundary (vertex {0})")]
    NotCompactlySupported(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

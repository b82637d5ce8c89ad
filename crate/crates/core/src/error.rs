use thiserror::Error;

use crate::simplicial::{Simplex, Vertex};

#[derive(Debug, Error)]
pub enum AkError {
    #[error("simplex {0} is not a face of the complex")]
    NotAFace(Simplex),
    #[error("complex is not pure: facet {0} has dimension {1}, expected {2}")]
    NotPure(Simplex, usize, usize),
    #[error("apex {0} already belongs to the complex")]
    ApexCollision(Vertex),
    #[error("dimension {0} out of range for complex of dimension {1}")]
    DimensionOutOfRange(usize, isize),
    #[error("vertex map is not simplicial: image of {0} is not a face of the target")]
    NotSimplicial(Simplex),
    #[error("vertex {0} has no image under the map")]
    UnmappedVertex(Vertex),
    #[error("source and target share vertex {0}")]
    OverlappingVertices(Vertex),
    #[error("order does not cover the vertex support")]
    BadOrder,
    #[error("parameter r must be at least 3, got {0}")]
    RTooSmall(usize),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("inadmissible bistellar move: {0}")]
    InadmissibleMove(String),
    #[error("construction invariant violated: {0}")]
    Construction(String),
    #[error("missing torus tag {0}")]
    MissingTorus(&'static str),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AkError>;

use crate::causal::SystemError;
use crate::spacetime::DiamondError;

/// Errors from resource, protocol and attack constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A point ordering or region requirement does not hold.
    #[error("geometry: {0}")]
    Geometry(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

impl From<DiamondError> for Error {
    fn from(e: DiamondError) -> Self {
        Error::Geometry(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_strict(a: &crate::spacetime::SpaceTimePoint, b: &crate::spacetime::SpaceTimePoint, what: &str) -> Result<()> {
    if crate::spacetime::strictly_precedes(a, b) {
        Ok(())
    } else {
        Err(Error::Geometry(format!("{what}: {a} must strictly precede {b}")))
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not an involution: deviation {0:e}")]
    NotInvolution(f64),
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("subspaces are not complementary")]
    NotComplementary,
    #[error("dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("no generic element found after {0} draws")]
    GenericityFailure(usize),
    #[error("not in the algebra: residual {0:e}")]
    NotInAlgebra(f64),
    #[error("not in the group: {0}")]
    NotInGroup(String),
    #[error("norm {0:e} exceeds the domain guard")]
    NormTooLarge(f64),
    #[error("not in the compact group: deviation {0:e}")]
    NotCompact(f64),
    #[error("not in the torus: {0}")]
    NotInTorus(String),
    #[error("not in the compact algebra: deviation {0:e}")]
    NotInCompactAlgebra(f64),
    #[error("point of norm {norm} outside the chart of radius {radius}")]
    OutOfChart { norm: f64, radius: f64 },
    #[error("rank {0} is not supported here")]
    RankTooLarge(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

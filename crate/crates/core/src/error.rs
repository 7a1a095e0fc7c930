use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("too few input points: got {got}, need at least {need}")]
    TooFewPoints { got: usize, need: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("curve self-intersects: pairwise radius {radius:e} below resolution floor {floor:e}")]
    SelfIntersecting { radius: f64, floor: f64 },

    #[error("tube of half-width {eps} is not regular (limit {limit})")]
    TubeNotRegular { eps: f64, limit: f64 },

    #[error("curve has no straight ends (η not set or bands not straight)")]
    MissingEta,

    #[error("iterative solver did not converge: {iterations} iterations, relative residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("bad radii: R = {r}, ε = {eps}")]
    BadRadii { r: f64, eps: f64 },

    #[error("mesh construction failed: {0}")]
    MeshFailure(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("least-squares fit is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

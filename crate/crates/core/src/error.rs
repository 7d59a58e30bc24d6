use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("energy {energy} outside the bound-state window ({lo}, {hi})")]
    Domain { energy: f64, lo: f64, hi: f64 },

    #[error("integration overflow near x = {x} at E = {energy}")]
    Overflow { x: f64, energy: f64 },

    #[error("eliminant is not real at E = {energy}: |Im D| = {im:e}, scale = {scale:e}")]
    Inconsistent { energy: f64, im: f64, scale: f64 },

    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("pencil metric is not positive definite (pivot {pivot} = {value:e})")]
    PencilDegenerate { pivot: usize, value: f64 },
}

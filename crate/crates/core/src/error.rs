use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass {index} must be positive and finite, got {value}")]
    InvalidMass { index: usize, value: f64 },

    #[error("bodies {i} and {j} coincide")]
    DegenerateGeometry { i: usize, j: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("constrained Jacobian is rank deficient (singular value ratio {ratio:e})")]
    SingularJacobian { ratio: f64 },

    #[error("configuration is collinear; the reduction needs a non-collinear central configuration")]
    CollinearDegeneracy,

    #[error("F/G eigenvector identity violated by {defect:e}")]
    FGIdentityViolation { defect: f64 },

    #[error("bodies {i} and {j} collide in the transformed potential (distance {distance:e})")]
    Collision { i: usize, j: usize, distance: f64 },

    #[error("collision between bodies {i} and {j} at t = {t}")]
    CollisionDetected { t: f64, i: usize, j: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

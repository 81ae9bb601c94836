use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("near user must be closer than far user (d1 = {d1} m, d2 = {d2} m)")]
    DistanceOrdering { d1: f64, d2: f64 },

    #[error("channel gains must satisfy g1 > g2 (g1 = {g1}, g2 = {g2})")]
    GainOrdering { g1: f64, g2: f64 },

    #[error("power split {0} outside the admissible range [{min}, {max}]", min = crate::ALPHA_MIN, max = crate::ALPHA_MAX)]
    AlphaOutOfRange(f64),

    #[error("quadrature did not converge: estimated error {error:e} after {nodes} nodes")]
    QuadratureNotConverged { error: f64, nodes: usize },

    #[error("objective is not finite at alpha = {at}")]
    NonFiniteObjective { at: f64 },

    #[error("invalid search interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("no feasible power split among the min-max candidates")]
    NoFeasibleCandidate,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

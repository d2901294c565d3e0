use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("Erlang-C system is unstable: offered load R = {r} must be below n = {n}")]
    Unstable { r: f64, n: u64 },
    #[error("stationary distribution needs more than {cap} states to certify the tail")]
    TooManyStates { cap: usize },
    #[error("truncation tail may perturb the order-{order} moment by {bound:e} relative")]
    TruncationInsufficient { order: u32, bound: f64 },
    #[error("moment order {order} exceeds the supported maximum {max}")]
    MomentOrder { order: u32, max: u32 },
    #[error("point x = {x} lies outside the supported range for Poisson-solution evaluation")]
    OutOfRange { x: f64 },
    #[error("third derivative is undefined at the kink x = {x}")]
    AtKink { x: f64 },
    #[error("operation requires {requirement}")]
    Unsupported { requirement: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

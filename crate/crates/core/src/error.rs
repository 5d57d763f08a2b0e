use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector is not horizontal (T-component {vertical:e})")]
    HorizontalityViolation { vertical: f64 },

    #[error("parametrization is degenerate at (u, v) = ({u}, {v})")]
    DegenerateParametrization { u: f64, v: f64 },

    #[error("singular point: |N_h| = {norm_nh:e} is below the singular threshold")]
    SingularPoint { norm_nh: f64 },

    #[error("{what} did not converge (last change {achieved:e})")]
    NoConvergence { what: &'static str, achieved: f64 },

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    DomainExceeded {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("volume {0} is outside the open range (0, pi^2)")]
    VolumeOutOfRange(f64),

    #[error("point lies on the vertical axis L (d_L = {0:e})")]
    OnAxis(f64),

    #[error("point lies outside the solid tube (d_L = {d_l}, radius {radius})")]
    OutsideTube { d_l: f64, radius: f64 },

    #[error("point lies on the equator C_0 (d_L = {0})")]
    OnEquator(f64),

    #[error("sigma' = {rate} >= 1 produces no singular points")]
    NoSingularity { rate: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

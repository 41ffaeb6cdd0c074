use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error(
        "truncation did not converge by n_tr = {n_tr_max}: last deviation {last_deviation:.3e} \
         at n_tr = {last_n_tr} (tolerance {tolerance:.3e})"
    )]
    NonConvergence {
        n_tr_max: usize,
        last_n_tr: usize,
        last_deviation: f64,
        tolerance: f64,
    },

    #[error("state {index} lost {loss:.3e} of its norm at n_fock = {n_fock}")]
    NormLoss {
        index: usize,
        loss: f64,
        n_fock: usize,
    },

    #[error("eigenbasis at n_tr = {n_tr} misses {defect:.3e} of the initial state")]
    IncompleteBasis { n_tr: usize, defect: f64 },

    #[error("trajectories are defined on different time grids")]
    GridMismatch,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("step size fell below {min_dt:e} at t = {t}")]
    StepUnderflow { t: f64, min_dt: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

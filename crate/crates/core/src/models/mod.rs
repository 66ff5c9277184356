//! Model problems: the Schrödinger operator on an interval and a
//! two-interval example without unique continuation.

pub mod checks;
pub mod interval;
pub mod no_ucp;
pub mod ode;
pub mod quadrature;
pub mod spectrum;

use thiserror::Error;

use crate::duistermaat::DuistermaatError;
use crate::linalg::LinalgError;
use crate::maslov::MaslovError;
use crate::symplectic::SymplecticError;

pub use interval::{
    bc_catalog, cauchy_data, cauchy_data_frame, cauchy_data_frame_complex, fundamental_solutions, BcName,
    Basis, CauchyData, CauchyDataPath, FundamentalSolutions, IntervalProblem, Potential,
};
pub use spectrum::{Extension, SpectrumSlice};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("unknown boundary condition {0:?}")]
    UnknownBc(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("no certified lower spectral bound found")]
    NoLowerBound,
    #[error("{0}")]
    Unavailable(String),
    #[error(transparent)]
    Maslov(#[from] MaslovError),
    #[error(transparent)]
    Duistermaat(#[from] DuistermaatError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

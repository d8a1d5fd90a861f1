//! Persistence of the AR(1) chain `X_{n+1} = a X_n + xi_{n+1}` with
//! innovations `xi = +1` (probability `p`) and `xi = -1` (probability `q`).
//!
//! The chain killed on leaving `[0, inf)` is governed by the expanding map
//! `T_a`. Its orbit of zero determines the persistence exponent `lambda_a`,
//! the eigenfunction `V` and the quasi-stationary law `nu_a`.

pub mod dynamics;
pub mod error;
pub mod lumped;
pub mod montecarlo;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use params::ModelParams;

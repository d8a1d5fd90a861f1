//! The eigenvalue equation `R_a(lambda) = 1`, the eigenfunction `V`, the
//! constant `c` and the quasi-stationary law.

mod bounds;
mod cdf;
mod curve;
mod eigen;
mod fixed_point;
mod parry_density;
mod series;
mod solve;

pub use bounds::{check_bounds, BoundsReport, EQUALITY_TOL};
pub use cdf::{quasi_stationary_cdf, CdfValue};
pub use curve::{curve_to_csv, lambda_curve, CurveReport, CurveRow, Plateau};
pub use eigen::{
    eigen_residual, eval_v, integral_cv, integral_cv_nu, killed_operator_residual, Eigenfunction,
    ResidualReport,
};
pub use fixed_point::{quasi_stationarity_check, FixedPointReport};
pub use parry_density::parry_density;
pub use series::{eval_r, SeriesValue, SUM_TOL};
pub use solve::{
    frequency_constant, solve_lambda, solve_lambda_auto, solve_lambda_in, SpectralSolution,
    TAIL_TARGET,
};

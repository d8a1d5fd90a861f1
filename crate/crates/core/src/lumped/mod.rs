//! The finite lumped chain of the stopped process when the orbit of zero
//! has finitely many distinct points, and the sequence operator `A`.

mod chain;
mod eigen;
mod operator;

pub use chain::{build_lumped, persistence_via_matrix, LumpedChain, LumpedDump, StateLabel};
pub use eigen::{leading_eigen, PerronFrobenius, EIGEN_TOL, MAX_POWER_ITER};
pub use operator::{power_convergence_probe, ConvergenceProbe, OperatorA};

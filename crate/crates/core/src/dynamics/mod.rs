//! The map `T_a`, its orbits and digits, return times, domains of the
//! iterates and the reversed-time reconstruction of surviving paths.

mod domain;
mod map;
mod orbit;
mod parry;
mod returns;
mod reversed;

pub use domain::{domain_decomposition, DomainInterval, IntervalDecomposition};
pub(crate) use map::exact_a;
pub use map::{apply_t, apply_t_exact, branch_of, branch_of_exact, Branch, MapOutcome};
pub use orbit::{
    orbit_of, orbit_of_rational, orbit_of_zero, Classification, Extent, Orbit, OrbitRecord,
    DEFAULT_MAX_ITER, EPS_HOLE,
};
pub use parry::{expansion_value, linear_mod_one, parry_digits, parry_digits_exact};
pub use returns::{return_stats, ReturnStats};
pub use reversed::{
    recovered_innovations, reversed_recover, reversed_recover_unconditional, EDGE_TOL,
};

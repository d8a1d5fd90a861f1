//! Fixtures shared by the criterion benches.

use radpersist::ModelParams;

/// Parameter sets covering finite, periodic and aperiodic orbits of zero.
pub fn fixtures() -> Vec<(&'static str, ModelParams)> {
    vec![
        (
            "finite_63_100",
            ModelParams::rational(63, 100, 0.5).unwrap(),
        ),
        ("aperiodic_2_3", ModelParams::rational(2, 3, 0.5).unwrap()),
        (
            "aperiodic_2_3_p03",
            ModelParams::rational(2, 3, 0.3).unwrap(),
        ),
        ("finite_11_20", ModelParams::rational(11, 20, 0.7).unwrap()),
    ]
}

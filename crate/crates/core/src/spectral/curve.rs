use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::solve::{solve_lambda_auto, SpectralSolution};
use crate::dynamics::{Classification, Extent, Orbit};
use crate::params::ModelParams;

/// One grid point of the curve `a -> lambda_a`.
#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub a_num: u64,
    pub a_den: u64,
    pub lambda: Option<f64>,
    pub kappa: Option<Extent>,
    pub kappa_prime: Option<Extent>,
    pub classification: Option<Classification>,
    pub c: Option<f64>,
    pub tail_bound: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    deltas: Vec<bool>,
}

impl CurveRow {
    pub fn solved(a_num: u64, a_den: u64, orbit: &Orbit, sol: &SpectralSolution) -> Self {
        Self {
            a_num,
            a_den,
            lambda: Some(sol.lambda),
            kappa: Some(orbit.kappa()),
            kappa_prime: Some(orbit.kappa_prime()),
            classification: Some(orbit.classification()),
            c: Some(sol.c),
            tail_bound: Some(sol.tail_bound),
            error: None,
            deltas: orbit.deltas().to_vec(),
        }
    }

    pub fn a(&self) -> f64 {
        self.a_num as f64 / self.a_den as f64
    }
}

/// Run of consecutive grid points with a finite orbit and identical digits.
#[derive(Debug, Clone, Serialize)]
pub struct Plateau {
    pub first: usize,
    pub last: usize,
    pub lambda: f64,
    pub bit_identical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub p: f64,
    pub rows: Vec<CurveRow>,
    /// Indices `i` where `lambda_i < lambda_{i-1} - tol`, with the drop.
    pub violations: Vec<(usize, f64)>,
    pub plateaus: Vec<Plateau>,
}

/// Solves for `lambda_a` at each grid point; failures are kept in the rows.
pub fn lambda_curve(
    p: f64,
    a_grid: &[(u64, u64)],
    max_iter: usize,
    monotone_tol: f64,
) -> CurveReport {
    let rows: Vec<CurveRow> = a_grid
        .par_iter()
        .map(|&(n, d)| curve_row(p, n, d, max_iter))
        .collect();

    let mut violations = Vec::new();
    let mut last: Option<f64> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(l) = row.lambda {
            if let Some(prev) = last {
                if l < prev - monotone_tol {
                    violations.push((i, prev - l));
                }
            }
            last = Some(l);
        }
    }

    let mut plateaus = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let finite = matches!(rows[i].classification, Some(Classification::Finite { .. }));
        let mut j = i;
        if finite {
            while j + 1 < rows.len()
                && rows[j + 1].classification == rows[i].classification
                && rows[j + 1].deltas == rows[i].deltas
            {
                j += 1;
            }
        }
        if j > i {
            let lam = rows[i].lambda.unwrap();
            let same = rows[i..=j]
                .iter()
                .all(|r| r.lambda.map(f64::to_bits) == Some(lam.to_bits()));
            plateaus.push(Plateau {
                first: i,
                last: j,
                lambda: lam,
                bit_identical: same,
            });
        }
        i = j + 1;
    }
    CurveReport {
        p,
        rows,
        violations,
        plateaus,
    }
}

fn curve_row(p: f64, n: u64, d: u64, max_iter: usize) -> CurveRow {
    let mut row = CurveRow {
        a_num: n,
        a_den: d,
        lambda: None,
        kappa: None,
        kappa_prime: None,
        classification: None,
        c: None,
        tail_bound: None,
        error: None,
        deltas: Vec::new(),
    };
    match ModelParams::rational(n, d, p).and_then(|m| solve_lambda_auto(&m, max_iter)) {
        Ok((orbit, sol)) => CurveRow::solved(n, d, &orbit, &sol),
        Err(e) => {
            row.error = Some(e.to_string());
            row
        }
    }
}

/// CSV with columns `a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound`.
pub fn curve_to_csv(rows: &[CurveRow]) -> String {
    let mut out =
        String::from("a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound\n");
    for r in rows {
        match &r.error {
            None => {
                let _ = writeln!(
                    out,
                    "{},{},{:.17},{},{},{},{:.17},{:e}",
                    r.a_num,
                    r.a_den,
                    r.lambda.unwrap(),
                    r.kappa.unwrap(),
                    r.kappa_prime.unwrap(),
                    r.classification.unwrap(),
                    r.c.unwrap(),
                    r.tail_bound.unwrap()
                );
            }
            Some(e) => {
                let _ = writeln!(
                    out,
                    "{},{},,,,\"error: {}\",,",
                    r.a_num,
                    r.a_den,
                    e.replace('"', "'")
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_in_kappa_two_window() {
        let rep = lambda_curve(0.5, &[(31, 50), (63, 100), (16, 25)], 10_000, 2e-10);
        assert!(rep.violations.is_empty());
        assert_eq!(rep.plateaus.len(), 1);
        assert!(rep.plateaus[0].bit_identical);
        assert_eq!((rep.plateaus[0].first, rep.plateaus[0].last), (0, 2));
        let csv = curve_to_csv(&rep.rows);
        assert!(csv.starts_with(
            "a_num,a_den,lambda,kappa,kappa_prime,classification,c,tail_bound\n31,50,0.7327"
        ));
    }

    #[test]
    fn bad_points_are_inline() {
        let rep = lambda_curve(0.5, &[(3, 5), (3, 4)], 1000, 2e-10);
        assert!(rep.rows[0].error.is_none());
        assert!(rep.rows[1].error.is_some());
        assert!(curve_to_csv(&rep.rows).contains("3,4,,,,\"error:"));
    }
}

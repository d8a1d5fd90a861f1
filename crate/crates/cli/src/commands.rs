use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use radpersist::dynamics::{orbit_of, orbit_of_rational, orbit_of_zero, Orbit};
use radpersist::lumped::{build_lumped, leading_eigen, persistence_via_matrix};
use radpersist::montecarlo::{
    estimate_conditional_cdf, estimate_lambda_ratio, estimate_persistence, MCConfig, MCEstimate,
};
use radpersist::spectral::{
    curve_to_csv, lambda_curve, quasi_stationary_cdf, solve_lambda_auto, CurveRow,
};
use radpersist::{Error, ModelParams};
use serde::Serialize;

use crate::args::{parse_a, parse_a_grid, parse_decimal, parse_fraction, parse_real_grid, AValue};
use crate::manifest::RunManifest;
use crate::{Cli, Command, MatrixFormat};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSummable { .. }
            | Error::BracketFailure { .. }
            | Error::NoConvergence { .. }
            | Error::InsufficientOrbit { .. }
            | Error::DegenerateEstimate(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CmdResult<T> = Result<T, CliError>;

/// Text output plus the inputs that determine it.
struct Output {
    text: String,
    params: BTreeMap<String, String>,
    options: BTreeMap<String, String>,
}

fn entries<const N: usize>(items: [(&str, String); N]) -> BTreeMap<String, String> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn run(cli: &Cli) -> CmdResult<()> {
    let (name, out) = match &cli.command {
        Command::Orbit { a, x, max_iter } => ("orbit", cmd_orbit(cli, a, x.as_deref(), *max_iter)?),
        Command::Lambda {
            p,
            a,
            a_grid,
            max_iter,
        } => (
            "lambda",
            cmd_lambda(cli, *p, a.as_deref(), a_grid.as_deref(), *max_iter)?,
        ),
        Command::Cdf {
            a,
            p,
            grid,
            max_iter,
        } => ("cdf", cmd_cdf(cli, a, *p, grid, *max_iter)?),
        Command::Lumped { a, p, format } => ("lumped", cmd_lumped(cli, a, *p, *format)?),
        Command::Validate {
            a,
            p,
            n,
            reps,
            seed,
        } => ("validate", cmd_validate(cli, a, *p, *n, *reps, *seed)?),
        Command::Simulate {
            a,
            p,
            n,
            reps,
            seed,
            x0,
            ecdf,
        } => (
            "simulate",
            cmd_simulate(cli, a, *p, *n, *reps, *seed, *x0, ecdf.as_deref())?,
        ),
    };
    emit(cli, name, out)
}

fn emit(cli: &Cli, name: &str, out: Output) -> CmdResult<()> {
    let mut options = out.options;
    options.insert("inexact".into(), cli.inexact.to_string());
    options.insert("experimental".into(), cli.experimental.to_string());
    let text = out.text.replace(
        "{config_hash}",
        &RunManifest::new(name, out.params.clone(), options.clone()).config_hash,
    );
    match &cli.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            std::fs::write(path, &text).map_err(io)?;
            let mut manifest = RunManifest::new(name, out.params, options);
            manifest.output_path = path.display().to_string();
            let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            std::fs::write(RunManifest::path_for(path), json + "\n").map_err(io)
        }
    }
}

fn model(cli: &Cli, a: &str, p: f64) -> CmdResult<(AValue, ModelParams)> {
    let value = parse_a(a, cli.inexact).map_err(CliError::Validation)?;
    let params = value.params(p, cli.experimental)?;
    Ok((value, params))
}

fn zero_orbit(params: &ModelParams, max_iter: usize) -> CmdResult<Orbit> {
    Ok(match params.exact_a() {
        Some(_) => orbit_of_zero(params, max_iter)?,
        None => orbit_of(params, 0.0, max_iter)?,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn cmd_orbit(cli: &Cli, a: &str, x: Option<&str>, max_iter: usize) -> CmdResult<Output> {
    let (_, params) = model(cli, a, 0.5)?;
    let orbit = match x {
        None => zero_orbit(&params, max_iter)?,
        Some(x) => {
            let exact = parse_fraction(x).or_else(|_| parse_decimal(x));
            match (exact, params.exact_a()) {
                (Ok((n, d)), Some(_)) => {
                    let start = BigRational::new(BigInt::from(n), BigInt::from(d));
                    orbit_of_rational(&params, &start, max_iter)?
                }
                (Ok((n, d)), None) => orbit_of(&params, n as f64 / d as f64, max_iter)?,
                (Err(_), _) => {
                    let x: f64 = x
                        .parse()
                        .map_err(|_| CliError::Validation(format!("bad start point {x:?}")))?;
                    orbit_of(&params, x, max_iter)?
                }
            }
        }
    };
    Ok(Output {
        text: json(&orbit.to_record(&params)),
        params: entries([("a", a.to_string())]),
        options: entries([("x", format!("{x:?}")), ("max_iter", max_iter.to_string())]),
    })
}

fn cmd_lambda(
    cli: &Cli,
    p: f64,
    a: Option<&str>,
    grid: Option<&str>,
    max_iter: usize,
) -> CmdResult<Output> {
    let (text, key, value) = match (a, grid) {
        (Some(a), _) => {
            let (value, params) = model(cli, a, p)?;
            let (orbit, sol) = solve_lambda_auto(&params, max_iter)?;
            if sol.closed_form {
                eprintln!("note: closed form a <= 1/2, lambda = p");
            }
            let (n, d) = value.fraction();
            (
                curve_to_csv(&[CurveRow::solved(n, d, &orbit, &sol)]),
                "a",
                a.to_string(),
            )
        }
        (None, Some(g)) => {
            if cli.experimental {
                return Err(CliError::Validation(
                    "--a-grid does not support --experimental".into(),
                ));
            }
            let points = parse_a_grid(g).map_err(CliError::Validation)?;
            if !(p > 0.0 && p < 1.0) {
                return Err(CliError::Validation(format!("p = {p} must lie in (0, 1)")));
            }
            let report = lambda_curve(p, &points, max_iter, 2e-10);
            for (i, drop) in &report.violations {
                eprintln!("warning: lambda decreases by {drop:e} at grid point {i}");
            }
            (curve_to_csv(&report.rows), "a_grid", g.to_string())
        }
        (None, None) => return Err(CliError::Validation("give --a or --a-grid".into())),
    };
    Ok(Output {
        text,
        params: entries([(key, value), ("p", p.to_string())]),
        options: entries([("max_iter", max_iter.to_string())]),
    })
}

fn cmd_cdf(cli: &Cli, a: &str, p: f64, grid: &str, max_iter: usize) -> CmdResult<Output> {
    let (_, params) = model(cli, a, p)?;
    let zs = parse_real_grid(grid).map_err(CliError::Validation)?;
    let (_, sol) = solve_lambda_auto(&params, max_iter)?;
    let mut text = String::from("z,cdf,tail_bound\n");
    for z in zs {
        let v = quasi_stationary_cdf(&params, &sol, z)?;
        if v.boundary_warning {
            eprintln!("warning: orbit of z = {z} passes close to the hole; tail bound widened");
        }
        let _ = writeln!(text, "{},{:.17},{:e}", z, v.cdf, v.tail_bound);
    }
    Ok(Output {
        text,
        params: entries([("a", a.to_string()), ("p", p.to_string())]),
        options: entries([
            ("grid", grid.to_string()),
            ("max_iter", max_iter.to_string()),
        ]),
    })
}

fn cmd_lumped(cli: &Cli, a: &str, p: f64, format: MatrixFormat) -> CmdResult<Output> {
    let (_, params) = model(cli, a, p)?;
    let orbit = zero_orbit(&params, 10_000)?;
    let chain = build_lumped(&params, &orbit)?;
    let text = match format {
        MatrixFormat::Json => json(&chain.dump()),
        MatrixFormat::Csv => chain.to_csv(),
    };
    Ok(Output {
        text,
        params: entries([("a", a.to_string()), ("p", p.to_string())]),
        options: entries([("format", format!("{format:?}").to_lowercase())]),
    })
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    difference: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    a: String,
    p: f64,
    n: usize,
    reps: u64,
    seed: u64,
    lambda_analytic: f64,
    lambda_lumped: Option<f64>,
    lambda_matrix_ratio: Option<f64>,
    lambda_mc: MCEstimate,
    persistence_matrix: Option<f64>,
    persistence_mc: MCEstimate,
    checks: Vec<Check>,
    all_pass: bool,
    config_hash: &'static str,
}

/// Horizon of the matrix-power ratio reported by `validate`.
const RATIO_HORIZON: usize = 200;

fn cmd_validate(cli: &Cli, a: &str, p: f64, n: usize, reps: u64, seed: u64) -> CmdResult<Output> {
    let (_, params) = model(cli, a, p)?;
    if n < 6 {
        return Err(CliError::Validation("validate needs --n >= 6".into()));
    }
    let (orbit, sol) = solve_lambda_auto(&params, 10_000)?;
    let chain = if orbit.kappa_prime().finite().is_some() && orbit.is_exact() {
        Some(build_lumped(&params, &orbit)?)
    } else {
        None
    };
    let n_lo = n / 2;
    let cfg = MCConfig::new(seed, reps, n);
    let persistence_mc = estimate_persistence(&params, &cfg)?;
    let lambda_mc = estimate_lambda_ratio(&params, &cfg, n_lo, n)?;

    let mut checks = Vec::new();
    let (mut lambda_lumped, mut lambda_matrix_ratio, mut persistence_matrix, mut bias) =
        (None, None, None, 0.0);
    if let Some(chain) = &chain {
        let pf = leading_eigen(&chain.transient_block())?;
        let ratio = persistence_via_matrix(chain, RATIO_HORIZON + 1)
            / persistence_via_matrix(chain, RATIO_HORIZON);
        let exact = persistence_via_matrix(chain, n);
        let finite_n = (exact / persistence_via_matrix(chain, n_lo)).powf(1.0 / (n - n_lo) as f64);
        bias = (finite_n - sol.lambda).abs();
        checks.push(check(
            "lumped eigenvalue vs analytic",
            pf.lambda - sol.lambda,
            1e-8,
        ));
        checks.push(check(
            "matrix power ratio vs analytic",
            ratio - sol.lambda,
            1e-7,
        ));
        checks.push(check(
            "MC persistence vs matrix",
            persistence_mc.value - exact,
            3.0 * persistence_mc.stderr,
        ));
        lambda_lumped = Some(pf.lambda);
        lambda_matrix_ratio = Some(ratio);
        persistence_matrix = Some(exact);
    }
    checks.push(check(
        "MC lambda ratio vs analytic",
        lambda_mc.value - sol.lambda,
        3.0 * lambda_mc.stderr + bias,
    ));
    let all_pass = checks.iter().all(|c| c.pass);
    let report = ValidateReport {
        a: a.to_string(),
        p,
        n,
        reps,
        seed,
        lambda_analytic: sol.lambda,
        lambda_lumped,
        lambda_matrix_ratio,
        lambda_mc,
        persistence_matrix,
        persistence_mc,
        checks,
        all_pass,
        config_hash: "{config_hash}",
    };
    Ok(Output {
        text: json(&report),
        params: entries([("a", a.to_string()), ("p", p.to_string())]),
        options: entries([
            ("n", n.to_string()),
            ("reps", reps.to_string()),
            ("seed", seed.to_string()),
        ]),
    })
}

fn check(name: &'static str, diff: f64, tolerance: f64) -> Check {
    Check {
        name,
        difference: diff,
        tolerance,
        pass: diff.abs() <= tolerance,
    }
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    estimate: f64,
    stderr: f64,
    ci95: (f64, f64),
    reps: u64,
    seed: u64,
    config_hash: &'static str,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cli: &Cli,
    a: &str,
    p: f64,
    n: usize,
    reps: u64,
    seed: u64,
    x0: f64,
    ecdf: Option<&str>,
) -> CmdResult<Output> {
    let (_, params) = model(cli, a, p)?;
    let cfg = MCConfig::new(seed, reps, n).with_start(x0);
    let text = match ecdf {
        None => {
            let est = estimate_persistence(&params, &cfg)?;
            json(&SimulateReport {
                estimate: est.value,
                stderr: est.stderr,
                ci95: est.ci95,
                reps,
                seed,
                config_hash: "{config_hash}",
            })
        }
        Some(g) => {
            let zs = parse_real_grid(g).map_err(CliError::Validation)?;
            let r = estimate_conditional_cdf(&params, &cfg, &zs)?;
            let mut text = String::from("z,ecdf\n");
            for (z, f) in r.grid.iter().zip(&r.ecdf) {
                let _ = writeln!(text, "{z},{f}");
            }
            eprintln!(
                "survivors {} of {}, KS {:.4}, DKW 95% half-width {:.4}",
                r.survivors, r.attempts, r.ks, r.dkw_eps
            );
            text
        }
    };
    Ok(Output {
        text,
        params: entries([("a", a.to_string()), ("p", p.to_string())]),
        options: entries([
            ("n", n.to_string()),
            ("reps", reps.to_string()),
            ("seed", seed.to_string()),
            ("x0", x0.to_string()),
            ("ecdf", ecdf.unwrap_or("").to_string()),
        ]),
    })
}

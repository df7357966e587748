//! `momentforge`: verification suites and catalog evaluation from the shell.
//!
//! Exit status: 0 on success, 1 when a verification or evaluation fails,
//! 2 on usage errors (bad flags, unknown catalog ids).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use momentforge::catalog::{self, CatalogObject, Params};
use momentforge::hermite;
use momentforge::measure::{self, Measure};
use momentforge::verify::{self, Suite, VerifyConfig};
use momentforge::Error;
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "momentforge", version, about = "Infinitely divisible moment sequences: evaluation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum)]
    output: Option<Output>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out_path: Option<PathBuf>,
    /// Extra numeric parameter, key=value (alpha, beta, tol). Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite: hankel, bernstein-rep, qseries, semigroup, hermite or all.
    Verify {
        suite: String,
        /// Relative tolerance of the Hankel positivity checks.
        #[arg(long, default_value_t = verify::DEFAULT_HANKEL_TOL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Moments s_0..s_N of a catalog object.
    Moments {
        id: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Mellin transform at a complex point, e.g. --z 2+1i.
    Mellin {
        id: String,
        #[arg(long)]
        z: String,
        #[command(flatten)]
        common: Common,
    },
    /// Atoms of an atomic catalog measure.
    Atoms {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate G(t, x) with certified tails on a grid.
    HermiteScan {
        #[arg(long, default_value_t = -0.95, allow_hyphen_values = true)]
        tmin: f64,
        #[arg(long, default_value_t = 0.95, allow_hyphen_values = true)]
        tmax: f64,
        #[arg(long, default_value_t = 0.05)]
        tstep: f64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 0.25)]
        xstep: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Plot-ready table: n, s_n, ln s_n and the Carleman term s_n^(-1/(2n)).
    Table {
        id: String,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure classes mapped to exit codes.
enum Fail {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Fail::Usage(e.to_string()),
            _ => Fail::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Numeric(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail::Numeric(format!("csv error: {e}"))
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn resolve(id: &str) -> Result<CatalogObject, Fail> {
    // any failure to build the object from its id is a usage error
    catalog::parse_id(id).map_err(|e| Fail::Usage(format!("cannot resolve '{id}': {e}")))
}

fn params(common: &Common) -> Result<Params, Fail> {
    let mut p = Params::default();
    for pair in &common.params {
        p.insert_pair(pair).map_err(|e| Fail::Usage(e.to_string()))?;
    }
    Ok(p)
}

fn emit(common: &Common, body: &[u8]) -> Result<(), Fail> {
    match &common.out_path {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body)?,
    }
    Ok(())
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, Fail> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Fail::Numeric(e.to_string()))
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s.into_bytes()
}

fn run(cli: Cli) -> Result<bool, Fail> {
    match cli.command {
        Command::Verify { suite, tol, common } => {
            let suite = Suite::from_str(&suite).map_err(|e| Fail::Usage(e.to_string()))?;
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Fail::Usage(format!("--tol must be positive, got {tol}")));
            }
            let report = verify::run_suite(suite, &VerifyConfig { hankel_tol: tol })?;
            let body = match common.output.unwrap_or(Output::Json) {
                Output::Json => {
                    let mut s = report.to_json_string();
                    s.push('\n');
                    s.into_bytes()
                }
                Output::Csv => csv_bytes(
                    &["suite", "name", "max_residual", "threshold", "pass", "error"],
                    report
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.suite.to_string(),
                                c.name.clone(),
                                num(c.max_residual),
                                num(c.threshold),
                                c.pass.to_string(),
                                c.error.clone().unwrap_or_default(),
                            ]
                        })
                        .collect(),
                )?,
            };
            emit(&common, &body)?;
            for f in report.failures() {
                eprintln!("FAIL {} / {}: residual {} > {}", f.suite, f.name, f.max_residual, f.threshold);
            }
            Ok(report.pass)
        }
        Command::Moments { id, n_max, common } => {
            let obj = resolve(&id)?;
            let p = params(&common)?;
            let s = obj.moments(&p, n_max)?;
            let values = (0..=n_max).map(|n| s.get(n)).collect::<momentforge::Result<Vec<f64>>>()?;
            let label = if matches!(obj, CatalogObject::Hp { .. }) { "c_k" } else { "s_n" };
            let body = match common.output.unwrap_or(Output::Csv) {
                Output::Csv => csv_bytes(
                    &["n", label],
                    values.iter().enumerate().map(|(n, v)| vec![n.to_string(), num(*v)]).collect(),
                )?,
                Output::Json => json_bytes(&serde_json::json!({ "id": id, label: values })),
            };
            emit(&common, &body)?;
            Ok(true)
        }
        Command::Mellin { id, z, common } => {
            let obj = resolve(&id)?;
            let p = params(&common)?;
            let z = Complex64::from_str(z.trim()).map_err(|_| Fail::Usage(format!("cannot parse --z '{z}'")))?;
            let m = obj.mellin(&p, z)?;
            let body = match common.output.unwrap_or(Output::Csv) {
                Output::Csv => csv_bytes(
                    &["re_z", "im_z", "re", "im", "abs_error"],
                    vec![vec![num(z.re), num(z.im), num(m.value.re), num(m.value.im), num(m.abs_error)]],
                )?,
                Output::Json => json_bytes(&serde_json::json!({
                    "id": id, "z": [z.re, z.im], "value": [m.value.re, m.value.im], "abs_error": m.abs_error,
                })),
            };
            emit(&common, &body)?;
            Ok(true)
        }
        Command::Atoms { id, common } => {
            let obj = resolve(&id)?;
            let p = params(&common)?;
            let atoms = obj.atoms(&p)?;
            let body = match common.output.unwrap_or(Output::Json) {
                Output::Json => json_bytes(&measure::to_json(&Measure::Atomic(atoms))),
                Output::Csv => {
                    let mut rows = Vec::new();
                    if atoms.zero_mass() > 0.0 {
                        rows.push(vec![num(0.0), num(atoms.zero_mass())]);
                    }
                    rows.extend(atoms.atoms().iter().map(|&(x, w)| vec![num(x), num(w)]));
                    csv_bytes(&["location", "weight"], rows)?
                }
            };
            emit(&common, &body)?;
            Ok(true)
        }
        Command::HermiteScan { tmin, tmax, tstep, xmin, xmax, xstep, tol, common } => {
            let tg = hermite::grid(tmin, tmax, tstep).map_err(|e| Fail::Usage(e.to_string()))?;
            let xg = hermite::grid(xmin, xmax, xstep).map_err(|e| Fail::Usage(e.to_string()))?;
            let r = hermite::positivity_scan(&tg, &xg, tol)?;
            let body = match common.output.unwrap_or(Output::Csv) {
                Output::Csv => csv_bytes(
                    &["t", "x", "G", "tail_bound"],
                    r.points
                        .iter()
                        .map(|g| vec![num(g.t), num(g.x), num(g.value), num(g.tail_bound)])
                        .collect(),
                )?,
                Output::Json => json_bytes(&serde_json::to_value(&r).expect("json")),
            };
            emit(&common, &body)?;
            if !r.all_positive {
                eprintln!("G is not certified positive: minimum lower bound {}", r.min_lower_bound);
            }
            Ok(r.all_positive)
        }
        Command::Table { id, n_max, common } => {
            let obj = resolve(&id)?;
            let p = params(&common)?;
            let s = obj.moments(&p, n_max)?;
            let mut rows = Vec::new();
            for n in 0..=n_max {
                let ln = s.ln_get(n)?;
                let carleman = if n == 0 { f64::NAN } else { (-ln / (2.0 * n as f64)).exp() };
                let v = s.get(n).unwrap_or(f64::INFINITY);
                rows.push((n, v, ln, carleman));
            }
            let body = match common.output.unwrap_or(Output::Csv) {
                Output::Csv => csv_bytes(
                    &["n", "s_n", "ln_s_n", "carleman_term"],
                    rows.iter()
                        .map(|&(n, v, l, c)| vec![n.to_string(), num(v), num(l), num(c)])
                        .collect(),
                )?,
                Output::Json => json_bytes(&serde_json::json!({
                    "id": id,
                    "rows": rows.iter().map(|&(n, v, l, c)| serde_json::json!({
                        "n": n, "s_n": v, "ln_s_n": l, "carleman_term": c,
                    })).collect::<Vec<_>>(),
                })),
            };
            emit(&common, &body)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_cli::input::{fit_dim, parse_evector, parse_reals};
use hardy_cli::suites::{convergence_csv, weight_csv};
use hardy_cli::{run_suite, Report, RunConfig, Status};
use hardy_core::hardy_chi::{mc_f_transform, f_transform, HardyChiFunction, NormStudy};
use hardy_core::hardy_w::HardyWFunction;
use hardy_core::semigroups::{gw_mult, gw_mult_series, gw_shift, gw_shift_quadrature, DEFAULT_NODES};
use hardy_core::unitary::haar_test;
use hardy_core::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Truncated Fock-space, Hardy-space and Haar-measure verification suites")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Comma-separated unitary levels.
    #[arg(long, visible_alias = "level", global = true)]
    levels: Option<String>,
    /// Truncation as N,d.
    #[arg(long, global = true)]
    trunc: Option<String>,
    /// Tolerance override prefix=value; repeatable.
    #[arg(long, global = true)]
    tol: Vec<String>,
    /// W, H or BARGMANN.
    #[arg(long, global = true)]
    pairing: Option<String>,
    /// MONOMIAL, W_ADJOINT or BARGMANN_ADJOINT.
    #[arg(long, global = true)]
    variant: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for reports, or output file for single results.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Weight constants and basis norms for every diagram up to degree N, as CSV.
    DumpWeights,
    /// Evaluate a stored function at a point.
    Eval {
        /// JSON function file.
        #[arg(long)]
        function: PathBuf,
        /// Point as comma-separated re or re:im entries.
        #[arg(long)]
        x: String,
    },
    /// Haar moment tests at each level.
    HaarTest,
    /// Monte Carlo transform of a stored unitary-model function.
    Ftransform {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        x: String,
    },
    /// Gauss-Weierstrass semigroup comparison table.
    Gw {
        #[arg(long)]
        function: PathBuf,
        /// Direction vector.
        #[arg(long)]
        a: String,
        /// Comma-separated times.
        #[arg(long, default_value = "0.1,0.5,1")]
        r: String,
        /// SHIFT (exp(r a*^2)) or MULT (heat flow along a).
        #[arg(long, default_value = "SHIFT")]
        which: String,
    },
    /// Quaternion, Heisenberg group and Weyl representation checks.
    Heisenberg,
    /// Run a verification suite (or `all`) and write JSON and CSV reports.
    Run { suite: String },
}

fn resolve(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::parse_text(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.seed {
        cfg.set("seed", &v.to_string())?;
    }
    if let Some(v) = common.samples {
        cfg.set("samples", &v.to_string())?;
    }
    if let Some(v) = &common.levels {
        cfg.set("levels", v)?;
    }
    if let Some(v) = &common.trunc {
        cfg.set("trunc", v)?;
    }
    for t in &common.tol {
        let (k, v) = hardy_cli::config::parse_tolerance(t)?;
        cfg.tolerances.insert(k, v);
    }
    if let Some(v) = &common.pairing {
        cfg.set("pairing", v)?;
    }
    if let Some(v) = &common.variant {
        cfg.set("variant", v)?;
    }
    if let Some(v) = common.workers {
        cfg.workers = Some(v);
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    Ok(cfg)
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Prints to stdout, or writes to `--out` when it was given.
fn emit(common: &Common, value: &serde_json::Value) -> Result<()> {
    emit_text(common, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn emit_text(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn write_report(report: &Report, cfg: &RunConfig) -> Result<bool> {
    let mut written = report.write(&cfg.out)?;
    for (name, table) in &report.tables {
        if name.ends_with("norm_convergence") {
            let studies: Vec<NormStudy> = serde_json::from_value(table.clone())?;
            let path = cfg.out.join(format!("{}_convergence.csv", report.suite));
            fs::write(&path, convergence_csv(&studies))?;
            written.push(path);
        }
    }
    for c in &report.cases {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Report => "INFO",
        };
        let tol = c.tolerance.map(|t| format!(" (tol {t:e})")).unwrap_or_default();
        println!("{tag} {} residual {:e}{tol}", c.id, c.residual);
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    let ok = report.passed();
    if !ok {
        let names: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
        eprintln!("failing cases: {}", names.join(", "));
    }
    Ok(ok)
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = resolve(&cli.common)?;
    match &cli.command {
        Command::DumpWeights => emit_text(&cli.common, &weight_csv(cfg.spec.max_degree))?,
        Command::Eval { function, x } => {
            let f = HardyWFunction::from_json(&read_json(function)?)?;
            let x = fit_dim(parse_evector(x)?, f.spec().dim)?;
            let v = f.evaluate(&x)?;
            emit(&cli.common, &json!({ "pairing": f.pairing().name(), "value": [v.re, v.im] }))?;
        }
        Command::HaarTest => {
            let rows = cfg
                .levels
                .iter()
                .map(|&m| haar_test(m, cfg.samples, cfg.seed))
                .collect::<Result<Vec<_>>>()?;
            emit(&cli.common, &serde_json::to_value(rows)?)?;
        }
        Command::Ftransform { function, x } => {
            let f = HardyChiFunction::from_json(&read_json(function)?)?;
            let x = fit_dim(parse_evector(x)?, f.spec().dim)?;
            let limit = f_transform(&f, cfg.pairing).evaluate(&x)?;
            let mut rows = Vec::new();
            for &m in &cfg.levels {
                match mc_f_transform(&f, &x, m, cfg.samples, cfg.seed) {
                    Ok(est) => rows.push(json!({
                        "level": m,
                        "value": [est.re.mean, est.im.mean],
                        "stderr": [est.re.stderr, est.im.stderr],
                    })),
                    Err(Error::IndexOutOfRange { .. }) => rows.push(json!({ "level": m, "value": null })),
                    Err(e) => return Err(e),
                }
            }
            emit(&cli.common, &json!({
                "pairing": cfg.pairing.name(),
                "transform": [limit.re, limit.im],
                "levels": rows,
            }))?;
        }
        Command::Gw { function, a, r, which } => {
            let f = HardyWFunction::from_json(&read_json(function)?)?;
            let a = fit_dim(parse_evector(a)?, f.spec().dim)?;
            let mut rows = Vec::new();
            for t in parse_reals(r)? {
                let (quad, oracle) = match which.to_ascii_uppercase().as_str() {
                    "SHIFT" => (gw_mult(&f, &a, t, DEFAULT_NODES)?.value, gw_mult_series(&f, &a, t)?.value),
                    "MULT" => (gw_shift_quadrature(&f, &a, t, DEFAULT_NODES)?, gw_shift(&f, &a, t)?),
                    other => return Err(Error::Parse(format!("unknown semigroup '{other}'"))),
                };
                rows.push(json!({
                    "r": t,
                    "quadrature_vs_closed_form": quad.distance(&oracle)?,
                    "norm": oracle.norm(),
                    "result": oracle.to_json(),
                }));
            }
            emit(&cli.common, &json!({ "which": which.to_ascii_uppercase(), "rows": rows }))?;
        }
        Command::Heisenberg => return write_report(&run_suite("heisenberg", &cfg)?, &cfg),
        Command::Run { suite } => return write_report(&run_suite(suite, &cfg)?, &cfg),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

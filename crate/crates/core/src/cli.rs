//! The `doubling` command line.
//!
//! Exit codes: 0 success, 1 a verification reported `pass = false`, 2 usage
//! or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::achart::{count_constant, cover_monomial_graph, verify_achart, MonomialData};
use crate::annulus::{covering_from_layout, AnnulusLayout};
use crate::chart::{set_tolerance, EtaParams};
use crate::error::{invalid, CoverError, Result};
use crate::io::{load_achart_set, load_covering, save_achart_set, save_covering, save_polydisc};
use crate::levelset::{base_eta, cover_monomial_level_set};
use crate::polydisc::{eta_from_delta, PolydiscCover};
use crate::verify::{
    certify_doubling, chain_between, check_coverage, fit_log_exponent, linear_fit,
    scaling_experiment, write_csv, Experiment,
};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "doubling", version = VERSION, about = "Build and check explicit doubling coverings")]
pub struct Cli {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for residual checks (default 1e-10, or ATLAS_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a covering and write it as JSON.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Print eta = (c_lower delta^d / C_unit)^(1/alpha0).
    Eta(EtaArgs),
    /// Check a covering or a-chart file.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Shortest doubling chain between two points.
    Chain(ChainArgs),
    /// Sweep a construction over a parameter grid and write CSV.
    Scaling(ScalingArgs),
}

#[derive(Debug, Subcommand)]
enum CoverCmd {
    /// Whitney disks covering {delta <= |z| <= 1}.
    Annulus {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Covering of {eta <= |x_i| <= 1} in C^n minus the coordinate hyperplanes.
    Polydisc {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, required_unless_present = "count_only")]
        out: Option<PathBuf>,
        /// Print the plan and chart count without generating charts.
        #[arg(long)]
        count_only: bool,
    },
    /// Covering of the level set {x^alpha = c}.
    Levelset {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<u32>,
        /// RE,IM (or RE).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        c: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Real a-charts for the graph of x -> coeff x^mu over (eps, 1)^m.
    Graph {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        coeff: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct EtaArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    c_lower: f64,
    #[arg(long)]
    c_unit: f64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    alpha0: u32,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// Sample the target region and check every point is covered.
    Coverage {
        #[arg(long)]
        covering: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Certify that every chart's gamma-extension stays in the ambient.
    Doubling {
        #[arg(long)]
        covering: PathBuf,
    },
    /// Check the a-chart bound for every chart in an a-chart file.
    Achart {
        #[arg(long)]
        charts: PathBuf,
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long)]
    covering: PathBuf,
    /// Comma-separated complex coordinates, e.g. 0.5,-0.1+0.2i
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Annulus,
    Polydisc,
    Levelset,
    Graph,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    #[arg(long, value_enum)]
    experiment: ExperimentKind,
    /// Strictly descending parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    zeta: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, value_delimiter = ',', default_value = "2,1")]
    alpha: Vec<u32>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1"
    )]
    mu: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    coeff: f64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!(
        "{}",
        serde_json::to_string(value).map_err(|e| CoverError::Format(e.to_string()))?
    );
    Ok(())
}

fn parse_point(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|t| {
            Complex64::from_str(t.trim())
                .map_err(|_| invalid(format!("cannot parse complex number `{t}`")))
        })
        .collect()
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cover(cmd: CoverCmd) -> Result<i32> {
    match cmd {
        CoverCmd::Annulus { delta, zeta, out } => {
            let layout = AnnulusLayout::new(delta, zeta)?;
            save_covering(&covering_from_layout(&layout)?, &out)?;
            print_json(&json!({
                "kappa": layout.count(),
                "rings": layout.rings(),
                "per_ring": layout.per_ring(),
                "construction_constant": layout.construction_constant(),
            }))?;
        }
        CoverCmd::Polydisc {
            dim,
            eta,
            gamma,
            out,
            count_only,
        } => {
            let cover = PolydiscCover::new(dim, eta, gamma)?;
            if !count_only {
                let out =
                    out.ok_or_else(|| invalid("--out is required unless --count-only is given"))?;
                save_polydisc(&cover, &out)?;
            }
            print_json(&json!({ "kappa": cover.kappa(), "plan": cover.plan() }))?;
        }
        CoverCmd::Levelset {
            alpha,
            c,
            gamma,
            out,
        } => {
            let c = match c.as_slice() {
                [re] => Complex64::new(*re, 0.0),
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(invalid("--c takes RE or RE,IM")),
            };
            let cov = cover_monomial_level_set(&alpha, c, gamma)?;
            save_covering(&cov, &out)?;
            print_json(&json!({
                "kappa": cov.kappa(),
                "base_kappa": cov.kappa() / alpha[0] as usize,
                "eta": base_eta(&alpha, c)?,
            }))?;
        }
        CoverCmd::Graph {
            mu,
            coeff,
            eps,
            out,
        } => {
            let data = MonomialData::new(coeff, mu)?;
            let set = cover_monomial_graph(&data, eps)?;
            save_achart_set(&set, &out)?;
            print_json(&json!({
                "kappa": set.charts.len(),
                "c3": set.c3,
                "count_constant": count_constant(data.dim(), set.c3),
            }))?;
        }
    }
    Ok(EXIT_OK)
}

fn verify(cmd: VerifyCmd, seed: u64) -> Result<i32> {
    match cmd {
        VerifyCmd::Coverage { covering, samples } => {
            let cov = load_covering(&covering)?;
            let region = cov.target().cloned().ok_or_else(|| {
                CoverError::RegionMismatch("the covering file names no target region".into())
            })?;
            let report = check_coverage(&cov, &region, samples, seed)?;
            print_json(&report)?;
            Ok(exit_for(report.pass))
        }
        VerifyCmd::Doubling { covering } => {
            let report = certify_doubling(&load_covering(&covering)?);
            print_json(&report)?;
            Ok(exit_for(report.pass))
        }
        VerifyCmd::Achart { charts, grid } => {
            let set = load_achart_set(&charts)?;
            let reports = set
                .charts
                .par_iter()
                .map(|ch| verify_achart(ch, grid))
                .collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().filter(|r| r.pass).count();
            let max_dev = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
            let max_cert = reports
                .iter()
                .filter_map(|r| r.certificate)
                .fold(0.0, f64::max);
            let pass = passed == reports.len();
            print_json(&json!({
                "charts": reports.len(),
                "passed": passed,
                "max_deviation": max_dev,
                "max_certificate": max_cert,
                "pass": pass,
            }))?;
            Ok(exit_for(pass))
        }
    }
}

fn scaling(args: ScalingArgs) -> Result<i32> {
    let exp = match args.experiment {
        ExperimentKind::Annulus => Experiment::Annulus { zeta: args.zeta },
        ExperimentKind::Polydisc => Experiment::Polydisc {
            n: args.dim,
            gamma: args.gamma,
        },
        ExperimentKind::Levelset => Experiment::Levelset {
            alpha: args.alpha,
            gamma: args.gamma,
        },
        ExperimentKind::Graph => Experiment::Graph {
            data: MonomialData::new(args.coeff, args.mu)?,
        },
    };
    let rows = scaling_experiment(&exp, &args.grid)?;
    write_csv(&rows, BufWriter::new(File::create(&args.out)?))?;
    let xs: Vec<f64> = rows.iter().map(|r| r.log_inv_param).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.kappa as f64).collect();
    print_json(&json!({
        "experiment": exp.name(),
        "rows": rows.len(),
        "log_log": fit_log_exponent(&rows).ok(),
        "linear": linear_fit(&xs, &ys).ok(),
    }))?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(invalid(format!(
                "--tol must be a positive number, got {tol}"
            )));
        }
        set_tolerance(tol);
    }
    match cli.command {
        Command::Cover(cmd) => cover(cmd),
        Command::Eta(a) => {
            let eta = eta_from_delta(
                a.delta,
                &EtaParams::new(a.c_lower, a.c_unit, a.d, a.alpha0)?,
            )?;
            println!("{eta}");
            Ok(EXIT_OK)
        }
        Command::Verify(cmd) => verify(cmd, cli.seed),
        Command::Chain(a) => {
            let cov = load_covering(&a.covering)?;
            let chain = chain_between(&cov, &parse_point(&a.from)?, &parse_point(&a.to)?)?;
            print_json(&chain)?;
            Ok(EXIT_OK)
        }
        Command::Scaling(a) => scaling(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

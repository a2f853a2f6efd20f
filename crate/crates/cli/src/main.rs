//! `hankel-spectra`: kernel tables, verification suites, truncation spectra,
//! spectral densities and block certificates.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad configuration,
//! 3 numerical failure.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hankel_spectra::kernels::{self, Method};
use hankel_spectra::operators::{self, BlockCertificate};
use hankel_spectra::spectral;
use hankel_spectra::verify::{self, Suite};
use hankel_spectra::{Error, KernelOrder};

use output::{csv_table, num, write_output, Format};

#[derive(Parser, Debug)]
#[command(name = "hankel-spectra", version, about = "Hankel operators with explicit kernels, numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate k^(l) on a grid.
    Kernel(KernelArgs),
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Eigenvalues of the N×N Hankel section.
    Spectrum(SpectrumArgs),
    /// Tabulate rho_p and h on a lambda grid.
    Density(DensityArgs),
    /// Parity block certificate for l at size N.
    Blocks(BlocksArgs),
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    ell: u32,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["xmin", "xmax"])]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "xmax")]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "xmin")]
    xmax: Option<f64>,
    #[arg(long)]
    num: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Conv,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Closed => Method::Closed,
            MethodArg::Conv => Method::Conv,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// Overrides every float threshold of the suite; by default each check
    /// uses its own acceptance threshold.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    size: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, conflicts_with_all = ["lambda_min", "lambda_max"])]
    lambda: Option<f64>,
    #[arg(long, requires = "lambda_max")]
    lambda_min: Option<f64>,
    #[arg(long, requires = "lambda_min")]
    lambda_max: Option<f64>,
    #[arg(long)]
    num: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct BlocksArgs {
    #[arg(long)]
    ell: u32,
    #[arg(long)]
    size: usize,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Verify,
    Config(String),
    Numerical(String),
}

impl Failure {
    fn from_lib(cmd: &str, e: Error) -> Failure {
        let msg = format!("{cmd}: {e}");
        if e.is_numerical() {
            Failure::Numerical(msg)
        } else {
            Failure::Config(msg)
        }
    }
}

type CmdResult = Result<(), Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn grid(cmd: &str, single: Option<f64>, min: Option<f64>, max: Option<f64>, num: Option<usize>) -> Result<Vec<f64>, Failure> {
    match (single, min, max) {
        (Some(x), None, None) => {
            if num.is_some() {
                return Err(config(format!("{cmd}: --num needs a range, not a single point")));
            }
            Ok(vec![x])
        }
        (None, Some(a), Some(b)) => {
            let n = num.ok_or_else(|| config(format!("{cmd}: a range needs --num")))?;
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(config(format!("{cmd}: range needs finite min < max, got {a} and {b}")));
            }
            if n < 2 {
                return Err(config(format!("{cmd}: --num must be at least 2, got {n}")));
            }
            let step = (b - a) / (n - 1) as f64;
            Ok((0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect())
        }
        _ => Err(config(format!("{cmd}: give either a single point or a full range"))),
    }
}

fn order(cmd: &str, ell: u32) -> Result<KernelOrder, Failure> {
    KernelOrder::new(ell).map_err(|e| Failure::from_lib(cmd, e))
}

fn cmd_kernel(a: KernelArgs) -> CmdResult {
    let ell = order("kernel", a.ell)?;
    let xs = grid("kernel", a.x, a.xmin, a.xmax, a.num)?;
    let rows = xs
        .iter()
        .map(|&x| kernels::evaluate(ell, x, a.method.into()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::from_lib("kernel", e))?;
    let body = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_table(
            &["x", "value", "route", "error_estimate"],
            rows.iter().map(|r| {
                vec![
                    num(r.x),
                    num(r.value),
                    r.route.as_str().to_string(),
                    num(r.error_estimate),
                ]
            }),
        ),
        Format::Json => output::json(&rows),
    };
    write_output(&body, a.out.out.as_deref())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let suite: Suite = a.suite.parse().map_err(|e| Failure::from_lib("verify", e))?;
    let report = verify::run_suite(suite, a.tol).map_err(|e| Failure::from_lib("verify", e))?;
    let body = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&report),
        Format::Csv => csv_table(
            &["name", "paper_anchor", "measured", "threshold", "pass"],
            report.records.iter().map(|r| {
                vec![
                    r.name.clone(),
                    r.paper_anchor.to_string(),
                    num(r.measured),
                    num(r.threshold),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    write_output(&body, a.out.out.as_deref())?;
    if report.all_pass {
        Ok(())
    } else {
        for r in report.records.iter().filter(|r| !r.pass) {
            eprintln!("FAIL {}: measured {} threshold {}", r.name, r.measured, r.threshold);
        }
        Err(Failure::Verify)
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    ell: KernelOrder,
    size: usize,
    min: f64,
    max: f64,
    containment_violation: f64,
    coverage_gap: f64,
}

fn cmd_spectrum(a: SpectrumArgs) -> CmdResult {
    let ell = order("spectrum", a.ell)?;
    let r = operators::spectrum_report(ell, a.size).map_err(|e| Failure::from_lib("spectrum", e))?;
    match a.out.format.unwrap_or(Format::Csv) {
        Format::Json => write_output(&output::json(&r), a.out.out.as_deref()),
        Format::Csv => {
            let body = csv_table(
                &["index", "eigenvalue"],
                r.eigenvalues.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]),
            );
            write_output(&body, a.out.out.as_deref())?;
            let summary = SpectrumSummary {
                ell: r.ell,
                size: r.size,
                min: r.min,
                max: r.max,
                containment_violation: r.containment_violation,
                coverage_gap: r.coverage_gap,
            };
            eprint!("{}", output::json(&summary));
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DensityRow {
    lambda: f64,
    rho: f64,
    h: f64,
}

fn cmd_density(a: DensityArgs) -> CmdResult {
    let lambdas = grid("density", a.lambda, a.lambda_min, a.lambda_max, a.num)?;
    let mut rows = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let rho = spectral::density_rho(a.p, lambda).map_err(|e| Failure::from_lib("density", e))?;
        let h = spectral::multiplier_h(lambda).map_err(|e| Failure::from_lib("density", e))?;
        rows.push(DensityRow { lambda, rho: rho.rho, h });
    }
    let body = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_table(
            &["lambda", "rho", "h"],
            rows.iter().map(|r| vec![num(r.lambda), num(r.rho), num(r.h)]),
        ),
        Format::Json => output::json(&rows),
    };
    write_output(&body, a.out.out.as_deref())
}

fn cmd_blocks(a: BlocksArgs) -> CmdResult {
    let ell = order("blocks", a.ell)?;
    if a.out.format == Some(Format::Csv) {
        return Err(config("blocks: the certificate is emitted as JSON only"));
    }
    let m = ell.get() / 2;
    let cert: BlockCertificate = if ell.get() % 2 == 0 {
        operators::block_decompose_even(m, a.size)
    } else {
        operators::block_decompose_odd(m, a.size)
    }
    .map_err(|e| Failure::from_lib("blocks", e))?;
    write_output(&output::json(&cert), a.out.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Kernel(a) => cmd_kernel(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Density(a) => cmd_density(a),
        Command::Blocks(a) => cmd_blocks(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

//! `kramers`: build truncated Pauli-Fierz Hamiltonians and check their
//! time-reversal structure.
//!
//! Exit status: 0 when every requested check passes, 1 on a check
//! violation, 2 on a configuration or build error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kramers_core::config::{Check, RunConfig};
use kramers_core::report::write_clusters_csv;
use kramers_core::run::{build_system, run, sweep, write_outputs, SweepAxis};
use kramers_core::spectral::{cluster, diagonalize, diagonalize_iterative, Eigenpairs, LanczosConfig};
use kramers_core::symmetry::check_commutes;
use kramers_core::{Error, HermitianOperator, Result};

#[derive(Parser)]
#[command(name = "kramers", version, about = "Kramers degeneracy checks for truncated Pauli-Fierz models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the Hamiltonian and print dimensions and operator stats.
    Build { config: PathBuf },
    /// Eigenvalues, one per line, plus an optional clusters CSV.
    Spectrum {
        config: PathBuf,
        /// Only the lowest K eigenvalues.
        #[arg(long)]
        lowest: Option<usize>,
        /// Use the block Lanczos solver (requires --lowest).
        #[arg(long, requires = "lowest")]
        iterative: bool,
        #[arg(long)]
        clusters: Option<PathBuf>,
    },
    /// Run every check listed in the config.
    Run(RunArgs),
    /// Commutation and degeneracy checks (plus algebra and the negative
    /// control when the config lists them).
    Kramers(RunArgs),
    /// Functional-calculus and vacuum-expectation checks (plus the j-real
    /// generalization when the config lists it).
    Semigroup(RunArgs),
    /// One run per value of a single parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. `0,0.5,1`; an empty string gives an
        /// empty sweep.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Write an operator as sparse triplets `row col re im`.
    ExportMatrix {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Operator::H)]
        operator: Operator,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for `report.json` and `report_clusters.csv`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    H,
    Hf,
    A0x,
    A0y,
    A0z,
    B0x,
    B0y,
    B0z,
    Pfx,
    Pfy,
    Pfz,
}

enum Outcome {
    Pass,
    Violation,
    /// Some sweep points could not be built.
    PointErrors,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Ok(Outcome::PointErrors) => ExitCode::from(2),
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Build { config } => build(&config),
        Command::Spectrum {
            config,
            lowest,
            iterative,
            clusters,
        } => spectrum(&config, lowest, iterative, clusters.as_deref()),
        Command::Run(args) => run_checks(&args, |_| {}),
        Command::Kramers(args) => run_checks(&args, |cfg| {
            restrict(cfg, Check::Kramers, &[Check::Algebra, Check::NegativeControl])
        }),
        Command::Semigroup(args) => run_checks(&args, |cfg| {
            restrict(cfg, Check::Semigroup, &[Check::Jreal])
        }),
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => {
            let cfg = RunConfig::from_path(&config)?;
            let axis: SweepAxis = axis.parse()?;
            let values = parse_values(&values)?;
            let (manifest, _) = sweep(&cfg, axis, &values, &out)?;
            for p in &manifest.points {
                match (&p.error, p.passed) {
                    (Some(e), _) => println!("{axis} = {}: error: {e}", p.value),
                    (None, Some(ok)) => println!("{axis} = {}: {}", p.value, if ok { "pass" } else { "FAIL" }),
                    _ => {}
                }
            }
            println!("manifest: {}", out.join("manifest.json").display());
            Ok(if manifest.points.iter().any(|p| p.error.is_some()) {
                Outcome::PointErrors
            } else if manifest.passed() {
                Outcome::Pass
            } else {
                Outcome::Violation
            })
        }
        Command::ExportMatrix {
            config,
            operator,
            out,
        } => export(&config, operator, out.as_deref()),
    }
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("sweep value `{v}` is not a number")))
        })
        .collect()
}

/// Keeps `primary` plus whichever of `optional` the config already lists.
fn restrict(cfg: &mut RunConfig, primary: Check, optional: &[Check]) {
    let mut checks = vec![primary];
    checks.extend(optional.iter().copied().filter(|c| cfg.has(*c)));
    cfg.checks = checks;
}

fn run_checks(args: &RunArgs, adjust: impl FnOnce(&mut RunConfig)) -> Result<Outcome> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    adjust(&mut cfg);
    let report = run(&cfg)?;
    write_outputs(&report, &args.out, "report")?;
    for c in &report.checks {
        println!(
            "{:<36} {:<16} measured {:.3e}  threshold {:.1e}",
            c.name,
            serde_json::to_value(c.status)?.as_str().unwrap_or_default(),
            c.measured,
            c.threshold
        );
    }
    println!("report: {}", args.out.join("report.json").display());
    Ok(if report.passed {
        Outcome::Pass
    } else {
        Outcome::Violation
    })
}

fn build(config: &Path) -> Result<Outcome> {
    let cfg = RunConfig::from_path(config)?;
    let sys = build_system(&cfg)?;
    let commutation = check_commutes(&sys.hamiltonian, &sys.theta)?;
    let stats = serde_json::json!({
        "hamiltonian": sys.info(),
        "theta_sign": sys.theta.sign(),
        "commutation_residual": commutation,
        "field": {
            "hf_nnz": sys.field.hf.nnz(),
            "a0_nnz": sys.field.a0.iter().map(|m| m.nnz()).collect::<Vec<_>>(),
            "b0_nnz": sys.field.b0.iter().map(|m| m.nnz()).collect::<Vec<_>>(),
        },
    });
    writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(&stats)?)?;
    Ok(Outcome::Pass)
}

fn spectrum(config: &Path, lowest: Option<usize>, iterative: bool, clusters: Option<&Path>) -> Result<Outcome> {
    let cfg = RunConfig::from_path(config)?;
    let sys = build_system(&cfg)?;
    let h = &sys.hamiltonian;
    let result = match (lowest, iterative) {
        (Some(k), true) => diagonalize_iterative(
            h,
            k,
            &LanczosConfig {
                seed: cfg.seed,
                ..LanczosConfig::default()
            },
        )?,
        (Some(k), false) => diagonalize(h, Eigenpairs::Lowest(k))?,
        (None, _) => diagonalize(h, Eigenpairs::All)?,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for v in &result.eigenvalues {
        writeln!(out, "{v:.17e}")?;
    }
    out.flush()?;
    if let Some(path) = clusters {
        write_clusters_csv(path, &cluster(&result.eigenvalues, cfg.gap)?)?;
    }
    Ok(Outcome::Pass)
}

fn export(config: &Path, operator: Operator, out: Option<&Path>) -> Result<Outcome> {
    let cfg = RunConfig::from_path(config)?;
    let sys = build_system(&cfg)?;
    let f = &sys.field;
    let op: HermitianOperator = match operator {
        Operator::H => sys.hamiltonian.clone(),
        Operator::Hf => f.hermitian(&f.hf)?,
        Operator::A0x => f.hermitian(&f.a0[0])?,
        Operator::A0y => f.hermitian(&f.a0[1])?,
        Operator::A0z => f.hermitian(&f.a0[2])?,
        Operator::B0x => f.hermitian(&f.b0[0])?,
        Operator::B0y => f.hermitian(&f.b0[1])?,
        Operator::B0z => f.hermitian(&f.b0[2])?,
        Operator::Pfx => f.hermitian(&f.pf[0])?,
        Operator::Pfy => f.hermitian(&f.pf[1])?,
        Operator::Pfz => f.hermitian(&f.pf[2])?,
    };
    match out {
        Some(path) => op.write_triplets(BufWriter::new(File::create(path)?))?,
        None => op.write_triplets(BufWriter::new(io::stdout().lock()))?,
    }
    Ok(Outcome::Pass)
}

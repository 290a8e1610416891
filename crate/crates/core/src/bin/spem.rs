use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spem::operators::SignMode;
use spem::scenario::{
    alpha_sweep, parse_config, run_scenario, sparsity_report, stability_report, Distribution, DtPolicy, ScenarioConfig,
    ScenarioError, SolverKind,
};

/// Meshless Maxwell solver.
///
/// Exit codes: 0 success, 1 configuration error, 2 numerical divergence,
/// 3 solver or I/O failure.
#[derive(Parser)]
#[command(name = "spem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifact directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Jitter seed (jittered distributions only).
        #[arg(long)]
        seed: Option<u64>,
        /// Time step as a multiple of the CFL step, or the safety factor
        /// under the auto-stable policy.
        #[arg(long)]
        dt_factor: Option<f64>,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long, value_enum)]
        sign_mode: Option<SignArg>,
    },
    /// Print the explicit stability report of a scenario.
    Stability {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun a scenario for each smoothing factor and print the error table.
    SweepAlpha {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
    },
    /// Print the sparsity of the E-node system matrix on regular clouds.
    ReportSparsity {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.7075)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    ExplicitSpem,
    LafSpem,
    Fdtd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    LiteralPaper,
    StandardPlus,
}

fn load(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text).map_err(|e| match e {
        ScenarioError::Config { line, message } => {
            ScenarioError::Invalid(format!("{}:{line}: {message}", path.display()))
        }
        other => other,
    })
}

fn override_config(
    cfg: &mut ScenarioConfig,
    seed: Option<u64>,
    dt_factor: Option<f64>,
    solver: Option<SolverArg>,
    sign_mode: Option<SignArg>,
) -> Result<(), ScenarioError> {
    let invalid = ScenarioError::Invalid;
    if let Some(s) = seed {
        match &mut cfg.distribution {
            Distribution::Jittered { seed, .. } => *seed = s,
            Distribution::Regular => return Err(invalid("--seed needs a jittered distribution".into())),
        }
    }
    if let Some(f) = dt_factor {
        if !(f > 0.0 && f.is_finite()) {
            return Err(invalid(format!("--dt-factor must be positive, got {f}")));
        }
        cfg.solver.dt_policy = match cfg.solver.dt_policy {
            DtPolicy::AutoStable(_) => DtPolicy::AutoStable(f),
            _ => DtPolicy::CflMultiple(f),
        };
    }
    if let Some(s) = solver {
        cfg.solver.kind = match s {
            SolverArg::ExplicitSpem => SolverKind::ExplicitSpem,
            SolverArg::LafSpem => SolverKind::LafSpem,
            SolverArg::Fdtd => SolverKind::Fdtd,
        };
    }
    if let Some(m) = sign_mode {
        cfg.solver.sign_mode = match m {
            SignArg::LiteralPaper => SignMode::LiteralPaper,
            SignArg::StandardPlus => SignMode::StandardPlus,
        };
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), ScenarioError> {
    match command {
        Command::Run { config, out, seed, dt_factor, solver, sign_mode } => {
            let mut cfg = load(&config)?;
            override_config(&mut cfg, seed, dt_factor, solver, sign_mode)?;
            let o = run_scenario(&cfg, &out)?;
            println!("{} finished {} steps with {}", cfg.output.name, o.fields.step, o.solver);
            for (k, v) in o.metrics() {
                println!("{k} = {v}");
            }
            println!("artifact written to {}", out.display());
        }
        Command::Stability { config, out } => {
            let cfg = load(&config)?;
            let text = stability_report(&cfg)?.lines().join("\n") + "\n";
            print!("{text}");
            if let Some(p) = out {
                fs::write(&p, text)
                    .map_err(|e| ScenarioError::Io { path: p.display().to_string(), message: e.to_string() })?;
            }
        }
        Command::SweepAlpha { config, alphas } => {
            let cfg = load(&config)?;
            println!("alpha,l2_error,minimum");
            for r in alpha_sweep(&cfg, &alphas)? {
                println!("{},{:.6e},{}", r.alpha, r.l2, if r.is_min { "*" } else { "" });
            }
        }
        Command::ReportSparsity { sizes, alpha } => {
            println!("n,nx,ny,nnz,sparsity_percent,published_percent");
            for r in sparsity_report(&sizes, alpha)? {
                let published = r.table.map(|t| format!("{t}")).unwrap_or_default();
                println!("{},{},{},{},{:.3},{}", r.n, r.nx, r.ny, r.nnz, r.sparsity, published);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

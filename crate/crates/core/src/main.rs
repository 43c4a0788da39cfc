use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crflow::checks::{run_checks, Level};
use crflow::commands::{
    command_oracle, command_run, command_sweep, parse_lambda_grid, sweep_summary, CommandError,
};
use crflow::config::load_config;
use crflow::flow::Termination;

#[derive(Parser)]
#[command(
    name = "crflow",
    version,
    about = "Pseudoharmonic heat flow on Heisenberg nilmanifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one flow and write the time series, snapshots and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to [output] dir, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun the flow over an amplitude grid A:B:K.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in self-checks.
    Check {
        #[arg(long, value_enum, default_value = "quick")]
        level: CheckLevel,
    },
    /// Compare a flat single-mode run with the closed-form solution at time T.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckLevel {
    Quick,
    Full,
}

fn out_dir(flag: Option<PathBuf>, configured: Option<PathBuf>) -> PathBuf {
    flag.or(configured).unwrap_or_else(|| PathBuf::from("out"))
}

fn exit_code(t: Termination) -> u8 {
    match t {
        Termination::Converged => 0,
        Termination::Timeout => 2,
        Termination::Blowup => 3,
    }
}

fn run(cli: Cli) -> Result<u8, CommandError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let dir = out_dir(out, cfg.output_dir.clone());
            let result = command_run(&cfg, &dir)?;
            print!("{}", result.summary);
            println!("output = {}", dir.display());
            Ok(exit_code(result.classification.termination))
        }
        Command::Sweep {
            config,
            lambda,
            out,
        } => {
            let cfg = load_config(&config)?;
            let lambdas = parse_lambda_grid(&lambda)?;
            let dir = out_dir(out, cfg.output_dir.clone());
            let result = command_sweep(&cfg, &lambdas, &dir)?;
            for r in &result.rows {
                println!(
                    "lambda = {:<10} E_b(h) = {:<12.6e} sup e(h) = {:<12.6e} {:<9} sup|tau| = {:.3e}",
                    r.lambda, r.initial_e_b, r.initial_sup_e, r.termination, r.final_sup_tau
                );
            }
            print!("{}", sweep_summary(&result));
            println!("output = {}", dir.display());
            Ok(0)
        }
        Command::Check { level } => {
            let level = match level {
                CheckLevel::Quick => Level::Quick,
                CheckLevel::Full => Level::Full,
            };
            let results = run_checks(level);
            let mut failed = 0;
            for r in &results {
                println!(
                    "[{}] {} ({:.2}s): {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.seconds,
                    r.detail
                );
                failed += usize::from(!r.passed);
            }
            println!(
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            );
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Oracle { config, t } => {
            let cfg = load_config(&config)?;
            let c = command_oracle(&cfg, t)?;
            println!("t = {}", c.t);
            println!("steps = {}", c.steps);
            println!("dt = {}", c.dt);
            println!("amplitude_factor = {}", c.decay);
            println!("sup_error = {}", c.sup_error);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for timeouts here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fraclog_cli::commands;

/// Fractional logistic-model toolbox: simulate trajectories, sweep
/// parameters, classify equilibria, and check existence conditions.
#[derive(Parser)]
#[command(name = "fraclog", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trajectories for the configured model and starting values
    Simulate {
        /// Flat JSON run configuration
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output` key)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One solve per swept value plus a settle-time comparison table
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// name=v1,v2,... with name one of x0, theta, mu, gamma
        #[arg(long)]
        sweep: String,
        /// Settle-band half width around the target equilibrium
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify equilibria and sample the linearized perturbation decay
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the contraction condition guaranteeing a unique solution
    Existence {
        #[arg(long)]
        config: PathBuf,
        /// Domain radius L behind the Lipschitz constant
        #[arg(long = "L", allow_hyphen_values = true)]
        radius: f64,
        /// Also report the mu = 1 branch (reporting only)
        #[arg(long)]
        mu1: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the generalized Mittag-Leffler function
    MlEval {
        #[arg(long)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 1e-14)]
        rel_tol: f64,
        #[arg(long, default_value_t = 512)]
        max_terms: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, out.as_deref()),
        Command::Sweep { config, sweep, epsilon, out } => {
            commands::sweep(&config, &sweep, epsilon, out.as_deref())
        }
        Command::Stability { config, out } => commands::stability(&config, out.as_deref()),
        Command::Existence { config, radius, mu1, out } => {
            commands::existence(&config, radius, mu1, out.as_deref())
        }
        Command::MlEval { theta, beta, rho, lambda, z, rel_tol, max_terms } => {
            commands::ml_eval(theta, beta, rho, lambda, z, rel_tol, max_terms)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fraclog: {e}");
            e.exit_code()
        }
    }
}

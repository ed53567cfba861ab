//! `complex-ou`: batch front end for the complex Ornstein–Uhlenbeck toolkit.
//!
//! Every subcommand writes one JSON document (or CSV where requested) to
//! stdout. Exit status: 0 pass, 1 verification failure, 2 usage error.

mod cmd;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use complex_ou::expr::GRAMMAR;

use crate::report::Output;

#[derive(Debug, Parser)]
#[command(name = "complex-ou", version, about = "Complex Ornstein-Uhlenbeck operator toolkit")]
struct Cli {
    /// Override the command's documented tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also print a human-readable summary to stderr.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complex Hermite polynomials and the monomial/Hermite transform.
    #[command(subcommand)]
    Hermite(HermiteCmd),
    /// The generator, its eigenvalues and the carre du champ.
    #[command(subcommand)]
    Operator(OperatorCmd),
    /// The semigroup in spectral and Mehler form.
    #[command(subcommand)]
    Semigroup(SemigroupCmd),
    /// Path simulation of the underlying SDE.
    #[command(subcommand)]
    Sde(SdeCmd),
    /// Gauss-Hermite rule diagnostics.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Run every module's default verification and aggregate the verdicts.
    VerifyAll,
}

#[derive(Debug, Subcommand)]
pub enum HermiteCmd {
    /// Print J_{m,n} as polynomial JSON.
    Show {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Gram matrix of {J_{m,n} : m+n <= D} under Gauss-Hermite quadrature.
    Orthonormality {
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
        /// Rule order; defaults to max(12, D+2).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Forward and inverse transform matrices at one total degree.
    Transform {
        #[arg(long)]
        degree: usize,
        /// Emit the forward matrix as CSV (row per m, column per k) instead.
        #[arg(long)]
        csv: bool,
    },
    /// Creation-operator route vs explicit formula, and monomial round trips.
    Roundtrip {
        #[arg(long, default_value_t = 12)]
        max_degree: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OperatorCmd {
    /// Eigenvalue of J_{m,n} and the residual of the eigenrelation.
    Eigen {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
    /// Carre du champ of two polynomial literals.
    #[command(after_help = GRAMMAR)]
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        /// Angle used for the generator-side cross-check.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        theta: f64,
    },
    /// Diffusion chain rule on random compositions F(phi_1, ..., phi_n).
    ChainRule {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Maximum degree of F and of each phi_i.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Apply the generator to a polynomial literal.
    #[command(after_help = GRAMMAR)]
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
    },
    /// L L* = L* L on every J_{m,n} with m+n <= D.
    Normality {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 10)]
        degree: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum SemigroupCmd {
    /// Evolve a coefficient document by P_t.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        t: f64,
        /// Coefficient JSON file, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
        /// Also write the bare evolved coefficient document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// P_t P_t* = P_t* P_t on monomials via nested Mehler quadrature.
    VerifyNormal {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 5)]
        degree: u32,
        /// Random evaluation points per monomial.
        #[arg(long, default_value_t = 2)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Invariance of the Gaussian under P_t on random polynomials.
    Invariance {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 8)]
        degree: u32,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Convergence of P_t phi(x) to the Gaussian mean against its decay envelope.
    Ergodic {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0])]
        times: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Exact,
    Euler,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x0_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x0_im: f64,
    /// Output times, repeatable or comma separated; paths start at t = 0.
    #[arg(long = "t", value_delimiter = ',', required = true, num_args = 1..)]
    pub times: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Exact)]
    pub scheme: SchemeArg,
    /// Euler step; required with `--scheme euler`.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum SdeCmd {
    /// Simulate paths and print CSV or a moment summary.
    Simulate(SimulateArgs),
    /// Long-run law of the exact sampler against the Gaussian.
    Stationarity {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to the time where e^(-t cos theta) = 1e-6.
        #[arg(long)]
        t_burn: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum QuadCmd {
    /// Weight sum, moment exactness and first inexact moment per order.
    Selftest {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8, 12, 16, 24, 32, 64, 128])]
        orders: Vec<usize>,
    },
}

fn run(cli: Cli) -> Result<Output, complex_ou::Error> {
    let tol = cli.tol;
    match cli.command {
        Command::Hermite(c) => cmd::hermite::run(c, tol),
        Command::Operator(c) => cmd::operator::run(c, tol),
        Command::Semigroup(c) => cmd::semigroup::run(c, tol),
        Command::Sde(c) => cmd::sde::run(c, tol),
        Command::Quad(c) => cmd::quad::run(c, tol),
        Command::VerifyAll => cmd::verify_all(tol).map(Output::Report),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.tol {
        if !(t >= 0.0) {
            eprintln!("error: --tol must be a nonnegative number");
            return ExitCode::from(2);
        }
    }
    let pretty = cli.pretty;
    let output = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (text, pass) = match output {
        Output::Report(r) => {
            if pretty {
                eprint!("{}", r.table());
            }
            match complex_ou::io::to_json_string(&r) {
                Ok(s) => (s + "\n", r.pass),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        Output::Raw { text, pass } => (text, pass),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

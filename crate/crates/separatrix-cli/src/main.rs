//! `separatrix`: formal series, equilibria, separatrix tracing, splitting
//! sweeps, the Stokes constant and Melnikov predictions from one binary.
//!
//! Exit codes: 0 on success, 1 when a computation fails (error JSON on
//! stderr), 2 on usage errors.

mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use separatrix::hamiltonian::{PolyHamiltonian, CUBIC_MODEL};
use separatrix::numeric::{Dd, Precision, Qd};
use separatrix::Error;

use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "separatrix", version, about = "Exponentially small separatrix splitting at a saddle-center")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Settings {
    /// Hamiltonian definition file; the bundled cubic model when omitted
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Comma-separated values of mu
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<String>,
    /// Comma-separated values of eps, converted to mu through the formal series
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Vec<String>,
    #[arg(long, global = true, default_value = "0.01", allow_hyphen_values = true)]
    nu: String,
    /// Working precision in bits (64 to 212)
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Series order: formal separatrix order, or the number of inner terms for `stokes`
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Integrator tolerance (absolute and relative)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact coefficients of the formal separatrix
    Formal,
    /// Saddle-center equilibrium for each mu
    Equilibrium,
    /// Stable and unstable separatrix solutions up to the section y1 = 0
    Trace(TraceArgs),
    /// Splitting measurement E_e1 for each mu
    Split(TraceArgs),
    /// Stokes constant b0 of the inner problem
    Stokes(StokesArgs),
    /// Melnikov integral by quadrature and by residues
    Melnikov,
    /// Invariant suite on the selected model
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideChoice {
    Both,
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, value_enum, default_value_t = SideChoice::Both)]
    side: SideChoice,
    /// Seed distance from the equilibrium
    #[arg(long)]
    offset: Option<f64>,
    /// Seeding time; overrides --offset
    #[arg(long)]
    t_seed: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct StokesArgs {
    /// |Re tau| of the inner seeds
    #[arg(long, default_value_t = 30.0)]
    tau_match: f64,
    /// Comma-separated sampling depths T (Im tau = -T)
    #[arg(long, value_delimiter = ',')]
    t_list: Vec<f64>,
    /// Highest power of nu in the inner series
    #[arg(long, default_value_t = 5)]
    nu_order: usize,
    /// Digits wanted in b0, setting the default descent depth
    #[arg(long, default_value_t = 2.0)]
    target_digits: f64,
}

impl Default for StokesArgs {
    fn default() -> Self {
        StokesArgs { tau_match: 30.0, t_list: Vec::new(), nu_order: 5, target_digits: 2.0 }
    }
}

#[derive(Debug)]
pub struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, kind: "usage".into(), message }
    }

    /// Errors in the inputs themselves (model file, parameters).
    pub fn input(e: Error) -> Self {
        Failure { code: 2, kind: e.kind().into(), message: e.to_string() }
    }

    pub fn compute(e: Error) -> Self {
        Failure { code: 1, kind: e.kind().into(), message: e.to_string() }
    }

    fn report(&self) {
        let v = serde_json::json!({"error": self.kind, "message": self.message, "exit_code": self.code});
        eprintln!("{v}");
    }
}

fn load_model(s: &Settings) -> Result<PolyHamiltonian, Failure> {
    let text = match &s.model {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?,
        None => CUBIC_MODEL.to_string(),
    };
    PolyHamiltonian::parse(&text).map_err(Failure::input)
}

fn precision(s: &Settings) -> Result<Precision, Failure> {
    if s.precision < 64 {
        return Err(Failure::usage(format!("precision {} below the 64-bit minimum", s.precision)));
    }
    Precision::for_bits(s.precision).ok_or_else(|| {
        Failure::input(Error::Precision(format!("{} bits requested, at most 212 are available", s.precision)))
    })
}

macro_rules! at_precision {
    ($p:expr, $f:ident ( $($arg:expr),* )) => {
        match $p {
            Precision::QuadDouble => commands::$f::<Qd>($($arg),*),
            _ => commands::$f::<Dd>($($arg),*),
        }
    };
}

fn emit(s: &Settings, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    let result = match &s.out {
        Some(p) => {
            let mut f = std::fs::File::create(p).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
            write(&mut f)
        }
        None => write(&mut std::io::stdout().lock()),
    };
    match result {
        // a closed downstream pipe (`| head`) is not a failure
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| Failure { code: 1, kind: "io".into(), message: e.to_string() }),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let s = &cli.settings;
    let h = load_model(s)?;
    let p = precision(s)?;
    if matches!(s.tol, Some(t) if !(t > 0.0)) {
        return Err(Failure::usage("--tol must be positive".into()));
    }
    if matches!(s.jobs, Some(0)) {
        return Err(Failure::usage("--jobs must be at least 1".into()));
    }
    let tabular: Result<(Table, Option<Error>), Failure> = match &cli.command {
        Command::Formal => commands::formal(&h, s),
        Command::Equilibrium => at_precision!(p, equilibrium(&h, s)),
        Command::Trace(a) => at_precision!(p, trace(&h, s, a)),
        Command::Split(a) => at_precision!(p, split(&h, s, a)),
        Command::Melnikov => at_precision!(p, melnikov(&h, s)),
        Command::Verify => at_precision!(p, verify(&h, s)),
        Command::Stokes(a) => {
            let value = at_precision!(p, stokes_json(&h, s, a)).map_err(|e| match e {
                Error::Precision(_) => Failure::input(e),
                e => Failure::compute(e),
            })?;
            return emit(s, |w| {
                serde_json::to_writer_pretty(&mut *w, &value)?;
                writeln!(w)
            });
        }
    };
    let (table, failure) = tabular?;
    let format = s.format.unwrap_or(match cli.command {
        Command::Formal => Format::Json,
        _ => Format::Csv,
    });
    emit(s, |w| table.write(format, w))?;
    match failure {
        Some(e) => Err(Failure::compute(e)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code)
        }
    }
}

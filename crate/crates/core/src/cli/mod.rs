//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse error, 3 precondition error, 4 numerical
//! or verification error.

pub mod document;
pub mod report;

use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graphs::{self, CirculantGraph};
use crate::join::{JoinSpec, DEFAULT_DENSE_CAP};
use crate::kuramoto::KuramotoSystem;
use crate::smalldense::EigenSettings;

pub use document::{DocumentError, JoinDocument};
pub use report::{build_report, format_complex, format_real, ReportError, ReportOptions, SpectrumReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "circjoin", version, about = "Spectra of joins of circulant matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum and generalized eigenbasis of a join document.
    Spectrum(SpectrumArgs),
    /// Build a graph from the circulant families and emit its document or spectrum.
    Graph(GraphArgs),
    /// Kuramoto oscillators on a join network.
    Kuramoto(KuramotoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Spec,
    Spectrum,
}

#[derive(Debug, Args)]
pub struct ReportFlags {
    /// Include the generalized eigenbasis.
    #[arg(long, global = true)]
    pub eigenvectors: bool,
    /// Check every chain against the dense matrix and report the largest residual.
    #[arg(long, global = true)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
    /// Relative distance below which condensed eigenvalues are merged.
    #[arg(long, default_value_t = 1e-7, global = true)]
    pub cluster_tol: f64,
    /// Relative singular value threshold for rank decisions.
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub sigma_tol: f64,
    /// Smallest admissible singular value of the condensed chain matrix.
    #[arg(long, default_value_t = 1e-6, global = true)]
    pub independence_tol: f64,
    /// Residual tolerance factor for --verify, scaled by 1 + ||A||_inf.
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub residual_tol: f64,
    /// Largest dense expansion built for --verify.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP, global = true)]
    pub cap: usize,
}

impl ReportFlags {
    fn options(&self) -> ReportOptions {
        ReportOptions {
            eigenvectors: self.eigenvectors,
            verify: self.verify,
            settings: EigenSettings {
                cluster_tol: self.cluster_tol,
                sigma_tol: self.sigma_tol,
                independence_tol: self.independence_tol,
                ..EigenSettings::default()
            },
            residual_factor: self.residual_tol,
            cap: self.cap,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Join document, or `-` for stdin.
    #[arg(default_value = "-")]
    pub input: String,
    #[command(flatten)]
    pub report: ReportFlags,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(subcommand)]
    pub kind: GraphKind,
    #[arg(long, value_enum, default_value_t = Emit::Spec, global = true)]
    pub emit: Emit,
    #[command(flatten)]
    pub report: ReportFlags,
}

#[derive(Debug, Subcommand)]
pub enum GraphKind {
    /// Complete graph K_n.
    Complete {
        #[arg(long)]
        n: usize,
    },
    /// Directed k-cycle.
    Cycle {
        #[arg(long)]
        k: usize,
    },
    /// Ring graph RG(k, m).
    Ring {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Complement of a part such as `ring:7:2`.
    Complement { part: String },
    /// Join of parts: `complete:N`, `cycle:K`, `ring:K:M`, `complement:<part>`.
    Join {
        #[arg(required = true)]
        parts: Vec<String>,
    },
    /// K_n with the edges of a k-cycle removed.
    RemoveCycle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        directed: bool,
    },
}

#[derive(Debug, Args)]
pub struct KuramotoArgs {
    #[command(subcommand)]
    pub action: KuramotoAction,
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Join document, or `-` for stdin.
    #[arg(default_value = "-")]
    pub input: String,
    /// Coupling strength.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Natural frequencies, comma separated (default all zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum KuramotoAction {
    /// Integrate with RK4 and write `t,theta1,...` rows.
    Simulate {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, default_value_t = 1e-2)]
        dt: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Initial state file (JSON array, or an object with a `theta` field).
        #[arg(long, conflicts_with = "j")]
        state: Option<String>,
        /// Start from the twisted state with this Fourier index.
        #[arg(long)]
        j: Option<usize>,
        /// Block phase offsets for the twisted state, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        phi: Option<Vec<f64>>,
        /// Write every n-th row.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Construct the twisted equilibrium and its residual.
    Equilibrium {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long)]
        j: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        phi: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
    /// Test whether a state is an equilibrium.
    Check {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long)]
        state: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
    },
}

/// Anything that ends a command with a nonzero exit code.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Library(Error),
    Verification(report::VerificationFailure),
    /// A constructed equilibrium whose residual exceeds the tolerance.
    NotEquilibrium {
        residual: f64,
        tolerance: f64,
    },
    Io(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) | Failure::Io(_) => EXIT_PARSE,
            Failure::Library(e) if e.is_numerical() => EXIT_NUMERICAL,
            Failure::Library(_) => EXIT_PRECONDITION,
            Failure::Verification(_) | Failure::NotEquilibrium { .. } => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Parse(m) => f.write_str(m),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Verification(v) => write!(
                f,
                "verification failed at eigenvalue {} ({}): residual {:e} exceeds {:e}",
                format_complex(v.eigenvalue),
                v.provenance,
                v.residual,
                v.tolerance
            ),
            Failure::NotEquilibrium { residual, tolerance } => {
                write!(f, "constructed state is not an equilibrium: residual {residual:e} exceeds {tolerance:e}")
            }
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Library(e) => Failure::Library(e),
            ReportError::Verification(v) => Failure::Verification(v),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command, stdin, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {f}");
            f.exit_code()
        }
    }
}

pub fn execute(
    command: &Command,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    match command {
        Command::Spectrum(args) => {
            let doc = read_document(&args.input, stdin)?;
            write_report(&doc.spec, &args.report, stdout)
        }
        Command::Graph(args) => {
            let spec = build_graph(&args.kind)?;
            match args.emit {
                Emit::Spec => {
                    stdout.write_all(JoinDocument::new(spec).emit().as_bytes())?;
                    Ok(())
                }
                Emit::Spectrum => write_report(&spec, &args.report, stdout),
            }
        }
        Command::Kuramoto(args) => run_kuramoto(&args.action, stdin, stdout, stderr),
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {path}: {e}")))?;
    }
    Ok(text)
}

fn read_document(path: &str, stdin: &mut dyn Read) -> Result<JoinDocument, Failure> {
    Ok(JoinDocument::parse(&read_input(path, stdin)?)?)
}

fn write_report(spec: &JoinSpec, flags: &ReportFlags, stdout: &mut dyn Write) -> Result<(), Failure> {
    let report = build_report(spec, &flags.options())?;
    let text = match flags.output {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

fn build_graph(kind: &GraphKind) -> Result<JoinSpec, Failure> {
    let single = |g: CirculantGraph| JoinSpec::single(g.adjacency());
    Ok(match kind {
        GraphKind::Complete { n } => single(graphs::complete_graph(*n)?),
        GraphKind::Cycle { k } => single(graphs::directed_cycle(*k)?),
        GraphKind::Ring { k, m } => single(graphs::ring_graph(*k, *m)?),
        GraphKind::Complement { part } => single(graphs::complement(&parse_part(part)?)),
        GraphKind::Join { parts } => {
            let parts = parts.iter().map(|p| parse_part(p)).collect::<Result<Vec<_>, _>>()?;
            graphs::join(&parts)?
        }
        GraphKind::RemoveCycle { n, k, directed } => graphs::remove_cycle_from_complete(*n, *k, *directed)?,
    })
}

/// `complete:N`, `cycle:K`, `ring:K:M` or `complement:<part>`.
pub fn parse_part(text: &str) -> Result<CirculantGraph, Failure> {
    let bad = || Failure::Parse(format!("unrecognized graph part `{text}`"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let (head, rest) = text.split_once(':').ok_or_else(bad)?;
    match head {
        "complete" => Ok(graphs::complete_graph(num(rest)?)?),
        "cycle" => Ok(graphs::directed_cycle(num(rest)?)?),
        "ring" => {
            let (k, m) = rest.split_once(':').ok_or_else(bad)?;
            Ok(graphs::ring_graph(num(k)?, num(m)?)?)
        }
        "complement" => Ok(graphs::complement(&parse_part(rest)?)),
        _ => Err(bad()),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Plain(Vec<f64>),
    Wrapped { theta: Vec<f64> },
}

fn read_state(path: &str, stdin: &mut dyn Read) -> Result<Vec<f64>, Failure> {
    let text = read_input(path, stdin)?;
    let state: StateFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("state file: line {}, column {}: {e}", e.line(), e.column())))?;
    Ok(match state {
        StateFile::Plain(v) | StateFile::Wrapped { theta: v } => v,
    })
}

fn kuramoto_system(args: &NetworkArgs, stdin: &mut dyn Read) -> Result<KuramotoSystem, Failure> {
    let doc = read_document(&args.input, stdin)?;
    let mut system = KuramotoSystem::with_cap(doc.spec, args.epsilon, args.cap)?;
    if let Some(omega) = &args.omega {
        system = system.with_frequencies(omega.clone())?;
    }
    Ok(system)
}

#[derive(Serialize)]
struct EquilibriumReport<'a> {
    j: usize,
    phis: &'a [f64],
    theta: Vec<f64>,
    residual: f64,
    tolerance: f64,
    equilibrium: bool,
}

#[derive(Serialize)]
struct CheckReport {
    equilibrium: bool,
    residual: f64,
    tolerance: f64,
}

fn run_kuramoto(
    action: &KuramotoAction,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    match action {
        KuramotoAction::Simulate { network, dt, steps, state, j, phi, every } => {
            let system = kuramoto_system(network, stdin)?;
            let theta0 = match (state, j) {
                (Some(path), _) => read_state(path, stdin)?,
                (None, Some(j)) => {
                    let phis = phi.clone().unwrap_or_else(|| vec![0.0; system.network().d()]);
                    system.build_twisted_equilibrium(*j, &phis)?.theta.0
                }
                (None, None) => vec![0.0; system.len()],
            };
            if *every == 0 {
                return Err(Error::Precondition("--every must be at least 1".into()).into());
            }
            let traj = system.integrate(&theta0, *dt, *steps)?;
            let mut header = String::from("t");
            for i in 1..=system.len() {
                write!(header, ",theta{i}").expect("write to string");
            }
            writeln!(stdout, "{header}")?;
            for i in (0..traj.len()).step_by(*every) {
                let mut row = format_real(traj.time(i));
                for x in traj.state(i).as_slice() {
                    row.push(',');
                    row.push_str(&format_real(*x));
                }
                writeln!(stdout, "{row}")?;
            }
            writeln!(stderr, "max_drift {}", format_real(traj.max_drift()))?;
            Ok(())
        }
        KuramotoAction::Equilibrium { network, j, phi, tol, output } => {
            let system = kuramoto_system(network, stdin)?;
            let phis = phi.clone().unwrap_or_else(|| vec![0.0; system.network().d()]);
            let eq = system.build_twisted_equilibrium(*j, &phis)?;
            let check = system.check_equilibrium(eq.theta.as_slice(), *tol)?;
            let theta = eq.theta.reduced().0;
            match output {
                OutputFormat::Json => {
                    let report = EquilibriumReport {
                        j: *j,
                        phis: &phis,
                        theta,
                        residual: check.residual,
                        tolerance: check.tolerance,
                        equilibrium: check.is_equilibrium,
                    };
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
                }
                OutputFormat::Csv => {
                    writeln!(stdout, "index,theta")?;
                    for (i, x) in theta.iter().enumerate() {
                        writeln!(stdout, "{},{}", i + 1, format_real(*x))?;
                    }
                    writeln!(stdout, "\nresidual,tolerance,equilibrium")?;
                    writeln!(
                        stdout,
                        "{},{},{}",
                        format_real(check.residual),
                        format_real(check.tolerance),
                        check.is_equilibrium
                    )?;
                }
            }
            if !check.is_equilibrium {
                return Err(Failure::NotEquilibrium { residual: check.residual, tolerance: check.tolerance });
            }
            Ok(())
        }
        KuramotoAction::Check { network, state, tol, output } => {
            let system = kuramoto_system(network, stdin)?;
            let theta = read_state(state, stdin)?;
            let check = system.check_equilibrium(&theta, *tol)?;
            match output {
                OutputFormat::Json => {
                    let report = CheckReport {
                        equilibrium: check.is_equilibrium,
                        residual: check.residual,
                        tolerance: check.tolerance,
                    };
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
                }
                OutputFormat::Csv => {
                    writeln!(stdout, "equilibrium,residual,tolerance")?;
                    writeln!(
                        stdout,
                        "{},{},{}",
                        check.is_equilibrium,
                        format_real(check.residual),
                        format_real(check.tolerance)
                    )?;
                }
            }
            Ok(())
        }
    }
}

//! `wavrel`: command-line front end for the boundary symplectic toolkit.
//!
//! Every run prints a versioned JSON report on stdout (or a CSV table with
//! `--format csv`). Exit codes: 0 all suites pass, 1 a suite failed (report
//! still emitted), 2 malformed input.

mod commands;
mod domain_spec;
mod report;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavrel_core::diamond::EdgeFunction;
use wavrel_core::fields::BoundaryField;
use wavrel_core::geometry::Domain;
use wavrel_core::misner::MisnerPiece;
use wavrel_core::{BoundaryPoint, Error, Sign};

use commands::{Stages, Table};
use domain_spec::DomainSpec;
use report::RunReport;

#[derive(Debug)]
pub enum CliError {
    /// Malformed arguments, files or domains.
    Input(String),
    Io(String),
    /// Numerical failure inside a suite.
    Suite(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(s) | CliError::Io(s) => f.write_str(s),
            CliError::Suite(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::MetricNotLorentzian { .. }
            | Error::SelfIntersecting { .. }
            | Error::IrregularPoint { .. }
            | Error::InvalidInput(_)
            | Error::AssumptionB { .. }
            | Error::AssumptionC { .. }
            | Error::GridMismatch => CliError::Input(e.to_string()),
            other => CliError::Suite(other),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wavrel", version, about = "Boundary symplectic geometry of the 2D wave equation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Domain-spec JSON file.
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Truncation degree.
    #[arg(long = "K", global = true, default_value_t = 8)]
    k: usize,
    /// Quadrature points per component.
    #[arg(long = "M", global = true, default_value_t = 1024)]
    m: usize,
    /// Sampling grid for tables and root brackets.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Recorded in the report; every randomized step derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the suite tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Side file: the CSV table for tabular commands, the report otherwise.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Format of stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock per stage (output is then no longer reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Isotropy,
    Defect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Boundary {
    Lower,
    Upper,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Light-like boundary points.
    LightPoints,
    /// Sampled table of one involution.
    Involution {
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
    },
    /// Orbit of the composed map `E₊E₋`.
    Orbit {
        #[arg(long)]
        start: f64,
        /// Component of the start point (default: the outer one).
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
    },
    /// Pairing matrix of the `L` basis, or `ω(u, w)` for two field files.
    Pairing {
        /// CSV with columns component,phi,phi_n on the uniform grid.
        #[arg(long, requires = "w")]
        u: Option<String>,
        #[arg(long, requires = "u")]
        w: Option<String>,
    },
    /// Isotropy or defect certificate.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Solvability diagnostics for the Dirichlet problem.
    Dirichlet {
        #[arg(long)]
        diagnose: bool,
    },
    /// Vertex action of `f(σ₊) + g(σ₋)` on a causal diamond.
    Diamond {
        #[arg(long)]
        hj: bool,
        /// One of id, const:c, sin:k, poly:c0,c1,...
        #[arg(long, default_value = "id")]
        f: String,
        #[arg(long, default_value = "id")]
        g: String,
        /// σ₊ range then σ₋ range.
        #[arg(long = "box", num_args = 4, value_names = ["SP0", "SP1", "SM0", "SM1"], allow_negative_numbers = true, default_values_t = [0.0, 1.0, 0.0, 1.0])]
        bx: Vec<f64>,
    },
    /// Reduced flow between concentric circles.
    Flow {
        #[arg(long, conflicts_with = "compose")]
        xi: Option<f64>,
        /// Outer trace: CSV with columns theta,phi,phi_n.
        #[arg(long = "in", requires = "xi")]
        input: Option<String>,
        #[arg(long, num_args = 2, value_names = ["XI1", "XI2"])]
        compose: Option<Vec<f64>>,
        #[arg(long, requires = "compose")]
        check: bool,
    },
    /// Misner cylinder certificates and null curves.
    Misner {
        #[arg(long, conflicts_with = "trace")]
        defect: bool,
        #[arg(long, value_enum, default_value_t = PieceArg::Full)]
        piece: PieceArg,
        /// Start abscissa of a null curve.
        #[arg(long, allow_negative_numbers = true)]
        trace: Option<f64>,
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
        #[arg(long, value_enum, default_value_t = Boundary::Lower)]
        from: Boundary,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PieceArg {
    Full,
    Lower,
    Upper,
}

impl From<PieceArg> for MisnerPiece {
    fn from(p: PieceArg) -> MisnerPiece {
        match p {
            PieceArg::Full => MisnerPiece::Full,
            PieceArg::Lower => MisnerPiece::Lower,
            PieceArg::Upper => MisnerPiece::Upper,
        }
    }
}

fn load_domain(g: &Global, report: &mut RunReport) -> Result<Domain, CliError> {
    let path = g.domain.as_deref().ok_or_else(|| CliError::Input("--domain is required".into()))?;
    let spec = DomainSpec::load(path)?;
    report.domain_hash = Some(spec.hash());
    spec.build()
}

fn read_boundary_csv(path: &str, domain: &Domain) -> Result<BoundaryField, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let n = domain.component_count();
    let (mut phi, mut phi_n) = (vec![Vec::new(); n], vec![Vec::new(); n]);
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let bad = || CliError::Input(format!("{path}: expected columns component,phi,phi_n"));
        let c: usize = rec.get(0).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        if c >= n {
            return Err(CliError::Input(format!("{path}: component {c} out of range")));
        }
        phi[c].push(rec.get(1).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?);
        phi_n[c].push(rec.get(2).ok_or_else(bad)?.trim().parse().map_err(|_| bad())?);
    }
    Ok(BoundaryField::new(phi, phi_n)?)
}

fn run(cli: &Cli, report: &mut RunReport, st: &mut Stages) -> Result<Option<Table>, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::LightPoints => {
            let d = load_domain(g, report)?;
            commands::light_points(&d, g.grid.unwrap_or(4096), report, st).map(Some)
        }
        Command::Involution { sign } => {
            let d = load_domain(g, report)?;
            commands::involution(&d, (*sign).into(), g.grid.unwrap_or(2048), report, st).map(Some)
        }
        Command::Orbit { start, component, iters } => {
            let d = load_domain(g, report)?;
            let p = BoundaryPoint::new(component.unwrap_or(d.outer()), *start);
            commands::orbit_cmd(&d, p, *iters, report, st).map(Some)
        }
        Command::Pairing { u, w } => {
            let d = load_domain(g, report)?;
            let fields = match (u, w) {
                (Some(u), Some(w)) => Some((read_boundary_csv(u, &d)?, read_boundary_csv(w, &d)?)),
                _ => None,
            };
            commands::pairing(&d, fields, g.k, g.m, g.tol.unwrap_or(1e-7), report, st)?;
            Ok(None)
        }
        Command::Verify { suite } => {
            let d = load_domain(g, report)?;
            let name = match suite {
                Suite::Isotropy => "isotropy",
                Suite::Defect => "defect",
            };
            commands::verify(&d, name, g.k, g.m, g.tol, report, st)?;
            Ok(None)
        }
        Command::Dirichlet { diagnose } => {
            if !diagnose {
                return Err(CliError::Input("dirichlet: only --diagnose is available".into()));
            }
            let d = load_domain(g, report)?;
            commands::dirichlet(&d, g.m.min(512), report, st)?;
            Ok(None)
        }
        Command::Diamond { hj, f, g: gf, bx } => {
            if !hj {
                return Err(CliError::Input("diamond: only --hj is available".into()));
            }
            let f: EdgeFunction = f.parse()?;
            let gf: EdgeFunction = gf.parse()?;
            let bx = [bx[0], bx[1], bx[2], bx[3]];
            commands::diamond(&f, &gf, bx, g.grid.unwrap_or(257), g.tol.unwrap_or(1e-10), report, st)?;
            Ok(None)
        }
        Command::Flow { xi, input, compose, check } => match (xi, compose) {
            (Some(xi), None) => {
                let path = input.as_deref().ok_or_else(|| CliError::Input("flow: --in is required with --xi".into()))?;
                let u = commands::read_circle_csv(path)?;
                commands::flow(&u, *xi, g.tol.unwrap_or(1e-6), report, st).map(Some)
            }
            (None, Some(ab)) => {
                if !check {
                    return Err(CliError::Input("flow: --compose needs --check".into()));
                }
                commands::compose(ab[0], ab[1], g.grid.unwrap_or(512), g.tol.unwrap_or(1e-6), report, st)?;
                Ok(None)
            }
            _ => Err(CliError::Input("flow: give either --xi or --compose".into())),
        },
        Command::Misner { defect, piece, trace, sign, from } => {
            if let Some(path) = &g.domain {
                let spec = DomainSpec::load(path)?;
                if !spec.is_misner() {
                    return Err(CliError::Input("misner: domain spec must use the misner metric".into()));
                }
                report.domain_hash = Some(spec.hash());
            }
            match (defect, trace) {
                (true, None) => {
                    commands::misner_defect((*piece).into(), g.k, report, st)?;
                    Ok(None)
                }
                (false, Some(x0)) => commands::misner_trace_cmd(*x0, *from == Boundary::Upper, (*sign).into(), report, st).map(Some),
                _ => Err(CliError::Input("misner: give either --defect or --trace".into())),
            }
        }
    }
}

fn write_file(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // All suites are single-threaded, so any WAVREL_THREADS cap is honored.
    let mut report = RunReport::new(argv[1..].to_vec(), cli.global.seed);
    let mut st = Stages::new();
    let outcome = run(&cli, &mut report, &mut st);
    if cli.global.timings {
        report.timings = Some(st.finish());
    }
    let table = match outcome {
        Ok(t) => t,
        Err(CliError::Suite(e)) => {
            report.pass = false;
            report.error = Some(e.to_string());
            None
        }
        Err(e) => {
            eprintln!("wavrel: {e}");
            return ExitCode::from(2);
        }
    };
    report.pass &= report.suites.iter().all(|s| s.pass);
    let json = report.to_json();
    let csv = match table.as_ref().map(Table::to_csv).transpose() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("wavrel: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.global.out {
        let side = csv.as_deref().unwrap_or(&json);
        if let Err(e) = write_file(path, side) {
            eprintln!("wavrel: {e}");
            return ExitCode::from(2);
        }
    }
    match (cli.global.format, &csv) {
        (Format::Csv, Some(c)) => print!("{c}"),
        _ => print!("{json}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

//! `blockpinv`: block pseudoinverse computations from the command line.

mod io;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockpinv_core::harness::{gen_block_detailed, verify_all, Dims, GenSpec, RankBounds, Strategy, VerifyConfig};
use blockpinv_core::{Formula, Inclusion, Pivot, Rational, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{Entry, InputError};
use crate::report::Output;

#[derive(Parser, Debug)]
#[command(name = "blockpinv", version, about = "Pseudo Schur complements, pivot transforms and block Moore-Penrose inverses")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Arithmetic: IEEE doubles or exact rationals.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    mode: Mode,
    /// Relative tolerance for matrix equality.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative tolerance for range-inclusion residuals.
    #[arg(long, global = true)]
    incl_tol: Option<f64>,
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Scale of the Penrose certificate bound.
    #[arg(long, global = true)]
    cert_tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Exit with status 2 when a hypothesis of the computation fails.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    A,
    D,
}

impl From<Side> for Pivot {
    fn from(s: Side) -> Self {
        match s {
            Side::A => Pivot::A,
            Side::D => Pivot::D,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    F,
    G,
    Mixed,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::F => Formula::ViaF,
            FormulaArg::G => Formula::ViaG,
            FormulaArg::Mixed => Formula::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    BlockDiagonal,
    ARange,
    DRange,
    ASide,
    DSide,
    PivotPair,
    Nonsingular,
    Rejection,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::BlockDiagonal => Strategy::BlockDiagonal,
            StrategyArg::ARange => Strategy::ARange,
            StrategyArg::DRange => Strategy::DRange,
            StrategyArg::ASide => Strategy::ASide,
            StrategyArg::DSide => Strategy::DSide,
            StrategyArg::PivotPair => Strategy::PivotPair,
            StrategyArg::Nonsingular => Strategy::Nonsingular,
            StrategyArg::Rejection => Strategy::Rejection,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moore-Penrose inverse with its Penrose certificate.
    Pinv { file: PathBuf },
    /// Pseudo Schur complement of A (F) or of D (G).
    Schur {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::A)]
        relative_to: Side,
    },
    /// Pseudo principal pivot transform on A, or its complementary form on D.
    Ppt {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::A)]
        relative_to: Side,
    },
    /// Block formula for the Moore-Penrose inverse.
    BlockPinv {
        file: PathBuf,
        #[arg(long, value_enum)]
        formula: FormulaArg,
    },
    /// Range-inclusion report and the formulas it licenses.
    Check { file: PathBuf },
    /// Randomized verification of every block identity.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a block matrix with prescribed range inclusions.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Block sizes m,n,s,p: A is m x n and D is s x p.
    #[arg(long, value_delimiter = ',', value_name = "M,N,S,P", default_values_t = [2, 2, 2, 2])]
    dims: Vec<usize>,
    /// Inclusions to enforce, by name (incl_B_A, ...) or set
    /// (a-range, d-range, a-side, d-side, pivot-pair, all).
    #[arg(long, value_delimiter = ',')]
    require: Vec<String>,
    /// Target rank of A.
    #[arg(long)]
    rank_a: Option<usize>,
    /// Target rank of B.
    #[arg(long)]
    rank_b: Option<usize>,
    /// Target rank of C.
    #[arg(long)]
    rank_c: Option<usize>,
    /// Target rank of D.
    #[arg(long)]
    rank_d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Construction to use; chosen from the requirements when omitted.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Allow a rectangular, possibly singular F or G.
    #[arg(long)]
    rectangular: bool,
    /// Redraws allowed before giving up on a float instance.
    #[arg(long)]
    max_rejects: Option<usize>,
    /// Destination file, written as a JSON matrix with its split.
    #[arg(short, long)]
    output: PathBuf,
}

/// Failure classes of the exit-status contract.
#[derive(Debug)]
pub enum Failure {
    /// Status 1: unreadable input, bad shapes or arguments.
    Input(String),
    /// Status 3: a result failed its own certificate or oracle.
    Oracle(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<blockpinv_core::Error> for Failure {
    fn from(e: blockpinv_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.global.mode {
        Mode::Float => run::<f64>(&cli),
        Mode::Rational => run::<Rational>(&cli),
    };
    match result {
        Ok(out) => {
            print!("{}", out.render(cli.global.format));
            if let Some(reason) = &out.oracle_failure {
                eprintln!("error: {reason}");
                ExitCode::from(3)
            } else if cli.global.strict && !out.hypotheses_hold {
                eprintln!("error: hypotheses violated");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Oracle(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn tolerances(g: &Global) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        rank: g.rank_tol.or(d.rank),
        cert: g.cert_tol.unwrap_or(d.cert),
        eq: g.tol.unwrap_or(d.eq),
        incl: g.incl_tol.unwrap_or(d.incl),
    }
}

fn read<T: Entry>(path: &Path) -> Result<io::MatrixFile<T>, Failure> {
    let source = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
    Ok(io::parse(&source, &text)?)
}

fn run<T: Entry>(cli: &Cli) -> Result<Output, Failure> {
    let tol = tolerances(&cli.global);
    for (name, v) in [("tol", tol.eq), ("incl-tol", tol.incl), ("cert-tol", tol.cert)]
        .into_iter()
        .chain(tol.rank.map(|r| ("rank-tol", r)))
    {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Failure::Input(format!("--{name} must be a non-negative number")));
        }
    }
    match &cli.command {
        Command::Pinv { file } => report::pinv(&read::<T>(file)?.matrix, &tol),
        Command::Schur { file, relative_to } => {
            let mb = read::<T>(file)?.block(&file.display().to_string())?;
            Ok(report::schur(&mb, (*relative_to).into(), &tol))
        }
        Command::Ppt { file, relative_to } => {
            let mb = read::<T>(file)?.block(&file.display().to_string())?;
            Ok(report::ppt(&mb, (*relative_to).into(), &tol))
        }
        Command::BlockPinv { file, formula } => {
            let mb = read::<T>(file)?.block(&file.display().to_string())?;
            Ok(report::block_pinv(&mb, (*formula).into(), &tol))
        }
        Command::Check { file } => {
            let mb = read::<T>(file)?.block(&file.display().to_string())?;
            Ok(report::check(&mb, &tol))
        }
        Command::Verify { trials, seed } => {
            let cfg = VerifyConfig {
                tol,
                ..VerifyConfig::new(*trials, *seed)
            };
            Ok(report::verify(verify_all::<T>(&cfg)))
        }
        Command::Gen(args) => gen::<T>(args, &tol),
    }
}

fn parse_require(items: &[String]) -> Result<Vec<Inclusion>, Failure> {
    let mut out: Vec<Inclusion> = Vec::new();
    for item in items {
        let set: Vec<Inclusion> = match item.as_str() {
            "a-range" => Inclusion::A_RANGE.to_vec(),
            "d-range" => Inclusion::D_RANGE.to_vec(),
            "a-side" => Inclusion::A_SIDE.to_vec(),
            "d-side" => Inclusion::D_SIDE.to_vec(),
            "pivot-pair" => Inclusion::PIVOT_PAIR.to_vec(),
            "all" => Inclusion::ALL.to_vec(),
            name => vec![Inclusion::from_name(name)
                .ok_or_else(|| Failure::Input(format!("--require: unknown inclusion '{name}'")))?],
        };
        for i in set {
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    Ok(out)
}

fn gen<T: Entry>(args: &GenArgs, tol: &Tolerances) -> Result<Output, Failure> {
    let [m, n, s, p] = args.dims[..] else {
        return Err(Failure::Input("--dims needs four sizes m,n,s,p".into()));
    };
    let mut spec = GenSpec::new(Dims::new(m, n, s, p), &parse_require(&args.require)?, args.seed).with_ranks(
        RankBounds {
            a: args.rank_a,
            b: args.rank_b,
            c: args.rank_c,
            d: args.rank_d,
        },
    );
    spec.strategy = args.strategy.map(Strategy::from);
    spec.rectangular_schur = args.rectangular;
    if let Some(r) = args.max_rejects {
        spec.max_rejects = r;
    }
    let generated = gen_block_detailed::<T>(&spec, tol)?;
    let text = io::file_text(&io::FileOut::block(&generated.block));
    fs::write(&args.output, text).map_err(|e| Failure::Input(format!("{}: {e}", args.output.display())))?;
    Ok(report::generated(&generated, &spec, &args.output, tol))
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(name = "snum", version, about = "Certified s-number bounds for the Volterra operator and the cube embedding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bounds for V: L¹₀ → C[0,1] on a uniform grid.
    Volterra(VolterraArgs),
    /// Bounds for the embedding of the Lorentz-gradient space into C(Q), Q = [0,1]^d.
    Cube(CubeArgs),
    /// Build a Hilbert-curve ordering and optionally check it.
    Hilbert(HilbertArgs),
    /// John constants of segment domains along a Hilbert curve.
    John(JohnArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for snum_core::scalar::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Self::Exact,
            ModeArg::Float => Self::Float,
        }
    }
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VolterraArgs {
    /// n values: `3`, `1,2,4` or `1..5` (inclusive).
    #[arg(long, value_parser = parse_n_list)]
    pub n: NList,
    /// Number of uniform cells N.
    #[arg(long, default_value_t = 240)]
    pub grid: usize,
    /// Comma-separated kinds among a,c,d,b,i.
    #[arg(long, default_value = "a,c,d,b,i")]
    pub kinds: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Slack ε of the zigzag search.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Quantization width of the Gelfand adversary, as 1/denominator.
    #[arg(long, default_value_t = 1000)]
    pub gelfand_denominator: i64,
    /// Largest k of the Kolmogorov test family.
    #[arg(long, default_value_t = 10)]
    pub k_max: u32,
    #[arg(long, default_value = "snum-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CubeArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Hat functions per side: n = m^d.
    #[arg(long, value_parser = parse_n_list, default_value = "1,2,4")]
    pub m: NList,
    /// Lorentz exponents `p,q` of the gradient space (default `d,1`).
    #[arg(long)]
    pub space: Option<String>,
    /// Hilbert curve order k used by the Bernstein chain.
    #[arg(long, default_value_t = 3)]
    pub curve_order: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "snum-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct HilbertArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub order: u32,
    /// Verify face adjacency and prefix nesting.
    #[arg(long)]
    pub check: bool,
    /// Write the ordering as CSV and JSON into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct JohnArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub order: u32,
    /// Check only this segment `i,j` (1-based labels).
    #[arg(long)]
    pub segment: Option<String>,
    /// Number of random segments; all segments when omitted and there are at most 5000.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Curve evaluations per domain.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "snum-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Fault {
    Hilbert,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Absolute comparison tolerance in float mode.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Run only these criteria, e.g. `1,5,6` or `1..4`.
    #[arg(long, value_parser = parse_n_list)]
    pub criteria: Option<NList>,
    /// Also write the results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, serde::Serialize)]
#[serde(transparent)]
pub struct NList(pub Vec<usize>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|_| format!("bad range start in `{part}`"))?;
            let b: usize = b.parse().map_err(|_| format!("bad range end in `{part}`"))?;
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("`{part}` is not a positive integer"))?);
        }
    }
    if out.contains(&0) {
        return Err("n must be at least 1".into());
    }
    Ok(NList(out))
}

/// Why a run stopped early; maps to the exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Violation(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Violation(_) | Failure::Internal(_) => 1,
        }
    }
}

impl From<snum_core::SnumError> for Failure {
    fn from(e: snum_core::SnumError) -> Self {
        use snum_core::SnumError::*;
        match e {
            Precondition(_) | DimensionMismatch(_) | Domain(_) | UnsupportedRegime { .. } | IndexOutOfRange(_) | Capacity(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(format!("i/o: {e}"))
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("SNUM_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring SNUM_THREADS={v}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Volterra(a) => commands::volterra(&a),
        Command::Cube(a) => commands::cube(&a),
        Command::Hilbert(a) => commands::hilbert(&a),
        Command::John(a) => commands::john(&a),
        Command::Selftest(a) => commands::selftest(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Violation(m) => eprintln!("violation: {m}"),
                Failure::Internal(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("1..5").unwrap().0, vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_n_list("2, 7,3..4").unwrap().0, vec![2, 7, 3, 4]);
        assert!(parse_n_list("0").is_err());
        assert!(parse_n_list("5..1").is_err());
        assert!(parse_n_list("x").is_err());
    }
}

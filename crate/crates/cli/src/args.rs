use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use guinand::explicit::{ArchimedeanOrientation, BoundaryOrientation};
use guinand::report::parse_complex;
use guinand::Complex64;

#[derive(Debug, Parser)]
#[command(name = "guinand", version, about = "Numerical checks of a prime power equation built from theta kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Cutoff of the outer Bessel sum.
    #[arg(long, global = true, default_value_t = 200)]
    pub j_max: usize,

    /// Relative tail tolerance for every series.
    #[arg(long, global = true, default_value_t = 1e-15)]
    pub tail_eps: f64,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; defaults to csv for `.csv` paths, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Identity checks.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// The truncated system T Λ = V.
    Matrix {
        #[command(subcommand)]
        what: Matrix,
    },
    /// Chebyshev's Ψ₀ against the explicit formula.
    Psi0 {
        #[command(subcommand)]
        what: Psi0,
    },
    /// Operations on saved reports.
    Report {
        #[command(subcommand)]
        what: Report,
    },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// E(s)ζ(s) against the Bessel double sum.
    Lemma1 {
        #[arg(long, value_parser = parse_complex_list, default_value = "2,2.5,3,1.5+5i,0.5+10i")]
        s: ComplexList,
    },
    /// Ĝ(t) = E(½+it)ζ(½+it) on a t grid.
    GhatGrid {
        #[arg(long, value_parser = parse_grid, default_value = "0:20:5")]
        t_grid: Grid,
    },
    /// Relative dip of |Ĝ| at zeta zeros.
    ZerosDip {
        #[arg(long, default_value_t = 5)]
        zeros: usize,
    },
    /// The prime power equation at each translate.
    Ppe {
        #[arg(long, value_parser = parse_real_list, default_value = "1,5/4,3/2,2,e,3,5")]
        x: RealList,
        /// Attach Ĝ(±i/2) to √x the other way round (diagnostic).
        #[arg(long, value_enum, default_value_t = BoundaryArg::Translate)]
        boundary: BoundaryArg,
        /// Sign of the log π term (diagnostic).
        #[arg(long, value_enum, default_value_t = LogPiArg::MinusLogPi)]
        archimedean_orientation: LogPiArg,
    },
    /// Integral against digamma form of the Archimedean term.
    Archimedean {
        #[arg(long, value_parser = parse_real_list, default_value = "1,2")]
        x: RealList,
    },
    /// Removal of the Bessel terms by f(x) + f(1/x) − f(1)(√x + 1/√x).
    Elimination {
        #[arg(long, value_parser = parse_real_list, default_value = "2")]
        x: RealList,
    },
    /// θ₄⁸ identity with its constant-ratio gate.
    Weight8 {
        #[arg(long, value_parser = parse_complex_list, default_value = "2,2.5,3")]
        s: ComplexList,
    },
    /// Special values at τ = i.
    Modular,
    /// Block-sum and diagonal diagnostics of T.
    Structure {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n: Vec<u64>,
    },
    /// Integer q-expansion identities.
    Qexp {
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Acceptance criteria, one or all.
    Acceptance {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        criterion: Option<u8>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Matrix {
    /// Build T_N and V; CSV holds T only.
    Build {
        #[arg(long)]
        n: usize,
    },
    /// Regularized recovery of Λ.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        ridge: f64,
        /// Replace V by T·Λ before solving; the result is then gated.
        #[arg(long)]
        synthetic: bool,
    },
    /// Forward residuals against the true Λ.
    Residual {
        #[arg(long)]
        n: usize,
        /// Column cutoff; defaults to 40·N.
        #[arg(long)]
        n_tail: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Psi0 {
    Compare {
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        zeros: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Report {
    /// Combine saved JSON reports.
    Merge { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Translate,
    Swapped,
}

impl From<BoundaryArg> for BoundaryOrientation {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Translate => Self::Translate,
            BoundaryArg::Swapped => Self::Swapped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogPiArg {
    MinusLogPi,
    PlusLogPi,
}

impl From<LogPiArg> for ArchimedeanOrientation {
    fn from(a: LogPiArg) -> Self {
        match a {
            LogPiArg::MinusLogPi => Self::MinusLogPi,
            LogPiArg::PlusLogPi => Self::PlusLogPi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_complex_list(text: &str) -> Result<ComplexList, String> {
    text.split(',')
        .map(|p| parse_complex(p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(ComplexList)
}

/// A positive real: decimal, `a/b`, `e` or `pi`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let v = match t {
        "e" => std::f64::consts::E,
        "pi" => std::f64::consts::PI,
        _ => match t.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in '{t}'"))?;
                let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in '{t}'"))?;
                a / b
            }
            None => t.parse().map_err(|_| format!("cannot parse '{t}' as a number"))?,
        },
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{t}' must be a positive finite number"))
    }
}

pub fn parse_real_list(text: &str) -> Result<RealList, String> {
    text.split(',').map(parse_real).collect::<Result<Vec<_>, _>>().map(RealList)
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("grid '{text}' must look like lo:hi:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number '{s}' in grid"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if step.is_nan() || step <= 0.0 || hi < lo {
        return Err(format!("grid '{text}' needs step > 0 and hi >= lo"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(format!("grid '{text}' has too many points"));
    }
    Ok(Grid((0..count).map(|k| lo + k as f64 * step).collect()))
}

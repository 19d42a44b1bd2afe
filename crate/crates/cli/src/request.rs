//! Command-line flags and their validation into an [`ExperimentRequest`].

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use masspcg::krylov::StoppingRule;
use masspcg::{GridSpec, OperatorKind, Preconditioner, RightHandSide};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Sorted eigenvalues of one operator (`index,eigenvalue`).
    Spectrum,
    /// κ, κ_p, r and √r for one dimension and one or more n.
    Condition,
    /// One CG solve; emits the residual history (`iter,residual_norm`).
    Solve,
    /// Condition-number ratios for n ∈ {8,16,32}, d ∈ {1,2,3}.
    Table1,
    /// Iteration counts with and without the mass preconditioner.
    Table2,
    /// Eigenvalue and convergence-history CSVs for the figures.
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecondFlag {
    None,
    Mass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhsFlag {
    Ones,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindFlag {
    Laplacian,
    Mass,
    Preconditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResidualFlag {
    /// ‖r‖₂ < tol·‖b‖₂
    Relative,
    /// ‖r‖₂ < tol
    Absolute,
}

/// Mass-matrix preconditioned CG for the finite-difference Poisson equation.
#[derive(Debug, Parser)]
#[command(name = "masspcg", version, about)]
pub struct Cli {
    pub command: Command,

    /// Spatial dimension.
    #[arg(long = "dim", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: Option<u8>,

    /// Interior points per axis (repeatable for condition/table commands).
    #[arg(long = "n")]
    pub n: Vec<usize>,

    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = PrecondFlag::None)]
    pub precond: PrecondFlag,

    #[arg(long, value_enum, default_value_t = RhsFlag::Ones)]
    pub rhs: RhsFlag,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Output file (a directory for `figures`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Operator for `spectrum`.
    #[arg(long, value_enum, default_value_t = KindFlag::Preconditioned)]
    pub kind: KindFlag,

    /// How the stopping threshold is formed from --tol.
    #[arg(long, value_enum, default_value_t = ResidualFlag::Relative)]
    pub residual: ResidualFlag,

    /// Iteration cap per solve (default 10·N).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// A fully validated command.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRequest {
    pub command: Command,
    pub dim: Option<usize>,
    pub ns: Vec<usize>,
    pub tol: f64,
    pub preconditioner: Preconditioner,
    pub rhs: RightHandSide,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub kind: OperatorKind,
    pub stopping: StoppingRule,
    pub max_iter: Option<usize>,
}

impl ExperimentRequest {
    pub fn parse_from<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).and_then(|cli| {
            Self::try_from(cli).map_err(|e| clap::Error::raw(clap::error::ErrorKind::ValueValidation, e.0 + "\n"))
        })
    }

    /// The single grid named by `--dim` and one `--n`.
    pub fn single_spec(&self) -> Result<GridSpec, UsageError> {
        let dim = self.dim.ok_or_else(|| usage("--dim is required"))?;
        match self.ns.as_slice() {
            [n] => GridSpec::new(dim, *n).map_err(|e| usage(e.to_string())),
            [] => Err(usage("--n is required")),
            _ => Err(usage("exactly one --n expected")),
        }
    }

    /// All grids named by `--dim` and the `--n` list.
    pub fn specs(&self) -> Result<Vec<GridSpec>, UsageError> {
        let dim = self.dim.ok_or_else(|| usage("--dim is required"))?;
        if self.ns.is_empty() {
            return Err(usage("at least one --n is required"));
        }
        self.ns.iter().map(|&n| GridSpec::new(dim, n).map_err(|e| usage(e.to_string()))).collect()
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl TryFrom<Cli> for ExperimentRequest {
    type Error = UsageError;

    fn try_from(cli: Cli) -> Result<Self, UsageError> {
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            return Err(usage(format!("--tol must be positive and finite, got {}", cli.tol)));
        }
        if cli.max_iter == Some(0) {
            return Err(usage("--max-iter must be at least 1"));
        }
        if cli.n.contains(&0) {
            return Err(usage("--n must be at least 1"));
        }
        let req = ExperimentRequest {
            command: cli.command,
            dim: cli.dim.map(usize::from),
            ns: cli.n,
            tol: cli.tol,
            preconditioner: match cli.precond {
                PrecondFlag::None => Preconditioner::None,
                PrecondFlag::Mass => Preconditioner::Mass,
            },
            rhs: match cli.rhs {
                RhsFlag::Ones => RightHandSide::Ones,
                RhsFlag::Random => RightHandSide::Random { seed: cli.seed },
            },
            out: cli.out,
            format: cli.format,
            kind: match cli.kind {
                KindFlag::Laplacian => OperatorKind::Laplacian,
                KindFlag::Mass => OperatorKind::Mass,
                KindFlag::Preconditioned => OperatorKind::Preconditioned,
            },
            stopping: match cli.residual {
                ResidualFlag::Relative => StoppingRule::Relative,
                ResidualFlag::Absolute => StoppingRule::Absolute,
            },
            max_iter: cli.max_iter,
        };
        match req.command {
            Command::Spectrum | Command::Solve => {
                req.single_spec()?;
            }
            Command::Condition => {
                req.specs()?;
            }
            Command::Table1 | Command::Table2 => {
                if req.dim.is_none() && !req.ns.is_empty() {
                    return Err(usage("--n needs --dim for table commands"));
                }
            }
            Command::Figures => {
                if req.out.is_none() {
                    return Err(usage("figures needs --out <directory>"));
                }
            }
        }
        Ok(req)
    }
}

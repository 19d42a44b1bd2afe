//! The experiment commands. Every number is computed here from the core
//! library; nothing is cached or hard-coded in this layer.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use masspcg::krylov::IterationComparison;
use masspcg::spectrum::{full_spectrum, ratio_report};
use masspcg::{
    cg_solve, predicted_vs_observed, GridSpec, GridVector, OperatorKind, Preconditioner, RatioReport,
    RightHandSide, SolveConfig, SolveReport,
};
use thiserror::Error;

use crate::exit;
use crate::request::{Command, ExperimentRequest, Format, UsageError};
use crate::table::Table;

/// Grid sizes of the condition-number table.
pub const TABLE1_NS: [usize; 3] = [8, 16, 32];

/// `(dim, n)` cells of the iteration-count table.
pub const TABLE2_CELLS: [(usize, usize); 8] =
    [(2, 32), (2, 64), (2, 128), (2, 256), (3, 32), (3, 64), (3, 96), (3, 128)];

/// Convergence-history figures: `(file prefix, dim, n)`.
pub const HISTORY_FIGURES: [(&str, usize, usize); 4] =
    [("fig2", 2, 128), ("fig2", 2, 256), ("fig3", 3, 64), ("fig3", 3, 128)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NotConverged,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => exit::SUCCESS,
            Outcome::NotConverged => exit::NOT_CONVERGED,
        }
    }

    fn and(self, other: Outcome) -> Outcome {
        if self == Outcome::Success {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Core(#[from] masspcg::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> u8 {
        match self {
            ExperimentError::Usage(_) | ExperimentError::Io(_) => exit::USAGE,
            ExperimentError::Core(masspcg::Error::ResourceCap { .. }) => exit::RESOURCE_CAP,
            ExperimentError::Core(masspcg::Error::Breakdown { .. }) => exit::NOT_CONVERGED,
            ExperimentError::Core(_) => exit::USAGE,
        }
    }
}

pub fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

/// One row per grid: `d,n,kappa,kappa_p,r,predicted_iter_ratio`.
pub fn condition_table(specs: &[GridSpec]) -> Table {
    let mut t = Table::new(["d", "n", "kappa", "kappa_p", "r", "predicted_iter_ratio"]);
    for &spec in specs {
        push_ratio_row(&mut t, &ratio_report(spec));
    }
    t
}

fn push_ratio_row(t: &mut Table, rep: &RatioReport) {
    t.push(vec![
        rep.spec.dim().to_string(),
        rep.spec.n().to_string(),
        fmt4(rep.kappa),
        fmt4(rep.kappa_p),
        fmt4(rep.r),
        fmt4(rep.predicted_iter_ratio),
    ]);
}

fn table1_specs(dim: Option<usize>, ns: &[usize]) -> Vec<Vec<GridSpec>> {
    let dims: Vec<usize> = dim.map_or_else(|| vec![1, 2, 3], |d| vec![d]);
    let ns: Vec<usize> = if ns.is_empty() { TABLE1_NS.to_vec() } else { ns.to_vec() };
    dims.iter()
        .map(|&d| ns.iter().map(|&n| GridSpec::new(d, n).expect("validated grid")).collect())
        .collect()
}

/// Condition-number table. CSV is one row per `(d, n)`; markdown follows
/// the `κ/κ_p ≈ r` layout with one row per dimension.
pub fn table1(dim: Option<usize>, ns: &[usize], format: Format) -> String {
    let grid = table1_specs(dim, ns);
    match format {
        Format::Csv => condition_table(&grid.concat()).to_csv(),
        Format::Markdown => {
            let mut header = vec!["r_d".to_string()];
            header.extend(grid[0].iter().map(|s| s.n().to_string()));
            let mut t = Table::new(header);
            for row in &grid {
                let mut cells = vec![format!("r_{}", row[0].dim())];
                for &spec in row {
                    let rep = ratio_report(spec);
                    cells.push(format!("{}/{} ≈ {:.1}", fmt4(rep.kappa), fmt4(rep.kappa_p), rep.r));
                }
                t.push(cells);
            }
            t.to_markdown()
        }
    }
}

/// Cells of the iteration-count table selected by `--dim`/`--n`.
pub fn table2_cells(dim: Option<usize>, ns: &[usize]) -> Vec<(usize, usize)> {
    match (dim, ns.is_empty()) {
        (None, _) => TABLE2_CELLS.to_vec(),
        (Some(d), true) => TABLE2_CELLS.iter().copied().filter(|&(cd, _)| cd == d).collect(),
        (Some(d), false) => ns.iter().map(|&n| (d, n)).collect(),
    }
}

/// Rough wall-clock estimate for one table-2 cell.
pub fn estimate_seconds(spec: GridSpec, tol: f64) -> f64 {
    let rep = ratio_report(spec);
    let unprec = 0.5 * rep.kappa.sqrt() * (2.0 / tol).ln();
    let prec = unprec / rep.predicted_iter_ratio;
    spec.len() as f64 * (unprec * 6e-9 + prec * 14e-9)
}

pub fn table2_rows(
    cells: &[(usize, usize)],
    rhs: RightHandSide,
    cfg: &SolveConfig,
    log: &mut dyn Write,
) -> Result<Vec<IterationComparison>, ExperimentError> {
    let mut rows = Vec::with_capacity(cells.len());
    for &(dim, n) in cells {
        let spec = GridSpec::new(dim, n)?;
        if spec.len() >= 100_000 {
            writeln!(
                log,
                "table2: {spec} has {} unknowns, estimated {:.0} s",
                spec.len(),
                estimate_seconds(spec, cfg.tol).ceil()
            )?;
        }
        rows.push(predicted_vs_observed(spec, &rhs.build(spec), cfg)?);
    }
    Ok(rows)
}

pub fn table2_table(rows: &[IterationComparison]) -> Table {
    let mut t = Table::new(["type", "n", "mtx-size", "itn-unprec", "itn-prec", "th-itn-ratio", "itn-ratio"]);
    for row in rows {
        let mark = |converged: bool| if converged { "" } else { "*" };
        t.push(vec![
            format!("{}D", row.spec.dim()),
            row.spec.n().to_string(),
            row.spec.len().to_string(),
            format!("{}{}", row.itn_unprec, mark(row.unprec_converged)),
            format!("{}{}", row.itn_prec, mark(row.prec_converged)),
            fmt2(row.theoretical_ratio),
            fmt2(row.observed_ratio),
        ]);
    }
    t
}

/// `index,eigenvalue`, ascending, one-based index.
pub fn spectrum_table(kind: OperatorKind, spec: GridSpec) -> Result<Table, ExperimentError> {
    let values = full_spectrum(kind, spec)?;
    let mut t = Table::new(["index", "eigenvalue"]);
    for (i, v) in values.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), v.to_string()]);
    }
    Ok(t)
}

/// `iter,residual_norm` for `j = 0..=iterations`.
pub fn history_table(report: &SolveReport) -> Table {
    let mut t = Table::new(["iter", "residual_norm"]);
    for (j, r) in report.residual_history.iter().enumerate() {
        t.push(vec![j.to_string(), format!("{r:e}")]);
    }
    t
}

fn solve_config(req: &ExperimentRequest, preconditioner: Preconditioner) -> SolveConfig {
    SolveConfig {
        tol: req.tol,
        max_iter: req.max_iter,
        preconditioner,
        stopping: req.stopping,
        record_history: true,
    }
}

pub fn solve(spec: GridSpec, req: &ExperimentRequest, preconditioner: Preconditioner) -> Result<SolveReport, ExperimentError> {
    let b = req.rhs.build(spec);
    Ok(cg_solve(spec, &b, &GridVector::zeros(spec), &solve_config(req, preconditioner))?)
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Markdown => table.to_markdown(),
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn precond_name(p: Preconditioner) -> &'static str {
    match p {
        Preconditioner::None => "none",
        Preconditioner::Mass => "mass",
    }
}

/// Writes the figure datasets into `dir`; returns the files written.
pub fn figures(
    dir: &Path,
    req: &ExperimentRequest,
    log: &mut dyn Write,
) -> Result<(Vec<String>, Outcome), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let fig1 = GridSpec::new(2, 32)?;
    for kind in [OperatorKind::Laplacian, OperatorKind::Preconditioned] {
        let name = format!("fig1_{}_2d_n32.csv", kind.name());
        fs::write(dir.join(&name), spectrum_table(kind, fig1)?.to_csv())?;
        written.push(name);
    }

    let mut outcome = Outcome::Success;
    let selected = HISTORY_FIGURES.iter().filter(|&&(_, d, n)| {
        req.dim.map_or(true, |rd| rd == d) && (req.ns.is_empty() || req.ns.contains(&n))
    });
    for &(prefix, dim, n) in selected {
        let spec = GridSpec::new(dim, n)?;
        for pre in [Preconditioner::None, Preconditioner::Mass] {
            writeln!(log, "figures: solving {spec} with preconditioner={}", precond_name(pre))?;
            let rep = solve(spec, req, pre)?;
            if !rep.converged {
                outcome = Outcome::NotConverged;
            }
            let name = format!("{prefix}_{dim}d_n{n}_{}.csv", precond_name(pre));
            fs::write(dir.join(&name), history_table(&rep).to_csv())?;
            written.push(name);
        }
    }
    Ok((written, outcome))
}

/// Runs one validated request, writing results to `--out` or `stdout` and
/// progress/summary lines to `log`.
pub fn run(req: &ExperimentRequest, stdout: &mut dyn Write, log: &mut dyn Write) -> Result<Outcome, ExperimentError> {
    let out = req.out.as_deref();
    match req.command {
        Command::Condition => {
            emit(&render(&condition_table(&req.specs()?), req.format), out, stdout)?;
            Ok(Outcome::Success)
        }
        Command::Table1 => {
            emit(&table1(req.dim, &req.ns, req.format), out, stdout)?;
            Ok(Outcome::Success)
        }
        Command::Table2 => {
            let cfg = solve_config(req, Preconditioner::None);
            let rows = table2_rows(&table2_cells(req.dim, &req.ns), req.rhs, &cfg, log)?;
            emit(&render(&table2_table(&rows), req.format), out, stdout)?;
            let all = rows.iter().all(IterationComparison::both_converged);
            Ok(if all { Outcome::Success } else { Outcome::NotConverged })
        }
        Command::Spectrum => {
            let spec = req.single_spec()?;
            emit(&render(&spectrum_table(req.kind, spec)?, req.format), out, stdout)?;
            Ok(Outcome::Success)
        }
        Command::Solve => {
            let spec = req.single_spec()?;
            let rep = solve(spec, req, req.preconditioner)?;
            emit(&render(&history_table(&rep), req.format), out, stdout)?;
            writeln!(
                log,
                "{spec} precond={} rhs={}: {} after {} iterations, residual {:e} (threshold {:e})",
                precond_name(req.preconditioner),
                req.rhs,
                if rep.converged { "converged" } else { "NOT converged" },
                rep.iterations,
                rep.final_residual,
                rep.threshold,
            )?;
            Ok(if rep.converged { Outcome::Success } else { Outcome::NotConverged })
        }
        Command::Figures => {
            let dir = out.ok_or_else(|| UsageError("figures needs --out <directory>".into()))?;
            let (files, outcome) = figures(dir, req, log)?;
            for f in files {
                writeln!(log, "wrote {}", dir.join(f).display())?;
            }
            Ok(Outcome::Success.and(outcome))
        }
    }
}

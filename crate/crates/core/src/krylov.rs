//! Conjugate gradients on `A_d x = b`, optionally preconditioned by a single
//! multiplication with the mass operator (`z = M_d r`, no inner solve).

use crate::error::{Error, Result};
use crate::grid::{axpy, dot, norm2, xpby, GridSpec, GridVector};
use crate::operators::{laplacian_into, mass_into};
use crate::spectrum::ratio_report;

/// Preconditioning step applied to each residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    /// Plain CG, `z = r`.
    None,
    /// `z = M_d r`.
    Mass,
}

/// How the residual threshold is formed from `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingRule {
    /// Stop when `‖r_k‖₂ < tol · ‖b‖₂` (or `< tol` when `b = 0`).
    Relative,
    /// Stop when `‖r_k‖₂ < tol`.
    Absolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    /// `None` means `10·N`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
    pub stopping: StoppingRule,
    pub record_history: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: None,
            preconditioner: Preconditioner::None,
            stopping: StoppingRule::Relative,
            record_history: true,
        }
    }
}

impl SolveConfig {
    pub fn with_preconditioner(mut self, preconditioner: Preconditioner) -> Self {
        self.preconditioner = preconditioner;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive and finite, got {}", self.tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, spec: GridSpec) -> usize {
        self.max_iter.unwrap_or_else(|| 10 * spec.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Absolute residual threshold the stopping test compared against.
    pub threshold: f64,
    /// `‖r_j‖₂` for `j = 0..=iterations`; empty unless history was requested.
    pub residual_history: Vec<f64>,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub solution: GridVector,
}

/// State handed to an observer after every iteration (and once before the
/// first, with `iteration == 0`).
#[derive(Debug, Clone, Copy)]
pub struct IterateView<'a> {
    pub iteration: usize,
    pub x: &'a [f64],
    pub r: &'a [f64],
    pub residual_norm: f64,
}

/// Solves `A_d x = b` from `x0`.
pub fn cg_solve(spec: GridSpec, b: &GridVector, x0: &GridVector, cfg: &SolveConfig) -> Result<SolveReport> {
    cg_solve_observed(spec, b, x0, cfg, |_| {})
}

/// [`cg_solve`] with a callback on every iterate.
pub fn cg_solve_observed(
    spec: GridSpec,
    b: &GridVector,
    x0: &GridVector,
    cfg: &SolveConfig,
    observer: impl FnMut(&IterateView<'_>),
) -> Result<SolveReport> {
    match cfg.preconditioner {
        Preconditioner::None => plain_cg(spec, b, x0, cfg, observer),
        Preconditioner::Mass => {
            let mut scratch = Vec::new();
            pcg_solve_with(
                spec,
                b,
                x0,
                cfg,
                |r, z| mass_into(spec, r, z, &mut scratch),
                observer,
            )
        }
    }
}

struct Setup {
    x: Vec<f64>,
    r: Vec<f64>,
    ap: Vec<f64>,
    threshold: f64,
    max_iter: usize,
}

fn setup(spec: GridSpec, b: &GridVector, x0: &GridVector, cfg: &SolveConfig) -> Result<Setup> {
    cfg.validate()?;
    b.check_spec(spec)?;
    x0.check_spec(spec)?;
    if !b.is_finite() || !x0.is_finite() {
        return Err(Error::Breakdown { iteration: 0, reason: "non-finite right-hand side or initial guess".into() });
    }
    let x = x0.values().to_vec();
    let mut ap = vec![0.0; spec.len()];
    laplacian_into(spec, &x, &mut ap);
    let r: Vec<f64> = b.values().iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let b_norm = b.norm2();
    let threshold = match cfg.stopping {
        StoppingRule::Relative if b_norm > 0.0 => cfg.tol * b_norm,
        _ => cfg.tol,
    };
    Ok(Setup { x, r, ap, threshold, max_iter: cfg.max_iter_for(spec) })
}

/// `‖b - A x‖₂` recomputed from scratch.
fn true_residual(spec: GridSpec, b: &GridVector, x: &[f64], r: &mut [f64]) -> f64 {
    laplacian_into(spec, x, r);
    r.iter_mut().zip(b.values()).for_each(|(ri, bi)| *ri = bi - *ri);
    norm2(r)
}

fn finite_or_breakdown(value: f64, iteration: usize, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Breakdown { iteration, reason: format!("{what} is not finite") })
    }
}

/// Textbook CG without a preconditioning step.
fn plain_cg(
    spec: GridSpec,
    b: &GridVector,
    x0: &GridVector,
    cfg: &SolveConfig,
    mut observer: impl FnMut(&IterateView<'_>),
) -> Result<SolveReport> {
    let Setup { mut x, mut r, mut ap, threshold, max_iter } = setup(spec, b, x0, cfg)?;
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut rnorm = rr.sqrt();
    let initial_residual = rnorm;
    let mut history = Vec::new();
    if cfg.record_history {
        history.push(rnorm);
    }
    observer(&IterateView { iteration: 0, x: &x, r: &r, residual_norm: rnorm });

    let mut k = 0;
    let mut converged = false;
    loop {
        if rnorm < threshold {
            let check = true_residual(spec, b, &x, &mut ap);
            if check < threshold {
                converged = true;
                break;
            }
            // Recurrence drifted: restart from the true residual.
            r.copy_from_slice(&ap);
            p.copy_from_slice(&r);
            rr = dot(&r, &r);
            rnorm = check;
            if let Some(last) = history.last_mut() {
                *last = rnorm;
            }
        }
        if k == max_iter {
            break;
        }
        laplacian_into(spec, &p, &mut ap);
        let pap = finite_or_breakdown(dot(&p, &ap), k, "<p, Ap>")?;
        if pap <= 0.0 {
            return Err(Error::Breakdown { iteration: k, reason: format!("<p, Ap> = {pap:e} is not positive") });
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = finite_or_breakdown(dot(&r, &r), k, "<r, r>")?;
        rnorm = rr_new.sqrt();
        k += 1;
        if cfg.record_history {
            history.push(rnorm);
        }
        observer(&IterateView { iteration: k, x: &x, r: &r, residual_norm: rnorm });
        if rnorm < threshold || k == max_iter {
            continue;
        }
        xpby(&r, rr_new / rr, &mut p);
        rr = rr_new;
    }

    Ok(SolveReport {
        iterations: k,
        converged,
        threshold,
        residual_history: history,
        initial_residual,
        final_residual: rnorm,
        solution: GridVector::new(spec, x)?,
    })
}

/// Preconditioned CG with an arbitrary multiply-only preconditioner
/// `precondition(r, z)` writing `z = P r`. `P` must be symmetric positive
/// definite.
pub fn pcg_solve_with(
    spec: GridSpec,
    b: &GridVector,
    x0: &GridVector,
    cfg: &SolveConfig,
    mut precondition: impl FnMut(&[f64], &mut [f64]),
    mut observer: impl FnMut(&IterateView<'_>),
) -> Result<SolveReport> {
    let Setup { mut x, mut r, mut ap, threshold, max_iter } = setup(spec, b, x0, cfg)?;
    let mut z = vec![0.0; spec.len()];
    let mut rnorm = norm2(&r);
    let initial_residual = rnorm;
    let mut history = Vec::new();
    if cfg.record_history {
        history.push(rnorm);
    }
    observer(&IterateView { iteration: 0, x: &x, r: &r, residual_norm: rnorm });

    let mut k = 0;
    let mut converged = false;
    // Search direction and <r, z>; (re)initialised whenever `p` is empty.
    let mut p: Vec<f64> = Vec::new();
    let mut rz = 0.0;
    loop {
        if rnorm < threshold {
            let check = true_residual(spec, b, &x, &mut ap);
            if check < threshold {
                converged = true;
                break;
            }
            r.copy_from_slice(&ap);
            p.clear();
            rnorm = check;
            if let Some(last) = history.last_mut() {
                *last = rnorm;
            }
        }
        if k == max_iter {
            break;
        }
        if p.is_empty() {
            precondition(&r, &mut z);
            rz = finite_or_breakdown(dot(&r, &z), k, "<r, z>")?;
            if rz <= 0.0 {
                return Err(Error::Breakdown { iteration: k, reason: format!("<r, z> = {rz:e} is not positive") });
            }
            p = z.clone();
        }
        laplacian_into(spec, &p, &mut ap);
        let pap = finite_or_breakdown(dot(&p, &ap), k, "<p, Ap>")?;
        if pap <= 0.0 {
            return Err(Error::Breakdown { iteration: k, reason: format!("<p, Ap> = {pap:e} is not positive") });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        rnorm = finite_or_breakdown(norm2(&r), k, "residual norm")?;
        k += 1;
        if cfg.record_history {
            history.push(rnorm);
        }
        observer(&IterateView { iteration: k, x: &x, r: &r, residual_norm: rnorm });
        if rnorm < threshold || k == max_iter {
            continue;
        }
        precondition(&r, &mut z);
        let rz_new = finite_or_breakdown(dot(&r, &z), k, "<r, z>")?;
        if rz_new <= 0.0 {
            return Err(Error::Breakdown { iteration: k, reason: format!("<r, z> = {rz_new:e} is not positive") });
        }
        xpby(&z, rz_new / rz, &mut p);
        rz = rz_new;
    }

    Ok(SolveReport {
        iterations: k,
        converged,
        threshold,
        residual_history: history,
        initial_residual,
        final_residual: rnorm,
        solution: GridVector::new(spec, x)?,
    })
}

/// Observed and predicted iteration counts for one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationComparison {
    pub spec: GridSpec,
    pub itn_unprec: usize,
    pub itn_prec: usize,
    pub unprec_converged: bool,
    pub prec_converged: bool,
    /// `itn_unprec / itn_prec`
    pub observed_ratio: f64,
    /// `√(κ/κ_p)`
    pub theoretical_ratio: f64,
}

impl IterationComparison {
    pub fn both_converged(&self) -> bool {
        self.unprec_converged && self.prec_converged
    }
}

/// Runs plain and mass-preconditioned CG on the same `b` from `x0 = 0` with
/// the tolerance and stopping rule of `cfg` (its preconditioner is ignored),
/// and pairs the observed iteration ratio with the predicted `√r`.
pub fn predicted_vs_observed(spec: GridSpec, b: &GridVector, cfg: &SolveConfig) -> Result<IterationComparison> {
    let base = SolveConfig { record_history: false, ..cfg.clone() };
    let x0 = GridVector::zeros(spec);
    let plain = cg_solve(spec, b, &x0, &base.clone().with_preconditioner(Preconditioner::None))?;
    let prec = cg_solve(spec, b, &x0, &base.with_preconditioner(Preconditioner::Mass))?;
    Ok(IterationComparison {
        spec,
        itn_unprec: plain.iterations,
        itn_prec: prec.iterations,
        unprec_converged: plain.converged,
        prec_converged: prec.converged,
        observed_ratio: plain.iterations as f64 / prec.iterations.max(1) as f64,
        theoretical_ratio: ratio_report(spec).predicted_iter_ratio,
    })
}

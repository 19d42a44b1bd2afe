//! Closed-form spectra of `A_d`, `M_d` and `T_d = M_d A_d` on the sine basis,
//! condition numbers, and the predicted CG iteration ratio.
//!
//! With `c_j = cos(π h k_j)`, `k_j ∈ 1..=n`:
//!
//! ```text
//! λ(A_d) = (2/h²) Σ (1 - c_j)
//! λ(M_d) = (h²/3^d) Π (2 + c_j)
//! λ(T_d) = (2/3^d) Π (2 + c_j) · Σ (1 - c_j)
//! ```
//!
//! Extremes are located on the discrete spectrum itself, never assumed from
//! the continuous maximiser.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::OperatorKind;

/// Default cap on the number of eigenvalues [`full_spectrum`] will produce.
pub const DEFAULT_SPECTRUM_CAP: usize = 1 << 20;

/// Cap for [`exhaustive_extremes`].
pub const EXHAUSTIVE_CAP: usize = 1 << 22;

/// Per-axis trigonometric factors for one grid.
#[derive(Debug, Clone)]
struct AxisTable {
    /// `cos(π h k)` for `k = 1..=n` (decreasing in `k`).
    cos: Vec<f64>,
    /// `1 - cos(π h k)`, computed as `2 sin²(π h k / 2)` to avoid cancellation.
    one_minus_cos: Vec<f64>,
}

impl AxisTable {
    fn new(spec: GridSpec) -> Self {
        let h = spec.h();
        let theta = |k: usize| PI * h * k as f64;
        let cos = (1..=spec.n()).map(|k| theta(k).cos()).collect();
        let one_minus_cos = (1..=spec.n())
            .map(|k| {
                let s = (0.5 * theta(k)).sin();
                2.0 * s * s
            })
            .collect();
        Self { cos, one_minus_cos }
    }

    fn eigenvalue(&self, kind: OperatorKind, spec: GridSpec, k: &[usize]) -> f64 {
        let dim = spec.dim();
        let sum: f64 = k.iter().map(|&kj| self.one_minus_cos[kj - 1]).sum();
        let prod: f64 = k.iter().map(|&kj| 2.0 + self.cos[kj - 1]).product();
        let three_d = 3f64.powi(dim as i32);
        match kind {
            OperatorKind::Laplacian => 2.0 * spec.inv_h2() * sum,
            OperatorKind::Mass => prod / (three_d * spec.inv_h2()),
            OperatorKind::Preconditioned => 2.0 / three_d * prod * sum,
        }
    }
}

fn check_indices(spec: GridSpec, k: &[usize]) -> Result<()> {
    if k.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-tuple of frequency indices", spec.dim()),
            found: format!("{}-tuple", k.len()),
        });
    }
    if k.iter().any(|&kj| kj == 0 || kj > spec.n()) {
        return Err(Error::IndexOutOfRange { index: k.to_vec(), n: spec.n() });
    }
    Ok(())
}

/// Eigenvalue of `kind` for the sine mode with one-based frequencies `k`.
pub fn eigenvalue(kind: OperatorKind, spec: GridSpec, k: &[usize]) -> Result<f64> {
    check_indices(spec, k)?;
    Ok(AxisTable::new(spec).eigenvalue(kind, spec, k))
}

/// Extremes of a spectrum together with the frequencies attaining them.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub argmin: Vec<usize>,
    pub argmax: Vec<usize>,
}

impl Extremes {
    fn seed(lambda: f64, k: &[usize]) -> Self {
        Self { lambda_min: lambda, lambda_max: lambda, argmin: k.to_vec(), argmax: k.to_vec() }
    }

    fn offer(&mut self, lambda: f64, k: &[usize]) {
        if lambda > self.lambda_max {
            self.lambda_max = lambda;
            self.argmax.clear();
            self.argmax.extend_from_slice(k);
        }
        if lambda < self.lambda_min {
            self.lambda_min = lambda;
            self.argmin.clear();
            self.argmin.extend_from_slice(k);
        }
    }
}

/// Comparison of the scanned `κ_p` with the closed forms built on the
/// integer part `[a]` of the continuous maximiser, `a = 2/(3h)` (1D),
/// `1/(2h)` (2D) or `arccos(1/4)/(πh)` (3D).
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    /// `floor(a)`, possibly 0 for tiny grids.
    pub integer_part: usize,
    /// `floor(a)` clamped into `1..=n`.
    pub index: usize,
    /// `λ(T_d)` at `(index, .., index)` over `λ(T_d)` at `(1, .., 1)`.
    pub literal_kappa: f64,
    /// Same ratio, with the numerator maximised over `{[a], [a]+1}^d`
    /// (clamped into `1..=n`); the per-axis indices may differ.
    pub bracket_kappa: f64,
    /// `|literal_kappa - κ_p| / κ_p` against the scanned `κ_p`.
    pub literal_discrepancy: f64,
    /// `|bracket_kappa - κ_p| / κ_p` against the scanned `κ_p`.
    pub bracket_discrepancy: f64,
}

/// Extreme eigenvalues and condition number of one operator on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub kind: OperatorKind,
    pub spec: GridSpec,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub argmin: Vec<usize>,
    pub argmax: Vec<usize>,
    /// Present for [`OperatorKind::Preconditioned`] only.
    pub closed_form: Option<ClosedFormCheck>,
}

/// Continuous maximiser of `λ(T_d)` in frequency units, `a` above.
pub fn continuous_maximiser(spec: GridSpec) -> f64 {
    let h = spec.h();
    match spec.dim() {
        1 => 2.0 / (3.0 * h),
        2 => 1.0 / (2.0 * h),
        _ => 0.25f64.acos() / (PI * h),
    }
}

/// Extreme eigenvalues located exactly on the discrete spectrum.
///
/// `A_d` and `M_d` are monotone in every frequency, so their extremes sit at
/// `(1,..,1)` and `(n,..,n)`. For `T_d`, fixing all but the last frequency
/// leaves `(2 + x)(S + 1 - x)` in `x = cos(π h k_d)`, a concave quadratic with
/// vertex `x* = (S - 1)/2`: its discrete maximum is at one of the two indices
/// bracketing `x*` and its minimum at `k_d ∈ {1, n}`. That costs `O(n^(d-1))`.
pub fn find_extremes(kind: OperatorKind, spec: GridSpec) -> Extremes {
    let table = AxisTable::new(spec);
    let dim = spec.dim();
    let n = spec.n();
    let ones = vec![1; dim];
    let top = vec![n; dim];
    let mut ext = Extremes::seed(table.eigenvalue(kind, spec, &ones), &ones);
    match kind {
        OperatorKind::Laplacian | OperatorKind::Mass => {
            ext.offer(table.eigenvalue(kind, spec, &top), &top);
        }
        OperatorKind::Preconditioned => {
            let mut k = vec![1usize; dim];
            let mut candidates = Vec::with_capacity(4);
            for_each_tuple(n, dim - 1, |lead| {
                k[..dim - 1].copy_from_slice(lead);
                let s: f64 = lead.iter().map(|&kj| table.one_minus_cos[kj - 1]).sum();
                let vertex = 0.5 * (s - 1.0);
                // cos is decreasing: count of k with cos(k) >= vertex.
                let above = table.cos.partition_point(|&c| c >= vertex);
                candidates.clear();
                candidates.extend([1, n, above, above + 1].into_iter().filter(|&c| (1..=n).contains(&c)));
                candidates.sort_unstable();
                candidates.dedup();
                for &kd in &candidates {
                    k[dim - 1] = kd;
                    ext.offer(table.eigenvalue(kind, spec, &k), &k);
                }
            });
        }
    }
    ext
}

/// Extremes by visiting every one of the `n^d` frequency tuples. Used to
/// validate [`find_extremes`].
pub fn exhaustive_extremes(kind: OperatorKind, spec: GridSpec) -> Result<Extremes> {
    check_cap(spec, EXHAUSTIVE_CAP)?;
    let table = AxisTable::new(spec);
    let ones = vec![1; spec.dim()];
    let mut ext = Extremes::seed(table.eigenvalue(kind, spec, &ones), &ones);
    for_each_tuple(spec.n(), spec.dim(), |k| ext.offer(table.eigenvalue(kind, spec, k), k));
    Ok(ext)
}

/// Extreme eigenvalues, condition number and (for `T_d`) the closed-form
/// cross-check.
pub fn spectrum_report(kind: OperatorKind, spec: GridSpec) -> SpectrumReport {
    let ext = find_extremes(kind, spec);
    let kappa = ext.lambda_max / ext.lambda_min;
    let closed_form = (kind == OperatorKind::Preconditioned).then(|| closed_form_check(spec, kappa));
    SpectrumReport {
        kind,
        spec,
        lambda_min: ext.lambda_min,
        lambda_max: ext.lambda_max,
        kappa,
        argmin: ext.argmin,
        argmax: ext.argmax,
        closed_form,
    }
}

fn closed_form_check(spec: GridSpec, scanned_kappa: f64) -> ClosedFormCheck {
    let table = AxisTable::new(spec);
    let dim = spec.dim();
    let n = spec.n();
    let kind = OperatorKind::Preconditioned;
    let integer_part = continuous_maximiser(spec).floor() as usize;
    let clamp = |k: usize| k.clamp(1, n);
    let index = clamp(integer_part);
    let lambda_low = table.eigenvalue(kind, spec, &vec![1; dim]);

    let literal_kappa = table.eigenvalue(kind, spec, &vec![index; dim]) / lambda_low;

    let bracket = [clamp(integer_part), clamp(integer_part + 1)];
    let mut best = f64::NEG_INFINITY;
    for_each_tuple(2, dim, |sel| {
        let k: Vec<usize> = sel.iter().map(|&s| bracket[s - 1]).collect();
        best = best.max(table.eigenvalue(kind, spec, &k));
    });
    let bracket_kappa = best / lambda_low;

    ClosedFormCheck {
        integer_part,
        index,
        literal_kappa,
        bracket_kappa,
        literal_discrepancy: (literal_kappa - scanned_kappa).abs() / scanned_kappa,
        bracket_discrepancy: (bracket_kappa - scanned_kappa).abs() / scanned_kappa,
    }
}

/// Condition numbers of `A_d` and `T_d` and the iteration ratio they predict.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub spec: GridSpec,
    pub kappa: f64,
    pub kappa_p: f64,
    /// `kappa / kappa_p`
    pub r: f64,
    /// `√r`, the predicted unpreconditioned/preconditioned CG iteration ratio.
    pub predicted_iter_ratio: f64,
    /// `lim_{h→0} r`: 8/3, 9/2 or 512/81.
    pub asymptotic_limit: f64,
}

/// Limit of `κ/κ_p` as `h → 0` in dimension `dim`.
pub fn asymptotic_ratio(dim: usize) -> f64 {
    match dim {
        1 => 8.0 / 3.0,
        2 => 9.0 / 2.0,
        _ => 512.0 / 81.0,
    }
}

pub fn ratio_report(spec: GridSpec) -> RatioReport {
    let kappa = spectrum_report(OperatorKind::Laplacian, spec).kappa;
    let kappa_p = spectrum_report(OperatorKind::Preconditioned, spec).kappa;
    let r = kappa / kappa_p;
    RatioReport {
        spec,
        kappa,
        kappa_p,
        r,
        predicted_iter_ratio: r.sqrt(),
        asymptotic_limit: asymptotic_ratio(spec.dim()),
    }
}

/// All `n^d` eigenvalues of `kind`, ascending.
pub fn full_spectrum(kind: OperatorKind, spec: GridSpec) -> Result<Vec<f64>> {
    full_spectrum_capped(kind, spec, DEFAULT_SPECTRUM_CAP)
}

pub fn full_spectrum_capped(kind: OperatorKind, spec: GridSpec, cap: usize) -> Result<Vec<f64>> {
    check_cap(spec, cap)?;
    let table = AxisTable::new(spec);
    let mut values = Vec::with_capacity(spec.len());
    for_each_tuple(spec.n(), spec.dim(), |k| values.push(table.eigenvalue(kind, spec, k)));
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Every tuple in `1..=n` of length `len`, in lexicographic order.
/// `len == 0` yields the empty tuple once.
pub fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut k = vec![1usize; len];
    loop {
        f(&k);
        let mut axis = len;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if k[axis] < n {
                k[axis] += 1;
                break;
            }
            k[axis] = 1;
        }
    }
}

fn check_cap(spec: GridSpec, cap: usize) -> Result<()> {
    let required = (spec.n() as u128).pow(spec.dim() as u32);
    if required > cap as u128 {
        return Err(Error::ResourceCap { required, allowed: cap as u128 });
    }
    Ok(())
}

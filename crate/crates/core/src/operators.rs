//! Matrix-free Dirichlet Laplacian `A_d` and scaled mass operator `M_d`.
//!
//! Both operators act on interior unknowns only; neighbours outside the grid
//! contribute zero. Per axis they are tridiagonal Toeplitz, so they share the
//! sine eigenbasis and commute.
//!
//! `M_d` is the tensor product of the 1D linear-element mass stencil
//! `(h/6)(1, 4, 1)` applied as `d` successive axis sweeps, times a global
//! scale of `h` (1D), `1` (2D) or `1/h` (3D).
//!
//! Every output entry is computed by a fixed sequence of floating-point
//! operations, so results are bitwise identical with or without threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GridVector, PAR_THRESHOLD};

/// Which of the three operators an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `A_d`
    Laplacian,
    /// `M_d`
    Mass,
    /// `T_d = M_d A_d`
    Preconditioned,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] =
        [OperatorKind::Laplacian, OperatorKind::Mass, OperatorKind::Preconditioned];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Laplacian => "laplacian",
            OperatorKind::Mass => "mass",
            OperatorKind::Preconditioned => "preconditioned",
        }
    }

    pub fn apply(self, spec: GridSpec, u: &GridVector) -> Result<GridVector> {
        match self {
            OperatorKind::Laplacian => apply_laplacian(spec, u),
            OperatorKind::Mass => apply_mass(spec, u),
            OperatorKind::Preconditioned => apply_preconditioned(spec, u),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "laplacian" | "a" => Ok(OperatorKind::Laplacian),
            "mass" | "m" => Ok(OperatorKind::Mass),
            "preconditioned" | "t" => Ok(OperatorKind::Preconditioned),
            other => Err(format!("unknown operator kind `{other}`")),
        }
    }
}

/// Global factor in front of the tensor-product mass operator.
pub fn mass_scale(spec: GridSpec) -> f64 {
    match spec.dim() {
        1 => spec.h(),
        2 => 1.0,
        _ => (spec.n() + 1) as f64,
    }
}

/// `A_d u`.
pub fn apply_laplacian(spec: GridSpec, u: &GridVector) -> Result<GridVector> {
    u.check_spec(spec)?;
    let mut out = vec![0.0; spec.len()];
    laplacian_into(spec, u.values(), &mut out);
    GridVector::new(spec, out)
}

/// `M_d u`.
pub fn apply_mass(spec: GridSpec, u: &GridVector) -> Result<GridVector> {
    u.check_spec(spec)?;
    let mut out = vec![0.0; spec.len()];
    let mut scratch = Vec::new();
    mass_into(spec, u.values(), &mut out, &mut scratch);
    GridVector::new(spec, out)
}

/// `M_d (A_d u)`.
pub fn apply_preconditioned(spec: GridSpec, u: &GridVector) -> Result<GridVector> {
    let au = apply_laplacian(spec, u)?;
    apply_mass(spec, &au)
}

/// The 1D Laplacian `(1/h²)(-1, 2, -1)` applied along a single axis.
///
/// Summing this over all axes reproduces [`apply_laplacian`].
pub fn apply_laplacian_axis(spec: GridSpec, u: &GridVector, axis: usize) -> Result<GridVector> {
    u.check_spec(spec)?;
    check_axis(spec, axis)?;
    let mut out = vec![0.0; spec.len()];
    let inv_h2 = spec.inv_h2();
    for_each_line(spec, &mut out, |line, dst| {
        let (stride, coord) = axis_position(spec, axis, line);
        let base = line * spec.n();
        let src = u.values();
        for (m, o) in dst.iter_mut().enumerate() {
            let i = base + m;
            let c = coord.unwrap_or(m);
            let mut acc = 2.0 * src[i];
            if c > 0 {
                acc -= src[i - stride];
            }
            if c + 1 < spec.n() {
                acc -= src[i + stride];
            }
            *o = acc * inv_h2;
        }
    });
    GridVector::new(spec, out)
}

/// The unscaled 1D mass stencil `(h/6)(1, 4, 1)` applied along a single axis.
pub fn apply_mass_axis(spec: GridSpec, u: &GridVector, axis: usize) -> Result<GridVector> {
    u.check_spec(spec)?;
    check_axis(spec, axis)?;
    let mut out = vec![0.0; spec.len()];
    mass_sweep(spec, axis, 1.0, u.values(), &mut out);
    GridVector::new(spec, out)
}

/// Slice kernel behind [`apply_laplacian`]: `out ← A_d u`.
pub fn laplacian_into(spec: GridSpec, u: &[f64], out: &mut [f64]) {
    assert_eq!(u.len(), spec.len());
    assert_eq!(out.len(), spec.len());
    let n = spec.n();
    let dim = spec.dim();
    let diag = 2.0 * dim as f64;
    let inv_h2 = spec.inv_h2();
    // Leading axes (all but the contiguous last one) and their strides.
    let lead: Vec<usize> = (0..dim - 1).map(|a| spec.stride(a)).collect();

    for_each_line(spec, out, |line, dst| {
        let base = line * n;
        let mut lead_coords = [0usize; 2];
        for (a, c) in lead_coords.iter_mut().enumerate().take(dim - 1) {
            *c = (line / spec.stride(a + 1)) % n;
        }
        for (m, o) in dst.iter_mut().enumerate() {
            let i = base + m;
            let mut acc = diag * u[i];
            if m > 0 {
                acc -= u[i - 1];
            }
            if m + 1 < n {
                acc -= u[i + 1];
            }
            for (&s, &c) in lead.iter().zip(&lead_coords) {
                if c > 0 {
                    acc -= u[i - s];
                }
                if c + 1 < n {
                    acc -= u[i + s];
                }
            }
            *o = acc * inv_h2;
        }
    });
}

/// Slice kernel behind [`apply_mass`]: `out ← M_d u`. `scratch` is resized
/// as needed and may be reused across calls.
pub fn mass_into(spec: GridSpec, u: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
    assert_eq!(u.len(), spec.len());
    assert_eq!(out.len(), spec.len());
    let scale = mass_scale(spec);
    match spec.dim() {
        1 => mass_sweep(spec, 0, scale, u, out),
        2 => {
            scratch.resize(spec.len(), 0.0);
            mass_sweep(spec, 0, 1.0, u, scratch);
            mass_sweep(spec, 1, scale, scratch, out);
        }
        _ => {
            scratch.resize(spec.len(), 0.0);
            mass_sweep(spec, 0, 1.0, u, out);
            mass_sweep(spec, 1, 1.0, out, scratch);
            mass_sweep(spec, 2, scale, scratch, out);
        }
    }
}

/// `dst ← scale · (h/6)(1,4,1) ∗ src` along `axis`.
fn mass_sweep(spec: GridSpec, axis: usize, scale: f64, src: &[f64], dst: &mut [f64]) {
    let n = spec.n();
    let w = spec.h() / 6.0;
    for_each_line(spec, dst, |line, out| {
        let (stride, coord) = axis_position(spec, axis, line);
        let base = line * n;
        for (m, o) in out.iter_mut().enumerate() {
            let i = base + m;
            let c = coord.unwrap_or(m);
            let mut acc = 4.0 * src[i];
            if c > 0 {
                acc += src[i - stride];
            }
            if c + 1 < n {
                acc += src[i + stride];
            }
            let v = w * acc;
            *o = if scale == 1.0 { v } else { scale * v };
        }
    });
}

/// Stride of `axis` and, for a leading axis, the line's coordinate along it.
/// `None` means the axis runs along the line itself.
fn axis_position(spec: GridSpec, axis: usize, line: usize) -> (usize, Option<usize>) {
    if axis + 1 == spec.dim() {
        (1, None)
    } else {
        let stride = spec.stride(axis);
        (stride, Some((line * spec.n() / stride) % spec.n()))
    }
}

/// Runs `f(line_index, line)` over every contiguous last-axis line of `out`.
fn for_each_line<F>(spec: GridSpec, out: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let n = spec.n();
    if out.len() < PAR_THRESHOLD {
        out.chunks_mut(n).enumerate().for_each(|(l, dst)| f(l, dst));
    } else {
        out.par_chunks_mut(n).enumerate().for_each(|(l, dst)| f(l, dst));
    }
}

fn check_axis(spec: GridSpec, axis: usize) -> Result<()> {
    if axis >= spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("axis < {}", spec.dim()),
            found: format!("axis {axis}"),
        });
    }
    Ok(())
}

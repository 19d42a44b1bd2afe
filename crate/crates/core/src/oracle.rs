//! Dense ground truth for small grids.
//!
//! Matrices are assembled entry by entry from the stencil definitions, with
//! no code shared with the matrix-free kernels: the Laplacian from its
//! `2d/h²` diagonal and `-1/h²` neighbour couplings, the mass operator as an
//! explicit Kronecker product of the 1D `(h/6) tridiag(1, 4, 1)` matrix, and
//! `T_d` as a dense product. Eigenvalues are Rayleigh quotients on the
//! tensor-product sine vectors, certified by their eigenpair residuals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::OperatorKind;
use crate::spectrum::for_each_tuple;

/// Largest dense operator the oracle assembles (rows).
pub const DENSE_CAP: usize = 4096;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, entries: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn scale(mut self, factor: f64) -> Self {
        self.entries.iter_mut().for_each(|e| *e *= factor);
        self
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.entries
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = DenseMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out.set(i * other.rows + p, j * other.cols + q, a * other.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let max = self.entries.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        if max == 0.0 {
            0.0
        } else {
            worst / max
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }
}

fn check_dense_cap(spec: GridSpec) -> Result<()> {
    let required = (spec.n() as u128).pow(spec.dim() as u32);
    if required > DENSE_CAP as u128 {
        return Err(Error::ResourceCap { required, allowed: DENSE_CAP as u128 });
    }
    Ok(())
}

/// The 1D factor `(h/6) tridiag(1, 4, 1)` of size `n`.
pub fn mass_1d(n: usize, h: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, 4.0 * h / 6.0);
        if i + 1 < n {
            m.set(i, i + 1, h / 6.0);
            m.set(i + 1, i, h / 6.0);
        }
    }
    m
}

fn laplacian_dense(spec: GridSpec) -> DenseMatrix {
    let n = spec.n();
    let size = spec.len();
    let h = spec.h();
    let mut a = DenseMatrix::zeros(size, size);
    for i in 0..size {
        let coords = spec.coords(i);
        a.set(i, i, 2.0 * spec.dim() as f64 / (h * h));
        for axis in 0..spec.dim() {
            for step in [-1i64, 1] {
                let c = coords[axis] as i64 + step;
                if c < 0 || c >= n as i64 {
                    continue;
                }
                let mut nb = coords.clone();
                nb[axis] = c as usize;
                a.set(i, spec.flat_index(&nb), -1.0 / (h * h));
            }
        }
    }
    a
}

fn mass_dense(spec: GridSpec) -> DenseMatrix {
    let h = spec.h();
    let m1 = mass_1d(spec.n(), h);
    match spec.dim() {
        1 => m1.scale(h),
        2 => m1.kron(&m1),
        _ => m1.kron(&m1).kron(&m1).scale(1.0 / h),
    }
}

/// Dense assembly of `kind` on `spec` (at most [`DENSE_CAP`] rows).
pub fn assemble_dense(kind: OperatorKind, spec: GridSpec) -> Result<DenseMatrix> {
    check_dense_cap(spec)?;
    Ok(match kind {
        OperatorKind::Laplacian => laplacian_dense(spec),
        OperatorKind::Mass => mass_dense(spec),
        OperatorKind::Preconditioned => mass_dense(spec).matmul(&laplacian_dense(spec)),
    })
}

/// Tensor-product sine vector with entries `Π_j sin(π h k_j (i_j + 1))`.
pub fn sine_vector(spec: GridSpec, k: &[usize]) -> Vec<f64> {
    assert_eq!(k.len(), spec.dim());
    let h = spec.h();
    (0..spec.len())
        .map(|i| {
            spec.coords(i)
                .iter()
                .zip(k)
                .map(|(&c, &kj)| (PI * h * kj as f64 * (c + 1) as f64).sin())
                .product()
        })
        .collect()
}

/// Rayleigh quotient of a dense operator on one sine mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighEigen {
    pub k: Vec<usize>,
    pub lambda: f64,
    /// `‖D v - λ v‖₂ / ‖v‖₂`
    pub residual: f64,
}

/// Rayleigh quotients of the dense `kind` operator on every sine mode.
pub fn rayleigh_eigenvalues(kind: OperatorKind, spec: GridSpec) -> Result<Vec<RayleighEigen>> {
    let dense = assemble_dense(kind, spec)?;
    let mut out = Vec::with_capacity(spec.len());
    for_each_tuple(spec.n(), spec.dim(), |k| {
        let v = sine_vector(spec, k);
        let dv = dense.matvec(&v);
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let lambda = dv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
        let res: f64 = dv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        out.push(RayleighEigen { k: k.to_vec(), lambda, residual: res / vv.sqrt() });
    });
    Ok(out)
}

//! Uniform grids on the unit interval, square and cube, and the vectors that
//! live on their interior points.
//!
//! Unknowns are ordered lexicographically with the first axis slowest: the
//! point with zero-based coordinates `(i_0, .., i_{d-1})` sits at flat index
//! `Σ i_a · n^(d-1-a)`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Below this many unknowns, kernels run on the calling thread.
pub(crate) const PAR_THRESHOLD: usize = 1 << 15;

/// Fixed reduction block for inner products. Partial sums are formed per
/// block and added in block order, so the result does not depend on how the
/// blocks are scheduled.
const DOT_BLOCK: usize = 4096;

/// Dimension `d` and interior points per axis `n` of a uniform Dirichlet grid
/// with mesh width `h = 1/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("need at least one interior point per axis".into()));
        }
        if n.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidGrid(format!("{n}^{dim} unknowns overflow usize")));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interior points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh width `1/(n+1)`.
    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    /// `1/h²`, exact since `n+1` is an integer.
    pub fn inv_h2(&self) -> f64 {
        let m = (self.n + 1) as f64;
        m * m
    }

    /// Total number of unknowns `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Flat-index stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        debug_assert!(axis < self.dim);
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    /// Zero-based coordinates of a flat index.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            c[a] = index % self.n;
            index /= self.n;
        }
        c
    }

    /// Flat index of zero-based coordinates.
    pub fn flat_index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.n + c)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D n={}", self.dim, self.n)
    }
}

/// Values on the interior points of a grid, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridVector {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridVector {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values for {spec}", spec.len()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::filled(spec, 0.0)
    }

    pub fn filled(spec: GridSpec, value: f64) -> Self {
        Self { spec, values: vec![value; spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl FnMut(usize) -> f64) -> Self {
        Self { spec, values: (0..spec.len()).map(f).collect() }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_spec(&self, spec: GridSpec) -> Result<()> {
        if self.spec != spec {
            return Err(Error::DimensionMismatch {
                expected: spec.to_string(),
                found: self.spec.to_string(),
            });
        }
        Ok(())
    }

    /// `self · other`.
    pub fn dot(&self, other: &GridVector) -> Result<f64> {
        other.check_spec(self.spec)?;
        Ok(dot(&self.values, &other.values))
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }

    /// `alpha·self + other`.
    pub fn axpy(&self, alpha: f64, other: &GridVector) -> Result<GridVector> {
        other.check_spec(self.spec)?;
        let mut values = other.values.clone();
        axpy(alpha, &self.values, &mut values);
        Ok(GridVector { spec: self.spec, values })
    }
}

/// Free-function form of [`GridVector::dot`].
pub fn dot_vectors(u: &GridVector, v: &GridVector) -> Result<f64> {
    u.dot(v)
}

/// Free-function form of [`GridVector::axpy`]: `alpha·u + v`.
pub fn axpy_vectors(alpha: f64, u: &GridVector, v: &GridVector) -> Result<GridVector> {
    u.axpy(alpha, v)
}

/// Blocked inner product; bitwise identical whether or not it runs in parallel.
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "dot: length mismatch");
    let block = |(a, b): (&[f64], &[f64])| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    if u.len() < PAR_THRESHOLD {
        u.chunks(DOT_BLOCK).zip(v.chunks(DOT_BLOCK)).map(block).sum()
    } else {
        let partials: Vec<f64> = u
            .par_chunks(DOT_BLOCK)
            .zip(v.par_chunks(DOT_BLOCK))
            .map(block)
            .collect();
        partials.into_iter().sum()
    }
}

pub fn norm2(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// `y ← alpha·x + y`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    assert_eq!(x.len(), y.len(), "axpy: length mismatch");
    if x.len() < PAR_THRESHOLD {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    } else {
        y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += alpha * xi);
    }
}

/// `y ← x + beta·y`.
pub fn xpby(x: &[f64], beta: f64, y: &mut [f64]) {
    assert_eq!(x.len(), y.len(), "xpby: length mismatch");
    if x.len() < PAR_THRESHOLD {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = xi + beta * *yi);
    } else {
        y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi = xi + beta * *yi);
    }
}

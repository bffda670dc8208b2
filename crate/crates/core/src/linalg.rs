//! Small dense complex operators and state vectors for 2- and 3-level systems.
//!
//! Storage is a fixed 3x3 row-major array so that stepping never allocates;
//! only the leading `dim x dim` block is meaningful. Energies are in units of
//! the reference Rabi frequency and times in its inverse.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_DIM: usize = 3;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for treating an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for treating an operator as unitary.
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
pub struct SquareOperator {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

impl SquareOperator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "operator dimension must be 2 or 3, got {dim}");
        Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.set(i, i, ONE);
        }
        out
    }

    /// Builds an operator from rows. Panics if the rows are not square with
    /// dimension 2 or 3.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut out = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut out = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            out.set(i, i, v);
        }
        out
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        assert_eq!(a.dim(), b.dim());
        let mut out = Self::zeros(a.dim());
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                out.set(i, j, a[i] * b[j].conj());
            }
        }
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i * MAX_DIM + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i * MAX_DIM + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    pub fn has_nan(&self) -> bool {
        self.entries().any(|v| !v.re.is_finite() || !v.im.is_finite())
    }

    /// Leading `dim x dim` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.dim).flat_map(move |i| (0..self.dim).map(move |j| self.get(i, j)))
    }

    /// Upper-left `n x n` block.
    pub fn block(&self, n: usize) -> Self {
        assert!(n <= self.dim);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Embeds `self` as the upper-left block of a larger identity.
    pub fn embed(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let mut out = Self::identity(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Change of basis `B^dagger A B` where the columns of `B` are `basis`.
    pub fn in_basis(&self, basis: &[StateVector]) -> Self {
        assert_eq!(basis.len(), self.dim);
        let mut out = Self::zeros(self.dim);
        for (i, bi) in basis.iter().enumerate() {
            let a_bj: Vec<StateVector> = basis.iter().map(|bj| self.apply(bj)).collect();
            for (j, v) in a_bj.iter().enumerate() {
                out.set(i, j, bi.inner(v));
            }
        }
        out
    }

    /// `<a| self |b>`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> C64 {
        a.inner(&self.apply(b))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim());
        let mut out = StateVector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    fn to_nalgebra(self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigen-decomposition of a Hermitian operator: real eigenvalues in
    /// ascending order with the matching orthonormal eigenvectors.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<StateVector>)> {
        let err = self.hermiticity_error();
        if err >= HERMITIAN_TOL || self.has_nan() {
            return Err(Error::NotHermitian { deviation: err });
        }
        let eig = self.to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| {
                let col = eig.eigenvectors.column(k);
                StateVector::from_slice(col.as_slice())
            })
            .collect();
        Ok((values, vectors))
    }
}

impl Add for SquareOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        out
    }
}

impl Sub for SquareOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }
}

impl Mul for SquareOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * MAX_DIM + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * MAX_DIM + j] += a * rhs.data[k * MAX_DIM + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for SquareOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareOperator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let v = self.get(i, j);
                    format!("{:+.6}{:+.6}i", v.re, v.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices in the `(|0>, |1>)` ordering.
pub fn pauli_x() -> SquareOperator {
    SquareOperator::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> SquareOperator {
    SquareOperator::from_rows(&[[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> SquareOperator {
    SquareOperator::from_rows(&[[ONE, ZERO], [ZERO, -ONE]])
}

/// `n . sigma` for a real 3-vector `n`.
pub fn pauli_dot(n: [f64; 3]) -> SquareOperator {
    pauli_x().scale_real(n[0]) + pauli_y().scale_real(n[1]) + pauli_z().scale_real(n[2])
}

/// `exp(-i H t)` for Hermitian `H`, by eigendecomposition.
pub fn mat_exp_hermitian(h: &SquareOperator, t: f64) -> Result<SquareOperator> {
    let (values, vectors) = h.eigh()?;
    let mut out = SquareOperator::zeros(h.dim());
    for (lambda, v) in values.iter().zip(vectors.iter()) {
        let phase = C64::from_polar(1.0, -lambda * t);
        out = out + SquareOperator::outer(v, v).scale(phase);
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
pub struct StateVector {
    dim: usize,
    amps: [C64; MAX_DIM],
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "state dimension must be 2 or 3, got {dim}");
        Self {
            dim,
            amps: [ZERO; MAX_DIM],
        }
    }

    pub fn from_slice(amps: &[C64]) -> Self {
        let mut out = Self::zeros(amps.len());
        out.amps[..amps.len()].copy_from_slice(amps);
        out
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut out = Self::zeros(dim);
        out.amps[k] = ONE;
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps[..self.dim]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        (0..self.dim).map(|i| self.amps[i].conj() * other.amps[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn normalized(&self) -> Self {
        self.scale(C64::new(1.0 / self.norm(), 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for a in out.amps.iter_mut() {
            *a *= s;
        }
        out
    }

    /// `|<self|other>|` for normalized states; 1 iff equal up to phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    /// Bloch vector of the first two amplitudes, `(2 Re c0* c1, 2 Im c0* c1, |c0|^2 - |c1|^2)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let c0 = self.amps[0];
        let c1 = self.amps[1];
        let cross = c0.conj() * c1;
        [2.0 * cross.re, 2.0 * cross.im, c0.norm_sqr() - c1.norm_sqr()]
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        debug_assert!(i < self.dim);
        &self.amps[i]
    }
}

impl std::ops::IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        debug_assert!(i < self.dim);
        &mut self.amps[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .amplitudes()
            .iter()
            .map(|v| format!("{:+.6}{:+.6}i", v.re, v.im))
            .collect();
        write!(f, "StateVector[{}]", parts.join(", "))
    }
}

//! Sparse many-body operators on the `2^L` computational basis.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::basis::{Frame, StateVector};
use crate::error::{Error, Result};

/// Tolerance for the hermiticity flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A complex operator stored in compressed sparse row form, tagged with the
/// frame its basis refers to.
///
/// Lattice Hamiltonians have at most `L + 1` nonzeros per row, so sparse
/// storage keeps `L = 14` (dimension 16384) within desk-scale memory.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    frame: Frame,
    hermitian: bool,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl OperatorMatrix {
    /// Build from `(row, col, value)` entries; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets<I>(dim: usize, frame: Frame, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside dimension {dim}");
            rows[i].push((j, v));
        }
        Self::from_rows(dim, frame, rows)
    }

    fn from_rows(dim: usize, frame: Frame, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.into_iter().peekable();
            while let Some((j, mut v)) = iter.next() {
                while let Some(&(j2, v2)) = iter.peek() {
                    if j2 != j {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        OperatorMatrix {
            dim,
            frame,
            hermitian: false,
            indptr,
            indices,
            data,
        }
    }

    pub fn zeros(dim: usize, frame: Frame) -> Self {
        Self::from_triplets(dim, frame, std::iter::empty())
    }

    pub fn identity(dim: usize, frame: Frame) -> Self {
        Self::diagonal(dim, frame, |_| 1.0)
    }

    pub fn diagonal(dim: usize, frame: Frame, f: impl Fn(usize) -> f64) -> Self {
        Self::from_triplets(dim, frame, (0..dim).map(|i| (i, i, C64::new(f(i), 0.0)))).flag_hermitian_unchecked()
    }

    /// Permutation operator `|perm(i)⟩⟨i|`.
    pub fn permutation(dim: usize, frame: Frame, perm: impl Fn(usize) -> usize) -> Self {
        Self::from_triplets(dim, frame, (0..dim).map(|i| (perm(i), i, C64::new(1.0, 0.0))))
    }

    pub(crate) fn flag_hermitian_unchecked(mut self) -> Self {
        self.hermitian = true;
        self
    }

    /// Set the hermitian flag after verifying `max|M − M†| < 1e-12`.
    pub fn into_hermitian(self) -> Result<Self> {
        let dev = self.max_abs_diff(&self.adjoint())?;
        if dev >= HERMITIAN_TOL {
            return Err(Error::validation(format!(
                "operator is not hermitian (max |M - M†| = {dev:e})"
            )));
        }
        Ok(self.flag_hermitian_unchecked())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.data[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map_or(C64::new(0.0, 0.0), |(_, v)| v)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    fn check_same_space(&self, other: &OperatorMatrix) -> Result<()> {
        self.frame.expect(other.frame)?;
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// `y = M x` on raw amplitude slices (no frame check).
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// Apply to a state of the same frame. The result is not renormalized.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.frame.expect(psi.frame())?;
        if psi.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(psi.amplitudes(), &mut out);
        StateVector::from_amplitudes(psi.sites(), psi.frame(), out)
    }

    /// `⟨a|M|b⟩`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<C64> {
        a.inner(&self.apply(b)?)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::from_triplets(self.dim, self.frame, self.triplets().map(|(i, j, v)| (j, i, v.conj())));
        out.hermitian = self.hermitian;
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= factor);
        out.hermitian = self.hermitian && factor.im == 0.0;
        out
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &OperatorMatrix, factor: C64) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = Self::from_triplets(
            self.dim,
            self.frame,
            self.triplets()
                .chain(other.triplets().map(|(i, j, v)| (i, j, v * factor))),
        );
        out.hermitian = self.hermitian && other.hermitian && factor.im == 0.0;
        Ok(out)
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    /// `self · other`.
    pub fn matmul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_space(other)?;
        let rows = (0..self.dim)
            .map(|i| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for (k, a) in self.row(i) {
                    acc.extend(other.row(k).map(|(j, b)| (j, a * b)));
                }
                acc
            })
            .collect();
        Ok(Self::from_rows(self.dim, self.frame, rows))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `{self, other}`.
    pub fn anticommutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Conjugate a lab-frame operator into the rotated frame: `U† M U`.
    ///
    /// `unitary` is the lab-frame matrix returned by
    /// [`rotation_unitary`](crate::spin::rotation_unitary).
    pub fn to_rotated_frame(&self, unitary: &OperatorMatrix) -> Result<Self> {
        Frame::Lab.expect(self.frame)?;
        let mut out = unitary.adjoint().matmul(self)?.matmul(unitary)?;
        out.frame = Frame::Rotated;
        out.hermitian = self.hermitian;
        Ok(out)
    }

    /// Re-tag the frame without changing entries. Only meaningful for
    /// operators that commute with the frame rotation (site permutations).
    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Real part as a dense matrix, or `None` if any imaginary part exceeds `tol`.
    pub fn to_dense_real(&self, tol: f64) -> Option<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            if v.im.abs() > tol {
                return None;
            }
            m[(i, j)] = v.re;
        }
        Some(m)
    }

    /// Ascending eigenvalues of a hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return Err(Error::validation("eigenvalues requested for a non-hermitian operator"));
        }
        Ok(match self.to_dense_real(0.0) {
            Some(m) => crate::linalg::eigh_real(m).values,
            None => crate::linalg::eigh_complex(self.to_dense()).values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = OperatorMatrix::from_triplets(
            2,
            Frame::Lab,
            [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(0.0, 0.0))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
    }

    #[test]
    fn hermitian_flag_is_verified() {
        let ok = OperatorMatrix::from_triplets(2, Frame::Lab, [(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]);
        assert!(ok.into_hermitian().is_ok());
        let bad = OperatorMatrix::from_triplets(2, Frame::Lab, [(0, 1, c(1.0, 0.0))]);
        assert!(bad.into_hermitian().is_err());
    }

    #[test]
    fn matmul_matches_dense() {
        let a = OperatorMatrix::from_triplets(
            3,
            Frame::Rotated,
            [(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.5)), (1, 1, c(3.0, 0.0))],
        );
        let b = OperatorMatrix::from_triplets(
            3,
            Frame::Rotated,
            [(1, 2, c(0.5, 0.0)), (0, 0, c(0.0, 1.0)), (1, 0, c(2.0, -1.0))],
        );
        let sparse = a.matmul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).camax() < 1e-15);
    }

    #[test]
    fn mixing_frames_is_rejected() {
        let a = OperatorMatrix::identity(4, Frame::Lab);
        let b = OperatorMatrix::identity(4, Frame::Rotated);
        assert!(matches!(a.add(&b), Err(Error::FrameMismatch { .. })));
        assert!(a.apply(&StateVector::fermion_vacuum(2)).is_err());
    }
}

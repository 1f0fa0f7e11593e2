//! Dense complex matrices sized for few-qubit registers.
//!
//! Everything in this crate works on small square matrices (2x2 up to a few
//! hundred rows for multi-electron registers), so the kernels here are plain
//! row-major loops plus a cyclic Jacobi eigensolver for Hermitian input.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square, row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Matrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major slices; panics if the rows are ragged.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut m = Matrix::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {r} has wrong length");
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(other.data.iter()) {
            *o += v;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(other.data.iter()) {
            *o -= v;
        }
        out
    }

    pub fn scale(&self, s: C64) -> Matrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conjugate(&self) -> Matrix {
        Matrix::from_fn(self.dim, |r, c| self[(r, c)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product; `self` supplies the most significant index block.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.dim, other.dim);
        Matrix::from_fn(a * b, |r, c| {
            self[(r / b, c / b)] * other[(r % b, c % b)]
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-abs-entry test of U U&dagger; = 1.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint())
            .max_abs_diff(&Matrix::identity(self.dim))
            <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the matching eigenvectors as
    /// matrix columns, so that `self = V diag(w) V&dagger;`.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Matrix) {
        let n = self.dim;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        let scale = self.max_abs().max(1.0);

        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let z = a[(p, q)];
                    let zn = z.norm();
                    if zn <= 1e-300 {
                        continue;
                    }
                    let phase = z / zn;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // Smaller-magnitude root of t^2 + 2 tau t - 1 = 0 keeps the
                    // rotation angle below pi/4.
                    let tau = (aqq - app) / (2.0 * zn);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let spos = s * phase; // s e^{i phi}
                    // Row update: A <- R^dagger A.
                    for k in 0..n {
                        let arp = a[(p, k)];
                        let arq = a[(q, k)];
                        a[(p, k)] = c * arp - spos * arq;
                        a[(q, k)] = spos.conj() * arp + c * arq;
                    }
                    // Column update: A <- A R, and accumulate V <- V R.
                    for k in 0..n {
                        let acp = a[(k, p)];
                        let acq = a[(k, q)];
                        a[(k, p)] = c * acp - spos.conj() * acq;
                        a[(k, q)] = spos * acp + c * acq;

                        let vcp = v[(k, p)];
                        let vcq = v[(k, q)];
                        v[(k, p)] = c * vcp - spos.conj() * vcq;
                        v[(k, q)] = spos * vcp + c * vcq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
        (values, vectors)
    }

    /// Principal square root of a Hermitian PSD matrix; small negative
    /// eigenvalues from floating-point noise are clipped to zero.
    pub fn hermitian_sqrt(&self) -> Matrix {
        let (values, vectors) = self.hermitian_eigen();
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for (k, &w) in values.iter().enumerate() {
            let root = w.max(0.0).sqrt();
            if root == 0.0 {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += root * vectors[(r, k)] * vectors[(c, k)].conj();
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Global phase `lambda` such that `u ~ e^{i lambda} v`, if one exists.
///
/// The phase is fixed by aligning the largest-magnitude entry of `v`; the
/// match is then verified entrywise with a max-abs test.
pub fn global_phase_between(u: &Matrix, v: &Matrix, tol: f64) -> Result<Option<f64>> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let n = v.dim();
    let mut best = (0usize, 0usize);
    let mut best_norm = -1.0f64;
    for r in 0..n {
        for c in 0..n {
            let nv = v[(r, c)].norm();
            if nv > best_norm {
                best_norm = nv;
                best = (r, c);
            }
        }
    }
    if best_norm <= tol {
        // v is (numerically) zero; only a zero u matches.
        return Ok(if u.max_abs() <= tol { Some(0.0) } else { None });
    }
    let lambda = (u[best] / v[best]).arg();
    let rotated = v.scale(C64::from_polar(1.0, lambda));
    if u.max_abs_diff(&rotated) <= tol {
        Ok(Some(lambda))
    } else {
        Ok(None)
    }
}

/// True iff `u = e^{i lambda} v` for some real `lambda`, within `tol`.
pub fn equiv_up_to_global_phase(u: &Matrix, v: &Matrix, tol: f64) -> Result<bool> {
    Ok(global_phase_between(u, v, tol)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix::from_fn(dim, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        g.add(&g.adjoint()).scale(C64::new(0.5, 0.0))
    }

    #[test]
    fn eigen_of_diagonal_matrix() {
        let m = Matrix::from_diagonal(&[C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]);
        let (w, _) = m.hermitian_eigen();
        assert!((w[0] + 1.0).abs() < 1e-12);
        assert!((w[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_matches_two_by_two_closed_form() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2.
        let m = Matrix::from_rows(&[&[ONE, I], &[-I, ONE]]);
        let (w, v) = m.hermitian_eigen();
        assert!((w[0] - 0.0).abs() < 1e-12);
        assert!((w[1] - 2.0).abs() < 1e-12);
        assert!(v.is_unitary(1e-10));
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        for seed in 0..8u64 {
            let m = random_hermitian(6, seed);
            let (w, v) = m.hermitian_eigen();
            let d = Matrix::from_diagonal(
                &w.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
            );
            let rebuilt = v.mul(&d).mul(&v.adjoint());
            assert!(rebuilt.max_abs_diff(&m) < 1e-10, "seed {seed}");
            let tr: f64 = w.iter().sum();
            assert!((tr - m.trace().re).abs() < 1e-10);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let m = random_hermitian(4, 11);
        let psd = m.mul(&m.adjoint());
        let root = psd.hermitian_sqrt();
        assert!(root.mul(&root).max_abs_diff(&psd) < 1e-10);
    }

    #[test]
    fn global_phase_detected() {
        let m = random_hermitian(3, 5);
        let rotated = m.scale(C64::from_polar(1.0, 0.7));
        let lambda = global_phase_between(&rotated, &m, 1e-10).unwrap();
        assert!((lambda.unwrap() - 0.7).abs() < 1e-10);
    }

    #[test]
    fn global_phase_rejects_different_matrices() {
        let x = Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        let z = Matrix::from_diagonal(&[ONE, -ONE]);
        assert!(!equiv_up_to_global_phase(&x, &z, 1e-10).unwrap());
    }

    #[test]
    fn global_phase_dimension_mismatch() {
        let a = Matrix::identity(2);
        let b = Matrix::identity(4);
        assert!(matches!(
            global_phase_between(&a, &b, 1e-10),
            Err(Error::DimensionMismatch(2, 4))
        ));
    }

    #[test]
    fn kron_block_structure() {
        let x = Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        let id = Matrix::identity(2);
        let m = id.kron(&x);
        // 1 (x) X swaps within the low bit, leaving the high bit alone.
        assert_eq!(m[(0, 1)], ONE);
        assert_eq!(m[(2, 3)], ONE);
        assert_eq!(m[(0, 2)], ZERO);
    }
}

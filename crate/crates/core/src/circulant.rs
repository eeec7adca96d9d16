//! Circulant matrices and their Fourier eigenpairs.
//!
//! A `k x k` circulant matrix is stored as its defining vector
//! `(c_0, ..., c_{k-1})`, the first column of the dense expansion. Entry
//! `(r, s)` of the dense matrix is `c_{(r - s) mod k}`.
//!
//! Every circulant matrix is diagonalized by the Fourier vectors
//! `v_{k,j} = (1, w^j, w^{2j}, ..., w^{(k-1)j})` with `w = exp(2 pi i / k)`,
//! and the eigenvalue attached to `v_{k,j}` is
//! `c_0 + c_{k-1} w^j + c_{k-2} w^{2j} + ... + c_1 w^{(k-1)j}`.

use std::f64::consts::PI;

use crate::dense::{CMatrix, C64};
use crate::error::{Error, Result};

/// The `k` distinct powers `w^0, ..., w^{k-1}` of `w = exp(2 pi i / k)`.
///
/// Powers landing on a quarter turn are set exactly so that real and purely
/// imaginary eigenvalues come out without rounding noise.
pub fn roots_of_unity(k: usize) -> Vec<C64> {
    assert!(k >= 1);
    (0..k)
        .map(|m| {
            if (4 * m) % k == 0 {
                match (4 * m) / k {
                    0 => C64::new(1.0, 0.0),
                    1 => C64::new(0.0, 1.0),
                    2 => C64::new(-1.0, 0.0),
                    _ => C64::new(0.0, -1.0),
                }
            } else {
                C64::from_polar(1.0, 2.0 * PI * m as f64 / k as f64)
            }
        })
        .collect()
}

/// A circulant matrix given by its defining vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantMatrix {
    coeffs: Vec<C64>,
}

impl CirculantMatrix {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyBlock { block: 0 });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Size `k` of the matrix.
    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn defining_vector(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// True when `c_j == c_{k-j}` for every `j`, i.e. the dense expansion is
    /// symmetric.
    pub fn is_symmetric(&self) -> bool {
        let k = self.size();
        (1..k).all(|j| self.coeffs[j] == self.coeffs[k - j])
    }

    /// `c_{k-j} = conj(c_j)`; the spectrum is then real.
    pub fn is_hermitian(&self) -> bool {
        let k = self.size();
        self.coeffs[0].im == 0.0 && (1..k).all(|j| self.coeffs[j] == self.coeffs[k - j].conj())
    }

    /// Entry `(r, s)` of the dense expansion.
    pub fn entry(&self, r: usize, s: usize) -> C64 {
        let k = self.size();
        self.coeffs[(r + k - s % k) % k]
    }

    /// Sum of any row, accumulated in the same order as the `j = 0`
    /// eigenvalue so that the two agree bit for bit.
    pub fn row_sum(&self) -> C64 {
        let k = self.size();
        let mut acc = self.coeffs[0];
        for m in 1..k {
            acc += self.coeffs[k - m];
        }
        acc
    }

    /// Eigenvalue attached to the Fourier vector `v_{k,j}`.
    pub fn eigenvalue(&self, j: usize) -> C64 {
        self.eigenvalue_with(j, &roots_of_unity(self.size()))
    }

    fn eigenvalue_with(&self, j: usize, roots: &[C64]) -> C64 {
        let k = self.size();
        let j = j % k;
        let mut acc = self.coeffs[0];
        for m in 1..k {
            acc += self.coeffs[k - m] * roots[(m * j) % k];
        }
        if self.is_hermitian() {
            acc.im = 0.0;
        }
        acc
    }

    /// All `k` eigenvalues, indexed by `j = 0, ..., k-1`.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let roots = roots_of_unity(self.size());
        (0..self.size()).map(|j| self.eigenvalue_with(j, &roots)).collect()
    }

    /// All `k` eigenpairs, ordered by Fourier index. Entry 0 carries the
    /// row sum and the all-ones vector.
    pub fn eigenpairs(&self) -> Vec<FourierEigenpair> {
        let k = self.size();
        let roots = roots_of_unity(k);
        (0..k)
            .map(|j| FourierEigenpair {
                eigenvalue: self.eigenvalue_with(j, &roots),
                vector: FourierVector::with_roots(j, &roots),
            })
            .collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        let k = self.size();
        CMatrix::from_fn(k, k, |r, s| self.entry(r, s))
    }
}

/// The Fourier vector `v_{k,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVector {
    k: usize,
    j: usize,
    entries: Vec<C64>,
}

impl FourierVector {
    pub fn new(k: usize, j: usize) -> Self {
        Self::with_roots(j, &roots_of_unity(k))
    }

    fn with_roots(j: usize, roots: &[C64]) -> Self {
        let k = roots.len();
        let j = j % k;
        let entries = (0..k).map(|m| roots[(m * j) % k]).collect();
        Self { k, j, entries }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn index(&self) -> usize {
        self.j
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierEigenpair {
    pub eigenvalue: C64,
    pub vector: FourierVector,
}

/// The matrix `E_k` whose columns are `v_{k,0}, ..., v_{k,k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DftMatrix {
    k: usize,
}

impl DftMatrix {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyBlock { block: 0 });
        }
        Ok(Self { k })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn columns(&self) -> Vec<FourierVector> {
        let roots = roots_of_unity(self.k);
        (0..self.k).map(|j| FourierVector::with_roots(j, &roots)).collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        let roots = roots_of_unity(self.k);
        CMatrix::from_fn(self.k, self.k, |r, c| roots[(r * c) % self.k])
    }

    /// `E_k` with its first (all-ones) column removed, `k x (k-1)`.
    pub fn without_first_column(&self) -> CMatrix {
        let roots = roots_of_unity(self.k);
        CMatrix::from_fn(self.k, self.k - 1, |r, c| roots[(r * (c + 1)) % self.k])
    }

    /// `|det E_k| = k^{k/2}`, since `E_k^* E_k = k I`.
    pub fn det_modulus(&self) -> f64 {
        (self.k as f64).powf(self.k as f64 / 2.0)
    }

    pub fn det(&self) -> C64 {
        self.to_dense().det()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::vec_norm_inf;

    fn real(v: &[f64]) -> CirculantMatrix {
        CirculantMatrix::from_real(v).unwrap()
    }

    #[test]
    fn one_by_one() {
        let c = real(&[2.0]);
        let pairs = c.eigenpairs();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].eigenvalue, C64::new(2.0, 0.0));
        assert_eq!(pairs[0].vector.entries(), &[C64::new(1.0, 0.0)]);
    }

    #[test]
    fn scalar_multiple_of_identity() {
        for l in real(&[2.0, 0.0, 0.0, 0.0]).eigenvalues() {
            assert_eq!(l, C64::new(2.0, 0.0));
        }
    }

    #[test]
    fn four_cycle_eigenvalues() {
        // dense 4x4 is the undirected 4-cycle; char poly x^4 - 4x^2 = x^2 (x-2)(x+2)
        let l = real(&[0.0, 1.0, 0.0, 1.0]).eigenvalues();
        let expected = [2.0, 0.0, -2.0, 0.0];
        for (got, want) in l.iter().zip(expected) {
            assert!((got - C64::new(want, 0.0)).norm() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn row_sums() {
        assert_eq!(real(&[0.0, 1.0, 1.0]).row_sum(), C64::new(2.0, 0.0));
        assert_eq!(real(&[0.0, 1.0, 0.0]).row_sum(), C64::new(1.0, 0.0));
        let c = CirculantMatrix::new(vec![C64::new(1.0, 1.0), C64::new(2.0, -1.0)]).unwrap();
        assert_eq!(c.row_sum(), C64::new(3.0, 0.0));
    }

    #[test]
    fn row_sum_is_bitwise_first_eigenvalue() {
        let c = CirculantMatrix::new(vec![
            C64::new(0.1, 0.7),
            C64::new(-0.3, 0.2),
            C64::new(0.9, -0.4),
            C64::new(0.33, 0.01),
        ])
        .unwrap();
        assert_eq!(c.row_sum(), c.eigenpairs()[0].eigenvalue);
    }

    #[test]
    fn dense_expansion_layout() {
        let a = C64::new(1.5, -2.0);
        assert_eq!(CirculantMatrix::new(vec![a]).unwrap().to_dense(), CMatrix::from_rows(&[vec![a]]));
        let d = real(&[0.0, 1.0, 0.0]).to_dense();
        let want = CMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(d, want);
        let k3 = real(&[0.0, 1.0, 1.0]).to_dense();
        let want = CMatrix::from_real_rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        assert_eq!(k3, want);
    }

    #[test]
    fn column_zero_is_defining_vector() {
        let c = real(&[3.0, -1.0, 4.0, 1.0, -5.0]);
        assert_eq!(c.to_dense().column(0), c.defining_vector());
    }

    #[test]
    fn fourier_vectors_are_eigenvectors() {
        let c =
            CirculantMatrix::new((0..7).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect()).unwrap();
        let dense = c.to_dense();
        for p in c.eigenpairs() {
            let v = p.vector.entries();
            let cv = dense.mul_vec(v);
            let r: Vec<C64> = cv.iter().zip(v).map(|(a, b)| a - p.eigenvalue * b).collect();
            assert!(vec_norm_inf(&r) < 1e-13);
        }
    }

    #[test]
    fn fourier_vector_entries_have_unit_modulus() {
        for k in 1..=12 {
            for j in 0..k {
                for x in FourierVector::new(k, j).entries() {
                    assert!((x.norm() - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn dft_determinant_modulus() {
        for k in 1..=16 {
            let e = DftMatrix::new(k).unwrap();
            let want = e.det_modulus();
            let got = e.det().norm();
            assert!(((got - want) / want).abs() < 1e-9, "k={k}: {got} vs {want}");
            assert!(got >= 1e-6);
        }
    }

    #[test]
    fn dft_gram_is_scaled_identity() {
        let e = DftMatrix::new(6).unwrap().to_dense();
        let g = e.adjoint().mul(&e);
        let diff = g.sub(&CMatrix::identity(6).scale(C64::new(6.0, 0.0)));
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn hermitian_blocks_have_real_spectrum() {
        let c =
            CirculantMatrix::new(vec![C64::new(1.0, 0.0), C64::new(0.3, 0.7), C64::new(0.2, 0.0), C64::new(0.3, -0.7)])
                .unwrap();
        assert!(c.is_hermitian());
        assert!(c.eigenvalues().iter().all(|z| z.im == 0.0));
        let k5 = CirculantMatrix::from_real(&[0.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(k5.eigenvalues().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn empty_vector_rejected() {
        assert!(CirculantMatrix::new(vec![]).is_err());
        assert!(CirculantMatrix::from_real(&[f64::NAN]).is_err());
    }
}

//! Joins of circulant matrices.
//!
//! A join places circulant blocks `C_1, ..., C_d` (sizes `k_1, ..., k_d`) on
//! the diagonal and fills off-diagonal block `(i, j)` with the constant
//! `a_ij`. Its spectrum splits into two parts:
//!
//! * the Fourier eigenvalues of every block except the row-sum one, with
//!   eigenvectors `v_{k_i, j}` zero-padded to the block's index range;
//! * the spectrum of the `d x d` condensed matrix `Ā` (block row sums on the
//!   diagonal, `a_ij k_j` off it), whose generalized eigenvectors lift to the
//!   join by repeating coordinate `i` exactly `k_i` times.
//!
//! Only the condensed part needs numerical linear algebra.

use std::fmt;

use crate::circulant::{CirculantMatrix, DftMatrix, FourierVector};
use crate::dense::{CMatrix, C64};
use crate::error::{Error, Result};
use crate::smalldense::{self, cmp_re_im, EigenSettings, JordanChain, SmallMatrix};

/// Default ceiling on `n` for dense expansions.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Diagonal circulant blocks plus the table of off-diagonal constants.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinSpec {
    blocks: Vec<CirculantMatrix>,
    /// `d x d`; the diagonal is stored as zero and never read.
    couplings: CMatrix,
}

impl JoinSpec {
    pub fn new(blocks: Vec<CirculantMatrix>, couplings: CMatrix) -> Result<Self> {
        let d = blocks.len();
        if d == 0 {
            return Err(Error::NoBlocks);
        }
        if couplings.nrows() != d {
            return Err(Error::CouplingShape { expected: d, found: couplings.nrows() });
        }
        if couplings.ncols() != d {
            return Err(Error::CouplingShape { expected: d, found: couplings.ncols() });
        }
        if !couplings.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut couplings = couplings;
        for i in 0..d {
            couplings[(i, i)] = C64::new(0.0, 0.0);
        }
        Ok(Self { blocks, couplings })
    }

    /// Builds a join from a row-wise coupling table, rejecting ragged rows.
    pub fn from_table(blocks: Vec<CirculantMatrix>, table: &[Vec<C64>]) -> Result<Self> {
        let d = blocks.len();
        if table.len() != d {
            return Err(Error::CouplingShape { expected: d, found: table.len() });
        }
        if let Some(row) = table.iter().find(|r| r.len() != d) {
            return Err(Error::CouplingShape { expected: d, found: row.len() });
        }
        Self::new(blocks, CMatrix::from_rows(table))
    }

    /// A join whose off-diagonal constants all equal `a`.
    pub fn uniform(blocks: Vec<CirculantMatrix>, a: C64) -> Result<Self> {
        let d = blocks.len();
        Self::new(blocks, CMatrix::from_fn(d, d, |_, _| a))
    }

    pub fn single(block: CirculantMatrix) -> Self {
        Self { blocks: vec![block], couplings: CMatrix::zeros(1, 1) }
    }

    pub fn d(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size()).collect()
    }

    /// Start index of every block in the dense layout.
    pub fn offsets(&self) -> Vec<usize> {
        offsets(&self.sizes())
    }

    pub fn blocks(&self) -> &[CirculantMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CirculantMatrix {
        &self.blocks[i]
    }

    pub fn coupling(&self, i: usize, j: usize) -> C64 {
        self.couplings[(i, j)]
    }

    pub fn couplings(&self) -> &CMatrix {
        &self.couplings
    }

    pub fn is_real(&self) -> bool {
        self.blocks.iter().all(|b| b.is_real()) && self.couplings.as_slice().iter().all(|c| c.im == 0.0)
    }

    /// Dense `n x n` expansion, refused when `n > cap`.
    pub fn to_dense_capped(&self, cap: usize) -> Result<CMatrix> {
        let n = self.n();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        let sizes = self.sizes();
        let offs = offsets(&sizes);
        let mut owner = Vec::with_capacity(n);
        for (i, &k) in sizes.iter().enumerate() {
            owner.extend(std::iter::repeat_n(i, k));
        }
        Ok(CMatrix::from_fn(n, n, |r, s| {
            let (bi, bj) = (owner[r], owner[s]);
            if bi == bj {
                self.blocks[bi].entry(r - offs[bi], s - offs[bj])
            } else {
                self.couplings[(bi, bj)]
            }
        }))
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn condensed_matrix(&self) -> CondensedMatrix {
        let d = self.d();
        let sizes = self.sizes();
        CondensedMatrix(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                self.blocks[i].row_sum()
            } else {
                self.couplings[(i, j)] * sizes[j] as f64
            }
        }))
    }

    /// The `sum k_i - d` eigenpairs inherited from the blocks, in block order
    /// and then by Fourier index `1..k_i`.
    pub fn circulant_eigenpairs(&self) -> Vec<CirculantEigenpair> {
        let offs = self.offsets();
        let mut out = Vec::with_capacity(self.n() - self.d());
        for (i, block) in self.blocks.iter().enumerate() {
            let pairs = block.eigenpairs();
            for pair in pairs.into_iter().skip(1) {
                out.push(CirculantEigenpair {
                    block: i,
                    fourier_index: pair.vector.index(),
                    eigenvalue: pair.eigenvalue,
                    offset: offs[i],
                    fourier: pair.vector,
                });
            }
        }
        out
    }

    /// Characteristic polynomial of the condensed matrix, which is the
    /// characteristic polynomial of the join with every circulant eigenvalue
    /// factored out.
    pub fn reduced_char_poly(&self) -> Polynomial {
        Polynomial::characteristic(self.condensed_matrix().as_matrix())
    }

    pub fn full_spectrum(&self) -> Result<SpectralDecomposition> {
        self.full_spectrum_with(&EigenSettings::default())
    }

    pub fn full_spectrum_with(&self, settings: &EigenSettings) -> Result<SpectralDecomposition> {
        let condensed = self.condensed_matrix().eigenstructure(settings)?;
        Ok(SpectralDecomposition {
            sizes: self.sizes(),
            circulant: self.circulant_eigenpairs(),
            diagonalizable: condensed.is_diagonalizable(),
            condensed,
        })
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .iter()
        .map(|k| {
            let o = acc;
            acc += k;
            o
        })
        .collect()
}

/// Repeats coordinate `i` of `v` exactly `sizes[i]` times.
pub fn tensor_expand(v: &[C64], sizes: &[usize]) -> Result<Vec<C64>> {
    if v.len() != sizes.len() {
        return Err(Error::DimensionMismatch { expected: sizes.len(), found: v.len() });
    }
    Ok(v.iter().zip(sizes).flat_map(|(&x, &k)| std::iter::repeat_n(x, k)).collect())
}

/// The `d x d` matrix of block row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedMatrix(CMatrix);

impl CondensedMatrix {
    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn eigenstructure(&self, settings: &EigenSettings) -> Result<CondensedEigenstructure> {
        let m = SmallMatrix::new(self.0.clone())?;
        let mut spaces = Vec::new();
        for ev in smalldense::eigenvalues(&m, settings)? {
            let chains = smalldense::jordan_chains(&m, ev.value, ev.multiplicity, settings)?;
            spaces.push(CondensedEigenspace { eigenvalue: ev.value, multiplicity: ev.multiplicity, chains });
        }
        Ok(CondensedEigenstructure { spaces })
    }
}

/// Generalized eigenspace of the condensed matrix at one eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedEigenspace {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    pub chains: Vec<JordanChain>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedEigenstructure {
    /// Sorted by (Re, Im) of the eigenvalue.
    pub spaces: Vec<CondensedEigenspace>,
}

impl CondensedEigenstructure {
    pub fn is_diagonalizable(&self) -> bool {
        self.spaces.iter().all(|s| s.chains.iter().all(|c| c.len() == 1))
    }

    /// All chain vectors in order (space, chain, position); `d` of them.
    pub fn chain_vectors(&self) -> Vec<&[C64]> {
        self.spaces.iter().flat_map(|s| s.chains.iter()).flat_map(|c| c.vectors.iter().map(Vec::as_slice)).collect()
    }

    /// The `d x d` matrix `X` whose columns are [`Self::chain_vectors`].
    pub fn chain_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.chain_vectors())
    }
}

/// Eigenpair of the join inherited from a circulant block.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantEigenpair {
    pub block: usize,
    /// Fourier index `j` in `1..k_i`.
    pub fourier_index: usize,
    pub eigenvalue: C64,
    offset: usize,
    fourier: FourierVector,
}

impl CirculantEigenpair {
    /// Index range of the eigenvector's support.
    pub fn support(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.fourier.size()
    }

    pub fn fourier_vector(&self) -> &FourierVector {
        &self.fourier
    }

    /// The zero-padded eigenvector `w_{i,j}` of length `n`.
    pub fn to_vector(&self, n: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[self.support()].copy_from_slice(self.fourier.entries());
        v
    }
}

/// Where an eigenvalue of the join comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// A non-row-sum Fourier eigenvalue of the given block (0-based).
    Block(usize),
    Condensed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Block(i) => write!(f, "block:{i}"),
            Provenance::Condensed => write!(f, "condensed"),
        }
    }
}

/// One eigenvalue entry. Circulant eigenvalues always have multiplicity one
/// here; condensed ones carry their algebraic multiplicity in `Ā`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub value: C64,
    pub multiplicity: usize,
    pub provenance: Provenance,
}

/// A chain of generalized eigenvectors of the join, `vectors[0]` being the
/// eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedChain {
    pub eigenvalue: C64,
    pub provenance: Provenance,
    pub vectors: Vec<Vec<C64>>,
}

/// Spectrum and generalized eigenbasis of a join.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    sizes: Vec<usize>,
    circulant: Vec<CirculantEigenpair>,
    condensed: CondensedEigenstructure,
    diagonalizable: bool,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.diagonalizable
    }

    pub fn circulant_pairs(&self) -> &[CirculantEigenpair] {
        &self.circulant
    }

    pub fn condensed(&self) -> &CondensedEigenstructure {
        &self.condensed
    }

    /// Grouped entries sorted by (Re, Im); multiplicities add up to `n`.
    pub fn entries(&self) -> Vec<SpectrumEntry> {
        let mut out: Vec<SpectrumEntry> = self
            .condensed
            .spaces
            .iter()
            .map(|s| SpectrumEntry {
                value: s.eigenvalue,
                multiplicity: s.multiplicity,
                provenance: Provenance::Condensed,
            })
            .chain(self.circulant.iter().map(|p| SpectrumEntry {
                value: p.eigenvalue,
                multiplicity: 1,
                provenance: Provenance::Block(p.block),
            }))
            .collect();
        out.sort_by(|a, b| cmp_re_im(&a.value, &b.value));
        out
    }

    /// The full multiset of `n` eigenvalues, sorted by (Re, Im).
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.entries().into_iter().flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity)).collect()
    }

    /// Condensed chains lifted to length-`n` vectors, in the order of
    /// [`CondensedEigenstructure::chain_vectors`].
    pub fn lifted_chains(&self) -> Vec<GeneralizedChain> {
        self.condensed
            .spaces
            .iter()
            .flat_map(|s| {
                s.chains.iter().map(move |c| GeneralizedChain {
                    eigenvalue: s.eigenvalue,
                    provenance: Provenance::Condensed,
                    vectors: c
                        .vectors
                        .iter()
                        .map(|v| tensor_expand(v, &self.sizes).expect("chain vectors have length d"))
                        .collect(),
                })
            })
            .collect()
    }

    /// Every chain of the join: circulant eigenvectors as chains of length
    /// one followed by the lifted condensed chains. Lengths add up to `n`.
    pub fn chains(&self) -> Vec<GeneralizedChain> {
        let n = self.n();
        self.circulant
            .iter()
            .map(|p| GeneralizedChain {
                eigenvalue: p.eigenvalue,
                provenance: Provenance::Block(p.block),
                vectors: vec![p.to_vector(n)],
            })
            .chain(self.lifted_chains())
            .collect()
    }

    /// The `n x n` matrix of generalized eigenvectors. For each block `i` it
    /// holds the lifted condensed vector `X[:, i]` followed by
    /// `w_{i,1}, ..., w_{i,k_i - 1}`, so that
    /// `det M = det E_{k_1} ... det E_{k_d} det X`.
    pub fn eigenbasis_matrix(&self) -> CMatrix {
        let n = self.n();
        let x = self.condensed.chain_vectors();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut pairs = self.circulant.iter().peekable();
        for (i, xi) in x.iter().enumerate() {
            cols.push(tensor_expand(xi, &self.sizes).expect("chain vectors have length d"));
            while let Some(p) = pairs.next_if(|p| p.block == i) {
                cols.push(p.to_vector(n));
            }
        }
        CMatrix::from_columns(&cols)
    }

    /// `prod_i |det E_{k_i}| * |det X|`, the modulus the eigenbasis
    /// determinant must have.
    pub fn predicted_det_modulus(&self) -> f64 {
        let dft: f64 =
            self.sizes.iter().map(|&k| DftMatrix::new(k).expect("sizes are positive").det_modulus()).product();
        dft * self.condensed.chain_matrix().det().norm()
    }
}

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    /// `det(X I - M)`: principal-minor sums for `d <= 4`, Faddeev-LeVerrier
    /// above that.
    pub fn characteristic(m: &CMatrix) -> Self {
        assert!(m.is_square());
        let d = m.nrows();
        let mut coeffs = vec![C64::new(0.0, 0.0); d + 1];
        coeffs[d] = C64::new(1.0, 0.0);
        if d <= 4 {
            for size in 1..=d {
                let mut sum = C64::new(0.0, 0.0);
                for mask in 0u32..(1 << d) {
                    if mask.count_ones() as usize != size {
                        continue;
                    }
                    let idx: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
                    sum += CMatrix::from_fn(size, size, |r, c| m[(idx[r], idx[c])]).det();
                }
                let sign = if size % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[d - size] = sum * sign;
            }
        } else {
            let mut acc = CMatrix::zeros(d, d);
            for k in 1..=d {
                let mut next = m.mul(&acc);
                for i in 0..d {
                    next[(i, i)] += coeffs[d - k + 1];
                }
                acc = next;
                coeffs[d - k] = -m.mul(&acc).trace() / k as f64;
            }
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients, constant term first.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, &c) in self.coeffs.iter().enumerate().rev() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mono = match p {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{p}"),
            };
            if c.im == 0.0 {
                let neg = c.re < 0.0;
                let mag = c.re.abs();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if neg { '-' } else { '+' })?;
                }
                if mag != 1.0 || p == 0 {
                    write!(f, "{mag}")?;
                }
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            write!(f, "{mono}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

//! Eigenvalues and Jordan chains of small dense complex matrices.
//!
//! This is the only iterative kernel in the crate. It exists to handle the
//! `d x d` condensed matrix of a join, so it favours robustness over speed:
//! closed forms for `d <= 2`, otherwise Hessenberg reduction followed by
//! single-shift complex QR with Wilkinson shifts.

use std::cmp::Ordering;

use crate::dense::{vec_dot, vec_norm2, CMatrix, C64};
use crate::error::{Error, Result};

/// Tolerances used by the eigenvalue and chain routines. All of them are
/// relative to `1 + ||M||_inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSettings {
    /// Eigenvalues closer than `cluster_tol * (1 + ||M||)` are merged.
    pub cluster_tol: f64,
    /// Singular values at most `sigma_tol * (1 + ||M||)` count as zero.
    pub sigma_tol: f64,
    /// Minimum smallest singular value of the matrix of chain vectors.
    pub independence_tol: f64,
    /// QR budget is `iteration_factor * d^2` steps.
    pub iteration_factor: usize,
}

impl Default for EigenSettings {
    fn default() -> Self {
        Self { cluster_tol: 1e-7, sigma_tol: 1e-8, independence_tol: 1e-6, iteration_factor: 100 }
    }
}

/// A square matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix(CMatrix);

impl SmallMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Precondition("matrix must be at least 1x1".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    fn scale(&self) -> f64 {
        1.0 + self.0.norm_inf()
    }
}

/// A distinct eigenvalue together with its algebraic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub value: C64,
    pub multiplicity: usize,
}

/// Lexicographic order on (Re, Im).
pub fn cmp_re_im(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues with multiplicity, grouped and sorted by (Re, Im).
pub fn eigenvalues(m: &SmallMatrix, settings: &EigenSettings) -> Result<Vec<Eigenvalue>> {
    let raw = raw_eigenvalues(m, settings)?;
    Ok(cluster(&raw, settings.cluster_tol * m.scale()))
}

/// Eigenvalues without clustering, in no particular order.
pub fn raw_eigenvalues(m: &SmallMatrix, settings: &EigenSettings) -> Result<Vec<C64>> {
    let a = &m.0;
    match m.dim() {
        1 => Ok(vec![a[(0, 0)]]),
        2 => Ok(quadratic_eigenvalues(a).to_vec()),
        d => qr_eigenvalues(a.clone(), settings.iteration_factor * d * d),
    }
}

/// Roots of `X^2 - tr X + det`, written as `(a + d +- sqrt((a - d)^2 + 4bc)) / 2`.
fn quadratic_eigenvalues(a: &CMatrix) -> [C64; 2] {
    let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let disc = (p - s) * (p - s) + 4.0 * q * r;
    let root = disc.sqrt();
    [(p + s + root) / 2.0, (p + s - root) / 2.0]
}

fn qr_eigenvalues(mut h: CMatrix, budget: usize) -> Result<Vec<C64>> {
    let n = h.nrows();
    hessenberg(&mut h);
    let mut eig = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iterations = 0;
    let mut since_deflation = 0;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = h.max_abs();
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iterations += 1;
        since_deflation += 1;
        if iterations > budget {
            return Err(Error::NotConverged { iterations: budget });
        }
        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) / 2.0;
    let root = (half * half + b * c).sqrt();
    let mid = (a + d) / 2.0;
    let l1 = mid + root;
    let l2 = mid - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens pair `(c, s)` with `[c s; -conj(s) c] [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let r = (an * an + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    (an / r, (a / an) * b.conj() / r)
}

/// One explicit shifted QR sweep on the unreduced Hessenberg block `lo..=hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// In-place Householder reduction to upper Hessenberg form (similarity).
fn hessenberg(h: &mut CMatrix) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|v| v.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = vec_norm2(&x);
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vn = vec_norm2(&v);
        for e in v.iter_mut() {
            *e /= vn;
        }
        // H <- (I - 2 v v^*) H
        for j in 0..n {
            let w: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= 2.0 * vi * w;
            }
        }
        // H <- H (I - 2 v v^*)
        for i in 0..n {
            let w: C64 = v.iter().enumerate().map(|(t, vi)| h[(i, k + 1 + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= 2.0 * w * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Single-linkage clustering: values closer than `tol` (transitively) are
/// merged to their mean.
pub fn cluster(values: &[C64], tol: f64) -> Vec<Eigenvalue> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for (i, &value) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += value;
                g.2 += 1;
            }
            None => groups.push((root, value, 1)),
        }
    }
    let mut out: Vec<Eigenvalue> =
        groups.into_iter().map(|(_, sum, m)| Eigenvalue { value: sum / m as f64, multiplicity: m }).collect();
    out.sort_by(|a, b| cmp_re_im(&a.value, &b.value));
    out
}

/// A Jordan chain `u_1, ..., u_m` with `(M - lambda I) u_1 = 0` and
/// `(M - lambda I) u_r = u_{r-1}`. `vectors[0]` is the eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    pub vectors: Vec<Vec<C64>>,
}

impl JordanChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn eigenvector(&self) -> &[C64] {
        &self.vectors[0]
    }
}

/// Jordan chains of `m` at `lambda`, whose lengths add up to `multiplicity`.
///
/// The nested kernels `ker (M - lambda I)^p` are grown one level at a time as
/// `{x : (M - lambda I) x in ker (M - lambda I)^{p-1}}`, so every rank
/// decision is made on a matrix of the same scale as `M`. Chain tops are then
/// picked from the highest level down, completing at each level the span of
/// the lower kernel and the images of longer chains.
pub fn jordan_chains(
    m: &SmallMatrix,
    lambda: C64,
    multiplicity: usize,
    settings: &EigenSettings,
) -> Result<Vec<JordanChain>> {
    let d = m.dim();
    if multiplicity == 0 || multiplicity > d {
        return Err(Error::Precondition(format!("multiplicity {multiplicity} outside 1..={d}")));
    }
    let ill = |detail: String| Error::IllConditioned { eigenvalue: format!("{lambda}"), detail };
    let nmat = m.0.shifted(lambda);
    let tol = settings.sigma_tol * m.scale();

    // kernels[p] is an orthonormal basis of ker N^(p+1)
    let mut kernels: Vec<Vec<Vec<C64>>> = Vec::new();
    let mut prev: Vec<Vec<C64>> = Vec::new();
    loop {
        let b = project_out_rows(&nmat, &prev);
        let k = b.null_space(tol);
        let dim = k.len();
        let growth = dim as isize - prev.len() as isize;
        if growth <= 0 {
            return Err(ill(format!("kernel dimension stalled at {} below multiplicity {multiplicity}", prev.len())));
        }
        if dim > multiplicity {
            return Err(ill(format!("kernel dimension {dim} exceeds algebraic multiplicity {multiplicity}")));
        }
        if let Some(last) = kernels.len().checked_sub(1) {
            let before = if last == 0 { 0 } else { kernels[last - 1].len() };
            let last_growth = kernels[last].len() - before;
            if growth as usize > last_growth {
                return Err(ill("kernel growth is not monotone".into()));
            }
        }
        kernels.push(k.clone());
        prev = k;
        if dim == multiplicity {
            break;
        }
    }

    // (top vector, length) pairs; `current` holds N^(len - level) top
    let mut tops: Vec<(Vec<C64>, usize)> = Vec::new();
    let mut current: Vec<Vec<C64>> = Vec::new();
    for level in (1..=kernels.len()).rev() {
        let lower: &[Vec<C64>] = if level >= 2 { &kernels[level - 2] } else { &[] };
        let growth = kernels[level - 1].len() - lower.len();
        let need = growth
            .checked_sub(current.len())
            .ok_or_else(|| ill(format!("level {level} has more chain images than kernel growth")))?;
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for v in lower.iter().chain(current.iter()) {
            let r = orthogonal_residual(v, &basis);
            let rn = vec_norm2(&r);
            if rn <= settings.independence_tol {
                return Err(ill(format!("chain images dependent at level {level}")));
            }
            basis.push(r.into_iter().map(|x| x / rn).collect());
        }
        for _ in 0..need {
            let best = kernels[level - 1]
                .iter()
                .map(|cand| {
                    let r = orthogonal_residual(cand, &basis);
                    let rn = vec_norm2(&r);
                    (r, rn)
                })
                .fold(None::<(Vec<C64>, f64)>, |acc, (r, rn)| match acc {
                    Some((_, bn)) if bn >= rn => acc,
                    _ => Some((r, rn)),
                })
                .ok_or_else(|| ill("empty kernel".into()))?;
            if best.1 <= settings.independence_tol {
                return Err(ill(format!("cannot complete kernel basis at level {level}")));
            }
            let unit: Vec<C64> = best.0.iter().map(|x| x / best.1).collect();
            basis.push(unit.clone());
            let top = fix_phase(unit);
            current.push(top.clone());
            tops.push((top, level));
        }
        current = current.iter().map(|v| nmat.mul_vec(v)).collect();
    }

    let chains: Vec<JordanChain> = tops
        .into_iter()
        .map(|(top, len)| {
            let mut vectors = vec![top];
            for _ in 1..len {
                let next = nmat.mul_vec(vectors.last().expect("non-empty"));
                vectors.push(next);
            }
            vectors.reverse();
            JordanChain { vectors }
        })
        .collect();

    let all: Vec<&Vec<C64>> = chains.iter().flat_map(|c| c.vectors.iter()).collect();
    let smin = CMatrix::from_columns(&all).singular_values().last().copied().unwrap_or(0.0);
    if smin < settings.independence_tol {
        return Err(ill(format!("chain vectors nearly dependent (smallest singular value {smin:e})")));
    }
    Ok(chains)
}

/// `(I - Q Q^*) N` for an orthonormal family `Q`.
fn project_out_rows(n: &CMatrix, q: &[Vec<C64>]) -> CMatrix {
    let mut out = n.clone();
    if q.is_empty() {
        return out;
    }
    for col in 0..n.ncols() {
        let c = n.column(col);
        let r = orthogonal_residual(&c, q);
        for (row, x) in r.into_iter().enumerate() {
            out[(row, col)] = x;
        }
    }
    out
}

/// Component of `v` orthogonal to the orthonormal family `q` (two passes of
/// modified Gram-Schmidt).
fn orthogonal_residual(v: &[C64], q: &[Vec<C64>]) -> Vec<C64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in q {
            let coef = vec_dot(b, &r);
            for (x, y) in r.iter_mut().zip(b) {
                *x -= coef * y;
            }
        }
    }
    r
}

/// Rotates `v` so that its first entry of (near) maximal modulus is real and
/// positive.
pub(crate) fn fix_phase(v: Vec<C64>) -> Vec<C64> {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v.iter().find(|x| x.norm() >= max * (1.0 - 1e-9)).copied().expect("max exists");
    let rot = pivot.conj() / pivot.norm();
    v.into_iter().map(|x| x * rot).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::vec_norm_inf;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn small(rows: &[&[f64]]) -> SmallMatrix {
        SmallMatrix::new(CMatrix::from_real_rows(rows)).unwrap()
    }

    fn residual(m: &CMatrix, lambda: C64, u: &[C64], prev: Option<&[C64]>) -> f64 {
        let mut r = m.shifted(lambda).mul_vec(u);
        if let Some(p) = prev {
            for (x, y) in r.iter_mut().zip(p) {
                *x -= y;
            }
        }
        vec_norm_inf(&r)
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = small(&[&[1.0, 5.0], &[3.0, 4.0]]);
        let ev = eigenvalues(&m, &EigenSettings::default()).unwrap();
        let s = 69f64.sqrt();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].value - c((5.0 - s) / 2.0)).norm() < 1e-14);
        assert!((ev[1].value - c((5.0 + s) / 2.0)).norm() < 1e-14);
        // trace and determinant
        let sum = ev[0].value + ev[1].value;
        let prod = ev[0].value * ev[1].value;
        assert!((sum - c(5.0)).norm() < 1e-13);
        assert!((prod - c(-11.0)).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_has_double_zero() {
        let m = small(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let ev = eigenvalues(&m, &EigenSettings::default()).unwrap();
        assert_eq!(ev, vec![Eigenvalue { value: c(0.0), multiplicity: 2 }]);
    }

    #[test]
    fn diagonal_matrix_returns_its_diagonal() {
        let m = small(&[&[3.0, 0.0, 0.0, 0.0], &[0.0, -1.0, 0.0, 0.0], &[0.0, 0.0, 7.5, 0.0], &[0.0, 0.0, 0.0, 2.0]]);
        let ev = eigenvalues(&m, &EigenSettings::default()).unwrap();
        let vals: Vec<f64> = ev.iter().map(|e| e.value.re).collect();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0, 7.5]);
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1, 2, 3, 4: x^4 - 10x^3 + 35x^2 - 50x + 24
        let m =
            small(&[&[10.0, -35.0, 50.0, -24.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let ev = eigenvalues(&m, &EigenSettings::default()).unwrap();
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((e.value - c(want)).norm() < 1e-9, "{:?}", e);
        }
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = small(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        let ev = eigenvalues(&m, &EigenSettings::default()).unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0].value - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1].value - C64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((ev[2].value - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_chain() {
        let m = small(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let chains = jordan_chains(&m, c(0.0), 2, &EigenSettings::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].vectors, vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]]);
    }

    #[test]
    fn scalar_matrix_chains() {
        let m = small(&[&[3.0, 0.0], &[0.0, 3.0]]);
        let chains = jordan_chains(&m, c(3.0), 2, &EigenSettings::default()).unwrap();
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].vectors, vec![vec![c(1.0), c(0.0)]]);
        assert_eq!(chains[1].vectors, vec![vec![c(0.0), c(1.0)]]);
    }

    #[test]
    fn simple_eigenvector_residual() {
        let m = small(&[&[1.0, 5.0], &[3.0, 4.0]]);
        let lambda = c((5.0 + 69f64.sqrt()) / 2.0);
        let chains = jordan_chains(&m, lambda, 1, &EigenSettings::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].len(), 1);
        assert!(residual(m.as_matrix(), lambda, &chains[0].vectors[0], None) <= 1e-10);
    }

    #[test]
    fn mixed_jordan_structure() {
        // J_3(2) (+) J_1(2) (+) [5], conjugated by a fixed nonsingular matrix
        let j = CMatrix::from_real_rows(&[
            &[2.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 2.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 2.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 5.0],
        ]);
        // unit lower triangular P with exact inverse
        let p = CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, 1.0],
        ]);
        let pinv = CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0, 0.0],
            &[-1.0, 1.0, 0.0, 0.0, 0.0],
            &[2.0, -2.0, 1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0, 1.0, 0.0],
            &[-2.0, 2.0, -1.0, 0.0, 1.0],
        ]);
        assert_eq!(p.mul(&pinv), CMatrix::identity(5));
        let a = p.mul(&j).mul(&pinv);
        let m = SmallMatrix::new(a.clone()).unwrap();
        let chains = jordan_chains(&m, c(2.0), 4, &EigenSettings::default()).unwrap();
        let mut lens: Vec<usize> = chains.iter().map(|c| c.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 3]);
        for ch in &chains {
            for (r, u) in ch.vectors.iter().enumerate() {
                let prev = if r == 0 { None } else { Some(ch.vectors[r - 1].as_slice()) };
                assert!(residual(&a, c(2.0), u, prev) < 1e-9);
            }
        }
    }

    #[test]
    fn wrong_multiplicity_is_ill_conditioned() {
        let m = small(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let err = jordan_chains(&m, c(1.0), 2, &EigenSettings::default()).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }));
    }

    #[test]
    fn clustering_merges_close_values() {
        let vals = [c(1.0), c(1.0 + 1e-9), c(3.0)];
        let cl = cluster(&vals, 1e-7);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].multiplicity, 2);
        assert!((cl[0].value - c(1.0 + 0.5e-9)).norm() < 1e-15);
    }
}

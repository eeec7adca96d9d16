//! Shared helpers for the integration tests. The eigen and rank checks here
//! go through nalgebra so they do not share code with the library.
#![allow(dead_code)]

use circjoin::{CMatrix, CirculantMatrix, JoinSpec, C64};
use nalgebra::{DMatrix, Schur, SVD};
use rand::Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Uniform sample from the closed unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> C64 {
    let r = rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, t)
}

pub fn random_complex_join<R: Rng>(rng: &mut R, max_d: usize, max_k: usize) -> JoinSpec {
    let d = rng.gen_range(1..=max_d);
    let sizes: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=max_k)).collect();
    complex_join_with_sizes(rng, &sizes)
}

pub fn complex_join_with_sizes<R: Rng>(rng: &mut R, sizes: &[usize]) -> JoinSpec {
    let d = sizes.len();
    let blocks =
        sizes.iter().map(|&k| CirculantMatrix::new((0..k).map(|_| unit_disk(rng)).collect()).unwrap()).collect();
    let table: Vec<Vec<C64>> = (0..d).map(|_| (0..d).map(|_| unit_disk(rng)).collect()).collect();
    JoinSpec::from_table(blocks, &table).unwrap()
}

pub fn random_real_circulant<R: Rng>(rng: &mut R, k: usize) -> CirculantMatrix {
    CirculantMatrix::from_real(&(0..k).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap()
}

pub fn random_symmetric_circulant<R: Rng>(rng: &mut R, k: usize) -> CirculantMatrix {
    let mut v = vec![0.0; k];
    v[0] = rng.gen_range(-1.0..1.0);
    for j in 1..=k / 2 {
        let x = rng.gen_range(-1.0..1.0);
        v[j] = x;
        v[k - j] = x;
    }
    CirculantMatrix::from_real(&v).unwrap()
}

pub fn to_na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, s| m[(r, s)])
}

/// Eigenvalues through nalgebra's complex Schur form.
pub fn na_eigenvalues(m: &CMatrix) -> Vec<C64> {
    Schur::new(to_na(m)).eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

pub fn na_singular_values(m: &CMatrix) -> Vec<f64> {
    SVD::new(to_na(m), false, false).singular_values.iter().copied().collect()
}

pub fn na_det(m: &CMatrix) -> C64 {
    to_na(m).determinant()
}

/// Smallest singular value after scaling every column to unit 2-norm.
pub fn sigma_min_normalized(m: &CMatrix) -> f64 {
    let mut a = to_na(m);
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
    }
    SVD::new(a, false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Greedy pairing of two multisets; returns the largest distance between
/// paired entries, or `None` when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let (idx, dist) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[idx] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}

pub fn vec_inf(v: &[C64]) -> f64 {
    v.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Defectiveness of a small matrix decided from nalgebra eigenvalues and
/// ranks: true when some eigenvalue cluster has geometric multiplicity below
/// its algebraic multiplicity.
pub fn na_is_defective(m: &CMatrix) -> bool {
    let n = m.nrows();
    let scale = 1.0 + m.norm_inf();
    let eig = na_eigenvalues(m);
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in eig {
        match clusters.iter_mut().find(|cl| cl.iter().any(|w| (w - z).norm() <= 1e-6 * scale)) {
            Some(cl) => cl.push(z),
            None => clusters.push(vec![z]),
        }
    }
    clusters.iter().any(|cl| {
        let mu = cl.iter().sum::<C64>() / c(cl.len() as f64);
        let shifted = DMatrix::from_fn(n, n, |r, s| m[(r, s)] - if r == s { mu } else { c(0.0) });
        let sv = SVD::new(shifted, false, false).singular_values;
        let nullity = sv.iter().filter(|&&s| s <= 1e-7 * scale).count();
        nullity < cl.len()
    })
}

/// Matrix with given Jordan form `j`, conjugated by the unimodular integer
/// matrix `p` with inverse `p_inv`.
pub fn conjugate(p: &CMatrix, j: &CMatrix, p_inv: &CMatrix) -> CMatrix {
    p.mul(j).mul(p_inv)
}

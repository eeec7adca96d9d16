mod common;

use circjoin::cli::JoinDocument;
use circjoin::graphs::{self, CirculantGraph};
use circjoin::kuramoto::KuramotoSystem;
use circjoin::smalldense::{eigenvalues, EigenSettings, SmallMatrix};
use circjoin::{tensor_expand, CMatrix, CirculantMatrix, JoinSpec, C64};
use common::*;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r.sqrt(), t))
}

fn circulant(max_k: usize) -> impl Strategy<Value = CirculantMatrix> {
    prop::collection::vec(complex(), 1..=max_k).prop_map(|v| CirculantMatrix::new(v).unwrap())
}

fn join(max_d: usize, max_k: usize) -> impl Strategy<Value = JoinSpec> {
    (1..=max_d).prop_flat_map(move |d| {
        (prop::collection::vec(circulant(max_k), d), prop::collection::vec(prop::collection::vec(complex(), d), d))
            .prop_map(|(blocks, table)| JoinSpec::from_table(blocks, &table).unwrap())
    })
}

fn square(max_n: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_fn(n, n, |r, s| v[r * n + s]))
    })
}

fn undirected_part() -> impl Strategy<Value = CirculantGraph> {
    prop_oneof![
        (1..9usize).prop_map(|n| graphs::complete_graph(n).unwrap()),
        (1..10usize, 1..4usize).prop_map(|(k, m)| graphs::ring_graph(k, m).unwrap()),
        (1..10usize, 1..4usize).prop_map(|(k, m)| graphs::complement(&graphs::ring_graph(k, m).unwrap())),
    ]
}

/// Unitary `Q` from the QR factorization of a random matrix, via nalgebra.
fn unitary(m: &CMatrix) -> CMatrix {
    let q = to_na(m).qr().q();
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, s| q[(r, s)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circulant_eigenpair_residuals(c in circulant(16)) {
        let dense = c.to_dense();
        let tol = 1e-10 * (1.0 + dense.norm_inf());
        for pair in c.eigenpairs() {
            let v = pair.vector.entries();
            let av = dense.mul_vec(v);
            let res = av.iter().zip(v).map(|(x, y)| (x - pair.eigenvalue * y).norm()).fold(0.0, f64::max);
            prop_assert!(res <= tol, "residual {res:e}");
        }
        prop_assert_eq!(c.row_sum(), c.eigenvalue(0));
        let sum: C64 = c.eigenvalues().iter().sum();
        prop_assert!((sum - dense.trace()).norm() <= tol * c.size() as f64);
    }

    #[test]
    fn join_chain_residuals_and_counts(spec in join(5, 8)) {
        let a = spec.to_dense().unwrap();
        let tau = 1e-8 * (1.0 + a.norm_inf());
        let dec = spec.full_spectrum().unwrap();
        prop_assert_eq!(dec.eigenvalues().len(), spec.n());
        prop_assert_eq!(dec.circulant_pairs().len(), spec.n() - spec.d());
        prop_assert_eq!(dec.condensed().chain_vectors().len(), spec.d());
        for chain in dec.chains() {
            let shifted = a.shifted(chain.eigenvalue);
            for (r, u) in chain.vectors.iter().enumerate() {
                let mut img = shifted.mul_vec(u);
                if r > 0 {
                    for (x, p) in img.iter_mut().zip(&chain.vectors[r - 1]) {
                        *x -= p;
                    }
                }
                prop_assert!(vec_inf(&img) <= tau);
            }
        }
        let entries = dec.entries();
        for w in entries.windows(2) {
            prop_assert!((w[0].value.re, w[0].value.im) <= (w[1].value.re, w[1].value.im));
        }
    }

    #[test]
    fn lifting_intertwines_condensed_and_join(spec in join(5, 6), v in prop::collection::vec(complex(), 5)) {
        let d = spec.d();
        let v = &v[..d];
        let sizes = spec.sizes();
        let a = spec.to_dense().unwrap();
        let lhs = a.mul_vec(&tensor_expand(v, &sizes).unwrap());
        let rhs = tensor_expand(&spec.condensed_matrix().as_matrix().mul_vec(v), &sizes).unwrap();
        let err = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * (1.0 + a.norm_inf()));
    }

    #[test]
    fn trace_identities(spec in join(5, 8)) {
        let a = spec.to_dense().unwrap();
        let tol = 1e-8 * (1.0 + a.norm_inf().powi(2));
        let eig = spec.full_spectrum().unwrap().eigenvalues();
        let s1: C64 = eig.iter().sum();
        let s2: C64 = eig.iter().map(|z| z * z).sum();
        prop_assert!((s1 - a.trace()).norm() <= tol);
        prop_assert!((s2 - a.mul(&a).trace()).norm() <= tol);
    }

    #[test]
    fn reduced_char_poly_factorization(spec in join(4, 5), x in complex()) {
        // det(xI - A) = pbar(x) * prod_j (x - lambda_j) over the circulant eigenvalues
        let x = x * c(3.0);
        let a = spec.to_dense().unwrap();
        let lhs = na_det(&a.shifted(x)) * if spec.n() % 2 == 0 { c(1.0) } else { c(-1.0) };
        let dec = spec.full_spectrum().unwrap();
        let rhs = spec.reduced_char_poly().eval(x)
            * dec.circulant_pairs().iter().map(|p| x - p.eigenvalue).product::<C64>();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * (1.0 + lhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn small_eigenvalues_match_trace_and_det(m in square(6)) {
        let sm = SmallMatrix::new(m.clone()).unwrap();
        let eig = eigenvalues(&sm, &EigenSettings::default()).unwrap();
        let norm = m.norm_inf();
        prop_assert_eq!(eig.iter().map(|e| e.multiplicity).sum::<usize>(), m.nrows());
        let sum: C64 = eig.iter().map(|e| e.value * c(e.multiplicity as f64)).sum();
        prop_assert!((sum - m.trace()).norm() <= 1e-9 * (1.0 + norm));
        let prod: C64 = eig.iter().map(|e| e.value.powu(e.multiplicity as u32)).product();
        let det = na_det(&m);
        // well-conditioned only
        let sigma_min = na_singular_values(&m).into_iter().fold(f64::INFINITY, f64::min);
        if sigma_min > 1e-3 {
            prop_assert!((prod - det).norm() <= 1e-7 * det.norm());
        }
    }

    #[test]
    fn small_eigenvalues_similarity_invariant(m in square(6), seed in square(6)) {
        let n = m.nrows();
        let q = unitary(&CMatrix::from_fn(n, n, |r, s| seed[(r % seed.nrows(), s % seed.nrows())] + if r == s { c(2.0) } else { c(0.0) }));
        let conj = q.mul(&m).mul(&q.adjoint());
        let flat = |mat: &CMatrix| -> Vec<C64> {
            eigenvalues(&SmallMatrix::new(mat.clone()).unwrap(), &EigenSettings::default())
                .unwrap()
                .iter()
                .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
                .collect()
        };
        let dist = multiset_distance(&flat(&m), &flat(&conj)).unwrap();
        prop_assert!(dist <= 1e-7 * (1.0 + m.norm_inf()), "distance {dist:e}");
    }

    #[test]
    fn undirected_joins_have_real_spectra(parts in prop::collection::vec(undirected_part(), 1..4)) {
        let spec = graphs::join(&parts).unwrap();
        for z in spec.full_spectrum().unwrap().eigenvalues() {
            prop_assert!(z.im.abs() <= 1e-9, "{z}");
        }
    }

    #[test]
    fn complete_joins_are_complete(a in 1..12usize, b in 1..12usize) {
        let spec = graphs::join(&[graphs::complete_graph(a).unwrap(), graphs::complete_graph(b).unwrap()]).unwrap();
        let n = a + b;
        let mut expected = vec![c(n as f64 - 1.0)];
        expected.extend(std::iter::repeat_n(c(-1.0), n - 1));
        let got = spec.full_spectrum().unwrap().eigenvalues();
        prop_assert!(multiset_distance(&got, &expected).unwrap() <= 1e-10);
    }

    #[test]
    fn cycle_removal_matches_closed_form(k in 3..12usize, extra in 1..10usize, directed: bool) {
        let n = k + extra;
        let spec = graphs::remove_cycle_from_complete(n, k, directed).unwrap();
        let got = spec.full_spectrum().unwrap().eigenvalues();
        let expected = graphs::cycle_removal_spectrum(n, k, directed);
        prop_assert!(multiset_distance(&got, &expected).unwrap() <= 1e-8);
    }

    #[test]
    fn document_round_trip(spec in join(4, 6)) {
        let once = JoinDocument::new(spec.clone()).emit();
        let parsed = JoinDocument::parse(&once).unwrap();
        prop_assert_eq!(&parsed.spec, &spec);
        prop_assert_eq!(parsed.emit(), once);
    }

    #[test]
    fn kuramoto_phase_shift_invariance(
        k in 2..7usize,
        theta in prop::collection::vec(-3.0..3.0f64, 12),
        shift in -10.0..10.0f64,
    ) {
        let spec = graphs::join(&[graphs::ring_graph(k, 1).unwrap(), graphs::complete_graph(2).unwrap()]).unwrap();
        let n = spec.n();
        let system = KuramotoSystem::new(spec, 0.7).unwrap();
        let theta = &theta[..n];
        let moved: Vec<f64> = theta.iter().map(|x| x + shift).collect();
        let a = system.rhs(theta).unwrap();
        let b = system.rhs(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + system.adjacency_norm_inf()));
        }
    }

    #[test]
    fn twisted_states_are_equilibria(k in 2..9usize, d in 1..4usize, jj in 0..100usize, phis in prop::collection::vec(-3.2..3.2f64, 3)) {
        let spec = JoinSpec::uniform(vec![graphs::ring_graph(k, 1).unwrap().adjacency(); d], c(1.0)).unwrap();
        let system = KuramotoSystem::new(spec, 1.0).unwrap();
        let j = 1 + jj % (k - 1);
        let eq = system.build_twisted_equilibrium(j, &phis[..d]).unwrap();
        prop_assert!(system.check_equilibrium(eq.theta.as_slice(), None).unwrap().is_equilibrium);
    }
}

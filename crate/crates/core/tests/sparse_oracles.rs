mod common;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spem::constants::C0;
use spem::operators::{assemble_explicit_tmz, assemble_implicit_tmz, curl_curl, ImplicitOptions, Pairing};
use spem::sparse::{dominant_eigenvalue, CsrMatrix, LinearSolver, PowerIteration, SolveMethod, SparseError};

use common::{dense, derivatives, grid, kernel};

fn random_triplets(rng: &mut ChaCha8Rng, n: usize, m: usize, count: usize) -> Vec<(usize, usize, f64)> {
    (0..count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..m), rng.gen::<f64>() * 2.0 - 1.0)).collect()
}

fn random_system(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if i != j && rng.gen::<f64>() < density {
                let v = rng.gen::<f64>() * 2.0 - 1.0;
                off += v.abs();
                t.push((i, j, v));
            }
        }
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        t.push((i, i, sign * (off + 0.5 + rng.gen::<f64>())));
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

#[test]
fn triplet_assembly_matches_dense_accumulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = random_triplets(&mut rng, 50, 50, 600);
    let mut want = DMatrix::<f64>::zeros(50, 50);
    for &(i, j, v) in &t {
        want[(i, j)] += v;
    }
    let m = CsrMatrix::from_triplets(50, 50, &t).unwrap();
    assert!((dense(&m) - &want).amax() < 1e-15);
    let mut rev = t.clone();
    rev.reverse();
    assert_eq!(CsrMatrix::from_triplets(50, 50, &rev).unwrap(), m);
    let five = CsrMatrix::from_triplets(1, 2, &[(0, 1, 2.0), (0, 1, 3.0)]).unwrap();
    assert_eq!((five.nnz(), five.get(0, 1)), (1, 5.0));
    assert_eq!(CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap(), CsrMatrix::identity(2));
}

#[test]
fn matvec_matches_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = CsrMatrix::from_triplets(100, 100, &random_triplets(&mut rng, 100, 100, 1000)).unwrap();
    let x: Vec<f64> = (0..100).map(|_| rng.gen::<f64>() - 0.5).collect();
    let want = dense(&m) * DVector::from_column_slice(&x);
    let got = m.matvec(&x).unwrap();
    let err = (DVector::from_vec(got) - &want).norm() / want.norm();
    assert!(err < 1e-13, "{err}");
    assert_eq!(CsrMatrix::zeros(3, 3).matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    assert!(matches!(m.matvec(&[1.0]), Err(SparseError::DimensionMismatch { .. })));
}

#[test]
fn hundred_random_systems_meet_the_residual_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let n = 5 + case % 40;
        let a = random_system(&mut rng, n, 0.15);
        let b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        for method in [SolveMethod::Direct, SolveMethod::BiCgStab { tol: 1e-10, max_iter: 1000 }] {
            let x = LinearSolver::prepare(&a, method).unwrap().solve(&b).unwrap();
            let r = a.matvec(&x).unwrap();
            let res = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * bn, "case {case} {method:?}: {res}");
        }
    }
}

#[test]
fn sparse_solve_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_system(&mut rng, 80, 0.08);
    let b: Vec<f64> = (0..80).map(|_| rng.gen::<f64>()).collect();
    let want = dense(&a).lu().solve(&DVector::from_column_slice(&b)).unwrap();
    let x = LinearSolver::prepare(&a, SolveMethod::Direct).unwrap().solve(&b).unwrap();
    assert!(common::max_diff(&x, want.as_slice()) < 1e-8);
    let d = CsrMatrix::diagonal(&[2.0, 4.0]);
    assert_eq!(LinearSolver::prepare(&d, SolveMethod::Direct).unwrap().solve(&[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    assert_eq!(LinearSolver::prepare(&d, SolveMethod::Direct).unwrap().solve(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    let zero = CsrMatrix::from_triplets(1, 1, &[(0, 0, 0.0)]).unwrap();
    assert!(matches!(LinearSolver::prepare(&zero, SolveMethod::Direct), Err(SparseError::Singular(0))));
}

#[test]
fn implicit_system_of_a_small_cloud_solves_to_round_off() {
    let cloud = grid(5, 5, 0.01);
    let d = derivatives(&cloud, Pairing::Adjoint);
    let dt = 4.0 * 0.01 / (2.0 * C0);
    let ops = assemble_implicit_tmz(&cloud, &d, &kernel(), dt, ImplicitOptions::default(), None).unwrap();
    let b: Vec<f64> = (0..25).map(|i| (i as f64 * 0.7).sin()).collect();
    let x = LinearSolver::prepare(&ops.a, SolveMethod::Direct).unwrap().solve(&b).unwrap();
    let r = ops.a.matvec(&x).unwrap();
    let rel = common::max_diff(&r, &b) / common::max_abs(&b);
    assert!(rel <= 1e-12, "{rel}");
}

#[test]
fn power_iteration_on_simple_matrices() {
    let cfg = PowerIteration::default();
    let e = dominant_eigenvalue(&CsrMatrix::diagonal(&[1.0, 2.0, 5.0]), &cfg).unwrap();
    assert!((e.value - 5.0).abs() < 1e-8 * 5.0);
    assert_eq!(dominant_eigenvalue(&CsrMatrix::zeros(4, 4), &cfg).unwrap().value, 0.0);
    let again = dominant_eigenvalue(&CsrMatrix::diagonal(&[1.0, 2.0, 5.0]), &cfg).unwrap();
    assert_eq!(e, again);
}

#[test]
fn power_iteration_matches_dense_eigensolver_on_curl_curl() {
    for (n, pairing) in [(4, Pairing::Adjoint), (4, Pairing::Corrected), (6, Pairing::Adjoint)] {
        let cloud = grid(n, n, 0.01);
        let ops = assemble_explicit_tmz(&cloud, &derivatives(&cloud, pairing)).unwrap();
        let g = curl_curl(&ops).unwrap();
        let eig = dense(&g).complex_eigenvalues();
        let top = eig.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        assert!(top.im.abs() < 1e-9 * top.norm(), "dominant eigenvalue is complex: {top}");
        let est = dominant_eigenvalue(&g, &PowerIteration::default()).unwrap();
        assert!((est.value - top.re).abs() < 1e-6 * top.re, "{n} {pairing:?}: {} vs {}", est.value, top.re);
    }
}

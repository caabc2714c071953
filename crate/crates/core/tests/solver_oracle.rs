//! Preconditioned CG against a dense Cholesky oracle.

mod common;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use shelldyn::solver::{pcg, solve, SolverSettings};
use shelldyn::sparse::CsrMatrix;

fn random_spd(rng: &mut rand::rngs::StdRng, n: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0f64..1.0));
    // Sparsify a little so the CSR path sees real structure.
    let b = b.map(|v| if v.abs() < 0.5 { 0.0 } else { v });
    &b * b.transpose() + DMatrix::identity(n, n) * 0.5
}

fn to_csr(a: &DMatrix<f64>) -> CsrMatrix {
    let rows: Vec<Vec<f64>> = (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect();
    CsrMatrix::from_dense(&rows)
}

#[test]
fn pcg_matches_dense_cholesky() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let n = 50;
        let a = random_spd(&mut rng, n);
        let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let exact = a.clone().cholesky().unwrap().solve(&b);
        let settings = SolverSettings {
            tol: 1e-13,
            max_iter: None,
        };
        let (x, report) = solve(&to_csr(&a), b.as_slice(), &vec![0.0; n], &settings).unwrap();
        assert!(report.converged);
        let err = (DVector::from_vec(x) - &exact).norm() / exact.norm();
        assert!(err < 1e-9, "relative error {err:e}");
    }
}

#[test]
fn energy_norm_error_never_increases() {
    let mut rng = common::rng(12);
    let n = 50;
    let a = random_spd(&mut rng, n);
    let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let exact = a.clone().cholesky().unwrap().solve(&b);
    let csr = to_csr(&a);
    let a_norm = |x: &[f64]| {
        let e = DVector::from_column_slice(x) - &exact;
        e.dot(&(&a * &e)).sqrt()
    };
    let mut prev = f64::INFINITY;
    for k in 0..=3 * n {
        let (x, report) = pcg(&csr, b.as_slice(), &vec![0.0; n], 0.0, k).unwrap();
        let e = a_norm(&x);
        assert!(e <= prev * (1.0 + 1e-12) + 1e-14, "iteration {k}: {e:e} > {prev:e}");
        prev = e;
        if report.residual < 1e-15 {
            break;
        }
    }
    assert!(prev < 1e-10 * a_norm(&vec![0.0; n]));
}

#[test]
fn zero_rhs_gives_zero_solution() {
    let a = CsrMatrix::identity(4);
    let (x, report) = pcg(&a, &[0.0; 4], &[1.0; 4], 1e-10, 10).unwrap();
    assert_eq!(x, vec![0.0; 4]);
    assert!(report.converged && report.iterations == 0);
}

#[test]
fn nonconvergence_is_reported() {
    let mut rng = common::rng(13);
    let a = random_spd(&mut rng, 30);
    let b = vec![1.0; 30];
    let settings = SolverSettings {
        tol: 1e-14,
        max_iter: Some(2),
    };
    assert!(solve(&to_csr(&a), &b, &[0.0; 30], &settings).is_err());
    let (_, report) = pcg(&to_csr(&a), &b, &[0.0; 30], 1e-14, 2).unwrap();
    assert!(!report.converged && report.iterations == 2);
}

#[test]
fn zero_diagonal_is_rejected() {
    let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
    assert!(pcg(&a, &[1.0, 1.0], &[0.0, 0.0], 1e-10, 10).is_err());
}

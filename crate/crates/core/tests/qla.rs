use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qram_core::noise::trial_rng;
use qram_core::qla::{
    eigen_oracle, hermitian_embedding, poly_eigen_transform, random_sparse_hermitian, random_unit_vector,
    read_matrix_market, regime_markdown, regime_table, relative_error, stepcount, write_matrix_market, Polynomial,
    QlaError, SparseMatrix, StepModel,
};
use rand::Rng;
use rand_distr::StandardNormal;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli_x() -> SparseMatrix {
    SparseMatrix::from_triplets(2, [(0, 1, c(1.0)), (1, 0, c(1.0))]).unwrap()
}

#[test]
fn pauli_x_by_hand() {
    let e0 = [c(1.0), c(0.0)];
    let x = poly_eigen_transform(&pauli_x(), &e0, &Polynomial::real(&[0.0, 1.0]).unwrap()).unwrap();
    assert_eq!(x.vector, vec![c(0.0), c(1.0)]);
    let x2 = poly_eigen_transform(&pauli_x(), &e0, &Polynomial::real(&[0.0, 0.0, 1.0]).unwrap()).unwrap();
    assert_eq!((x2.vector, x2.matvecs), (vec![c(1.0), c(0.0)], 2));
}

#[test]
fn constant_polynomial_uses_no_products() {
    let v = [c(3.0), c(4.0)];
    let t = poly_eigen_transform(&pauli_x(), &v, &Polynomial::real(&[2.0]).unwrap()).unwrap();
    assert_eq!(t.matvecs, 0);
    assert_eq!(t.norm, 10.0);
    assert_eq!(t.vector, vec![c(0.6), c(0.8)]);
}

#[test]
fn embedding_applies_adjoint() {
    let mut rng = trial_rng(3, 0);
    let a = DMatrix::from_fn(5, 5, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let h = SparseMatrix::from_dense(&hermitian_embedding(&a)).unwrap();
    h.check_hermitian().unwrap();
    let u = random_unit_vector(5, &mut rng);
    let mut v = u.clone();
    v.extend(std::iter::repeat_n(c(0.0), 5));
    let t = poly_eigen_transform(&h, &v, &Polynomial::real(&[0.0, 1.0]).unwrap()).unwrap();
    let direct = a.adjoint() * nalgebra::DVector::from_column_slice(&u);
    let norm = direct.norm();
    let mut want = vec![c(0.0); 5];
    want.extend(direct.iter().map(|x| x / norm));
    assert!(relative_error(&t.vector, &want) < 1e-12);
}

#[test]
fn matrix_market_round_trip_preserves_transform() {
    let mut rng = trial_rng(8, 1);
    let h = random_sparse_hermitian(16, 5, &mut rng);
    let v = random_unit_vector(16, &mut rng);
    let back = read_matrix_market(&write_matrix_market(&h)).unwrap();
    let f = Polynomial::real(&[0.5, -1.0, 0.25, 2.0]).unwrap();
    let a = poly_eigen_transform(&h, &v, &f).unwrap();
    let b = poly_eigen_transform(&back, &v, &f).unwrap();
    assert!(relative_error(&a.vector, &b.vector) < 1e-14);
}

#[test]
fn error_cases() {
    let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
    let f = Polynomial::real(&[0.0, 1.0]).unwrap();
    assert!(matches!(eigen_oracle(&m, &[c(1.0), c(0.0)], &f), Err(QlaError::NotHermitian(..))));
    assert!(matches!(poly_eigen_transform(&pauli_x(), &[c(1.0)], &f), Err(QlaError::Dimension { .. })));
    let zero = Polynomial::real(&[0.0, 0.0]).unwrap();
    assert!(matches!(poly_eigen_transform(&pauli_x(), &[c(1.0), c(0.0)], &zero), Err(QlaError::ZeroResult(_))));
    let big = DMatrix::<Complex64>::identity(257, 257);
    assert!(matches!(eigen_oracle(&big, &vec![c(0.0); 257], &f), Err(QlaError::TooLarge(257))));
    assert!(Polynomial::new(vec![]).is_err());
}

#[test]
fn step_models_by_hand() {
    let s = stepcount(1024.0, 4.0, 4096.0, StepModel::Mesh2dSort).unwrap();
    assert_eq!(s.total, 64.0 + 1.0 + 2.0);
    let h = stepcount(1024.0, 4.0, 4096.0, StepModel::HypercubeSort).unwrap();
    assert_eq!(h.total, 144.0 + 1.0 + 2.0);
    assert!("bogus".parse::<StepModel>().is_err());
    assert_eq!("mesh2d_sort".parse::<StepModel>().unwrap(), StepModel::Mesh2dSort);
}

#[test]
fn regime_markdown_layout() {
    let md = regime_markdown(&regime_table(4096.0, 4.0, 8.0).unwrap());
    let lines: Vec<&str> = md.lines().collect();
    assert!(lines.contains(&"| Scale | Free wires | Instant communication | Sparse Matrices | Dense Matrices |"));
    assert_eq!(lines.iter().filter(|l| l.starts_with("| ")).count(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_matches_oracle(n in 2usize..40, k in 1usize..6, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let h = random_sparse_hermitian(n, 3, &mut rng);
        let v = random_unit_vector(n, &mut rng);
        let coeffs: Vec<f64> = (0..=k).map(|_| rng.sample(StandardNormal)).collect();
        let f = Polynomial::real(&coeffs).unwrap();
        let fast = poly_eigen_transform(&h, &v, &f).unwrap();
        let slow = eigen_oracle(&h.to_dense(), &v, &f).unwrap();
        prop_assert_eq!(fast.matvecs, k);
        prop_assert!(relative_error(&fast.vector, &slow) < 1e-9);
    }

    #[test]
    fn matvec_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let mut rng = trial_rng(seed, 1);
        let h = random_sparse_hermitian(12, 4, &mut rng);
        let (x, y) = (random_unit_vector(12, &mut rng), random_unit_vector(12, &mut rng));
        let comb: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a * alpha + b).collect();
        let lhs = h.matvec(&comb);
        let rhs: Vec<Complex64> = h.matvec(&x).iter().zip(h.matvec(&y)).map(|(a, b)| a * alpha + b).collect();
        prop_assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}

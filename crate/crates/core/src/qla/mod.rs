//! Classical side of polynomial eigenvalue transforms: the exact sparse
//! transform, a dense eigendecomposition oracle, and parallel step-count
//! models for a matrix-vector product.

mod io;
mod steps;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use steps::{regime_table, regime_markdown, stepcount, Advantage, Regime, RegimeReport, StepCount, StepModel, Term};

#[derive(Debug, Error)]
pub enum QlaError {
    #[error("matrix is not Hermitian: |H[{0},{1}] - conj(H[{1},{0}])| = {2:e}")]
    NotHermitian(usize, usize, f64),
    #[error("dimension mismatch: matrix is {matrix}, vector is {vector}")]
    Dimension { matrix: usize, vector: usize },
    #[error("f(H)v vanishes (norm {0:e}); normalization undefined")]
    ZeroResult(f64),
    #[error("dense oracle is limited to 256x256, got {0}")]
    TooLarge(usize),
    #[error("index ({0},{1}) outside a {2}x{2} matrix")]
    Index(usize, usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Threshold below which `f(H)v` is treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-12;

/// Row-compressed square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    /// Per row, `(column, value)` sorted by column with no duplicates.
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    /// Duplicate coordinates are summed; explicit zeros are dropped.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Result<Self, QlaError> {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(QlaError::Index(i, j, n));
            }
            rows[i].push((j, v));
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|e| e.1 != Complex64::new(0.0, 0.0));
            *row = merged;
        }
        Ok(SparseMatrix { n, rows })
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Result<Self, QlaError> {
        if m.nrows() != m.ncols() {
            return Err(QlaError::Invalid(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        let n = m.nrows();
        Self::from_triplets(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, m[(i, j)])))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    /// Largest number of nonzeros in any row or column.
    pub fn sparsity(&self) -> usize {
        let mut cols = vec![0usize; self.n];
        for (_, j, _) in self.triplets() {
            cols[j] += 1;
        }
        self.rows.iter().map(Vec::len).chain(cols).max().unwrap_or(0)
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1)
            .unwrap_or_default()
    }

    pub fn check_hermitian(&self) -> Result<(), QlaError> {
        for (i, j, v) in self.triplets() {
            let gap = (v - self.get(j, i).conj()).norm();
            if gap > HERMITIAN_TOL * v.norm().max(1.0) {
                return Err(QlaError::NotHermitian(i, j, gap));
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// `Hv`, with each row summed left to right regardless of threading.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .par_iter()
            .map(|row| row.iter().fold(Complex64::new(0.0, 0.0), |acc, &(j, a)| acc + a * v[j]))
            .collect()
    }

    pub fn scale(&mut self, s: f64) {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 /= s;
            }
        }
    }

    /// Power-iteration estimate of the spectral norm from a fixed start
    /// vector: stops after `max_iter` steps or when successive estimates
    /// differ by less than `tol` (relative).
    pub fn norm_estimate(&self, max_iter: usize, tol: f64) -> f64 {
        if self.n == 0 || self.nnz() == 0 {
            return 0.0;
        }
        let mut rng = crate::noise::trial_rng(0x6e6f726d, 0);
        let mut v: Vec<Complex64> = (0..self.n).map(|_| Complex64::new(rng.random::<f64>() + 0.5, 0.0)).collect();
        normalize(&mut v);
        let mut est = 0.0;
        for _ in 0..max_iter {
            let mut w = self.matvec(&v);
            let next = normalize(&mut w);
            if next == 0.0 {
                return est;
            }
            let done = (next - est).abs() <= tol * next;
            est = next;
            v = w;
            if done {
                break;
            }
        }
        est
    }

    /// Divides by the 50-step power-iteration norm estimate when it exceeds
    /// 1 and returns the factor used (1 when unchanged).
    pub fn rescale_to_unit_norm(&mut self) -> f64 {
        let est = self.norm_estimate(50, 1e-8);
        if est > 1.0 {
            self.scale(est);
            est
        } else {
            1.0
        }
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// `f(x) = Σ_j a_j x^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, QlaError> {
        if coeffs.is_empty() {
            return Err(QlaError::Invalid("polynomial needs at least one coefficient".into()));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self, QlaError> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    /// `|f(x)| ≤ 1` on `samples` evenly spaced points of `[−1, 1]`.
    pub fn bounded_on_unit_interval(&self, samples: usize) -> bool {
        let s = samples.max(2);
        (0..s).all(|i| self.eval(-1.0 + 2.0 * i as f64 / (s - 1) as f64).norm() <= 1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transformed {
    pub vector: Vec<Complex64>,
    pub matvecs: usize,
    /// `‖f(H)v‖₂` before normalization.
    pub norm: f64,
}

/// `f(H)v / ‖f(H)v‖₂` using exactly `deg f` sparse products: each power
/// `H^j v` is formed from the previous one, added to a running total with
/// weight `a_j`, then dropped.
pub fn poly_eigen_transform(h: &SparseMatrix, v: &[Complex64], f: &Polynomial) -> Result<Transformed, QlaError> {
    if v.len() != h.dim() {
        return Err(QlaError::Dimension { matrix: h.dim(), vector: v.len() });
    }
    let mut total: Vec<Complex64> = v.iter().map(|&x| f.coeffs[0] * x).collect();
    let mut power = v.to_vec();
    let mut matvecs = 0;
    for &a in &f.coeffs[1..] {
        power = h.matvec(&power);
        matvecs += 1;
        total.iter_mut().zip(&power).for_each(|(t, &p)| *t += a * p);
    }
    let norm = norm2(&total);
    if norm <= ZERO_NORM {
        return Err(QlaError::ZeroResult(norm));
    }
    total.iter_mut().for_each(|x| *x /= norm);
    Ok(Transformed { vector: total, matvecs, norm })
}

/// Definitional `f(H)v`: eigendecompose, apply `f` to each eigenvalue,
/// reconstruct, normalize.
pub fn eigen_oracle(h: &DMatrix<Complex64>, v: &[Complex64], f: &Polynomial) -> Result<Vec<Complex64>, QlaError> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(QlaError::Invalid("matrix is not square".into()));
    }
    if n > 256 {
        return Err(QlaError::TooLarge(n));
    }
    if v.len() != n {
        return Err(QlaError::Dimension { matrix: n, vector: v.len() });
    }
    for i in 0..n {
        for j in 0..=i {
            let gap = (h[(i, j)] - h[(j, i)].conj()).norm();
            if gap > HERMITIAN_TOL * h[(i, j)].norm().max(1.0) {
                return Err(QlaError::NotHermitian(i, j, gap));
            }
        }
    }
    let eig = h.clone().symmetric_eigen();
    let fl = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| f.eval(l)));
    let coords = eig.eigenvectors.adjoint() * DVector::from_column_slice(v);
    let out = &eig.eigenvectors * coords.component_mul(&fl);
    let norm = out.norm();
    if norm <= ZERO_NORM {
        return Err(QlaError::ZeroResult(norm));
    }
    Ok(out.iter().map(|x| x / norm).collect())
}

/// `[[0, A], [A†, 0]]`, Hermitian for any square `A`.
pub fn hermitian_embedding(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (r, c) = a.shape();
    let mut m = DMatrix::zeros(r + c, r + c);
    m.view_mut((0, r), (r, c)).copy_from(a);
    m.view_mut((r, 0), (c, r)).copy_from(&a.adjoint());
    m
}

/// Random Hermitian matrix with about `d` nonzeros per row, rescaled to
/// unit spectral norm by power iteration.
pub fn random_sparse_hermitian(n: usize, d: usize, rng: &mut impl Rng) -> SparseMatrix {
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, Complex64::new(rng.sample(StandardNormal), 0.0)));
        for _ in 0..d.saturating_sub(1) / 2 {
            let j = rng.random_range(0..n);
            if j == i {
                continue;
            }
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            trip.push((i, j, z));
            trip.push((j, i, z.conj()));
        }
    }
    let mut h = SparseMatrix::from_triplets(n, trip).expect("indices in range");
    h.rescale_to_unit_norm();
    h
}

pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    normalize(&mut v);
    v
}

/// Relative ℓ₂ distance `‖a − b‖ / ‖b‖`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&diff) / norm2(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::trial_rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_polynomial_needs_no_products() {
        let h = SparseMatrix::from_triplets(3, [(0, 1, c(0.5)), (1, 0, c(0.5))]).unwrap();
        let v = vec![c(3.0), c(0.0), c(4.0)];
        let r = poly_eigen_transform(&h, &v, &Polynomial::real(&[2.0]).unwrap()).unwrap();
        assert_eq!(r.matvecs, 0);
        assert_eq!(r.vector, vec![c(0.6), c(0.0), c(0.8)]);
    }

    #[test]
    fn identity_matrix_linear_polynomial() {
        let h = SparseMatrix::from_triplets(2, [(0, 0, c(1.0)), (1, 1, c(1.0))]).unwrap();
        let v = vec![c(1.0), Complex64::new(0.0, 1.0)];
        let r = poly_eigen_transform(&h, &v, &Polynomial::real(&[0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(r.matvecs, 1);
        assert!(relative_error(&r.vector, &[c(0.5f64.sqrt()), Complex64::new(0.0, 0.5f64.sqrt())]) < 1e-15);
    }

    #[test]
    fn zero_result_is_an_error() {
        let h = SparseMatrix::from_triplets(2, [(0, 0, c(1.0))]).unwrap();
        // f(x) = x on a vector in the kernel
        let err = poly_eigen_transform(&h, &[c(0.0), c(1.0)], &Polynomial::real(&[0.0, 1.0]).unwrap());
        assert!(matches!(err, Err(QlaError::ZeroResult(_))));
    }

    #[test]
    fn diagonal_oracle_is_entrywise() {
        let d = [0.5, -0.25, 0.75];
        let h = DMatrix::from_diagonal(&DVector::from_iterator(3, d.iter().map(|&x| c(x))));
        let f = Polynomial::real(&[0.1, 0.0, 1.0]).unwrap();
        let v = vec![c(1.0), c(1.0), c(1.0)];
        let got = eigen_oracle(&h, &v, &f).unwrap();
        let mut want: Vec<Complex64> = d.iter().map(|&x| c(0.1 + x * x)).collect();
        normalize(&mut want);
        assert!(relative_error(&got, &want) < 1e-12);
    }

    #[test]
    fn oracle_rejects_non_hermitian() {
        let h = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(eigen_oracle(&h, &[c(1.0), c(0.0)], &Polynomial::real(&[1.0]).unwrap()), Err(QlaError::NotHermitian(..))));
    }

    #[test]
    fn projector_from_constructed_spectrum() {
        // spectrum {−0.8, −0.6, 0.6, 0.8} in a random unitary basis;
        // f = 1/2 + a x + b x^3 is 1 on the positive and 0 on the negative
        // eigenvalues, so f(H) projects onto the positive eigenspace
        let mut rng = trial_rng(5, 0);
        let q = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).qr().q();
        let lam = [-0.8, -0.6, 0.6, 0.8];
        let h = &q * DMatrix::from_diagonal(&DVector::from_iterator(4, lam.iter().map(|&x| c(x)))) * q.adjoint();
        let b = (0.5 - 0.5 * 0.8 / 0.6) / (0.512 - 0.216 * 0.8 / 0.6);
        let a = (0.5 - 0.216 * b) / 0.6;
        let f = Polynomial::real(&[0.5, a, 0.0, b]).unwrap();
        let v: Vec<Complex64> = (q.column(0) * c(0.5) + q.column(2) * c(0.5) + q.column(3) * Complex64::new(0.0, 0.5f64.sqrt()))
            .iter()
            .cloned()
            .collect();
        let got = eigen_oracle(&h, &v, &f).unwrap();
        let mut want: Vec<Complex64> =
            (q.column(2) * c(0.5) + q.column(3) * Complex64::new(0.0, 0.5f64.sqrt())).iter().cloned().collect();
        normalize(&mut want);
        assert!(relative_error(&got, &want) < 1e-10);
        let sparse = SparseMatrix::from_dense(&h).unwrap();
        let fast = poly_eigen_transform(&sparse, &v, &f).unwrap();
        assert!(relative_error(&fast.vector, &want) < 1e-10);
    }

    #[test]
    fn embedding_eigenvalues_are_signed_singular_values() {
        let mut rng = trial_rng(8, 0);
        let a = DMatrix::from_fn(6, 6, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let mut eig: Vec<f64> = hermitian_embedding(&a).symmetric_eigenvalues().iter().cloned().collect();
        let sv = a.singular_values();
        let mut want: Vec<f64> = sv.iter().flat_map(|&s| [s, -s]).collect();
        eig.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (x, y) in eig.iter().zip(&want) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rescaled_matrix_has_unit_norm() {
        let mut rng = trial_rng(3, 0);
        let h = random_sparse_hermitian(64, 6, &mut rng);
        h.check_hermitian().unwrap();
        let exact = h.to_dense().symmetric_eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((exact - 1.0).abs() < 1e-3, "{exact}");
    }

    #[test]
    fn matvec_does_not_depend_on_thread_count() {
        let mut rng = trial_rng(4, 0);
        let h = random_sparse_hermitian(128, 8, &mut rng);
        let v = random_unit_vector(128, &mut rng);
        let f = Polynomial::real(&[0.1, -0.2, 0.3, 0.4, -0.5]).unwrap();
        let many = poly_eigen_transform(&h, &v, &f).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| poly_eigen_transform(&h, &v, &f).unwrap());
        assert_eq!(many, one);
    }

    #[test]
    fn bounded_check() {
        assert!(Polynomial::real(&[0.0, 0.5, 0.0, 0.5]).unwrap().bounded_on_unit_interval(101));
        assert!(!Polynomial::real(&[0.5, 0.0, 1.0]).unwrap().bounded_on_unit_interval(101));
    }
}

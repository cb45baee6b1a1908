//! Reference implementations used to cross-check the library.
//!
//! None of these reuse library code paths: the graph is rebuilt from an edge
//! list, exponentials come from a truncated Taylor series, and spectra come
//! from nalgebra's dense eigensolvers.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use num_complex::Complex64;

/// Laplacian of the ring with extra `j ↔ j ± m` bonds, built bond by bond.
pub fn edge_list_hamiltonian(n: usize, m: usize) -> Array2<f64> {
    let mut edges = Vec::new();
    for j in 0..n {
        edges.push((j, (j + 1) % n));
    }
    for j in 0..n {
        edges.push((j, (j + m) % n));
    }
    let mut h = Array2::<f64>::zeros((n, n));
    for (a, b) in edges {
        h[[a, b]] -= 1.0;
        h[[b, a]] -= 1.0;
        h[[a, a]] += 1.0;
        h[[b, b]] += 1.0;
    }
    h
}

fn taylor<T>(a: &Array2<T>, norm: f64, one: T, scale: impl Fn(T, f64) -> T) -> Array2<T>
where
    T: ndarray::LinalgScalar,
{
    let n = a.nrows();
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let factor = 2f64.powi(-squarings);
    let small = a.mapv(|v| scale(v, factor));
    let ident = Array2::from_diag_elem(n, one);
    let mut term = ident.clone();
    let mut sum = ident;
    for k in 1..=30 {
        term = term.dot(&small).mapv(|v| scale(v, 1.0 / k as f64));
        sum = sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// `exp(A)` by Taylor series with scaling and squaring.
pub fn taylor_expm(a: &Array2<f64>) -> Array2<f64> {
    let norm = a.rows().into_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    taylor(a, norm, 1.0, |v, c| v * c)
}

/// Complex `exp(A)` by Taylor series with scaling and squaring.
pub fn taylor_expm_complex(a: &Array2<Complex64>) -> Array2<Complex64> {
    let norm = a.rows().into_iter().map(|r| r.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max);
    taylor(a, norm, Complex64::new(1.0, 0.0), |v, c| v * c)
}

fn to_dmatrix<T: nalgebra::Scalar + Copy>(a: &Array2<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Ascending eigenvalues and orthonormal eigenvectors (as columns).
pub fn symmetric_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let eig = SymmetricEigen::new(to_dmatrix(a));
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Array2::from_shape_fn((a.nrows(), a.nrows()), |(r, c)| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a general complex matrix from its complex Schur form.
pub fn complex_eigenvalues(a: &Array2<Complex64>) -> Vec<Complex64> {
    to_dmatrix(a)
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect()
}

/// `exp(-i t H)` for symmetric `H` from its eigendecomposition.
pub fn eigen_unitary(values: &[f64], vectors: &Array2<f64>, t: f64) -> Array2<Complex64> {
    let n = values.len();
    Array2::from_shape_fn((n, n), |(k, j)| {
        (0..n)
            .map(|l| Complex64::from_polar(vectors[[k, l]] * vectors[[j, l]], -t * values[l]))
            .sum()
    })
}

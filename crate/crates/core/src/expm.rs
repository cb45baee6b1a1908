//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants (Higham 2005, "The Scaling and Squaring Method for the
//! Matrix Exponential Revisited").
//!
//! Generic over `f64` and `Complex64` so the classical and quantum trapped
//! generators share one kernel.

use std::ops::Neg;

use ndarray::{Array2, LinalgScalar};
use num_complex::Complex64;

/// Field element the exponential is defined over.
pub trait Scalar: LinalgScalar + Neg<Output = Self> + Send + Sync {
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn modulus(self) -> f64 {
        self.norm()
    }
}

// (degree, 1-norm threshold) pairs from Higham's Table 2.3
const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
pub fn norm_1<T: Scalar>(a: &Array2<T>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|&v| v.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T: Scalar>(a: &Array2<T>, c: f64) -> Array2<T> {
    let c = T::from_f64(c);
    a.mapv(|v| v * c)
}

fn identity<T: Scalar>(n: usize) -> Array2<T> {
    Array2::from_diag_elem(n, T::one())
}

fn axpy<T: Scalar>(acc: &mut Array2<T>, c: f64, x: &Array2<T>) {
    let c = T::from_f64(c);
    acc.zip_mut_with(x, |a, &b| *a = *a + c * b);
}

/// `(U, V)` with `r(A) = (V − U)^{-1} (V + U)` for degrees 3..=9.
fn pade_low<T: Scalar>(a: &Array2<T>, coeffs: &[f64]) -> (Array2<T>, Array2<T>) {
    let n = a.nrows();
    let a2 = a.dot(a);
    let mut powers = vec![identity::<T>(n), a2.clone()];
    while powers.len() < coeffs.len() / 2 {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u_inner = Array2::<T>::zeros((n, n));
    let mut v = Array2::<T>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        axpy(&mut u_inner, coeffs[2 * k + 1], p);
        axpy(&mut v, coeffs[2 * k], p);
    }
    (a.dot(&u_inner), v)
}

fn pade13<T: Scalar>(a: &Array2<T>) -> (Array2<T>, Array2<T>) {
    let n = a.nrows();
    let b = &B13;
    let ident = identity::<T>(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let mut u_hi = scaled(&a6, b[13]);
    axpy(&mut u_hi, b[11], &a4);
    axpy(&mut u_hi, b[9], &a2);
    let mut u_inner = a6.dot(&u_hi);
    axpy(&mut u_inner, b[7], &a6);
    axpy(&mut u_inner, b[5], &a4);
    axpy(&mut u_inner, b[3], &a2);
    axpy(&mut u_inner, b[1], &ident);
    let u = a.dot(&u_inner);

    let mut v_hi = scaled(&a6, b[12]);
    axpy(&mut v_hi, b[10], &a4);
    axpy(&mut v_hi, b[8], &a2);
    let mut v = a6.dot(&v_hi);
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    axpy(&mut v, b[0], &ident);
    (u, v)
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
fn solve<T: Scalar>(mut a: Array2<T>, mut b: Array2<T>) -> Array2<T> {
    let n = a.nrows();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[[i, col]].modulus().total_cmp(&a[[j, col]].modulus()))
            .expect("non-empty column");
        if pivot != col {
            for k in 0..n {
                a.swap([col, k], [pivot, k]);
            }
            for k in 0..b.ncols() {
                b.swap([col, k], [pivot, k]);
            }
        }
        let diag = a[[col, col]];
        for row in col + 1..n {
            let factor = a[[row, col]] / diag;
            if factor.modulus() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[[col, k]];
                a[[row, k]] = a[[row, k]] - factor * v;
            }
            for k in 0..b.ncols() {
                let v = b[[col, k]];
                b[[row, k]] = b[[row, k]] - factor * v;
            }
        }
    }
    for row in (0..n).rev() {
        let diag = a[[row, row]];
        for k in 0..b.ncols() {
            let mut acc = b[[row, k]];
            for c in row + 1..n {
                acc = acc - a[[row, c]] * b[[c, k]];
            }
            b[[row, k]] = acc / diag;
        }
    }
    b
}

/// `exp(A)` for a square matrix.
pub fn expm<T: Scalar>(a: &Array2<T>) -> Array2<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    let norm = norm_1(a);
    for &(degree, theta) in &THETA[..4] {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, coeffs);
            return solve(&v - &u, &v + &u);
        }
    }
    let theta13 = THETA[4].1;
    let squarings = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a_scaled = scaled(a, 2f64.powi(-squarings));
    let (u, v) = pade13(&a_scaled);
    let mut result = solve(&v - &u, &v + &u);
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// `exp(c · A)` for a real scale factor `c`.
pub fn expm_scaled<T: Scalar>(a: &Array2<T>, c: f64) -> Array2<T> {
    expm(&scaled(a, c))
}

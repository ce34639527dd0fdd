//! Haar-distributed unitary matrices via Householder QR.

use num_complex::Complex;
use rand::Rng;

use crate::channel::complex_gaussian;
use crate::Scalar;

/// Row-major square complex matrix.
pub(crate) type Matrix<T> = Vec<Vec<Complex<T>>>;

/// Householder QR of a square matrix. Returns `(Q, R)` with `A = Q R`.
pub(crate) fn householder_qr<T: Scalar>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.len();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let mut r = a.clone();
    let mut q: Matrix<T> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one } else { zero }).collect())
        .collect();

    for k in 0..n.saturating_sub(1) {
        let x_norm = (k..n).fold(T::zero(), |s, i| s + r[i][k].norm_sqr()).sqrt();
        if x_norm == T::zero() {
            continue;
        }
        let x0 = r[k][k];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { one };
        let alpha = -phase * x_norm;

        let mut v: Vec<Complex<T>> = (k..n).map(|i| r[i][k]).collect();
        v[0] -= alpha;
        let v_norm2 = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        if v_norm2 == T::zero() {
            continue;
        }

        // R <- (I - 2 v v† / |v|²) R
        for j in k..n {
            let s: Complex<T> = v.iter().enumerate().map(|(i, vi)| vi.conj() * r[k + i][j]).sum();
            let f = s * (two / v_norm2);
            for (i, vi) in v.iter().enumerate() {
                r[k + i][j] -= vi * f;
            }
        }
        // Q <- Q (I - 2 v v† / |v|²)
        for row in q.iter_mut() {
            let s: Complex<T> = v.iter().enumerate().map(|(i, vi)| row[k + i] * vi).sum();
            let f = s * (two / v_norm2);
            for (i, vi) in v.iter().enumerate() {
                row[k + i] -= f * vi.conj();
            }
        }
        for i in (k + 1)..n {
            r[i][k] = zero;
        }
    }
    (q, r)
}

/// Columns of an `n × n` Haar unitary.
///
/// QR of a complex Ginibre matrix, with column `j` of `Q` rotated by the
/// phase of `R[j][j]` so that the factorization is unique.
pub(crate) fn haar_columns<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<Complex<T>>> {
    let a: Matrix<T> = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let (q, r) = householder_qr(&a);
    (0..n)
        .map(|j| {
            let d = r[j][j];
            let mag = d.norm();
            let phase = if mag > T::zero() {
                d / mag
            } else {
                Complex::new(T::one(), T::zero())
            };
            (0..n).map(|i| q[i][j] * phase).collect()
        })
        .collect()
}

//! Minimal dense matrices over a generic scalar ring.
//!
//! nalgebra is used where complex linear algebra is needed (eigenvalues, SVD, LU);
//! this type exists so the operator algebra can run unchanged over jets.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::scalar::{Jet1, Scalar, C64};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self, s: S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Kronecker product; `self` is the more significant factor.
    pub fn kron(&self, other: &Mat<S>) -> Mat<S> {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        let mut out = Vec::with_capacity(self.rows);
        for row in self.data.chunks_exact(self.cols) {
            let mut acc = S::zero();
            for (a, x) in row.iter().zip(v) {
                acc = acc + *a * *x;
            }
            out.push(acc);
        }
        out
    }

    /// Largest component magnitude over all entries.
    pub fn max_mag(&self) -> f64 {
        self.data.iter().map(|x| x.mag()).fold(0.0, f64::max)
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Add for &Mat<S> {
    type Output = Mat<S>;
    fn add(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &Mat<S> {
    type Output = Mat<S>;
    fn sub(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mat<C64> {
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn commutator(&self, other: &Mat<C64>) -> Mat<C64> {
        &(self * other) - &(other * self)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Mat<Jet1> {
    /// Split a jet matrix into its value and derivative parts.
    pub fn split(&self) -> (Mat<C64>, Mat<C64>) {
        let val = Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|j| j.val).collect(),
        };
        let der = Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|j| j.der).collect(),
        };
        (val, der)
    }

    pub fn promote(m: &Mat<C64>) -> Mat<Jet1> {
        Mat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&c| Jet1::constant(c)).collect(),
        }
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product, conjugate-linear in the first argument.
pub fn vec_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_close;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = Mat::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let b = Mat::from_fn(2, 2, |i, j| c(1.0, (i * j) as f64));
        let p = &a * &b;
        for i in 0..2 {
            for j in 0..2 {
                let want = a[(i, 0)] * b[(0, j)] + a[(i, 1)] * b[(1, j)];
                assert!(rel_close(p[(i, j)], want, 1e-14));
            }
        }
    }

    #[test]
    fn kron_ordering_is_first_factor_most_significant() {
        let a = Mat::from_fn(2, 2, |i, j| c((10 * i + j) as f64, 0.0));
        let b = Mat::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 6);
        // block (i, j) of the kron sits at rows i*3.., cols j*3..
        assert!(rel_close(k[(1, 4)], a[(0, 1)], 1e-14));
        assert!(rel_close(k[(3, 0)], a[(1, 0)], 1e-14));
        assert!(rel_close(k[(5, 2)], a[(1, 0)], 1e-14));
    }

    #[test]
    fn jet_matrix_product_splits_to_leibniz_rule() {
        let a_val = Mat::from_fn(2, 2, |i, j| c(i as f64 + 0.3, j as f64));
        let a_der = Mat::from_fn(2, 2, |i, j| c(0.1 * j as f64, -0.2 * i as f64));
        let b_val = Mat::from_fn(2, 2, |i, j| c(1.0 - i as f64, 0.5 * j as f64));
        let b_der = Mat::from_fn(2, 2, |i, j| c(0.7, (i + j) as f64 * 0.1));
        let a = Mat::from_fn(2, 2, |i, j| Jet1::new(a_val[(i, j)], a_der[(i, j)]));
        let b = Mat::from_fn(2, 2, |i, j| Jet1::new(b_val[(i, j)], b_der[(i, j)]));
        let (pv, pd) = (&a * &b).split();
        let want_val = &a_val * &b_val;
        let want_der = &(&a_val * &b_der) + &(&a_der * &b_val);
        assert!((&pv - &want_val).fro_norm() < 1e-13);
        assert!((&pd - &want_der).fro_norm() < 1e-13);
    }
}

//! Small dense matrices over any [`Scalar`].
//!
//! Everything here is sized for Lie algebras of dimension at most eight, so
//! the algorithms are the textbook ones (Gauss-Jordan, cofactor-free
//! elimination). Spectral work on floats goes through `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
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
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
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

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Frobenius inner product `tr(selfᵗ other)`.
    pub fn frobenius_dot(&self, other: &Self) -> S {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.frobenius_dot(self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn symmetric_part(&self) -> Self {
        let half = S::from_ratio(1, 2);
        (self + &self.transpose()).scale(&half)
    }

    pub fn skew_part(&self) -> Self {
        let half = S::from_ratio(1, 2);
        (self - &self.transpose()).scale(&half)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Determinant by Gaussian elimination with magnitude pivoting.
    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| m[(a, col)].magnitude().total_cmp(&m[(b, col)].magnitude()))
                .unwrap();
            if m[(pivot, col)].is_zero() {
                return S::zero();
            }
            if pivot != col {
                m.swap_rows(pivot, col);
                det = -det;
            }
            let p = m[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = m[(r, col)].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m[(col, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when a pivot falls below `tol`.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| m[(a, col)].magnitude().total_cmp(&m[(b, col)].magnitude()))
                .unwrap();
            if m[(pivot, col)].is_negligible(tol) || m[(pivot, col)].is_zero() {
                return None;
            }
            m.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] = m[(col, c)].clone() / p.clone();
                inv[(col, c)] = inv[(col, c)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m[(r, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let a = m[(col, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - a;
                    let b = inv[(col, c)].clone() * f.clone();
                    inv[(r, c)] = inv[(r, c)].clone() - b;
                }
            }
        }
        Some(inv)
    }

    /// Row rank by elimination; entries with modulus `<= tol` count as zero.
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = (rank..self.rows)
                .max_by(|&a, &b| m[(a, col)].magnitude().total_cmp(&m[(b, col)].magnitude()))
                .unwrap();
            if m[(pivot, col)].is_negligible(tol) {
                continue;
            }
            m.swap_rows(pivot, rank);
            let p = m[(rank, col)].clone();
            for r in rank + 1..self.rows {
                let f = m[(r, col)].clone() / p.clone();
                for c in col..self.cols {
                    let v = m[(rank, c)].clone() * f.clone();
                    m[(r, c)] = m[(r, c)].clone() - v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Mat<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Complex eigenvalues of a square matrix.
    pub fn eigenvalues(&self) -> Vec<crate::scalar::C64> {
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 {
            return vec![crate::scalar::C64::new(0.0, 0.0); n];
        }
        // Unshifted QR can stall on exactly degenerate spectra; retry with a shift.
        for shift in [0.0, 0.37 * scale, -1.13 * scale] {
            let m = (self + &Mat::identity(n).scale(&shift)).to_dmatrix();
            if let Some(schur) = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000) {
                return schur.complex_eigenvalues().iter().map(|z| z - shift).collect();
            }
        }
        vec![crate::scalar::C64::new(f64::NAN, f64::NAN); n]
    }

    /// Symmetric positive-definiteness via Cholesky.
    pub fn is_positive_definite(&self) -> bool {
        self.is_square()
            && (self - &self.transpose()).max_abs() <= 1e-10 * (1.0 + self.max_abs())
            && self.to_dmatrix().cholesky().is_some()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.to_dmatrix().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Orthonormal basis of the right null space; singular values below
    /// `rel_tol * sigma_max` count as zero.
    pub fn null_space(&self, rel_tol: f64) -> Vec<Vec<f64>> {
        // Pad to a square system so the SVD exposes every right singular vector.
        let n = self.cols;
        let rows = self.rows.max(n);
        let mut padded = DMatrix::<f64>::zeros(rows, n);
        for i in 0..self.rows {
            for j in 0..n {
                padded[(i, j)] = self[(i, j)];
            }
        }
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cutoff = rel_tol * smax.max(f64::MIN_POSITIVE);
        let mut basis = Vec::new();
        for (k, s) in svd.singular_values.iter().enumerate() {
            if *s <= cutoff || smax == 0.0 {
                basis.push(v_t.row(k).iter().copied().collect());
            }
        }
        basis
    }
}

impl<S: Scalar> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Add for &Mat<S> {
    type Output = Mat<S>;
    fn add(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &Mat<S> {
    type Output = Mat<S>;
    fn sub(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Neg for &Mat<S> {
    type Output = Mat<S>;
    fn neg(self) -> Mat<S> {
        self.map(|x| -x.clone())
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Serialized as a list of rows.
impl serde::Serialize for Mat<f64> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.row(i))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn eigenvalues_of_degenerate_matrices() {
        assert_eq!(Mat::<f64>::zeros(4, 4).eigenvalues().len(), 4);
        let ev = Mat::diagonal(&[1.0, 1.0, -1.0, -1.0]).eigenvalues();
        let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.total_cmp(b));
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_inverse_round_trips() {
        let m: Mat<Rational> = Mat::from_rows(&[
            vec![rat(2, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 3), rat(0, 1), rat(-1, 1)],
            vec![rat(0, 1), rat(5, 2), rat(1, 1)],
        ]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(&m * &inv, Mat::identity(3));
        assert_eq!(m.det(), rat(14, 3));
    }

    #[test]
    fn rank_and_null_space() {
        let m = Mat::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        assert_eq!(m.rank(1e-12), 1);
        let ns = m.null_space(1e-9);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(m.inverse(1e-12).is_none());
        assert_eq!(m.det(), 0.0);
    }
}

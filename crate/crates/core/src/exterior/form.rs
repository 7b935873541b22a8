use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Scalar, C64};

/// Index subsets are stored as bitmasks; bit `i` is the (0-based) covector `e^{i+1}`.
pub type Mask = u32;

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All masks of `degree` bits below `dim`, in increasing numeric (colex) order.
pub fn basis_masks(dim: usize, degree: usize) -> Vec<Mask> {
    assert!(dim <= 31, "dimension too large");
    let mut out = Vec::with_capacity(binom(dim, degree));
    if degree > dim {
        return out;
    }
    if degree == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack enumerates equal-popcount masks in increasing order.
    let mut m: u64 = (1u64 << degree) - 1;
    let limit = 1u64 << dim;
    while m < limit {
        out.push(m as Mask);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

/// Colex rank of a mask among masks of equal popcount.
pub fn mask_rank(mask: Mask) -> usize {
    let mut rank = 0;
    let mut t = 1;
    let mut m = mask;
    while m != 0 {
        let pos = m.trailing_zeros() as usize;
        rank += binom(pos, t);
        t += 1;
        m &= m - 1;
    }
    rank
}

pub fn mask_indices(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Sign of `e^A ∧ e^B` relative to `e^{A∪B}`, or `None` when the sets overlap.
pub fn wedge_sign(a: Mask, b: Mask) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut m = b;
    while m != 0 {
        let j = m.trailing_zeros();
        inversions += (a >> j).count_ones();
        m &= m - 1;
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// Sorts an index sequence; returns the mask and the permutation sign, or
/// `None` on repeated indices.
pub fn sort_indices(seq: &[usize]) -> Option<(Mask, i32)> {
    let mut mask: Mask = 0;
    let mut sign = 1;
    for (pos, &i) in seq.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        let later_smaller = seq[pos + 1..].iter().filter(|&&j| j < i).count();
        if later_smaller % 2 == 1 {
            sign = -sign;
        }
    }
    Some((mask, sign))
}

/// A homogeneous exterior form on a `dim`-dimensional space with dense
/// coefficients over the basis `e^I`, `I` strictly increasing.
#[derive(Clone, PartialEq)]
pub struct GradedForm<S> {
    dim: usize,
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> GradedForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, coeffs: vec![S::zero(); binom(dim, degree)] }
    }

    pub fn constant(dim: usize, value: S) -> Self {
        Self { dim, degree: 0, coeffs: vec![value] }
    }

    /// `coef · e^{i_1} ∧ … ∧ e^{i_k}` for 0-based indices in any order.
    pub fn monomial(dim: usize, indices: &[usize], coef: S) -> Self {
        let mut f = Self::zero(dim, indices.len());
        if let Some((mask, sign)) = sort_indices(indices) {
            assert!(indices.iter().all(|&i| i < dim), "index out of range");
            f.coeffs[mask_rank(mask)] = if sign > 0 { coef } else { -coef };
        }
        f
    }

    /// The basis covector `e^{i+1}`.
    pub fn covector(dim: usize, i: usize) -> Self {
        Self::monomial(dim, &[i], S::one())
    }

    /// A one-form from its components.
    pub fn from_components(components: &[S]) -> Self {
        Self { dim: components.len(), degree: 1, coeffs: components.to_vec() }
    }

    /// A two-form from an antisymmetric matrix, `α = Σ_{i<j} m_ij e^{ij}`.
    pub fn from_antisymmetric(m: &Mat<S>) -> Self {
        let dim = m.rows();
        let mut f = Self::zero(dim, 2);
        for (r, mask) in basis_masks(dim, 2).into_iter().enumerate() {
            let idx = mask_indices(mask);
            f.coeffs[r] = m[(idx[0], idx[1])].clone();
        }
        f
    }

    /// Antisymmetric matrix `m_ij = α(e_i, e_j)` of a two-form.
    pub fn to_antisymmetric(&self) -> Mat<S> {
        assert_eq!(self.degree, 2, "to_antisymmetric needs a two-form");
        let mut m = Mat::zeros(self.dim, self.dim);
        for (mask, c) in self.iter() {
            let idx = mask_indices(mask);
            m[(idx[0], idx[1])] = c.clone();
            m[(idx[1], idx[0])] = -c.clone();
        }
        m
    }

    pub fn from_coefficients(dim: usize, degree: usize, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), binom(dim, degree), "coefficient count");
        Self { dim, degree, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient on `e^{i_1…i_k}` for 0-based indices in any order.
    pub fn get(&self, indices: &[usize]) -> S {
        assert_eq!(indices.len(), self.degree, "index count must equal degree");
        match sort_indices(indices) {
            Some((mask, sign)) => {
                let c = self.coeffs[mask_rank(mask)].clone();
                if sign > 0 {
                    c
                } else {
                    -c
                }
            }
            None => S::zero(),
        }
    }

    pub fn coeff_of_mask(&self, mask: Mask) -> &S {
        &self.coeffs[mask_rank(mask)]
    }

    pub fn add_to_mask(&mut self, mask: Mask, value: S) {
        let r = mask_rank(mask);
        self.coeffs[r] = self.coeffs[r].clone() + value;
    }

    /// `(mask, coefficient)` pairs in basis order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (Mask, &S)> + '_ {
        basis_masks(self.dim, self.degree).into_iter().zip(self.coeffs.iter())
    }

    /// Non-zero terms as (0-based index tuple, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, S)> {
        self.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (mask_indices(m), c.clone()))
            .collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GradedForm<T> {
        GradedForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> GradedForm<C64> {
        self.map(Scalar::to_c64)
    }

    pub fn conj(&self) -> Self {
        self.map(Scalar::conj)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(tol))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "incompatible forms");
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Exterior product; errors on dimension mismatch.
    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.dim, degree);
        let rhs_terms: Vec<(Mask, &S)> = other.iter().filter(|(_, c)| !c.is_zero()).collect();
        for (ma, ca) in self.iter() {
            if ca.is_zero() {
                continue;
            }
            for &(mb, cb) in &rhs_terms {
                if let Some(sign) = wedge_sign(ma, mb) {
                    let v = ca.clone() * cb.clone();
                    out.add_to_mask(ma | mb, if sign > 0 { v } else { -v });
                }
            }
        }
        Ok(out)
    }

    /// Exterior product. Panics on dimension mismatch; see [`Self::try_wedge`].
    pub fn wedge(&self, other: &Self) -> Self {
        self.try_wedge(other).expect("wedge of forms on different spaces")
    }

    /// `k`-th exterior power.
    pub fn power(&self, k: usize) -> Self {
        let mut out = Self::constant(self.dim, S::one());
        for _ in 0..k {
            out = out.wedge(self);
        }
        out
    }

    /// Evaluates the form on `degree` vectors (determinant convention,
    /// `e^{12}(X, Y) = X_1 Y_2 − X_2 Y_1`).
    pub fn evaluate(&self, vectors: &[Vec<S>]) -> S {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        let mut acc = S::zero();
        for (mask, c) in self.iter() {
            if c.is_zero() {
                continue;
            }
            let idx = mask_indices(mask);
            let m = Mat::from_fn(self.degree, self.degree, |r, s| vectors[s][idx[r]].clone());
            acc = acc + c.clone() * m.det();
        }
        acc
    }

    /// Pull-back by a linear map `P` acting on vectors: `(P^*α)(X, …) = α(PX, …)`.
    pub fn pullback(&self, p: &Mat<S>) -> Self {
        let cols: Vec<Vec<S>> = (0..self.dim).map(|j| p.column(j)).collect();
        let mut out = Self::zero(self.dim, self.degree);
        for (r, mask) in basis_masks(self.dim, self.degree).into_iter().enumerate() {
            let args: Vec<Vec<S>> = mask_indices(mask).into_iter().map(|j| cols[j].clone()).collect();
            out.coeffs[r] = self.evaluate(&args);
        }
        out
    }

    /// Renders with a custom covector letter, e.g. `"f"` for `2 f^{12} - f^{34}`.
    pub fn display_with(&self, letter: &str) -> String
    where
        S: fmt::Display,
    {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .into_iter()
            .map(|(idx, c)| {
                let label: String = if self.dim <= 9 {
                    idx.iter().map(|i| (i + 1).to_string()).collect()
                } else {
                    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
                };
                if self.degree == 0 {
                    format!("{c}")
                } else {
                    format!("({c}) {letter}^{{{label}}}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl GradedForm<C64> {
    pub fn re(&self) -> GradedForm<f64> {
        GradedForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.re).collect() }
    }

    pub fn im(&self) -> GradedForm<f64> {
        GradedForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.im).collect() }
    }
}

impl<S: Scalar> Add for &GradedForm<S> {
    type Output = GradedForm<S>;
    fn add(self, rhs: &GradedForm<S>) -> GradedForm<S> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }
}

impl<S: Scalar> Sub for &GradedForm<S> {
    type Output = GradedForm<S>;
    fn sub(self, rhs: &GradedForm<S>) -> GradedForm<S> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }
}

impl<S: Scalar> Neg for &GradedForm<S> {
    type Output = GradedForm<S>;
    fn neg(self) -> GradedForm<S> {
        self.map(|c| -c.clone())
    }
}

impl<S: Scalar> fmt::Debug for GradedForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedForm(dim={}, degree={}) {{", self.dim, self.degree)?;
        for (idx, c) in self.terms() {
            let label: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, " [{}]: {:?};", label.join(","), c)?;
        }
        write!(f, " }}")
    }
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::differential::{apply_matrix, differential_matrix, j_derivation_matrix};
use crate::exterior::form::GradedForm;
use crate::lie::LieAlgebra;
use crate::linalg::Mat;
use crate::scalar::{Scalar, C64};

/// Tolerance on the Nijenhuis tensor below which `J` counts as integrable.
pub const NIJENHUIS_TOL: f64 = 1e-9;

/// Projectors onto the `(p, k−p)` components of degree-`k` forms.
///
/// Built as Lagrange polynomials in the derivation `D` induced by `J`, which
/// acts on `(p, q)`-forms by `i(p − q)`.
pub fn type_projectors(j: &Mat<f64>, k: usize) -> Vec<Mat<C64>> {
    let d = j_derivation_matrix(j, k).map(|x| C64::new(*x, 0.0));
    let n = d.rows();
    let eig = |p: usize| C64::new(0.0, 2.0 * p as f64 - k as f64);
    (0..=k)
        .map(|p| {
            let mut proj = Mat::identity(n);
            for p2 in 0..=k {
                if p2 == p {
                    continue;
                }
                let shifted = &d - &Mat::identity(n).scale(&eig(p2));
                proj = (&proj * &shifted).scale(&(C64::new(1.0, 0.0) / (eig(p) - eig(p2))));
            }
            proj
        })
        .collect()
}

/// Components of a form by bidegree `(p, q)`.
#[derive(Clone, Debug)]
pub struct ComplexTypeDecomposition {
    pub components: BTreeMap<(usize, usize), GradedForm<C64>>,
}

impl ComplexTypeDecomposition {
    pub fn get(&self, p: usize, q: usize) -> Option<&GradedForm<C64>> {
        self.components.get(&(p, q))
    }

    pub fn sum(&self) -> Option<GradedForm<C64>> {
        let mut it = self.components.values();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, f| &acc + f))
    }
}

pub fn type_decomposition<S: Scalar>(j: &Mat<f64>, alpha: &GradedForm<S>) -> ComplexTypeDecomposition {
    let k = alpha.degree();
    let a = alpha.to_c64();
    let components = type_projectors(j, k)
        .iter()
        .enumerate()
        .map(|(p, proj)| ((p, k - p), apply_matrix(proj, &a, k)))
        .collect();
    ComplexTypeDecomposition { components }
}

/// `α^{1,1} = ½(α + Jα)` for a real two-form.
pub fn one_one_part(j: &Mat<f64>, alpha: &GradedForm<f64>) -> GradedForm<f64> {
    let ja = crate::exterior::differential::apply_j(j, alpha);
    (alpha + &ja).scale(&0.5)
}

/// Dolbeault operators of an integrable complex structure, as matrices per degree.
#[derive(Clone, Debug)]
pub struct Dolbeault {
    dim: usize,
    d: Vec<Mat<C64>>,
    del: Vec<Mat<C64>>,
    delbar: Vec<Mat<C64>>,
}

impl Dolbeault {
    pub fn new(l: &LieAlgebra<f64>, j: &Mat<f64>) -> Result<Self> {
        let residual = l.nijenhuis_residual(j);
        if residual > NIJENHUIS_TOL {
            return Err(Error::NonIntegrable { residual });
        }
        let dim = l.dim();
        let projectors: Vec<Vec<Mat<C64>>> = (0..=dim).map(|k| type_projectors(j, k)).collect();
        let mut d = Vec::with_capacity(dim);
        let mut del = Vec::with_capacity(dim);
        let mut delbar = Vec::with_capacity(dim);
        for k in 0..dim {
            let dk = differential_matrix(l, k).map(|x| C64::new(*x, 0.0));
            let rows = dk.rows();
            let mut a = Mat::zeros(rows, dk.cols());
            let mut b = Mat::zeros(rows, dk.cols());
            for p in 0..=k {
                let src = &dk * &projectors[k][p];
                a = &a + &(&projectors[k + 1][p + 1] * &src);
                b = &b + &(&projectors[k + 1][p] * &src);
            }
            d.push(dk);
            del.push(a);
            delbar.push(b);
        }
        Ok(Self { dim, d, del, delbar })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrices on degree `k` (mapping to degree `k + 1`). Degree `dim` maps to zero.
    pub fn d_matrix(&self, k: usize) -> &Mat<C64> {
        &self.d[k]
    }

    pub fn del_matrix(&self, k: usize) -> &Mat<C64> {
        &self.del[k]
    }

    pub fn delbar_matrix(&self, k: usize) -> &Mat<C64> {
        &self.delbar[k]
    }

    fn apply(&self, ms: &[Mat<C64>], alpha: &GradedForm<C64>) -> GradedForm<C64> {
        let k = alpha.degree();
        if k >= self.dim {
            return GradedForm::zero(self.dim, k + 1);
        }
        apply_matrix(&ms[k], alpha, k + 1)
    }

    pub fn d(&self, alpha: &GradedForm<C64>) -> GradedForm<C64> {
        self.apply(&self.d, alpha)
    }

    pub fn del(&self, alpha: &GradedForm<C64>) -> GradedForm<C64> {
        self.apply(&self.del, alpha)
    }

    pub fn delbar(&self, alpha: &GradedForm<C64>) -> GradedForm<C64> {
        self.apply(&self.delbar, alpha)
    }

    /// Residual of `d = ∂ + ∂̄` over all degrees (zero for integrable `J`).
    pub fn splitting_residual(&self) -> f64 {
        (0..self.dim)
            .map(|k| (&self.d[k] - &(&self.del[k] + &self.delbar[k])).max_abs())
            .fold(0.0, f64::max)
    }
}

/// `(∂α, ∂̄α)`; fails when `J` is not integrable.
pub fn dolbeault_split<S: Scalar>(
    l: &LieAlgebra<f64>,
    j: &Mat<f64>,
    alpha: &GradedForm<S>,
) -> Result<(GradedForm<C64>, GradedForm<C64>)> {
    if alpha.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: alpha.dim() });
    }
    let dol = Dolbeault::new(l, j)?;
    let a = alpha.to_c64();
    Ok((dol.del(&a), dol.delbar(&a)))
}

/// The `(1,0)`-forms `α^k = e^k + i e^{2n+1−k}` of an adapted basis (0-based `k < n`).
pub fn adapted_one_zero_forms(n: usize) -> Vec<GradedForm<C64>> {
    let dim = 2 * n;
    (0..n)
        .map(|k| {
            let mut f = GradedForm::zero(dim, 1);
            f.add_to_mask(1 << k, C64::new(1.0, 0.0));
            f.add_to_mask(1 << (dim - 1 - k), C64::new(0.0, 1.0));
            f
        })
        .collect()
}

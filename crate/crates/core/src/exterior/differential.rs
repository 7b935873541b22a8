use crate::error::{Error, Result};
use crate::exterior::form::{basis_masks, mask_indices, mask_rank, wedge_sign, GradedForm};
use crate::lie::LieAlgebra;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Chevalley–Eilenberg differential, `dα(X, Y) = −α([X, Y])` on one-forms,
/// extended as a graded derivation.
pub fn ce_differential<S: Scalar>(l: &LieAlgebra<S>, alpha: &GradedForm<S>) -> Result<GradedForm<S>> {
    if alpha.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: alpha.dim() });
    }
    let dim = l.dim();
    let structure = l.structure_forms();
    let mut out = GradedForm::zero(dim, alpha.degree() + 1);
    if alpha.degree() >= dim {
        return Ok(out);
    }
    for (mask, coef) in alpha.iter() {
        if coef.is_zero() {
            continue;
        }
        let idx = mask_indices(mask);
        for (t, &i) in idx.iter().enumerate() {
            let before: u32 = idx[..t].iter().fold(0, |m, &x| m | (1 << x));
            let after: u32 = idx[t + 1..].iter().fold(0, |m, &x| m | (1 << x));
            let sign_t = if t % 2 == 0 { 1 } else { -1 };
            for (pmask, pc) in structure[i].iter() {
                if pc.is_zero() {
                    continue;
                }
                let Some(s1) = wedge_sign(before, pmask) else { continue };
                let Some(s2) = wedge_sign(before | pmask, after) else { continue };
                let v = coef.clone() * pc.clone();
                out.add_to_mask(before | pmask | after, if sign_t * s1 * s2 > 0 { v } else { -v });
            }
        }
    }
    Ok(out)
}

/// Matrix of a linear map from degree `from` forms to some fixed degree,
/// column `r` being the image of the `r`-th basis form.
pub fn operator_matrix<S: Scalar>(
    dim: usize,
    from: usize,
    to: usize,
    f: impl Fn(&GradedForm<S>) -> GradedForm<S>,
) -> Mat<S> {
    let masks = basis_masks(dim, from);
    let cols: Vec<Vec<S>> = masks
        .iter()
        .map(|&m| {
            let mut e = GradedForm::zero(dim, from);
            e.add_to_mask(m, S::one());
            let img = f(&e);
            assert_eq!(img.degree(), to, "operator changed degree unexpectedly");
            img.into_coefficients()
        })
        .collect();
    let rows = basis_masks(dim, to).len();
    Mat::from_fn(rows, masks.len(), |i, j| cols[j][i].clone())
}

/// Applies an operator matrix to a form, producing a form of degree `to`.
pub fn apply_matrix<S: Scalar>(m: &Mat<S>, alpha: &GradedForm<S>, to: usize) -> GradedForm<S> {
    GradedForm::from_coefficients(alpha.dim(), to, m.mul_vec(alpha.coefficients()))
}

/// Matrix of `d` on degree-`k` forms.
pub fn differential_matrix<S: Scalar>(l: &LieAlgebra<S>, k: usize) -> Mat<S> {
    operator_matrix(l.dim(), k, k + 1, |e| ce_differential(l, e).expect("dimensions agree"))
}

/// `J` acting on forms as the algebra automorphism with `Jα = −α(J·)` on
/// one-forms; on a `(p, q)`-form it is multiplication by `i^{q−p}`.
pub fn apply_j<S: Scalar>(j: &Mat<S>, alpha: &GradedForm<S>) -> GradedForm<S> {
    let p = alpha.pullback(j);
    if alpha.degree().is_multiple_of(2) {
        p
    } else {
        -&p
    }
}

/// The derivation `e^i ↦ e^i ∘ J` extended to degree-`k` forms; it acts on
/// `(p, q)`-forms as `i(p − q)`.
pub fn j_derivation_matrix<S: Scalar>(j: &Mat<S>, k: usize) -> Mat<S> {
    let dim = j.rows();
    let masks = basis_masks(dim, k);
    let mut m: Mat<S> = Mat::zeros(masks.len(), masks.len());
    for (col, &mask) in masks.iter().enumerate() {
        let idx = mask_indices(mask);
        for (t, &i) in idx.iter().enumerate() {
            let rest = mask & !(1 << i);
            for l in 0..dim {
                let c = j[(i, l)].clone();
                if c.is_zero() || rest & (1 << l) != 0 {
                    continue;
                }
                // Replace the t-th factor e^i by e^l and re-sort.
                let mut seq = idx.clone();
                seq[t] = l;
                let (new_mask, sign) = crate::exterior::form::sort_indices(&seq).expect("distinct");
                let row = mask_rank(new_mask);
                m[(row, col)] = m[(row, col)].clone() + if sign > 0 { c } else { -c };
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn random_algebra() -> LieAlgebra<Rational> {
        // An almost abelian bracket with rational data is always Jacobi.
        let mut l = LieAlgebra::abelian(5);
        let entries = [[1, 2, 0, -1], [0, -1, 3, 1], [2, 1, 1, 0], [-1, 0, 2, 2]];
        for (col, _) in entries.iter().enumerate() {
            let mut img = vec![rat(0, 1); 5];
            for (row, r) in entries.iter().enumerate() {
                img[row] = rat(r[col], 3);
            }
            l.set_bracket(4, col, &img);
        }
        l
    }

    #[test]
    fn d_squared_vanishes_exactly() {
        let l = random_algebra();
        assert_eq!(l.jacobi_residual(), 0.0);
        for k in 0..4 {
            let d0 = differential_matrix(&l, k);
            let d1 = differential_matrix(&l, k + 1);
            assert!((&d1 * &d0).as_slice().iter().all(|x| *x == rat(0, 1)), "degree {k}");
        }
    }

    #[test]
    fn d_squared_detects_jacobi_failure() {
        let mut l: LieAlgebra<Rational> = LieAlgebra::abelian(3);
        // so(3)-like brackets with one coefficient perturbed break Jacobi.
        l.set_bracket(0, 1, &[rat(0, 1), rat(0, 1), rat(1, 1)]);
        l.set_bracket(1, 2, &[rat(1, 1), rat(0, 1), rat(0, 1)]);
        l.set_bracket(2, 0, &[rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(l.jacobi_residual(), 0.0);
        l.set_bracket(0, 2, &[rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert!(l.jacobi_residual() > 0.0);
        let dd = &differential_matrix(&l, 1) * &differential_matrix(&l, 0);
        let dd1 = &differential_matrix(&l, 2) * &differential_matrix(&l, 1);
        assert!(dd.max_abs() > 0.0 || dd1.max_abs() > 0.0);
    }

    #[test]
    fn derivation_eigenvalues_on_standard_j() {
        let j = crate::lie::standard_j::<f64>(4);
        let d1 = j_derivation_matrix(&j, 1);
        // (D)^2 = -1 on one-forms
        let sq = &(&d1 * &d1) + &Mat::identity(4);
        assert!(sq.max_abs() < 1e-15);
    }
}

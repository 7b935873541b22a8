use crate::error::{Error, Result};
use crate::exterior::differential::operator_matrix;
use crate::exterior::form::{basis_masks, mask_indices, wedge_sign, GradedForm};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Applies a real operator matrix to a form over any scalar field.
pub fn apply_real<S: Scalar>(m: &Mat<f64>, alpha: &GradedForm<S>, to: usize) -> GradedForm<S> {
    let c = alpha.coefficients();
    let out: Vec<S> = (0..m.rows())
        .map(|i| {
            (0..m.cols()).fold(S::zero(), |acc, j| {
                let x = m[(i, j)];
                if x == 0.0 {
                    acc
                } else {
                    acc + S::from_f64(x) * c[j].clone()
                }
            })
        })
        .collect();
    GradedForm::from_coefficients(alpha.dim(), to, out)
}

/// Inner products and Hodge star induced by a metric on the algebra.
///
/// The orientation is the basis order: `vol = √det G · e^{1…m}`.
#[derive(Clone, Debug)]
pub struct Metric {
    g: Mat<f64>,
    g_inv: Mat<f64>,
    sqrt_det: f64,
}

impl Metric {
    pub fn new(g: &Mat<f64>) -> Result<Self> {
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let g_inv = g.inverse(0.0).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { g: g.clone(), g_inv, sqrt_det: g.det().sqrt() })
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.g
    }

    pub fn inverse_matrix(&self) -> &Mat<f64> {
        &self.g_inv
    }

    /// Gram matrix of the basis `e^I` of degree-`k` forms:
    /// `⟨e^I, e^J⟩ = det(G⁻¹[I, J])`.
    pub fn gram(&self, k: usize) -> Mat<f64> {
        let masks = basis_masks(self.dim(), k);
        let idx: Vec<Vec<usize>> = masks.iter().map(|&m| mask_indices(m)).collect();
        let n = masks.len();
        let mut out = Mat::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = if k == 0 { 1.0 } else { self.g_inv.submatrix(&idx[a], &idx[b]).det() };
                out[(a, b)] = v;
                out[(b, a)] = v;
            }
        }
        out
    }

    /// Hermitian inner product `⟨α, β⟩ = Σ α_I ⟨e^I, e^J⟩ conj(β_J)`.
    pub fn inner<S: Scalar>(&self, alpha: &GradedForm<S>, beta: &GradedForm<S>) -> S {
        assert_eq!(alpha.degree(), beta.degree(), "inner product of different degrees");
        let h = self.gram(alpha.degree());
        let hb = apply_real(&h, &beta.conj(), beta.degree());
        alpha
            .coefficients()
            .iter()
            .zip(hb.coefficients())
            .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    pub fn norm_sq<S: Scalar>(&self, alpha: &GradedForm<S>) -> f64 {
        self.inner(alpha, alpha).to_c64().re
    }

    pub fn volume(&self) -> GradedForm<f64> {
        let dim = self.dim();
        GradedForm::monomial(dim, &(0..dim).collect::<Vec<_>>(), self.sqrt_det)
    }

    /// Matrix of `∗ : Λ^k → Λ^{m−k}`, fixed by `α ∧ ∗β = ⟨α, β⟩ vol`.
    pub fn star_matrix(&self, k: usize) -> Mat<f64> {
        let dim = self.dim();
        let full: u32 = if dim == 32 { u32::MAX } else { (1u32 << dim) - 1 };
        let h = self.gram(k);
        let from = basis_masks(dim, k);
        let to_len = basis_masks(dim, dim - k).len();
        let mut out = Mat::zeros(to_len, from.len());
        for (a, &mi) in from.iter().enumerate() {
            let comp = full & !mi;
            let sign = wedge_sign(mi, comp).expect("complementary sets") as f64;
            let row = crate::exterior::form::mask_rank(comp);
            for b in 0..from.len() {
                out[(row, b)] = sign * self.sqrt_det * h[(a, b)];
            }
        }
        out
    }

    pub fn hodge_star<S: Scalar>(&self, alpha: &GradedForm<S>) -> GradedForm<S> {
        let k = alpha.degree();
        apply_real(&self.star_matrix(k), alpha, self.dim() - k)
    }
}

/// Hodge star of `α` for the metric `g`, oriented by the basis order.
pub fn hodge_star(alpha: &GradedForm<f64>, g: &Mat<f64>) -> Result<GradedForm<f64>> {
    if alpha.dim() != g.rows() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: alpha.dim() });
    }
    Ok(Metric::new(g)?.hodge_star(alpha))
}

/// Matrix of `γ ↦ β ∧ γ` on degree-`k` forms.
pub fn wedge_matrix(beta: &GradedForm<f64>, k: usize) -> Mat<f64> {
    operator_matrix(beta.dim(), k, k + beta.degree(), |e| beta.wedge(e))
}

/// The two-form `γ` with `ω^p ∧ γ = β` (inverse Lefschetz map), where
/// `ω_power = ω^p` and `β` has degree `2 + 2p`.
pub fn lefschetz_inverse<S: Scalar>(omega_power: &GradedForm<f64>, beta: &GradedForm<S>) -> Result<GradedForm<S>> {
    let deg = omega_power.degree() + 2;
    if beta.degree() != deg {
        return Err(Error::DegreeMismatch { expected: deg, found: beta.degree() });
    }
    let l = wedge_matrix(omega_power, 2);
    if l.rows() != l.cols() {
        return Err(Error::InvalidInput("Lefschetz map is not square in this degree".into()));
    }
    let inv = l.inverse(1e-12).ok_or_else(|| Error::InvalidInput("Lefschetz map is singular".into()))?;
    Ok(apply_real(&inv, beta, 2))
}

/// Metric adjoint of wedging with `β`: `⟨ι_β α, γ⟩ = ⟨α, β ∧ γ⟩`.
pub fn wedge_adjoint<S: Scalar>(metric: &Metric, beta: &GradedForm<f64>, alpha: &GradedForm<S>) -> Result<GradedForm<S>> {
    if alpha.degree() < beta.degree() {
        return Err(Error::DegreeMismatch { expected: beta.degree(), found: alpha.degree() });
    }
    let k = alpha.degree() - beta.degree();
    let w = wedge_matrix(beta, k);
    let h_to = metric.gram(alpha.degree());
    let h_from = metric.gram(k).inverse(0.0).ok_or(Error::NotPositiveDefinite)?;
    let m = &(&h_from * &w.transpose()) * &h_to;
    Ok(apply_real(&m, alpha, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(idx: &[usize]) -> GradedForm<f64> {
        GradedForm::monomial(6, idx, 1.0)
    }

    #[test]
    fn star_examples_identity_metric() {
        let m = Metric::new(&Mat::identity(6)).unwrap();
        assert_eq!(m.hodge_star(&GradedForm::constant(6, 1.0)), e(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(m.hodge_star(&m.hodge_star(&e(&[0]))), -&e(&[0]));
        assert_eq!(m.hodge_star(&e(&[0, 5])), e(&[1, 2, 3, 4]));
    }

    #[test]
    fn star_defining_identity_for_skewed_metric() {
        let g = Mat::from_rows(&[
            vec![2.0, 0.3, 0.0, 0.1],
            vec![0.3, 1.0, 0.2, 0.0],
            vec![0.0, 0.2, 1.5, -0.4],
            vec![0.1, 0.0, -0.4, 1.2],
        ]);
        let m = Metric::new(&g).unwrap();
        let vol = m.volume();
        for k in 0..=4 {
            for &a in &basis_masks(4, k) {
                for &b in &basis_masks(4, k) {
                    let mut x = GradedForm::zero(4, k);
                    x.add_to_mask(a, 1.0);
                    let mut y = GradedForm::zero(4, k);
                    y.add_to_mask(b, 1.0);
                    let lhs = x.wedge(&m.hodge_star(&y));
                    let rhs = vol.scale(&m.inner(&x, &y));
                    assert!((&lhs - &rhs).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lefschetz_inverse_on_standard_structure() {
        let omega = &(&e(&[0, 5]) + &e(&[1, 4])) + &e(&[2, 3]);
        let gamma = lefschetz_inverse(&omega, &e(&[0, 5, 1, 4])).unwrap();
        assert!((&omega.wedge(&gamma) - &e(&[0, 5, 1, 4])).max_abs() < 1e-12);
        let expected = &(&e(&[0, 5]).scale(&0.5) + &e(&[1, 4]).scale(&0.5)) - &e(&[2, 3]).scale(&0.5);
        assert!((&gamma - &expected).max_abs() < 1e-12);
    }
}

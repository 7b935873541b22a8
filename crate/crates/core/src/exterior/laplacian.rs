use crate::error::{Error, Result};
use crate::exterior::complex::Dolbeault;
use crate::exterior::differential::{apply_j, apply_matrix, ce_differential};
use crate::exterior::form::GradedForm;
use crate::exterior::hodge::Metric;
use crate::lie::{HermitianStructure, LieAlgebra};
use crate::linalg::Mat;
use crate::scalar::C64;

/// Metric adjoint of `op : Λ^k → Λ^l` given the Gram matrices of both
/// degrees: `op* = H_k⁻¹ op† H_l`.
pub fn adjoint_operator(op: &Mat<C64>, h_from: &Mat<f64>, h_to: &Mat<f64>) -> Result<Mat<C64>> {
    if op.cols() != h_from.rows() || op.rows() != h_to.rows() {
        return Err(Error::DimensionMismatch { expected: op.cols(), found: h_from.rows() });
    }
    let h_inv = h_from.inverse(0.0).ok_or(Error::NotPositiveDefinite)?;
    let dagger = op.transpose().map(|z| z.conj());
    let c = |m: &Mat<f64>| m.map(|x| C64::new(*x, 0.0));
    Ok(&(&c(&h_inv) * &dagger) * &c(h_to))
}

/// Which adjoint the formal codifferentials use.
///
/// `Hodge` is `∂* = −∗∂̄∗`, `∂̄* = −∗∂∗`: the pointwise formal adjoint of
/// the invariant operator on the group. `Metric` is the adjoint in the
/// finite-dimensional inner product on forms; the two agree exactly when
/// the algebra is unimodular.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdjointKind {
    Hodge,
    Metric,
}

/// Dolbeault operators, adjoints and Laplacians for one Hermitian metric.
#[derive(Clone, Debug)]
pub struct HermitianCalculus {
    dol: Dolbeault,
    metric: Metric,
    j: Mat<f64>,
    kind: AdjointKind,
}

impl HermitianCalculus {
    pub fn new(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>, kind: AdjointKind) -> Result<Self> {
        Self::with_dolbeault(Dolbeault::new(l, &h.j)?, h, kind)
    }

    /// Reuses precomputed Dolbeault matrices (they depend only on `J`).
    pub fn with_dolbeault(dol: Dolbeault, h: &HermitianStructure<f64>, kind: AdjointKind) -> Result<Self> {
        Ok(Self { dol, metric: Metric::new(&h.g)?, j: h.j.clone(), kind })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn dolbeault(&self) -> &Dolbeault {
        &self.dol
    }

    fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn del(&self, a: &GradedForm<C64>) -> Option<GradedForm<C64>> {
        (a.degree() < self.dim()).then(|| self.dol.del(a))
    }

    pub fn delbar(&self, a: &GradedForm<C64>) -> Option<GradedForm<C64>> {
        (a.degree() < self.dim()).then(|| self.dol.delbar(a))
    }

    fn metric_adjoint(&self, ms: &Mat<C64>, a: &GradedForm<C64>) -> GradedForm<C64> {
        let k = a.degree();
        let adj = adjoint_operator(ms, &self.metric.gram(k - 1), &self.metric.gram(k)).expect("consistent shapes");
        apply_matrix(&adj, a, k - 1)
    }

    fn star(&self, a: &GradedForm<C64>) -> GradedForm<C64> {
        self.metric.hodge_star(a)
    }

    pub fn del_star(&self, a: &GradedForm<C64>) -> Option<GradedForm<C64>> {
        let k = a.degree();
        if k == 0 {
            return None;
        }
        Some(match self.kind {
            AdjointKind::Metric => self.metric_adjoint(self.dol.del_matrix(k - 1), a),
            AdjointKind::Hodge => -&self.star(&self.dol.delbar(&self.star(a))),
        })
    }

    pub fn delbar_star(&self, a: &GradedForm<C64>) -> Option<GradedForm<C64>> {
        let k = a.degree();
        if k == 0 {
            return None;
        }
        Some(match self.kind {
            AdjointKind::Metric => self.metric_adjoint(self.dol.delbar_matrix(k - 1), a),
            AdjointKind::Hodge => -&self.star(&self.dol.del(&self.star(a))),
        })
    }

    /// Six-term Bott–Chern Laplacian
    /// `∂∂̄∂̄*∂* + ∂̄*∂*∂∂̄ + ∂̄*∂∂*∂̄ + ∂*∂̄∂̄*∂ + ∂̄*∂̄ + ∂*∂`.
    pub fn bott_chern_laplacian(&self, a: &GradedForm<C64>) -> GradedForm<C64> {
        let terms = [
            self.del_star(a).and_then(|x| self.delbar_star(&x)).and_then(|x| self.delbar(&x)).and_then(|x| self.del(&x)),
            self.delbar(a).and_then(|x| self.del(&x)).and_then(|x| self.del_star(&x)).and_then(|x| self.delbar_star(&x)),
            self.delbar(a).and_then(|x| self.del_star(&x)).and_then(|x| self.del(&x)).and_then(|x| self.delbar_star(&x)),
            self.del(a).and_then(|x| self.delbar_star(&x)).and_then(|x| self.delbar(&x)).and_then(|x| self.del_star(&x)),
            self.delbar(a).and_then(|x| self.delbar_star(&x)),
            self.del(a).and_then(|x| self.del_star(&x)),
        ];
        terms.into_iter().flatten().fold(GradedForm::zero(self.dim(), a.degree()), |acc, t| &acc + &t)
    }

    /// `i∂∂̄α`.
    pub fn i_del_delbar(&self, a: &GradedForm<C64>) -> GradedForm<C64> {
        match self.delbar(a).and_then(|x| self.del(&x)) {
            Some(x) => x.scale(&C64::new(0.0, 1.0)),
            None => GradedForm::zero(self.dim(), a.degree() + 2),
        }
    }

    /// `J` acting on real forms.
    pub fn apply_j(&self, a: &GradedForm<f64>) -> GradedForm<f64> {
        apply_j(&self.j, a)
    }
}

/// `((n−1)!/4) dJd∗dJdω`, which equals `Δ_BC ω^{n−1}` for balanced metrics.
pub fn balanced_bott_chern(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<GradedForm<f64>> {
    let metric = Metric::new(&h.g)?;
    let n = h.complex_dim();
    let d = |x: &GradedForm<f64>| ce_differential(l, x).expect("dimensions agree");
    let jf = |x: &GradedForm<f64>| apply_j(&h.j, x);
    let djd_omega = d(&jf(&d(&h.omega())));
    let res = d(&jf(&d(&metric.hodge_star(&djd_omega))));
    let fact: f64 = (1..n).map(|x| x as f64).product();
    Ok(res.scale(&(fact / 4.0)))
}

/// Bott–Chern Laplacian of a form for `(L, J, G)`, with Hodge-star adjoints.
pub fn bott_chern_laplacian(
    l: &LieAlgebra<f64>,
    h: &HermitianStructure<f64>,
    alpha: &GradedForm<f64>,
) -> Result<GradedForm<C64>> {
    let calc = HermitianCalculus::new(l, h, AdjointKind::Hodge)?;
    Ok(calc.bott_chern_laplacian(&alpha.to_c64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::AlmostAbelianData;

    fn sample() -> (LieAlgebra<f64>, HermitianStructure<f64>) {
        let a = Mat::from_rows(&[
            vec![0.3, 1.0, -0.2, 0.5],
            vec![-1.0, -0.3, 0.7, 0.2],
            vec![-0.2, -0.7, -0.3, 1.0],
            vec![-0.5, 0.2, -1.0, 0.3],
        ]);
        AlmostAbelianData::new(3, 0.0, vec![0.0; 4], AlmostAbelianData::j_commuting_part(&a)).unwrap().to_lie()
    }

    #[test]
    fn metric_adjoint_contract() {
        let (l, h) = sample();
        let g = Mat::from_rows(&[
            vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.5, 0.3, 0.0, 0.0, 0.0],
            vec![0.0, 0.3, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, -0.3, 0.0],
            vec![0.0, 0.0, 0.0, -0.3, 1.5, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 2.0],
        ]);
        let g = (&g + &(&h.j.transpose() * &(&g * &h.j))).scale(&0.5);
        let h = HermitianStructure::new(h.j.clone(), g).unwrap();
        let calc = HermitianCalculus::new(&l, &h, AdjointKind::Metric).unwrap();
        let alpha = &GradedForm::monomial(6, &[0, 3], C64::new(1.0, 0.5)) + &GradedForm::monomial(6, &[2, 5], C64::new(-0.3, 0.0));
        let beta = &GradedForm::monomial(6, &[0, 1, 2], C64::new(0.0, 1.0)) + &GradedForm::monomial(6, &[3, 4, 5], C64::new(2.0, -1.0));
        let lhs = calc.metric().inner(&calc.del(&alpha).unwrap(), &beta);
        let rhs = calc.metric().inner(&alpha, &calc.del_star(&beta).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn adjoint_kinds_agree_when_unimodular() {
        let (l, h) = sample();
        let hodge = HermitianCalculus::new(&l, &h, AdjointKind::Hodge).unwrap();
        let metric = HermitianCalculus::new(&l, &h, AdjointKind::Metric).unwrap();
        let beta = GradedForm::monomial(6, &[0, 1, 4], C64::new(1.0, 0.0));
        let a = hodge.delbar_star(&beta).unwrap();
        let b = metric.delbar_star(&beta).unwrap();
        assert!((&a - &b).max_abs() < 1e-12);
    }
}

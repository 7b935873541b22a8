//! Metric classes of Hermitian almost abelian Lie algebras: Lee form,
//! Ricci forms, the closed `(n,0)`-form obstruction and the
//! balanced/SKT/LCK/Kähler predicates, each with an exterior-calculus recheck.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    adapted_one_zero_forms, apply_j, ce_differential, wedge_matrix, Dolbeault, GradedForm, Metric,
};
use crate::lie::{AlmostAbelianData, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;
use crate::scalar::C64;

/// Relative tolerance for the algebraic predicates on `(a, v, A)`.
pub const PREDICATE_TOL: f64 = 1e-9;
/// Absolute tolerance on form coefficients for oracle rechecks.
pub const ORACLE_TOL: f64 = 1e-10;
/// Absolute tolerance on real parts of eigenvalues in the SKT test.
pub const EIGEN_TOL: f64 = 1e-8;

fn scale_of(d: &AlmostAbelianData) -> f64 {
    1.0 + d.a.abs() + d.v.iter().fold(0.0_f64, |m, x| m.max(x.abs())) + d.a_mat.max_abs()
}

/// Embeds a vector of `n₁` (basis `e_2 … e_{2n−1}`) into the full space.
fn embed_n1(d: &AlmostAbelianData, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * d.n];
    out[1..2 * d.n - 1].copy_from_slice(x);
    out
}

fn one_form(components: &[f64]) -> GradedForm<f64> {
    GradedForm::from_components(components)
}

/// Lee form `θ = (Jv)^♭ − (tr A) e^{2n}` in the adapted basis.
pub fn lee_form(d: &AlmostAbelianData) -> GradedForm<f64> {
    let jv = d.j1().mul_vec(&d.v);
    let mut c = embed_n1(d, &jv);
    c[2 * d.n - 1] = -d.trace_a();
    one_form(&c)
}

/// `−J∗d∗ω` computed by the exterior calculus, for any `(L, J, G)`.
pub fn lee_form_hodge(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<GradedForm<f64>> {
    let metric = Metric::new(&h.g)?;
    let s = metric.hodge_star(&h.omega());
    let ds = ce_differential(l, &s)?;
    Ok(-&apply_j(&h.j, &metric.hodge_star(&ds)))
}

/// The unique `θ` with `dω^{n−1} = θ ∧ ω^{n−1}`, solved as a linear system.
pub fn lee_form_defining(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<GradedForm<f64>> {
    let n = h.complex_dim();
    let wp = h.omega().power(n - 1);
    let rhs = ce_differential(l, &wp)?;
    // Wedging with ω^{n−1} is an isomorphism Λ¹ → Λ^{2n−1}.
    let m = wedge_matrix(&wp, 1);
    let inv = m.inverse(1e-12).ok_or(Error::Unsolvable { residual: f64::INFINITY })?;
    Ok(GradedForm::from_coefficients(h.dim(), 1, inv.mul_vec(rhs.coefficients())))
}

/// Bismut–Ricci form
/// `ρ^B = −(a² − ½a tr A + ‖v‖²) e¹∧e^{2n} − (Aᵗv)^♭ ∧ e^{2n}`.
pub fn ricci_bismut(d: &AlmostAbelianData) -> GradedForm<f64> {
    let dim = 2 * d.n;
    let last = dim - 1;
    let tr = d.trace_a();
    let mut rho = GradedForm::monomial(dim, &[0, last], -(d.a * d.a - 0.5 * d.a * tr + d.v_norm_sq()));
    let atv = d.a_mat.transpose().mul_vec(&d.v);
    let e_last = GradedForm::covector(dim, last);
    let flat = one_form(&embed_n1(d, &atv));
    rho = &rho - &flat.wedge(&e_last);
    rho
}

/// Chern–Ricci form `ρ^C = −a(a + ½ tr A) e¹∧e^{2n}`.
pub fn ricci_chern(d: &AlmostAbelianData) -> GradedForm<f64> {
    let dim = 2 * d.n;
    GradedForm::monomial(dim, &[0, dim - 1], -d.a * (d.a + 0.5 * d.trace_a()))
}

/// `a + tr A_ℂ = a + ½ tr A − (i/2) tr JA`; it vanishes exactly when a
/// closed `(n, 0)`-form exists.
pub fn closed_n0_obstruction(d: &AlmostAbelianData) -> C64 {
    C64::new(d.a + 0.5 * d.trace_a(), -0.5 * d.trace_ja())
}

/// `α^{1…n}` for the adapted `(1,0)`-forms `α^k = e^k + i e^{2n+1−k}`.
pub fn top_holomorphic_form(n: usize) -> GradedForm<C64> {
    adapted_one_zero_forms(n).iter().skip(1).fold(adapted_one_zero_forms(n)[0].clone(), |acc, f| acc.wedge(f))
}

/// `α^{1̄} ∧ α^{1…n}`.
pub fn bar_one_top_form(n: usize) -> GradedForm<C64> {
    adapted_one_zero_forms(n)[0].conj().wedge(&top_holomorphic_form(n))
}

/// `∂̄α^{1…n}` for the structure `μ(a, v, A)`.
pub fn delbar_top_form(d: &AlmostAbelianData) -> Result<GradedForm<C64>> {
    let (l, h) = d.to_lie();
    let dol = Dolbeault::new(&l, &h.j)?;
    Ok(dol.delbar(&top_holomorphic_form(d.n)))
}

/// `‖∂̄α^{1…n} + (i/2)(a + tr A_ℂ) α^{1̄1…n}‖_∞`.
pub fn closed_n0_residual(d: &AlmostAbelianData) -> Result<f64> {
    let lhs = delbar_top_form(d)?;
    let c = closed_n0_obstruction(d) * C64::new(0.0, 0.5);
    Ok((&lhs + &bar_one_top_form(d.n).scale(&c)).max_abs())
}

/// Coefficient of `e^{2…2n−1}` in `ω^{n−1}`, i.e. the restriction of
/// `ω^{n−1}` to `Λ^{2n−2} n₁`.
pub fn omega_power_on_n1(h: &HermitianStructure<f64>) -> f64 {
    let n = h.complex_dim();
    let idx: Vec<usize> = (1..2 * n - 1).collect();
    h.omega().power(n - 1).get(&idx)
}

/// Balanced: `v = 0` and `tr A = 0`. Undefined for `n = 2`, where the
/// condition coincides with Kähler.
pub fn is_balanced(d: &AlmostAbelianData) -> Result<bool> {
    if d.n < 3 {
        return Err(Error::UnsupportedDimension { n: d.n, reason: "balanced condition requires n >= 3" });
    }
    let tol = PREDICATE_TOL * scale_of(d);
    Ok(d.v_norm_sq().sqrt() <= tol && d.trace_a().abs() <= tol)
}

/// Kähler: `v = 0` and `A ∈ u(n₁)`.
pub fn is_kahler(d: &AlmostAbelianData) -> bool {
    let tol = PREDICATE_TOL * scale_of(d);
    d.v_norm_sq().sqrt() <= tol && d.a_plus().max_abs() <= tol
}

/// SKT: `[A, Aᵗ] = 0` and every eigenvalue of `A` has real part `0` or `−a/2`.
pub fn is_skt(d: &AlmostAbelianData) -> bool {
    let tol = PREDICATE_TOL * scale_of(d).powi(2);
    if d.a_mat.commutator(&d.a_mat.transpose()).max_abs() > tol {
        return false;
    }
    d.a_mat
        .eigenvalues()
        .iter()
        .all(|z| z.re.abs() <= EIGEN_TOL || (z.re + 0.5 * d.a).abs() <= EIGEN_TOL)
}

/// LCK test; on success returns the closed one-form `α = θ/(n−1)` with
/// `dω = α ∧ ω`.
pub fn is_lck(d: &AlmostAbelianData) -> (bool, Option<GradedForm<f64>>) {
    let tol = PREDICATE_TOL * scale_of(d);
    let m = 2 * d.n - 2;
    let first = d.n == 2 && d.a_mat.max_abs() <= tol;
    let lambda = d.trace_a() / m as f64;
    let u = &d.a_mat - &Mat::identity(m).scale(&lambda);
    let second = d.v_norm_sq().sqrt() <= tol && u.symmetric_part().max_abs() <= tol;
    if first || second {
        (true, Some(lee_form(d).scale(&(1.0 / (d.n - 1) as f64))))
    } else {
        (false, None)
    }
}

/// Exterior-calculus checks of each metric class for `μ(a, v, A)`.
#[derive(Clone, Debug, Serialize)]
pub struct OracleChecks {
    pub d_omega: f64,
    pub ddbar_omega: f64,
    pub lee_residual: f64,
    pub lck_residual: Option<f64>,
}

pub fn oracle_checks(d: &AlmostAbelianData) -> Result<OracleChecks> {
    let (l, h) = d.to_lie();
    let omega = h.omega();
    let d_omega = ce_differential(&l, &omega)?;
    let dol = Dolbeault::new(&l, &h.j)?;
    let ddbar = dol.del(&dol.delbar(&omega.to_c64()));
    let lee = lee_form_defining(&l, &h)?;
    let (lck, witness) = is_lck(d);
    let lck_residual = if lck {
        let alpha = witness.expect("witness present");
        let r1 = (&d_omega - &alpha.wedge(&omega)).max_abs();
        let r2 = ce_differential(&l, &alpha)?.max_abs();
        Some(r1.max(r2))
    } else {
        None
    };
    Ok(OracleChecks {
        d_omega: d_omega.max_abs(),
        ddbar_omega: ddbar.max_abs(),
        lee_residual: (&lee - &lee_form(d)).max_abs(),
        lck_residual,
    })
}

/// Summary of the metric classes of one Hermitian structure.
#[derive(Clone, Debug, Serialize)]
pub struct MetricClassReport {
    pub n: usize,
    pub kahler: bool,
    /// `None` when `n = 2`.
    pub balanced: Option<bool>,
    pub skt: bool,
    pub lck: bool,
    pub lck_witness: Option<Vec<f64>>,
    pub unimodular: bool,
    pub lee_form: Vec<f64>,
    pub ricci_chern: Vec<(Vec<usize>, f64)>,
    pub ricci_bismut: Vec<(Vec<usize>, f64)>,
    /// `[re, im]` of `a + tr A_ℂ`.
    pub obstruction: [f64; 2],
    pub oracle: OracleChecks,
    /// True when every positive flag is confirmed by the oracle and every
    /// negative flag is contradicted by it.
    pub oracle_agrees: bool,
}

fn one_based_terms(f: &GradedForm<f64>) -> Vec<(Vec<usize>, f64)> {
    f.terms()
        .into_iter()
        .filter(|(_, c)| c.abs() > 0.0)
        .map(|(idx, c)| (idx.into_iter().map(|i| i + 1).collect(), c))
        .collect()
}

pub fn classify(d: &AlmostAbelianData) -> Result<MetricClassReport> {
    let oracle = oracle_checks(d)?;
    let kahler = is_kahler(d);
    let balanced = if d.n >= 3 { Some(is_balanced(d)?) } else { None };
    let skt = is_skt(d);
    let (lck, witness) = is_lck(d);
    let lee = lee_form(d);
    let obstruction = closed_n0_obstruction(d);

    let tol = ORACLE_TOL * scale_of(d).powi(4);
    let lee_norm = lee_form_defining_norm(d)?;
    let agrees = (kahler == (oracle.d_omega <= tol))
        && (skt == (oracle.ddbar_omega <= tol))
        && balanced.is_none_or(|b| b == (lee_norm <= tol))
        && oracle.lee_residual <= tol
        && oracle.lck_residual.is_none_or(|r| r <= tol);

    Ok(MetricClassReport {
        n: d.n,
        kahler,
        balanced,
        skt,
        lck,
        lck_witness: witness.map(|w| w.coefficients().to_vec()),
        unimodular: d.is_unimodular(PREDICATE_TOL * scale_of(d)),
        lee_form: lee.coefficients().to_vec(),
        ricci_chern: one_based_terms(&ricci_chern(d)),
        ricci_bismut: one_based_terms(&ricci_bismut(d)),
        obstruction: [obstruction.re, obstruction.im],
        oracle,
        oracle_agrees: agrees,
    })
}

fn lee_form_defining_norm(d: &AlmostAbelianData) -> Result<f64> {
    let (l, h) = d.to_lie();
    Ok(lee_form_defining(&l, &h)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize, a: f64, v: Vec<f64>, a_mat: Mat<f64>) -> AlmostAbelianData {
        AlmostAbelianData::new(n, a, v, a_mat).unwrap()
    }

    fn sample() -> AlmostAbelianData {
        let m = Mat::from_rows(&[
            vec![0.3, 1.0, -0.2, 0.5],
            vec![-1.0, -0.4, 0.7, 0.2],
            vec![-0.2, -0.7, 0.6, 1.0],
            vec![-0.5, 0.2, -1.0, 0.1],
        ]);
        data(3, 0.7, vec![0.4, -1.1, 0.2, 0.9], AlmostAbelianData::j_commuting_part(&m))
    }

    #[test]
    fn lee_form_of_v_e2() {
        let d = data(3, 0.0, vec![1.0, 0.0, 0.0, 0.0], Mat::zeros(4, 4));
        let theta = lee_form(&d);
        assert_eq!(theta.coefficients(), &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let (l, h) = d.to_lie();
        assert!((&lee_form_hodge(&l, &h).unwrap() - &theta).max_abs() < 1e-12);
    }

    #[test]
    fn lee_form_oracles_agree() {
        let d = sample();
        let (l, h) = d.to_lie();
        let theta = lee_form(&d);
        assert!((&lee_form_hodge(&l, &h).unwrap() - &theta).max_abs() < 1e-10);
        assert!((&lee_form_defining(&l, &h).unwrap() - &theta).max_abs() < 1e-10);
    }

    #[test]
    fn chern_bismut_identity() {
        let d = sample();
        let (l, h) = d.to_lie();
        let jtheta = apply_j(&h.j, &lee_form(&d));
        let djt = ce_differential(&l, &jtheta).unwrap();
        let res = &(&ricci_chern(&d) - &ricci_bismut(&d)) + &djt;
        assert!(res.max_abs() < 1e-12);
    }

    #[test]
    fn closed_n0_oracle_matches() {
        assert!(closed_n0_residual(&sample()).unwrap() < 1e-12);
        let d = data(3, 1.0, vec![0.0; 4], Mat::zeros(4, 4));
        assert_eq!(closed_n0_obstruction(&d), C64::new(1.0, 0.0));
    }

    #[test]
    fn non_balanced_data_with_vanishing_bismut_ricci() {
        let d = data(3, 1.0, vec![0.0, 1.0, 0.0, 0.0], Mat::diagonal(&[2.0, 0.0, 0.0, 2.0]));
        assert_eq!(ricci_bismut(&d).max_abs(), 0.0);
        assert_eq!(ricci_chern(&d).get(&[0, 5]), -3.0);
        assert!(!is_balanced(&d).unwrap());
    }

    #[test]
    fn abelian_is_kahler() {
        let r = classify(&AlmostAbelianData::abelian(3)).unwrap();
        assert!(r.kahler && r.skt && r.lck && r.balanced == Some(true));
        assert!(r.oracle_agrees);
    }

    #[test]
    fn lck_example_is_skt_in_dimension_three() {
        let u = Mat::from_rows(&[
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0, 0.0],
        ]);
        let a_mat = &Mat::identity(4).scale(&-1.0) + &u;
        let r = classify(&data(3, 2.0, vec![0.0; 4], a_mat)).unwrap();
        assert!(r.lck && r.skt && !r.kahler);
        assert!(r.oracle_agrees, "{r:?}");
    }

    #[test]
    fn heisenberg_times_line_is_lck() {
        let d = data(2, 0.0, vec![1.0, 0.0], Mat::zeros(2, 2));
        let r = classify(&d).unwrap();
        assert!(r.lck && r.balanced.is_none());
        assert!(matches!(is_balanced(&d), Err(Error::UnsupportedDimension { .. })));
        assert!(r.oracle_agrees, "{r:?}");
    }

    #[test]
    fn sample_report_is_consistent() {
        let r = classify(&sample()).unwrap();
        assert!(!r.kahler && !r.lck);
        assert!(r.oracle_agrees, "{r:?}");
    }

    #[test]
    fn omega_power_is_nonzero_on_n1() {
        let (_, h) = sample().to_lie();
        assert!(omega_power_on_n1(&h).abs() > 0.0);
    }
}

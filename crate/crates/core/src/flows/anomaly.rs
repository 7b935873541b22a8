//! Simplified anomaly flow in its rescaled form
//! `∂ω̃/∂t = ½‖Ψ‖⁻² L⁻¹(i∂∂̄ω̃) − (α′/8) L⁻¹ tr(R^τ ∧ R^τ)`, with `L⁻¹` the
//! inverse of wedging with `ω̃`.

use super::balanced::{metric_trajectory, unpack_metric};
use super::ode::{dopri5, OdeOptions};
use super::{FlowKind, FlowTrajectory};
use crate::connections::{curvature, gauduchon, CurvatureForms};
use crate::error::{Error, Result};
use crate::exterior::{lefschetz_inverse, type_decomposition, AdjointKind, Dolbeault, GradedForm, HermitianCalculus};
use crate::hermitian::{closed_n0_obstruction, top_holomorphic_form, PREDICATE_TOL};
use crate::lie::{AlmostAbelianData, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;
use crate::scalar::C64;

/// Off-type tolerance for the `(2,2)` check, relative to the form size.
pub const TYPE_TOL: f64 = 1e-9;

fn top_coefficient<S: crate::scalar::Scalar>(f: &GradedForm<S>) -> S {
    let dim = f.dim();
    f.get(&(0..dim).collect::<Vec<_>>())
}

/// `‖Ψ‖_ω` from `iΨ ∧ Ψ̄ = ‖Ψ‖² ω³` (`ω^n` in general).
pub fn psi_norm(psi: &GradedForm<C64>, omega: &GradedForm<f64>) -> Result<f64> {
    let n = omega.dim() / 2;
    if psi.degree() != n {
        return Err(Error::DegreeMismatch { expected: n, found: psi.degree() });
    }
    let lhs = top_coefficient(&psi.wedge(&psi.conj())) * C64::new(0.0, 1.0);
    let vol = top_coefficient(&omega.power(n));
    let ratio = lhs.re / vol;
    if !(ratio > 0.0) || lhs.im.abs() > 1e-9 * lhs.re.abs() {
        return Err(Error::InvalidInput("Ψ is not a nowhere-vanishing (n,0)-form for ω".into()));
    }
    Ok(ratio.sqrt())
}

/// `tr(R ∧ R) = −½ Σ_{i,j} Ω^i_j ∧ Ω^j_i`; in an orthonormal frame this is
/// `Σ_{i<j} Ω^i_j ∧ Ω^i_j`.
pub fn trace_curvature_wedge_any_frame(curv: &CurvatureForms<f64>) -> GradedForm<f64> {
    let d = curv.dim();
    let mut out = GradedForm::zero(d, 4);
    for i in 0..d {
        for j in 0..d {
            out = &out + &curv.get(i, j).wedge(curv.get(j, i));
        }
    }
    out.scale(&-0.5)
}

/// `i∂∂̄ω − (α′/4) tr(R^τ ∧ R^τ)` for `(L, J, G)`.
pub fn anomaly_rhs_metric(
    l: &LieAlgebra<f64>,
    h: &HermitianStructure<f64>,
    dol: &Dolbeault,
    tau: f64,
    alpha_prime: f64,
) -> Result<GradedForm<f64>> {
    let calc = HermitianCalculus::with_dolbeault(dol.clone(), h, AdjointKind::Hodge)?;
    let ddbar = calc.i_del_delbar(&h.omega().to_c64()).re();
    if alpha_prime == 0.0 {
        return Ok(ddbar);
    }
    let tr = trace_curvature_wedge_any_frame(&curvature(&gauduchon(l, h, &tau)?, l));
    Ok(&ddbar - &tr.scale(&(alpha_prime / 4.0)))
}

/// [`anomaly_rhs_metric`] for data `(a, v, A)` in its adapted unitary basis.
pub fn anomaly_rhs(d: &AlmostAbelianData, tau: f64, alpha_prime: f64) -> Result<GradedForm<f64>> {
    let (l, h) = d.to_lie();
    anomaly_rhs_metric(&l, &h, &Dolbeault::new(&l, &h.j)?, tau, alpha_prime)
}

/// Largest coefficient of the components of `β` outside type `(2,2)`.
pub fn off_type_norm(j: &Mat<f64>, beta: &GradedForm<f64>) -> f64 {
    let dec = type_decomposition(j, beta);
    let mut worst: f64 = 0.0;
    for p in 0..=beta.degree() {
        let q = beta.degree() - p;
        if (p, q) == (2, 2) {
            continue;
        }
        if let Some(c) = dec.get(p, q) {
            worst = worst.max(c.max_abs());
        }
    }
    worst
}

fn check_type(j: &Mat<f64>, beta: &GradedForm<f64>) -> Result<()> {
    let off = off_type_norm(j, beta);
    if off > TYPE_TOL * (1.0 + beta.max_abs()) {
        return Err(Error::NotTypeTwoTwo { off_type_norm: off });
    }
    Ok(())
}

fn velocity(
    l: &LieAlgebra<f64>,
    h: &HermitianStructure<f64>,
    dol: &Dolbeault,
    psi: &GradedForm<C64>,
    tau: f64,
    alpha_prime: f64,
) -> Result<Mat<f64>> {
    let calc = HermitianCalculus::with_dolbeault(dol.clone(), h, AdjointKind::Hodge)?;
    let omega = h.omega();
    let ddbar = calc.i_del_delbar(&omega.to_c64()).re();
    let mut rhs = ddbar.scale(&(0.5 / psi_norm(psi, &omega)?.powi(2)));
    let mut full = ddbar;
    if alpha_prime != 0.0 {
        let tr = trace_curvature_wedge_any_frame(&curvature(&gauduchon(l, h, &tau)?, l));
        rhs = &rhs - &tr.scale(&(alpha_prime / 8.0));
        full = &full - &tr.scale(&(alpha_prime / 4.0));
    }
    check_type(&h.j, &full)?;
    let q = lefschetz_inverse(&omega, &rhs)?.to_antisymmetric();
    let raw = (&h.j.transpose() * &q).scale(&-1.0);
    let sym = raw.symmetric_part();
    Ok((&sym + &(&h.j.transpose() * &(&sym * &h.j))).scale(&0.5))
}

/// Integrates the rescaled anomaly flow for `n = 3` data with a closed
/// `(3,0)`-form, starting from the standard metric. The state is `G̃` with
/// `ω̃ = G̃(J·, ·)`; refuses when the right-hand side leaves type `(2,2)`.
pub fn anomaly_flow(
    d: &AlmostAbelianData,
    tau: f64,
    alpha_prime: f64,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<FlowTrajectory> {
    let (l, h) = d.to_lie();
    anomaly_flow_metric(&l, &h.j, &h.g, &top_holomorphic_form(3), tau, alpha_prime, t_end, opts, d)
}

#[allow(clippy::too_many_arguments)]
fn anomaly_flow_metric(
    l: &LieAlgebra<f64>,
    j: &Mat<f64>,
    g0: &Mat<f64>,
    psi: &GradedForm<C64>,
    tau: f64,
    alpha_prime: f64,
    t_end: f64,
    opts: &OdeOptions,
    d: &AlmostAbelianData,
) -> Result<FlowTrajectory> {
    if d.n != 3 {
        return Err(Error::UnsupportedDimension { n: d.n, reason: "anomaly flow is defined for n = 3" });
    }
    let obs = closed_n0_obstruction(d);
    let scale = 1.0 + d.a.abs() + d.a_mat.max_abs();
    if obs.norm() > PREDICATE_TOL * scale {
        return Err(Error::NoClosedVolumeForm { re: obs.re, im: obs.im });
    }
    let dol = Dolbeault::new(l, j)?;
    let dim = l.dim();
    let h0 = HermitianStructure::new(j.clone(), g0.clone())?;
    // Start from ω̃(0) = ‖Ψ‖^{1/2} ω₀.
    let g_start = g0.scale(&psi_norm(psi, &h0.omega())?.sqrt());
    let rhs = |_: f64, y: &[f64]| -> Result<Vec<f64>> {
        let g = unpack_metric(y, dim);
        if !g.is_positive_definite() {
            return Err(Error::LostPositivity { t: f64::NAN });
        }
        let h = HermitianStructure { j: j.clone(), g };
        Ok(velocity(l, &h, &dol, psi, tau, alpha_prime)?.as_slice().to_vec())
    };
    let observe = |t: f64, y: &[f64]| -> Result<()> {
        if unpack_metric(y, dim).is_positive_definite() {
            Ok(())
        } else {
            Err(Error::LostPositivity { t })
        }
    };
    let steps = dopri5(rhs, 0.0, g_start.as_slice(), t_end, opts, observe)?;
    metric_trajectory(FlowKind::Anomaly, l, j, steps)
}

//! Balanced flow at the metric level, evaluated entirely through the
//! exterior calculus, and the induced endomorphism `Q = −½ Ω⁻¹ q`.

use super::ode::{dopri5, OdeOptions};
use super::{Diagnostics, FlowKind, FlowSample, FlowTrajectory};
use crate::connections::{curvature, gauduchon, ricci_form_of};
use crate::error::{Error, Result};
use crate::exterior::{lefschetz_inverse, AdjointKind, Dolbeault, GradedForm, HermitianCalculus};
use crate::hermitian::{lee_form_hodge, ORACLE_TOL};
use crate::lie::{AlmostAbelianData, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;

/// Adjoints used by the oracle. On non-unimodular algebras only the Hodge
/// adjoints reproduce the closed formulas.
pub const ORACLE_ADJOINT: AdjointKind = AdjointKind::Hodge;

/// Sign with which the Chern–Ricci term enters `q`. With `ρ^C` normalized as
/// `ρ(X, Y) = −½ Σ g(R(X, Y) e_i, J e_i)`, the closed formulas for `p` and `P`
/// require the opposite sign, i.e. the convention `ρ(X, Y) = Ric(X, JY)`.
pub const RICCI_SIGN: f64 = -1.0;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `q(ω) = (n−2)! L⁻¹(i∂∂̄∗(ρ^C ∧ ω)) + (1/(n−1)) L⁻¹(Δ_BC ω^{n−1})`, where
/// `L⁻¹` inverts wedging with `ω^{n−2}`. No balanced check.
pub fn q_form(
    l: &LieAlgebra<f64>,
    h: &HermitianStructure<f64>,
    dol: &Dolbeault,
    kind: AdjointKind,
) -> Result<GradedForm<f64>> {
    let n = h.complex_dim();
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, reason: "balanced flow requires n >= 3" });
    }
    let calc = HermitianCalculus::with_dolbeault(dol.clone(), h, kind)?;
    let omega = h.omega();
    let rho = ricci_form_of(&curvature(&gauduchon(l, h, &1.0)?, l), h)?;
    let star = calc.metric().hodge_star(&rho.wedge(&omega));
    let first = calc.i_del_delbar(&star.to_c64());
    let lap = calc.bott_chern_laplacian(&omega.power(n - 1).to_c64());
    let omega_p = omega.power(n - 2);
    let sum = &first.scale(&num_complex::Complex::new(RICCI_SIGN * factorial(n - 2), 0.0))
        + &lap.scale(&num_complex::Complex::new(1.0 / (n as f64 - 1.0), 0.0));
    Ok(lefschetz_inverse(&omega_p, &sum)?.re())
}

fn check_balanced(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<()> {
    let theta = lee_form_hodge(l, h)?;
    let scale = 1.0 + l.table().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if theta.max_abs() > 1e3 * ORACLE_TOL * scale {
        return Err(Error::NotBalanced { lee_norm: theta.max_abs() });
    }
    Ok(())
}

/// `q(ω)` for balanced data in its adapted unitary basis.
pub fn q_oracle(d: &AlmostAbelianData) -> Result<GradedForm<f64>> {
    q_oracle_with(d, ORACLE_ADJOINT)
}

pub fn q_oracle_with(d: &AlmostAbelianData, kind: AdjointKind) -> Result<GradedForm<f64>> {
    let (l, h) = d.to_lie();
    check_balanced(&l, &h)?;
    q_form(&l, &h, &Dolbeault::new(&l, &h.j)?, kind)
}

/// `Q = −½ Ω⁻¹ q` as a matrix, with `q_{ij} = q(e_i, e_j)` and `Ω = JᵗG`.
pub fn q_matrix(h: &HermitianStructure<f64>, q: &GradedForm<f64>) -> Result<Mat<f64>> {
    let om_inv = h.omega_matrix().inverse(1e-14).ok_or(Error::NotPositiveDefinite)?;
    Ok((&om_inv * &q.to_antisymmetric()).scale(&-0.5))
}

/// The flow endomorphism computed by [`q_oracle`].
pub fn q_oracle_endomorphism(d: &AlmostAbelianData) -> Result<Mat<f64>> {
    q_matrix(&d.to_lie().1, &q_oracle(d)?)
}

/// Metric velocity `Ġ = −Jᵗ q` (symmetrized, `J`-invariant part).
fn metric_velocity(h: &HermitianStructure<f64>, q: &GradedForm<f64>) -> Mat<f64> {
    let raw = (&h.j.transpose() * &q.to_antisymmetric()).scale(&-1.0);
    let sym = raw.symmetric_part();
    (&sym + &(&h.j.transpose() * &(&sym * &h.j))).scale(&0.5)
}

pub(crate) fn unpack_metric(y: &[f64], dim: usize) -> Mat<f64> {
    Mat::from_fn(dim, dim, |i, j| y[i * dim + j]).symmetric_part()
}

/// Integrates `∂ω/∂t = q(ω)` for `(L, J, G₀)` from `t = 0` to `t_end`
/// (negative `t_end` integrates backwards).
pub fn balanced_flow_metric(
    l: &LieAlgebra<f64>,
    j: &Mat<f64>,
    g0: &Mat<f64>,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<FlowTrajectory> {
    let h0 = HermitianStructure::new(j.clone(), g0.clone())?;
    check_balanced(l, &h0)?;
    let dol = Dolbeault::new(l, j)?;
    let dim = l.dim();
    let rhs = |_: f64, y: &[f64]| -> Result<Vec<f64>> {
        let g = unpack_metric(y, dim);
        let h = HermitianStructure { j: j.clone(), g };
        if !h.g.is_positive_definite() {
            return Err(Error::LostPositivity { t: f64::NAN });
        }
        let q = q_form(l, &h, &dol, ORACLE_ADJOINT)?;
        Ok(metric_velocity(&h, &q).as_slice().to_vec())
    };
    let observe = |t: f64, y: &[f64]| -> Result<()> {
        if unpack_metric(y, dim).is_positive_definite() {
            Ok(())
        } else {
            Err(Error::LostPositivity { t })
        }
    };
    let steps = dopri5(rhs, 0.0, g0.as_slice(), t_end, opts, observe)?;
    metric_trajectory(FlowKind::Balanced, l, j, steps)
}

pub(crate) fn metric_trajectory(
    kind: FlowKind,
    l: &LieAlgebra<f64>,
    j: &Mat<f64>,
    steps: Vec<(f64, Vec<f64>)>,
) -> Result<FlowTrajectory> {
    let dim = l.dim();
    let samples = steps
        .into_iter()
        .map(|(t, y)| {
            let g = unpack_metric(&y, dim);
            let h = HermitianStructure { j: j.clone(), g: g.clone() };
            Ok(FlowSample { t, diagnostics: Diagnostics::of_metric(l, &h)?, metric: Some(g) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowTrajectory { kind, n: dim / 2, samples })
}

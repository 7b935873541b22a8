//! Closed-form flow endomorphism `Q = diag(p, P, p)` for balanced data with
//! `n = 3`, the induced ODE on `(a, A)` and soliton detection.

use serde::Serialize;

use super::ode::{dopri5, OdeOptions};
use super::{Diagnostics, FlowKind, FlowSample, FlowTrajectory};
use crate::error::{Error, Result};
use crate::lie::{standard_j, AlmostAbelianData};
use crate::linalg::Mat;

/// Relative tolerance for the `(a, A)` pattern checks.
pub const PATTERN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QEndomorphism {
    pub p: f64,
    #[serde(rename = "P")]
    pub big_p: Mat<f64>,
    pub w: f64,
}

impl QEndomorphism {
    /// `Q = diag(p, P, p)` on `ℝ⁶`.
    pub fn full(&self) -> Mat<f64> {
        let m = self.big_p.rows();
        let mut q = Mat::zeros(m + 2, m + 2);
        q[(0, 0)] = self.p;
        q[(m + 1, m + 1)] = self.p;
        for i in 0..m {
            for j in 0..m {
                q[(i + 1, j + 1)] = self.big_p[(i, j)];
            }
        }
        q
    }
}

/// Residual of the balanced `n = 3` pattern: `A` is `4 × 4`, traceless and
/// commutes with `J₁`.
pub fn pattern_residual(a_mat: &Mat<f64>) -> Result<f64> {
    if a_mat.rows() != 4 || a_mat.cols() != 4 {
        return Err(Error::UnsupportedDimension { n: a_mat.rows() / 2 + 1, reason: "closed flow formulas need n = 3" });
    }
    let j1 = standard_j::<f64>(4);
    Ok(a_mat.trace().abs().max(a_mat.commutator(&j1).max_abs()))
}

fn check_pattern(a_mat: &Mat<f64>) -> Result<()> {
    let r = pattern_residual(a_mat)?;
    if r > PATTERN_TOL * (1.0 + a_mat.max_abs()) {
        return Err(Error::PatternViolation { residual: r });
    }
    Ok(())
}

/// `w = 4a² + 4‖A‖² − (tr JA)²`.
pub fn w_of(a: f64, a_mat: &Mat<f64>) -> f64 {
    let tja = (&standard_j::<f64>(4) * a_mat).trace();
    4.0 * a * a + 4.0 * a_mat.norm_sq() - tja * tja
}

/// `p`, `P` and `w` for balanced data `(a, 0, A)` with `n = 3`.
pub fn q_endomorphism(a: f64, a_mat: &Mat<f64>) -> Result<QEndomorphism> {
    check_pattern(a_mat)?;
    Ok(q_endomorphism_unchecked(a, a_mat))
}

pub(crate) fn q_endomorphism_unchecked(a: f64, a_mat: &Mat<f64>) -> QEndomorphism {
    let j1 = standard_j::<f64>(4);
    let w = w_of(a, a_mat);
    let ap = a_mat.symmetric_part();
    let am = a_mat.skew_part();
    let at = a_mat.transpose();
    let tja2 = (&j1 * &(a_mat * a_mat)).trace();
    let p = (tja2 * tja2 - w * ap.norm_sq()) / 32.0;
    let big_p = &(&a_mat.commutator(&at).scale(&(w / 32.0)) - &ap.scale(&(a.powi(3) / 2.0)))
        - &am.commutator(&(&at * a_mat)).scale(&(a / 2.0));
    QEndomorphism { p, big_p, w }
}

/// The six coordinates `b₁ … b₆` of a balanced `A`.
pub fn b_coordinates(a_mat: &Mat<f64>) -> [f64; 6] {
    let x = |i: usize, j: usize| a_mat[(i - 1, j - 1)];
    [
        x(1, 1),
        0.5 * (x(1, 2) + x(2, 1)),
        0.5 * (x(1, 2) - x(2, 1)),
        0.5 * (x(1, 3) - x(2, 4)),
        0.5 * (x(1, 3) + x(2, 4)),
        0.5 * (x(1, 4) - x(2, 3)),
    ]
}

/// `(p, w)` through the sum-of-squares expressions in `b₁ … b₆`.
pub fn p_w_from_b(a: f64, b: &[f64; 6]) -> (f64, f64) {
    let [b1, b2, b3, b4, b5, b6] = *b;
    let w = 4.0 * a * a + 16.0 * b.iter().map(|x| x * x).sum::<f64>();
    let s = b1 * b1 + b2 * b2 + b4 * b4;
    let p = -0.5 * s * a * a
        - 2.0 * s * s
        - 2.0 * (b1 * b5 - b2 * b6).powi(2)
        - 2.0 * (b1 * b3 + b4 * b6).powi(2)
        - 2.0 * (b2 * b3 + b4 * b5).powi(2);
    (p, w)
}

/// `d/dt(a² + ‖A‖²) = 2p(a² + ‖A‖²) − (w/16)‖[A, Aᵗ]‖²`.
pub fn energy_rate(a: f64, a_mat: &Mat<f64>) -> f64 {
    let q = q_endomorphism_unchecked(a, a_mat);
    2.0 * q.p * (a * a + a_mat.norm_sq()) - q.w / 16.0 * a_mat.commutator(&a_mat.transpose()).norm_sq()
}

/// A priori bound `(‖A⁺₀‖⁻⁴ + t/2)^{−1/2}` on `‖A⁺(t)‖²`.
pub fn a_plus_bound(norm_a_plus_sq0: f64, t: f64) -> f64 {
    if norm_a_plus_sq0 == 0.0 {
        return 0.0;
    }
    (norm_a_plus_sq0.powi(-2) + t / 2.0).powf(-0.5)
}

/// Balanced bracket-flow state `(a, A)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketState {
    pub a: f64,
    pub a_mat: Mat<f64>,
    pub t: f64,
}

impl BracketState {
    pub fn new(a: f64, a_mat: Mat<f64>, t: f64) -> Result<Self> {
        check_pattern(&a_mat)?;
        Ok(Self { a, a_mat, t })
    }

    /// From balanced almost abelian data; `v` must vanish.
    pub fn from_data(d: &AlmostAbelianData) -> Result<Self> {
        if d.n != 3 {
            return Err(Error::UnsupportedDimension { n: d.n, reason: "bracket flow ODE is implemented for n = 3" });
        }
        let vn = d.v_norm_sq().sqrt();
        if vn > PATTERN_TOL * (1.0 + d.a_mat.max_abs()) || d.trace_a().abs() > PATTERN_TOL * (1.0 + d.a_mat.max_abs()) {
            return Err(Error::NotBalanced { lee_norm: vn.max(d.trace_a().abs()) });
        }
        Self::new(d.a, d.a_mat.clone(), 0.0)
    }

    pub fn to_data(&self) -> AlmostAbelianData {
        AlmostAbelianData { n: 3, a: self.a, v: vec![0.0; 4], a_mat: self.a_mat.clone() }
    }

    fn pack(&self) -> Vec<f64> {
        let mut y = vec![self.a];
        for i in 0..4 {
            y.extend(self.a_mat.row(i));
        }
        y
    }

    fn unpack(y: &[f64], t: f64) -> Self {
        Self { a: y[0], a_mat: Mat::from_fn(4, 4, |i, j| y[1 + 4 * i + j]), t }
    }
}

/// Diagnostics of a balanced `(a, A)` state.
pub fn bracket_diagnostics(a: f64, a_mat: &Mat<f64>) -> Diagnostics {
    let q = q_endomorphism_unchecked(a, a_mat);
    Diagnostics {
        a,
        a_mat: a_mat.clone(),
        p: q.p,
        w: q.w,
        norm_a_plus_sq: a_mat.symmetric_part().norm_sq(),
        energy: a * a + a_mat.norm_sq(),
        trace_a: a_mat.trace(),
        lee_residual: a_mat.trace().abs(),
    }
}

fn bracket_rhs(y: &[f64]) -> Vec<f64> {
    let s = BracketState::unpack(y, 0.0);
    let q = q_endomorphism_unchecked(s.a, &s.a_mat);
    let da = q.p * s.a;
    let dm = &s.a_mat.commutator(&q.big_p) + &s.a_mat.scale(&q.p);
    let mut out = vec![da];
    for i in 0..4 {
        out.extend(dm.row(i));
    }
    out
}

/// Integrates `ȧ = p a`, `Ȧ = [A, P] + p A` from `s0.t` to `t_end`.
pub fn bracket_flow(s0: &BracketState, t_end: f64, opts: &OdeOptions) -> Result<FlowTrajectory> {
    check_pattern(&s0.a_mat)?;
    let steps = dopri5(|_, y| Ok(bracket_rhs(y)), s0.t, &s0.pack(), t_end, opts, |_, _| Ok(()))?;
    let samples = steps
        .into_iter()
        .map(|(t, y)| {
            let s = BracketState::unpack(&y, t);
            FlowSample { t, metric: None, diagnostics: bracket_diagnostics(s.a, &s.a_mat) }
        })
        .collect();
    Ok(FlowTrajectory { kind: FlowKind::Bracket, n: 3, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonKind {
    Shrinking,
    Steady,
    Expanding,
}

impl SolitonKind {
    pub fn of(alpha: f64, tol: f64) -> Self {
        if alpha > tol {
            Self::Shrinking
        } else if alpha < -tol {
            Self::Expanding
        } else {
            Self::Steady
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolitonCertificate {
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: Mat<f64>,
    pub kind: SolitonKind,
    /// `D` is symmetric, so `Q = α Id + D`.
    pub algebraic: bool,
    /// `‖Q − α Id − ½(D + Dᵗ)‖_∞`.
    pub residual: f64,
    /// `‖[A, P]‖_∞`.
    pub commutator_residual: f64,
}

pub const SOLITON_TOL: f64 = 1e-9;

/// Derivations of the bracket of `d` commuting with the standard `J`, as a
/// basis of `6 × 6` matrices.
pub fn j_derivations(d: &AlmostAbelianData) -> Vec<Mat<f64>> {
    let (l, h) = d.to_lie();
    let dim = l.dim();
    let nv = dim * dim;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    // D[x, y] − [Dx, y] − [x, Dy] = 0 for basis pairs, coefficient by coefficient.
    for x in 0..dim {
        for y in x + 1..dim {
            for k in 0..dim {
                let mut row = vec![0.0; nv];
                for m in 0..dim {
                    // D_{k m} c^m_{xy}
                    row[k * dim + m] += l.constant(x, y, m);
                    // − D_{m x} c^k_{m y} − D_{m y} c^k_{x m}
                    row[m * dim + x] -= l.constant(m, y, k);
                    row[m * dim + y] -= l.constant(x, m, k);
                }
                if row.iter().any(|c| *c != 0.0) {
                    rows.push(row);
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            // (DJ − JD)_{ij}
            let mut row = vec![0.0; nv];
            for m in 0..dim {
                row[i * dim + m] += h.j[(m, j)];
                row[m * dim + j] -= h.j[(i, m)];
            }
            rows.push(row);
        }
    }
    Mat::from_rows(&rows).null_space(1e-10).into_iter().map(|v| Mat::from_fn(dim, dim, |i, j| v[i * dim + j])).collect()
}

/// Decides whether balanced data is a (semi-)algebraic soliton. Non-nilpotent
/// data uses the `[A, P] = 0` criterion; nilpotent data solves
/// `Q = α Id + ½(D + Dᵗ)` over `J`-commuting derivations.
pub fn soliton_check(d: &AlmostAbelianData) -> Result<Option<SolitonCertificate>> {
    let s = BracketState::from_data(d)?;
    let q = q_endomorphism(s.a, &s.a_mat)?;
    let scale = 1.0 + q.p.abs() + q.big_p.max_abs();
    let commutator_residual = s.a_mat.commutator(&q.big_p).max_abs();
    let nilpotent = s.a.abs() <= PATTERN_TOL && is_nilpotent(&s.a_mat);
    if !nilpotent {
        if commutator_residual > SOLITON_TOL * scale {
            return Ok(None);
        }
        let mut dm = Mat::zeros(6, 6);
        for i in 0..4 {
            for j in 0..4 {
                dm[(i + 1, j + 1)] = q.big_p[(i, j)] - if i == j { q.p } else { 0.0 };
            }
        }
        let residual = (&q.full() - &(&Mat::identity(6).scale(&q.p) + &dm)).max_abs();
        return Ok(Some(SolitonCertificate {
            alpha: q.p,
            algebraic: true,
            kind: SolitonKind::of(q.p, SOLITON_TOL * scale),
            d: dm,
            residual,
            commutator_residual,
        }));
    }
    let basis = j_derivations(d);
    let target = q.full();
    let dim = 6;
    // Unknowns (α, c_1 … c_r); equations are the entries of Q.
    let cols = 1 + basis.len();
    let sys = Mat::from_fn(dim * dim, cols, |e, c| {
        let (i, j) = (e / dim, e % dim);
        if c == 0 {
            if i == j { 1.0 } else { 0.0 }
        } else {
            let b = &basis[c - 1];
            0.5 * (b[(i, j)] + b[(j, i)])
        }
    });
    let rhs: Vec<f64> = (0..dim * dim).map(|e| target[(e / dim, e % dim)]).collect();
    let sol = least_squares(&sys, &rhs);
    let fitted = sys.mul_vec(&sol);
    let residual = fitted.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if residual > SOLITON_TOL * scale {
        return Ok(None);
    }
    let alpha = sol[0];
    let dm = basis.iter().zip(&sol[1..]).fold(Mat::zeros(dim, dim), |acc, (b, c)| &acc + &b.scale(c));
    let algebraic = dm.skew_part().max_abs() <= SOLITON_TOL * scale;
    Ok(Some(SolitonCertificate {
        alpha,
        kind: SolitonKind::of(alpha, SOLITON_TOL * scale),
        algebraic,
        d: dm,
        residual,
        commutator_residual,
    }))
}

fn is_nilpotent(m: &Mat<f64>) -> bool {
    let mut pw = m.clone();
    for _ in 0..m.rows() {
        pw = &pw * m;
    }
    pw.max_abs() <= PATTERN_TOL * (1.0 + m.max_abs()).powi(m.rows() as i32 + 1)
}

/// Minimum-norm least-squares solution via SVD.
fn least_squares(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let svd = a.to_dmatrix().svd(true, true);
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = svd.solve(&rhs, 1e-10).expect("SVD computed with both factors");
    x.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn nilpotent_example() -> AlmostAbelianData {
        let r = 2f64.sqrt();
        let mut m = Mat::zeros(4, 4);
        m[(1, 0)] = r;
        m[(2, 3)] = r;
        AlmostAbelianData::new(3, 0.0, vec![0.0; 4], m).unwrap()
    }

    fn u2_matrix(x: [f64; 4]) -> Mat<f64> {
        // Skew and J₁-commuting, hence in u(2); trace zero automatically.
        let skew = Mat::from_rows(&[
            vec![0.0, x[0], x[1], x[2]],
            vec![-x[0], 0.0, x[3], x[1]],
            vec![-x[1], -x[3], 0.0, -x[0]],
            vec![-x[2], -x[1], x[0], 0.0],
        ]);
        AlmostAbelianData::j_commuting_part(&skew)
    }

    #[test]
    fn nilpotent_example_endomorphism() {
        let d = nilpotent_example();
        let q = q_endomorphism(d.a, &d.a_mat).unwrap();
        assert!((q.p + 1.0).abs() < 1e-14);
        assert!((q.w - 16.0).abs() < 1e-14);
        let expected = Mat::diagonal(&[-1.0, -1.0, 1.0, 1.0, -1.0, -1.0]);
        assert!((&q.full() - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn unitary_a_gives_zero_p_and_p_matrix() {
        let m = u2_matrix([0.3, -1.2, 0.7, 2.0]);
        let q = q_endomorphism(1.5, &m).unwrap();
        assert!(q.p.abs() < 1e-14);
        assert!(q.big_p.max_abs() < 1e-13);
        let zero = q_endomorphism(0.0, &Mat::zeros(4, 4)).unwrap();
        assert_eq!((zero.p, zero.w), (0.0, 0.0));
    }

    #[test]
    fn pattern_violations_are_rejected() {
        assert!(matches!(q_endomorphism(0.0, &Mat::identity(4)), Err(Error::PatternViolation { .. })));
        assert!(matches!(
            q_endomorphism(0.0, &Mat::diagonal(&[1.0, 1.0, -1.0, -1.0])),
            Err(Error::PatternViolation { .. })
        ));
        assert!(matches!(q_endomorphism(0.0, &Mat::zeros(2, 2)), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn nilpotent_example_is_expanding_algebraic_soliton() {
        let d = nilpotent_example();
        let cert = soliton_check(&d).unwrap().expect("soliton");
        assert!((cert.alpha + 3.0).abs() < 1e-9);
        assert!((&cert.d - &Mat::diagonal(&[2.0, 2.0, 4.0, 4.0, 2.0, 2.0])).max_abs() < 1e-9);
        assert_eq!(cert.kind, SolitonKind::Expanding);
        assert!(cert.algebraic);
        assert!(cert.residual < 1e-9);
        assert!(cert.commutator_residual > 0.1);
    }

    #[test]
    fn kahler_data_is_steady() {
        let m = u2_matrix([0.4, 0.1, -0.3, 1.0]);
        let d = AlmostAbelianData::new(3, 0.8, vec![0.0; 4], m).unwrap();
        let cert = soliton_check(&d).unwrap().expect("soliton");
        assert_eq!(cert.kind, SolitonKind::Steady);
        assert!(cert.alpha.abs() < 1e-12 && cert.d.max_abs() < 1e-12);
    }

    #[test]
    fn kahler_state_is_fixed() {
        let m = u2_matrix([0.4, 0.1, -0.3, 1.0]);
        let s = BracketState::new(0.8, m.clone(), 0.0).unwrap();
        let traj = bracket_flow(&s, 10.0, &OdeOptions::default()).unwrap();
        let last = &traj.samples.last().unwrap().diagnostics;
        assert!((last.a - 0.8).abs() < 1e-12);
        assert!((&last.a_mat - &m).max_abs() < 1e-12);
    }
}

//! Connections on the Gauduchon line, their curvature and derived quantities.
//!
//! Index conventions: `∇_{e_i} e_j = Σ_k Γ^k_{ij} e_k`, connection forms
//! `σ^i_j(X) = e^i(∇_X e_j)` and curvature forms `Ω^i_j(X, Y) = e^i(R(X, Y) e_j)`.

use crate::error::{Error, Result};
use crate::exterior::{ce_differential, GradedForm};
use crate::lie::{AlmostAbelianData, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Left-invariant linear connection given by its Christoffel symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<S> {
    dim: usize,
    /// `gamma[(i * dim + j) * dim + k] = Γ^k_{ij}`.
    gamma: Vec<S>,
}

impl<S: Scalar> Connection<S> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, gamma: vec![S::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbol(&self, i: usize, j: usize, k: usize) -> S {
        self.gamma[(i * self.dim + j) * self.dim + k].clone()
    }

    fn symbol_mut(&mut self, i: usize, j: usize, k: usize) -> &mut S {
        &mut self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Matrix of `∇_{e_i}`; column `j` holds `∇_{e_i} e_j`.
    pub fn operator(&self, i: usize) -> Mat<S> {
        Mat::from_fn(self.dim, self.dim, |k, j| self.symbol(i, j, k))
    }

    /// Matrix of `∇_X` for `X = Σ x_i e_i`.
    pub fn operator_along(&self, x: &[S]) -> Mat<S> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = &m + &self.operator(i).scale(xi);
            }
        }
        m
    }

    /// Connection one-forms `σ^i_j`, indexed `[i][j]`.
    pub fn connection_forms(&self) -> Vec<Vec<GradedForm<S>>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let c: Vec<S> = (0..self.dim).map(|x| self.symbol(x, j, i)).collect();
                        GradedForm::from_components(&c)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Connection<T> {
        Connection { dim: self.dim, gamma: self.gamma.iter().map(f).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// `T(X, Y) = ∇_X Y − ∇_Y X − [X, Y]` on basis vectors, as `[i][j] ↦ vector`.
    pub fn torsion(&self, l: &LieAlgebra<S>) -> Vec<Vec<Vec<S>>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d)
                            .map(|k| self.symbol(i, j, k) - self.symbol(j, i, k) - l.constant(i, j, k))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

fn raise<S: Scalar>(dim: usize, lowered: &[S], g: &Mat<S>) -> Result<Connection<S>> {
    let g_inv = g.inverse(1e-14).ok_or(Error::NotPositiveDefinite)?;
    let mut c = Connection::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let mut s = S::zero();
                for m in 0..dim {
                    s = s + g_inv[(k, m)].clone() * lowered[(i * dim + j) * dim + m].clone();
                }
                *c.symbol_mut(i, j, k) = s;
            }
        }
    }
    Ok(c)
}

fn koszul_lowered<S: Scalar>(l: &LieAlgebra<S>, g: &Mat<S>) -> Vec<S> {
    let dim = l.dim();
    let half = S::from_ratio(1, 2);
    let br: Vec<Vec<Vec<S>>> = (0..dim)
        .map(|i| (0..dim).map(|j| (0..dim).map(|k| l.constant(i, j, k)).collect()).collect())
        .collect();
    let gb = |i: usize, j: usize, k: usize| -> S {
        // g([e_i, e_j], e_k)
        (0..dim).fold(S::zero(), |acc, m| acc + br[i][j][m].clone() * g[(m, k)].clone())
    };
    let mut out = vec![S::zero(); dim * dim * dim];
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                out[(x * dim + y) * dim + z] = half.clone() * (gb(x, y, z) - gb(y, z, x) - gb(x, z, y));
            }
        }
    }
    out
}

/// Levi-Civita connection from the Koszul formula
/// `2g(∇_X Y, Z) = g([X,Y],Z) − g([Y,Z],X) − g([X,Z],Y)`.
pub fn levi_civita<S: Scalar>(l: &LieAlgebra<S>, g: &Mat<S>) -> Result<Connection<S>> {
    if g.rows() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: g.rows() });
    }
    raise(l.dim(), &koszul_lowered(l, g), g)
}

/// Full antisymmetric array `β(e_a, e_b, e_c)` of a three-form.
fn three_form_array<S: Scalar>(beta: &GradedForm<S>) -> Vec<S> {
    let d = beta.dim();
    let mut out = vec![S::zero(); d * d * d];
    for (idx, c) in beta.terms() {
        let (a, b, e) = (idx[0], idx[1], idx[2]);
        for (p, s) in [
            ([a, b, e], 1),
            ([b, e, a], 1),
            ([e, a, b], 1),
            ([b, a, e], -1),
            ([a, e, b], -1),
            ([e, b, a], -1),
        ] {
            out[(p[0] * d + p[1]) * d + p[2]] = if s > 0 { c.clone() } else { -c.clone() };
        }
    }
    out
}

/// Gauduchon connection
/// `g(∇^τ_X Y, Z) = g(∇^g_X Y, Z) + ((1−τ)/4) T(X,Y,Z) + ((1+τ)/4) C(X,Y,Z)`
/// with `T(X,Y,Z) = dω(JX,JY,JZ)` and `C(X,Y,Z) = −dω(JX,Y,Z)`.
pub fn gauduchon<S: Scalar>(l: &LieAlgebra<S>, h: &HermitianStructure<S>, tau: &S) -> Result<Connection<S>> {
    let dim = l.dim();
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
    }
    let residual = l.nijenhuis_residual(&h.j);
    if residual > crate::exterior::NIJENHUIS_TOL {
        return Err(Error::NonIntegrable { residual });
    }
    let d_omega = ce_differential(l, &h.omega())?;
    let b = three_form_array(&d_omega);
    let j = &h.j;
    // (JX)_a = J[a][x]; contract each slot.
    let contract = |slots: [bool; 3]| -> Vec<S> {
        let mut cur = b.clone();
        for (pos, on) in slots.iter().enumerate() {
            if !*on {
                continue;
            }
            let mut next = vec![S::zero(); dim * dim * dim];
            for x in 0..dim {
                for y in 0..dim {
                    for z in 0..dim {
                        let mut s = S::zero();
                        for a in 0..dim {
                            let (src, coef) = match pos {
                                0 => ((a * dim + y) * dim + z, j[(a, x)].clone()),
                                1 => ((x * dim + a) * dim + z, j[(a, y)].clone()),
                                _ => ((x * dim + y) * dim + a, j[(a, z)].clone()),
                            };
                            if !coef.is_zero() {
                                s = s + coef * cur[src].clone();
                            }
                        }
                        next[(x * dim + y) * dim + z] = s;
                    }
                }
            }
            cur = next;
        }
        cur
    };
    let t = contract([true, true, true]);
    let c = contract([true, false, false]);
    let one = S::one();
    let quarter = S::from_ratio(1, 4);
    let ct = (one.clone() - tau.clone()) * quarter.clone();
    let cc = (one + tau.clone()) * quarter;
    let mut lowered = koszul_lowered(l, &h.g);
    for (idx, v) in lowered.iter_mut().enumerate() {
        *v = v.clone() + ct.clone() * t[idx].clone() - cc.clone() * c[idx].clone();
    }
    raise(dim, &lowered, &h.g)
}

/// Gauduchon connection of `μ(a, v, A)` in the standard adapted basis,
/// written down from the closed table of covariant derivatives.
pub fn gauduchon_fast(d: &AlmostAbelianData, tau: f64) -> Connection<f64> {
    let dim = 2 * d.n;
    let m = dim - 2;
    let last = dim - 1;
    let j1 = d.j1();
    let ap = d.a_plus();
    let am = d.a_minus();
    let v = &d.v;
    let jv = j1.mul_vec(v);
    let p = (1.0 + tau) / 4.0;
    let q = (1.0 - tau) / 2.0;
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let unit = |l: usize| -> Vec<f64> {
        let mut u = vec![0.0; m];
        u[l] = 1.0;
        u
    };
    let mut c = Connection::zero(dim);
    let mut set = |i: usize, j: usize, img: Vec<f64>| {
        for (k, val) in img.into_iter().enumerate() {
            *c.symbol_mut(i, j, k) = val;
        }
    };
    let full = |first: f64, mid: &[f64], end: f64| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        out[0] = first;
        out[1..=m].copy_from_slice(mid);
        out[last] = end;
        out
    };
    let scaled = |x: &[f64], s: f64| x.iter().map(|t| t * s).collect::<Vec<f64>>();

    set(0, 0, full(0.0, &scaled(&jv, p), d.a));
    set(0, last, full(-d.a, &scaled(v, -p), 0.0));
    set(last, 0, full(0.0, &scaled(v, p), 0.0));
    set(last, last, full(0.0, &scaled(&jv, p), 0.0));
    for l in 0..m {
        let y = unit(l);
        let jy = j1.mul_vec(&y);
        // ∇_{e_1} Y
        set(0, l + 1, full(-p * dot(&jv, &y), &scaled(&ap.mul_vec(&jy), tau), p * dot(v, &y)));
        // ∇_{e_2n} Y
        set(last, l + 1, full(-p * dot(v, &y), &am.mul_vec(&y), -p * dot(&jv, &y)));
        let x = y;
        let jx = jy;
        let apjx = ap.mul_vec(&jx);
        let apx = ap.mul_vec(&x);
        // ∇_X e_1, ∇_X e_2n
        set(l + 1, 0, full(0.0, &scaled(&apjx, q), q * dot(v, &x)));
        set(l + 1, last, full(-q * dot(v, &x), &scaled(&apx, -q), 0.0));
        for k in 0..m {
            let yk = unit(k);
            set(l + 1, k + 1, full(-q * dot(&apjx, &yk), &vec![0.0; m], q * dot(&apx, &yk)));
        }
    }
    c
}

/// Curvature forms `Ω^i_j`, indexed `[i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureForms<S: Scalar> {
    pub omega: Vec<Vec<GradedForm<S>>>,
}

impl<S: Scalar> CurvatureForms<S> {
    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &GradedForm<S> {
        &self.omega[i][j]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for (ra, rb) in self.omega.iter().zip(&other.omega) {
            for (a, b) in ra.iter().zip(rb) {
                m = m.max((a - b).max_abs());
            }
        }
        m
    }

    /// `R(e_a, e_b)` as a matrix.
    pub fn operator(&self, a: usize, b: usize) -> Mat<S> {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| {
            let m = self.omega[i][j].to_antisymmetric();
            m[(a, b)].clone()
        })
    }

    /// Rows `Ω^i_j = …` for `i < j` in row-major order (1-based indices).
    pub fn display_with(&self, letter: &str) -> String
    where
        S: std::fmt::Display,
    {
        let d = self.dim();
        let mut out = String::new();
        for i in 0..d {
            for j in i + 1..d {
                let f = &self.omega[i][j];
                if f.max_abs() == 0.0 {
                    continue;
                }
                out.push_str(&format!("Omega^{}_{} = {}\n", i + 1, j + 1, f.display_with(letter)));
            }
        }
        out
    }
}

/// Curvature by `R(X, Y) = [∇_X, ∇_Y] − ∇_{[X, Y]}` on basis pairs.
pub fn curvature<S: Scalar>(conn: &Connection<S>, l: &LieAlgebra<S>) -> CurvatureForms<S> {
    let d = conn.dim();
    let ops: Vec<Mat<S>> = (0..d).map(|i| conn.operator(i)).collect();
    let mut omega = vec![vec![GradedForm::zero(d, 2); d]; d];
    for a in 0..d {
        for b in a + 1..d {
            let br: Vec<S> = (0..d).map(|k| l.constant(a, b, k)).collect();
            let r = &ops[a].commutator(&ops[b]) - &conn.operator_along(&br);
            for i in 0..d {
                for j in 0..d {
                    let v = r[(i, j)].clone();
                    if !v.is_zero() {
                        omega[i][j].add_to_mask((1 << a) | (1 << b), v);
                    }
                }
            }
        }
    }
    CurvatureForms { omega }
}

/// Curvature by the structure equations `Ω^i_j = dσ^i_j + σ^i_k ∧ σ^k_j`.
pub fn curvature_cartan<S: Scalar>(conn: &Connection<S>, l: &LieAlgebra<S>) -> Result<CurvatureForms<S>> {
    let d = conn.dim();
    let sigma = conn.connection_forms();
    let mut omega = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let mut f = ce_differential(l, &sigma[i][j])?;
            for k in 0..d {
                f = &f + &sigma[i][k].wedge(&sigma[k][j]);
            }
            row.push(f);
        }
        omega.push(row);
    }
    Ok(CurvatureForms { omega })
}

/// `ρ(X, Y) = −½ Σ g(R(X, Y) u_i, J u_i)` over a `g`-orthonormal frame.
pub fn ricci_form_of<S: Scalar>(curv: &CurvatureForms<S>, h: &HermitianStructure<S>) -> Result<GradedForm<S>> {
    let d = curv.dim();
    let g_inv = h.g.inverse(1e-14).ok_or(Error::NotPositiveDefinite)?;
    let gj = &h.g * &h.j;
    let minus_half = S::from_ratio(-1, 2);
    let mut rho = GradedForm::zero(d, 2);
    for a in 0..d {
        for b in a + 1..d {
            let r = curv.operator(a, b);
            let m = &r.transpose() * &gj;
            let s = g_inv.frobenius_dot(&m);
            if !s.is_zero() {
                rho.add_to_mask((1 << a) | (1 << b), minus_half.clone() * s);
            }
        }
    }
    Ok(rho)
}

/// Span of the curvature operators `R(e_a, e_b)`, with a check that each
/// lies in `su(n)` (skew, `J`-commuting, complex-trace free).
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct HolonomySpan {
    pub dimension: usize,
    pub su_contained: bool,
    /// The span is a lower bound for the holonomy algebra.
    pub note: &'static str,
}

pub const SU_TOL: f64 = 1e-9;

pub fn holonomy_span<S: Scalar>(curv: &CurvatureForms<S>, h: &HermitianStructure<S>) -> HolonomySpan {
    let d = curv.dim();
    let mut rows = Vec::new();
    let mut su = true;
    for a in 0..d {
        for b in a + 1..d {
            let r = curv.operator(a, b);
            let skew = &(&h.g * &r) + &(&r.transpose() * &h.g);
            let comm = r.commutator(&h.j);
            let ctr = (&h.j * &r).trace().magnitude();
            if skew.max_abs() > SU_TOL || comm.max_abs() > SU_TOL || ctr > SU_TOL {
                su = false;
            }
            rows.push(r.as_slice().to_vec());
        }
    }
    let m = Mat::from_rows(&rows);
    HolonomySpan { dimension: m.rank(SU_TOL), su_contained: su, note: "span lower bound" }
}

/// `tr(R ∧ R) = Σ_{i<j} Ω^i_j ∧ Ω^i_j` (orthonormal frame).
pub fn trace_curvature_wedge<S: Scalar>(curv: &CurvatureForms<S>) -> GradedForm<S> {
    let d = curv.dim();
    let mut out = GradedForm::zero(d, 4);
    for i in 0..d {
        for j in i + 1..d {
            let f = &curv.omega[i][j];
            out = &out + &f.wedge(f);
        }
    }
    out
}

/// The symmetric `J`-commuting endomorphism
/// `L = (1/8) τ(1−τ)² ‖A⁺‖² diag(‖A⁺‖², 2[A⁺, A⁻], ‖A⁺‖²)`.
pub fn trace_endomorphism(d: &AlmostAbelianData, tau: f64) -> Mat<f64> {
    let dim = 2 * d.n;
    let ap = d.a_plus();
    let am = d.a_minus();
    let s = ap.norm_sq();
    let c = tau * (1.0 - tau).powi(2) * s / 8.0;
    let inner = ap.commutator(&am).scale(&2.0);
    let mut l = Mat::zeros(dim, dim);
    l[(0, 0)] = s;
    l[(dim - 1, dim - 1)] = s;
    for i in 0..dim - 2 {
        for k in 0..dim - 2 {
            l[(i + 1, k + 1)] = inner[(i, k)];
        }
    }
    l.scale(&c)
}

/// `ω ∧ ω(L·, ·)` with `ω(LX, Y) = g(JLX, Y)`.
pub fn omega_wedge_omega_l(h: &HermitianStructure<f64>, l: &Mat<f64>) -> GradedForm<f64> {
    // ω(L e_x, e_y) = (G J L)_{yx}
    let m = (&h.g * &(&h.j * l)).transpose();
    h.omega().wedge(&GradedForm::from_antisymmetric(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::standard_j;

    fn sample(tau_commuting: bool) -> AlmostAbelianData {
        let m = Mat::from_rows(&[
            vec![0.3, 1.0, -0.2, 0.5],
            vec![-1.0, -0.4, 0.7, 0.2],
            vec![-0.2, -0.7, 0.6, 1.0],
            vec![-0.5, 0.2, -1.0, 0.1],
        ]);
        let a = if tau_commuting { AlmostAbelianData::j_commuting_part(&m) } else { m };
        AlmostAbelianData { n: 3, a: 0.7, v: vec![0.4, -1.1, 0.2, 0.9], a_mat: a }
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric() {
        let (l, h) = sample(true).to_lie();
        let lc = levi_civita(&l, &h.g).unwrap();
        let t = lc.torsion(&l);
        assert!(t.iter().flatten().flatten().all(|x| x.abs() < 1e-14));
        for i in 0..6 {
            let op = lc.operator(i);
            assert!((&op + &op.transpose()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn levi_civita_anchor_entry() {
        let d = AlmostAbelianData::new(2, 1.0, vec![0.0; 2], Mat::zeros(2, 2)).unwrap();
        let (l, h) = d.to_lie();
        let lc = levi_civita(&l, &h.g).unwrap();
        assert!((lc.symbol(0, 0, 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauduchon_paths_agree() {
        let d = sample(true);
        let (l, h) = d.to_lie();
        for tau in [-1.0, 0.0, 0.5, 1.0, 2.3] {
            let generic = gauduchon(&l, &h, &tau).unwrap();
            let fast = gauduchon_fast(&d, tau);
            assert!(generic.max_abs_diff(&fast) < 1e-12, "tau = {tau}");
        }
    }

    #[test]
    fn gauduchon_preserves_g_and_j() {
        let d = sample(true);
        let (l, h) = d.to_lie();
        let conn = gauduchon(&l, &h, &0.3).unwrap();
        for i in 0..6 {
            let op = conn.operator(i);
            assert!((&op + &op.transpose()).max_abs() < 1e-13);
            assert!(op.commutator(&h.j).max_abs() < 1e-13);
        }
    }

    #[test]
    fn chern_vanishes_along_n1() {
        let d = sample(true);
        let c = gauduchon_fast(&d, 1.0);
        for i in 1..5 {
            assert!(c.operator(i).max_abs() < 1e-15);
        }
    }

    #[test]
    fn non_integrable_rejected() {
        let (l, h) = sample(false).to_lie();
        assert!(matches!(gauduchon(&l, &h, &1.0), Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn curvature_paths_agree() {
        let d = sample(true);
        let (l, _) = d.to_lie();
        let conn = gauduchon_fast(&d, -0.4);
        let a = curvature(&conn, &l);
        let b = curvature_cartan(&conn, &l).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn chern_trace_wedge_vanishes() {
        let d = sample(true);
        let (l, _) = d.to_lie();
        let tr = trace_curvature_wedge(&curvature(&gauduchon_fast(&d, 1.0), &l));
        assert!(tr.max_abs() < 1e-12);
    }

    #[test]
    fn ricci_forms_match_closed_formulas() {
        let d = sample(true);
        let (l, h) = d.to_lie();
        let rc = ricci_form_of(&curvature(&gauduchon_fast(&d, 1.0), &l), &h).unwrap();
        let rb = ricci_form_of(&curvature(&gauduchon_fast(&d, -1.0), &l), &h).unwrap();
        assert!((&rc - &crate::hermitian::ricci_chern(&d)).max_abs() < 1e-12);
        assert!((&rb - &crate::hermitian::ricci_bismut(&d)).max_abs() < 1e-12);
    }

    #[test]
    fn abelian_is_flat() {
        let l = LieAlgebra::<f64>::abelian(4);
        let h = HermitianStructure { j: standard_j(4), g: Mat::identity(4) };
        let c = gauduchon(&l, &h, &-1.0).unwrap();
        let curv = curvature(&c, &l);
        assert_eq!(holonomy_span(&curv, &h).dimension, 0);
    }
}

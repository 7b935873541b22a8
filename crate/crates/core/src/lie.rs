//! Lie algebras given by structure constants, Hermitian structures on them,
//! and the `(a, v, A)` encoding of almost abelian ones.

use crate::error::{Error, Result};
use crate::exterior::GradedForm;
use crate::linalg::Mat;
use crate::scalar::{Scalar, C64};

/// Real Lie algebra with structure constants `[e_i, e_j] = Σ_k c^k_ij e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<S> {
    dim: usize,
    c: Vec<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn abelian(dim: usize) -> Self {
        Self { dim, c: vec![S::zero(); dim * dim * dim] }
    }

    /// From a dense table indexed `c[(i * dim + j) * dim + k] = c^k_ij`.
    /// Fails unless the table is antisymmetric in `i, j`.
    pub fn from_table(dim: usize, c: Vec<S>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: c.len() });
        }
        let alg = Self { dim, c };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if !(alg.constant(i, j, k) + alg.constant(j, i, k)).is_negligible(1e-14) {
                        return Err(Error::InvalidInput(format!(
                            "structure constants not antisymmetric at ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Sets `[e_i, e_j] = Σ_k v_k e_k` (and the antisymmetric partner).
    pub fn set_bracket(&mut self, i: usize, j: usize, v: &[S]) {
        assert_eq!(v.len(), self.dim);
        for (k, x) in v.iter().enumerate() {
            let idx = self.index(i, j, k);
            self.c[idx] = x.clone();
            let idx = self.index(j, i, k);
            self.c[idx] = -x.clone();
        }
    }

    /// Builds the algebra from structure equations `d f^k = Σ coef f^{ij}`,
    /// using `dα(X, Y) = −α([X, Y])`. Indices are 0-based.
    pub fn from_differentials(dim: usize, equations: &[(usize, Vec<(usize, usize, S)>)]) -> Self {
        let mut alg = Self::abelian(dim);
        for (k, terms) in equations {
            for (i, j, coef) in terms {
                let a = alg.index(*i, *j, *k);
                alg.c[a] = alg.c[a].clone() - coef.clone();
                let b = alg.index(*j, *i, *k);
                alg.c[b] = alg.c[b].clone() + coef.clone();
            }
        }
        alg
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_ij`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> S {
        self.c[self.index(i, j, k)].clone()
    }

    pub fn table(&self) -> &[S] {
        &self.c
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra { dim: self.dim, c: self.c.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> LieAlgebra<C64> {
        self.map(Scalar::to_c64)
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let w = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.c[self.index(i, j, k)];
                    if !c.is_zero() {
                        *o = o.clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` acting on column vectors.
    pub fn ad(&self, x: &[S]) -> Mat<S> {
        let n = self.dim;
        Mat::from_fn(n, n, |k, j| {
            (0..n).fold(S::zero(), |acc, i| acc + x[i].clone() * self.constant(i, j, k))
        })
    }

    pub fn ad_basis(&self, i: usize) -> Mat<S> {
        Mat::from_fn(self.dim, self.dim, |k, j| self.constant(i, j, k))
    }

    /// The two-forms `d e^k`, `k = 0..dim`.
    pub fn structure_forms(&self) -> Vec<GradedForm<S>> {
        (0..self.dim)
            .map(|k| {
                let mut f = GradedForm::zero(self.dim, 2);
                for i in 0..self.dim {
                    for j in i + 1..self.dim {
                        let c = self.constant(i, j, k);
                        if !c.is_zero() {
                            f.add_to_mask((1 << i) | (1 << j), -c);
                        }
                    }
                }
                f
            })
            .collect()
    }

    /// Largest Jacobi defect `|Σ_cyc [[e_i, e_j], e_k]|` over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for m in 0..n {
                        let mut s = S::zero();
                        for l in 0..n {
                            s = s + self.constant(i, j, l) * self.constant(l, k, m)
                                + self.constant(j, k, l) * self.constant(l, i, m)
                                + self.constant(k, i, l) * self.constant(l, j, m);
                        }
                        worst = worst.max(s.magnitude());
                    }
                }
            }
        }
        worst
    }

    /// Traces of `ad_{e_i}`.
    pub fn ad_traces(&self) -> Vec<S> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(S::zero(), |acc, j| acc + self.constant(i, j, j)))
            .collect()
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        self.ad_traces().iter().all(|t| t.is_negligible(tol))
    }

    /// Change of basis: columns of `p` are the new basis vectors in old coordinates.
    pub fn change_basis(&self, p: &Mat<S>, tol: f64) -> Result<Self> {
        let n = self.dim;
        let p_inv = p.inverse(tol).ok_or_else(|| Error::InvalidInput("singular change of basis".into()))?;
        let cols: Vec<Vec<S>> = (0..n).map(|j| p.column(j)).collect();
        let mut out = Self::abelian(n);
        for i in 0..n {
            for j in i + 1..n {
                let b = p_inv.mul_vec(&self.bracket(&cols[i], &cols[j]));
                out.set_bracket(i, j, &b);
            }
        }
        Ok(out)
    }

    /// Nijenhuis residual `max |[JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]|`.
    pub fn nijenhuis_residual(&self, j: &Mat<S>) -> f64 {
        let n = self.dim;
        let cols: Vec<Vec<S>> = (0..n).map(|i| j.column(i)).collect();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                let ex = unit::<S>(n, x);
                let ey = unit::<S>(n, y);
                let t1 = self.bracket(&cols[x], &cols[y]);
                let t2 = j.mul_vec(&self.bracket(&cols[x], &ey));
                let t3 = j.mul_vec(&self.bracket(&ex, &cols[y]));
                let t4 = self.bracket(&ex, &ey);
                for k in 0..n {
                    let r = t1[k].clone() - t2[k].clone() - t3[k].clone() - t4[k].clone();
                    worst = worst.max(r.magnitude());
                }
            }
        }
        worst
    }
}

impl LieAlgebra<f64> {
    /// Linear forms `φ` whose kernel is a codimension-one abelian ideal.
    ///
    /// `ker φ` is an ideal iff `φ` kills `[g, g]`, and it is abelian iff every
    /// `d e^k` restricts to zero on it, i.e. `φ ∧ d e^k = 0`. Both conditions
    /// are linear in `φ`.
    pub fn abelian_ideal_normals(&self, rel_tol: f64) -> Vec<Vec<f64>> {
        let n = self.dim;
        let forms = self.structure_forms();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let row: Vec<f64> = (0..n).map(|k| self.constant(i, j, k)).collect();
                if row.iter().any(|x| *x != 0.0) {
                    rows.push(row);
                }
            }
        }
        for s in &forms {
            let images: Vec<GradedForm<f64>> =
                (0..n).map(|l| GradedForm::covector(n, l).wedge(s)).collect();
            for r in 0..images[0].coefficients().len() {
                let row: Vec<f64> = images.iter().map(|f| f.coefficients()[r]).collect();
                if row.iter().any(|x| *x != 0.0) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return (0..n).map(|k| unit(n, k)).collect();
        }
        let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let m = Mat::from_rows(&rows);
        // Normalize by entry scale so the relative cutoff is meaningful even
        // when a single singular value dominates.
        let m = m.scale(&(1.0 / scale));
        m.null_space(rel_tol)
    }

    pub fn is_almost_abelian(&self, rel_tol: f64) -> bool {
        self.dim > 0 && !self.abelian_ideal_normals(rel_tol).is_empty()
    }
}

pub(crate) fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// A complex structure `J` with a compatible metric `G` on a Lie algebra.
///
/// `J` acts on column vectors; `G` is the Gram matrix of the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianStructure<S: Scalar> {
    pub j: Mat<S>,
    pub g: Mat<S>,
}

impl<S: Scalar> HermitianStructure<S> {
    /// Validates `J² = −1`, `G` symmetric positive-definite and `G(J·, J·) = G`.
    pub fn new(j: Mat<S>, g: Mat<S>) -> Result<Self> {
        let n = j.rows();
        if !j.is_square() || g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.rows() });
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidInput("odd-dimensional algebra has no complex structure".into()));
        }
        let sq = &(&j * &j) + &Mat::identity(n);
        if sq.max_abs() > 1e-10 {
            return Err(Error::NotComplexStructure { residual: sq.max_abs() });
        }
        let gf = g.map(|x| x.to_c64().re);
        if !gf.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let compat = &(&j.transpose() * &(&g * &j)) - &g;
        if compat.max_abs() > 1e-10 * (1.0 + g.max_abs()) {
            return Err(Error::NotHermitian { residual: compat.max_abs() });
        }
        Ok(Self { j, g })
    }

    /// Standard structure `J e_i = e_{2n+1-i}` (1-based, `i ≤ n`), `G = Id`.
    pub fn standard(n: usize) -> Self {
        Self { j: standard_j(2 * n), g: Mat::identity(2 * n) }
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn complex_dim(&self) -> usize {
        self.dim() / 2
    }

    /// Matrix `ω_ij = g(J e_i, e_j)`.
    pub fn omega_matrix(&self) -> Mat<S> {
        &self.j.transpose() * &self.g
    }

    /// Fundamental form `ω = g(J·, ·)`.
    pub fn omega(&self) -> GradedForm<S> {
        GradedForm::from_antisymmetric(&self.omega_matrix())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HermitianStructure<T> {
        HermitianStructure { j: self.j.map(f), g: self.g.map(f) }
    }
}

/// `J e_i = e_{m-1-i}` for `i < m/2` and `J e_i = −e_{m-1-i}` otherwise (0-based).
pub fn standard_j<S: Scalar>(m: usize) -> Mat<S> {
    let mut j = Mat::zeros(m, m);
    for l in 0..m {
        j[(m - 1 - l, l)] = if l < m / 2 { S::one() } else { -S::one() };
    }
    j
}

/// Algebraic data `(a, v, A)` of a Hermitian almost abelian Lie algebra in an
/// adapted unitary basis: `ad_{e_2n}|_n = [[a, 0], [v, A]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostAbelianData {
    pub n: usize,
    pub a: f64,
    pub v: Vec<f64>,
    pub a_mat: Mat<f64>,
}

impl AlmostAbelianData {
    /// Validates shapes and `[A, J₁] = 0`.
    pub fn new(n: usize, a: f64, v: Vec<f64>, a_mat: Mat<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { n, reason: "complex dimension must be at least 2" });
        }
        let m = 2 * n - 2;
        if v.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: v.len() });
        }
        if a_mat.rows() != m || a_mat.cols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: a_mat.rows() });
        }
        let d = Self { n, a, v, a_mat };
        let r = d.j_commutator_residual();
        if r > 1e-9 * (1.0 + d.a_mat.max_abs()) {
            return Err(Error::NotJCommuting { residual: r });
        }
        Ok(d)
    }

    pub fn abelian(n: usize) -> Self {
        let m = 2 * n - 2;
        Self { n, a: 0.0, v: vec![0.0; m], a_mat: Mat::zeros(m, m) }
    }

    /// `J₁ = J|_{n₁}` in the basis `e_2 … e_{2n−1}`.
    pub fn j1(&self) -> Mat<f64> {
        standard_j(2 * self.n - 2)
    }

    /// The `J₁`-commuting part `½(M − J₁ M J₁)` of a matrix on `n₁`.
    pub fn j_commuting_part(m: &Mat<f64>) -> Mat<f64> {
        let j = standard_j::<f64>(m.rows());
        (m - &(&j * &(m * &j))).scale(&0.5)
    }

    pub fn j_commutator_residual(&self) -> f64 {
        self.a_mat.commutator(&self.j1()).max_abs()
    }

    pub fn trace_a(&self) -> f64 {
        self.a_mat.trace()
    }

    /// `tr(J₁ A)`.
    pub fn trace_ja(&self) -> f64 {
        (&self.j1() * &self.a_mat).trace()
    }

    pub fn v_norm_sq(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum()
    }

    /// Symmetric and skew parts `A^±`.
    pub fn a_plus(&self) -> Mat<f64> {
        self.a_mat.symmetric_part()
    }

    pub fn a_minus(&self) -> Mat<f64> {
        self.a_mat.skew_part()
    }

    /// The bracket `μ(a, v, A)` with the standard structure `(J₀, Id)`.
    pub fn to_lie(&self) -> (LieAlgebra<f64>, HermitianStructure<f64>) {
        let dim = 2 * self.n;
        let last = dim - 1;
        let m = dim - 2;
        let mut alg = LieAlgebra::abelian(dim);
        let mut img = vec![0.0; dim];
        img[0] = self.a;
        for l in 0..m {
            img[l + 1] = self.v[l];
        }
        alg.set_bracket(last, 0, &img);
        for l in 0..m {
            let mut img = vec![0.0; dim];
            for k in 0..m {
                img[k + 1] = self.a_mat[(k, l)];
            }
            alg.set_bracket(last, l + 1, &img);
        }
        (alg, HermitianStructure::standard(self.n))
    }

    /// Unimodularity `a + tr A = 0`.
    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.a + self.trace_a()).abs() <= tol
    }
}

/// Builds `μ(a, v, A)` with its standard Hermitian structure.
pub fn from_almost_abelian_data(d: &AlmostAbelianData) -> Result<(LieAlgebra<f64>, HermitianStructure<f64>)> {
    let r = d.j_commutator_residual();
    if r > 1e-9 * (1.0 + d.a_mat.max_abs()) {
        return Err(Error::NotJCommuting { residual: r });
    }
    Ok(d.to_lie())
}

/// Relative tolerance for rank and ideal decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Adapted unitary basis of a Hermitian almost abelian Lie algebra, as the
/// columns of the returned matrix (in the input coordinates).
pub fn adapted_basis(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<Mat<f64>> {
    let dim = l.dim();
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
    }
    let residual = l.nijenhuis_residual(&h.j);
    if residual > 1e-9 {
        return Err(Error::NonIntegrable { residual });
    }
    let normals = l.abelian_ideal_normals(RANK_TOL);
    let phi = &preferred_normal(&normals, dim).ok_or(Error::NotAlmostAbelian)?;
    let g = &h.g;
    let g_inv = g.inverse(1e-14).ok_or(Error::NotPositiveDefinite)?;
    let ip = |x: &[f64], y: &[f64]| -> f64 {
        let gy = g.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    };
    let mut e_last = g_inv.mul_vec(phi);
    let norm = ip(&e_last, &e_last).sqrt();
    e_last.iter_mut().for_each(|x| *x /= norm);
    let e_first: Vec<f64> = h.j.mul_vec(&e_last).iter().map(|x| -x).collect();

    let n = dim / 2;
    let mut cols: Vec<Option<Vec<f64>>> = vec![None; dim];
    cols[0] = Some(e_first.clone());
    cols[dim - 1] = Some(e_last.clone());
    let mut chosen: Vec<Vec<f64>> = vec![e_first, e_last];
    let mut k = 1;
    for cand in 0..dim {
        if k >= n {
            break;
        }
        let mut x = unit::<f64>(dim, cand);
        for _ in 0..2 {
            for b in &chosen {
                let c = ip(&x, b);
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
            }
        }
        let nx = ip(&x, &x).sqrt();
        if nx < 1e-6 {
            continue;
        }
        x.iter_mut().for_each(|xi| *xi /= nx);
        let jx = h.j.mul_vec(&x);
        cols[k] = Some(x.clone());
        cols[dim - 1 - k] = Some(jx.clone());
        chosen.push(x);
        chosen.push(jx);
        k += 1;
    }
    if k < n {
        return Err(Error::NotAlmostAbelian);
    }
    let cols: Vec<Vec<f64>> = cols.into_iter().map(|c| c.expect("all columns filled")).collect();
    Ok(Mat::from_fn(dim, dim, |i, j| cols[j][i]))
}

// When several abelian ideals exist (nilpotent case) pick the normal closest
// to the last dual basis vector, so inputs already in adapted form round-trip.
fn preferred_normal(normals: &[Vec<f64>], dim: usize) -> Option<Vec<f64>> {
    let first = normals.first()?;
    let mut phi = vec![0.0; dim];
    for b in normals {
        let c = b[dim - 1];
        phi.iter_mut().zip(b).for_each(|(p, x)| *p += c * x);
    }
    if phi.iter().map(|x| x * x).sum::<f64>() < 1e-12 {
        phi = first.clone();
        let lead = phi.iter().rev().find(|x| x.abs() > 1e-9).copied().unwrap_or(1.0);
        if lead < 0.0 {
            phi.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Some(phi)
}

/// Reads off `(a, v, A)` in a constructed adapted unitary basis.
pub fn adapted_data(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<AlmostAbelianData> {
    let p = adapted_basis(l, h)?;
    let dim = l.dim();
    let m = dim - 2;
    let p_inv = p.inverse(1e-14).ok_or(Error::NotPositiveDefinite)?;
    let b = &(&p_inv * &l.ad(&p.column(dim - 1))) * &p;
    let scale = 1.0 + b.max_abs();
    let mut defect: f64 = 0.0;
    for l_ in 1..=m {
        defect = defect.max(b[(0, l_)].abs());
    }
    for c in 0..dim {
        defect = defect.max(b[(dim - 1, c)].abs());
    }
    if defect > 1e-8 * scale {
        return Err(Error::NotAlmostAbelian);
    }
    let v = (1..=m).map(|i| b[(i, 0)]).collect();
    let a_mat = Mat::from_fn(m, m, |i, j| b[(i + 1, j + 1)]);
    AlmostAbelianData::new(dim / 2, b[(0, 0)], v, a_mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn heisenberg_structure_equations() {
        // d f^5 = f^12, d f^6 = f^13
        let one = rat(1, 1);
        let alg: LieAlgebra<Rational> = LieAlgebra::from_differentials(
            6,
            &[(4, vec![(0, 1, one.clone())]), (5, vec![(0, 2, one.clone())])],
        );
        assert_eq!(alg.constant(0, 1, 4), rat(-1, 1));
        assert_eq!(alg.constant(0, 2, 5), rat(-1, 1));
        let forms = alg.structure_forms();
        assert_eq!(forms[4], GradedForm::monomial(6, &[0, 1], one.clone()));
        assert_eq!(forms[5], GradedForm::monomial(6, &[0, 2], one));
        assert_eq!(alg.jacobi_residual(), 0.0);
    }

    #[test]
    fn generated_brackets_satisfy_jacobi() {
        let a = Mat::from_rows(&[
            vec![1.0, 2.0, 0.5, -1.0],
            vec![3.0, -1.0, 0.25, 0.5],
            vec![-0.5, -0.25, -1.0, 3.0],
            vec![1.0, -0.5, 2.0, 1.0],
        ]);
        let d = AlmostAbelianData::new(3, 0.7, vec![1.0, -2.0, 0.0, 0.5], a).unwrap();
        let (l, h) = d.to_lie();
        assert!(l.jacobi_residual() < 1e-14);
        assert!(l.nijenhuis_residual(&h.j) < 1e-14);
        assert_eq!(l.is_unimodular(1e-12), d.is_unimodular(1e-12));
    }

    #[test]
    fn non_commuting_a_is_rejected() {
        let a = Mat::diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert!(matches!(
            AlmostAbelianData::new(3, 0.0, vec![0.0; 4], a),
            Err(Error::NotJCommuting { .. })
        ));
    }

    #[test]
    fn round_trip_recovers_orbit_invariants() {
        let a = Mat::from_rows(&[
            vec![0.5, 1.0, 0.0, 0.3],
            vec![-2.0, -0.5, 0.7, 0.0],
            vec![0.0, -0.7, -0.5, -2.0],
            vec![-0.3, 0.0, 1.0, 0.5],
        ]);
        let d = AlmostAbelianData::new(3, 1.3, vec![0.2, 0.0, -1.0, 0.4], a).unwrap();
        let (l, h) = d.to_lie();
        let back = adapted_data(&l, &h).unwrap();
        assert!((back.a - d.a).abs() < 1e-10);
        assert!((back.v_norm_sq() - d.v_norm_sq()).abs() < 1e-10);
        assert!((back.trace_a() - d.trace_a()).abs() < 1e-10);
        assert!((back.trace_ja() - d.trace_ja()).abs() < 1e-10);
    }

    #[test]
    fn abelian_algebra_has_zero_data() {
        let l = LieAlgebra::<f64>::abelian(6);
        let d = adapted_data(&l, &HermitianStructure::standard(3)).unwrap();
        assert_eq!(d.a, 0.0);
        assert!(d.v.iter().all(|x| *x == 0.0));
        assert_eq!(d.a_mat.max_abs(), 0.0);
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::{construct, entries, entry, Family};
use crate::error::Result;
use crate::linalg::Mat;

const EIG_TOL: f64 = 1e-6;
const RANK_TOL: f64 = 1e-7;

/// Whether a real matrix commutes with some complex structure: for every
/// real eigenvalue, Jordan blocks of each size come in pairs.
pub fn complexifiable(n: &Mat<f64>) -> bool {
    let dim = n.rows();
    if !dim.is_multiple_of(2) {
        return false;
    }
    let scale = 1.0 + n.max_abs();
    for mu in real_eigenvalues(n, scale) {
        let shifted = n - &Mat::identity(dim).scale(&mu);
        let mut ranks = vec![dim];
        let mut power = Mat::identity(dim);
        for k in 1..=dim + 1 {
            power = &power * &shifted;
            ranks.push(power.rank(RANK_TOL * scale.powi(k as i32)));
        }
        for k in 1..=dim {
            let at_least_k = ranks[k - 1] - ranks[k];
            let at_least_k1 = ranks[k] - ranks[k + 1];
            if (at_least_k - at_least_k1) % 2 != 0 {
                return false;
            }
        }
    }
    true
}

/// Distinct real eigenvalues, clustered.
fn real_eigenvalues(m: &Mat<f64>, scale: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for z in m.eigenvalues() {
        if z.im.abs() > EIG_TOL.sqrt() * scale {
            continue;
        }
        if !out.iter().any(|x| (x - z.re).abs() <= EIG_TOL.sqrt() * scale) {
            out.push(z.re);
        }
    }
    out
}

/// Whether `ad_X|_n = m` admits a balanced Hermitian structure: an invariant
/// line `ℝx` and a complementary invariant hyperplane `n₁ = ker φ` with
/// `m x = (tr m) x` and `m|_{n₁}` complexifiable.
pub fn balanced_structure_exists(m: &Mat<f64>) -> bool {
    let dim = m.rows();
    let scale = 1.0 + m.max_abs();
    let lambda = m.trace();
    let shifted = m - &Mat::identity(dim).scale(&lambda);
    let right = shifted.null_space(EIG_TOL);
    let left = shifted.transpose().null_space(EIG_TOL);
    if right.is_empty() || left.is_empty() || shifted.singular_values().last().copied().unwrap_or(0.0) > EIG_TOL * scale
    {
        return false;
    }
    candidate_functionals(&left).into_iter().any(|phi| {
        let pairs = right.iter().any(|x| dot(&phi, x).abs() > EIG_TOL);
        pairs && complexifiable(&restrict_to_kernel(m, &phi))
    })
}

/// Basis functionals of the left eigenspace and a few fixed combinations.
fn candidate_functionals(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = basis.to_vec();
    let dim = basis[0].len();
    if basis.len() > 1 {
        for weights in [[1.0, 1.0, 1.0], [1.0, -1.0, 0.5], [0.3, 0.7, -1.1]] {
            let mut v = vec![0.0; dim];
            for (b, w) in basis.iter().zip(weights.iter().cycle()) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += w * bi;
                }
            }
            out.push(v);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `m` restricted to the invariant hyperplane `ker φ`, in an orthonormal basis.
fn restrict_to_kernel(m: &Mat<f64>, phi: &[f64]) -> Mat<f64> {
    let dim = m.rows();
    let basis = Mat::from_rows(&[phi.to_vec()]).null_space(1e-12);
    let b = Mat::from_fn(dim, basis.len(), |i, j| basis[j][i]);
    &(&b.transpose() * m) * &b
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub params: Vec<f64>,
    pub table_unimodular: bool,
    pub computed_unimodular: bool,
    pub table_balanced: bool,
    pub computed_balanced: bool,
}

impl GridPoint {
    pub fn agrees(&self) -> bool {
        self.table_unimodular == self.computed_unimodular && self.table_balanced == self.computed_balanced
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub name: String,
    pub points: Vec<GridPoint>,
    pub mismatches: usize,
}

impl Table1Report {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && !self.points.is_empty()
    }
}

/// Compares the recorded unimodular and balanced conditions of `name` with
/// direct computation on the given grid (one value list per parameter).
pub fn table1_verify(name: &str, grid: &[&[f64]]) -> Result<Table1Report> {
    let e = entry(name)?;
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for axis in grid {
        points = points.into_iter().flat_map(|p| axis.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    let points: Vec<GridPoint> = points
        .into_par_iter()
        .filter(|p| e.check_params(p).is_ok())
        .map(|p| {
            let c = construct(name, &p).expect("admissible parameters");
            let m = c.ad_on_ideal();
            GridPoint {
                table_unimodular: e.unimodular_condition(&p),
                computed_unimodular: m.trace().abs() <= 1e-12,
                table_balanced: e.balanced_condition(&p),
                computed_balanced: balanced_structure_exists(&m),
                params: p,
            }
        })
        .collect();
    let mismatches = points.iter().filter(|p| !p.agrees()).count();
    Ok(Table1Report { name: name.into(), points, mismatches })
}

/// Runs [`table1_verify`] on every table row with its built-in grid.
pub fn table1_verify_all() -> Result<Vec<Table1Report>> {
    entries().iter().filter(|e| e.family == Family::Table).map(|e| table1_verify(e.name, e.grid())).collect()
}

//! Named six-dimensional almost abelian Lie algebras admitting balanced
//! structures, with constructors, a balanced-existence verifier and a lattice
//! obstruction scan.

mod entries;
mod lattice;
mod table;

pub use entries::{entries, entry, Family};
pub use lattice::{lattice_scan, lattice_scan_matrix, LatticeHit, LatticeScanReport};
pub use table::{balanced_structure_exists, complexifiable, table1_verify, table1_verify_all, GridPoint, Table1Report};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{HermitianStructure, LieAlgebra};
use crate::linalg::Mat;
use crate::scalar::{Rational, Scalar};

/// One structure equation `d f^k = Σ c f^{ij}`, 0-based.
pub type Equation = (usize, Vec<(usize, usize, Rational)>);

/// A catalog entry: a parametrized family of structure equations with its
/// parameter constraints and the recorded unimodular and balanced conditions.
#[derive(Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    pub params: &'static [&'static str],
    pub constraint: &'static str,
    pub equations: &'static str,
    pub unimodular: &'static str,
    pub balanced: &'static str,
    #[serde(skip)]
    pub(crate) admissible: fn(&[f64]) -> bool,
    #[serde(skip)]
    pub(crate) unimodular_pred: fn(&[f64]) -> bool,
    #[serde(skip)]
    pub(crate) balanced_pred: fn(&[f64]) -> bool,
    #[serde(skip)]
    pub(crate) build: fn(&[Rational]) -> Vec<Equation>,
    #[serde(skip)]
    pub(crate) grid: &'static [&'static [f64]],
    /// Index of the basis vector spanning a complement of the abelian ideal.
    #[serde(skip)]
    pub(crate) distinguished: usize,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl CatalogEntry {
    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::ConstraintViolation {
                entry: self.name.into(),
                constraint: format!("expected {} parameter(s) {:?}", self.params.len(), self.params),
            });
        }
        if params.iter().any(|p| !p.is_finite()) || !(self.admissible)(params) {
            return Err(Error::ConstraintViolation { entry: self.name.into(), constraint: self.constraint.into() });
        }
        Ok(())
    }

    /// The recorded unimodularity condition at `params`.
    pub fn unimodular_condition(&self, params: &[f64]) -> bool {
        (self.unimodular_pred)(params)
    }

    /// The recorded balanced-existence condition at `params`.
    pub fn balanced_condition(&self, params: &[f64]) -> bool {
        (self.balanced_pred)(params)
    }

    /// The parameter grid used by the table verifier.
    pub fn grid(&self) -> &'static [&'static [f64]] {
        self.grid
    }

    /// Reads named parameters, in the entry's order.
    pub fn params_from_named(&self, named: &[(String, f64)]) -> Result<Vec<f64>> {
        for (k, _) in named {
            if !self.params.contains(&k.as_str()) {
                return Err(Error::InvalidInput(format!("{} has no parameter `{}`", self.name, k)));
            }
        }
        self.params
            .iter()
            .map(|p| {
                named.iter().find(|(k, _)| k == p).map(|(_, v)| *v).ok_or_else(|| Error::ConstraintViolation {
                    entry: self.name.into(),
                    constraint: format!("missing parameter `{p}`"),
                })
            })
            .collect()
    }

    pub fn structure_equations(&self, params: &[Rational]) -> Vec<Equation> {
        (self.build)(params)
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }
}

/// An entry realized as structure constants, with its canonical Hermitian
/// structure when that structure is integrable.
#[derive(Clone, Debug)]
pub struct Constructed<S: Scalar> {
    pub name: &'static str,
    pub algebra: LieAlgebra<S>,
    pub hermitian: Option<HermitianStructure<S>>,
    /// Index of the basis vector complementary to the abelian ideal.
    pub distinguished: usize,
}

impl<S: Scalar> Constructed<S> {
    /// Matrix of `ad` of the distinguished vector on the ideal, in the
    /// remaining basis vectors.
    pub fn ad_on_ideal(&self) -> Mat<S> {
        let d = self.distinguished;
        let ideal: Vec<usize> = (0..self.algebra.dim()).filter(|&i| i != d).collect();
        self.algebra.ad_basis(d).submatrix(&ideal, &ideal)
    }
}

/// Builds `name` at `params` in floating point.
pub fn construct(name: &str, params: &[f64]) -> Result<Constructed<f64>> {
    let exact: Vec<Rational> = params.iter().map(|p| Rational::from_f64(*p)).collect();
    let e = entry(name)?;
    e.check_params(params)?;
    let c = construct_exact_unchecked(e, &exact)?;
    Ok(Constructed {
        name: c.name,
        algebra: c.algebra.map(rational_to_f64),
        hermitian: c.hermitian.map(|h| h.map(rational_to_f64)),
        distinguished: c.distinguished,
    })
}

/// Builds `name` at rational `params` in exact arithmetic.
pub fn construct_exact(name: &str, params: &[Rational]) -> Result<Constructed<Rational>> {
    let e = entry(name)?;
    let approx: Vec<f64> = params.iter().map(rational_to_f64).collect();
    e.check_params(&approx)?;
    construct_exact_unchecked(e, params)
}

fn construct_exact_unchecked(e: &CatalogEntry, params: &[Rational]) -> Result<Constructed<Rational>> {
    let algebra = LieAlgebra::from_differentials(6, &e.structure_equations(params));
    if algebra.jacobi_residual() > 0.0 {
        return Err(Error::JacobiViolation { residual: algebra.jacobi_residual() });
    }
    let (j, g) = canonical_structure(e.family);
    let hermitian = if algebra.nijenhuis_residual(&j) == 0.0 { Some(HermitianStructure::new(j, g)?) } else { None };
    Ok(Constructed { name: e.name, algebra, hermitian, distinguished: e.distinguished })
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_c64().re
}

/// `J f_1 = f_2, J f_3 = f_4, J f_5 = f_6` with the identity metric; for the
/// nilpotent entry `J f_2 = f_3, J f_4 = f_1, J f_5 = f_6` with `|f_5| = |f_6| = √2`.
fn canonical_structure(family: Family) -> (Mat<Rational>, Mat<Rational>) {
    let one = || Rational::from_i64(1);
    let mut j = Mat::zeros(6, 6);
    let pairs: [(usize, usize); 3] = match family {
        Family::Nilpotent => [(1, 2), (3, 0), (4, 5)],
        _ => [(0, 1), (2, 3), (4, 5)],
    };
    for (x, y) in pairs {
        j[(y, x)] = one();
        j[(x, y)] = -one();
    }
    let g = match family {
        Family::Nilpotent => {
            let two = Rational::from_i64(2);
            Mat::diagonal(&[one(), one(), one(), one(), two.clone(), two])
        }
        _ => Mat::identity(6),
    };
    (j, g)
}

/// Prints structure equations in the compact `(f16, pf26, …)` notation.
pub fn format_equations(l: &LieAlgebra<Rational>) -> String {
    let n = l.dim();
    let forms = l.structure_forms();
    let parts: Vec<String> = (0..n)
        .map(|k| {
            let mut s = String::new();
            for (idx, c) in forms[k].terms() {
                let label = format!("f{}{}", idx[0] + 1, idx[1] + 1);
                let neg = c < Rational::from_i64(0);
                let mag = if neg { -c.clone() } else { c.clone() };
                if neg {
                    s.push('-');
                } else if !s.is_empty() {
                    s.push('+');
                }
                if mag != Rational::from_i64(1) {
                    s.push_str(&mag.to_string());
                }
                s.push_str(&label);
            }
            if s.is_empty() {
                "0".into()
            } else {
                s
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests;

//! JSON input schema.
//!
//! An input document gives the algebra either as structure constants
//!
//! ```json
//! { "dim": 6, "structure_constants": [[1, 2, 5, -1.0]], "J": [[...]], "metric": [[...]] }
//! ```
//!
//! where `[i, j, k, c]` (1-based) means `[e_i, e_j] = ... + c e_k`, or as
//! almost abelian data in an adapted unitary basis
//!
//! ```json
//! { "almost_abelian": { "n": 3, "a": 0.0, "v": [0, 0, 0, 0], "A": [[...]] } }
//! ```
//!
//! `J` defaults to `J e_i = e_{2n+1-i}` and `metric` to the identity.

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::lie::{adapted_data, standard_j, AlmostAbelianData, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlmostAbelianInput {
    pub n: usize,
    pub a: f64,
    pub v: Vec<f64>,
    #[serde(rename = "A")]
    pub a_mat: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub almost_abelian: Option<AlmostAbelianInput>,
    #[serde(default, rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

/// A validated Hermitian almost abelian Lie algebra: the structure in the
/// input coordinates together with its `(a, v, A)` data.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub algebra: LieAlgebra<f64>,
    pub hermitian: HermitianStructure<f64>,
    pub data: AlmostAbelianData,
}

impl Resolved {
    pub fn from_data(data: AlmostAbelianData) -> Self {
        let (algebra, hermitian) = data.to_lie();
        Self { algebra, hermitian, data }
    }

    pub fn from_structure(algebra: LieAlgebra<f64>, hermitian: HermitianStructure<f64>) -> Result<Self> {
        let scale = 1.0 + algebra.table().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let jac = algebra.jacobi_residual();
        if jac > 1e-9 * scale * scale {
            return Err(Error::JacobiViolation { residual: jac });
        }
        let nij = algebra.nijenhuis_residual(&hermitian.j);
        if nij > 1e-9 * scale {
            return Err(Error::NonIntegrable { residual: nij });
        }
        let data = adapted_data(&algebra, &hermitian)?;
        Ok(Self { algebra, hermitian, data })
    }

    /// The canonical Hermitian structure of a catalog entry.
    pub fn from_catalog(name: &str, params: &[f64]) -> Result<Self> {
        let c = catalog::construct(name, params)?;
        let h = c.hermitian.ok_or_else(|| {
            Error::InvalidInput(format!("{name} has no integrable canonical complex structure at these parameters"))
        })?;
        Self::from_structure(c.algebra, h)
    }
}

fn matrix(rows: &[Vec<f64>], size: usize, what: &str) -> Result<Mat<f64>> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidInput(format!("{what} must be a {size}x{size} matrix")));
    }
    Ok(Mat::from_rows(rows))
}

fn index(x: f64, dim: usize) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 || x > dim as f64 {
        return Err(Error::InvalidInput(format!("structure constant index {x} outside 1..={dim}")));
    }
    Ok(x as usize - 1)
}

impl AlgebraInput {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        match (&self.structure_constants, &self.almost_abelian) {
            (Some(_), Some(_)) | (None, None) => Err(Error::InvalidInput(
                "give exactly one of `structure_constants` and `almost_abelian`".into(),
            )),
            (None, Some(aa)) => {
                if self.j.is_some() || self.metric.is_some() || self.dim.is_some() {
                    return Err(Error::InvalidInput(
                        "`almost_abelian` input is already in an adapted basis; drop `dim`, `J` and `metric`".into(),
                    ));
                }
                let m = (2 * aa.n).saturating_sub(2);
                let a_mat = matrix(&aa.a_mat, m, "A")?;
                Ok(Resolved::from_data(AlmostAbelianData::new(aa.n, aa.a, aa.v.clone(), a_mat)?))
            }
            (Some(sc), None) => {
                let dim = match self.dim {
                    Some(d) => d,
                    None => sc.iter().flat_map(|r| r[..3].iter()).fold(0.0_f64, |m, x| m.max(*x)) as usize,
                };
                if dim < 4 || dim % 2 != 0 {
                    return Err(Error::InvalidInput(format!("dimension {dim} must be even and at least 4")));
                }
                let mut table = vec![0.0; dim * dim * dim];
                for r in sc {
                    let (i, j, k) = (index(r[0], dim)?, index(r[1], dim)?, index(r[2], dim)?);
                    if i == j {
                        if r[3] != 0.0 {
                            return Err(Error::InvalidInput(format!("nonzero [e_{0}, e_{0}]", i + 1)));
                        }
                        continue;
                    }
                    table[(i * dim + j) * dim + k] = r[3];
                    table[(j * dim + i) * dim + k] = -r[3];
                }
                let algebra = LieAlgebra::from_table(dim, table)?;
                let j = match &self.j {
                    Some(rows) => matrix(rows, dim, "J")?,
                    None => standard_j(dim),
                };
                let g = match &self.metric {
                    Some(rows) => matrix(rows, dim, "metric")?,
                    None => Mat::identity(dim),
                };
                Resolved::from_structure(algebra, HermitianStructure::new(j, g)?)
            }
        }
    }
}

/// Reads and resolves an input file.
pub fn read_input(path: &std::path::Path) -> Result<Resolved> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    AlgebraInput::from_json(&text)?.resolve()
}

/// Nonzero structure constants `[i, j, k, c]`, 1-based, `i < j`.
pub fn structure_constants_list(l: &LieAlgebra<f64>) -> Vec<[f64; 4]> {
    let dim = l.dim();
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            for k in 0..dim {
                let c = l.constant(i, j, k);
                if c != 0.0 {
                    out.push([(i + 1) as f64, (j + 1) as f64, (k + 1) as f64, c]);
                }
            }
        }
    }
    out
}

/// Input document describing `l` with structure `h`.
pub fn to_input(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> AlgebraInput {
    let rows = |m: &Mat<f64>| (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect();
    AlgebraInput {
        dim: Some(l.dim()),
        structure_constants: Some(structure_constants_list(l)),
        almost_abelian: None,
        j: Some(rows(&h.j)),
        metric: Some(rows(&h.g)),
    }
}

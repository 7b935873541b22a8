//! Balanced flow (closed-form bracket flow and metric-level oracle),
//! soliton detection and the rescaled anomaly flow.

pub mod anomaly;
pub mod balanced;
pub mod bracket;
pub mod ode;

use std::fmt::Write as _;

use serde::Serialize;

pub use anomaly::{anomaly_flow, anomaly_rhs, psi_norm};
pub use balanced::{balanced_flow_metric, q_oracle, q_oracle_endomorphism};
pub use bracket::{
    bracket_flow, q_endomorphism, soliton_check, BracketState, QEndomorphism, SolitonCertificate, SolitonKind,
};
pub use ode::OdeOptions;

use crate::error::Result;
use crate::hermitian::lee_form;
use crate::lie::{adapted_data, HermitianStructure, LieAlgebra};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Bracket,
    Balanced,
    Anomaly,
}

/// Scalars recorded at every accepted step. `p` and `w` are `NaN` outside
/// complex dimension three.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub a: f64,
    #[serde(rename = "A")]
    pub a_mat: Mat<f64>,
    pub p: f64,
    pub w: f64,
    pub norm_a_plus_sq: f64,
    /// `a² + ‖A‖²`.
    pub energy: f64,
    pub trace_a: f64,
    /// Largest coefficient of the Lee form.
    pub lee_residual: f64,
}

impl Diagnostics {
    /// Reads `(a, v, A)` off `(L, J, G)` in an adapted unitary basis.
    pub fn of_metric(l: &LieAlgebra<f64>, h: &HermitianStructure<f64>) -> Result<Self> {
        let d = adapted_data(l, h)?;
        let (p, w) = if d.n == 3 {
            let q = bracket::q_endomorphism_unchecked(d.a, &d.a_mat);
            (q.p, q.w)
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(Self {
            a: d.a,
            p,
            w,
            norm_a_plus_sq: d.a_plus().norm_sq(),
            energy: d.a * d.a + d.a_mat.norm_sq(),
            trace_a: d.trace_a(),
            lee_residual: lee_form(&d).max_abs(),
            a_mat: d.a_mat,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    /// Metric Gram matrix for metric-level flows.
    pub metric: Option<Mat<f64>>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowTrajectory {
    pub kind: FlowKind,
    pub n: usize,
    pub samples: Vec<FlowSample>,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectories hold the initial sample")
    }

    /// One row per accepted step: `t, a, A (row-major), p, w, norm_Asym,
    /// energy, trace_A, lee_residual` and, for metric flows, the upper
    /// triangle of `G`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let first = &self.samples[0];
        let m = first.diagnostics.a_mat.rows();
        let mut header = vec!["t".to_string(), "a".to_string()];
        for i in 0..m {
            for j in 0..m {
                header.push(format!("A{}{}", i + 1, j + 1));
            }
        }
        for h in ["p", "w", "norm_Asym", "energy", "trace_A", "lee_residual"] {
            header.push(h.into());
        }
        if let Some(g) = &first.metric {
            for i in 0..g.rows() {
                for j in i..g.cols() {
                    header.push(format!("g{}_{}", i + 1, j + 1));
                }
            }
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.samples {
            let d = &s.diagnostics;
            let mut row = vec![s.t, d.a];
            row.extend(d.a_mat.as_slice());
            row.extend([d.p, d.w, d.norm_a_plus_sq, d.energy, d.trace_a, d.lee_residual]);
            if let Some(g) = &s.metric {
                for i in 0..g.rows() {
                    for j in i..g.cols() {
                        row.push(g[(i, j)]);
                    }
                }
            }
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

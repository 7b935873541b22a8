use serde::Serialize;

use super::{CatalogEntry, Equation};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Non-nilpotent algebras with balanced but no Kähler structures (`b1`–`b9`).
    Balanced,
    /// Complex-structure classes with their balanced conditions (`k*`).
    Table,
    /// The nilpotent algebra `(0,0,0,0,f12,f13)`.
    Nilpotent,
}

const EQ_TOL: f64 = 1e-12;

fn eq(x: f64, y: f64) -> bool {
    (x - y).abs() <= EQ_TOL
}

fn r(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// Equations with every term of the form `c f^{i6}`: `rows[k]` lists `(c, i)`
/// for `d f^{k+1}`, with `i` 1-based.
fn ad6(rows: [Vec<(Rational, usize)>; 5]) -> Vec<Equation> {
    rows.into_iter()
        .enumerate()
        .map(|(k, terms)| (k, terms.into_iter().map(|(c, i)| (i - 1, 5, c)).collect()))
        .collect()
}

fn diag5(d: [Rational; 5]) -> Vec<Equation> {
    let [a, b, c, e, f] = d;
    ad6([vec![(a, 1)], vec![(b, 2)], vec![(c, 3)], vec![(e, 4)], vec![(f, 5)]])
}

fn never(_: &[f64]) -> bool {
    false
}

fn always(_: &[f64]) -> bool {
    true
}

fn build_b1(p: &[Rational]) -> Vec<Equation> {
    let p = p[0].clone();
    diag5([r(1), p.clone(), p.clone(), -p.clone(), -p])
}

fn build_b2(_: &[Rational]) -> Vec<Equation> {
    ad6([vec![(r(1), 1)], vec![(r(1), 3)], vec![], vec![(r(1), 5)], vec![]])
}

fn build_b3(x: &[Rational]) -> Vec<Equation> {
    let (p, q) = (x[0].clone(), x[1].clone());
    ad6([
        vec![(p, 1)],
        vec![(q.clone(), 2)],
        vec![(q.clone(), 3)],
        vec![(-q.clone(), 4), (r(1), 5)],
        vec![(r(-1), 4), (-q, 5)],
    ])
}

fn build_b4(x: &[Rational]) -> Vec<Equation> {
    let (p, q, s) = (x[0].clone(), x[1].clone(), x[2].clone());
    ad6([
        vec![(p, 1)],
        vec![(q.clone(), 2), (r(1), 3)],
        vec![(r(-1), 2), (q.clone(), 3)],
        vec![(-q.clone(), 4), (s.clone(), 5)],
        vec![(-s, 4), (-q, 5)],
    ])
}

fn build_b5(x: &[Rational]) -> Vec<Equation> {
    ad6([
        vec![(x[0].clone(), 1)],
        vec![(r(1), 3), (r(-1), 4)],
        vec![(r(-1), 2), (r(-1), 5)],
        vec![(r(1), 5)],
        vec![(r(-1), 4)],
    ])
}

fn build_b6(_: &[Rational]) -> Vec<Equation> {
    diag5([r(1), r(1), r(-1), r(-1), r(0)])
}

fn build_b7(x: &[Rational]) -> Vec<Equation> {
    let rr = x[0].clone();
    ad6([
        vec![(r(1), 1)],
        vec![(r(1), 2)],
        vec![(r(-1), 3), (rr.clone(), 4)],
        vec![(-rr, 3), (r(-1), 4)],
        vec![],
    ])
}

fn build_b8(x: &[Rational]) -> Vec<Equation> {
    let (p, rr) = (x[0].clone(), x[1].clone());
    ad6([
        vec![(p.clone(), 1), (r(1), 2)],
        vec![(r(-1), 1), (p.clone(), 2)],
        vec![(-p.clone(), 3), (rr.clone(), 4)],
        vec![(-rr, 3), (-p, 4)],
        vec![],
    ])
}

fn build_b9(_: &[Rational]) -> Vec<Equation> {
    ad6([
        vec![(r(1), 2), (r(-1), 3)],
        vec![(r(-1), 1), (r(-1), 4)],
        vec![(r(1), 4)],
        vec![(r(-1), 3)],
        vec![],
    ])
}

fn build_k1(x: &[Rational]) -> Vec<Equation> {
    let (p, rr) = (x[0].clone(), x[1].clone());
    diag5([r(1), p.clone(), p, rr.clone(), rr])
}

fn build_k3(x: &[Rational]) -> Vec<Equation> {
    let (q, s) = (x[0].clone(), x[1].clone());
    diag5([r(1), r(1), q.clone(), q, s])
}

fn build_k6(x: &[Rational]) -> Vec<Equation> {
    let p = x[0].clone();
    ad6([
        vec![(r(1), 1)],
        vec![(p.clone(), 2), (r(1), 3)],
        vec![(p.clone(), 3)],
        vec![(p.clone(), 4), (r(1), 5)],
        vec![(p, 5)],
    ])
}

fn build_k8(x: &[Rational]) -> Vec<Equation> {
    let (p, q, s) = (x[0].clone(), x[1].clone(), x[2].clone());
    ad6([
        vec![(p, 1)],
        vec![(q.clone(), 2)],
        vec![(q, 3)],
        vec![(s.clone(), 4), (r(1), 5)],
        vec![(r(-1), 4), (s, 5)],
    ])
}

fn build_k9(x: &[Rational]) -> Vec<Equation> {
    let (p, rr, s) = (x[0].clone(), x[1].clone(), x[2].clone());
    ad6([
        vec![(p.clone(), 1)],
        vec![(p, 2)],
        vec![(rr, 3)],
        vec![(s.clone(), 4), (r(1), 5)],
        vec![(r(-1), 4), (s, 5)],
    ])
}

fn build_k11(x: &[Rational]) -> Vec<Equation> {
    let (p, q, rr, s) = (x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone());
    ad6([
        vec![(p, 1)],
        vec![(q.clone(), 2), (r(1), 3)],
        vec![(r(-1), 2), (q, 3)],
        vec![(rr.clone(), 4), (s.clone(), 5)],
        vec![(-s, 4), (rr, 5)],
    ])
}

fn build_k12(x: &[Rational]) -> Vec<Equation> {
    let (p, q) = (x[0].clone(), x[1].clone());
    ad6([
        vec![(p, 1)],
        vec![(q.clone(), 2), (r(1), 3), (r(-1), 4)],
        vec![(r(-1), 2), (q.clone(), 3), (r(-1), 5)],
        vec![(q.clone(), 4), (r(1), 5)],
        vec![(r(-1), 4), (q, 5)],
    ])
}

fn build_k20(x: &[Rational]) -> Vec<Equation> {
    let q = x[0].clone();
    diag5([r(1), r(1), q.clone(), q, r(0)])
}

fn build_k22(x: &[Rational]) -> Vec<Equation> {
    let (q, rr) = (x[0].clone(), x[1].clone());
    ad6([
        vec![(r(1), 1)],
        vec![(r(1), 2)],
        vec![(q.clone(), 3), (rr.clone(), 4)],
        vec![(-rr, 3), (q, 4)],
        vec![],
    ])
}

fn build_k25(x: &[Rational]) -> Vec<Equation> {
    let (p, q, rr) = (x[0].clone(), x[1].clone(), x[2].clone());
    ad6([
        vec![(p.clone(), 1), (r(1), 2)],
        vec![(r(-1), 1), (p, 2)],
        vec![(q.clone(), 3), (rr.clone(), 4)],
        vec![(-rr, 3), (q, 4)],
        vec![],
    ])
}

fn build_k26(x: &[Rational]) -> Vec<Equation> {
    let p = x[0].clone();
    ad6([
        vec![(p.clone(), 1), (r(1), 2), (r(-1), 3)],
        vec![(r(-1), 1), (p.clone(), 2), (r(-1), 4)],
        vec![(p.clone(), 3), (r(1), 4)],
        vec![(r(-1), 3), (p, 4)],
        vec![],
    ])
}

fn build_nilpotent(_: &[Rational]) -> Vec<Equation> {
    vec![(4, vec![(0, 1, r(1))]), (5, vec![(0, 2, r(1))])]
}

const NONZERO: &[f64] = &[1.0, -1.0, 0.5, 2.0, -0.75];
const ANY: &[f64] = &[0.0, 1.0, -1.0, 0.5, -0.5];
const NO_GRID: &[&[f64]] = &[];

macro_rules! entry {
    ($name:expr, $fam:ident, [$($p:expr),*], $cons:expr, $eqs:expr, $uni:expr, $bal:expr,
     $adm:expr, $upred:expr, $bpred:expr, $build:expr, $grid:expr) => {
        CatalogEntry {
            name: $name,
            family: Family::$fam,
            params: &[$($p),*],
            constraint: $cons,
            equations: $eqs,
            unimodular: $uni,
            balanced: $bal,
            admissible: $adm,
            unimodular_pred: $upred,
            balanced_pred: $bpred,
            build: $build,
            grid: $grid,
            distinguished: 5,
        }
    };
}

static ENTRIES: &[CatalogEntry] = &[
    entry!("b1", Balanced, ["p"], "p != 0", "(f16,pf26,pf36,-pf46,-pf56,0)", "never", "always",
        |x| x[0] != 0.0, never, always, build_b1, &[NONZERO]),
    entry!("b2", Balanced, [], "none", "(f16,f36,0,f56,0,0)", "never", "always",
        always, never, always, build_b2, NO_GRID),
    entry!("b3", Balanced, ["p", "q"], "pq != 0", "(pf16,qf26,qf36,-qf46+f56,-f46-qf56,0)", "never", "always",
        |x| x[0] * x[1] != 0.0, never, always, build_b3, &[NONZERO, NONZERO]),
    entry!("b4", Balanced, ["p", "q", "s"], "pqs != 0",
        "(pf16,qf26+f36,-f26+qf36,-qf46+sf56,-sf46-qf56,0)", "never", "always",
        |x| x[0] * x[1] * x[2] != 0.0, never, always, build_b4, &[NONZERO, NONZERO, NONZERO]),
    entry!("b5", Balanced, ["p"], "p != 0", "(pf16,f36-f46,-f26-f56,f56,-f46,0)", "never", "always",
        |x| x[0] != 0.0, never, always, build_b5, &[NONZERO]),
    entry!("b6", Balanced, [], "none", "(f16,f26,-f36,-f46,0,0)", "always", "always",
        always, always, always, build_b6, NO_GRID),
    entry!("b7", Balanced, ["r"], "r != 0", "(f16,f26,-f36+rf46,-rf36-f46,0,0)", "always", "always",
        |x| x[0] != 0.0, always, always, build_b7, &[NONZERO]),
    entry!("b8", Balanced, ["p", "r"], "pr != 0", "(pf16+f26,-f16+pf26,-pf36+rf46,-rf36-pf46,0,0)",
        "always", "always", |x| x[0] * x[1] != 0.0, always, always, build_b8, &[NONZERO, NONZERO]),
    entry!("b9", Balanced, [], "none", "(f26-f36,-f16-f46,f46,-f36,0,0)", "always", "always",
        always, always, always, build_b9, NO_GRID),
    entry!("k1", Table, ["p", "r"], "1 >= |p| >= |r| > 0", "(f16,pf26,pf36,rf46,rf56,0)",
        "1+2p+2r=0", "p+r=0",
        |x| 1.0 >= x[0].abs() && x[0].abs() >= x[1].abs() && x[1] != 0.0,
        |x| eq(1.0 + 2.0 * x[0] + 2.0 * x[1], 0.0), |x| eq(x[0] + x[1], 0.0), build_k1,
        &[&[1.0, -1.0, 0.5, -0.5, -0.25], &[-1.0, -0.5, 0.5, -0.25, 0.25]]),
    entry!("k3", Table, ["q", "s"], "1 >= |q| > |s| > 0", "(f16,f26,qf36,qf46,sf56,0)",
        "2+2q+s=0", "q=-1",
        |x| 1.0 >= x[0].abs() && x[0].abs() > x[1].abs() && x[1] != 0.0,
        |x| eq(2.0 + 2.0 * x[0] + x[1], 0.0), |x| eq(x[0], -1.0), build_k3,
        &[&[1.0, -1.0, 0.5, -0.5, -0.75], &[0.5, -0.5, 0.25, -0.25, -0.125]]),
    entry!("k6", Table, ["p"], "none", "(f16,pf26+f36,pf36,pf46+f56,pf56,0)", "p=-1/4", "p=0",
        always, |x| eq(x[0], -0.25), |x| eq(x[0], 0.0), build_k6,
        &[&[0.0, -0.25, 1.0, -1.0, 0.5]]),
    entry!("k8", Table, ["p", "q", "s"], "|p| >= |q| > 0", "(pf16,qf26,qf36,sf46+f56,-f46+sf56,0)",
        "p+2q+2s=0", "q+s=0",
        |x| x[0].abs() >= x[1].abs() && x[1] != 0.0,
        |x| eq(x[0] + 2.0 * x[1] + 2.0 * x[2], 0.0), |x| eq(x[1] + x[2], 0.0), build_k8,
        &[&[1.0, -1.0, 2.0, 0.5, -2.0], &[0.5, -0.5, 1.0, -1.0, 0.25], &[-0.5, 0.5, 1.0, -1.0, 0.0]]),
    entry!("k9", Table, ["p", "r", "s"], "|p| > |r| > 0", "(pf16,pf26,rf36,sf46+f56,-f46+sf56,0)",
        "2p+r+2s=0", "p+s=0",
        |x| x[0].abs() > x[1].abs() && x[1] != 0.0,
        |x| eq(2.0 * x[0] + x[1] + 2.0 * x[2], 0.0), |x| eq(x[0] + x[2], 0.0), build_k9,
        &[&[1.0, -1.0, 2.0, 0.5, -2.0], &[0.5, -0.5, 0.25, 1.0, -1.0], &[-1.0, 1.0, 0.5, -0.5, -0.75]]),
    entry!("k11", Table, ["p", "q", "r", "s"], "ps != 0",
        "(pf16,qf26+f36,-f26+qf36,rf46+sf56,-sf46+rf56,0)", "p+2q+2r=0", "q+r=0",
        |x| x[0] * x[3] != 0.0,
        |x| eq(x[0] + 2.0 * x[1] + 2.0 * x[2], 0.0), |x| eq(x[1] + x[2], 0.0), build_k11,
        &[&[1.0, -1.0, 2.0, 0.5, -2.0], ANY, ANY, &[1.0, -1.0, 2.0, 0.5, -0.5]]),
    entry!("k12", Table, ["p", "q"], "p != 0",
        "(pf16,qf26+f36-f46,-f26+qf36-f56,qf46+f56,-f46+qf56,0)", "p+4q=0", "q=0",
        |x| x[0] != 0.0, |x| eq(x[0] + 4.0 * x[1], 0.0), |x| eq(x[1], 0.0), build_k12,
        &[&[1.0, -1.0, 2.0, 0.5, -2.0], &[0.0, -0.25, 0.25, 0.5, -0.5]]),
    entry!("k20", Table, ["q"], "1 >= |q| > 0", "(f16,f26,qf36,qf46,0,0)", "q=-1", "q=-1",
        |x| 1.0 >= x[0].abs() && x[0] != 0.0, |x| eq(x[0], -1.0), |x| eq(x[0], -1.0), build_k20,
        &[&[1.0, -1.0, 0.5, -0.5, 0.25]]),
    entry!("k22", Table, ["q", "r"], "r != 0", "(f16,f26,qf36+rf46,-rf36+qf46,0,0)", "q=-1", "q=-1",
        |x| x[1] != 0.0, |x| eq(x[0], -1.0), |x| eq(x[0], -1.0), build_k22,
        &[&[-1.0, 1.0, 0.0, 0.5, -0.5], &[1.0, -1.0, 2.0, 0.5, -0.5]]),
    entry!("k25", Table, ["p", "q", "r"], "r != 0", "(pf16+f26,-f16+pf26,qf36+rf46,-rf36+qf46,0,0)",
        "p+q=0", "p+q=0",
        |x| x[2] != 0.0, |x| eq(x[0] + x[1], 0.0), |x| eq(x[0] + x[1], 0.0), build_k25,
        &[ANY, ANY, &[1.0, -1.0, 2.0, 0.5, -0.5]]),
    entry!("k26", Table, ["p"], "none", "(pf16+f26-f36,-f16+pf26-f46,pf36+f46,-f36+pf46,0,0)", "p=0", "p=0",
        always, |x| eq(x[0], 0.0), |x| eq(x[0], 0.0), build_k26, &[ANY]),
    CatalogEntry {
        name: "nilpotent",
        family: Family::Nilpotent,
        params: &[],
        constraint: "none",
        equations: "(0,0,0,0,f12,f13)",
        unimodular: "always",
        balanced: "always",
        admissible: always,
        unimodular_pred: always,
        balanced_pred: always,
        build: build_nilpotent,
        grid: NO_GRID,
        distinguished: 0,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownEntry(name.into()))
}

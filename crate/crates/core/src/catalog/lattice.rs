use rayon::prelude::*;
use serde::Serialize;

use super::construct;
use crate::error::Result;
use crate::linalg::Mat;
use crate::scalar::{Scalar, C64};

const CLUSTER_TOL: f64 = 1e-6;
const MERGE_TOL: f64 = 1e-9;
const INTEGER_TOL: f64 = 1e-10;

/// A time `t₀` at which `exp(t₀ M)` has an integer minimal polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeHit {
    pub k: u64,
    pub t0: f64,
    /// Which candidate family produced `t₀`: `-ln k`, `ln k` or `arccosh(k/2)`.
    pub candidate: &'static str,
    /// Coefficients of the minimal polynomial, constant term first.
    pub min_poly: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeScanReport {
    pub name: String,
    pub params: Vec<f64>,
    pub k_max: u64,
    pub candidates_checked: usize,
    pub hits: Vec<LatticeHit>,
}

impl LatticeScanReport {
    pub fn obstructed(&self) -> bool {
        self.hits.is_empty()
    }
}

/// Spectral data of `M`: distinct eigenvalues with their largest Jordan block.
fn spectral_data(m: &Mat<f64>) -> Vec<(C64, usize)> {
    let dim = m.rows();
    let scale = 1.0 + m.max_abs();
    let mut distinct: Vec<C64> = Vec::new();
    for z in m.eigenvalues() {
        if !distinct.iter().any(|w| (w - z).norm() <= CLUSTER_TOL.sqrt() * scale) {
            distinct.push(z);
        }
    }
    let mc = m.map(Scalar::to_c64);
    distinct
        .into_iter()
        .map(|mu| {
            let shifted = &mc - &Mat::identity(dim).scale(&mu);
            let mut power = Mat::identity(dim);
            let mut prev = dim;
            let mut size = dim;
            for k in 1..=dim {
                power = &power * &shifted;
                let r = power.rank(CLUSTER_TOL * scale.powi(k as i32));
                if r == prev {
                    size = k - 1;
                    break;
                }
                prev = r;
            }
            (mu, size.max(1))
        })
        .collect()
}

/// Minimal polynomial of `exp(t M)` (constant term first) from spectral data.
fn exp_min_poly(spectrum: &[(C64, usize)], t: f64) -> Vec<C64> {
    let mut nodes: Vec<(C64, usize)> = Vec::new();
    for (mu, s) in spectrum {
        let nu = (mu * t).exp();
        match nodes.iter_mut().find(|(w, _)| (w - nu).norm() <= MERGE_TOL * nu.norm().max(1.0)) {
            Some(node) => node.1 = node.1.max(*s),
            None => nodes.push((nu, *s)),
        }
    }
    let mut poly = vec![C64::new(1.0, 0.0)];
    for (nu, s) in nodes {
        for _ in 0..s {
            let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * nu;
            }
            poly = next;
        }
    }
    poly
}

fn integral(poly: &[C64]) -> Option<Vec<i64>> {
    poly.iter()
        .map(|c| {
            let tol = INTEGER_TOL * c.norm().max(1.0);
            let r = c.re.round();
            (c.im.abs() <= tol && (c.re - r).abs() <= tol).then_some(r as i64)
        })
        .collect()
}

/// Scans `t₀ ∈ {−ln k, ln k, ±arccosh(k/2)}` for `k = 2..=k_max`, reporting the
/// values at which `exp(t₀ M)` has an integer minimal polynomial. The absence of
/// hits obstructs integer conjugates of `exp(t₀ M)` at these `t₀`.
pub fn lattice_scan_matrix(m: &Mat<f64>, k_max: u64) -> (usize, Vec<LatticeHit>) {
    let spectrum = spectral_data(m);
    let per_k: Vec<Vec<(u64, f64, &'static str)>> = (2..=k_max.max(1))
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let mut c = vec![(k, -kf.ln(), "-ln k"), (k, kf.ln(), "ln k")];
            if k >= 3 {
                let t = (kf / 2.0).acosh();
                c.push((k, t, "arccosh(k/2)"));
                c.push((k, -t, "-arccosh(k/2)"));
            }
            c
        })
        .collect();
    let candidates: Vec<(u64, f64, &'static str)> = per_k.into_iter().flatten().collect();
    let hits = candidates
        .par_iter()
        .filter_map(|&(k, t0, candidate)| {
            integral(&exp_min_poly(&spectrum, t0)).map(|min_poly| LatticeHit { k, t0, candidate, min_poly })
        })
        .collect();
    (candidates.len(), hits)
}

/// [`lattice_scan_matrix`] applied to `ad` of the distinguished vector of a
/// catalog entry on its abelian ideal.
pub fn lattice_scan(name: &str, params: &[f64], k_max: u64) -> Result<LatticeScanReport> {
    let c = construct(name, params)?;
    let (candidates_checked, hits) = lattice_scan_matrix(&c.ad_on_ideal(), k_max);
    Ok(LatticeScanReport { name: name.into(), params: params.to_vec(), k_max, candidates_checked, hits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_poly_of_exponential_matches_direct_expansion() {
        // M = diag(1, 1, -1, -1, 0): exp(tM) has minimal polynomial
        // λ³ − (s+1)λ² + (s+1)λ − 1 with s = e^t + e^{−t}.
        let m = Mat::diagonal(&[1.0, 1.0, -1.0, -1.0, 0.0]);
        let spectrum = spectral_data(&m);
        let t: f64 = 0.4;
        let s = t.exp() + (-t).exp();
        let p = exp_min_poly(&spectrum, t);
        let expected = [-1.0, s + 1.0, -(s + 1.0), 1.0];
        assert_eq!(p.len(), 4);
        for (c, e) in p.iter().zip(expected) {
            assert!((c.re - e).abs() < 1e-12 && c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn jordan_blocks_raise_multiplicity() {
        let mut m = Mat::zeros(3, 3);
        m[(0, 1)] = 1.0;
        let spectrum = spectral_data(&m);
        assert_eq!(spectrum.len(), 1);
        assert_eq!(spectrum[0].1, 2);
        assert_eq!(exp_min_poly(&spectrum, 1.0).len(), 3);
    }

    #[test]
    fn abelian_admits_every_candidate() {
        let (checked, hits) = lattice_scan_matrix(&Mat::zeros(5, 5), 10);
        assert_eq!(hits.len(), checked);
        assert!(hits.iter().all(|h| h.min_poly == vec![-1, 1]));
    }
}

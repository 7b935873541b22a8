use super::*;
use crate::connections::{curvature, gauduchon, holonomy_span, CurvatureForms};
use crate::exterior::GradedForm;
use crate::hermitian::classify;
use crate::lie::adapted_data;
use crate::scalar::rat;

fn curvature_entry(name: &str, params: &[Rational]) -> (CurvatureForms<Rational>, Constructed<Rational>) {
    let c = construct_exact(name, params).unwrap();
    let h = c.hermitian.clone().expect("canonical structure is integrable");
    let conn = gauduchon(&c.algebra, &h, &rat(-1, 1)).unwrap();
    (curvature(&conn, &c.algebra), c)
}

/// `(i, j, terms)` with 1-based indices and `terms = [(num, den, a, b)]` for `(num/den) f^{ab}`.
type Golden = [(usize, usize, &'static [(i64, i64, usize, usize)]); 8];

fn check_golden(curv: &CurvatureForms<Rational>, golden: &Golden, scale: &Rational) {
    for (i, j, terms) in golden {
        let mut expected = GradedForm::zero(6, 2);
        for (num, den, a, b) in terms.iter() {
            expected = &expected + &GradedForm::monomial(6, &[a - 1, b - 1], rat(*num, *den) * scale.clone());
        }
        assert_eq!(curv.get(i - 1, j - 1), &expected, "Omega^{i}_{j}");
    }
}

const B6_TABLE: Golden = [
    (1, 2, &[(-2, 1, 1, 2)]),
    (1, 3, &[(1, 1, 1, 3), (1, 1, 2, 4)]),
    (1, 4, &[(1, 1, 1, 4), (-1, 1, 2, 3)]),
    (1, 5, &[(-1, 1, 1, 5), (-1, 1, 2, 6)]),
    (2, 5, &[(1, 1, 1, 6), (-1, 1, 2, 5)]),
    (3, 4, &[(-2, 1, 3, 4)]),
    (3, 5, &[(-1, 1, 3, 5), (-1, 1, 4, 6)]),
    (4, 5, &[(1, 1, 3, 6), (-1, 1, 4, 5)]),
];

// Ω^1_2 is pinned by the su(3) trace condition Ω^1_2 + Ω^3_4 + Ω^5_6 = 0.
const B9_TABLE: Golden = [
    (1, 2, &[(-1, 2, 3, 4), (-1, 2, 5, 6)]),
    (1, 3, &[(1, 4, 1, 3), (1, 4, 2, 4)]),
    (1, 4, &[(-1, 4, 1, 4), (1, 4, 2, 3)]),
    (1, 5, &[(-1, 4, 1, 5), (1, 4, 2, 6)]),
    (2, 5, &[(-1, 4, 1, 6), (-1, 4, 2, 5)]),
    (3, 4, &[(-1, 2, 1, 2), (1, 2, 5, 6)]),
    (3, 5, &[(-1, 4, 3, 5), (-3, 4, 4, 6)]),
    (4, 5, &[(3, 4, 3, 6), (-1, 4, 4, 5)]),
];

#[test]
fn b6_bismut_curvature_matches_golden_table() {
    let (curv, c) = curvature_entry("b6", &[]);
    check_golden(&curv, &B6_TABLE, &rat(1, 1));
    let hol = holonomy_span(&curv, c.hermitian.as_ref().unwrap());
    assert_eq!(hol.dimension, 8);
    assert!(hol.su_contained);
}

#[test]
fn b8_bismut_curvature_is_b6_table_scaled_by_p_squared() {
    // p = 1, r = 1; the table scales by p².
    let (curv, c) = curvature_entry("b8", &[rat(1, 1), rat(1, 1)]);
    check_golden(&curv, &B6_TABLE, &rat(1, 1));
    for (p, r) in [(rat(2, 1), rat(1, 1)), (rat(1, 2), rat(-3, 1))] {
        let (curv, _) = curvature_entry("b8", &[p.clone(), r]);
        check_golden(&curv, &B6_TABLE, &(p.clone() * p));
    }
    let hol = holonomy_span(&curv, c.hermitian.as_ref().unwrap());
    assert_eq!(hol.dimension, 8);
    assert!(hol.su_contained);
}

#[test]
fn b9_bismut_curvature_matches_golden_table() {
    let (curv, c) = curvature_entry("b9", &[]);
    check_golden(&curv, &B9_TABLE, &rat(1, 1));
    let trace = &(curv.get(0, 1) + curv.get(2, 3)) + curv.get(4, 5);
    assert_eq!(trace, GradedForm::zero(6, 2));
    let hol = holonomy_span(&curv, c.hermitian.as_ref().unwrap());
    assert_eq!(hol.dimension, 8);
    assert!(hol.su_contained);
}

fn psi_differential(name: &str, params: &[f64]) -> f64 {
    use crate::exterior::ce_differential;
    use crate::scalar::C64;
    let c = construct(name, params).unwrap();
    let l = c.algebra.to_c64();
    let f = |a: usize, b: usize| &GradedForm::<C64>::covector(6, a) + &GradedForm::<C64>::covector(6, b).scale(&C64::new(0.0, 1.0));
    let psi = f(0, 1).wedge(&f(2, 3)).wedge(&f(4, 5));
    ce_differential(&l, &psi).unwrap().max_abs()
}

#[test]
fn three_zero_form_is_closed_on_b6_and_b8() {
    assert!(psi_differential("b6", &[]) < 1e-14);
    // With J f_1 = f_2, J f_3 = f_4 the holomorphic traces p − i and −p − ir
    // cancel exactly when r = −1.
    for p in [1.0, 0.5, -2.0] {
        assert!(psi_differential("b8", &[p, -1.0]) < 1e-14);
        assert!((psi_differential("b8", &[p, 1.0]) - 2.0).abs() < 1e-12);
    }
}

#[test]
fn canonical_structures_are_balanced_where_supplied() {
    for (name, params) in [("b6", vec![]), ("b8", vec![1.0, 1.0]), ("b9", vec![]), ("nilpotent", vec![])] {
        let c = construct(name, &params).unwrap();
        let h = c.hermitian.expect("integrable");
        let d = adapted_data(&c.algebra, &h).unwrap();
        let report = classify(&d).unwrap();
        assert_eq!(report.balanced, Some(true), "{name}");
        assert!(!report.kahler, "{name}");
    }
    let c = construct("b6", &[]).unwrap();
    let d = adapted_data(&c.algebra, c.hermitian.as_ref().unwrap()).unwrap();
    let report = classify(&d).unwrap();
    assert!(!report.skt);
    assert!(report.obstruction[0].abs() < 1e-12 && report.obstruction[1].abs() < 1e-12);
}

#[test]
fn every_entry_satisfies_jacobi_and_prints_back_its_equations() {
    for e in entries() {
        let grid_point: Vec<f64> = e.grid().iter().map(|axis| axis[0]).collect();
        let params: Vec<Rational> = grid_point.iter().map(|p| Rational::from_f64(*p)).collect();
        let c = construct_exact(e.name, &params).unwrap();
        assert_eq!(c.algebra.jacobi_residual(), 0.0, "{}", e.name);
        if e.params.is_empty() {
            assert_eq!(format_equations(&c.algebra), e.equations);
        }
    }
}

#[test]
fn printed_equations_substitute_parameters() {
    let c = construct_exact("b8", &[rat(2, 1), rat(-1, 2)]).unwrap();
    assert_eq!(format_equations(&c.algebra), "(2f16+f26,-f16+2f26,-2f36-1/2f46,1/2f36-2f46,0,0)");
    let c = construct_exact("b1", &[rat(3, 1)]).unwrap();
    assert_eq!(format_equations(&c.algebra), "(f16,3f26,3f36,-3f46,-3f56,0)");
}

#[test]
fn unimodular_entries_are_exactly_b6_to_b9() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for e in entries().iter().filter(|e| e.family == Family::Balanced) {
        for _ in 0..20 {
            let params: Vec<f64> = loop {
                let p: Vec<f64> = e.params.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
                if e.check_params(&p).is_ok() {
                    break p;
                }
            };
            let c = construct(e.name, &params).unwrap();
            let uni = c.algebra.is_unimodular(1e-12);
            assert_eq!(uni, ["b6", "b7", "b8", "b9"].contains(&e.name), "{} {params:?}", e.name);
            assert!(balanced_structure_exists(&c.ad_on_ideal()), "{} {params:?}", e.name);
        }
    }
}

#[test]
fn constraints_are_enforced() {
    assert!(matches!(construct("b1", &[0.0]), Err(Error::ConstraintViolation { .. })));
    assert!(matches!(construct("k1", &[0.5, 1.0]), Err(Error::ConstraintViolation { .. })));
    assert!(matches!(construct("b1", &[]), Err(Error::ConstraintViolation { .. })));
    assert!(matches!(construct("b10", &[]), Err(Error::UnknownEntry(_))));
    assert!(construct("k1", &[1.0, -1.0]).is_ok());
}

#[test]
fn table_rows_match_recorded_conditions() {
    for report in table1_verify_all().unwrap() {
        let bad: Vec<_> = report.points.iter().filter(|p| !p.agrees()).collect();
        assert!(report.passed(), "{}: {:?}", report.name, bad);
    }
}

#[test]
fn table_examples() {
    let r = table1_verify("k20", &[&[-1.0, 0.5]]).unwrap();
    assert!(r.points[0].computed_balanced && !r.points[1].computed_balanced);
    let r = table1_verify("k12", &[&[1.0], &[0.0, 0.5]]).unwrap();
    assert!(r.points[0].computed_balanced && !r.points[1].computed_balanced);
    let r = table1_verify("k6", &[&[-0.25, 0.0]]).unwrap();
    assert!(r.points[0].computed_unimodular && !r.points[0].computed_balanced);
    assert!(!r.points[1].computed_unimodular && r.points[1].computed_balanced);
    let r = table1_verify("k1", &[&[1.0], &[-1.0]]).unwrap();
    assert!(r.points[0].computed_balanced);
}

#[test]
fn b7_admits_no_integral_time() {
    for r in [1.0, 0.5, -2.0, std::f64::consts::PI] {
        let report = lattice_scan("b7", &[r], 10_000).unwrap();
        assert!(report.obstructed(), "r = {r}: {:?}", report.hits.first());
    }
}

#[test]
fn b6_scan_finds_golden_ratio_time() {
    let report = lattice_scan("b6", &[], 10).unwrap();
    let t = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert!(report.hits.iter().any(|h| (h.t0 - t).abs() < 1e-12 && h.k == 3));
}


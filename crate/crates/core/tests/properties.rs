use aal_core::exterior::{
    adjoint_operator, apply_j, apply_matrix, basis_masks, ce_differential, differential_matrix, type_decomposition,
    Dolbeault, Metric,
};
use aal_core::flows::bracket::{b_coordinates, energy_rate, p_w_from_b};
use aal_core::flows::q_endomorphism;
use aal_core::hermitian::{lee_form, lee_form_hodge, ricci_bismut, ricci_chern};
use aal_core::samples::{j_commuting, random_data, unitary_algebra, SampleClass};
use aal_core::{GradedForm, Mat, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn form(dim: usize, k: usize, coeffs: &[f64]) -> GradedForm<f64> {
    let len = basis_masks(dim, k).len();
    GradedForm::from_coefficients(dim, k, coeffs.iter().cycle().take(len).cloned().collect())
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..24)
}

fn random_metric(seed: u64, dim: usize) -> Mat<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = Mat::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
    &(&b.transpose() * &b) + &Mat::identity(dim)
}

fn traceless_pattern(seed: u64) -> Mat<f64> {
    let m = j_commuting(&mut ChaCha8Rng::seed_from_u64(seed), 4);
    &m - &Mat::identity(4).scale(&(m.trace() / 4.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(k in 0usize..4, l in 0usize..3, x in coeffs(), y in coeffs()) {
        let (a, b) = (form(6, k, &x), form(6, l, &y));
        let sign = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((&a.wedge(&b) - &b.wedge(&a).scale(&sign)).max_abs() < 1e-12);
    }

    #[test]
    fn wedge_is_associative(x in coeffs(), y in coeffs(), z in coeffs()) {
        let (a, b, c) = (form(6, 1, &x), form(6, 2, &y), form(6, 2, &z));
        prop_assert!((&a.wedge(&b).wedge(&c) - &a.wedge(&b.wedge(&c))).max_abs() < 1e-11);
    }

    #[test]
    fn d_squared_vanishes(seed: u64, n in 2usize..4, k in 0usize..4, x in coeffs()) {
        let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), n, SampleClass::Generic);
        let (l, _) = d.to_lie();
        let a = form(2 * n, k, &x);
        let dd = ce_differential(&l, &ce_differential(&l, &a).unwrap()).unwrap();
        prop_assert!(dd.max_abs() < 1e-11);
    }

    #[test]
    fn double_star_sign(seed: u64, k in 0usize..7, x in coeffs()) {
        let metric = Metric::new(&random_metric(seed, 6)).unwrap();
        let a = form(6, k, &x);
        let sign = if (k * (6 - k)) % 2 == 0 { 1.0 } else { -1.0 };
        let ss = metric.hodge_star(&metric.hodge_star(&a));
        prop_assert!((&ss - &a.scale(&sign)).max_abs() < 1e-9);
    }

    #[test]
    fn codifferential_is_adjoint(seed: u64, k in 0usize..5, x in coeffs(), y in coeffs()) {
        let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), 3, SampleClass::Generic);
        let (l, _) = d.to_lie();
        let metric = Metric::new(&random_metric(seed ^ 0x5a5a, 6)).unwrap();
        let dm = differential_matrix(&l, k).map(|v| C64::new(*v, 0.0));
        let dstar = adjoint_operator(&dm, &metric.gram(k), &metric.gram(k + 1)).unwrap();
        let a = form(6, k, &x).to_c64();
        let b = form(6, k + 1, &y).to_c64();
        let lhs = metric.inner(&apply_matrix(&dm, &a, k + 1), &b);
        let rhs = metric.inner(&a, &apply_matrix(&dstar, &b, k));
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn type_components_sum_and_delbar_raises_q(seed: u64, k in 1usize..4, x in coeffs()) {
        let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), 3, SampleClass::Generic);
        let (l, h) = d.to_lie();
        let a = form(6, k, &x);
        let dec = type_decomposition(&h.j, &a);
        prop_assert!((&dec.sum().unwrap() - &a.to_c64()).max_abs() < 1e-12);
        let dol = Dolbeault::new(&l, &h.j).unwrap();
        for p in 0..=k {
            let Some(part) = dec.get(p, k - p) else { continue };
            let out = type_decomposition(&h.j, &dol.delbar(part));
            for pp in 0..=k + 1 {
                if pp == p {
                    continue;
                }
                if let Some(c) = out.get(pp, k + 1 - pp) {
                    prop_assert!(c.max_abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn lee_form_oracle(seed: u64, n in 2usize..5) {
        let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), n, SampleClass::Generic);
        let (l, h) = d.to_lie();
        prop_assert!((&lee_form_hodge(&l, &h).unwrap() - &lee_form(&d)).max_abs() < 1e-10);
    }

    #[test]
    fn chern_bismut_ricci_identity(seed: u64, n in 2usize..5) {
        let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), n, SampleClass::Generic);
        let (l, h) = d.to_lie();
        let djt = ce_differential(&l, &apply_j(&h.j, &lee_form(&d))).unwrap();
        prop_assert!((&(&ricci_chern(&d) - &ricci_bismut(&d)) + &djt).max_abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn p_nonpositive_w_nonnegative(seed: u64, a in -3.0..3.0f64, s in 0.01..5.0f64) {
        let m = traceless_pattern(seed).scale(&s);
        let q = q_endomorphism(a, &m).unwrap();
        let scale = (1.0 + a * a + m.norm_sq()).powi(2);
        prop_assert!(q.p <= 1e-13 * scale);
        prop_assert!(q.w >= -1e-13 * scale);
    }

    #[test]
    fn b_coordinates_reproduce_p_and_w(seed: u64, a in -3.0..3.0f64) {
        let m = traceless_pattern(seed);
        let q = q_endomorphism(a, &m).unwrap();
        let (p, w) = p_w_from_b(a, &b_coordinates(&m));
        prop_assert!((p - q.p).abs() < 1e-10 && (w - q.w).abs() < 1e-10);
    }

    #[test]
    fn unitary_matrices_are_fixed(seed: u64, a in -3.0..3.0f64) {
        let m = unitary_algebra(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let q = q_endomorphism(a, &m).unwrap();
        prop_assert!(q.p.abs() < 1e-12 && q.big_p.max_abs() < 1e-12);
    }

    #[test]
    fn energy_rate_matches_the_vector_field(seed: u64, a in -3.0..3.0f64) {
        // d/dt (a² + ‖A‖²) with ȧ = p a and Ȧ = [A, P] + p A.
        let m = traceless_pattern(seed);
        let q = q_endomorphism(a, &m).unwrap();
        let a_dot = q.p * a;
        let m_dot = &m.commutator(&q.big_p) + &m.scale(&q.p);
        let direct = 2.0 * a * a_dot + 2.0 * m.as_slice().iter().zip(m_dot.as_slice()).map(|(x, y)| x * y).sum::<f64>();
        prop_assert!((direct - energy_rate(a, &m)).abs() < 1e-10 * (1.0 + direct.abs()));
    }
}

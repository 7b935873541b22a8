//! Seeded random almost abelian data in each metric class.

use rand::Rng;
use serde::Serialize;

use crate::lie::{standard_j, AlmostAbelianData};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleClass {
    Generic,
    Balanced,
    Kahler,
    Lck,
    /// Balanced with a closed `(n,0)`-form.
    BalancedClosed,
}

impl std::str::FromStr for SampleClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "generic" => Self::Generic,
            "balanced" => Self::Balanced,
            "kahler" => Self::Kahler,
            "lck" => Self::Lck,
            "balanced-closed" | "balanced_closed" => Self::BalancedClosed,
            _ => return Err(format!("unknown class `{s}`")),
        })
    }
}

fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..1.0)
}

fn random_matrix<R: Rng>(rng: &mut R, m: usize) -> Mat<f64> {
    Mat::from_fn(m, m, |_, _| uniform(rng))
}

/// A random `J₁`-commuting matrix with entries of order one.
pub fn j_commuting<R: Rng>(rng: &mut R, m: usize) -> Mat<f64> {
    AlmostAbelianData::j_commuting_part(&random_matrix(rng, m))
}

/// A random element of `u(m/2)`: skew and `J₁`-commuting.
pub fn unitary_algebra<R: Rng>(rng: &mut R, m: usize) -> Mat<f64> {
    j_commuting(rng, m).skew_part()
}

fn remove_trace(a: &Mat<f64>) -> Mat<f64> {
    let m = a.rows();
    a - &Mat::identity(m).scale(&(a.trace() / m as f64))
}

fn remove_j_trace(a: &Mat<f64>) -> Mat<f64> {
    let m = a.rows();
    let j = standard_j::<f64>(m);
    a + &j.scale(&((&j * a).trace() / m as f64))
}

/// Random data of complex dimension `n` in the given class.
pub fn random_data<R: Rng>(rng: &mut R, n: usize, class: SampleClass) -> AlmostAbelianData {
    let m = 2 * n - 2;
    let a = 1.5 * uniform(rng);
    let (a, v, a_mat) = match class {
        SampleClass::Generic => (a, (0..m).map(|_| uniform(rng)).collect(), j_commuting(rng, m)),
        SampleClass::Balanced => (a, vec![0.0; m], remove_trace(&j_commuting(rng, m))),
        SampleClass::Kahler => (a, vec![0.0; m], unitary_algebra(rng, m)),
        SampleClass::Lck => {
            // The closed (n,0)-form condition fixes the trace, so LCK samples
            // have a + tr A_C = 0.
            let u = remove_j_trace(&unitary_algebra(rng, m));
            let lambda = -a / (n - 1) as f64;
            (a, vec![0.0; m], &Mat::identity(m).scale(&lambda) + &u)
        }
        SampleClass::BalancedClosed => (0.0, vec![0.0; m], remove_j_trace(&remove_trace(&j_commuting(rng, m)))),
    };
    AlmostAbelianData::new(n, a, v, a_mat).expect("sampled matrices commute with J1")
}

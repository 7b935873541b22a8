//! Embedded Dormand–Prince 5(4) integrator with adaptive step size.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
    /// Steps shorter than `h_min_rel · max(1, |t|)` abort the integration.
    pub h_min_rel: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h0: None, max_steps: 1_000_000, h_min_rel: 1e-13 }
    }
}

impl OdeOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rtol > 0.0 && self.atol > 0.0 && self.rtol.is_finite() && self.atol.is_finite();
        if !ok {
            return Err(Error::InvalidInput("tolerances must be positive and finite".into()));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction) and
/// returns every accepted step, starting with `(t0, y0)`. `observe` is
/// called on each accepted state and may abort the integration.
pub fn dopri5<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    O: FnMut(f64, &[f64]) -> Result<()>,
{
    opts.validate()?;
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    observe(t, &y)?;
    let mut out = vec![(t, y.clone())];
    if t_end == t0 {
        return Ok(out);
    }
    let err_norm = |y: &[f64], y_new: &[f64], e: &[f64]| -> f64 {
        let s: f64 = (0..n)
            .map(|i| {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                (e[i] / sc).powi(2)
            })
            .sum();
        (s / n.max(1) as f64).sqrt()
    };
    let mut k1 = f(t, &y)?;
    let span = (t_end - t0).abs();
    let mut h = opts.h0.unwrap_or_else(|| {
        let d0 = err_norm(&y, &y, &y);
        let d1 = err_norm(&y, &y, &k1);
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        guess.min(span)
    });
    let mut steps = 0;
    while (t_end - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { t, max_steps: opts.max_steps });
        }
        h = h.min((t_end - t).abs());
        if h < opts.h_min_rel * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h, last_state: y });
        }
        let mut k = vec![k1.clone()];
        let mut stage_failed = None;
        for s in 1..7 {
            let ys: Vec<f64> =
                (0..n).map(|i| y[i] + dir * h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
            match f(t + dir * C[s] * h, &ys) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => k.push(v),
                Ok(_) => {
                    stage_failed = Some(None);
                    break;
                }
                Err(e) if e.is_numerical() => {
                    stage_failed = Some(Some(e));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        steps += 1;
        if let Some(err) = stage_failed {
            // Shrink and retry; a persistent failure ends in underflow.
            let _ = err;
            h *= 0.25;
            continue;
        }
        let y_new: Vec<f64> = (0..n).map(|i| y[i] + dir * h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>()).collect();
        let e: Vec<f64> = (0..n).map(|i| dir * h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>()).collect();
        let err = err_norm(&y, &y_new, &e);
        if err <= 1.0 {
            t += dir * h;
            if (t_end - t) * dir < h * 1e-12 {
                t = t_end;
            }
            y = y_new;
            k1 = k[6].clone();
            observe(t, &y)?;
            out.push((t, y.clone()));
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = dopri5(|_, y| Ok(vec![-y[0]]), 0.0, &[1.0], 5.0, &OdeOptions::default(), |_, _| Ok(())).unwrap();
        let (t, y) = out.last().unwrap();
        assert_eq!(*t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let f = |_: f64, y: &[f64]| Ok(vec![y[1], -y[0]]);
        let out = dopri5(f, 0.0, &[1.0, 0.0], -3.0, &OdeOptions::default(), |_, _| Ok(())).unwrap();
        let (_, y) = out.last().unwrap();
        assert!((y[0] - 3f64.cos()).abs() < 1e-8);
        assert!((y[1] - 3f64.sin()).abs() < 1e-8);
        assert!(out.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn blow_up_is_reported_as_underflow() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let err = dopri5(|_, y| Ok(vec![y[0] * y[0]]), 0.0, &[1.0], 2.0, &OdeOptions::default(), |_, _| Ok(()))
            .unwrap_err();
        match err {
            Error::StepSizeUnderflow { t, .. } => assert!((t - 1.0).abs() < 1e-3),
            Error::TooManySteps { t, .. } => assert!((t - 1.0).abs() < 1e-3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerances() {
        let opts = OdeOptions { rtol: 0.0, ..OdeOptions::default() };
        assert!(dopri5(|_, y| Ok(y.to_vec()), 0.0, &[1.0], 1.0, &opts, |_, _| Ok(())).is_err());
    }
}

//! Adaptive Dormand–Prince 5(4) integrator with FSAL and a per-step hook.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h0: None, h_min: 1e-14, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl OdeStats {
    pub fn merge(&mut self, other: &OdeStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
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
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn scaled_norm(err: &[f64], y0: &[f64], y1: &[f64], opts: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<F>(f: &mut F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, opts: &OdeOptions, span: f64) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let zeros = vec![0.0; y0.len()];
    let d0 = scaled_norm(y0, &zeros, y0, opts);
    let d1 = scaled_norm(f0, &zeros, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, k)| y + dir * h0 * k).collect();
    let mut f1 = vec![0.0; y0.len()];
    f(t0 + dir * h0, &y1, &mut f1);
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&df, &zeros, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction) and
/// returns `y(t1)`. `check` runs after every accepted step and can abort
/// the integration by returning an error.
pub fn dopri5<F, G>(mut f: F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOptions, stats: &mut OdeStats, mut check: G) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: FnMut(f64, &[f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(y);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t0, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = match opts.h0 {
        Some(h) => h.abs().min(span),
        None => {
            stats.evaluations += 1;
            let first = k[0].clone();
            initial_step(&mut f, t0, &y, &first, dir, opts, span)
        }
    };
    let mut t = t0;
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        steps += 1;
        let last = h >= (t1 - t).abs();
        if last {
            h = (t1 - t).abs();
        }
        let hs = dir * h;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = y[i] + hs * acc;
            }
            f(t + C[s] * hs, &stage, &mut k[s]);
        }
        stats.evaluations += 6;
        // the last stage point is the fifth-order solution
        y_new.copy_from_slice(&stage);
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += E[j] * kj[i];
            }
            err[i] = hs * acc;
        }
        let en = scaled_norm(&err, &y, &y_new, opts);
        if !en.is_finite() {
            h *= 0.2;
            stats.rejected += 1;
            if h < opts.h_min {
                return Err(Error::StepUnderflow { t, h });
            }
            continue;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        if en <= 1.0 {
            t = if last { t1 } else { t + hs };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
            check(t, &y)?;
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= fac.min(1.0);
            if h < opts.h_min {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_check(_: f64, _: &[f64]) -> Result<()> {
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let mut stats = OdeStats::default();
        let y = dopri5(|_, y, dy| dy[0] = -y[0], 0.0, &[1.0], 3.0, &opts, &mut stats, no_check).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-12);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let mut stats = OdeStats::default();
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let y = dopri5(rhs, 0.0, &[1.0, 0.0], -2.0, &opts, &mut stats, no_check).unwrap();
        assert!((y[0] - 2.0f64.cos()).abs() < 1e-11);
        assert!((y[1] - 2.0f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn time_dependent_rhs() {
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let mut stats = OdeStats::default();
        let y = dopri5(|t, _, dy| dy[0] = t.cos(), 0.0, &[0.0], 1.5, &opts, &mut stats, no_check).unwrap();
        assert!((y[0] - 1.5f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn check_hook_aborts() {
        let opts = OdeOptions::default();
        let mut stats = OdeStats::default();
        let err = dopri5(
            |_, _, dy| dy[0] = 1.0,
            0.0,
            &[0.0],
            10.0,
            &opts,
            &mut stats,
            |t, _| if t > 1.0 { Err(Error::CollisionDetected { t, i: 0, j: 1 }) } else { Ok(()) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::CollisionDetected { .. }));
    }

    #[test]
    fn blowup_reports_step_underflow() {
        let opts = OdeOptions { h_min: 1e-10, ..Default::default() };
        let mut stats = OdeStats::default();
        let err = dopri5(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], 2.0, &opts, &mut stats, no_check).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }
}

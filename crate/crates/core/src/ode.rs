//! Adaptive Dormand–Prince 5(4) integrator with PI step control.

use crate::error::{NcolError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    /// Upper bound on |h|.
    pub h_max: f64,
    pub max_steps: usize,
    /// Record only the points of a uniform grid with this spacing
    /// (steps are clipped to land on it). Every accepted step is recorded
    /// when `None`.
    pub grid: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            grid: None,
        }
    }
}

/// Recorded solution: times, states and the right-hand side at each state.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
    /// True when the stop predicate ended the run before `t_end`.
    pub stopped: bool,
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
// 5th-order weights are the last row of A; E = b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y′ = f(t, y) from t0 to t_end (either direction).
///
/// `stop(t, y)` is checked after each accepted step; `project(t, y)` may
/// modify the accepted state in place (and may fail) before it is recorded.
pub fn integrate<F, S, P>(
    f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    mut stop: S,
    mut project: P,
) -> Result<Solution>
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> bool,
    P: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t, &y, &mut k[0]);

    let mut sol = Solution {
        t: vec![t],
        y: vec![y.clone()],
        dy: vec![k[0].clone()],
        stopped: false,
    };
    if span == 0.0 {
        return Ok(sol);
    }

    let mut h = opts.h0.unwrap_or_else(|| initial_step(&y, &k[0], opts)).min(span).min(opts.h_max);
    let mut err_prev: f64 = 1e-4;
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut next_grid = opts.grid.map(|g| g.abs());
    let mut grid_k: usize = 1;

    for _ in 0..opts.max_steps {
        let remaining = (t_end - t) * dir;
        if remaining <= 0.0 {
            return Ok(sol);
        }
        let mut step = h.min(remaining);
        let mut on_grid = false;
        if let Some(g) = next_grid {
            let target = grid_k as f64 * g;
            let to_grid = target - (t - t0) * dir;
            if to_grid <= step * (1.0 + 1e-12) {
                step = to_grid;
                on_grid = true;
            }
        }
        let hs = dir * step;

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + hs * acc;
            }
            f(t + C[s] * hs, &ytmp, &mut k[s]);
            if s == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }

        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (hs * e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if !err.is_finite() {
            h = step * 0.1;
            check_step(h, t)?;
            continue;
        }
        if err <= 1.0 {
            let t_new = if on_grid {
                t0 + dir * grid_k as f64 * next_grid.unwrap_or(0.0)
            } else if step == remaining {
                t_end
            } else {
                t + hs
            };
            t = t_new;
            y.copy_from_slice(&ynew);
            let projected = {
                let before = y.clone();
                project(t, &mut y)?;
                before != y
            };
            if projected {
                f(t, &y, &mut k[0]);
            } else {
                k.swap(0, 6);
            }
            if next_grid.is_none() || on_grid || t == t_end {
                sol.t.push(t);
                sol.y.push(y.clone());
                sol.dy.push(k[0].clone());
            }
            if on_grid {
                grid_k += 1;
            }
            if stop(t, &y) {
                sol.stopped = true;
                return Ok(sol);
            }
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = (step * fac.clamp(0.2, 5.0)).min(opts.h_max);
            // a grid-clipped step says nothing about the natural step size
            if on_grid {
                h = h.max(step);
            }
            err_prev = err.max(1e-4);
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h = step * fac;
            check_step(h, t)?;
        }
        if next_grid.is_some() && grid_k as f64 * next_grid.unwrap() > span * (1.0 + 1e-12) {
            next_grid = None;
        }
    }
    Err(NcolError::StepFailure { tau: t, h })
}

fn check_step(h: f64, t: f64) -> Result<()> {
    if h < 1e-14 * t.abs().max(1.0) {
        return Err(NcolError::StepFailure { tau: t, h });
    }
    Ok(())
}

fn initial_step(y: &[f64], dy: &[f64], opts: &OdeOptions) -> f64 {
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(dy) {
        let sc = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (fi / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = 0.01 * d0 / d1;
    if d0 < 1e-5 || d1 < 1e-5 || !(h > 0.0) || !h.is_finite() {
        1e-6
    } else {
        h.min(1e-1)
    }
}

/// Cubic Hermite interpolation between two recorded states.
pub fn hermite(t0: f64, y0: &[f64], d0: &[f64], t1: f64, y1: &[f64], d1: &[f64], t: f64, out: &mut [f64]) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h * h10 * d0[i] + h01 * y1[i] + h * h11 * d1[i];
    }
}

/// Derivative of the cubic Hermite interpolant.
pub fn hermite_derivative(
    t0: f64,
    y0: &[f64],
    d0: &[f64],
    t1: f64,
    y1: &[f64],
    d1: &[f64],
    t: f64,
    out: &mut [f64],
) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let g00 = 6.0 * s * (s - 1.0) / h;
    let g10 = (1.0 - s) * (1.0 - 3.0 * s);
    let g01 = -g00;
    let g11 = s * (3.0 * s - 2.0);
    for i in 0..out.len() {
        out[i] = g00 * y0[i] + g10 * d0[i] + g01 * y1[i] + g11 * d1[i];
    }
}

impl Solution {
    /// Index i with t[i] ≤ t ≤ t[i+1] (increasing time only).
    pub fn locate(&self, t: f64) -> Option<usize> {
        let n = self.t.len();
        if n < 2 || t < self.t[0] || t > self.t[n - 1] {
            return None;
        }
        let i = self.t.partition_point(|&x| x <= t);
        Some(i.saturating_sub(1).min(n - 2))
    }

    pub fn interpolate(&self, t: f64, out: &mut [f64]) -> Option<()> {
        let i = self.locate(t)?;
        hermite(
            self.t[i], &self.y[i], &self.dy[i], self.t[i + 1], &self.y[i + 1], &self.dy[i + 1], t, out,
        );
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none(_: f64, _: &[f64]) -> bool {
        false
    }
    fn keep(_: f64, _: &mut [f64]) -> Result<()> {
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let sol = integrate(|_, y, d| d[0] = -y[0], 0.0, &[1.0], 5.0, &OdeOptions::default(), none, keep).unwrap();
        let y = sol.y.last().unwrap()[0];
        assert!((y - (-5f64).exp()).abs() < 1e-11);
        assert_eq!(*sol.t.last().unwrap(), 5.0);
    }

    #[test]
    fn harmonic_backward() {
        let f = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let sol = integrate(f, 0.0, &[0.0, 1.0], -3.0, &OdeOptions::default(), none, keep).unwrap();
        let y = sol.y.last().unwrap();
        assert!((y[0] - (-3f64).sin()).abs() < 1e-9);
        assert!((y[1] - (-3f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn uniform_grid_output() {
        let opts = OdeOptions {
            grid: Some(0.25),
            ..Default::default()
        };
        let sol = integrate(|_, y, d| d[0] = y[0], 0.0, &[1.0], 2.0, &opts, none, keep).unwrap();
        assert_eq!(sol.t.len(), 9);
        for (k, t) in sol.t.iter().enumerate() {
            assert!((t - 0.25 * k as f64).abs() < 1e-14);
            assert!((sol.y[k][0] - t.exp()).abs() < 1e-9 * t.exp());
        }
    }

    #[test]
    fn stop_predicate() {
        let sol = integrate(|_, _, d| d[0] = -1.0, 0.0, &[1.0], 10.0, &OdeOptions::default(), |_, y| y[0] < 0.5, keep)
            .unwrap();
        assert!(sol.stopped);
        assert!(*sol.t.last().unwrap() < 10.0);
    }

    #[test]
    fn hermite_is_exact_on_cubics() {
        let p = |t: f64| t * t * t - 2.0 * t + 1.0;
        let dp = |t: f64| 3.0 * t * t - 2.0;
        let mut out = [0.0];
        hermite(0.5, &[p(0.5)], &[dp(0.5)], 1.5, &[p(1.5)], &[dp(1.5)], 0.9, &mut out);
        assert!((out[0] - p(0.9)).abs() < 1e-14);
        hermite_derivative(0.5, &[p(0.5)], &[dp(0.5)], 1.5, &[p(1.5)], &[dp(1.5)], 0.9, &mut out);
        assert!((out[0] - dp(0.9)).abs() < 1e-13);
    }

    #[test]
    fn step_failure_on_blowup() {
        let r = integrate(|_, y, d| d[0] = y[0] * y[0], 0.0, &[1.0], 2.0, &OdeOptions::default(), none, keep);
        assert!(matches!(r, Err(NcolError::StepFailure { .. })));
    }
}

//! Bracketing and bisection for scalar threshold equations.

use crate::error::{NcolError, Result};

/// Evenly spaced points a = x_0 < … < x_n = b.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![a];
    }
    (0..=n)
        .map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 })
        .collect()
}

/// Sub-intervals of a uniform grid on [a, b] across which `f` changes sign.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let xs = linspace(a, b, n);
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    xs.windows(2)
        .zip(vals.windows(2))
        .filter(|(_, v)| v[0] == 0.0 || v[0].signum() != v[1].signum())
        .map(|(x, _)| (x[0], x[1]))
        .collect()
}

/// Bisection on a bracket with a sign change, run to floating-point
/// resolution: it stops when the midpoint coincides with an endpoint.
/// Returns the endpoint with the smaller |f|.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(NcolError::BracketFailure { lo, hi });
    }
    let mut fb = fb;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Scans `n` grid cells of [a, b] and bisects the first sign change.
pub fn scan_and_bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<(f64, (f64, f64))> {
    let brackets = sign_changes(&f, a, b, n);
    let &(lo, hi) = brackets
        .first()
        .ok_or(NcolError::BracketFailure { lo: a, hi: b })?;
    Ok((bisect(&f, lo, hi)?, (lo, hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0),
            Err(NcolError::BracketFailure { .. })
        ));
    }

    #[test]
    fn grid_finds_each_crossing() {
        let c = sign_changes(|x| (3.0 * x).sin(), 0.1, 6.0, 1000);
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.05, 2.0, 7);
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[7], 2.0);
    }
}

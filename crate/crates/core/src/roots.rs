//! Bracketing root finder for real scalar functions.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than
/// `rel_tol·max(|lo|, |hi|)` or stops shrinking in floating point.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::Numerical(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    // 200 halvings exhaust the f64 mantissa for any finite bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans `(lo, hi)` in `steps` equal sub-intervals and bisects every sign
/// change. The open endpoints are never evaluated.
///
/// The caller picks `steps` fine enough that no sub-interval holds two roots;
/// `f` must be continuous on the open interval.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, steps: usize, rel_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || steps == 0 {
        return Err(Error::Numerical(format!("invalid scan range [{lo}, {hi}]")));
    }
    let h = (hi - lo) / steps as f64;
    // Pull the end samples inward so the open endpoints are excluded.
    let inset = h * 1e-9;
    let sample = |i: usize| -> f64 {
        if i == 0 {
            lo + inset
        } else if i == steps {
            hi - inset
        } else {
            lo + h * i as f64
        }
    };

    let mut roots = Vec::new();
    let mut x_prev = sample(0);
    let mut f_prev = f(x_prev);
    for i in 1..=steps {
        let x = sample(i);
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if fx != 0.0 && f_prev.signum() != fx.signum() {
            roots.push(bisect(&f, x_prev, x, rel_tol)?);
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisects_simple_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert!(bisect(|x| x, 1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_finds_all_sine_roots() {
        let roots = scan_roots(f64::sin, 0.0, 10.0, 400, 1e-14).unwrap();
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            let want = std::f64::consts::PI * (k + 1) as f64;
            assert!((r - want).abs() < 1e-12, "{r} vs {want}");
        }
    }

    #[test]
    fn scan_skips_endpoint_roots() {
        // sin vanishes at both ends of [0, π]; neither endpoint is a root.
        let roots = scan_roots(f64::sin, 0.0, std::f64::consts::PI, 64, 1e-14).unwrap();
        assert!(roots.is_empty(), "{roots:?}");
    }
}

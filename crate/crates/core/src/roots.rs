//! Scalar root finding: bracketed bisection, a sign-change scan, and real
//! roots of a quartic through the eigenvalues of its companion matrix.

use nalgebra::Matrix4;

use crate::error::{Error, Result};

/// Stopping rule for [`bisect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Stop once the bracket is at most this wide.
    pub x_abs: f64,
    /// Stop once `|f| <= f_abs`.
    pub f_abs: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            x_abs: 0.0,
            f_abs: 0.0,
            max_iter: 200,
        }
    }
}

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// With `x_abs = 0` the loop runs until the midpoint coincides with an
/// endpoint, i.e. the bracket is two adjacent floats. The returned point is
/// the one with the smallest `|f|` among the evaluated candidates.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut best = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for _ in 0..tol.max_iter {
        if best.1.abs() <= tol.f_abs || hi - lo <= tol.x_abs {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid == 0.0 {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.0)
}

/// First sub-interval of a uniform `n`-point grid on `[lo, hi]` whose right
/// end has a sign different from `f(lo)` (zero counts as a change).
pub fn first_sign_change<F>(f: F, lo: f64, hi: f64, n: usize) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if n < 2 {
        return None;
    }
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    first_sign_change_at(f, &grid)
}

/// Like [`first_sign_change`] but over caller-supplied ascending points.
pub fn first_sign_change_at<F>(mut f: F, points: &[f64]) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let (&lo, rest) = points.split_first()?;
    if rest.is_empty() {
        return None;
    }
    let s0 = f(lo);
    if s0 == 0.0 {
        return Some((lo, lo));
    }
    let mut prev = lo;
    for &x in rest {
        let fx = f(x);
        if fx == 0.0 || fx.signum() != s0.signum() {
            return Some((prev, x));
        }
        prev = x;
    }
    None
}

/// Real roots of `c[0] + c[1] x + c[2] x² + c[3] x³ + c[4] x⁴`, ascending.
///
/// Roots are the eigenvalues of the companion matrix; an eigenvalue counts as
/// real when its imaginary part is below `imag_tol` times its magnitude.
/// A vanishing leading coefficient is not handled and yields no roots.
pub fn quartic_real_roots(c: [f64; 5], imag_tol: f64) -> Vec<f64> {
    let lead = c[4];
    if lead == 0.0 || !lead.is_finite() {
        return Vec::new();
    }
    let n = [c[0] / lead, c[1] / lead, c[2] / lead, c[3] / lead];
    #[rustfmt::skip]
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -n[0],
        1.0, 0.0, 0.0, -n[1],
        0.0, 1.0, 0.0, -n[2],
        0.0, 0.0, 1.0, -n[3],
    );
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Horner evaluation of a polynomial with ascending coefficients.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 4e-16);
    }

    #[test]
    fn bisect_decreasing_function() {
        let r = bisect(|x| 0.3 - x, 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((r - 0.3).abs() < 1e-16);
    }

    #[test]
    fn bisect_respects_x_tolerance() {
        let mut evals = 0;
        let tol = Tolerance {
            x_abs: 1e-3,
            ..Tolerance::default()
        };
        let r = bisect(
            |x| {
                evals += 1;
                x - 0.123456
            },
            0.0,
            1.0,
            tol,
        )
        .unwrap();
        assert!((r - 0.123456).abs() < 1e-3);
        assert!(evals < 15);
    }

    #[test]
    fn bisect_endpoint_roots() {
        assert_eq!(bisect(|x| x, 0.0, 1.0, Tolerance::default()).unwrap(), 0.0);
        assert_eq!(
            bisect(|x| x - 1.0, 0.0, 1.0, Tolerance::default()).unwrap(),
            1.0
        );
    }

    #[test]
    fn bisect_without_bracket_fails() {
        let err = bisect(|x| x * x + 1.0, -1.0, 1.0, Tolerance::default());
        assert!(matches!(err, Err(Error::Bracket { .. })));
    }

    #[test]
    fn scan_finds_first_crossing() {
        // roots at 0.2 and 0.7; start positive
        let f = |x: f64| (x - 0.2) * (x - 0.7);
        let (a, b) = first_sign_change(f, 0.0, 1.0, 101).unwrap();
        assert!(a < 0.2 + 1e-12 && b >= 0.2 - 1e-12);
        assert!(first_sign_change(|x| x + 1.0, 0.0, 1.0, 50).is_none());
        assert!(first_sign_change(|x| x, 0.0, 1.0, 1).is_none());
        let pts = [0.0, 1e-8, 0.5, 1.0];
        assert_eq!(
            first_sign_change_at(|x| (x - 1e-9) * (x - 0.25), &pts),
            Some((0.0, 1e-8))
        );
        assert!(first_sign_change_at(|x| x - 2.0, &[0.0]).is_none());
    }

    #[test]
    fn quartic_known_roots() {
        // (x-1)(x-2)(x+3)(x-0.5) expanded
        let roots = [1.0, 2.0, -3.0, 0.5];
        let mut c = [1.0, 0.0, 0.0, 0.0, 0.0];
        for r in roots {
            let mut next = [0.0; 5];
            for i in 0..5 {
                if i > 0 {
                    next[i] += c[i - 1];
                }
                next[i] -= r * c[i];
            }
            c = next;
        }
        let got = quartic_real_roots(c, 1e-9);
        assert_eq!(got.len(), 4);
        for (g, want) in got.iter().zip([-3.0, 0.5, 1.0, 2.0]) {
            assert!((g - want).abs() < 1e-9, "{g} vs {want}");
        }
    }

    #[test]
    fn quartic_complex_pairs_dropped() {
        // (x² + 1)(x² − 4)
        let got = quartic_real_roots([-4.0, 0.0, -3.0, 0.0, 1.0], 1e-9);
        assert_eq!(got.len(), 2);
        assert!((got[0] + 2.0).abs() < 1e-12 && (got[1] - 2.0).abs() < 1e-12);
        assert!(quartic_real_roots([1.0, 0.0, 0.0, 0.0, 0.0], 1e-9).is_empty());
    }

    #[test]
    fn horner() {
        assert_eq!(poly_eval(&[1.0, 2.0, 3.0], 2.0), 17.0);
        assert_eq!(poly_eval(&[], 2.0), 0.0);
    }
}

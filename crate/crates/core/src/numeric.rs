//! Scalar root finding and minimization.

use crate::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than
/// `rel_tol · max(|lo|, |hi|)` (or an absolute floor of `1e-300`).
///
/// The endpoints must have function values of opposite sign. An exact zero
/// at either endpoint is returned immediately.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket { what });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { what });
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let width = b - a;
        if width <= rel_tol * a.abs().max(b.abs()) || width <= 1e-300 || mid == a || mid == b {
            return Ok(mid);
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
        }
    }
    Err(Error::NoConvergence { what })
}

/// Newton steps from `x`, each rejected if it leaves `[lo, hi]` or fails to
/// reduce the residual.
pub fn newton_polish<F, D>(f: F, df: D, mut x: f64, lo: f64, hi: f64, steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    for _ in 0..steps {
        let fx = f(x);
        let d = df(x);
        if fx == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(next > lo && next < hi) || f(next).abs() > fx.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Result of a scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - √5) / 2

/// Brent's method: golden-section search with parabolic interpolation steps,
/// stopping once the bracket around the minimum is below `abs_tol`.
pub fn brent_minimize<F>(mut f: F, lo: f64, hi: f64, abs_tol: f64, max_iter: usize) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let tol = abs_tol.max(f64::EPSILON);
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut evaluations = 1;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = 0.5 * tol + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, value: fx, evaluations });
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        evaluations += 1;

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NoConvergence { what: "brent minimization" })
}

//! Derivative-free scalar minimization.

/// `1/φ` where `φ` is the golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` or after `max_iter`
/// shrinking steps. Returns the best evaluated abscissa and its value; the
/// endpoints themselves are never evaluated.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section search for the maximum of `f`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (x, neg) = golden_section_min(|x| -f(x), lo, hi, tol, max_iter);
    (x, -neg)
}

/// Bisection for the sign change of a nondecreasing `df` on `[lo, hi]`.
///
/// Returns `None` when `df` does not change sign on the interval.
pub fn bisect_increasing<F>(mut df: F, lo: f64, hi: f64, iterations: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    if df(a) > 0.0 || df(b) < 0.0 {
        return None;
    }
    for _ in 0..iterations {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if df(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

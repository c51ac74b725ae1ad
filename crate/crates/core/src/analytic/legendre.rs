//! Numerical Legendre transform by golden-section search.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizer and maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after 400 iterations.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // the midpoint can be marginally worse than the best interior probe
    [(x, fx), (x1, f1), (x2, f2)].into_iter().fold((x, fx), |best, c| if c.1 > best.1 { c } else { best })
}

/// Convex conjugate f*(y) = sup_x (x y - f(x)) over `[lo, hi]`.
pub fn convex_conjugate<F>(f: F, y: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    golden_section_max(|x| x * y - f(x), lo, hi, 1e-10).1
}

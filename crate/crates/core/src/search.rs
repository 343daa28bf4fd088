//! One-dimensional root finding and maximisation.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Solves `f(x) = target` for a nondecreasing `f` on `[lo, ∞)`.
///
/// The upper end starts at `hi` and is doubled until `f(hi) >= target`, then
/// the bracket is bisected until its relative width drops below `rel_tol` or it
/// can no longer shrink in floating point.
pub fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let mut lo = lo;
    let mut hi = hi.max(lo);
    if f(lo) >= target {
        return Ok(lo);
    }
    let mut grow = 0;
    while f(hi) < target {
        let step = if hi > 0.0 { hi } else { 1.0 };
        lo = hi;
        hi += step;
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(Error::RootBracket(format!("target {target} not reached up to x = {hi:e}")));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi.abs() {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever end lands closer to the target.
    Ok(if (f(lo) - target).abs() <= (f(hi) - target).abs() { lo } else { hi })
}

/// Point and value found by a maximiser.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// Whether the dense-scan fallback replaced the golden-section answer.
    pub fallback: bool,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol * (1.0 + a.abs().max(b.abs())) {
        if fc >= fd {
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
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One parabolic-interpolation step through `(x - h, x, x + h)`, accepted only
/// if it improves on `fx` and stays inside `[lo, hi]`.
fn parabolic_refine(f: &impl Fn(f64) -> f64, x: f64, fx: f64, h: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (x0, x2) = ((x - h).max(lo), (x + h).min(hi));
    if x0 >= x || x2 <= x {
        return (x, fx);
    }
    let (f0, f2) = (f(x0), f(x2));
    let num = (x - x0).powi(2) * (fx - f2) - (x - x2).powi(2) * (fx - f0);
    let den = (x - x0) * (fx - f2) - (x - x2) * (fx - f0);
    if den == 0.0 {
        return (x, fx);
    }
    let xp = x - 0.5 * num / den;
    if !(lo..=hi).contains(&xp) {
        return (x, fx);
    }
    let fp = f(xp);
    if fp > fx {
        (xp, fp)
    } else {
        (x, fx)
    }
}

/// Maximises `f` on `[lo, hi]`: golden section plus one parabolic step.
///
/// Afterwards a coarse probe scan checks the unimodality assumption; if any
/// probe beats the golden-section value, a 256-point scan followed by a local
/// golden-section refinement around its best cell is used instead.
pub fn maximize_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (x, fx) = golden_section_max(&f, lo, hi, tol);
    let (x, fx) = parabolic_refine(&f, x, fx, 10.0 * tol * (1.0 + x.abs()), lo, hi);

    let probes = 16;
    let slack = 1e-12 * fx.abs().max(1e-300);
    let beaten = (0..=probes).map(|i| lo + (hi - lo) * i as f64 / probes as f64).any(|p| f(p) > fx + slack);
    if !beaten {
        return Maximum { x, value: fx, fallback: false };
    }

    let cells = 256;
    let grid: Vec<f64> = (0..=cells).map(|i| lo + (hi - lo) * i as f64 / cells as f64).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &g)| (i, f(g)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(cells)];
    let (xr, fr) = golden_section_max(&f, a, b, tol);
    let (xr, fr) = if fr >= f(grid[best]) { (xr, fr) } else { (grid[best], f(grid[best])) };
    if fr >= fx {
        Maximum { x: xr, value: fr, fallback: true }
    } else {
        Maximum { x, value: fx, fallback: false }
    }
}

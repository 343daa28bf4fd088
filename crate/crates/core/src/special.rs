//! Special functions evaluated in scaled or logarithmic form so that photon
//! statistics at large mean photon number neither overflow nor underflow.

use std::f64::consts::PI;
use std::sync::OnceLock;

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln(e^a + e^b)`.
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln|e^a - e^b|`; `-inf` when `a == b`.
pub fn log_diff_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let d = lo - hi;
    if d > -std::f64::consts::LN_2 {
        hi + (-d.exp_m1()).ln()
    } else {
        hi + (-d.exp()).ln_1p()
    }
}

/// Exponentially scaled modified Bessel function `e^{-x} I_0(x)` for `x >= 0`.
///
/// Power series up to `x = 30`, Hankel asymptotic expansion beyond.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut k = 1.0f64;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..200 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
            if next > term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// `ln(e^{-z} I_k(z))` for `k = 0..=k_max` and `z > 0`.
///
/// The ratios `I_k / I_{k-1}` come from the backward recurrence
/// `I_{k-1} = I_{k+1} + (2k/z) I_k`, anchored on [`bessel_i0e`].
pub fn ln_bessel_ie_sequence(z: f64, k_max: usize) -> Vec<f64> {
    assert!(z > 0.0, "ln_bessel_ie_sequence needs z > 0");
    let start = k_max + 40 + (10.0 * z.sqrt()) as usize;
    let mut ratios = vec![0.0f64; k_max + 1];
    let mut h = 0.0f64;
    for k in (1..=start).rev() {
        h = 1.0 / (2.0 * k as f64 / z + h);
        if k <= k_max {
            ratios[k] = h;
        }
    }
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = bessel_i0e(z).ln();
    out.push(acc);
    for r in ratios.iter().skip(1) {
        acc += r.ln();
        out.push(acc);
    }
    out
}

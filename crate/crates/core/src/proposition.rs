//! Local filtering bounds for a pure state degraded by a channel on Alice's
//! side: the maximal concurrence at a given success probability, the
//! diagonal filter reaching it, concave-envelope mixing of curve points, and a
//! Monte Carlo check against random product filters.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::entanglement::{concurrence_wootters, PhaseFlipChannel, TwoQubitDensity};
use crate::error::{invalid, Error, Result};
use crate::linalg::{partial_trace, singular_values, tensor_product, ComplexMatrix, C64};

/// Schmidt coefficients of the ideal state and the concurrence left after the
/// channel acts on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterScenario {
    lambda0: f64,
    lambda1: f64,
    c_in: f64,
}

impl FilterScenario {
    pub fn new(lambda0: f64, lambda1: f64, c_in: f64) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda1 <= 0.5 && lambda0 >= 0.5 && lambda0 <= 1.0) {
            return Err(invalid(format!("Schmidt coefficients ({lambda0}, {lambda1}) need 0 <= l1 <= 1/2 <= l0")));
        }
        if (lambda0 + lambda1 - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("Schmidt coefficients sum to {}", lambda0 + lambda1)));
        }
        let c_pure = 2.0 * (lambda0 * lambda1).sqrt();
        if !(0.0..=1.0).contains(&c_in) || c_in > c_pure + 1e-12 {
            return Err(invalid(format!("input concurrence {c_in} exceeds pure-state value {c_pure}")));
        }
        Ok(Self { lambda0, lambda1, c_in })
    }

    /// The state `sqrt(l0)|00> + sqrt(l1)|11>` after a phase flip with weight
    /// `f` on qubit A.
    pub fn phase_flipped(lambda0: f64, f: f64) -> Result<Self> {
        let ch = PhaseFlipChannel::new(f)?;
        let lambda1 = 1.0 - lambda0;
        Self::new(lambda0, lambda1, ch.damping() * 2.0 * (lambda0 * lambda1).sqrt())
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn c_in(&self) -> f64 {
        self.c_in
    }
}

/// Density matrix of `sqrt(l0)|00> + sqrt(l1)|11>` after the phase flip `ch`
/// on qubit A.
pub fn phase_flipped_state(lambda0: f64, ch: &PhaseFlipChannel) -> Result<TwoQubitDensity> {
    let psi = [C64::new(lambda0.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new((1.0 - lambda0).sqrt(), 0.0)];
    TwoQubitDensity::new(ch.apply_to(&ComplexMatrix::outer(&psi, &psi)))
}

/// A sample `(p_s, value)` of a performance curve with free-form labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p_s: f64,
    pub value: f64,
    pub meta: BTreeMap<String, String>,
}

impl CurvePoint {
    pub fn new(p_s: f64, value: f64) -> Result<Self> {
        if !(p_s > 0.0 && p_s <= 1.0) {
            return Err(invalid(format!("curve point p_s = {p_s} outside (0, 1]")));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(invalid(format!("curve value {value} must be finite and nonnegative")));
        }
        Ok(Self { p_s, value, meta: BTreeMap::new() })
    }

    pub fn with_label(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn label(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }
}

fn check_p(p_s: f64) -> Result<()> {
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(invalid(format!("success probability {p_s} outside (0, 1]")));
    }
    Ok(())
}

/// Largest concurrence reachable by local filtering with success probability
/// `p_s`.
pub fn c_max(p_s: f64, sc: &FilterScenario) -> Result<f64> {
    check_p(p_s)?;
    let (l0, l1) = (sc.lambda0, sc.lambda1);
    if l1 == 0.0 {
        return Ok(0.0);
    }
    if p_s < 2.0 * l1 {
        Ok(sc.c_in / (2.0 * (l0 * l1).sqrt()))
    } else {
        Ok(((p_s - l1) / l0).sqrt() * sc.c_in / p_s)
    }
}

/// Diagonal filter weights `(w0, w1)` on the Schmidt basis that reach
/// [`c_max`]; `l0 w0^2 + l1 w1^2 = p_s`.
pub fn optimal_filter(p_s: f64, sc: &FilterScenario) -> Result<(f64, f64)> {
    check_p(p_s)?;
    let (l0, l1) = (sc.lambda0, sc.lambda1);
    if p_s >= 2.0 * l1 {
        Ok((((p_s - l1) / l0).max(0.0).sqrt().min(1.0), 1.0))
    } else {
        Ok(((p_s / (2.0 * l0)).sqrt(), (p_s / (2.0 * l1)).sqrt()))
    }
}

/// Vertices of the upper concave envelope of `points` together with the
/// origin, sorted by `p_s`. The origin itself is not returned.
///
/// Duplicate `p_s` keep the larger value (the first on ties); points on a hull
/// edge are dropped.
pub fn upper_concave_envelope(points: &[CurvePoint]) -> Result<Vec<CurvePoint>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("envelope needs at least one point"));
    }
    let mut sorted: Vec<&CurvePoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.p_s.total_cmp(&b.p_s));
    let mut dedup: Vec<&CurvePoint> = Vec::with_capacity(sorted.len());
    for p in sorted {
        match dedup.last_mut() {
            Some(last) if last.p_s == p.p_s => {
                if p.value > last.value {
                    *last = p;
                }
            }
            _ => dedup.push(p),
        }
    }

    // Andrew's monotone chain, upper half, starting from the origin anchor.
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64, Option<usize>)> = vec![(0.0, 0.0, None)];
    for (i, p) in dedup.iter().enumerate() {
        let b = (p.p_s, p.value);
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            if cross((o.0, o.1), (a.0, a.1), b) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((b.0, b.1, Some(i)));
    }
    Ok(hull.into_iter().filter_map(|(_, _, i)| i.map(|i| dedup[i].clone())).collect())
}

/// Value of a piecewise-linear envelope (origin-anchored) at `p_s`.
///
/// Past the last vertex the envelope is flat.
pub fn envelope_at(envelope: &[CurvePoint], p_s: f64) -> f64 {
    let mut prev = (0.0, 0.0);
    for v in envelope {
        if p_s <= v.p_s {
            if v.p_s == prev.0 {
                return v.value;
            }
            let t = (p_s - prev.0) / (v.p_s - prev.0);
            return prev.1 + t * (v.value - prev.1);
        }
        prev = (v.p_s, v.value);
    }
    prev.1
}

/// Largest excess of `p_s C` over the bound seen in a Monte Carlo audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub trials: usize,
    pub seed: u64,
    pub max_violation: f64,
    /// Trial reaching `max_violation`: `(p_s, concurrence)`.
    pub worst: (f64, f64),
}

fn random_contraction(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut draw = || {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    };
    let m = ComplexMatrix::from_fn(2, 2, |_, _| draw());
    let norm = singular_values(&m)[0];
    m.scale_real(1.0 / norm)
}

/// Samples `trials` random product filters `M ⊗ N` with `M^dagger M <= 1`,
/// `N^dagger N <= 1` on `input` and reports the largest
/// `p_s C - p_s c_max(p_s)`.
pub fn montecarlo_filter_audit(sc: &FilterScenario, input: &TwoQubitDensity, trials: usize, seed: u64) -> Result<AuditReport> {
    if trials == 0 {
        return Err(invalid("audit needs at least one trial"));
    }
    let c0 = concurrence_wootters(input);
    if (c0 - sc.c_in).abs() > 1e-10 {
        return Err(invalid(format!("input concurrence {c0} differs from scenario value {}", sc.c_in)));
    }
    let rho_b = partial_trace(input.matrix(), &[2, 2], &[1])?;
    let sv = singular_values(&rho_b);
    if (sv[0] - sc.lambda0).abs() > 1e-10 || (sv[1] - sc.lambda1).abs() > 1e-10 {
        return Err(invalid(format!("input marginal spectrum ({}, {}) differs from the scenario", sv[0], sv[1])));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport { trials, seed, max_violation: f64::NEG_INFINITY, worst: (0.0, 0.0) };
    for _ in 0..trials {
        let k = tensor_product(&random_contraction(&mut rng), &random_contraction(&mut rng));
        let out = &(&k * input.matrix()) * &k.adjoint();
        let p = out.trace().re;
        if !(p > 1e-300) {
            continue;
        }
        let c = concurrence_wootters(&TwoQubitDensity::from_unnormalized(&out)?);
        let violation = p * c - p * c_max(p.min(1.0), sc)?;
        if violation > report.max_violation {
            report.max_violation = violation;
            report.worst = (p, c);
        }
    }
    Ok(report)
}

//! Closed-form optimal bound for entanglement generation with coherent pulses
//! over a lossy channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{monotone_value, overlap_power, Monotone};
use crate::error::{invalid, Error, Result};
use crate::proposition::{envelope_at, upper_concave_envelope, CurvePoint};

/// Attenuation length used when only a fiber length is given, in km.
pub const DEFAULT_L0_KM: f64 = 25.0;

pub const BOUND_CURVE_ID: &str = "(i)-optimal-bound";

/// Lossy bosonic channel, described by its transmittance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    transmittance: f64,
}

impl ChannelSpec {
    pub fn new(transmittance: f64) -> Result<Self> {
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(invalid(format!("transmittance {transmittance} outside (0, 1]")));
        }
        Ok(Self { transmittance })
    }

    /// `T = exp(-length / l0)`.
    pub fn from_length(length_km: f64, l0_km: f64) -> Result<Self> {
        if !(length_km >= 0.0 && length_km.is_finite()) {
            return Err(invalid(format!("fiber length {length_km} km must be finite and nonnegative")));
        }
        if !(l0_km > 0.0) {
            return Err(invalid(format!("attenuation length {l0_km} km must be positive")));
        }
        Self::new((-length_km / l0_km).exp())
    }

    pub const fn lossless() -> Self {
        Self { transmittance: 1.0 }
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    /// The exponent `(1 - T) / T` applied to pulse overlaps.
    pub fn loss_exponent(&self) -> f64 {
        (1.0 - self.transmittance) / self.transmittance
    }
}

/// Parameters of the pure state and phase flip that replace the lossy channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualReduction {
    pub x: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub f_u: f64,
    pub c_in: f64,
}

/// Reduction for qubit weights `(q0, 1 - q0)` and pulse-state overlap modulus
/// `overlap`.
pub fn virtual_reduction(q0: f64, overlap: f64, ch: &ChannelSpec) -> Result<VirtualReduction> {
    if !(0.0..=1.0).contains(&q0) {
        return Err(invalid(format!("qubit weight q0 = {q0} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(invalid(format!("overlap {overlap} outside [0, 1]")));
    }
    let x = (4.0 * q0 * (1.0 - q0) * (1.0 - overlap * overlap)).max(0.0).sqrt().min(1.0);
    let r = (1.0 - x * x).max(0.0).sqrt();
    let damp = overlap_power(overlap, ch.transmittance);
    Ok(VirtualReduction {
        x,
        lambda_plus: 0.5 * (1.0 + r),
        lambda_minus: 0.5 * (1.0 - r),
        f_u: 0.5 * (1.0 + damp),
        c_in: damp * x,
    })
}

fn check_p(p_s: f64) -> Result<()> {
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(invalid(format!("success probability {p_s} outside (0, 1]")));
    }
    Ok(())
}

/// Overlap maximising the achievable concurrence at success probability
/// `p_s`; lies in `[1 - p_s, 1]`.
pub fn u_star(p_s: f64, ch: &ChannelSpec) -> Result<f64> {
    check_p(p_s)?;
    let t = ch.transmittance;
    let q = 1.0 - p_s;
    let u = 0.5 * (q * (2.0 - t) + (4.0 * p_s * p_s * (1.0 - t) + q * q * t * t).sqrt());
    debug_assert!(u >= q - 1e-12 && u <= 1.0 + 1e-12, "u* = {u} outside [{q}, 1]");
    Ok(u.clamp(q, 1.0))
}

/// Concurrence achievable at success probability `p_s` with pulse overlap `u`.
pub fn c_opt(u: f64, p_s: f64, ch: &ChannelSpec) -> Result<f64> {
    check_p(p_s)?;
    let lo = 1.0 - p_s;
    if !(u >= lo - 1e-12 && u <= 1.0 + 1e-12) {
        return Err(invalid(format!("overlap {u} outside the feasible window [{lo}, 1]")));
    }
    let u = u.clamp(lo.max(0.0), 1.0);
    let radicand = ((1.0 - u) * (2.0 * p_s + u - 1.0)).max(0.0);
    Ok((overlap_power(u, ch.transmittance) * radicand.sqrt() / p_s).min(1.0))
}

/// The bound's concurrence `c_opt(u*(p_s), p_s)`.
pub fn optimal_concurrence(p_s: f64, ch: &ChannelSpec) -> Result<f64> {
    c_opt(u_star(p_s, ch)?, p_s, ch)
}

/// Evaluates the upper concave envelope of `raw` back on every input `p_s`,
/// so the output has one point per grid value in grid order. Points that are
/// not envelope vertices carry `envelope = interpolated` and lose their
/// parameter labels.
pub(crate) fn envelope_on_grid(raw: Vec<CurvePoint>) -> Result<Vec<CurvePoint>> {
    let env = upper_concave_envelope(&raw)?;
    raw.into_iter()
        .map(|p| {
            let hull = envelope_at(&env, p.p_s);
            if hull > p.value + 1e-15 * hull.abs().max(1.0) {
                let keep: Vec<(String, String)> = p
                    .meta
                    .iter()
                    .filter(|(k, _)| !matches!(k.as_str(), "alpha" | "beta"))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let mut q = CurvePoint::new(p.p_s, hull)?;
                q.meta.extend(keep);
                Ok(q.with_label("envelope", "interpolated"))
            } else {
                Ok(p.with_label("envelope", "vertex"))
            }
        })
        .collect()
}

/// Points `(p_s, p_s E(c_opt(u*, p_s)))` on `grid`, convex-hull mixed.
///
/// `p_s = 1` is accepted and labelled `unreachable = true`, since neither
/// optical protocol gets there.
pub fn optimal_bound_curve(ch: &ChannelSpec, grid: &[f64], mono: &Monotone) -> Result<Vec<CurvePoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("p_s grid"));
    }
    let raw: Vec<CurvePoint> = grid
        .par_iter()
        .map(|&p| {
            let c = optimal_concurrence(p, ch)?;
            let e = monotone_value(mono, c)?;
            let mut pt = CurvePoint::new(p, p * e)?
                .with_label("curve", BOUND_CURVE_ID)
                .with_label("monotone", mono.name())
                .with_label("T", ch.transmittance);
            if p == 1.0 {
                pt = pt.with_label("unreachable", true);
            }
            Ok(pt)
        })
        .collect::<Result<_>>()?;
    envelope_on_grid(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposition::{c_max, FilterScenario};
    use crate::search::maximize_1d;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn ch(t: f64) -> ChannelSpec {
        ChannelSpec::new(t).unwrap()
    }

    #[test]
    fn channel_spec() {
        assert!(ChannelSpec::new(0.0).is_err());
        assert!(ChannelSpec::new(1.2).is_err());
        let c = ChannelSpec::from_length(25.0 * 2f64.ln(), DEFAULT_L0_KM).unwrap();
        assert!((c.transmittance() - 0.5).abs() < 1e-15);
        let c = ChannelSpec::from_length(17.328680, 25.0).unwrap();
        assert!((c.transmittance() - 0.5).abs() < 1e-7);
        assert_eq!(ChannelSpec::from_length(0.0, 25.0).unwrap(), ChannelSpec::lossless());
        assert!(ChannelSpec::from_length(-1.0, 25.0).is_err());
        assert!(ChannelSpec::from_length(1.0, 0.0).is_err());
    }

    #[test]
    fn virtual_reduction_examples() {
        let v = virtual_reduction(0.5, 0.0, &ch(0.5)).unwrap();
        assert_eq!((v.x, v.lambda_plus, v.lambda_minus, v.f_u, v.c_in), (1.0, 0.5, 0.5, 0.5, 0.0));

        let u = 1.0 / E;
        let v = virtual_reduction(0.5, u, &ch(0.5)).unwrap();
        assert!((v.x - (1.0 - u * u).sqrt()).abs() < 1e-15);
        assert!((v.x - 0.929_873_5).abs() < 1e-7);
        assert!((v.lambda_plus - (1.0 + u) / 2.0).abs() < 1e-15);
        assert!((v.lambda_minus - (1.0 - u) / 2.0).abs() < 1e-15);
        assert!((v.f_u - 0.683_939_7).abs() < 1e-7);
        assert!((v.c_in - 0.342_081_3).abs() < 1e-7);
        assert!((v.c_in - (2.0 * v.f_u - 1.0) * v.x).abs() < 1e-15);

        for &t in &[0.2, 1.0] {
            let v = virtual_reduction(0.0, 0.4, &ch(t)).unwrap();
            assert_eq!((v.x, v.c_in), (0.0, 0.0));
        }
        assert!(virtual_reduction(1.5, 0.1, &ch(0.5)).is_err());
        assert!(virtual_reduction(0.5, -0.1, &ch(0.5)).is_err());
    }

    #[test]
    fn u_star_examples() {
        for &p in &[0.1, 0.37, 0.9] {
            assert!((u_star(p, &ch(1.0)).unwrap() - (1.0 - p)).abs() < 1e-15);
        }
        assert!((u_star(0.5, &ch(0.5)).unwrap() - 0.75).abs() < 1e-15);
        assert!((u_star(1.0, &ch(0.75)).unwrap() - 0.5).abs() < 1e-15);
        assert!((u_star(1.0, &ch(0.3)).unwrap() - 0.7f64.sqrt()).abs() < 1e-15);
        assert!(u_star(0.0, &ch(0.5)).is_err());
        assert!(u_star(1.1, &ch(0.5)).is_err());
    }

    #[test]
    fn c_opt_examples() {
        for &p in &[0.01, 0.5, 0.99] {
            let u = u_star(p, &ch(1.0)).unwrap();
            assert!((c_opt(u, p, &ch(1.0)).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((c_opt(0.75, 0.5, &ch(0.5)).unwrap() - 0.75 * (0.25f64 * 0.75).sqrt() / 0.5).abs() < 1e-15);
        assert!((c_opt(0.75, 0.5, &ch(0.5)).unwrap() - 0.649_519_0).abs() < 1e-7);
        assert_eq!(c_opt(1.0, 0.5, &ch(0.3)).unwrap(), 0.0);
        assert!(c_opt(0.4, 0.5, &ch(0.5)).is_err());
    }

    #[test]
    fn bound_curve_examples() {
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let curve = optimal_bound_curve(&ch(1.0), &grid, &Monotone::Concurrence).unwrap();
        assert_eq!(curve.len(), grid.len());
        for (pt, &p) in curve.iter().zip(&grid) {
            assert_eq!(pt.p_s, p);
            assert!((pt.value - p).abs() < 1e-12);
            assert_eq!(pt.label("curve"), Some(BOUND_CURVE_ID));
        }

        let curve = optimal_bound_curve(&ch(0.5), &[0.5], &Monotone::Concurrence).unwrap();
        assert!((curve[0].value - 0.5 * 0.649_519_052_838_329).abs() < 1e-12);

        let curve = optimal_bound_curve(&ch(0.5), &[0.3, 1.0], &Monotone::Concurrence).unwrap();
        assert_eq!(curve[1].label("unreachable"), Some("true"));
        assert_eq!(curve[0].label("unreachable"), None);

        assert!(matches!(optimal_bound_curve(&ch(0.5), &[], &Monotone::Concurrence), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn bound_average_is_nonincreasing() {
        for &t in &[0.9, 0.5, (-2.0f64).exp(), (-4.0f64).exp()] {
            for mono in [Monotone::Concurrence, Monotone::EntanglementOfFormation] {
                let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
                let curve = optimal_bound_curve(&ch(t), &grid, &mono).unwrap();
                let mut prev = f64::INFINITY;
                for pt in &curve {
                    let avg = pt.value / pt.p_s;
                    assert!(avg <= prev + 1e-12, "T={t} {mono}: {avg} after {prev}");
                    prev = avg;
                }
            }
        }
    }

    #[test]
    fn u_star_window_on_dense_grid() {
        for i in 1..=100 {
            for j in 1..=100 {
                let p = i as f64 / 100.0;
                let t = j as f64 / 100.0;
                let u = u_star(p, &ch(t)).unwrap();
                assert!(u >= 1.0 - p - 1e-12 && u <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn c_opt_nondecreasing_in_transmittance() {
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let mut prev = 0.0;
            for j in 1..=50 {
                let c = optimal_concurrence(p, &ch(j as f64 / 50.0)).unwrap();
                assert!(c >= prev - 1e-12, "p={p}");
                prev = c;
            }
        }
    }

    /// Maximising the filtering bound of the reduced state over the overlap
    /// reproduces the closed form.
    #[test]
    fn composed_filter_bound_matches_closed_form() {
        for &p in &[0.05, 0.2, 0.5, 0.8, 0.95] {
            for &t in &[0.1, 0.4, 0.7, 1.0] {
                let channel = ch(t);
                let composed = |o: f64| {
                    let v = virtual_reduction(0.5, o, &channel).unwrap();
                    if v.lambda_minus == 0.0 {
                        return 0.0;
                    }
                    let l1 = v.lambda_minus.min(0.5);
                    let sc = FilterScenario::new(1.0 - l1, l1, v.c_in.min(2.0 * (l1 * (1.0 - l1)).sqrt())).unwrap();
                    c_max(p, &sc).unwrap()
                };
                let best = maximize_1d(composed, 0.0, 1.0, 1e-12);
                let closed = optimal_concurrence(p, &channel).unwrap();
                assert!((best.value - closed).abs() < 1e-10, "p={p} T={t}: {} vs {closed}", best.value);
            }
        }
    }

    proptest! {
        #[test]
        fn u_star_maximises_c_opt(p in 0.001f64..1.0, t in 0.01f64..1.0, s in 0.0f64..1.0) {
            let channel = ch(t);
            let best = optimal_concurrence(p, &channel).unwrap();
            let u = (1.0 - p) + s * p;
            prop_assert!(c_opt(u, p, &channel).unwrap() <= best + 1e-12);
        }

        #[test]
        fn reduction_invariants(q0 in 0.0f64..=1.0, o in 0.0f64..=1.0, t in 0.01f64..=1.0) {
            let v = virtual_reduction(q0, o, &ch(t)).unwrap();
            prop_assert!((v.lambda_plus + v.lambda_minus - 1.0).abs() < 1e-15);
            prop_assert!((0.5..=1.0).contains(&v.f_u));
            prop_assert!((v.c_in - (2.0 * v.f_u - 1.0) * v.x).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&v.x));
        }
    }
}

//! Analytic model of the two coherent-state protocols: the QND-based one that
//! reaches the bound and the photon-counting one that approximates it.
//!
//! Everything depends on the amplitudes only through `a = alpha sin(theta/2)`
//! and `b = beta sin(theta/2)`, so the internals work with these scaled values.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{envelope_on_grid, u_star, ChannelSpec};
use crate::entanglement::{overlap_power, Monotone};
use crate::error::{invalid, Error, Result};
use crate::proposition::CurvePoint;
use crate::search::{bisect_increasing, maximize_1d};
use crate::special::{bessel_i0e, ln_bessel_ie_sequence, ln_factorial, log_sum_exp};

pub const NEAR_OPTIMAL_CURVE_ID: &str = "(ii)-near-optimal";
/// Largest `m + n` visited when enumerating photon-counting outcomes.
pub const OUTCOME_CAP: usize = 512;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Pulse amplitudes and interaction angle. `alpha` is Alice's amplitude after
/// the channel, so she prepares `alpha / sqrt(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub channel: ChannelSpec,
}

impl ProtocolParams {
    pub fn new(alpha: f64, beta: f64, theta: f64, channel: ChannelSpec) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha = {alpha} must be finite and nonnegative")));
        }
        if !(beta >= alpha && beta.is_finite()) {
            return Err(invalid(format!("beta = {beta} must be finite and at least alpha = {alpha}")));
        }
        if !(theta > 0.0 && theta <= std::f64::consts::PI) {
            return Err(invalid(format!("theta = {theta} outside (0, pi]")));
        }
        Ok(Self { alpha, beta, theta, channel })
    }

    /// `sin(theta / 2)`.
    pub fn sine(&self) -> f64 {
        (0.5 * self.theta).sin()
    }

    fn scaled(&self) -> (f64, f64) {
        let s = self.sine();
        (self.alpha * s, self.beta * s)
    }

    fn from_scaled(a: f64, b: f64, theta: f64, channel: ChannelSpec) -> Result<Self> {
        let s = (0.5 * theta).sin();
        Self::new(a / s, (b / s).max(a / s), theta, channel)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchAmplitudes {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub u_alpha: f64,
}

pub fn branch_amplitudes(p: &ProtocolParams) -> BranchAmplitudes {
    let (a, b) = p.scaled();
    BranchAmplitudes {
        gamma_plus: (b + a) / std::f64::consts::SQRT_2,
        gamma_minus: (b - a) / std::f64::consts::SQRT_2,
        u_alpha: (-2.0 * a * a).exp(),
    }
}

/// `1 - e^{-(a^2+b^2)} I_0(b^2 - a^2)`, written so that tiny amplitudes keep
/// full relative accuracy.
fn success_scaled(a: f64, b: f64) -> f64 {
    let (a2, b2) = (a * a, b * b);
    let s = a2 + b2;
    let d = b2 - a2;
    if d <= 30.0 {
        // I_0(d) - 1 by its power series
        let q = 0.25 * d * d;
        let mut term = 1.0f64;
        let mut rest = 0.0f64;
        let mut k = 1.0f64;
        loop {
            term *= q / (k * k);
            rest += term;
            if term <= 1e-17 * rest || term == 0.0 {
                break;
            }
            k += 1.0;
        }
        (-(-s).exp_m1() - (-s).exp() * rest).max(0.0)
    } else {
        1.0 - (-2.0 * a2).exp() * bessel_i0e(d)
    }
}

/// Probability that the QND measurement (equivalently, unequal photon counts)
/// heralds success.
pub fn success_probability(p: &ProtocolParams) -> f64 {
    let (a, b) = p.scaled();
    success_scaled(a, b)
}

/// `1 - u_alpha` computed without cancellation.
fn one_minus_u(a: f64) -> f64 {
    -(-2.0 * a * a).exp_m1()
}

/// `u^k sqrt((1-u)(2P + u - 1)) / P`, with `1 - u` supplied separately.
fn c_opt_parts(u: f64, one_minus_u: f64, p_s: f64, ch: &ChannelSpec) -> f64 {
    let radicand = (one_minus_u * (2.0 * p_s - one_minus_u)).max(0.0);
    (overlap_power(u, ch.transmittance()) * radicand.sqrt() / p_s).min(1.0)
}

/// Concurrence delivered by the QND protocol.
pub fn qnd_concurrence(p: &ProtocolParams) -> Result<f64> {
    let (a, b) = p.scaled();
    let p_s = success_scaled(a, b);
    if !(p_s > 0.0) {
        return Err(invalid("success probability is zero; nothing is heralded"));
    }
    Ok(c_opt_parts((-2.0 * a * a).exp(), one_minus_u(a), p_s, &p.channel))
}

/// Smallest `b >= a` with success probability `p_target`.
fn solve_b(a: f64, p_target: f64) -> Result<f64> {
    bisect_increasing(|b| success_scaled(a, b), p_target, a, (2.0 * a).max(1.0), 1e-15).map_err(|e| match e {
        Error::RootBracket(msg) => Error::RootBracket(format!("beta for alpha_s = {a}, P_s = {p_target}: {msg}")),
        other => other,
    })
}

fn check_target(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateTarget(p));
    }
    Ok(())
}

/// QND protocol parameters with `u_alpha = u*(p_s_target)` and success
/// probability `p_s_target`.
pub fn calibrate_optimal(p_s_target: f64, ch: &ChannelSpec, theta: f64) -> Result<ProtocolParams> {
    check_target(p_s_target)?;
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(invalid(format!("theta = {theta} outside (0, pi]")));
    }
    let u = u_star(p_s_target, ch)?;
    let a = (-u.ln() / 2.0).max(0.0).sqrt();
    let b = solve_b(a, p_s_target)?;
    ProtocolParams::from_scaled(a, b, theta, *ch)
}

/// `ln(x^(2k))` with `0^0 = 1`; `None` for a vanishing power.
fn ln_pow(ln_x: f64, k: usize) -> Option<f64> {
    if k == 0 {
        Some(0.0)
    } else if ln_x == f64::NEG_INFINITY {
        None
    } else {
        Some(2.0 * k as f64 * ln_x)
    }
}

/// Log-weights of the two branches, `ln(g+^{2m} g-^{2n})` and `ln(g-^{2m} g+^{2n})`.
fn branch_logs(b: &BranchAmplitudes, m: usize, n: usize) -> (Option<f64>, Option<f64>) {
    let (lp, lm) = (b.gamma_plus.ln(), b.gamma_minus.ln());
    let t1 = ln_pow(lp, m).zip(ln_pow(lm, n)).map(|(x, y)| x + y);
    let t2 = ln_pow(lm, m).zip(ln_pow(lp, n)).map(|(x, y)| x + y);
    (t1, t2)
}

/// Probability of counting `m` and `n` photons at the two detectors.
pub fn outcome_probability(b: &BranchAmplitudes, m: usize, n: usize) -> f64 {
    let (t1, t2) = branch_logs(b, m, n);
    let sum = match (t1, t2) {
        (Some(x), Some(y)) => log_sum_exp(x, y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return 0.0,
    };
    let pre = -b.gamma_plus.powi(2) - b.gamma_minus.powi(2) - std::f64::consts::LN_2 - ln_factorial(m) - ln_factorial(n);
    (pre + sum).exp()
}

/// Concurrence of the two-qubit state heralded by the counts `(m, n)`.
pub fn outcome_concurrence(b: &BranchAmplitudes, ch: &ChannelSpec, m: usize, n: usize) -> Result<f64> {
    let (t1, t2) = branch_logs(b, m, n);
    if t1.is_none() && t2.is_none() {
        return Err(Error::ImpossibleOutcome { m, n });
    }
    if m == n {
        return Ok(0.0);
    }
    let scale = overlap_power(b.u_alpha, ch.transmittance());
    Ok(match (t1, t2) {
        // |t1 - t2| / (t1 + t2) = tanh(|ln t1 - ln t2| / 2)
        (Some(x), Some(y)) => scale * (0.5 * (x - y).abs()).tanh(),
        _ => scale,
    })
}

/// A photon-counting outcome with its heralding probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub m: usize,
    pub n: usize,
    pub probability: f64,
    pub concurrence: f64,
    pub monotone: f64,
}

/// `P(N > s)` for `N ~ Poisson(mean)` and `s = 0..=cap`.
fn poisson_tails(mean: f64, cap: usize) -> Vec<f64> {
    let ln_pmf = |k: usize| {
        if mean == 0.0 {
            if k == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            k as f64 * mean.ln() - mean - ln_factorial(k)
        }
    };
    // mass beyond the cap, summed forward until the terms are negligible
    let mut beyond = 0.0f64;
    let mut k = cap + 1;
    loop {
        let t = ln_pmf(k).exp();
        beyond += t;
        if (k as f64 > mean && t <= 1e-18 * beyond) || t == 0.0 && k as f64 > mean {
            break;
        }
        k += 1;
    }
    let mut tails = vec![0.0; cap + 1];
    tails[cap] = beyond;
    for s in (0..cap).rev() {
        tails[s] = tails[s + 1] + ln_pmf(s + 1).exp();
    }
    tails
}

/// Photon-counting outcomes in shells of `m + n` until the unvisited mass is
/// at most `tail_tol`. With `strict`, running into [`OUTCOME_CAP`] first is an
/// error; otherwise the enumeration just stops there.
fn collect_outcomes(p: &ProtocolParams, mono: &Monotone, tail_tol: f64, strict: bool) -> Result<(Vec<OutcomeRecord>, f64)> {
    let b = branch_amplitudes(p);
    let mean = b.gamma_plus.powi(2) + b.gamma_minus.powi(2);
    let tails = poisson_tails(mean, OUTCOME_CAP);
    let mut out = Vec::new();
    for s in 0..=OUTCOME_CAP {
        for m in 0..=s {
            let n = s - m;
            let prob = outcome_probability(&b, m, n);
            if prob == 0.0 {
                continue;
            }
            let c = outcome_concurrence(&b, &p.channel, m, n)?;
            out.push(OutcomeRecord { m, n, probability: prob, concurrence: c, monotone: mono.eval(c) });
        }
        if tails[s] <= tail_tol {
            return Ok((out, tails[s]));
        }
    }
    if strict {
        return Err(Error::TailNotConverged { accumulated: 1.0 - tails[OUTCOME_CAP], cap: OUTCOME_CAP });
    }
    Ok((out, tails[OUTCOME_CAP]))
}

/// All outcomes with `m + n` up to where the remaining mass drops below
/// `tail_tol`.
pub fn enumerate_outcomes(p: &ProtocolParams, mono: &Monotone, tail_tol: f64) -> Result<Vec<OutcomeRecord>> {
    check_tail_tol(tail_tol)?;
    Ok(collect_outcomes(p, mono, tail_tol, true)?.0)
}

/// The `count` most likely heralded (`m != n`) outcomes, most likely first.
pub fn top_outcomes(p: &ProtocolParams, mono: &Monotone, count: usize) -> Result<Vec<OutcomeRecord>> {
    let (mut all, _) = collect_outcomes(p, mono, DEFAULT_TAIL_TOL, false)?;
    all.retain(|r| r.m != r.n);
    all.sort_by(|x, y| y.probability.total_cmp(&x.probability).then((x.m, x.n).cmp(&(y.m, y.n))));
    all.truncate(count);
    Ok(all)
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(invalid(format!("tail tolerance {tail_tol} outside (0, 1e-6]")));
    }
    Ok(())
}

/// Success probability and success-conditioned average monotone of the
/// photon-counting protocol, summed outcome by outcome.
pub fn average_monotone(p: &ProtocolParams, mono: &Monotone, tail_tol: f64) -> Result<(f64, f64)> {
    check_tail_tol(tail_tol)?;
    let p_s = success_probability(p);
    if !(p_s > 0.0) {
        return Err(invalid("success probability is zero; the average is undefined"));
    }
    let b = branch_amplitudes(p);
    let mean = b.gamma_plus.powi(2) + b.gamma_minus.powi(2);
    let tails = poisson_tails(mean, OUTCOME_CAP);
    let mut weighted = 0.0f64;
    for s in 1..=OUTCOME_CAP {
        // m < n, doubled by symmetry
        for m in 0..s.div_ceil(2) {
            let n = s - m;
            let prob = outcome_probability(&b, m, n);
            if prob == 0.0 {
                continue;
            }
            let c = outcome_concurrence(&b, &p.channel, m, n)?;
            weighted += 2.0 * prob * mono.eval(c);
        }
        if tails[s] <= tail_tol {
            return Ok((p_s, (weighted / p_s).clamp(0.0, 1.0)));
        }
    }
    Err(Error::TailNotConverged { accumulated: 1.0 - tails[OUTCOME_CAP], cap: OUTCOME_CAP })
}

/// Same average as [`average_monotone`], summed over the count difference
/// `k = |m - n|` instead of individual outcomes.
///
/// The concurrence only depends on `k`, and `P(|m - n| = k)` is a symmetric
/// mixture of Skellam laws with a closed form in `e^{-z} I_k(z)`, `z = 2 g+ g-`.
/// The cost grows with the spread of `m - n` rather than with `(m + n)^2`, and
/// there is no outcome cap, so large mean photon numbers stay tractable.
pub fn average_monotone_grouped(p: &ProtocolParams, mono: &Monotone) -> Result<(f64, f64)> {
    let p_s = success_probability(p);
    if !(p_s > 0.0) {
        return Err(invalid("success probability is zero; the average is undefined"));
    }
    let b = branch_amplitudes(p);
    Ok((p_s, grouped_weight(&b, &p.channel, mono, p_s)? / p_s))
}

/// `sum_k P(|m - n| = k) E(C_k)`.
fn grouped_weight(b: &BranchAmplitudes, ch: &ChannelSpec, mono: &Monotone, p_s: f64) -> Result<f64> {
    let (gp, gm) = (b.gamma_plus, b.gamma_minus);
    let scale = overlap_power(b.u_alpha, ch.transmittance());
    if gp == gm {
        return Ok(p_s * mono.eval(0.0));
    }
    let (big, small) = (gp * gp, gm * gm);
    let k_max = (big - small + 15.0 * (big + small).sqrt() + 50.0).ceil() as usize;
    let mut weighted = 0.0f64;
    let mut mass = 0.0f64;
    if gm == 0.0 {
        let e = mono.eval(scale);
        for k in 1..=k_max {
            let t = (k as f64 * big.ln() - big - ln_factorial(k)).exp();
            mass += t;
            weighted += t * e;
        }
    } else {
        let z = 2.0 * gp * gm;
        let ln_rho = gp.ln() - gm.ln();
        let ln_ie = ln_bessel_ie_sequence(z, k_max);
        let shift = -(gp - gm).powi(2);
        for (k, lie) in ln_ie.iter().enumerate().skip(1) {
            let kr = k as f64 * ln_rho;
            let t = (shift + lie + kr + (-2.0 * kr).exp().ln_1p()).exp();
            mass += t;
            weighted += t * mono.eval(scale * kr.tanh());
        }
    }
    let missing = (p_s - mass).abs();
    if missing > 1e-10 * p_s.max(1e-300) && missing > 1e-15 {
        return Err(Error::TailNotConverged { accumulated: mass, cap: k_max });
    }
    Ok(weighted)
}

/// Result of the near-optimal parameter search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearOptimal {
    pub params: ProtocolParams,
    pub e_bar: f64,
    /// Whether the scan fallback overrode golden-section search.
    pub fallback: bool,
}

/// Maximises the photon-counting protocol's average monotone at fixed success
/// probability over `alpha`, with `beta` solved from the success constraint.
pub fn optimize_near_optimal(p_s_target: f64, ch: &ChannelSpec, theta: f64, mono: &Monotone) -> Result<NearOptimal> {
    check_target(p_s_target)?;
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(invalid(format!("theta = {theta} outside (0, pi]")));
    }
    // beta = alpha gives the smallest success probability, 1 - u_alpha
    let a_max = (-(-p_s_target).ln_1p() / 2.0).sqrt();
    let eval = |t: f64| -> Result<(f64, f64)> {
        let a = t * a_max;
        let b = solve_b(a, p_s_target)?;
        let amps = BranchAmplitudes {
            gamma_plus: (b + a) / std::f64::consts::SQRT_2,
            gamma_minus: (b - a) / std::f64::consts::SQRT_2,
            u_alpha: (-2.0 * a * a).exp(),
        };
        let p_s = success_scaled(a, b);
        Ok((b, grouped_weight(&amps, ch, mono, p_s)? / p_s))
    };
    let failure = RefCell::new(None);
    let objective = |t: f64| match eval(t) {
        Ok((_, e)) => e,
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            f64::NEG_INFINITY
        }
    };
    let best = maximize_1d(objective, 1e-6, 1.0, 1e-10);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let (b, e_bar) = eval(best.x)?;
    let params = ProtocolParams::from_scaled(best.x * a_max, b, theta, *ch)?;
    Ok(NearOptimal { params, e_bar: e_bar.clamp(0.0, 1.0), fallback: best.fallback })
}

/// The photon-counting protocol's curve `(p_s, p_s E_bar)`, evaluated on every
/// grid point after convex-hull mixing.
pub fn near_optimal_curve(ch: &ChannelSpec, theta: f64, grid: &[f64], mono: &Monotone) -> Result<Vec<CurvePoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("p_s grid"));
    }
    let raw: Vec<CurvePoint> = grid
        .par_iter()
        .map(|&p| {
            let r = optimize_near_optimal(p, ch, theta, mono)?;
            Ok(CurvePoint::new(p, p * r.e_bar)?
                .with_label("curve", NEAR_OPTIMAL_CURVE_ID)
                .with_label("monotone", mono.name())
                .with_label("T", ch.transmittance())
                .with_label("theta", theta)
                .with_label("alpha", r.params.alpha)
                .with_label("beta", r.params.beta))
        })
        .collect::<Result<_>>()?;
    envelope_on_grid(raw)
}

//! The full optical chain in the photon-number basis, kept as four qubit
//! branches, plus the measurements and reductions performed on its output.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fock::{coherent_fock, required_nmax, FockRegister};
use crate::entanglement::{concurrence_wootters, reduce_rank2_purified, TwoQubitDensity, RANK2_TOL};
use crate::error::Result;
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::protocol::{OutcomeRecord, ProtocolParams};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A qubit-controlled probe after interaction and local-oscillator
/// displacement, one single-mode state per qubit value.
struct Probe {
    branches: [FockRegister; 2],
    /// Qubit amplitudes `e^{-i (-1)^j zeta} / sqrt2`.
    qubit: [C64; 2],
}

/// Prepares `|amplitude>`, couples it to a qubit in
/// `(e^{-i zeta}|0> + e^{i zeta}|1>)/sqrt2`, then displaces by
/// `-amplitude cos(theta/2)`; the result is cut to `nmax`.
fn probe(amplitude: f64, theta: f64, nmax: usize) -> Result<Probe> {
    let prep = required_nmax(amplitude * amplitude).max(nmax);
    let zeta = 0.5 * amplitude * amplitude * theta.sin();
    let make = |sign: f64| -> Result<FockRegister> {
        let mut v = coherent_fock(C64::new(amplitude, 0.0), prep)?;
        let norm = v.norm_sqr();
        v.phase_rotate(0, sign * 0.5 * theta);
        v.displace(0, C64::new(-amplitude * (0.5 * theta).cos(), 0.0))?;
        v.check_norm(norm, "displacement")?;
        let cut = v.retruncate(nmax)?;
        cut.check_norm(norm, "truncation after displacement")?;
        Ok(cut)
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Probe {
        branches: [make(1.0)?, make(-1.0)?],
        qubit: [C64::from_polar(s, -zeta), C64::from_polar(s, zeta)],
    })
}

/// Bound on the mean photon number of any mode in the multimode part of the
/// chain, read off the prepared probes.
fn chain_photon_number(alice: &Probe, bob: &Probe) -> f64 {
    let mut mu: f64 = 0.0;
    for a in &alice.branches {
        let ma = a.mean_photon_number(0);
        for b in &bob.branches {
            let mb = b.mean_photon_number(0);
            // any two-mode rotation keeps each mode below the pair's total
            mu = mu.max(ma + mb);
        }
    }
    mu
}

/// Default truncation for `p`: `ceil(mu + 10 sqrt(mu + 1) + 20)` with `mu` the
/// bound on the mean photon number of any mode after the displacements.
pub fn default_nmax(p: &ProtocolParams) -> Result<usize> {
    let t = p.channel.transmittance();
    let a0 = p.alpha / t.sqrt();
    let wide = required_nmax(a0 * a0).max(required_nmax(p.beta * p.beta));
    let alice = probe(a0, p.theta, wide)?;
    let bob = probe(p.beta, p.theta, wide)?;
    Ok(required_nmax(chain_photon_number(&alice, &bob)))
}

/// Alice's side after the channel: for each qubit value `j`, the state of
/// `(b1, e)` including the qubit amplitude.
fn alice_after_loss(p: &ProtocolParams, nmax: usize) -> Result<[FockRegister; 2]> {
    let t = p.channel.transmittance();
    let a = probe(p.alpha / t.sqrt(), p.theta, nmax)?;
    let mut out = Vec::with_capacity(2);
    for j in 0..2 {
        let mut v = a.branches[j].lossy_channel(0, t)?;
        v.check_norm(a.branches[j].norm_sqr(), "loss")?;
        v.scale(a.qubit[j]);
        out.push(v);
    }
    Ok([out.remove(0), out.remove(0)])
}

/// Output of the optical chain: amplitudes of `|j>_A |k>_B |n3, n4, e>` for the
/// four qubit branches, modes ordered `(b3, b4, e)`.
#[derive(Clone, Debug)]
pub struct OpticalState {
    pub nmax: usize,
    branches: Vec<FockRegister>,
}

impl OpticalState {
    /// Branch `(j, k)` as a three-mode register over `(b3, b4, e)`.
    pub fn branch(&self, j: usize, k: usize) -> &FockRegister {
        &self.branches[2 * j + k]
    }

    pub fn amplitude(&self, j: usize, k: usize, n3: usize, n4: usize, e: usize) -> C64 {
        self.branch(j, k).amplitude(&[n3, n4, e])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(FockRegister::norm_sqr).sum()
    }
}

/// Runs interaction, displacement, loss, Bob's probe and the balanced beam
/// splitter in a `(nmax+1)^3` space per qubit branch. `nmax = None` uses
/// [`default_nmax`].
pub fn run_optical_chain(p: &ProtocolParams, nmax: Option<usize>) -> Result<OpticalState> {
    let nmax = match nmax {
        Some(n) => n,
        None => default_nmax(p)?,
    };
    let alice = alice_after_loss(p, nmax)?;
    let bob = probe(p.beta, p.theta, nmax)?;
    let mut branches = Vec::with_capacity(4);
    for a in &alice {
        for k in 0..2 {
            // (b1, e) x b2 -> (b1, b2, e)
            let mut joint = bob_side(a, &bob.branches[k])?;
            let norm = joint.norm_sqr();
            joint.beam_splitter_5050(0, 1)?;
            joint.check_norm(norm, "beam splitter")?;
            joint.scale(bob.qubit[k]);
            branches.push(joint);
        }
    }
    Ok(OpticalState { nmax, branches })
}

/// Reorders `(b1, e) ⊗ b2` into `(b1, b2, e)`.
fn bob_side(alice: &FockRegister, b2: &FockRegister) -> Result<FockRegister> {
    let n1 = alice.nmax() + 1;
    let mut amps = vec![ZERO; n1 * n1 * n1];
    for x in 0..n1 {
        for e in 0..n1 {
            let za = alice.amplitude(&[x, e]);
            if za == ZERO {
                continue;
            }
            for y in 0..n1 {
                amps[(x * n1 + y) * n1 + e] = za * b2.amplitudes()[y];
            }
        }
    }
    FockRegister::new(alice.nmax(), 3, amps)
}

/// What the oracle measures on the chain output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub nmax: usize,
    pub p_s: f64,
    /// `None` when nothing is heralded.
    pub qnd_concurrence: Option<f64>,
    /// Every `(m, n)` with `m, n <= nmax` and nonzero probability.
    pub outcomes: Vec<OutcomeRecord>,
    /// `sum_n P_nn`.
    pub diagonal_mass: f64,
    /// Qudit-side weight dropped by the rank-2 compression, relative to `p_s`.
    pub discarded_weight: f64,
    /// Filled in by [`verify_virtual_reduction`] when run as part of a point check.
    pub phase_flip_f: Option<f64>,
    /// Filled in by comparison against the closed forms.
    pub max_discrepancy: Option<f64>,
}

/// Applies the QND projection onto `n3 != n4` and, separately, photon counting
/// on `b3, b4`, after tracing out the environment.
pub fn qnd_project_and_measure(state: &OpticalState) -> Result<OracleReport> {
    let n1 = state.nmax + 1;
    let qudit = 2 * n1 * n1;

    // psi[(j * qudit + q) * env + e] with q = (k, n3, n4)
    let mut psi = vec![ZERO; 2 * qudit * n1];
    let mut p_s = 0.0;
    let mut diagonal_mass = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            let br = state.branch(j, k).amplitudes();
            for n3 in 0..n1 {
                for n4 in 0..n1 {
                    for e in 0..n1 {
                        let z = br[(n3 * n1 + n4) * n1 + e];
                        if n3 == n4 {
                            diagonal_mass += z.norm_sqr();
                            continue;
                        }
                        p_s += z.norm_sqr();
                        let q = (k * n1 + n3) * n1 + n4;
                        psi[(j * qudit + q) * n1 + e] = z;
                    }
                }
            }
        }
    }

    let (qnd_concurrence, discarded_weight) = if p_s > 0.0 {
        let red = reduce_rank2_purified(&psi, qudit, n1, RANK2_TOL)?;
        (Some(concurrence_wootters(&red.state)), red.discarded)
    } else {
        (None, 0.0)
    };

    let mut outcomes = Vec::new();
    for m in 0..n1 {
        for n in 0..n1 {
            let mut rho = ComplexMatrix::zeros(4, 4);
            for e in 0..n1 {
                let v: Vec<C64> = (0..4).map(|jk| state.amplitude(jk / 2, jk % 2, m, n, e)).collect();
                for r in 0..4 {
                    if v[r] == ZERO {
                        continue;
                    }
                    for s in 0..4 {
                        rho[(r, s)] += v[r] * v[s].conj();
                    }
                }
            }
            let prob = rho.trace().re;
            if !(prob > 0.0) {
                continue;
            }
            let c = concurrence_wootters(&TwoQubitDensity::from_unnormalized(&rho)?);
            outcomes.push(OutcomeRecord { m, n, probability: prob, concurrence: c, monotone: c });
        }
    }

    Ok(OracleReport {
        nmax: state.nmax,
        p_s,
        qnd_concurrence,
        outcomes,
        diagonal_mass,
        discarded_weight,
        phase_flip_f: None,
        max_discrepancy: None,
    })
}

/// Result of checking that tracing out the channel environment leaves a phase
/// flip acting on a pure qubit-pulse state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VirtualCheck {
    /// Fitted flip-free weight of the phase-flip channel.
    pub f_measured: f64,
    /// Frobenius distance between `Tr_e` of the chain state and the fitted
    /// `Lambda_f(|psi'><psi'|)`.
    pub discrepancy: f64,
    /// Largest weight outside the rank-1 (product) part of either branch.
    pub product_residual: f64,
    /// `|psi'>` over `(A, b1)`, index `j * (nmax+1) + n`.
    #[serde(skip)]
    pub psi_prime: Vec<C64>,
}

/// Leading singular triple of an `n x n` matrix `m[x, e]` (row-major):
/// `(sigma, u, v)` with `m ≈ sigma u v^T`, plus the relative weight left over.
fn rank_one(m: &[C64], n: usize) -> Result<(f64, Vec<C64>, Vec<C64>, f64)> {
    let h = ComplexMatrix::from_fn(n, n, |x, y| (0..n).map(|e| m[x * n + e] * m[y * n + e].conj()).sum());
    let total = h.trace().re;
    let eig = hermitian_eig(&h)?;
    let sigma = eig.values[0].max(0.0).sqrt();
    let u = eig.vectors.column(0);
    // v[e] = sum_x conj(u[x]) m[x, e] / sigma
    let v: Vec<C64> = (0..n).map(|e| (0..n).map(|x| u[x].conj() * m[x * n + e]).sum::<C64>() / sigma).collect();
    let residual = ((total - eig.values[0]) / total).max(0.0);
    Ok((sigma, u, v, residual))
}

/// Traces the environment out of Alice's post-channel state, extracts the pulse
/// states `|u_j>`, `|v_j>` and compares against a phase flip on `|psi'>`.
pub fn verify_virtual_reduction(p: &ProtocolParams, nmax: Option<usize>) -> Result<VirtualCheck> {
    let nmax = match nmax {
        Some(n) => n,
        None => default_nmax(p)?,
    };
    let n1 = nmax + 1;
    let alice = alice_after_loss(p, nmax)?;
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut weights = Vec::new();
    let mut product_residual: f64 = 0.0;
    for branch in &alice {
        let (sigma, u, v, res) = rank_one(branch.amplitudes(), n1)?;
        product_residual = product_residual.max(res);
        weights.push(sigma);
        us.push(u);
        vs.push(v);
    }
    // <v1|v0>, with the u_j carrying all phases (v_j normalised by sigma)
    let v10: C64 = vs[1].iter().zip(&vs[0]).map(|(a, b)| a.conj() * b).sum();
    let xi = 0.5 * v10.arg();
    let mut psi_prime = vec![ZERO; 2 * n1];
    for j in 0..2 {
        let phase = C64::from_polar(1.0, if j == 0 { xi } else { -xi });
        for x in 0..n1 {
            psi_prime[j * n1 + x] = us[j][x] * weights[j] * phase;
        }
    }

    // Tr_e|psi><psi| over (A, b1)
    let d = 2 * n1;
    let at = |r: usize, e: usize| alice[r / n1].amplitudes()[(r % n1) * n1 + e];
    let rho = ComplexMatrix::from_fn(d, d, |r, s| (0..n1).map(|e| at(r, e) * at(s, e).conj()).sum());
    let ideal = ComplexMatrix::outer(&psi_prime, &psi_prime);

    let block_norm = |m: &ComplexMatrix| -> f64 {
        let mut acc = 0.0;
        for r in 0..n1 {
            for s in n1..d {
                acc += m[(r, s)].norm_sqr();
            }
        }
        acc.sqrt()
    };
    let c_ideal = block_norm(&ideal);
    let f_measured = if c_ideal > 0.0 { 0.5 * (1.0 + block_norm(&rho) / c_ideal) } else { 1.0 };
    let damp = 2.0 * f_measured - 1.0;
    let fitted = ComplexMatrix::from_fn(d, d, |r, s| if (r < n1) == (s < n1) { ideal[(r, s)] } else { ideal[(r, s)] * damp });
    let discrepancy = (&rho - &fitted).frobenius_norm();
    Ok(VirtualCheck { f_measured, discrepancy, product_residual, psi_prime })
}

/// Discrepancy between the two orders of "channel environment" and "Bob's
/// chain": the full chain with `e` traced out at the end, against Bob's chain
/// applied to `|psi'>` followed by the fitted phase flip on A. Returned as the
/// Frobenius distance of the two density operators on `(A, B, b3, b4)`.
pub fn commutation_discrepancy(p: &ProtocolParams, nmax: Option<usize>) -> Result<f64> {
    let nmax = match nmax {
        Some(n) => n,
        None => default_nmax(p)?,
    };
    let n1 = nmax + 1;
    let full = run_optical_chain(p, Some(nmax))?;
    let check = verify_virtual_reduction(p, Some(nmax))?;
    let bob = probe(p.beta, p.theta, nmax)?;

    // virtual route: |chi'> over (j, k, n3, n4)
    let plane = n1 * n1;
    let mut chi = vec![ZERO; 4 * plane];
    for j in 0..2 {
        let b1 = FockRegister::new(nmax, 1, check.psi_prime[j * n1..(j + 1) * n1].to_vec())?;
        for k in 0..2 {
            let mut joint = b1.tensor(&bob.branches[k])?;
            joint.beam_splitter_5050(0, 1)?;
            joint.scale(bob.qubit[k]);
            chi[(2 * j + k) * plane..(2 * j + k + 1) * plane].copy_from_slice(joint.amplitudes());
        }
    }
    let f = check.f_measured;
    let flipped: Vec<C64> = chi.iter().enumerate().map(|(i, z)| if i >= 2 * plane { -z } else { *z }).collect();
    let ys: Vec<Vec<C64>> = vec![chi.iter().map(|z| z * f.sqrt()).collect(), flipped.iter().map(|z| z * (1.0 - f).max(0.0).sqrt()).collect()];

    // full route: one vector per environment level
    let xs: Vec<Vec<C64>> = (0..n1)
        .map(|e| {
            let mut v = vec![ZERO; 4 * plane];
            for jk in 0..4 {
                for n3 in 0..n1 {
                    for n4 in 0..n1 {
                        v[jk * plane + n3 * n1 + n4] = full.amplitude(jk / 2, jk % 2, n3, n4, e);
                    }
                }
            }
            v
        })
        .collect();

    // Expand both ensembles in an orthonormal basis of their joint span and
    // subtract there; going through overlaps alone leaves a sqrt(eps) floor.
    let coords = span_coordinates(xs.iter().chain(&ys));
    let (cx, cy) = coords.split_at(xs.len());
    let k = coords.iter().map(Vec::len).max().unwrap_or(0);
    let rank_sum = |cs: &[Vec<C64>], a: usize, b: usize| -> C64 {
        cs.iter().map(|c| c.get(a).copied().unwrap_or(ZERO) * c.get(b).copied().unwrap_or(ZERO).conj()).sum()
    };
    let mut acc = 0.0;
    for a in 0..k {
        for b in 0..k {
            acc += (rank_sum(cx, a, b) - rank_sum(cy, a, b)).norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// Coordinates of each vector in a basis built by twice-iterated modified
/// Gram-Schmidt over the sequence; components below `1e-15` of the running
/// scale start no new basis vector.
fn span_coordinates<'a>(vs: impl Iterator<Item = &'a Vec<C64>>) -> Vec<Vec<C64>> {
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut out = Vec::new();
    let mut scale: f64 = 0.0;
    for v in vs {
        let mut r = v.clone();
        let mut c = vec![ZERO; basis.len()];
        for _ in 0..2 {
            for (ci, q) in c.iter_mut().zip(&basis) {
                let h = dot(q, &r);
                *ci += h;
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= h * y;
                }
            }
        }
        let n = dot(&r, &r).re.sqrt();
        scale = scale.max(dot(v, v).re.sqrt());
        if n > 1e-15 * scale {
            basis.push(r.iter().map(|x| x / n).collect());
            c.push(C64::new(n, 0.0));
        }
        out.push(c);
    }
    out
}

/// The standard verification grid: `alpha in {0, 0.5, 1}`,
/// `beta in {alpha, alpha + 0.5, 2 alpha + 1}`, `theta in {0.2, pi/2}`,
/// `T in {0.3, 0.7, 1}`.
pub fn standard_grid() -> Vec<ProtocolParams> {
    let mut out = Vec::new();
    for &alpha in &[0.0, 0.5, 1.0] {
        for beta in [alpha, alpha + 0.5, 2.0 * alpha + 1.0] {
            for &theta in &[0.2, PI / 2.0] {
                for &t in &[0.3, 0.7, 1.0] {
                    let ch = crate::bound::ChannelSpec::new(t).expect("grid transmittance is valid");
                    out.push(ProtocolParams::new(alpha, beta, theta, ch).expect("grid parameters are valid"));
                }
            }
        }
    }
    out
}

//! Two-qubit concurrence, the phase-flip channel, entanglement monotones of
//! the concurrence, and compression of rank-2 qubit-qudit states to two qubits.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, psd_sqrt, singular_values, ComplexMatrix, C64};

const DENSITY_TOL: f64 = 1e-10;
const DENSITY_EIG_FLOOR: f64 = -1e-9;
/// Default eigenvalue threshold for detecting the qudit-side support.
pub const RANK2_TOL: f64 = 1e-9;

/// A validated 4x4 two-qubit density matrix, qubit order `A ⊗ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitDensity(ComplexMatrix);

impl TwoQubitDensity {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::InvalidDensity(format!("expected 4x4, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let defect = matrix.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = *hermitian_eig(&matrix)?.values.last().unwrap();
        if min < DENSITY_EIG_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(matrix))
    }

    /// Normalises a nonzero positive operator by its trace.
    pub fn from_unnormalized(matrix: &ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidDensity(format!("trace {tr} is not positive")));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    /// `|psi><psi| / <psi|psi>` for a 4-component amplitude vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        if psi.len() != 4 {
            return Err(Error::InvalidDensity(format!("pure state needs 4 amplitudes, got {}", psi.len())));
        }
        Self::from_unnormalized(&ComplexMatrix::outer(psi, psi))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// `Y ⊗ Y` applied to a vector.
fn spin_flip(v: &[C64]) -> [C64; 4] {
    [-v[3], v[2], v[1], -v[0]]
}

/// Wootters concurrence of a two-qubit state.
///
/// `rho` is written as `V V^dagger` from its eigendecomposition, and the
/// Wootters values are the singular values of the symmetric matrix
/// `tau = V^T (Y ⊗ Y) V`. These coincide with the eigenvalues of
/// `sqrt(sqrt(rho) rho~ sqrt(rho))` (see [`concurrence_wootters_hermitian`])
/// but stay accurate for rank-deficient states because no square root of a
/// noise-level eigenvalue ever enters the result.
pub fn concurrence_wootters(rho: &TwoQubitDensity) -> f64 {
    let eig = hermitian_eig(rho.matrix()).expect("validated density is Hermitian");
    let cols: Vec<Vec<C64>> = (0..4)
        .map(|k| {
            let w = eig.values[k].max(0.0).sqrt();
            eig.vectors.column(k).into_iter().map(|z| z * w).collect()
        })
        .collect();
    let tau = ComplexMatrix::from_fn(4, 4, |k, l| {
        let flipped = spin_flip(&cols[l]);
        cols[k].iter().zip(flipped.iter()).map(|(a, b)| a * b).sum()
    });
    let mu = singular_values(&tau);
    (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
}

/// Wootters concurrence through `R = sqrt(sqrt(rho) rho~ sqrt(rho))`.
///
/// Accurate for full-rank states; for rank-deficient inputs the square roots
/// of rounding-level eigenvalues limit it to roughly `1e-8`.
pub fn concurrence_wootters_hermitian(rho: &TwoQubitDensity) -> Result<f64> {
    let m = rho.matrix();
    let yy = ComplexMatrix::from_real(4, 4, &[0., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., -1., 0., 0., 0.])?;
    let tilde = &(&yy * &m.conj()) * &yy;
    let s = psd_sqrt(m)?;
    let inner = &(&s * &tilde) * &s;
    let inner = ComplexMatrix::from_fn(4, 4, |i, j| (inner[(i, j)] + inner[(j, i)].conj()) * 0.5);
    let r = psd_sqrt(&inner)?;
    let mu = hermitian_eig(&r)?.values;
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// `2 sqrt(l0 l1)` for Schmidt coefficients `(l0, l1)`.
pub fn concurrence_pure(lambda0: f64, lambda1: f64) -> Result<f64> {
    if lambda0 < 0.0 || lambda1 < 0.0 {
        return Err(invalid(format!("negative Schmidt coefficient ({lambda0}, {lambda1})")));
    }
    if (lambda0 + lambda1 - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("Schmidt coefficients sum to {}", lambda0 + lambda1)));
    }
    Ok(2.0 * (lambda0 * lambda1).sqrt())
}

/// Schmidt coefficients (descending) of a normalised two-qubit pure state.
pub fn schmidt_coefficients(psi: &[C64]) -> Result<(f64, f64)> {
    let m = ComplexMatrix::from_vec(2, 2, psi.to_vec())?;
    let sv = singular_values(&m);
    let norm = sv[0] * sv[0] + sv[1] * sv[1];
    Ok((sv[0] * sv[0] / norm, sv[1] * sv[1] / norm))
}

/// Phase-flip channel on qubit A: `rho -> f rho + (1 - f) Z rho Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFlipChannel {
    f: f64,
}

impl PhaseFlipChannel {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&f) {
            return Err(invalid(format!("flip-free weight f = {f} outside [1/2, 1]")));
        }
        Ok(Self { f })
    }

    /// Channel induced by pulse states with overlap modulus `u` sent through a
    /// channel of transmittance `t`: `f = (1 + u^{(1-T)/T}) / 2`.
    pub fn from_overlap(u: f64, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(invalid(format!("overlap {u} outside [0, 1]")));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(invalid(format!("transmittance {t} outside (0, 1]")));
        }
        Self::new(0.5 * (1.0 + overlap_power(u, t)))
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    /// Coherence damping factor `2f - 1`.
    pub fn damping(&self) -> f64 {
        2.0 * self.f - 1.0
    }

    /// Applies the channel to qubit A of an operator on `A ⊗ Q`, where the
    /// operator has dimension `2 * qudit_dim`.
    pub fn apply_to(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = m.rows() / 2;
        let damp = self.damping();
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| if (i < d) == (j < d) { m[(i, j)] } else { m[(i, j)] * damp })
    }
}

/// `u^{(1-T)/T}` with `0^0 = 1` at the lossless point.
pub fn overlap_power(u: f64, t: f64) -> f64 {
    let k = (1.0 - t) / t;
    if k == 0.0 {
        1.0
    } else if u == 0.0 {
        0.0
    } else {
        (k * u.ln()).exp()
    }
}

pub fn apply_phase_flip(rho: &TwoQubitDensity, ch: &PhaseFlipChannel) -> TwoQubitDensity {
    TwoQubitDensity(ch.apply_to(rho.matrix()))
}

/// Compresses the qudit side of a `2 x D` state onto its (at most)
/// two-dimensional support.
pub fn reduce_rank2_qubit_qudit(rho: &ComplexMatrix, qudit_dim: usize, tol: f64) -> Result<TwoQubitDensity> {
    if rho.rows() != 2 * qudit_dim || !rho.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} operator for a 2x{qudit_dim} system", rho.rows(), rho.cols())));
    }
    let tr = rho.trace().re;
    let reduced = partial_trace(rho, &[2, qudit_dim], &[1])?;
    let eig = hermitian_eig(&reduced)?;
    let support = eig.values.iter().filter(|&&v| v > tol * tr).count();
    if support > 2 {
        return Err(Error::RankReduction(support));
    }
    let basis: Vec<Vec<C64>> = (0..2.min(qudit_dim)).map(|i| eig.vectors.column(i)).collect();
    let mut out = ComplexMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for (i, ui) in basis.iter().enumerate() {
                for (j, uj) in basis.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for q in 0..qudit_dim {
                        if ui[q] == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for r in 0..qudit_dim {
                            acc += ui[q].conj() * rho[(a * qudit_dim + q, b * qudit_dim + r)] * uj[r];
                        }
                    }
                    out[(2 * a + i, 2 * b + j)] = acc;
                }
            }
        }
    }
    TwoQubitDensity::from_unnormalized(&out)
}

/// Result of compressing a purified qubit-qudit state.
#[derive(Clone, Debug)]
pub struct PurifiedReduction {
    pub state: TwoQubitDensity,
    /// Squared norm of the input (its success probability when the input is a
    /// projected, unnormalised state).
    pub weight: f64,
    /// Qudit-side eigenvalues beyond the second, relative to `weight`.
    pub discarded: f64,
}

/// Rank-2 compression of the state `sum_e |Psi_e><Psi_e|` on `A ⊗ Q`, where
/// `psi[(a * qudit_dim + q) * env_dim + e]` holds a purification with an
/// environment of dimension `env_dim`.
///
/// The qudit support is read off the Gram matrix `M^dagger M` of the
/// `qudit_dim x (2 env_dim)` matrix `M[q, (a, e)]`; its top eigenpairs give the
/// compressed amplitudes `sqrt(s_i) conj(v_i)` directly, so the large qudit
/// space is never diagonalised.
pub fn reduce_rank2_purified(psi: &[C64], qudit_dim: usize, env_dim: usize, tol: f64) -> Result<PurifiedReduction> {
    if psi.len() != 2 * qudit_dim * env_dim {
        return Err(Error::DimensionMismatch(format!("{} amplitudes for 2x{qudit_dim}x{env_dim}", psi.len())));
    }
    let cols = 2 * env_dim;
    let at = |q: usize, c: usize| psi[((c / env_dim) * qudit_dim + q) * env_dim + c % env_dim];
    let mut gram = ComplexMatrix::zeros(cols, cols);
    for q in 0..qudit_dim {
        let row: Vec<C64> = (0..cols).map(|c| at(q, c)).collect();
        for (c, x) in row.iter().enumerate() {
            if *x == Complex64::new(0.0, 0.0) {
                continue;
            }
            let xc = x.conj();
            for (d, y) in row.iter().enumerate().skip(c) {
                gram[(c, d)] += xc * y;
            }
        }
    }
    for c in 0..cols {
        for d in 0..c {
            gram[(c, d)] = gram[(d, c)].conj();
        }
    }
    let weight = gram.trace().re;
    if !(weight > 0.0) {
        return Err(Error::InvalidDensity("zero-norm state".into()));
    }
    let eig = hermitian_eig(&gram)?;
    let support = eig.values.iter().filter(|&&v| v > tol * weight).count();
    if support > 2 {
        return Err(Error::RankReduction(support));
    }
    let discarded = eig.values.iter().skip(2).map(|v| v.max(0.0)).sum::<f64>() / weight;

    // compressed[(a, i, e)] = sqrt(s_i) conj(v_i[(a, e)])
    let k = 2.min(cols);
    let amp = |a: usize, i: usize, e: usize| -> C64 {
        if i >= k {
            return C64::new(0.0, 0.0);
        }
        eig.vectors[(a * env_dim + e, i)].conj() * eig.values[i].max(0.0).sqrt()
    };
    let mut out = ComplexMatrix::zeros(4, 4);
    for r in 0..4 {
        for s in 0..4 {
            let (a, i, b, j) = (r / 2, r % 2, s / 2, s % 2);
            out[(r, s)] = (0..env_dim).map(|e| amp(a, i, e) * amp(b, j, e).conj()).sum();
        }
    }
    Ok(PurifiedReduction { state: TwoQubitDensity::from_unnormalized(&out)?, weight, discarded })
}

/// Entanglement monotones expressible as a function of the concurrence.
#[derive(Clone, Copy, Debug)]
pub enum Monotone {
    Concurrence,
    EntanglementOfFormation,
    /// A user-supplied convex nondecreasing `E(C)` with `E(0) = 0`.
    Custom { name: &'static str, eval: fn(f64) -> f64 },
}

impl Monotone {
    pub fn name(&self) -> &'static str {
        match self {
            Monotone::Concurrence => "concurrence",
            Monotone::EntanglementOfFormation => "eof",
            Monotone::Custom { name, .. } => name,
        }
    }

    /// Unchecked evaluation on `c` clamped into `[0, 1]`.
    pub(crate) fn eval(&self, c: f64) -> f64 {
        let c = c.clamp(0.0, 1.0);
        match self {
            Monotone::Concurrence => c,
            Monotone::EntanglementOfFormation => binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt())),
            Monotone::Custom { eval, .. } => eval(c),
        }
    }
}

impl PartialEq for Monotone {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl fmt::Display for Monotone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Monotone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concurrence" => Ok(Monotone::Concurrence),
            "eof" | "entanglement-of-formation" => Ok(Monotone::EntanglementOfFormation),
            other => Err(invalid(format!("unknown monotone '{other}'"))),
        }
    }
}

/// `-p log2 p - (1-p) log2 (1-p)`, zero at both ends.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// `E(c)` for `c` in `[0, 1]` (with `1e-12` slack).
pub fn monotone_value(mono: &Monotone, c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(invalid(format!("concurrence {c} outside [0, 1]")));
    }
    Ok(mono.eval(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell(sign: f64) -> Vec<C64> {
        let s = 0.5f64.sqrt();
        vec![c(s), c(0.0), c(0.0), c(sign * s)]
    }

    fn random_pure(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }

    #[test]
    fn wootters_reference_states() {
        let phi = TwoQubitDensity::from_pure(&bell(1.0)).unwrap();
        assert!((concurrence_wootters(&phi) - 1.0).abs() < 1e-12);
        let mixed = TwoQubitDensity::new(ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        assert!(concurrence_wootters(&mixed).abs() < 1e-12);

        let plus = ComplexMatrix::outer(&bell(1.0), &bell(1.0)).scale_real(0.75);
        let minus = ComplexMatrix::outer(&bell(-1.0), &bell(-1.0)).scale_real(0.25);
        let bd = TwoQubitDensity::new(&plus + &minus).unwrap();
        assert!((concurrence_wootters(&bd) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(TwoQubitDensity::new(ComplexMatrix::identity(4)).is_err());
        assert!(TwoQubitDensity::new(ComplexMatrix::identity(2)).is_err());
        assert!(TwoQubitDensity::new(ComplexMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0])).is_err());
    }

    #[test]
    fn pure_concurrence() {
        assert_eq!(concurrence_pure(0.5, 0.5).unwrap(), 1.0);
        assert_eq!(concurrence_pure(1.0, 0.0).unwrap(), 0.0);
        assert!((concurrence_pure(0.8, 0.2).unwrap() - 0.8).abs() < 1e-15);
        assert!(concurrence_pure(-0.1, 1.1).is_err());
    }

    #[test]
    fn phase_flip_examples() {
        let phi = TwoQubitDensity::from_pure(&bell(1.0)).unwrap();
        let id = PhaseFlipChannel::new(1.0).unwrap();
        assert_eq!(apply_phase_flip(&phi, &id), phi);
        let full = PhaseFlipChannel::new(0.5).unwrap();
        assert!(concurrence_wootters(&apply_phase_flip(&phi, &full)) < 1e-12);
        let q = PhaseFlipChannel::new(0.75).unwrap();
        let out = apply_phase_flip(&phi, &q);
        assert!((concurrence_wootters(&out) - 0.5).abs() < 1e-12);
        for i in 0..4 {
            assert_eq!(out.matrix()[(i, i)], phi.matrix()[(i, i)]);
        }
        assert!(PhaseFlipChannel::new(0.4).is_err());
        let from = PhaseFlipChannel::from_overlap((-1.0f64).exp(), 0.5).unwrap();
        assert!((from.f() - 0.683_939_720_585_721_2).abs() < 1e-15);
        assert_eq!(PhaseFlipChannel::from_overlap(0.3, 1.0).unwrap().f(), 1.0);
    }

    #[test]
    fn rank2_reduction_examples() {
        // |Phi+> with B embedded in a qutrit
        let s = 0.5f64.sqrt();
        let mut psi = vec![c(0.0); 6];
        psi[0] = c(s);
        psi[4] = c(s);
        let rho = ComplexMatrix::outer(&psi, &psi);
        let red = reduce_rank2_qubit_qudit(&rho, 3, RANK2_TOL).unwrap();
        assert!((concurrence_wootters(&red) - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_pure(&mut rng, 2);
        let b = random_pure(&mut rng, 5);
        let prod: Vec<C64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let red = reduce_rank2_qubit_qudit(&ComplexMatrix::outer(&prod, &prod), 5, RANK2_TOL).unwrap();
        assert!(concurrence_wootters(&red) < 1e-12);

        // a full-rank qudit side is refused
        let mixed = ComplexMatrix::identity(6).scale_real(1.0 / 6.0);
        assert_eq!(reduce_rank2_qubit_qudit(&mixed, 3, RANK2_TOL).unwrap_err(), Error::RankReduction(3));
    }

    #[test]
    fn purified_reduction_matches_explicit_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (d, e) = (6, 3);
        // sum_j |j>_A |w_j>_Q |v_j>_E keeps the qudit support two-dimensional
        let w: Vec<Vec<C64>> = (0..2).map(|_| random_pure(&mut rng, d)).collect();
        let v: Vec<Vec<C64>> = (0..2).map(|_| random_pure(&mut rng, e)).collect();
        let mut psi = vec![C64::new(0.0, 0.0); 2 * d * e];
        for a in 0..2 {
            for q in 0..d {
                for k in 0..e {
                    psi[(a * d + q) * e + k] = w[a][q] * v[a][k] * 0.5f64.sqrt();
                }
            }
        }
        let rho = ComplexMatrix::from_fn(2 * d, 2 * d, |r, s| (0..e).map(|k| psi[r * e + k] * psi[s * e + k].conj()).sum());
        let explicit = reduce_rank2_qubit_qudit(&rho, d, RANK2_TOL).unwrap();
        let purified = reduce_rank2_purified(&psi, d, e, RANK2_TOL).unwrap();
        assert!((purified.weight - 1.0).abs() < 1e-12);
        assert!((concurrence_wootters(&explicit) - concurrence_wootters(&purified.state)).abs() < 1e-12);
    }

    #[test]
    fn monotone_examples() {
        assert_eq!(monotone_value(&Monotone::Concurrence, 0.7).unwrap(), 0.7);
        assert!((monotone_value(&Monotone::EntanglementOfFormation, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // h(0.9330127) evaluated directly
        let p: f64 = 0.5 * (1.0 + 0.75f64.sqrt());
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let v = monotone_value(&Monotone::EntanglementOfFormation, 0.5).unwrap();
        assert!((v - h).abs() < 1e-15);
        assert!((v - 0.354_578_9).abs() < 1e-7);
        assert_eq!(monotone_value(&Monotone::EntanglementOfFormation, 0.0).unwrap(), 0.0);
        assert!(monotone_value(&Monotone::Concurrence, 1.1).is_err());
        assert_eq!("eof".parse::<Monotone>().unwrap(), Monotone::EntanglementOfFormation);
        let sq = Monotone::Custom { name: "squared", eval: |c| c * c };
        assert_eq!(monotone_value(&sq, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn overlap_identity_on_grid() {
        // C(Lambda(|psi'><psi'|)) = o^{(1-T)/T} * 2 sqrt(q0 q1 (1 - o^2))
        for qi in 1..=9 {
            let q0 = qi as f64 / 10.0;
            for oi in [0.0, 0.2, 0.4, 0.6, 0.8, 0.9] {
                for t in [0.1, 0.5, 0.9] {
                    // |u0> = |0>, |u1> = o|0> + sqrt(1-o^2)|1>
                    let u1 = [c(oi), c((1.0 - oi * oi).sqrt())];
                    let (s0, s1) = (q0.sqrt(), (1.0 - q0).sqrt());
                    let psi = vec![c(s0), c(0.0), u1[0] * s1, u1[1] * s1];
                    let rho = TwoQubitDensity::from_pure(&psi).unwrap();
                    let ch = PhaseFlipChannel::from_overlap(oi, t).unwrap();
                    let got = concurrence_wootters(&apply_phase_flip(&rho, &ch));
                    let want = overlap_power(oi, t) * 2.0 * (q0 * (1.0 - q0) * (1.0 - oi * oi)).sqrt();
                    assert!((got - want).abs() < 1e-10, "q0={q0} o={oi} T={t}: {got} vs {want}");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn wootters_on_pure_states_equals_schmidt_formula(seed in 0u64..2000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_pure(&mut rng, 4);
            let rho = TwoQubitDensity::from_pure(&psi).unwrap();
            let (l0, l1) = schmidt_coefficients(&psi).unwrap();
            let want = concurrence_pure(l0, 1.0 - l0).unwrap();
            proptest::prop_assert!(l1 <= l0);
            proptest::prop_assert!((concurrence_wootters(&rho) - want).abs() < 1e-10);
        }

        #[test]
        fn both_wootters_routes_agree_on_full_rank_states(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let rho = TwoQubitDensity::from_unnormalized(&(&a * &a.adjoint())).unwrap();
            let h = concurrence_wootters_hermitian(&rho).unwrap();
            proptest::prop_assert!((concurrence_wootters(&rho) - h).abs() < 1e-9);
        }

        #[test]
        fn phase_flips_compose_multiplicatively(f1 in 0.5f64..1.0, f2 in 0.5f64..1.0) {
            let phi = TwoQubitDensity::from_pure(&bell(1.0)).unwrap();
            let a = PhaseFlipChannel::new(f1).unwrap();
            let b = PhaseFlipChannel::new(f2).unwrap();
            let twice = apply_phase_flip(&apply_phase_flip(&phi, &b), &a);
            let want = (2.0 * f1 - 1.0) * (2.0 * f2 - 1.0);
            proptest::prop_assert!((concurrence_wootters(&twice) - want).abs() < 1e-12);
        }

        #[test]
        fn eof_is_convex(c1 in 0.0f64..1.0, c2 in 0.0f64..1.0, t in 0.0f64..1.0) {
            let m = Monotone::EntanglementOfFormation;
            let lhs = m.eval(t * c1 + (1.0 - t) * c2);
            let rhs = t * m.eval(c1) + (1.0 - t) * m.eval(c2);
            proptest::prop_assert!(lhs <= rhs + 1e-12);
        }
    }
}

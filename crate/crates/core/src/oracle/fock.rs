//! Truncated photon-number-basis states of a few bosonic modes and the
//! Gaussian unitaries the optical chain needs.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::C64;
use crate::special::ln_factorial;

/// Largest tolerated `1 - ||psi||^2` after any step.
pub const NORM_DEFICIT_TOL: f64 = 1e-10;

/// Largest `phi * (p + q)` handled by one pass of a two-mode rotation.
const MAX_BLOCK_PHASE: f64 = 10.0;

const ZERO: C64 = Complex64 { re: 0.0, im: 0.0 };

/// Smallest truncation [`coherent_fock`] accepts for mean photon number `mu`.
pub fn required_nmax(mu: f64) -> usize {
    (mu + 10.0 * (mu + 1.0).sqrt() + 20.0).ceil() as usize
}

/// State of `modes` modes, each truncated at `nmax` photons. Mode 0 is the most
/// significant digit of the flat index.
#[derive(Clone, Debug, PartialEq)]
pub struct FockRegister {
    nmax: usize,
    modes: usize,
    amplitudes: Vec<C64>,
}

impl FockRegister {
    pub fn new(nmax: usize, modes: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("a register needs at least one mode"));
        }
        let dim = (nmax + 1).pow(modes as u32);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for {modes} modes at nmax {nmax}", amplitudes.len())));
        }
        Ok(Self { nmax, modes, amplitudes })
    }

    pub fn vacuum(nmax: usize, modes: usize) -> Self {
        let mut amplitudes = vec![ZERO; (nmax + 1).pow(modes as u32)];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { nmax, modes, amplitudes }
    }

    /// Single-mode number state `|n>`.
    pub fn number(n: usize, nmax: usize) -> Result<Self> {
        if n > nmax {
            return Err(Error::Truncation(format!("|{n}> does not fit below nmax = {nmax}")));
        }
        let mut amplitudes = vec![ZERO; nmax + 1];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { nmax, modes: 1, amplitudes })
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn index(&self, occupation: &[usize]) -> usize {
        occupation.iter().fold(0, |acc, &n| acc * (self.nmax + 1) + n)
    }

    pub fn amplitude(&self, occupation: &[usize]) -> C64 {
        self.amplitudes[self.index(occupation)]
    }

    fn stride(&self, mode: usize) -> usize {
        (self.nmax + 1).pow((self.modes - 1 - mode) as u32)
    }

    fn digit(&self, flat: usize, mode: usize) -> usize {
        (flat / self.stride(mode)) % (self.nmax + 1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.nmax != other.nmax || self.modes != other.modes {
            return Err(Error::DimensionMismatch("registers of different shape".into()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        let total = self.norm_sqr();
        let acc: f64 = self.amplitudes.iter().enumerate().map(|(i, z)| self.digit(i, mode) as f64 * z.norm_sqr()).sum();
        acc / total
    }

    /// Fails if the squared norm fell more than [`NORM_DEFICIT_TOL`] below
    /// `expected`.
    pub fn check_norm(&self, expected: f64, step: &str) -> Result<()> {
        let deficit = expected - self.norm_sqr();
        if deficit > NORM_DEFICIT_TOL * expected.max(1e-300) {
            return Err(Error::Truncation(format!("{step}: norm deficit {deficit:.3e} at nmax = {}", self.nmax)));
        }
        Ok(())
    }

    /// Copy of a single-mode state at a different truncation, dropping or
    /// zero-padding the top levels.
    pub fn retruncate(&self, nmax: usize) -> Result<Self> {
        if self.modes != 1 {
            return Err(invalid("retruncate expects a single mode"));
        }
        let mut amplitudes = vec![ZERO; nmax + 1];
        for (n, z) in self.amplitudes.iter().enumerate().take(nmax + 1) {
            amplitudes[n] = *z;
        }
        Ok(Self { nmax, modes: 1, amplitudes })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.nmax != other.nmax {
            return Err(Error::DimensionMismatch("tensor product of registers with different nmax".into()));
        }
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(Self { nmax: self.nmax, modes: self.modes + other.modes, amplitudes })
    }

    pub fn scale(&mut self, s: C64) {
        self.amplitudes.iter_mut().for_each(|z| *z *= s);
    }

    /// `exp(i phi n)` on one mode.
    pub fn phase_rotate(&mut self, mode: usize, phi: f64) {
        let rot: Vec<C64> = (0..=self.nmax).map(|n| C64::from_polar(1.0, phi * n as f64)).collect();
        for i in 0..self.amplitudes.len() {
            let n = self.digit(i, mode);
            self.amplitudes[i] *= rot[n];
        }
    }

    /// Displacement `D(delta)` on one mode, truncated to the register.
    pub fn displace(&mut self, mode: usize, delta: C64) -> Result<()> {
        self.check_mode(mode)?;
        let d = displacement_matrix(delta, self.nmax);
        let n1 = self.nmax + 1;
        let stride = self.stride(mode);
        let mut out = vec![ZERO; self.amplitudes.len()];
        for base in 0..self.amplitudes.len() {
            if self.digit(base, mode) != 0 {
                continue;
            }
            for n in 0..n1 {
                let z = self.amplitudes[base + n * stride];
                if z == ZERO {
                    continue;
                }
                for m in 0..n1 {
                    out[base + m * stride] += d[m * n1 + n] * z;
                }
            }
        }
        self.amplitudes = out;
        Ok(())
    }

    /// `(-1)^n` on one mode.
    pub fn parity(&mut self, mode: usize) {
        for i in 0..self.amplitudes.len() {
            if self.digit(i, mode) % 2 == 1 {
                self.amplitudes[i] = -self.amplitudes[i];
            }
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(invalid(format!("mode {mode} out of range for {} modes", self.modes)));
        }
        Ok(())
    }

    /// Two-mode rotation with `a_i^dag -> cos(phi) a_i^dag + sin(phi) a_j^dag`
    /// and `a_j^dag -> -sin(phi) a_i^dag + cos(phi) a_j^dag`.
    pub fn rotate_modes(&mut self, i: usize, j: usize, phi: f64) -> Result<()> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(invalid("a beam splitter needs two distinct modes"));
        }
        // the block recursion loses accuracy once phi * (p + q) grows past ~30
        let steps = ((phi.abs() * (2 * self.nmax) as f64) / MAX_BLOCK_PHASE).ceil().max(1.0) as usize;
        let bs = BeamSplitter::new(phi / steps as f64, self.nmax);
        let (si, sj) = (self.stride(i), self.stride(j));
        for _ in 0..steps {
            let mut out = vec![ZERO; self.amplitudes.len()];
            for (flat, &z) in self.amplitudes.iter().enumerate() {
                if z == ZERO {
                    continue;
                }
                let (p, q) = (self.digit(flat, i), self.digit(flat, j));
                let base = flat - p * si - q * sj;
                let tot = p + q;
                let col = bs.column(p, q);
                let lo = tot.saturating_sub(self.nmax);
                for r in lo..=tot.min(self.nmax) {
                    out[base + r * si + (tot - r) * sj] += col[r] * z;
                }
            }
            self.amplitudes = out;
        }
        Ok(())
    }

    /// Balanced beam splitter `|a1>|a2> -> |(a1+a2)/sqrt2>|(a1-a2)/sqrt2>`.
    pub fn beam_splitter_5050(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_mode(j)?;
        self.parity(j);
        self.rotate_modes(i, j, FRAC_PI_4)
    }

    /// Appends a vacuum mode and mixes `mode` into it with transmittance `t`,
    /// so a coherent `|a>` becomes `|sqrt(T) a>|sqrt(1-T) a>`.
    pub fn lossy_channel(&self, mode: usize, t: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(t > 0.0 && t <= 1.0) {
            return Err(invalid(format!("transmittance {t} outside (0, 1]")));
        }
        let mut out = self.tensor(&Self::vacuum(self.nmax, 1))?;
        let env = out.modes - 1;
        out.rotate_modes(mode, env, t.sqrt().acos())?;
        Ok(out)
    }
}

/// `e^{-|a|^2/2} a^n / sqrt(n!)` for `n <= nmax`.
pub fn coherent_fock(amplitude: C64, nmax: usize) -> Result<FockRegister> {
    let mu = amplitude.norm_sqr();
    let need = required_nmax(mu);
    if nmax < need {
        return Err(Error::Truncation(format!("coherent amplitude {amplitude} needs nmax >= {need}, got {nmax}")));
    }
    let mut amplitudes = Vec::with_capacity(nmax + 1);
    let mut c = C64::new((-0.5 * mu).exp(), 0.0);
    amplitudes.push(c);
    for n in 1..=nmax {
        c = c * amplitude / (n as f64).sqrt();
        amplitudes.push(c);
    }
    FockRegister::new(nmax, 1, amplitudes)
}

/// Matrix `<m|D(delta)|n>` for `m, n <= nmax`, row-major.
///
/// For `m = n + a` the element is `e^{-x/2} delta^a g_n` with `x = |delta|^2`
/// and `g_n = sqrt(n!/(n+a)!) L_n^{(a)}(x)`, run through the normalised
/// three-term recurrence; elements above the diagonal follow from
/// `D(delta)^dag = D(-delta)`.
pub fn displacement_matrix(delta: C64, nmax: usize) -> Vec<C64> {
    let n1 = nmax + 1;
    let mut d = vec![ZERO; n1 * n1];
    let x = delta.norm_sqr();
    let (r, arg) = (delta.norm(), delta.arg());
    for a in 0..n1 {
        // prefactor e^{-x/2} |delta|^a / sqrt(a!) in log form
        let ln_pre = if a == 0 {
            -0.5 * x
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            -0.5 * x + a as f64 * r.ln() - 0.5 * ln_factorial(a)
        };
        let pre = ln_pre.exp();
        let af = a as f64;
        let mut prev = 0.0f64;
        let mut g = 1.0f64;
        for n in 0..(n1 - a) {
            if n > 0 {
                let k = (n - 1) as f64;
                let next = ((2.0 * k + 1.0 + af - x) * g - (k * (k + af)).sqrt() * prev) / ((k + 1.0) * (k + 1.0 + af)).sqrt();
                prev = g;
                g = next;
            }
            let val = pre * g;
            let below = C64::from_polar(val, af * arg);
            // <n+a|D(delta)|n>
            d[(n + a) * n1 + n] = below;
            if a > 0 {
                // <n|D(delta)|n+a> = conj(<n+a|D(-delta)|n>)
                let above = C64::from_polar(val, af * (arg + std::f64::consts::PI));
                d[n * n1 + n + a] = above.conj();
            }
        }
    }
    d
}

/// Photon-number blocks of a two-mode rotation.
struct BeamSplitter {
    nmax: usize,
    /// `columns[p * (nmax+1) + q]` is the image of `|p, q>`, indexed by the
    /// photon number of the first mode.
    columns: Vec<Vec<f64>>,
}

impl BeamSplitter {
    fn new(phi: f64, nmax: usize) -> Self {
        let (c, s) = (phi.cos(), phi.sin());
        let n1 = nmax + 1;
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n1 * n1];
        columns[0] = vec![1.0];
        // apply x b1^dag + y b2^dag to a column of total photon number tot
        let create = |v: &[f64], x: f64, y: f64| -> Vec<f64> {
            let tot = v.len();
            (0..=tot)
                .map(|r| {
                    let mut acc = 0.0;
                    if r > 0 {
                        acc += x * (r as f64).sqrt() * v[r - 1];
                    }
                    if r < tot {
                        acc += y * ((tot - r) as f64).sqrt() * v[r];
                    }
                    acc
                })
                .collect()
        };
        for q in 0..n1 {
            if q > 0 {
                let prev = &columns[q - 1];
                let col: Vec<f64> = create(prev, -s, c).into_iter().map(|z| z / (q as f64).sqrt()).collect();
                columns[q] = col;
            }
            for p in 1..n1 {
                let prev = &columns[(p - 1) * n1 + q];
                let col: Vec<f64> = create(prev, c, s).into_iter().map(|z| z / (p as f64).sqrt()).collect();
                columns[p * n1 + q] = col;
            }
        }
        Self { nmax, columns }
    }

    fn column(&self, p: usize, q: usize) -> &[f64] {
        &self.columns[p * (self.nmax + 1) + q]
    }
}

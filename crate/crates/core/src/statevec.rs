//! Dense state-vector engine.
//!
//! Conventions used across the whole crate:
//! * qubit `k` is bit `k` of the amplitude index (qubit 0 least significant);
//! * a two-qubit gate matrix is indexed by `2*b(t0) + b(t1)` where `t0`, `t1`
//!   are the gate's targets in order, so `targets[0]` is the high bit;
//! * measurement outcome `b \u{2208} {0,1}` maps to the signed value `z = 1 - 2b`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError};
use crate::gates::{Gate1Q, Gate2Q};

pub const NORM_TOL: f64 = 1e-10;
const BRANCH_TOL: f64 = 1e-14;
/// Largest subsystem for which a dense reduced density matrix is built.
pub const REDUCED_DENSITY_CAP: usize = 14;

/// Pure state of `n` qubits as a dense array of `2^n` complex amplitudes.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_qubits`.
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "need at least one qubit");
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Self { n_qubits, amps }
    }

    /// Basis state |index> (little-endian: qubit k = bit k).
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(index < (1 << n_qubits));
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::ONE;
        Self { n_qubits, amps }
    }

    /// Wrap an amplitude vector; length must be a power of two.
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || amps.len() != (1 << n) {
            return Err(SimError::Circuit(format!(
                "amplitude vector length {} is not a power of two",
                amps.len()
            )));
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(SimError::QubitOutOfRange(q, self.n_qubits))
        } else {
            Ok(())
        }
    }

    /// Apply a single-qubit gate.
    pub fn apply_1q(&mut self, gate: &Gate1Q, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.apply_raw_1q(&gate.m, q);
        Ok(())
    }

    /// Apply a two-qubit gate on distinct targets `(t0, t1)`.
    pub fn apply_2q(&mut self, gate: &Gate2Q, t0: usize, t1: usize) -> Result<()> {
        self.check_qubit(t0)?;
        self.check_qubit(t1)?;
        if t0 == t1 {
            return Err(SimError::DuplicateTarget(t0));
        }
        self.apply_raw_2q(&gate.m, t0, t1);
        Ok(())
    }

    /// Apply an arbitrary 2x2 linear map (no unitarity check, no renormalization).
    /// This is the entry point the duality machinery uses for non-unitary ops.
    pub fn apply_raw_1q(&mut self, m: &[Complex64; 4], q: usize) {
        let bit = 1usize << q;
        let dim = self.amps.len();
        let mut i = 0;
        while i < dim {
            let a0 = self.amps[i];
            let a1 = self.amps[i | bit];
            self.amps[i] = m[0] * a0 + m[1] * a1;
            self.amps[i | bit] = m[2] * a0 + m[3] * a1;
            i += 1;
            if i & bit != 0 {
                i += bit;
            }
        }
    }

    /// Apply an arbitrary 4x4 linear map on `(t0, t1)`; `t0` is the high bit
    /// of the gate index.
    pub fn apply_raw_2q(&mut self, m: &[Complex64; 16], t0: usize, t1: usize) {
        let b0 = 1usize << t0;
        let b1 = 1usize << t1;
        let dim = self.amps.len();
        for i in 0..dim {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let a = [
                self.amps[i],
                self.amps[i | b1],
                self.amps[i | b0],
                self.amps[i | b0 | b1],
            ];
            for (r, &off) in [0usize, b1, b0, b0 | b1].iter().enumerate() {
                self.amps[i | off] = m[4 * r] * a[0]
                    + m[4 * r + 1] * a[1]
                    + m[4 * r + 2] * a[2]
                    + m[4 * r + 3] * a[3];
            }
        }
    }

    /// Probability that qubit `q` reads 1 (assumes a normalized state).
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        let mut p = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & bit != 0 {
                p += a.norm_sqr();
            }
        }
        p
    }

    /// <sigma_z> on qubit `q`, normalized by the current norm.
    pub fn z_expectation(&self, q: usize) -> f64 {
        let ns = self.norm_sq();
        if ns == 0.0 {
            return 0.0;
        }
        1.0 - 2.0 * self.prob_one(q) / ns
    }

    /// Born-rule measurement of one qubit; collapses and renormalizes.
    pub fn measure<R: Rng>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        self.check_qubit(q)?;
        let p1 = self.prob_one(q) / self.norm_sq();
        let bit: u8 = if rng.gen::<f64>() < p1 { 1 } else { 0 };
        let p = if bit == 1 { p1 } else { 1.0 - p1 };
        if p <= 0.0 {
            return Err(SimError::DegenerateBranch(p));
        }
        self.collapse(q, bit, p);
        Ok(bit)
    }

    /// Project qubit `q` onto `bit` and renormalize; returns the branch
    /// probability. Used for record-conditioned simulation.
    pub fn project(&mut self, q: usize, bit: u8) -> Result<f64> {
        self.check_qubit(q)?;
        let p1 = self.prob_one(q) / self.norm_sq();
        let p = if bit == 1 { p1 } else { 1.0 - p1 };
        if p < BRANCH_TOL {
            return Err(SimError::DegenerateBranch(p));
        }
        self.collapse(q, bit, p);
        Ok(p)
    }

    fn collapse(&mut self, q: usize, bit: u8, prob: f64) {
        // branch weight = prob * (total norm^2), so this renormalizes exactly
        let mask = 1usize << q;
        let keep = if bit == 1 { mask } else { 0 };
        let scale = 1.0 / (prob * self.norm_sq()).sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *a *= scale;
            } else {
                *a = Complex64::ZERO;
            }
        }
    }

    /// Measure then flip on outcome 1, leaving qubit `q` in |0>.
    pub fn reset<R: Rng>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let bit = self.measure(q, rng)?;
        if bit == 1 {
            let x = crate::gates::pauli_x();
            self.apply_raw_1q(&x, q);
        }
        Ok(bit)
    }

    /// Sample a full bitstring without collapsing the state.
    pub fn sample_bitstring<R: Rng>(&self, rng: &mut R) -> usize {
        let total = self.norm_sq();
        let mut u = rng.gen::<f64>() * total;
        for (i, a) in self.amps.iter().enumerate() {
            u -= a.norm_sqr();
            if u <= 0.0 {
                return i;
            }
        }
        self.amps.len() - 1
    }

    /// Partial trace onto `subsystem` (order defines the reduced bit order:
    /// `subsystem[k]` is bit k of the reduced index).
    pub fn reduced_density(&self, subsystem: &[usize]) -> Result<DensityMatrix> {
        if subsystem.len() > REDUCED_DENSITY_CAP {
            return Err(SimError::SubsystemTooLarge(
                subsystem.len(),
                REDUCED_DENSITY_CAP,
            ));
        }
        for &q in subsystem {
            self.check_qubit(q)?;
        }
        let na = subsystem.len();
        let dim = 1usize << na;
        let mut elems = vec![Complex64::ZERO; dim * dim];
        let sub_mask: usize = subsystem.iter().map(|&q| 1usize << q).sum();
        let env_bits: Vec<usize> = (0..self.n_qubits)
            .filter(|b| sub_mask & (1 << b) == 0)
            .collect();
        let dim_e = 1usize << env_bits.len();
        for e in 0..dim_e {
            let mut env_idx = 0usize;
            for (k, &b) in env_bits.iter().enumerate() {
                env_idx |= ((e >> k) & 1) << b;
            }
            for sa in 0..dim {
                let mut ia = env_idx;
                for (k, &q) in subsystem.iter().enumerate() {
                    ia |= ((sa >> k) & 1) << q;
                }
                let aa = self.amps[ia];
                if aa == Complex64::ZERO {
                    continue;
                }
                for sb in 0..dim {
                    let mut ib = env_idx;
                    for (k, &q) in subsystem.iter().enumerate() {
                        ib |= ((sb >> k) & 1) << q;
                    }
                    elems[sa * dim + sb] += aa * self.amps[ib].conj();
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: na,
            elems,
        })
    }

    /// Renyi-2 entropy (bits) of `subsystem`, via the reduced density matrix.
    pub fn renyi2_of(&self, subsystem: &[usize]) -> Result<f64> {
        if subsystem.is_empty() {
            return Ok(0.0);
        }
        Ok(self.reduced_density(subsystem)?.renyi2())
    }
}

/// Dense density matrix on a small number of qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    /// row-major `2^n x 2^n`
    elems: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, elems: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if elems.len() != dim * dim {
            return Err(SimError::Circuit(format!(
                "density matrix needs {} elements, got {}",
                dim * dim,
                elems.len()
            )));
        }
        Ok(Self { n_qubits, elems })
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        if state.n_qubits() > 8 {
            return Err(SimError::SubsystemTooLarge(state.n_qubits(), 8));
        }
        let dim = state.amps.len();
        let mut elems = vec![Complex64::ZERO; dim * dim];
        for (i, &a) in state.amps.iter().enumerate() {
            for (j, &b) in state.amps.iter().enumerate() {
                elems[i * dim + j] = a * b.conj();
            }
        }
        Ok(Self {
            n_qubits: state.n_qubits(),
            elems,
        })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut elems = vec![Complex64::ZERO; dim * dim];
        let p = 1.0 / dim as f64;
        for i in 0..dim {
            elems[i * dim + i] = Complex64::new(p, 0.0);
        }
        Self { n_qubits, elems }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.elems[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let d = self.dim();
        self.elems[i * d + j] = v;
    }

    pub fn elems(&self) -> &[Complex64] {
        &self.elems
    }

    pub fn elems_mut(&mut self) -> &mut [Complex64] {
        &mut self.elems
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr rho^2 = sum_ij rho_ij rho_ji
        let d = self.dim();
        let mut acc = Complex64::ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.get(i, j) * self.get(j, i);
            }
        }
        acc.re
    }

    /// S2 = -log2 Tr rho^2, clamped to be >= 0 up to numerical noise.
    pub fn renyi2(&self) -> f64 {
        let p = self.purity().max(f64::MIN_POSITIVE);
        let s = -p.log2();
        if s < 0.0 && s > -1e-9 {
            0.0
        } else {
            s
        }
    }

    /// Partial trace of this density matrix onto a subset of its qubits.
    pub fn partial_trace(&self, subsystem: &[usize]) -> Result<DensityMatrix> {
        for &q in subsystem {
            if q >= self.n_qubits {
                return Err(SimError::QubitOutOfRange(q, self.n_qubits));
            }
        }
        let na = subsystem.len();
        let dim_a = 1usize << na;
        let sub_mask: usize = subsystem.iter().map(|&q| 1usize << q).sum();
        let env: Vec<usize> = (0..self.n_qubits)
            .filter(|b| sub_mask & (1 << b) == 0)
            .collect();
        let dim_e = 1usize << env.len();
        let expand = |s: usize, e: usize| {
            let mut full = 0usize;
            for (k, &q) in subsystem.iter().enumerate() {
                full |= ((s >> k) & 1) << q;
            }
            for (k, &q) in env.iter().enumerate() {
                full |= ((e >> k) & 1) << q;
            }
            full
        };
        let mut elems = vec![Complex64::ZERO; dim_a * dim_a];
        for sa in 0..dim_a {
            for sb in 0..dim_a {
                let mut acc = Complex64::ZERO;
                for e in 0..dim_e {
                    acc += self.get(expand(sa, e), expand(sb, e));
                }
                elems[sa * dim_a + sb] = acc;
            }
        }
        Ok(DensityMatrix {
            n_qubits: na,
            elems,
        })
    }

    /// Bloch vector (ax, ay, az) of a one-qubit density matrix.
    pub fn bloch(&self) -> BlochVector {
        assert_eq!(self.n_qubits, 1, "bloch() requires a 2x2 density matrix");
        let r01 = self.get(0, 1);
        BlochVector {
            ax: 2.0 * r01.re,
            ay: -2.0 * r01.im,
            az: (self.get(0, 0) - self.get(1, 1)).re,
        }
    }

    pub fn max_hermiticity_violation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Bloch vector of a single qubit, a_alpha = Tr(rho sigma_alpha).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BlochVector {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }
}

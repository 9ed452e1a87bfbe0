//! Circuit IR, processor geometries, builders for the experiment families,
//! and the exact 2+1D -> 1+1D mapping.

pub mod catalog;
pub mod dual1d;
pub mod geometry;
pub mod lightcone;
pub mod mapping;
pub mod serialize;
pub mod shallow2d;

pub use geometry::{Color, Geometry};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::gates::{Gate1Q, Gate2Q, GateLabel};
use crate::statevec::StateVector;

/// One operation inside a moment.
#[derive(Clone, Debug)]
pub enum Op {
    Unitary1(Gate1Q, usize),
    Unitary2(Gate2Q, usize, usize),
    /// Non-unitary 2-qubit linear map (space-time duals); the state norm
    /// tracks the trajectory weight.
    Raw2(Box<[Complex64; 16]>, usize, usize),
    Measure(usize),
    Reset(usize),
    MeasureReset(usize),
    /// Prepare the pair in the Bell state (|00> + |11>)/sqrt2.
    BellPrep(usize, usize),
    /// Projective Bell measurement postselected on (|00> + |11>)/sqrt2.
    BellPostselect(usize, usize),
}

impl Op {
    pub fn support(&self) -> Vec<usize> {
        match self {
            Op::Unitary1(_, q) | Op::Measure(q) | Op::Reset(q) | Op::MeasureReset(q) => vec![*q],
            Op::Unitary2(_, a, b) | Op::Raw2(_, a, b) => vec![*a, *b],
            Op::BellPrep(a, b) | Op::BellPostselect(a, b) => vec![*a, *b],
        }
    }
}

/// A moment of operations with disjoint supports, tagged with the circuit
/// cycle it belongs to (for noise insertion and lightcones).
#[derive(Clone, Debug, Default)]
pub struct Moment {
    pub cycle: usize,
    pub ops: Vec<Op>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CircuitMeta {
    pub depth: usize,
    pub gate_density: f64,
    pub seed: u64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub n_qubits: usize,
    pub moments: Vec<Moment>,
    pub meta: CircuitMeta,
}

impl Circuit {
    pub fn new(n_qubits: usize, meta: CircuitMeta) -> Self {
        Self {
            n_qubits,
            moments: Vec::new(),
            meta,
        }
    }

    pub fn push_moment(&mut self, m: Moment) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for op in &m.ops {
            for q in op.support() {
                if q >= self.n_qubits {
                    return Err(SimError::QubitOutOfRange(q, self.n_qubits));
                }
                if !seen.insert(q) {
                    return Err(SimError::Circuit(format!(
                        "overlapping supports in one moment at qubit {q}"
                    )));
                }
            }
        }
        self.moments.push(m);
        Ok(())
    }

    pub fn count_2q_gates(&self) -> usize {
        self.moments
            .iter()
            .flat_map(|m| &m.ops)
            .filter(|op| matches!(op, Op::Unitary2(..) | Op::Raw2(..)))
            .count()
    }

    pub fn count_measurements(&self) -> usize {
        self.moments
            .iter()
            .flat_map(|m| &m.ops)
            .filter(|op| matches!(op, Op::Measure(_) | Op::MeasureReset(_)))
            .count()
    }

    /// Run the circuit on |0...0> with Born-sampled measurement outcomes.
    /// Returns the final state and the measured bits in program order.
    pub fn simulate<R: rand::Rng>(&self, rng: &mut R) -> Result<(StateVector, Vec<u8>)> {
        let mut st = StateVector::zero(self.n_qubits);
        let mut bits = Vec::new();
        for m in &self.moments {
            for op in &m.ops {
                apply_op(&mut st, op, rng, &mut bits, None)?;
            }
        }
        Ok((st, bits))
    }

    /// Run with all measurement outcomes forced from `record` (in program
    /// order); returns the final conditioned state.
    pub fn simulate_conditioned(&self, record: &[u8]) -> Result<StateVector> {
        let mut st = StateVector::zero(self.n_qubits);
        let mut k = 0usize;
        for m in &self.moments {
            for op in &m.ops {
                match op {
                    Op::Measure(q) | Op::MeasureReset(q) => {
                        let bit = *record.get(k).ok_or_else(|| {
                            SimError::Circuit("record shorter than measurement count".into())
                        })?;
                        k += 1;
                        st.project(*q, bit)?;
                        if matches!(op, Op::MeasureReset(_)) && bit == 1 {
                            st.apply_raw_1q(&crate::gates::pauli_x(), *q);
                        }
                    }
                    _ => {
                        let mut dummy = rand::rngs::mock::StepRng::new(0, 0);
                        apply_op(&mut st, op, &mut dummy, &mut Vec::new(), None)?;
                    }
                }
            }
        }
        if k != record.len() {
            return Err(SimError::Circuit(format!(
                "record has {} bits, circuit measures {k}",
                record.len()
            )));
        }
        Ok(st)
    }
}

/// Apply one op to a full-register state. `forced` overrides measurement
/// outcomes when given. Bell postselection projects without sampling.
pub fn apply_op<R: rand::Rng>(
    st: &mut StateVector,
    op: &Op,
    rng: &mut R,
    bits: &mut Vec<u8>,
    forced: Option<u8>,
) -> Result<()> {
    match op {
        Op::Unitary1(g, q) => st.apply_1q(g, *q)?,
        Op::Unitary2(g, a, b) => st.apply_2q(g, *a, *b)?,
        Op::Raw2(m, a, b) => st.apply_raw_2q(m, *a, *b),
        Op::Measure(q) => {
            let bit = match forced {
                Some(b) => {
                    st.project(*q, b)?;
                    b
                }
                None => st.measure(*q, rng)?,
            };
            bits.push(bit);
        }
        Op::Reset(q) => {
            st.reset(*q, rng)?;
        }
        Op::MeasureReset(q) => {
            let bit = match forced {
                Some(b) => {
                    st.project(*q, b)?;
                    b
                }
                None => st.measure(*q, rng)?,
            };
            bits.push(bit);
            if bit == 1 {
                st.apply_raw_1q(&crate::gates::pauli_x(), *q);
            }
        }
        Op::BellPrep(a, b) => {
            // both qubits assumed in |0>
            st.apply_raw_1q(&crate::gates::hadamard(), *a);
            let cx = crate::gates::cnot();
            st.apply_raw_2q(&cx.m, *a, *b);
        }
        Op::BellPostselect(a, b) => {
            // rotate Phi+ to |00> and project both
            let cx = crate::gates::cnot();
            st.apply_raw_2q(&cx.m, *a, *b);
            st.apply_raw_1q(&crate::gates::hadamard(), *a);
            st.project(*a, 0)?;
            st.project(*b, 0)?;
        }
    }
    Ok(())
}

/// Effective measurements-per-gate rate p = M / ((M + L) T) of a shallow
/// circuit with M measured qubits and an L-qubit final chain at depth T.
pub fn effective_measurement_rate(measured: usize, chain_len: usize, depth: usize) -> f64 {
    if measured == 0 {
        return 0.0;
    }
    measured as f64 / ((measured + chain_len) as f64 * depth as f64)
}

/// A provenance tag keeping gate parameters printable and serializable.
pub fn gate_label_string(l: &GateLabel) -> String {
    match l {
        GateLabel::Fsim(p) => format!(
            "fsim({:.12e},{:.12e},{:.12e},{:.12e},{:.12e})",
            p.theta, p.phi, p.delta_plus, p.delta_minus, p.delta_minus_off
        ),
        GateLabel::ZPow(h) => format!("z_pow({h:.12e})"),
        GateLabel::SqrtX(s) => format!("sqrt_x^{s}"),
        GateLabel::SqrtY(s) => format!("sqrt_y^{s}"),
        GateLabel::SqrtW(s) => format!("sqrt_w^{s}"),
        GateLabel::SqrtV(s) => format!("sqrt_v^{s}"),
        GateLabel::Cue => "cue".into(),
        GateLabel::Hadamard => "h".into(),
        GateLabel::Pauli(p) => format!("pauli_{p}"),
        GateLabel::Swap => "swap".into(),
        GateLabel::Cnot => "cnot".into(),
        GateLabel::Other(s) => s.clone(),
    }
}

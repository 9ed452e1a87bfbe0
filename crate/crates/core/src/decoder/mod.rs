//! Hybrid quantum-classical decoding: shot generation, record-conditioned
//! classical simulation via the lightcone sweep, and the zeta / S_proxy
//! order parameters.

pub mod collapse;
pub mod sweep;
pub mod zeta;

use serde::{Deserialize, Serialize};

use crate::circuits::geometry::Geometry;
use crate::error::{Result, SimError};

/// One repetition: the probe outcome and the measurement record, all as
/// signed bits (+1 for outcome 0, -1 for outcome 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShotRecord {
    pub circuit_id: u64,
    /// signed probe bit
    pub z_p: i8,
    /// signed bits indexed by qubit; the probe's slot is 0 and unused
    pub m: Vec<i8>,
}

impl ShotRecord {
    pub fn bit_of(&self, qubit: usize) -> u8 {
        debug_assert!(self.m[qubit] != 0);
        if self.m[qubit] == 1 {
            0
        } else {
            1
        }
    }

    pub fn validate(&self, n_qubits: usize, probe: usize) -> Result<()> {
        if self.m.len() != n_qubits {
            return Err(SimError::Decode(format!(
                "record covers {} qubits, circuit has {n_qubits}",
                self.m.len()
            )));
        }
        for (q, &b) in self.m.iter().enumerate() {
            if q == probe {
                continue;
            }
            if b != 1 && b != -1 {
                return Err(SimError::Decode(format!("record bit {b} at qubit {q}")));
            }
        }
        if self.z_p != 1 && self.z_p != -1 {
            return Err(SimError::Decode(format!("probe bit {}", self.z_p)));
        }
        Ok(())
    }
}

/// Nested decoding patches D_1 subset ... subset D_rmax around a probe.
/// D_0 is empty; D_rmax covers every qubit except the probe.
#[derive(Clone, Debug)]
pub struct DecodingSchedule {
    pub probe: usize,
    pub patches: Vec<Vec<usize>>,
}

impl DecodingSchedule {
    pub fn from_geometry(geom: &Geometry) -> Self {
        Self {
            probe: geom.probe,
            patches: geom.patches.clone(),
        }
    }

    pub fn r_max(&self) -> usize {
        self.patches.len()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut prev: std::collections::BTreeSet<usize> = Default::default();
        for (r, p) in self.patches.iter().enumerate() {
            let cur: std::collections::BTreeSet<usize> = p.iter().copied().collect();
            if cur.contains(&self.probe) {
                return Err(SimError::Decode(format!("patch D_{} contains probe", r + 1)));
            }
            if !prev.is_subset(&cur) || cur.len() <= prev.len() {
                return Err(SimError::Decode(format!("patches not nested at D_{}", r + 1)));
            }
            prev = cur;
        }
        if prev.len() + 1 != n_qubits {
            return Err(SimError::Decode(
                "last patch must cover all qubits except the probe".into(),
            ));
        }
        Ok(())
    }
}

/// Per-radius decoded quantities, shot- and circuit-averaged.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DecodeResult {
    pub n_qubits: usize,
    pub rho: f64,
    pub n_circuits: usize,
    pub n_shots: usize,
    pub rejected_shots: usize,
    /// zeta(r) = 2 <z_p tau_m(r)>, r = 0..r_max
    pub zeta: Vec<f64>,
    pub zeta_err: Vec<f64>,
    /// zeta_sim(r) = 2 <|a_z_sim(r)|>
    pub zeta_sim: Vec<f64>,
    pub zeta_sim_err: Vec<f64>,
    /// mitigated zeta(r)/zeta(r_max); empty when zeta(r_max) ~ 0
    pub zeta_tilde: Vec<f64>,
    pub s_proxy: Vec<f64>,
    pub s_proxy_sim: Vec<f64>,
    pub s_proxy_tilde: Vec<f64>,
    /// true when mitigation was undefined (zeta(r_max) consistent with 0)
    pub mitigation_undefined: bool,
    /// largest active-subsystem size hit by the sweep
    pub peak_active: usize,
}

pub fn s_proxy_of(zeta: f64) -> f64 {
    -((1.0 + zeta * zeta) / 2.0).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_proxy_endpoints() {
        assert!((s_proxy_of(1.0) - 0.0).abs() < 1e-12);
        assert!((s_proxy_of(0.0) - 1.0).abs() < 1e-12);
        // guard: |zeta| <= 2 keeps S above -log2(5/2)
        assert!(s_proxy_of(2.0) >= -(5.0f64 / 2.0).log2() - 1e-12);
    }

    #[test]
    fn schedule_validation() {
        let g = crate::circuits::geometry::rect_grid("t", 3, 4, 0);
        let s = DecodingSchedule::from_geometry(&g);
        s.validate(12).unwrap();
        let bad = DecodingSchedule {
            probe: 0,
            patches: vec![vec![1], vec![1]],
        };
        assert!(bad.validate(3).is_err());
    }
}

//! Builder for the 2D shallow random circuits: per cycle, a fresh random
//! single-qubit gate on every qubit, then the cycle color's edge layer of
//! iSWAP-like gates, each included with probability rho.

use rand::Rng;

use super::geometry::Geometry;
use super::{Circuit, CircuitMeta, Moment, Op};
use crate::error::{Result, SimError};
use crate::gates::{fsim, FsimParams};
use crate::rng::rng_for;

/// The adopted iSWAP-like gate: fSim(theta = pi/2, phi = pi/6). The device
/// gate is calibrated per pair and not published; this convention is
/// recorded in circuit metadata so it can be swept.
pub fn iswap_like_params() -> FsimParams {
    FsimParams::simple(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_6)
}

pub const MAX_DEPTH: usize = 8;

/// Deterministic builder: single-qubit draws are seeded per (cycle, qubit)
/// and the Bernoulli gate-density draws per (cycle, edge), so instances are
/// reproducible under any evaluation order.
pub fn build_shallow_2d(geom: &Geometry, depth: usize, rho: f64, seed: u64) -> Result<Circuit> {
    if depth < 1 || depth > MAX_DEPTH {
        return Err(SimError::Circuit(format!(
            "depth {depth} outside the defined color schedule (1..={MAX_DEPTH})"
        )));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(SimError::Circuit(format!("rho {rho} outside [0,1]")));
    }
    let n = geom.n_qubits();
    let mut circ = Circuit::new(
        n,
        CircuitMeta {
            depth,
            gate_density: rho,
            seed,
            label: format!("shallow2d:{}:iswap_like(pi/2,pi/6)", geom.name),
        },
    );
    let iswap = fsim(&iswap_like_params());
    for t in 1..=depth {
        let mut sq = Moment {
            cycle: t,
            ops: Vec::with_capacity(n),
        };
        for q in 0..n {
            let mut r = rng_for(seed, &[1, t as u64, q as u64]);
            let k = r.gen_range(0..8usize);
            sq.ops.push(Op::Unitary1(crate::gates::sq_gate_by_index(k), q));
        }
        circ.push_moment(sq)?;
        let color = geom.color_at_cycle(t);
        let mut tq = Moment {
            cycle: t,
            ops: Vec::new(),
        };
        for (eidx, &(i, j, c)) in geom.edges.iter().enumerate() {
            if c != color {
                continue;
            }
            let mut r = rng_for(seed, &[2, t as u64, eidx as u64]);
            if r.gen::<f64>() < rho {
                tq.ops.push(Op::Unitary2(iswap.clone(), i, j));
            }
        }
        circ.push_moment(tq)?;
    }
    // final layer of random rotations before readout; the decoding
    // protocol's direction-randomization argument relies on it
    let mut last = Moment {
        cycle: depth,
        ops: Vec::with_capacity(n),
    };
    for q in 0..n {
        let mut r = rng_for(seed, &[1, depth as u64 + 1, q as u64]);
        let k = r.gen_range(0..8usize);
        last.ops.push(Op::Unitary1(crate::gates::sq_gate_by_index(k), q));
    }
    circ.push_moment(last)?;
    Ok(circ)
}

/// Append a computational-basis measurement of every qubit except `skip`.
pub fn append_full_measurement(circ: &mut Circuit, skip: Option<usize>) -> Result<()> {
    let mut m = Moment {
        cycle: circ.meta.depth + 1,
        ops: Vec::new(),
    };
    for q in 0..circ.n_qubits {
        if Some(q) != skip {
            m.ops.push(Op::Measure(q));
        }
    }
    circ.push_moment(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::geometry::rect_grid;

    #[test]
    fn rho_zero_is_a_product_circuit() {
        let g = rect_grid("t", 3, 4, 0);
        let c = build_shallow_2d(&g, 5, 0.0, 7).unwrap();
        assert_eq!(c.count_2q_gates(), 0);
        // any single qubit stays pure
        let mut rng = crate::rng::rng_for(1, &[0]);
        let (st, _) = c.simulate(&mut rng).unwrap();
        for q in 0..12 {
            let rho = st.reduced_density(&[q]).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-10, "qubit {q}");
        }
    }

    #[test]
    fn rho_one_places_every_colored_edge() {
        let g = rect_grid("t", 3, 4, 0);
        for depth in 1..=5 {
            let c = build_shallow_2d(&g, depth, 1.0, 3).unwrap();
            let expect: usize = (1..=depth)
                .map(|t| g.edges_of_color(g.color_at_cycle(t)).count())
                .sum();
            assert_eq!(c.count_2q_gates(), expect);
        }
    }

    #[test]
    fn gate_count_scales_with_rho() {
        let g = rect_grid("t", 4, 6, 0);
        let mean = |rho: f64| {
            (0..40)
                .map(|s| build_shallow_2d(&g, 5, rho, s).unwrap().count_2q_gates())
                .sum::<usize>() as f64
                / 40.0
        };
        let m03 = mean(0.3);
        let m07 = mean(0.7);
        let full = mean(1.0);
        assert!(m03 < m07 && m07 < full);
        // binomial mean = rho * layer size
        assert!((m03 / full - 0.3).abs() < 0.08);
        assert!((m07 / full - 0.7).abs() < 0.08);
    }

    #[test]
    fn builder_is_deterministic() {
        let g = rect_grid("t", 3, 4, 0);
        let a = build_shallow_2d(&g, 5, 0.5, 9).unwrap();
        let b = build_shallow_2d(&g, 5, 0.5, 9).unwrap();
        assert_eq!(a.count_2q_gates(), b.count_2q_gates());
        let depth_err = build_shallow_2d(&g, 9, 0.5, 1);
        assert!(depth_err.is_err());
    }
}

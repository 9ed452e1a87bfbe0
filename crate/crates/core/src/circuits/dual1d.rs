//! Brickwork fSim circuits and their space-time duals.
//!
//! `dual_unitary` is the n-wire, t-layer brickwork of fSim(theta, 2 theta)
//! gates followed by per-wire Z-rotation powers (fixed per wire, repeated
//! every layer). The `monitored` counterpart is the same tensor network read
//! sideways: a (t+1)-wire chain evolving for n-1 steps under the non-unitary
//! dual ops, with the original state preparation and readout appearing as
//! boundary injections, measurements, and Bell-pair plumbing.
//!
//! Boundary bookkeeping works on wire segments: each vertical edge of the
//! gate grid is produced and consumed exactly once as the dual register
//! sweeps; edges attached to the circuit input inject or select basis
//! states on the bottom wire, output edges do the same on the top wire, and
//! edges internal to the first/last column become Bell cups and caps.

use num_complex::Complex64;

use super::{Circuit, CircuitMeta, Moment, Op};
use crate::duality::spacetime_dual;
use crate::error::{Result, SimError};
use crate::gates::{fsim_dualizable, z_pow, GateLabel};
use crate::rng::rng_for;
use crate::statevec::StateVector;
use rand::Rng;

/// Gate present at column pair (x, x+1), layer tau?
fn gate_exists(x: i64, tau: i64, n: usize, t: usize) -> bool {
    x >= 0 && x <= n as i64 - 2 && tau >= 1 && tau <= t as i64 && (x + tau) % 2 == 1
}

/// Composite brickwork gate: fSim(theta, 2 theta) then z_pow(h_a) x z_pow(h_b).
fn composite(theta: f64, ha: f64, hb: f64) -> [Complex64; 16] {
    let f = fsim_dualizable(theta);
    let za = z_pow(ha);
    let zb = z_pow(hb);
    let mut m = [Complex64::ZERO; 16];
    // (za x zb) . f ; both z factors are diagonal
    for r in 0..4 {
        let d = za.m[((r >> 1) & 1) * 3] * zb.m[(r & 1) * 3];
        for cc in 0..4 {
            m[r * 4 + cc] = d * f.m[r * 4 + cc];
        }
    }
    m
}

/// Per-wire Z powers, drawn uniform in [0, 2) once per wire.
pub fn draw_z_powers(n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|x| rng_for(seed, &[3, x as u64]).gen::<f64>() * 2.0)
        .collect()
}

/// Boundary events of the dual-frame sweep, in register-wire coordinates.
#[derive(Clone, Debug, Default)]
pub struct BoundaryEvents {
    /// (step, wire, column): set wire to the injected basis state before the step
    pub bottom_inject: Vec<(usize, usize, usize)>,
    /// (step, wire, column): contract the produced wire with the boundary bit after the step
    pub bottom_select: Vec<(usize, usize, usize)>,
    /// same for output legs
    pub top_inject: Vec<(usize, usize, usize)>,
    pub top_select: Vec<(usize, usize, usize)>,
    /// (step, w1, w2): Bell cup prepared before the step
    pub cups: Vec<(usize, usize, usize)>,
    /// (step, w1, w2): Bell cap contracted after the step
    pub caps: Vec<(usize, usize, usize)>,
}

fn wire_segments(w: i64, n: usize, t: usize) -> Vec<(usize, usize)> {
    let mut segs = Vec::new();
    let mut lo = 0usize;
    for tau in 1..=t {
        if gate_exists(w - 1, tau as i64, n, t) || gate_exists(w, tau as i64, n, t) {
            segs.push((lo, tau - 1));
            lo = tau;
        }
    }
    segs.push((lo, t));
    segs
}

/// Classify every segment of the grid into its sweep events.
pub fn boundary_events(n: usize, t: usize) -> BoundaryEvents {
    let mut ev = BoundaryEvents::default();
    for x in 0..n - 1 {
        let xi = x as i64;
        for (a, b) in wire_segments(xi, n, t) {
            let low_r = a > 0 && gate_exists(xi, a as i64, n, t);
            let up_r = b < t && gate_exists(xi, b as i64 + 1, n, t);
            let low_l = a > 0 && gate_exists(xi - 1, a as i64, n, t);
            let up_l = b < t && gate_exists(xi - 1, b as i64 + 1, n, t);
            if up_r && a == 0 && !low_l && !low_r {
                ev.bottom_inject.push((x, b, x));
            } else if low_r && b == t && !up_l && !up_r {
                ev.top_inject.push((x, a, x));
            } else if low_r && up_r {
                ev.cups.push((x, a, b));
            }
        }
        let w = xi + 1;
        for (a, b) in wire_segments(w, n, t) {
            let low_l = a > 0 && gate_exists(xi, a as i64, n, t);
            let up_l = b < t && gate_exists(xi, b as i64 + 1, n, t);
            if up_l && a == 0 && !low_l {
                ev.bottom_select.push((x, b, x + 1));
            } else if low_l && b == t && !up_l {
                ev.top_select.push((x, a, x + 1));
            } else if low_l && up_l {
                ev.caps.push((x, a, b));
            }
        }
    }
    ev
}

/// Build the brickwork unitary circuit and its monitored space-time dual.
///
/// The dual_unitary acts on `n` wires for `t` layers; its output state is
/// the object whose entanglement the experiments analyze. The monitored
/// circuit acts on `t + 1` register wires for `n - 1` steps; its readout
/// boundary is closed with measure-and-reset (the teleport harness replaces
/// that with Bell-pair captures). At theta = pi/2 the dual ops are unitary
/// SWAP-like gates and the monitored circuit carries no measurements.
pub fn build_1d_dual_pair(
    n: usize,
    t: usize,
    theta: f64,
    seed: u64,
) -> Result<(Circuit, Circuit)> {
    if n < 2 || t < 1 {
        return Err(SimError::Circuit("need n >= 2 and t >= 1".into()));
    }
    if !(0.0 < theta && theta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return Err(SimError::Circuit(format!(
            "theta {theta} outside (0, pi/2]"
        )));
    }
    let hs = draw_z_powers(n, seed);

    let mut dual = Circuit::new(
        n,
        CircuitMeta {
            depth: t,
            gate_density: 1.0,
            seed,
            label: format!("dual1d:theta={theta:.12}"),
        },
    );
    for tau in 1..=t {
        let mut fs = Moment {
            cycle: tau,
            ops: Vec::new(),
        };
        let mut zs = Moment {
            cycle: tau,
            ops: Vec::new(),
        };
        for x in 0..n - 1 {
            if gate_exists(x as i64, tau as i64, n, t) {
                fs.ops.push(Op::Unitary2(fsim_dualizable(theta), x, x + 1));
                zs.ops.push(Op::Unitary1(z_pow(hs[x]), x));
                zs.ops.push(Op::Unitary1(z_pow(hs[x + 1]), x + 1));
            }
        }
        dual.push_moment(fs)?;
        dual.push_moment(zs)?;
    }

    let monitored = build_monitored(n, t, theta, &hs, seed)?;
    Ok((monitored, dual))
}

fn build_monitored(n: usize, t: usize, theta: f64, hs: &[f64], seed: u64) -> Result<Circuit> {
    let nr = t + 1;
    let self_dual = (theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12;
    let ev = boundary_events(n, t);
    let mut mon = Circuit::new(
        nr,
        CircuitMeta {
            depth: n - 1,
            gate_density: 1.0,
            seed,
            label: format!("monitored1d:theta={theta:.12}"),
        },
    );
    for x in 0..n - 1 {
        if !self_dual {
            let mut pre = Moment {
                cycle: x + 1,
                ops: Vec::new(),
            };
            for &(s, w, _col) in &ev.bottom_inject {
                if s == x && x > 0 {
                    pre.ops.push(Op::Reset(w));
                }
            }
            for &(s, w, _col) in &ev.top_inject {
                if s == x && x > 0 {
                    pre.ops.push(Op::Reset(w));
                }
            }
            for &(s, w1, w2) in &ev.cups {
                if s == x {
                    pre.ops.push(Op::BellPrep(w1, w2));
                }
            }
            if !pre.ops.is_empty() {
                mon.push_moment(pre)?;
            }
        }
        let mut gm = Moment {
            cycle: x + 1,
            ops: Vec::new(),
        };
        for tau in 1..=t {
            if gate_exists(x as i64, tau as i64, n, t) {
                let ut = spacetime_dual(&composite(theta, hs[x], hs[x + 1]));
                gm.ops.push(Op::Raw2(Box::new(ut), tau - 1, tau));
            }
        }
        mon.push_moment(gm)?;
        if !self_dual {
            let mut post = Moment {
                cycle: x + 1,
                ops: Vec::new(),
            };
            for &(s, w, _col) in &ev.bottom_select {
                if s == x {
                    post.ops.push(Op::MeasureReset(w));
                }
            }
            for &(s, w, _col) in &ev.top_select {
                if s == x {
                    post.ops.push(Op::MeasureReset(w));
                }
            }
            for &(s, w1, w2) in &ev.caps {
                if s == x {
                    post.ops.push(Op::BellPostselect(w1, w2));
                }
            }
            if !post.ops.is_empty() {
                mon.push_moment(post)?;
            }
        }
    }
    Ok(mon)
}

/// Dual-frame contraction of the full grid with explicit boundary bits:
/// returns the amplitude `<s| C |b>` of the unitary circuit, computed
/// entirely in the rotated frame. Oracle for the duality equivalence.
pub fn contract_dual_frame(
    n: usize,
    t: usize,
    theta: f64,
    hs: &[f64],
    b_bits: &[u8],
    s_bits: &[u8],
) -> Complex64 {
    let nr = t + 1;
    let dim = 1usize << nr;
    let mut amps = vec![Complex64::ZERO; dim];
    amps[0] = Complex64::ONE;
    let ev = boundary_events(n, t);

    let set_wire = |amps: &mut Vec<Complex64>, w: usize, bit: u8| {
        let mask = 1usize << w;
        let mut out = vec![Complex64::ZERO; amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if *a != Complex64::ZERO {
                let j = if bit == 1 { i | mask } else { i & !mask };
                out[j] += *a;
            }
        }
        *amps = out;
    };
    let select_wire = |amps: &mut [Complex64], w: usize, bit: u8| {
        let mask = 1usize << w;
        let keep = if bit == 1 { mask } else { 0 };
        for (i, a) in amps.iter_mut().enumerate() {
            if i & mask != keep {
                *a = Complex64::ZERO;
            }
        }
    };
    let cup = |amps: &mut Vec<Complex64>, w1: usize, w2: usize| {
        let m1 = 1usize << w1;
        let m2 = 1usize << w2;
        let mut out = vec![Complex64::ZERO; amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if *a != Complex64::ZERO {
                let base = i & !m1 & !m2;
                out[base] += *a;
                out[base | m1 | m2] += *a;
            }
        }
        *amps = out;
    };
    let cap = |amps: &mut Vec<Complex64>, w1: usize, w2: usize| {
        let m1 = 1usize << w1;
        let m2 = 1usize << w2;
        let mut out = vec![Complex64::ZERO; amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if *a != Complex64::ZERO && ((i & m1 != 0) == (i & m2 != 0)) {
                out[i & !m1 & !m2] += *a;
            }
        }
        *amps = out;
    };

    for x in 0..n - 1 {
        for &(s, w, col) in &ev.bottom_inject {
            if s == x {
                set_wire(&mut amps, w, b_bits[col]);
            }
        }
        for &(s, w, col) in &ev.top_inject {
            if s == x {
                set_wire(&mut amps, w, s_bits[col]);
            }
        }
        for &(s, w1, w2) in &ev.cups {
            if s == x {
                cup(&mut amps, w1, w2);
            }
        }
        let mut st = StateVector::from_amps(amps).unwrap();
        for tau in 1..=t {
            if gate_exists(x as i64, tau as i64, n, t) {
                let ut = spacetime_dual(&composite(theta, hs[x], hs[x + 1]));
                st.apply_raw_2q(&ut, tau - 1, tau);
            }
        }
        amps = st.amps().to_vec();
        for &(s, w, col) in &ev.bottom_select {
            if s == x {
                select_wire(&mut amps, w, b_bits[col]);
            }
        }
        for &(s, w, col) in &ev.top_select {
            if s == x {
                select_wire(&mut amps, w, s_bits[col]);
            }
        }
        for &(s, w1, w2) in &ev.caps {
            if s == x {
                cap(&mut amps, w1, w2);
            }
        }
    }
    amps.iter().sum()
}

/// Teleport harness: register + `n` ancillas, Bell pairs among ancillas and
/// a SWAP network, so the temporally-extended output state lands on the
/// ancillas at the final moment. Requires even `n` and odd `t`.
///
/// Ancilla layout: pairs (A_k, B_k) on wires (t+1+2k, t+1+2k+1). The output
/// leg of column j ends on: B_0 for j = 0; A_{(j+1)/2} for odd j < n-1;
/// B_{j/2} for even j > 0; A_0 for j = n-1. `ancilla_of_leg` records it.
pub fn build_teleport_harness(dual: &Circuit) -> Result<(Circuit, Vec<usize>)> {
    let (n, t, theta, hs) = recover_grid(dual)?;
    if n % 2 != 0 || t % 2 != 1 {
        return Err(SimError::Circuit(
            "teleport harness requires even n and odd t".into(),
        ));
    }
    let nr = t + 1;
    let top = t;
    let anc = |k: usize| nr + k;
    let a_of = |k: usize| anc(2 * k);
    let b_of = |k: usize| anc(2 * k + 1);
    let ev = boundary_events(n, t);
    let mut c = Circuit::new(
        nr + n,
        CircuitMeta {
            depth: n - 1,
            gate_density: 1.0,
            seed: dual.meta.seed,
            label: format!("harness:{}", dual.meta.label),
        },
    );
    // ancilla Bell pairs
    let mut init = Moment {
        cycle: 0,
        ops: (0..n / 2).map(|k| Op::BellPrep(a_of(k), b_of(k))).collect(),
    };
    init.ops.extend(
        ev.cups
            .iter()
            .filter(|&&(s, _, _)| s == 0)
            .map(|&(_, w1, w2)| Op::BellPrep(w1, w2)),
    );
    c.push_moment(init)?;

    let swap = crate::gates::swap_gate();
    let mut ancilla_of_leg = vec![usize::MAX; n];
    let mut next_arm = 0usize; // index k of the next unused Bell pair
    let mut armed: Option<usize> = None; // B ancilla entangled with the top wire
    for x in 0..n - 1 {
        let mut pre = Moment {
            cycle: x + 1,
            ops: Vec::new(),
        };
        // the step consumes an output leg: the top wire must hold a Bell
        // half. The first step needs an explicit arming swap; afterwards
        // the capture swap below already re-armed it.
        if ev.top_inject.iter().any(|&(s, _, _)| s == x) {
            if armed.is_none() {
                pre.ops.push(Op::Unitary2(swap.clone(), top, a_of(next_arm)));
                armed = Some(b_of(next_arm));
                next_arm += 1;
            }
            ancilla_of_leg[x] = armed.unwrap();
        }
        for &(s, w, _col) in &ev.bottom_inject {
            if s == x && x > 0 {
                pre.ops.push(Op::Reset(w));
            }
        }
        for &(s, w1, w2) in &ev.cups {
            if s == x && x > 0 {
                pre.ops.push(Op::BellPrep(w1, w2));
            }
        }
        if !pre.ops.is_empty() {
            c.push_moment(pre)?;
        }
        let mut gm = Moment {
            cycle: x + 1,
            ops: Vec::new(),
        };
        for tau in 1..=t {
            if gate_exists(x as i64, tau as i64, n, t) {
                let ut = spacetime_dual(&composite(theta, hs[x], hs[x + 1]));
                gm.ops.push(Op::Raw2(Box::new(ut), tau - 1, tau));
            }
        }
        c.push_moment(gm)?;
        let mut post = Moment {
            cycle: x + 1,
            ops: Vec::new(),
        };
        // capture a produced output leg; the swap also re-arms the top wire
        // with the fresh pair's other half
        if ev.top_select.iter().any(|&(s, _, _)| s == x) {
            if x + 1 == n - 1 {
                // last leg: reuse A_0, which holds junk |0> since the first arm
                post.ops.push(Op::Unitary2(swap.clone(), top, a_of(0)));
                ancilla_of_leg[n - 1] = a_of(0);
            } else {
                post.ops.push(Op::Unitary2(swap.clone(), top, a_of(next_arm)));
                ancilla_of_leg[x + 1] = a_of(next_arm);
                armed = Some(b_of(next_arm));
                next_arm += 1;
            }
        }
        for &(s, w, _col) in &ev.bottom_select {
            if s == x {
                post.ops.push(Op::MeasureReset(w));
            }
        }
        for &(s, w1, w2) in &ev.caps {
            if s == x {
                post.ops.push(Op::BellPostselect(w1, w2));
            }
        }
        if !post.ops.is_empty() {
            c.push_moment(post)?;
        }
    }
    Ok((c, ancilla_of_leg))
}

/// Recover (n, t, theta, z powers) from a dual circuit's gate labels.
fn recover_grid(dual: &Circuit) -> Result<(usize, usize, f64, Vec<f64>)> {
    let n = dual.n_qubits;
    let t = dual.meta.depth;
    let mut theta = None;
    let mut hs = vec![f64::NAN; n];
    for m in &dual.moments {
        for op in &m.ops {
            match op {
                Op::Unitary2(g, _, _) => {
                    if let GateLabel::Fsim(p) = &g.label {
                        theta = Some(p.theta);
                    }
                }
                Op::Unitary1(g, q) => {
                    if let GateLabel::ZPow(h) = &g.label {
                        hs[*q] = *h;
                    }
                }
                _ => {
                    return Err(SimError::Circuit(
                        "harness expects a pure dual-unitary circuit".into(),
                    ))
                }
            }
        }
    }
    let theta =
        theta.ok_or_else(|| SimError::Circuit("dual circuit carries no fSim gates".into()))?;
    if hs.iter().any(|h| h.is_nan()) {
        return Err(SimError::Circuit(
            "dual circuit does not touch every wire; cannot recover z powers".into(),
        ));
    }
    Ok((n, t, theta, hs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;

    fn simulate_dual_on_basis(dual: &Circuit, input: usize) -> Vec<Complex64> {
        let mut st = StateVector::basis(dual.n_qubits, input);
        for m in &dual.moments {
            for op in &m.ops {
                match op {
                    Op::Unitary1(g, q) => st.apply_1q(g, *q).unwrap(),
                    Op::Unitary2(g, a, b) => st.apply_2q(g, *a, *b).unwrap(),
                    _ => unreachable!(),
                }
            }
        }
        st.amps().to_vec()
    }

    #[test]
    fn dual_layout_matches_request() {
        let (mon, dual) = build_1d_dual_pair(12, 7, 2.0 * std::f64::consts::PI / 5.0, 3).unwrap();
        assert_eq!(dual.n_qubits, 12);
        assert_eq!(dual.meta.depth, 7);
        assert_eq!(mon.n_qubits, 8); // t + 1 register wires
        assert_eq!(mon.meta.depth, 11); // n - 1 dual steps
    }

    #[test]
    fn self_dual_point_has_no_measurements() {
        let (mon, _) = build_1d_dual_pair(8, 5, std::f64::consts::FRAC_PI_2, 1).unwrap();
        assert_eq!(mon.count_measurements(), 0);
        let (mon2, _) = build_1d_dual_pair(8, 5, 1.0, 1).unwrap();
        assert!(mon2.count_measurements() > 0);
    }

    #[test]
    fn dual_frame_contraction_reproduces_unitary_amplitudes() {
        // brute-force amplitude comparison over all boundary outcomes
        for (n, t) in [(4usize, 3usize), (6, 3), (4, 4), (5, 3), (4, 5)] {
            let theta = 0.2 + 0.9 * ((n * t) % 5) as f64 / 5.0;
            let seed = (10 * n + t) as u64;
            let hs = draw_z_powers(n, seed);
            let (_, dual) = build_1d_dual_pair(n, t, theta, seed).unwrap();
            let mut worst = 0.0f64;
            for b in 0..(1usize << n) {
                let bb: Vec<u8> = (0..n).map(|k| ((b >> k) & 1) as u8).collect();
                let out = simulate_dual_on_basis(&dual, b);
                for s in 0..(1usize << n) {
                    let ss: Vec<u8> = (0..n).map(|k| ((s >> k) & 1) as u8).collect();
                    let amp = contract_dual_frame(n, t, theta, &hs, &bb, &ss);
                    worst = worst.max((amp - out[s]).norm());
                }
            }
            assert!(worst < 1e-10, "n={n} t={t}: {worst}");
        }
    }

    #[test]
    fn harness_identity_leaves_ancillas_matching_input_column() {
        // theta -> pi/2 gives SWAP-like passthrough; with theta small the
        // circuit approaches identity. Use the exact identity grid instead:
        // theta=pi/2 is self-dual, so check the harness on a generic theta
        // against the dual simulation (next test covers it); here check the
        // ancilla bookkeeping covers all legs exactly once.
        let (_, dual) = build_1d_dual_pair(6, 3, 0.8, 2).unwrap();
        let (h, legs) = build_teleport_harness(&dual).unwrap();
        assert_eq!(h.n_qubits, 4 + 6);
        let mut sorted = legs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 6, "each leg on a distinct ancilla: {legs:?}");
        assert!(legs.iter().all(|&a| a >= 4));
    }

    #[test]
    fn harness_teleports_the_dual_output_state() {
        for (n, t, theta, seed) in [(4usize, 3usize, 0.9f64, 5u64), (6, 3, 1.2, 8), (4, 5, 0.5, 9)]
        {
            let (_, dual) = build_1d_dual_pair(n, t, theta, seed).unwrap();
            let (harness, legs) = build_teleport_harness(&dual).unwrap();
            // run the harness, forcing every measurement outcome to 0
            let mut st = StateVector::zero(harness.n_qubits);
            let mut rng = rng_for(0, &[0]);
            for m in &harness.moments {
                for op in &m.ops {
                    super::super::apply_op(&mut st, op, &mut rng, &mut Vec::new(), Some(0))
                        .unwrap();
                }
            }
            // ancilla state (in leg order) vs direct dual simulation
            let psi = simulate_dual_on_basis(&dual, 0);
            let rho = st.reduced_density(&legs).unwrap();
            let mut fid = Complex64::ZERO;
            for i in 0..(1 << n) {
                for j in 0..(1 << n) {
                    fid += psi[i].conj() * rho.get(i, j) * psi[j];
                }
            }
            assert!(
                (fid.re - 1.0).abs() < 1e-10,
                "n={n} t={t}: harness fidelity {}",
                fid.re
            );
        }
    }
}

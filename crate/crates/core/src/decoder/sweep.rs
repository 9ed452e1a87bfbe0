//! Record-conditioned simulation of a shallow 2D circuit on a growing
//! "active subsystem", following the lightcone-sweep algorithm: start from
//! the probe's past lightcone, repeatedly pull in the unfinished patch
//! qubit whose lightcone adds the fewest initial-state qubits, apply every
//! allowed gate, and project finished patch qubits on their recorded bits.
//! tau_m(r) = sign(<sigma_z>_probe) is emitted whenever a patch completes.

use num_complex::Complex64;
use rand::Rng;

use super::{DecodingSchedule, ShotRecord};
use crate::circuits::{Circuit, Op};
use crate::error::{Result, SimError};
use crate::gates::pauli_x;

/// One step of the precompiled sweep program.
#[derive(Clone, Debug)]
enum PlanStep {
    /// attach these qubits in |0>
    Grow(Vec<usize>),
    Gate1([Complex64; 4], usize),
    Gate2([Complex64; 16], usize, usize),
    /// project the qubit on its recorded bit (or Born-sample it) and drop
    /// it; the second field is the residual noise-slot count due first
    /// (gateless trailing cycles plus the readout slot)
    Project(usize, usize),
    /// depolarizing slot (one cycle's worth) on a still-active qubit
    Noise(usize),
    /// record tau_m(r) and a_z_sim(r)
    Emit,
}

/// Sweep program for one (circuit, schedule) pair; reusable across shots.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    n_qubits: usize,
    probe: usize,
    steps: Vec<PlanStep>,
    pub peak_active: usize,
    pub r_max: usize,
    probe_noise_slots: usize,
}

struct GateRef {
    cycle: usize,
    qubits: (usize, Option<usize>),
    op_index: usize,
}

pub fn build_plan(circ: &Circuit, schedule: &DecodingSchedule) -> Result<SweepPlan> {
    schedule.validate(circ.n_qubits)?;
    let n = circ.n_qubits;
    let probe = schedule.probe;

    // flatten gates, per-qubit orderings
    let mut gates: Vec<GateRef> = Vec::new();
    let mut mats1: Vec<[Complex64; 4]> = Vec::new();
    let mut mats2: Vec<[Complex64; 16]> = Vec::new();
    for m in &circ.moments {
        for op in &m.ops {
            match op {
                Op::Unitary1(g, q) => {
                    gates.push(GateRef {
                        cycle: m.cycle,
                        qubits: (*q, None),
                        op_index: mats1.len() << 1,
                    });
                    mats1.push(g.m);
                }
                Op::Unitary2(g, a, b) => {
                    gates.push(GateRef {
                        cycle: m.cycle,
                        qubits: (*a, Some(*b)),
                        op_index: (mats2.len() << 1) | 1,
                    });
                    mats2.push(g.m);
                }
                Op::Measure(_) => {} // final readout is the sweep's job
                _ => {
                    return Err(SimError::Decode(
                        "decoder expects a unitary shallow circuit".into(),
                    ))
                }
            }
        }
    }
    let mut per_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (gi, g) in gates.iter().enumerate() {
        per_qubit[g.qubits.0].push(gi);
        if let Some(b) = g.qubits.1 {
            per_qubit[b].push(gi);
        }
    }

    // static past lightcones as bitmasks
    if n > 128 {
        return Err(SimError::Decode("sweep supports up to 128 qubits".into()));
    }
    let mut cones: Vec<u128> = (0..n).map(|q| 1u128 << q).collect();
    for g in gates.iter().rev() {
        if let (a, Some(b)) = g.qubits {
            let merged = (1u128 << a) | (1u128 << b);
            for q in 0..n {
                if cones[q] & merged != 0 {
                    cones[q] |= merged;
                }
            }
        }
    }

    let mut steps: Vec<PlanStep> = Vec::new();
    let mut active: u128 = 0;
    let mut initial: u128 = ((1u128 << n) - 1) & !(0u128);
    let mut finished: u128 = 0;
    let mut next_gate = vec![0usize; n];
    let mut applied = vec![false; gates.len()];
    let mut active_count = 0usize;
    let mut peak = 0usize;

    let grow = |mask: u128,
                    steps: &mut Vec<PlanStep>,
                    active: &mut u128,
                    initial: &mut u128,
                    active_count: &mut usize,
                    peak: &mut usize| {
        let add = mask & *initial;
        if add == 0 {
            return;
        }
        let qubits: Vec<usize> = (0..n).filter(|&q| add & (1 << q) != 0).collect();
        *active |= add;
        *initial &= !add;
        *active_count += qubits.len();
        *peak = (*peak).max(*active_count);
        steps.push(PlanStep::Grow(qubits));
    };

    // after a qubit's last gate of a cycle, its depolarizing slot is due
    let mut noised_through = vec![0usize; n];
    let emit_cycle_noise =
        |q: usize, steps: &mut Vec<PlanStep>, next_gate: &[usize], noised: &mut Vec<usize>| {
            // slots for every cycle strictly before the qubit's next gate;
            // trailing gateless cycles are settled at projection time
            let target = if next_gate[q] < per_qubit[q].len() {
                gates[per_qubit[q][next_gate[q]]].cycle - 1
            } else {
                return;
            };
            while noised[q] < target {
                noised[q] += 1;
                steps.push(PlanStep::Noise(q));
            }
        };

    // evolve: apply every allowed gate until none fires
    let evolve = |steps: &mut Vec<PlanStep>,
                      active: &u128,
                      next_gate: &mut Vec<usize>,
                      applied: &mut Vec<bool>,
                      noised: &mut Vec<usize>| {
        loop {
            let mut fired = false;
            for q in 0..n {
                if active & (1 << q) == 0 {
                    continue;
                }
                while next_gate[q] < per_qubit[q].len() {
                    let gi = per_qubit[q][next_gate[q]];
                    if applied[gi] {
                        next_gate[q] += 1;
                        emit_cycle_noise(q, steps, next_gate, noised);
                        continue;
                    }
                    let g = &gates[gi];
                    match g.qubits {
                        (a, None) => {
                            applied[gi] = true;
                            steps.push(PlanStep::Gate1(mats1[g.op_index >> 1], a));
                            next_gate[q] += 1;
                            emit_cycle_noise(q, steps, next_gate, noised);
                        }
                        (a, Some(b)) => {
                            let partner = if a == q { b } else { a };
                            if active & (1 << partner) == 0 {
                                break;
                            }
                            // allowed only if the partner's earlier gates ran
                            if per_qubit[partner][next_gate[partner]] != gi {
                                break;
                            }
                            applied[gi] = true;
                            steps.push(PlanStep::Gate2(mats2[g.op_index >> 1], a, b));
                            next_gate[a] += 1;
                            next_gate[b] += 1;
                            emit_cycle_noise(a, steps, next_gate, noised);
                            emit_cycle_noise(b, steps, next_gate, noised);
                            fired = true;
                        }
                    }
                }
            }
            if !fired {
                break;
            }
        }
    };

    // r = 0: the probe's own lightcone
    grow(
        cones[probe],
        &mut steps,
        &mut active,
        &mut initial,
        &mut active_count,
        &mut peak,
    );
    evolve(&mut steps, &active, &mut next_gate, &mut applied, &mut noised_through);
    steps.push(PlanStep::Emit);

    for patch in schedule.patches.iter() {
        let patch_mask: u128 = patch.iter().map(|&q| 1u128 << q).sum();
        loop {
            if patch_mask & !finished == 0 {
                break;
            }
            // project any finished active patch qubits first
            let mut projected = false;
            for q in 0..n {
                let bit = 1u128 << q;
                if active & bit != 0
                    && patch_mask & bit != 0
                    && next_gate[q] == per_qubit[q].len()
                {
                    let depth = circ.meta.depth;
                    let leftover = depth - noised_through[q] + 1;
                    steps.push(PlanStep::Project(q, leftover));
                    active &= !bit;
                    finished |= bit;
                    active_count -= 1;
                    projected = true;
                }
            }
            if projected {
                continue;
            }
            // grow: unfinished patch qubit whose cone adds fewest initial qubits
            let mut best: Option<(usize, u32, usize)> = None;
            for q in 0..n {
                let bit = 1u128 << q;
                if patch_mask & bit != 0 && finished & bit == 0 {
                    let add = (cones[q] & initial).count_ones();
                    if best.map_or(true, |(_, badd, _)| add < badd) {
                        best = Some((q, add, q));
                    }
                }
            }
            let (q_star, _, _) = best.ok_or_else(|| {
                SimError::Decode("patch exhausted without completing".into())
            })?;
            grow(
                cones[q_star],
                &mut steps,
                &mut active,
                &mut initial,
                &mut active_count,
                &mut peak,
            );
            evolve(&mut steps, &active, &mut next_gate, &mut applied, &mut noised_through);
        }
        steps.push(PlanStep::Emit);
    }

    Ok(SweepPlan {
        n_qubits: n,
        probe,
        steps,
        peak_active: peak,
        r_max: schedule.patches.len(),
        probe_noise_slots: circ.meta.depth - noised_through[probe] + 1,
    })
}

/// Decoded quantities for one shot.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// a_z_sim(r), r = 0..=r_max
    pub a_z: Vec<f64>,
    /// tau_m(r) = sign(a_z) with sign(0) = +1
    pub tau: Vec<i8>,
    /// probe bit sampled at the end (sampling mode only), signed
    pub z_p: i8,
    /// full record (sampling mode), signed bits per qubit
    pub record: Vec<i8>,
}

/// Active-register state machine executing a plan.
struct ActiveState {
    amps: Vec<Complex64>,
    /// position of each 2D qubit in the register, usize::MAX when absent
    pos: Vec<usize>,
    members: Vec<usize>,
}

impl ActiveState {
    fn new(n: usize) -> Self {
        Self {
            amps: vec![Complex64::ONE],
            pos: vec![usize::MAX; n],
            members: Vec::new(),
        }
    }

    fn attach(&mut self, q: usize) {
        self.pos[q] = self.members.len();
        self.members.push(q);
        let len = self.amps.len();
        self.amps.resize(len * 2, Complex64::ZERO);
    }

    fn apply1(&mut self, m: &[Complex64; 4], q: usize) {
        let bit = 1usize << self.pos[q];
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

    fn apply2(&mut self, m: &[Complex64; 16], a: usize, b: usize) {
        let b0 = 1usize << self.pos[a];
        let b1 = 1usize << self.pos[b];
        let dim = self.amps.len();
        let mut i = 0;
        while i < dim {
            if i & (b0 | b1) == 0 {
                let v = [
                    self.amps[i],
                    self.amps[i | b1],
                    self.amps[i | b0],
                    self.amps[i | b0 | b1],
                ];
                for (r, &off) in [0usize, b1, b0, b0 | b1].iter().enumerate() {
                    self.amps[i | off] =
                        m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
                }
            }
            i += 1;
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << self.pos[q];
        let mut p1 = 0.0;
        let mut tot = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            tot += w;
            if i & bit != 0 {
                p1 += w;
            }
        }
        p1 / tot
    }

    /// project qubit on `bit`, renormalize, and drop it from the register
    fn project_drop(&mut self, q: usize, bit: u8) -> Result<f64> {
        let k = self.pos[q];
        let mask = 1usize << k;
        let keep = if bit == 1 { mask } else { 0 };
        let mut weight = 0.0;
        let mut total = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            total += w;
            if i & mask == keep {
                weight += w;
            }
        }
        let p = weight / total;
        if p < 1e-14 {
            return Err(SimError::DegenerateBranch(p));
        }
        let scale = 1.0 / weight.sqrt();
        let half = self.amps.len() / 2;
        let mut out = vec![Complex64::ZERO; half];
        let low = mask - 1;
        for (j, o) in out.iter_mut().enumerate() {
            let i = ((j & !low) << 1) | (j & low) | keep;
            *o = self.amps[i] * scale;
        }
        self.amps = out;
        self.pos[q] = usize::MAX;
        let idx = self.members.iter().position(|&m| m == q).unwrap();
        self.members.remove(idx);
        for &m in &self.members[idx..] {
            self.pos[m] -= 1;
        }
        Ok(p)
    }

    fn z_expectation(&self, q: usize) -> f64 {
        1.0 - 2.0 * self.prob_one(q)
    }
}

/// Execution mode: condition on a fixed record, or Born-sample one.
pub enum ShotMode<'a> {
    Decode(&'a ShotRecord),
    Sample,
}

/// Run the plan for one shot. In `Sample` mode measurement outcomes are
/// Born-drawn (yielding an exact joint sample) and noise Paulis may be
/// injected per (qubit, cycle) with strength `eps`.
pub fn run_sweep<R: Rng>(
    plan: &SweepPlan,
    mode: ShotMode,
    noise_eps: Option<f64>,
    rng: &mut R,
) -> Result<SweepOutcome> {
    let n = plan.n_qubits;
    let mut st = ActiveState::new(n);
    let mut a_z = Vec::with_capacity(plan.r_max + 1);
    let mut tau = Vec::with_capacity(plan.r_max + 1);
    let mut record = vec![0i8; n];
    let flip_p = noise_eps.map(|e| 0.75 * (1.0 - (-e).exp()));

    let inject_noise = |st: &mut ActiveState, q: usize, count: usize, rng: &mut R| {
        if let Some(p) = flip_p {
            for _ in 0..count {
                if rng.gen::<f64>() < p {
                    match rng.gen_range(0..3u8) {
                        0 => st.apply1(&pauli_x(), q),
                        1 => st.apply1(&crate::gates::pauli_y(), q),
                        _ => st.apply1(&crate::gates::pauli_z(), q),
                    }
                }
            }
        }
    };

    for step in &plan.steps {
        match step {
            PlanStep::Grow(qubits) => {
                for &q in qubits {
                    st.attach(q);
                }
            }
            PlanStep::Gate1(m, q) => st.apply1(m, *q),
            PlanStep::Gate2(m, a, b) => st.apply2(m, *a, *b),
            PlanStep::Noise(q) => inject_noise(&mut st, *q, 1, rng),
            PlanStep::Project(q, leftover) => {
                // trailing gateless cycles plus the readout slot
                inject_noise(&mut st, *q, *leftover, rng);
                let bit = match &mode {
                    ShotMode::Decode(rec) => rec.bit_of(*q),
                    ShotMode::Sample => {
                        let p1 = st.prob_one(*q);
                        u8::from(rng.gen::<f64>() < p1)
                    }
                };
                record[*q] = if bit == 0 { 1 } else { -1 };
                st.project_drop(*q, bit)?;
            }
            PlanStep::Emit => {
                let z = st.z_expectation(plan.probe);
                a_z.push(z);
                tau.push(if z < 0.0 { -1 } else { 1 });
            }
        }
    }

    // probe readout
    inject_noise(&mut st, plan.probe, plan.probe_noise_slots, rng);
    let z_p = match &mode {
        ShotMode::Decode(rec) => rec.z_p,
        ShotMode::Sample => {
            let p1 = st.prob_one(plan.probe);
            if rng.gen::<f64>() < p1 {
                -1
            } else {
                1
            }
        }
    };
    record[plan.probe] = z_p;
    Ok(SweepOutcome {
        a_z,
        tau,
        z_p,
        record,
    })
}

/// Full-system Born sampling of the circuit's end-of-run measurement, via
/// the sweep (memory stays at the active-window size). Optional
/// depolarizing noise is injected per qubit-cycle and before readout.
pub fn run_shots(
    circ: &Circuit,
    probe: usize,
    n_shots: usize,
    seed: u64,
    noise_eps: Option<f64>,
) -> Result<Vec<ShotRecord>> {
    let everything: Vec<usize> = (0..circ.n_qubits).filter(|&q| q != probe).collect();
    let schedule = DecodingSchedule {
        probe,
        patches: vec![everything],
    };
    let plan = build_plan(circ, &schedule)?;
    let mut shots = Vec::with_capacity(n_shots);
    for s in 0..n_shots {
        let mut rng = crate::rng::rng_for(seed, &[circ.meta.seed, s as u64]);
        let out = run_sweep(&plan, ShotMode::Sample, noise_eps, &mut rng)?;
        shots.push(ShotRecord {
            circuit_id: circ.meta.seed,
            z_p: out.z_p,
            m: out.record,
        });
    }
    Ok(shots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::geometry::{grid19, rect_grid};
    use crate::circuits::shallow2d::build_shallow_2d;
    use crate::rng::rng_for;

    #[test]
    fn rho_zero_probe_statistics_match_single_qubit_sim() {
        // product circuit: z_p distribution equals the probe's own 1-qubit sim
        let g = rect_grid("t", 3, 4, 0);
        let c = build_shallow_2d(&g, 5, 0.0, 42).unwrap();
        let shots = run_shots(&c, g.probe, 10_000, 7, None).unwrap();
        let mut st = crate::statevec::StateVector::zero(1);
        for m in &c.moments {
            for op in &m.ops {
                if let Op::Unitary1(gate, q) = op {
                    if *q == g.probe {
                        st.apply_1q(gate, 0).unwrap();
                    }
                }
            }
        }
        let p1 = st.prob_one(0);
        let ones = shots.iter().filter(|s| s.z_p == -1).count() as f64 / 10_000.0;
        assert!(
            (ones - p1).abs() < 4.0 * 0.5 / 100.0,
            "empirical {ones} vs exact {p1}"
        );
    }

    #[test]
    fn record_frequencies_match_exact_probabilities() {
        // grid19 at T=2, 10^5 shots. Every qubit is in superposition, so
        // the full joint has ~2^19 support and its empirical TV is
        // dominated by the sampling floor; the TV check is done on an
        // 8-qubit joint window spanning all three columns, where the floor
        // sits near 0.02 and a sampler bug would blow well past 0.05.
        let g = grid19();
        let c = build_shallow_2d(&g, 2, 1.0, 11).unwrap();
        let n_shots = 100_000usize;
        let shots = run_shots(&c, g.probe, n_shots, 3, None).unwrap();
        let mut rng = rng_for(0, &[0]);
        let (st, _) = c.simulate(&mut rng).unwrap();
        let window: Vec<usize> = vec![
            g.index_of(0, 0).unwrap(),
            g.index_of(0, 1).unwrap(),
            g.index_of(0, 3).unwrap(),
            g.index_of(1, 1).unwrap(),
            g.index_of(1, 2).unwrap(),
            g.index_of(2, 0).unwrap(),
            g.index_of(2, 1).unwrap(),
            g.index_of(2, 5).unwrap(),
        ];
        let mut probs = vec![0.0f64; 256];
        for (i, a) in st.amps().iter().enumerate() {
            let mut idx = 0usize;
            for (k, &q) in window.iter().enumerate() {
                idx |= ((i >> q) & 1) << k;
            }
            probs[idx] += a.norm_sqr();
        }
        let mut counts = vec![0u64; 256];
        for s in &shots {
            let mut idx = 0usize;
            for (k, &q) in window.iter().enumerate() {
                let bit = if q == g.probe {
                    u8::from(s.z_p == -1)
                } else {
                    s.bit_of(q)
                };
                idx |= (bit as usize) << k;
            }
            counts[idx] += 1;
        }
        let tv: f64 = probs
            .iter()
            .zip(&counts)
            .map(|(p, &c)| (p - c as f64 / n_shots as f64).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.05, "total variation {tv}");
        assert_eq!(shots.len(), n_shots);
    }

    #[test]
    fn sweep_matches_brute_force_conditioning() {
        // grid19 T=3: sweep a_z equals full-statevector conditioning
        let g = grid19();
        let c = build_shallow_2d(&g, 3, 1.0, 23).unwrap();
        let sched = DecodingSchedule::from_geometry(&g);
        let plan = build_plan(&c, &sched).unwrap();
        for shot_idx in 0..50u64 {
            // sample a record from the true distribution
            let mut rng = rng_for(90, &[shot_idx]);
            let (mut st, _) = c.simulate(&mut rng).unwrap();
            let mut rec = ShotRecord {
                circuit_id: 0,
                z_p: 1,
                m: vec![0; 19],
            };
            // brute force: project in schedule order, reading a_z at each r
            let mut bits = std::collections::BTreeMap::new();
            for q in 0..19 {
                if q != g.probe {
                    let b = st.measure(q, &mut rng).unwrap();
                    bits.insert(q, b);
                    rec.m[q] = if b == 0 { 1 } else { -1 };
                }
            }
            rec.m[g.probe] = 1;
            let mut oracle_az = Vec::new();
            {
                let mut rng2 = rng_for(91, &[shot_idx]);
                let (mut full, _) = c.simulate(&mut rng2).unwrap();
                oracle_az.push(full.z_expectation(g.probe));
                let mut done: std::collections::BTreeSet<usize> = Default::default();
                for patch in &g.patches {
                    for &q in patch {
                        if done.insert(q) {
                            full.project(q, bits[&q]).unwrap();
                        }
                    }
                    oracle_az.push(full.z_expectation(g.probe));
                }
            }
            let mut rng3 = rng_for(92, &[shot_idx]);
            let out = run_sweep(&plan, ShotMode::Decode(&rec), None, &mut rng3).unwrap();
            assert_eq!(out.a_z.len(), oracle_az.len());
            for (r, (a, b)) in out.a_z.iter().zip(&oracle_az).enumerate() {
                assert!(
                    (a - b).abs() < 1e-9,
                    "shot {shot_idx} r={r}: sweep {a} vs oracle {b}"
                );
                let tau_oracle: i8 = if *b < 0.0 { -1 } else { 1 };
                assert_eq!(out.tau[r], tau_oracle, "shot {shot_idx} r={r}");
            }
        }
    }

    #[test]
    fn identical_records_give_identical_tau() {
        let g = rect_grid("t", 3, 4, 0);
        let c = build_shallow_2d(&g, 5, 0.8, 5).unwrap();
        let sched = DecodingSchedule::from_geometry(&g);
        let plan = build_plan(&c, &sched).unwrap();
        let shots = run_shots(&c, g.probe, 1, 9, None).unwrap();
        let mut rng_a = rng_for(1, &[1]);
        let mut rng_b = rng_for(2, &[2]);
        let a = run_sweep(&plan, ShotMode::Decode(&shots[0]), None, &mut rng_a).unwrap();
        let b = run_sweep(&plan, ShotMode::Decode(&shots[0]), None, &mut rng_b).unwrap();
        assert_eq!(a.tau, b.tau);
        assert_eq!(a.a_z, b.a_z);
    }

    #[test]
    fn r0_matches_unconditioned_probe_bloch_z() {
        let g = rect_grid("t", 3, 4, 0);
        let c = build_shallow_2d(&g, 4, 0.9, 77).unwrap();
        let sched = DecodingSchedule::from_geometry(&g);
        let plan = build_plan(&c, &sched).unwrap();
        let shots = run_shots(&c, g.probe, 1, 4, None).unwrap();
        let mut rng = rng_for(5, &[0]);
        let out = run_sweep(&plan, ShotMode::Decode(&shots[0]), None, &mut rng).unwrap();
        let mut rng2 = rng_for(0, &[0]);
        let (st, _) = c.simulate(&mut rng2).unwrap();
        let az = st.z_expectation(g.probe);
        assert!((out.a_z[0] - az).abs() < 1e-9, "{} vs {az}", out.a_z[0]);
    }

    #[test]
    fn corrupted_record_is_rejected() {
        // force an impossible record: rho=0 circuit with mismatched bit
        let g = rect_grid("t", 3, 4, 0);
        let mut c = build_shallow_2d(&g, 1, 0.0, 1).unwrap();
        // overwrite the probe-adjacent qubit's gate with identity so |0> is certain
        for m in &mut c.moments {
            m.ops.iter_mut().for_each(|op| {
                if let Op::Unitary1(gate, _) = op {
                    *gate = crate::gates::z_pow(0.0);
                }
            });
        }
        let sched = DecodingSchedule::from_geometry(&g);
        let plan = build_plan(&c, &sched).unwrap();
        let rec = ShotRecord {
            circuit_id: 0,
            z_p: 1,
            m: vec![-1; 12], // all claim outcome 1, impossible from |0..0>
        };
        let mut rng = rng_for(0, &[0]);
        let err = run_sweep(&plan, ShotMode::Decode(&rec), None, &mut rng);
        assert!(matches!(err, Err(SimError::DegenerateBranch(_))));
    }
}

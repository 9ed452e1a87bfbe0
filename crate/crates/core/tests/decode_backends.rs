//! Cross-backend decoding checks: the MPS sweep against the exact
//! lightcone decoder, on real circuits with sampled records.

use dualsim::circuits::catalog;
use dualsim::circuits::mapping::map_2d_to_1d;
use dualsim::circuits::shallow2d::build_shallow_2d;
use dualsim::decoder::sweep::{build_plan, run_shots, run_sweep, ShotMode};
use dualsim::decoder::DecodingSchedule;
use dualsim::mps::mps_sweep_decode;
use dualsim::rng::rng_for;

/// A schedule aligned with the mapped measurement order (one patch per
/// measured column batch); needed when the mapping reuses wires.
fn sweep_aligned_schedule(
    measure_order: &[usize],
    probe: usize,
    n_qubits: usize,
    batch: usize,
) -> DecodingSchedule {
    let mut patches = Vec::new();
    let mut acc: Vec<usize> = Vec::new();
    for chunk in measure_order.chunks(batch) {
        acc.extend(chunk.iter().copied().filter(|&q| q != probe));
        let mut p = acc.clone();
        p.sort_unstable();
        if patches.last().map_or(true, |prev: &Vec<usize>| p.len() > prev.len()) {
            patches.push(p);
        }
    }
    // make sure the last patch covers everything but the probe
    let all: Vec<usize> = (0..n_qubits).filter(|&q| q != probe).collect();
    if patches.last().map(|p| p.len()) != Some(all.len()) {
        patches.push(all);
    }
    DecodingSchedule { probe, patches }
}

#[test]
fn untruncated_mps_decoding_is_bit_exact_on_grid19_t3() {
    // chi >= 2^(wires/2) = 64 never truncates on the 12-wire mapping
    let g = catalog::builtin("grid19").unwrap();
    let circ = build_shallow_2d(&g, 3, 1.0, 314).unwrap();
    let mapped = map_2d_to_1d(&circ, &g, &[g.probe]).unwrap();
    assert_eq!(mapped.n_wires, 12);
    let sched = sweep_aligned_schedule(&mapped.measure_order, g.probe, 19, 6);
    let plan = build_plan(&circ, &sched).unwrap();
    let shots = run_shots(&circ, g.probe, 50, 2024, None).unwrap();
    for (k, shot) in shots.iter().enumerate() {
        let mut rng = rng_for(1, &[k as u64]);
        let exact = run_sweep(&plan, ShotMode::Decode(shot), None, &mut rng).unwrap();
        let mps = mps_sweep_decode(&mapped, &sched, shot, 64).unwrap();
        assert_eq!(exact.tau, mps.tau, "shot {k}");
        assert!(mps.truncation_error < 1e-20, "shot {k} truncated");
        for (r, (a, b)) in exact.a_z.iter().zip(&mps.a_z).enumerate() {
            assert!((a - b).abs() < 1e-8, "shot {k} r={r}: {a} vs {b}");
        }
    }
}

#[test]
fn mps_matches_exact_decoder_through_swap_chains_at_t5() {
    // T = 5 has no wire reuse on grid19; the geometry's own distance-shell
    // schedule applies and gates go through swap insertion
    let g = catalog::builtin("grid19").unwrap();
    let circ = build_shallow_2d(&g, 5, 1.0, 99).unwrap();
    let mapped = map_2d_to_1d(&circ, &g, &[g.probe]).unwrap();
    let sched = DecodingSchedule::from_geometry(&g);
    let plan = build_plan(&circ, &sched).unwrap();
    let shots = run_shots(&circ, g.probe, 10, 5050, None).unwrap();
    for (k, shot) in shots.iter().enumerate() {
        let mut rng = rng_for(2, &[k as u64]);
        let exact = run_sweep(&plan, ShotMode::Decode(shot), None, &mut rng).unwrap();
        // chi = 1024 >= 2^9 never truncates a 19-wire register split at the
        // probe end; bond growth is bounded by the smaller side
        let mps = mps_sweep_decode(&mapped, &sched, shot, 1024).unwrap();
        assert!(mps.truncation_error < 1e-18, "shot {k}");
        assert_eq!(exact.tau, mps.tau, "shot {k}");
        for (r, (a, b)) in exact.a_z.iter().zip(&mps.a_z).enumerate() {
            assert!((a - b).abs() < 1e-7, "shot {k} r={r}: {a} vs {b}");
        }
    }
}

#[test]
fn truncated_mps_converges_in_the_disentangling_phase() {
    // rho = 0.3: chi = 64 agrees with the exact decoder on nearly all taus
    let g = catalog::builtin("grid19").unwrap();
    let mut agree = 0usize;
    let mut total = 0usize;
    for inst in 0..4u64 {
        let circ = build_shallow_2d(&g, 5, 0.3, 400 + inst).unwrap();
        let mapped = map_2d_to_1d(&circ, &g, &[g.probe]).unwrap();
        let sched = DecodingSchedule::from_geometry(&g);
        let plan = build_plan(&circ, &sched).unwrap();
        let shots = run_shots(&circ, g.probe, 25, 600 + inst, None).unwrap();
        for shot in &shots {
            let mut rng = rng_for(3, &[inst]);
            let exact = run_sweep(&plan, ShotMode::Decode(shot), None, &mut rng).unwrap();
            let mps = mps_sweep_decode(&mapped, &sched, shot, 64).unwrap();
            let r_pick = sched.r_max() - 1;
            total += 1;
            if exact.tau[r_pick] == mps.tau[r_pick] {
                agree += 1;
            }
        }
    }
    let frac = agree as f64 / total as f64;
    assert!(frac >= 0.97, "tau agreement only {frac}");
}

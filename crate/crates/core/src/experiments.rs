//! Desk-scale experiment runners binding the simulation modules together.
//! Every entry point is a pure function of its configuration and master
//! seed; parallel work is folded in a fixed order so `--workers` never
//! changes output bytes.

use rayon::prelude::*;

use crate::circuits::catalog;
use crate::circuits::dual1d::build_1d_dual_pair;
use crate::circuits::geometry::Geometry;
use crate::circuits::mapping::map_2d_to_1d;
use crate::circuits::shallow2d::build_shallow_2d;
use crate::circuits::{Circuit, Op};
use crate::decoder::sweep::{build_plan, run_sweep, ShotMode, SweepOutcome};
use crate::decoder::zeta::{zeta, DecodedShot};
use crate::decoder::{DecodeResult, DecodingSchedule, ShotRecord};
use crate::error::{Result, SimError};
use crate::rng::rng_for;
use crate::statevec::StateVector;

/// Entropy-vs-volume data for one dual-circuit ensemble.
#[derive(Clone, Debug)]
pub struct DualEntropyRow {
    pub theta: f64,
    pub volume: usize,
    pub mean_s2: f64,
    pub stderr: f64,
}

/// Exact Renyi-2 curves of the n-wire dual circuits, averaged over
/// instances (contiguous-window volume averaging per state).
pub fn fig2_dual(
    n: usize,
    t: usize,
    thetas: &[f64],
    instances: usize,
    seed: u64,
) -> Result<Vec<DualEntropyRow>> {
    let mut rows = Vec::new();
    for &theta in thetas {
        let curves: Vec<Vec<f64>> = (0..instances)
            .into_par_iter()
            .map(|inst| {
                let (_, dual) =
                    build_1d_dual_pair(n, t, theta, crate::rng::derive_seed(seed, &[inst as u64]))
                        .unwrap();
                let mut st = StateVector::zero(n);
                for m in &dual.moments {
                    for op in &m.ops {
                        match op {
                            Op::Unitary1(g, q) => st.apply_1q(g, *q).unwrap(),
                            Op::Unitary2(g, a, b) => st.apply_2q(g, *a, *b).unwrap(),
                            _ => unreachable!(),
                        }
                    }
                }
                let curve = crate::randmeas::EntropyCurve::exact_from_state(&st).unwrap();
                curve.points.iter().map(|p| p.1).collect()
            })
            .collect();
        for vol in 0..=n {
            let vals: Vec<f64> = curves.iter().map(|c| c[vol]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / (vals.len() as f64 - 1.0).max(1.0);
            rows.push(DualEntropyRow {
                theta,
                volume: vol,
                mean_s2: mean,
                stderr: (var / vals.len() as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct ShallowMiRow {
    pub depth: usize,
    pub postselected: bool,
    pub instance: u64,
    /// I2 between the chain's two end pairs
    pub far_mi: f64,
    /// whole-chain S2 of the conditioned state
    pub chain_s2: f64,
}

/// grid19 analysis: condition the 7-qubit chain on the most probable
/// outcome of the 12 measured qubits (or mix over outcomes for the
/// control) and return the far-pair mutual information.
pub fn fig3_shallow(depths: &[usize], instances: usize, seed: u64) -> Result<Vec<ShallowMiRow>> {
    let g = catalog::builtin("grid19").unwrap();
    let chain = crate::circuits::geometry::grid19_chain(&g);
    let measured: Vec<usize> = (0..g.n_qubits()).filter(|q| !chain.contains(q)).collect();
    let mut rows = Vec::new();
    for &depth in depths {
        let per_inst: Vec<(ShallowMiRow, ShallowMiRow)> = (0..instances as u64)
            .into_par_iter()
            .map(|inst| {
                let c = build_shallow_2d(&g, depth, 1.0, crate::rng::derive_seed(seed, &[inst]))
                    .unwrap();
                let mut rng = rng_for(0, &[0]);
                let (st, _) = c.simulate(&mut rng).unwrap();
                // marginal over the measured set; argmax = most probable record
                let mmask: usize = measured.iter().map(|&q| 1usize << q).sum();
                let mut marg = vec![0.0f64; 1 << measured.len()];
                for (i, a) in st.amps().iter().enumerate() {
                    let mut key = 0usize;
                    for (k, &q) in measured.iter().enumerate() {
                        key |= ((i >> q) & 1) << k;
                    }
                    marg[key] += a.norm_sqr();
                }
                let best = marg
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(k, _)| k)
                    .unwrap();
                let _ = mmask;
                let mut proj = st.clone();
                for (k, &q) in measured.iter().enumerate() {
                    proj.project(q, ((best >> k) & 1) as u8).unwrap();
                }
                let a_sub = [chain[0], chain[1]];
                let b_sub = [chain[5], chain[6]];
                let mi_of = |rho_a: f64, rho_b: f64, rho_ab: f64| {
                    -rho_a.log2() - rho_b.log2() + rho_ab.log2()
                };
                let pa = proj.reduced_density(&a_sub).unwrap().purity();
                let pb = proj.reduced_density(&b_sub).unwrap().purity();
                let pab = proj
                    .reduced_density(&[a_sub[0], a_sub[1], b_sub[0], b_sub[1]])
                    .unwrap()
                    .purity();
                let post = ShallowMiRow {
                    depth,
                    postselected: true,
                    instance: inst,
                    far_mi: mi_of(pa, pb, pab),
                    chain_s2: proj.renyi2_of(&chain).unwrap(),
                };
                // control: no postselection = mixed state over records
                let full = st.reduced_density(&[a_sub[0], a_sub[1], b_sub[0], b_sub[1]]).unwrap();
                let ra = full.partial_trace(&[0, 1]).unwrap().purity();
                let rb = full.partial_trace(&[2, 3]).unwrap().purity();
                let ctrl = ShallowMiRow {
                    depth,
                    postselected: false,
                    instance: inst,
                    far_mi: mi_of(ra, rb, full.purity()),
                    chain_s2: f64::NAN,
                };
                (post, ctrl)
            })
            .collect();
        for (a, b) in per_inst {
            rows.push(a);
            rows.push(b);
        }
    }
    Ok(rows)
}

/// One (geometry, rho) decoding run: sample shots through the sweep and
/// aggregate the order parameters. Noise, when given, is injected into the
/// sampled trajectories only; decoding always uses the ideal circuit.
pub fn decode_run(
    geom: &Geometry,
    depth: usize,
    rho: f64,
    n_circuits: usize,
    n_shots: usize,
    seed: u64,
    noise_eps: Option<f64>,
) -> Result<DecodeResult> {
    let sched = DecodingSchedule::from_geometry(geom);
    let per_circ: Vec<(Vec<DecodedShot>, usize, usize)> = (0..n_circuits as u64)
        .into_par_iter()
        .map(|ci| {
            let circ_seed = crate::rng::derive_seed(seed, &[rho.to_bits(), ci]);
            let circ = build_shallow_2d(geom, depth, rho, circ_seed).unwrap();
            let plan = build_plan(&circ, &sched).unwrap();
            let mut shots = Vec::with_capacity(n_shots);
            let mut rejected = 0usize;
            for s in 0..n_shots as u64 {
                let mut rng = rng_for(seed, &[ci, s]);
                match run_sweep(&plan, ShotMode::Sample, noise_eps, &mut rng) {
                    Ok(out) => {
                        let rec = ShotRecord {
                            circuit_id: ci,
                            z_p: out.z_p,
                            m: out.record.clone(),
                        };
                        shots.push(DecodedShot::new(&rec, &out));
                    }
                    Err(SimError::DegenerateBranch(_)) => rejected += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((shots, rejected, plan.peak_active))
        })
        .collect::<Result<_>>()?;
    let mut all = Vec::new();
    let mut rejected = 0usize;
    let mut peak = 0usize;
    for (shots, rej, pk) in per_circ {
        all.extend(shots);
        rejected += rej;
        peak = peak.max(pk);
    }
    zeta(&all, rejected, geom.n_qubits(), rho, peak, seed)
}

/// Decode externally supplied shot records against a circuit, with the
/// exact sweep backend.
pub fn decode_records(
    circ: &Circuit,
    geom: &Geometry,
    shots: &[ShotRecord],
    seed: u64,
) -> Result<DecodeResult> {
    let sched = DecodingSchedule::from_geometry(geom);
    let plan = build_plan(circ, &sched)?;
    let outcomes: Vec<Option<(usize, SweepOutcome)>> = shots
        .par_iter()
        .enumerate()
        .map(|(k, shot)| {
            let mut rng = rng_for(seed, &[k as u64]);
            match run_sweep(&plan, ShotMode::Decode(shot), None, &mut rng) {
                Ok(out) => Some((k, out)),
                Err(_) => None,
            }
        })
        .collect();
    let mut decoded = Vec::new();
    let mut rejected = 0usize;
    for o in outcomes {
        match o {
            Some((k, out)) => decoded.push(DecodedShot::new(&shots[k], &out)),
            None => rejected += 1,
        }
    }
    zeta(
        &decoded,
        rejected,
        circ.n_qubits,
        circ.meta.gate_density,
        plan.peak_active,
        seed,
    )
}

/// Decode records with the MPS backend at a fixed bond dimension.
pub fn decode_records_mps(
    circ: &Circuit,
    geom: &Geometry,
    shots: &[ShotRecord],
    chi: usize,
    seed: u64,
) -> Result<(DecodeResult, f64)> {
    let sched = DecodingSchedule::from_geometry(geom);
    let mapped = map_2d_to_1d(circ, geom, &[geom.probe])?;
    let outcomes: Vec<Option<(usize, crate::mps::MpsOutcome)>> = shots
        .par_iter()
        .enumerate()
        .map(|(k, shot)| match crate::mps::mps_sweep_decode(&mapped, &sched, shot, chi) {
            Ok(out) => Some((k, out)),
            Err(_) => None,
        })
        .collect();
    let mut decoded = Vec::new();
    let mut rejected = 0usize;
    let mut trunc = 0.0;
    for o in outcomes {
        match o {
            Some((k, out)) => {
                trunc += out.truncation_error;
                decoded.push(DecodedShot {
                    circuit_id: shots[k].circuit_id,
                    z_p: shots[k].z_p,
                    a_z: out.a_z,
                    tau: out.tau,
                });
            }
            None => rejected += 1,
        }
    }
    let n_ok = decoded.len().max(1) as f64;
    let res = zeta(
        &decoded,
        rejected,
        circ.n_qubits,
        circ.meta.gate_density,
        0,
        seed,
    )?;
    Ok((res, trunc / n_ok))
}

/// Shot-record JSONL: {circuit_id, seed, bits: [+-1, ...]} per line, probe
/// bit stored in its qubit slot.
pub fn shots_to_jsonl(shots: &[ShotRecord], probe: usize) -> String {
    let mut out = String::new();
    for s in shots {
        let mut bits = s.m.clone();
        bits[probe] = s.z_p;
        out.push_str(
            &serde_json::json!({
                "circuit_id": s.circuit_id,
                "probe": probe,
                "bits": bits,
            })
            .to_string(),
        );
        out.push('\n');
    }
    out
}

pub fn shots_from_jsonl(s: &str) -> Result<(Vec<ShotRecord>, usize)> {
    let mut shots = Vec::new();
    let mut probe = usize::MAX;
    for (lineno, line) in s.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| SimError::Decode(format!("shots line {}: {e}", lineno + 1)))?;
        let bits: Vec<i8> = v["bits"]
            .as_array()
            .ok_or_else(|| SimError::Decode(format!("shots line {}: no bits", lineno + 1)))?
            .iter()
            .map(|b| b.as_i64().unwrap_or(0) as i8)
            .collect();
        probe = v["probe"].as_u64().unwrap_or(0) as usize;
        if probe >= bits.len() {
            return Err(SimError::Decode(format!(
                "shots line {}: probe {} out of range",
                lineno + 1,
                probe
            )));
        }
        let z_p = bits[probe];
        shots.push(ShotRecord {
            circuit_id: v["circuit_id"].as_u64().unwrap_or(0),
            z_p,
            m: bits,
        });
    }
    if shots.is_empty() {
        return Err(SimError::Decode("no shots in file".into()));
    }
    Ok((shots, probe))
}

#[derive(Clone, Debug)]
pub struct NoisyHaarRow {
    pub n: usize,
    pub n_a: usize,
    pub eps: f64,
    pub sampled_purity: f64,
    pub stderr: f64,
    pub closed_form: f64,
}

/// Sampled noisy-Haar purities against the closed form.
pub fn noisy_haar_scan(
    n: usize,
    eps_list: &[f64],
    n_states: usize,
    seed: u64,
) -> Result<Vec<NoisyHaarRow>> {
    let mut rows = Vec::new();
    for &eps in eps_list {
        for n_a in 1..=n {
            let sub: Vec<usize> = (0..n_a).collect();
            let vals: Vec<f64> = (0..n_states as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng = rng_for(seed, &[eps.to_bits(), k]);
                    let st = crate::noise::haar_state(n, &mut rng);
                    let rho = crate::statevec::DensityMatrix::from_pure(&st).unwrap();
                    let noisy = crate::noise::apply_depolarizing_all(&rho, eps).unwrap();
                    noisy.partial_trace(&sub).unwrap().purity()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / (vals.len() as f64 - 1.0);
            rows.push(NoisyHaarRow {
                n,
                n_a,
                eps,
                sampled_purity: mean,
                stderr: (var / vals.len() as f64).sqrt(),
                closed_form: crate::noise::noisy_haar_purity(n, n_a, eps),
            });
        }
    }
    Ok(rows)
}

/// Mitigated entropy curve of noisy Haar states from exact density-matrix
/// simulation; returns (volume, mitigated S2) averaged over states, plus
/// the ascending slope (first increment).
pub fn noisy_haar_mitigated_slope(
    n: usize,
    eps: f64,
    n_states: usize,
    seed: u64,
) -> Result<(Vec<(usize, f64)>, f64)> {
    let per_state: Vec<Vec<f64>> = (0..n_states as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, &[eps.to_bits(), k, 8]);
            let st = crate::noise::haar_state(n, &mut rng);
            let rho = crate::statevec::DensityMatrix::from_pure(&st).unwrap();
            let noisy = crate::noise::apply_depolarizing_all(&rho, eps).unwrap();
            (0..=n)
                .map(|vol| {
                    if vol == 0 {
                        return 0.0;
                    }
                    // average over contiguous windows
                    let mut acc = 0.0;
                    let mut cnt = 0.0;
                    for start in 0..=(n - vol) {
                        let sub: Vec<usize> = (start..start + vol).collect();
                        acc += -noisy.partial_trace(&sub).unwrap().purity().log2();
                        cnt += 1.0;
                    }
                    acc / cnt
                })
                .collect()
        })
        .collect();
    let mean_curve: Vec<f64> = (0..=n)
        .map(|vol| per_state.iter().map(|c| c[vol]).sum::<f64>() / per_state.len() as f64)
        .collect();
    let curve = crate::randmeas::EntropyCurve {
        points: mean_curve
            .iter()
            .enumerate()
            .map(|(v, &s)| (v, s, 0.0))
            .collect(),
        mitigated: false,
    };
    let mit = crate::randmeas::mitigate(&curve)?;
    let slope = mit.points[1].1 - mit.points[0].1;
    Ok((
        mit.points.iter().map(|&(v, s, _)| (v, s)).collect(),
        slope,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_rows_have_expected_shape() {
        let rows = fig2_dual(6, 3, &[0.4, 1.2], 3, 5).unwrap();
        assert_eq!(rows.len(), 2 * 7);
        assert!(rows.iter().all(|r| r.mean_s2.is_finite()));
        // vol 0 entropy is zero
        assert!(rows.iter().filter(|r| r.volume == 0).all(|r| r.mean_s2 == 0.0));
    }

    #[test]
    fn decode_run_shapes_and_determinism() {
        let g = catalog::builtin("n12").unwrap();
        let a = decode_run(&g, 5, 0.6, 4, 8, 99, None).unwrap();
        let b = decode_run(&g, 5, 0.6, 4, 8, 99, None).unwrap();
        assert_eq!(a.zeta, b.zeta);
        assert_eq!(a.zeta_sim, b.zeta_sim);
        assert_eq!(a.n_circuits, 4);
        assert_eq!(a.n_shots, 32);
        assert_eq!(a.zeta.len(), DecodingSchedule::from_geometry(&g).r_max() + 1);
        // noiseless: zeta(r_max) = 1 within error; zeta_tilde(r_max) exactly 1
        if !a.mitigation_undefined {
            assert!((a.zeta_tilde.last().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shot_files_round_trip_and_decode_identically() {
        let g = catalog::builtin("n12").unwrap();
        let circ = build_shallow_2d(&g, 5, 0.7, 31).unwrap();
        let shots = crate::decoder::sweep::run_shots(&circ, g.probe, 20, 17, None).unwrap();
        let blob = shots_to_jsonl(&shots, g.probe);
        let (back, probe) = shots_from_jsonl(&blob).unwrap();
        assert_eq!(probe, g.probe);
        assert_eq!(back.len(), shots.len());
        let direct = decode_records(&circ, &g, &shots, 3).unwrap();
        let via_file = decode_records(&circ, &g, &back, 3).unwrap();
        assert_eq!(direct.zeta, via_file.zeta);
        assert_eq!(direct.s_proxy_sim, via_file.s_proxy_sim);
    }
}

//! Randomized-measurement estimation of Renyi-2 purity and mutual
//! information, with linear-density error mitigation.
//!
//! Purity from bitstring statistics under random local rotations:
//! `Tr rho_A^2 = 2^{N_A} sum_{s,s'} (-2)^{-H(s,s')} <P(s) P(s')>_U`, with the
//! product moment estimated per unitary instance by the unbiased U-statistic
//! `n_s n_{s'} / (M(M-1))` (and `n_s (n_s - 1) / (M(M-1))` on the diagonal),
//! then averaged over instances. Jackknife over instances gives the error
//! bar.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::gates::cue_1q;
use crate::rng::rng_for;
use crate::statevec::StateVector;

/// Bitstring counts gathered under one product of random single-qubit
/// unitaries. Bitstrings are little-endian integers (qubit k = bit k).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub seed: u64,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomizedDataset {
    pub n_qubits: usize,
    pub instances: Vec<Instance>,
}

impl RandomizedDataset {
    pub fn validate(&self) -> Result<()> {
        for inst in &self.instances {
            let total: u64 = inst.counts.values().sum();
            if total != inst.shots {
                return Err(SimError::Estimator(format!(
                    "instance {}: counts sum {total} != shots {}",
                    inst.seed, inst.shots
                )));
            }
            if let Some(&k) = inst.counts.keys().max() {
                if k >= (1u64 << self.n_qubits) {
                    return Err(SimError::Estimator(format!(
                        "bitstring {k} too long for {} qubits",
                        self.n_qubits
                    )));
                }
            }
        }
        Ok(())
    }

    /// JSONL persistence: one instance per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for inst in &self.instances {
            out.push_str(&serde_json::to_string(&serde_json::json!({
                "n_qubits": self.n_qubits,
                "seed": inst.seed,
                "shots": inst.shots,
                "counts": inst.counts.iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
            }))?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(s: &str) -> Result<Self> {
        let mut n_qubits = 0usize;
        let mut instances = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(line).map_err(|e| {
                SimError::Estimator(format!("line {}: {e}", lineno + 1))
            })?;
            n_qubits = v["n_qubits"].as_u64().unwrap_or(0) as usize;
            let counts = v["counts"]
                .as_object()
                .ok_or_else(|| SimError::Estimator(format!("line {}: no counts", lineno + 1)))?
                .iter()
                .map(|(k, c)| {
                    Ok((
                        k.parse::<u64>()
                            .map_err(|e| SimError::Estimator(format!("bad key {k}: {e}")))?,
                        c.as_u64().unwrap_or(0),
                    ))
                })
                .collect::<Result<BTreeMap<u64, u64>>>()?;
            instances.push(Instance {
                seed: v["seed"].as_u64().unwrap_or(0),
                shots: v["shots"].as_u64().unwrap_or(0),
                counts,
            });
        }
        let ds = Self {
            n_qubits,
            instances,
        };
        ds.validate()?;
        Ok(ds)
    }
}

/// For each instance: rotate by fresh CUE unitaries per qubit, then Born
/// sample `shots` bitstrings. Fully deterministic given `seed`.
pub fn sample_randomized(
    state: &StateVector,
    n_instances: usize,
    shots: u64,
    seed: u64,
) -> RandomizedDataset {
    let n = state.n_qubits();
    let mut instances = Vec::with_capacity(n_instances);
    for k in 0..n_instances {
        let inst_seed = crate::rng::derive_seed(seed, &[4, k as u64]);
        let mut rotated = state.clone();
        let mut grng = rng_for(inst_seed, &[0]);
        for q in 0..n {
            let u = cue_1q(&mut grng);
            rotated.apply_raw_1q(&u.m, q);
        }
        let probs: Vec<f64> = rotated.amps().iter().map(|a| a.norm_sqr()).collect();
        let mut cum = probs.clone();
        for i in 1..cum.len() {
            cum[i] += cum[i - 1];
        }
        let total = *cum.last().unwrap();
        let mut srng = rng_for(inst_seed, &[1]);
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = srng.gen::<f64>() * total;
            let idx = cum.partition_point(|&c| c < u).min(probs.len() - 1);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        instances.push(Instance {
            seed: inst_seed,
            shots,
            counts,
        });
    }
    RandomizedDataset {
        n_qubits: n,
        instances,
    }
}

fn restrict_counts(inst: &Instance, mask: u64, n_sub: usize) -> Vec<(u64, u64)> {
    let mut acc: BTreeMap<u64, u64> = BTreeMap::new();
    for (&s, &c) in &inst.counts {
        let mut r = 0u64;
        let mut bit = 0;
        for b in 0..64 {
            if mask & (1 << b) != 0 {
                r |= ((s >> b) & 1) << bit;
                bit += 1;
            }
        }
        debug_assert!(r < (1 << n_sub));
        *acc.entry(r).or_insert(0) += c;
    }
    acc.into_iter().collect()
}

fn purity_one_instance(pairs: &[(u64, u64)], shots: u64, n_sub: usize) -> f64 {
    let m = shots as f64;
    let norm = 1.0 / (m * (m - 1.0));
    let mut acc = 0.0;
    for (i, &(s, ns)) in pairs.iter().enumerate() {
        // diagonal: n_s (n_s - 1)
        acc += ns as f64 * (ns as f64 - 1.0) * norm;
        for &(sp, nsp) in &pairs[i + 1..] {
            let h = (s ^ sp).count_ones() as i32;
            let w = (-2.0f64).powi(-h);
            acc += 2.0 * w * ns as f64 * nsp as f64 * norm;
        }
    }
    acc * 2.0f64.powi(n_sub as i32)
}

fn subsystem_mask(subsystem: &[usize]) -> u64 {
    subsystem.iter().map(|&q| 1u64 << q).sum()
}

fn jackknife(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    let mean: f64 = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, f64::NAN);
    }
    let total: f64 = values.iter().sum();
    let loo: Vec<f64> = values
        .iter()
        .map(|v| (total - v) / (m as f64 - 1.0))
        .collect();
    let loo_mean: f64 = loo.iter().sum::<f64>() / m as f64;
    let var: f64 =
        loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>() * (m as f64 - 1.0) / m as f64;
    (mean, var.sqrt())
}

/// Estimated subsystem purity with jackknife standard error.
pub fn estimate_purity(data: &RandomizedDataset, subsystem: &[usize]) -> Result<(f64, f64)> {
    if subsystem.is_empty() {
        return Err(SimError::Estimator("empty subsystem".into()));
    }
    if subsystem.iter().any(|&q| q >= data.n_qubits) {
        return Err(SimError::Estimator("subsystem exceeds dataset width".into()));
    }
    for inst in &data.instances {
        if inst.shots < 2 {
            return Err(SimError::Estimator(
                "need at least 2 shots per instance".into(),
            ));
        }
    }
    let mask = subsystem_mask(subsystem);
    let per: Vec<f64> = data
        .instances
        .iter()
        .map(|inst| {
            let pairs = restrict_counts(inst, mask, subsystem.len());
            purity_one_instance(&pairs, inst.shots, subsystem.len())
        })
        .collect();
    Ok(jackknife(&per))
}

/// Renyi-2 entropy (bits) of the subsystem with a jackknife error bar
/// propagated through the log.
pub fn estimate_renyi2(data: &RandomizedDataset, subsystem: &[usize]) -> Result<(f64, f64)> {
    let (p, se) = estimate_purity(data, subsystem)?;
    let p_clamped = p.max(1e-12);
    Ok((-p_clamped.log2(), se / (p_clamped * std::f64::consts::LN_2)))
}

/// Renyi-2 mutual information between disjoint subsystems from the same
/// dataset; jackknife over instances of the combined statistic.
pub fn mutual_information(
    data: &RandomizedDataset,
    a: &[usize],
    b: &[usize],
) -> Result<(f64, f64)> {
    if a.iter().any(|q| b.contains(q)) {
        return Err(SimError::Estimator("subsystems overlap".into()));
    }
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    let masks = [subsystem_mask(a), subsystem_mask(b), subsystem_mask(&ab)];
    let sizes = [a.len(), b.len(), ab.len()];
    let per: Vec<[f64; 3]> = data
        .instances
        .iter()
        .map(|inst| {
            let mut out = [0.0; 3];
            for k in 0..3 {
                let pairs = restrict_counts(inst, masks[k], sizes[k]);
                out[k] = purity_one_instance(&pairs, inst.shots, sizes[k]);
            }
            out
        })
        .collect();
    // jackknife the full I2 = S_A + S_B - S_AB combination
    let m = per.len();
    let combine = |sums: &[f64; 3], count: f64| -> f64 {
        let s = |x: f64| -(x / count).max(1e-12).log2();
        s(sums[0]) + s(sums[1]) - s(sums[2])
    };
    let mut totals = [0.0; 3];
    for row in &per {
        for k in 0..3 {
            totals[k] += row[k];
        }
    }
    let full = combine(&totals, m as f64);
    if m < 2 {
        return Ok((full, f64::NAN));
    }
    let loo: Vec<f64> = per
        .iter()
        .map(|row| {
            let sums = [
                totals[0] - row[0],
                totals[1] - row[1],
                totals[2] - row[2],
            ];
            combine(&sums, m as f64 - 1.0)
        })
        .collect();
    let loo_mean: f64 = loo.iter().sum::<f64>() / m as f64;
    let var: f64 =
        loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>() * (m as f64 - 1.0) / m as f64;
    Ok((full, var.sqrt()))
}

/// Entropy vs subsystem-volume curve. Points carry (volume, S2, stderr).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub points: Vec<(usize, f64, f64)>,
    pub mitigated: bool,
}

impl EntropyCurve {
    /// Average S2 over all contiguous windows of each volume 0..=N, treating
    /// qubit order as the chain order.
    pub fn from_dataset(data: &RandomizedDataset) -> Result<Self> {
        let n = data.n_qubits;
        let mut points = vec![(0usize, 0.0, 0.0)];
        for vol in 1..=n {
            let mut vals = Vec::new();
            let mut errs = Vec::new();
            for start in 0..=(n - vol) {
                let sub: Vec<usize> = (start..start + vol).collect();
                let (s, se) = estimate_renyi2(data, &sub)?;
                vals.push(s);
                errs.push(se);
            }
            let k = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / k;
            // windows share data; quote the mean per-window error
            let err = errs.iter().sum::<f64>() / k;
            points.push((vol, mean, err));
        }
        Ok(Self {
            points,
            mitigated: false,
        })
    }

    /// Exact curve from a pure state (volume-averaged over contiguous
    /// windows), for oracle comparisons and synthetic tests.
    pub fn exact_from_state(state: &StateVector) -> Result<Self> {
        let n = state.n_qubits();
        let mut points = vec![(0usize, 0.0, 0.0)];
        for vol in 1..=n {
            let mut acc = 0.0;
            let mut k = 0.0;
            for start in 0..=(n - vol) {
                let sub: Vec<usize> = (start..start + vol).collect();
                acc += state.renyi2_of(&sub)?;
                k += 1.0;
            }
            points.push((vol, acc / k, 0.0));
        }
        Ok(Self {
            points,
            mitigated: false,
        })
    }

    pub fn whole_system(&self) -> Option<(usize, f64, f64)> {
        let n = self.points.iter().map(|p| p.0).max()?;
        self.points.iter().copied().find(|p| p.0 == n)
    }
}

/// Subtract the linear background dS(A) = (vol A / N) * S2(whole system).
/// The whole-system point maps to exactly zero; mitigation is idempotent.
pub fn mitigate(curve: &EntropyCurve) -> Result<EntropyCurve> {
    let (n, s_whole, _) = curve
        .whole_system()
        .ok_or_else(|| SimError::Estimator("curve lacks the whole-system point".into()))?;
    if curve.mitigated {
        return Ok(curve.clone());
    }
    let points = curve
        .points
        .iter()
        .map(|&(vol, s, se)| {
            let corrected = if vol == n {
                0.0
            } else {
                s - (vol as f64 / n as f64) * s_whole
            };
            (vol, corrected, se)
        })
        .collect();
    Ok(EntropyCurve {
        points,
        mitigated: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn ghz(n: usize) -> StateVector {
        let mut st = StateVector::zero(n);
        st.apply_raw_1q(&gates::hadamard(), 0);
        let cx = gates::cnot();
        for q in 0..n - 1 {
            st.apply_raw_2q(&cx.m, q, q + 1);
        }
        st
    }

    fn bell() -> StateVector {
        ghz(2)
    }

    /// purity from exact per-instance probabilities (plain product moment):
    /// converges to the true purity as the number of CUE instances grows
    fn purity_from_exact_probs(state: &StateVector, subsystem: &[usize], n_inst: usize) -> f64 {
        let n = state.n_qubits();
        let mask = subsystem_mask(subsystem);
        let n_sub = subsystem.len();
        let mut acc = 0.0;
        for k in 0..n_inst {
            let mut rotated = state.clone();
            let mut grng = rng_for(1000 + k as u64, &[0]);
            for q in 0..n {
                let u = cue_1q(&mut grng);
                rotated.apply_raw_1q(&u.m, q);
            }
            let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
            for (i, a) in rotated.amps().iter().enumerate() {
                let mut r = 0u64;
                let mut bit = 0;
                for b in 0..n {
                    if mask & (1 << b) != 0 {
                        r |= (((i >> b) & 1) as u64) << bit;
                        bit += 1;
                    }
                }
                *probs.entry(r).or_insert(0.0) += a.norm_sqr();
            }
            let pairs: Vec<(u64, f64)> = probs.into_iter().collect();
            let mut inst = 0.0;
            for &(s, ps) in &pairs {
                for &(sp, psp) in &pairs {
                    let h = (s ^ sp).count_ones() as i32;
                    inst += (-2.0f64).powi(-h) * ps * psp;
                }
            }
            acc += inst * 2.0f64.powi(n_sub as i32);
        }
        acc / n_inst as f64
    }

    #[test]
    fn exact_probability_purity_of_basis_state() {
        let st = StateVector::zero(1);
        let p = purity_from_exact_probs(&st, &[0], 3000);
        assert!((p - 1.0).abs() < 0.03, "p = {p}");
    }

    #[test]
    fn bell_one_qubit_purity() {
        let st = bell();
        let data = sample_randomized(&st, 10, 100_000, 21);
        let (p, se) = estimate_purity(&data, &[0]).unwrap();
        assert!((p - 0.5).abs() < 0.03, "p = {p} +- {se}");
        assert!(se > 0.0 && se < 0.05);
    }

    #[test]
    fn ghz4_two_qubit_purity() {
        // exact oracle: reduced density of GHZ(4) on 2 qubits has purity 1/2
        let st = ghz(4);
        let exact = st.reduced_density(&[0, 1]).unwrap().purity();
        assert!((exact - 0.5).abs() < 1e-10);
        let data = sample_randomized(&st, 20, 100_000, 5);
        let (p, _) = estimate_purity(&data, &[0, 1]).unwrap();
        assert!((p - 0.5).abs() < 0.05, "p = {p}");
    }

    #[test]
    fn estimator_unbiased_over_resamples() {
        // fixed 3-qubit state, 200 resampled datasets
        let mut st = ghz(3);
        st.apply_raw_1q(&gates::hadamard(), 2);
        let exact = st.reduced_density(&[0, 1]).unwrap().purity();
        let mut means = Vec::new();
        for rep in 0..200u64 {
            let data = sample_randomized(&st, 4, 256, 900 + rep);
            let (p, _) = estimate_purity(&data, &[0, 1]).unwrap();
            means.push(p);
        }
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let sd = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>()
            / (means.len() as f64 - 1.0))
            .sqrt();
        let se = sd / (means.len() as f64).sqrt();
        assert!(
            (m - exact).abs() < 2.0 * se + 1e-3,
            "mean {m} vs exact {exact} (se {se})"
        );
    }

    #[test]
    fn shot_scaling_tightens_the_estimate() {
        let st = bell();
        let mut last_se = f64::INFINITY;
        for shots in [200u64, 2_000, 20_000] {
            let data = sample_randomized(&st, 8, shots, 33);
            let (p, se) = estimate_purity(&data, &[0]).unwrap();
            assert!((p - 0.5).abs() < 0.2);
            assert!(se < last_se, "stderr did not shrink at {shots} shots");
            last_se = se;
        }
    }

    #[test]
    fn dataset_shape_matches_request() {
        let data = sample_randomized(&bell(), 7, 500, 3);
        assert_eq!(data.instances.len(), 7);
        assert!(data.instances.iter().all(|i| i.shots == 500));
        data.validate().unwrap();
    }

    #[test]
    fn sampler_draws_from_the_rotated_distribution() {
        // |0..0> with the identity in place of the CUE rotation puts every
        // count on the all-zero string; checked directly on the Born
        // distribution the sampler walks
        let st = StateVector::zero(3);
        let probs: Vec<f64> = st.amps().iter().map(|a| a.norm_sqr()).collect();
        assert!((probs[0] - 1.0).abs() < 1e-12);
        assert!(probs[1..].iter().all(|&p| p < 1e-24));
        // and the real sampler's counts land only on strings the rotated
        // state supports
        let data = sample_randomized(&st, 2, 1_000, 12);
        for inst in &data.instances {
            assert_eq!(inst.counts.values().sum::<u64>(), 1_000);
        }
    }

    #[test]
    fn mutual_information_reference_states() {
        // product state: I2 = 0
        let mut st = StateVector::zero(4);
        st.apply_raw_1q(&gates::hadamard(), 1);
        let data = sample_randomized(&st, 10, 50_000, 8);
        let (i2, se) = mutual_information(&data, &[0, 1], &[2, 3]).unwrap();
        assert!(i2.abs() < 3.0 * se + 0.02, "I2 = {i2} +- {se}");
        // Bell pair: I2 = 2 bits. The whole-system purity estimate carries
        // O(1) circular-ensemble variance per instance, so the instance
        // count drives the error bar here.
        let data = sample_randomized(&bell(), 150, 20_000, 9);
        let (i2, se) = mutual_information(&data, &[0], &[1]).unwrap();
        assert!((i2 - 2.0).abs() < 3.0 * se + 0.1, "I2 = {i2} +- {se}");
        // GHZ(4), two far qubits: 1 bit
        let data = sample_randomized(&ghz(4), 150, 20_000, 10);
        let (i2, se) = mutual_information(&data, &[0], &[3]).unwrap();
        assert!((i2 - 1.0).abs() < 3.0 * se + 0.1, "I2 = {i2} +- {se}");
    }

    #[test]
    fn mitigation_removes_linear_background_exactly() {
        let curve = EntropyCurve {
            points: (0..=6)
                .map(|v| (v, 0.3 * v.min(6 - v) as f64 + 0.1 * v as f64, 0.01))
                .collect(),
            mitigated: false,
        };
        let m = mitigate(&curve).unwrap();
        for &(v, s, _) in &m.points {
            let expect = 0.3 * v.min(6 - v) as f64;
            assert!((s - expect).abs() < 1e-12, "vol {v}");
        }
        // idempotent
        let m2 = mitigate(&m).unwrap();
        for (a, b) in m.points.iter().zip(&m2.points) {
            assert_eq!(a, b);
        }
        // noiseless pure-state curve unchanged
        let st = ghz(3);
        let exact = EntropyCurve::exact_from_state(&st).unwrap();
        let mit = mitigate(&exact).unwrap();
        for (a, b) in exact.points.iter().zip(&mit.points) {
            assert!((a.1 - b.1).abs() < 1e-9);
        }
        // missing whole-system point is an error
        let bad = EntropyCurve {
            points: vec![],
            mitigated: false,
        };
        assert!(mitigate(&bad).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let data = sample_randomized(&bell(), 3, 1_000, 77);
        let s = data.to_jsonl().unwrap();
        let back = RandomizedDataset::from_jsonl(&s).unwrap();
        assert_eq!(back.n_qubits, 2);
        assert_eq!(back.instances.len(), 3);
        assert_eq!(back.instances[1].counts, data.instances[1].counts);
    }
}

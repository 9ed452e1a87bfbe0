//! The decoded order parameter: zeta(r) = 2 <z_p tau_m(r)> over shots and
//! circuit instances, its simulated counterpart zeta_sim(r) = 2 <|a_z|>,
//! the proxy entropies, and noise-mitigated variants
//! zeta_tilde(r) = zeta(r)/zeta(r_max). Error bars come from a bootstrap
//! over circuit instances.

use rand::Rng;

use super::sweep::SweepOutcome;
use super::{s_proxy_of, DecodeResult, ShotRecord};
use crate::error::{Result, SimError};
use crate::rng::rng_for;

/// Pair of (record, decoded sweep) for one shot.
pub struct DecodedShot {
    pub circuit_id: u64,
    pub z_p: i8,
    pub a_z: Vec<f64>,
    pub tau: Vec<i8>,
}

impl DecodedShot {
    pub fn new(record: &ShotRecord, sweep: &SweepOutcome) -> Self {
        Self {
            circuit_id: record.circuit_id,
            z_p: record.z_p,
            a_z: sweep.a_z.clone(),
            tau: sweep.tau.clone(),
        }
    }
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Aggregate decoded shots into the r-dependent order parameters.
/// `rejected` counts shots the decoder refused (impossible records).
pub fn zeta(
    shots: &[DecodedShot],
    rejected: usize,
    n_qubits: usize,
    rho: f64,
    peak_active: usize,
    bootstrap_seed: u64,
) -> Result<DecodeResult> {
    if shots.is_empty() {
        return Err(SimError::Decode("no accepted shots".into()));
    }
    let r_len = shots[0].a_z.len();
    if shots.iter().any(|s| s.a_z.len() != r_len) {
        return Err(SimError::Decode("inconsistent radius counts".into()));
    }
    // group by circuit instance; the bootstrap resamples instances
    let mut ids: Vec<u64> = shots.iter().map(|s| s.circuit_id).collect();
    ids.sort_unstable();
    ids.dedup();
    let groups: Vec<Vec<usize>> = ids
        .iter()
        .map(|&id| {
            (0..shots.len())
                .filter(|&k| shots[k].circuit_id == id)
                .collect()
        })
        .collect();

    let mean_over = |idx: &[usize]| -> (Vec<f64>, Vec<f64>) {
        let mut zeta = vec![0.0; r_len];
        let mut zsim = vec![0.0; r_len];
        let mut count = 0.0;
        for &gi in idx {
            for &k in &groups[gi] {
                let s = &shots[k];
                for r in 0..r_len {
                    zeta[r] += s.z_p as f64 * s.tau[r] as f64;
                    zsim[r] += s.a_z[r].abs();
                }
                count += 1.0;
            }
        }
        for r in 0..r_len {
            zeta[r] *= 2.0 / count;
            zsim[r] *= 2.0 / count;
        }
        (zeta, zsim)
    };

    let all: Vec<usize> = (0..groups.len()).collect();
    let (z, zs) = mean_over(&all);

    // bootstrap over circuit instances
    let mut z_var = vec![0.0; r_len];
    let mut zs_var = vec![0.0; r_len];
    if groups.len() > 1 {
        let mut rng = rng_for(bootstrap_seed, &[0xb007]);
        let mut z_acc = vec![0.0; r_len];
        let mut z_acc2 = vec![0.0; r_len];
        let mut zs_acc = vec![0.0; r_len];
        let mut zs_acc2 = vec![0.0; r_len];
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let sample: Vec<usize> = (0..groups.len())
                .map(|_| rng.gen_range(0..groups.len()))
                .collect();
            let (bz, bzs) = mean_over(&sample);
            for r in 0..r_len {
                z_acc[r] += bz[r];
                z_acc2[r] += bz[r] * bz[r];
                zs_acc[r] += bzs[r];
                zs_acc2[r] += bzs[r] * bzs[r];
            }
        }
        let m = BOOTSTRAP_RESAMPLES as f64;
        for r in 0..r_len {
            z_var[r] = (z_acc2[r] / m - (z_acc[r] / m).powi(2)).max(0.0);
            zs_var[r] = (zs_acc2[r] / m - (zs_acc[r] / m).powi(2)).max(0.0);
        }
    }
    let z_err: Vec<f64> = z_var.iter().map(|v| v.sqrt()).collect();
    let zs_err: Vec<f64> = zs_var.iter().map(|v| v.sqrt()).collect();

    // mitigation: divide by zeta(r_max) unless it is consistent with zero
    let z_last = z[r_len - 1];
    let mitigation_undefined = z_last.abs() <= z_err[r_len - 1].max(1e-12);
    let zeta_tilde: Vec<f64> = if mitigation_undefined {
        Vec::new()
    } else {
        z.iter().map(|&x| x / z_last).collect()
    };
    let s_proxy = z.iter().map(|&x| s_proxy_of(x)).collect();
    let s_proxy_sim = zs.iter().map(|&x| s_proxy_of(x)).collect();
    let s_proxy_tilde = zeta_tilde.iter().map(|&x| s_proxy_of(x)).collect();

    Ok(DecodeResult {
        n_qubits,
        rho,
        n_circuits: groups.len(),
        n_shots: shots.len(),
        rejected_shots: rejected,
        zeta: z,
        zeta_err: z_err,
        zeta_sim: zs,
        zeta_sim_err: zs_err,
        zeta_tilde,
        s_proxy,
        s_proxy_sim,
        s_proxy_tilde,
        mitigation_undefined,
        peak_active,
    })
}

/// Fit zeta(r_max) vs N to c * b^N at fixed rho. Decay base b near 1 flags
/// the disentangling phase; b < 1 measures sensitivity to noise anywhere in
/// the system.
#[derive(Clone, Debug)]
pub struct NoiseProbeFit {
    pub rho: f64,
    pub base: f64,
    pub prefactor: f64,
    pub disentangling: bool,
}

pub fn noise_as_probe(points: &[(usize, f64)], rho: f64) -> Result<NoiseProbeFit> {
    if points.len() < 2 {
        return Err(SimError::Decode("need at least two sizes to fit".into()));
    }
    if points.iter().any(|&(_, z)| z <= 0.0) {
        return Err(SimError::Decode(
            "zeta(r_max) must be positive for the exponential fit".into(),
        ));
    }
    // least squares on ln zeta = ln c + N ln b
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|&(nn, _)| nn as f64).sum();
    let sy: f64 = points.iter().map(|&(_, z)| z.ln()).sum();
    let sxx: f64 = points.iter().map(|&(nn, _)| (nn as f64).powi(2)).sum();
    let sxy: f64 = points.iter().map(|&(nn, z)| nn as f64 * z.ln()).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let base = slope.exp();
    Ok(NoiseProbeFit {
        rho,
        base,
        prefactor: intercept.exp(),
        disentangling: base > 0.995,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shot(circuit_id: u64, z_p: i8, tau: Vec<i8>, a_z: Vec<f64>) -> DecodedShot {
        DecodedShot {
            circuit_id,
            z_p,
            a_z,
            tau,
        }
    }

    #[test]
    fn deterministic_probe_gives_zeta_two() {
        // single trajectory, z_p tau == 1 at every r: zeta = 2
        let shots: Vec<DecodedShot> = (0..10)
            .map(|k| shot(k, 1, vec![1, 1], vec![1.0, 1.0]))
            .collect();
        let r = zeta(&shots, 0, 4, 1.0, 4, 7).unwrap();
        assert!((r.zeta[0] - 2.0).abs() < 1e-12);
        assert!((r.zeta_sim[0] - 2.0).abs() < 1e-12);
        assert!((r.s_proxy[0] + (5.0f64 / 2.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn randomized_directions_give_zeta_one() {
        // across instances the Bloch direction is uniform: E|n_z| = 1/2,
        // and tau tracks z_p perfectly: zeta = 2 * E[z_p tau] = ...
        // emulate: half the instances have |a_z| = 1, matching bits; half
        // have a_z ~ uniform magnitude. Direct check of the formula
        // zeta_sim = 2 E|a_z| on synthetic values:
        let mut shots = Vec::new();
        let draws = 4000;
        for k in 0..draws {
            // a_z of a pure state with Haar-uniform direction: uniform in [-1, 1]
            let u = (k as f64 + 0.5) / draws as f64 * 2.0 - 1.0;
            let t = if u < 0.0 { -1 } else { 1 };
            // z_p drawn from +-1 with P(+1) = (1+u)/2 -> E[z_p] = u;
            // this test uses the exact mean instead of sampling: encode via
            // weighting trick: two shots with z_p = +-1... simpler: set
            // z_p = t (perfect agreement) to probe normalization.
            shots.push(shot(k as u64 % 10, t, vec![t], vec![u]));
        }
        let r = zeta(&shots, 0, 4, 1.0, 4, 3).unwrap();
        // E|a_z| = 1/2 -> zeta_sim = 1
        assert!((r.zeta_sim[0] - 1.0).abs() < 1e-3, "{}", r.zeta_sim[0]);
        // zeta = 2 E[z_p tau] = 2 here (tau == z_p); S_proxy endpoint checks
        assert!((r.zeta[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mitigation_divides_by_the_last_radius() {
        let shots: Vec<DecodedShot> = (0..40)
            .map(|k| {
                let flip = if k % 4 == 0 { -1 } else { 1 };
                shot(k % 8, flip, vec![1, flip], vec![0.3, 0.9])
            })
            .collect();
        let r = zeta(&shots, 0, 4, 0.5, 4, 1).unwrap();
        assert!(!r.mitigation_undefined);
        let last = *r.zeta.last().unwrap();
        for (zt, z) in r.zeta_tilde.iter().zip(&r.zeta) {
            assert!((zt - z / last).abs() < 1e-12);
        }
        assert!((r.zeta_tilde.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_flags_mitigation_undefined() {
        let shots: Vec<DecodedShot> = (0..64)
            .map(|k| {
                let z: i8 = if k % 2 == 0 { 1 } else { -1 };
                shot(k % 16, z, vec![1], vec![0.0])
            })
            .collect();
        let r = zeta(&shots, 0, 4, 0.5, 4, 2).unwrap();
        assert!(r.mitigation_undefined);
        assert!(r.zeta_tilde.is_empty());
    }

    #[test]
    fn exponential_fit_recovers_the_base() {
        let pts: Vec<(usize, f64)> = [12usize, 24, 40, 58]
            .iter()
            .map(|&n| (n, 0.9 * 0.97f64.powi(n as i32)))
            .collect();
        let fit = noise_as_probe(&pts, 1.0).unwrap();
        assert!((fit.base - 0.97).abs() < 1e-10);
        assert!((fit.prefactor - 0.9).abs() < 1e-10);
        assert!(!fit.disentangling);
        let flat: Vec<(usize, f64)> = [12usize, 24, 40].iter().map(|&n| (n, 0.8)).collect();
        let fit = noise_as_probe(&flat, 0.3).unwrap();
        assert!(fit.disentangling);
    }
}

//! Floquet ergodicity diagnostics: quasi-energy spectrum of the fSim chain
//! in the zero-charge sector and its mean level-spacing ratio.
//!
//! U_F(theta) = e^{-i sum h_i Z_i} (even fSim layer) e^{-i sum h_i Z_i}
//! (odd fSim layer) on an open chain, restricted to the half-filling
//! sector. Eigenphases come from the Cayley transform
//! K = i (I - U)(I + U)^{-1}, which is Hermitian for unitary U; a random
//! global phase shift keeps (I + U) well conditioned.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::error::{Result, SimError};
use crate::rng::rng_for;

type C = Complex<f64>;
type CMat = DMatrix<C>;

#[derive(Clone, Debug)]
pub struct FloquetSpec {
    pub chain_len: usize,
    pub theta: f64,
    pub fields: Vec<f64>,
}

impl FloquetSpec {
    pub fn new(chain_len: usize, theta: f64, fields: Vec<f64>) -> Result<Self> {
        if chain_len % 2 != 0 {
            return Err(SimError::Spectral(
                "zero-charge sector needs an even chain".into(),
            ));
        }
        if chain_len > 14 {
            return Err(SimError::Spectral("chain capped at L = 14".into()));
        }
        if fields.len() != chain_len {
            return Err(SimError::Spectral("need one field per site".into()));
        }
        if fields.iter().any(|h| !(0.0..2.0 * std::f64::consts::PI).contains(h)) {
            return Err(SimError::Spectral("fields must lie in [0, 2 pi)".into()));
        }
        Ok(Self {
            chain_len,
            theta,
            fields,
        })
    }

    pub fn random<R: Rng>(chain_len: usize, theta: f64, rng: &mut R) -> Result<Self> {
        let fields = (0..chain_len)
            .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
            .collect();
        Self::new(chain_len, theta, fields)
    }
}

/// Half-filling sector basis: bitstrings with L/2 ones, ascending.
pub fn sector_basis(l: usize) -> Vec<usize> {
    (0..1usize << l)
        .filter(|s| s.count_ones() as usize == l / 2)
        .collect()
}

pub fn sector_dim(l: usize) -> usize {
    // binomial(l, l/2)
    let mut num = 1u128;
    let mut den = 1u128;
    for k in 0..l / 2 {
        num *= (l - k) as u128;
        den *= (k + 1) as u128;
    }
    (num / den) as usize
}

/// The Floquet unitary restricted to the zero-charge sector.
pub fn floquet_unitary(spec: &FloquetSpec) -> CMat {
    let l = spec.chain_len;
    let basis = sector_basis(l);
    let lookup: std::collections::HashMap<usize, usize> =
        basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let d = basis.len();
    let (c, s) = (spec.theta.cos(), spec.theta.sin());
    let ms = C::new(0.0, -s);
    let ph11 = C::new((2.0 * spec.theta).cos(), -(2.0 * spec.theta).sin());

    // fSim layer as a sector matrix: gates on (i, i+1) for i of one parity
    let layer = |parity: usize| -> CMat {
        let mut m = CMat::zeros(d, d);
        for (col, &st) in basis.iter().enumerate() {
            // expand the action on this basis state
            let mut amps: Vec<(usize, C)> = vec![(st, C::new(1.0, 0.0))];
            let mut i = parity;
            while i + 1 < l {
                let mut next = Vec::with_capacity(amps.len() * 2);
                for &(bs, amp) in &amps {
                    let b0 = (bs >> i) & 1;
                    let b1 = (bs >> (i + 1)) & 1;
                    match (b0, b1) {
                        (0, 0) => next.push((bs, amp)),
                        (1, 1) => next.push((bs, amp * ph11)),
                        _ => {
                            next.push((bs, amp * C::new(c, 0.0)));
                            next.push((bs ^ (1 << i) ^ (1 << (i + 1)), amp * ms));
                        }
                    }
                }
                amps = next;
                i += 2;
            }
            for (bs, amp) in amps {
                m[(lookup[&bs], col)] += amp;
            }
        }
        m
    };

    // diagonal field layer e^{-i sum h_i Z_i}, Z|0> = +|0>
    let zdiag: Vec<C> = basis
        .iter()
        .map(|&st| {
            let mut phase = 0.0;
            for (i, h) in spec.fields.iter().enumerate() {
                let z = 1.0 - 2.0 * ((st >> i) & 1) as f64;
                phase += h * z;
            }
            C::new(phase.cos(), -phase.sin())
        })
        .collect();

    let even = layer(0);
    let odd = layer(1);
    let mut m = odd;
    for r in 0..d {
        for cc in 0..d {
            m[(r, cc)] *= zdiag[r];
        }
    }
    let mut m = even * m;
    for r in 0..d {
        for cc in 0..d {
            m[(r, cc)] *= zdiag[r];
        }
    }
    m
}

/// Quasi-energies in (-pi, pi], ascending, via the Cayley transform with a
/// random spectral shift for conditioning.
pub fn quasi_energies<R: Rng>(u: &CMat, rng: &mut R) -> Result<Vec<f64>> {
    let d = u.nrows();
    let alpha: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    let shift = C::new(alpha.cos(), alpha.sin());
    let shifted = u * shift;
    let eye = CMat::identity(d, d);
    let denom = (&eye + &shifted).lu();
    let rhs = (&eye - &shifted) * C::new(0.0, 1.0);
    let k = denom
        .solve(&rhs)
        .ok_or_else(|| SimError::Spectral("I + e^{ia} U singular".into()))?;
    // K is Hermitian up to roundoff; symmetrize and diagonalize
    let kh = (&k + k.adjoint()) * C::new(0.5, 0.0);
    let eigs = kh.symmetric_eigen().eigenvalues;
    let mut es: Vec<f64> = eigs
        .iter()
        .map(|&x| {
            // eigenvalue e^{-iE} maps to k = -tan((E - alpha)/2)
            let e = alpha - 2.0 * x.atan();
            // wrap to (-pi, pi]
            let mut w = e % (2.0 * std::f64::consts::PI);
            if w <= -std::f64::consts::PI {
                w += 2.0 * std::f64::consts::PI;
            } else if w > std::f64::consts::PI {
                w -= 2.0 * std::f64::consts::PI;
            }
            w
        })
        .collect();
    es.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(es)
}

/// r_n = min(d_n, d_{n+1}) / max(d_n, d_{n+1}) averaged over the interior
/// spacings of one spectrum; the wrap-around spacing is excluded. Returns
/// None for a degenerate spectrum.
pub fn spacing_ratio(energies: &[f64]) -> Option<f64> {
    let d: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    if d.iter().any(|&x| x < 1e-12) {
        return None;
    }
    let rs: Vec<f64> = d
        .windows(2)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    Some(rs.iter().sum::<f64>() / rs.len() as f64)
}

#[derive(Clone, Debug)]
pub struct LevelStats {
    pub theta: f64,
    pub chain_len: usize,
    pub r_bar: f64,
    pub stderr: f64,
    pub n_realizations: usize,
    pub skipped: usize,
}

/// Mean level-spacing ratio over disorder realizations (fresh fields per
/// realization). Degenerate spectra are skipped and counted.
pub fn level_spacing_ratio(
    chain_len: usize,
    theta: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<LevelStats> {
    if n_realizations < 2 {
        return Err(SimError::Spectral("need at least 2 realizations".into()));
    }
    use rayon::prelude::*;
    let samples: Vec<Option<f64>> = (0..n_realizations)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, &[5, theta.to_bits(), k as u64]);
            let spec = FloquetSpec::random(chain_len, theta, &mut rng).ok()?;
            let u = floquet_unitary(&spec);
            let es = quasi_energies(&u, &mut rng).ok()?;
            spacing_ratio(&es)
        })
        .collect();
    let vals: Vec<f64> = samples.iter().filter_map(|x| *x).collect();
    let skipped = n_realizations - vals.len();
    if vals.len() < 2 {
        return Err(SimError::Spectral("all realizations degenerate".into()));
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (vals.len() as f64 - 1.0);
    Ok(LevelStats {
        theta,
        chain_len,
        r_bar: mean,
        stderr: (var / vals.len() as f64).sqrt(),
        n_realizations: vals.len(),
        skipped,
    })
}

pub const R_POISSON: f64 = 0.386;
pub const R_GOE: f64 = 0.536;

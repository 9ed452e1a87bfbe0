//! Matrix-product-state backend for the decoder: simulates the mapped
//! quasi-1D monitored circuit with bond-dimension truncation, so the
//! decoding cost scales polynomially in system size. Converges in the
//! disentangling phase and fails deep in the entangling phase, which is
//! itself a diagnostic.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::circuits::mapping::MappedCircuit;
use crate::circuits::Op;
use crate::decoder::{DecodingSchedule, ShotRecord};
use crate::error::{Result, SimError};
use crate::gates::swap_gate;

type C = Complex<f64>;
type CMat = DMatrix<C>;

/// Site tensors in left-to-right order; tensor `k` has shape
/// (chi_left, 2, chi_right), stored as a matrix of shape
/// (chi_left * 2, chi_right) with the physical index fused left (row-major
/// over (left, phys)).
pub struct Mps {
    sites: Vec<CMat>,
    pub chi_max: usize,
    /// orthogonality center; tensors left of it are left-isometries,
    /// right of it right-isometries
    center: usize,
    /// cumulative discarded weight (sum of discarded singular values squared)
    pub truncation_error: f64,
}

fn lfused(rows_left: usize, mat: &CMat) -> (usize, usize, usize) {
    let (ls, r) = mat.shape();
    (rows_left, ls / rows_left, r)
}

impl Mps {
    /// Product state |0...0> on `n` sites.
    pub fn zero(n: usize, chi_max: usize) -> Self {
        assert!(n >= 1 && chi_max >= 1);
        let mut sites = Vec::with_capacity(n);
        for _ in 0..n {
            let mut m = CMat::zeros(2, 1);
            m[(0, 0)] = C::new(1.0, 0.0);
            sites.push(m);
        }
        Self {
            sites,
            chi_max,
            center: 0,
            truncation_error: 0.0,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        (0..self.n_sites() - 1)
            .map(|k| self.sites[k].ncols())
            .collect()
    }

    fn chi_left(&self, k: usize) -> usize {
        if k == 0 {
            1
        } else {
            self.sites[k - 1].ncols()
        }
    }

    /// Move the orthogonality center one site right via QR.
    fn shift_right(&mut self) {
        let k = self.center;
        let qr = self.sites[k].clone().qr();
        let q = qr.q();
        let r = qr.r();
        self.sites[k] = q;
        let next = &self.sites[k + 1];
        let (chi_l, phys, chi_r) = lfused(self.chi_left(k + 1), next);
        // contract r into the next tensor's left index
        let reshaped = reshape_l_to_mat(next, chi_l, phys * chi_r);
        let merged = &r * reshaped;
        self.sites[k + 1] = mat_to_lfused(&merged, r.nrows(), phys, chi_r);
        self.center = k + 1;
    }

    /// Move the orthogonality center one site left via LQ (QR of the
    /// transpose).
    fn shift_left(&mut self) {
        let k = self.center;
        let (chi_l, phys, chi_r) = lfused(self.chi_left(k), &self.sites[k]);
        let m = reshape_l_to_mat(&self.sites[k], chi_l, phys * chi_r);
        // LQ: m = L Q with Q right-isometric
        let qr = m.transpose().qr();
        let q = qr.q().transpose();
        let l = qr.r().transpose();
        self.sites[k] = mat_to_lfused(&q, q.nrows(), phys, chi_r);
        let prev = &self.sites[k - 1];
        let merged = prev * &l;
        self.sites[k - 1] = merged;
        self.center = k - 1;
    }

    pub fn move_center(&mut self, k: usize) {
        while self.center < k {
            self.shift_right();
        }
        while self.center > k {
            self.shift_left();
        }
    }

    /// Apply a single-qubit gate at site `k` (center moves there).
    pub fn apply_1q(&mut self, m: &[Complex64; 4], k: usize) {
        self.move_center(k);
        let (chi_l, _, chi_r) = lfused(self.chi_left(k), &self.sites[k]);
        let site = &self.sites[k];
        let mut out = CMat::zeros(chi_l * 2, chi_r);
        for l in 0..chi_l {
            for r in 0..chi_r {
                let a0 = site[(l * 2, r)];
                let a1 = site[(l * 2 + 1, r)];
                out[(l * 2, r)] = cvt(m[0]) * a0 + cvt(m[1]) * a1;
                out[(l * 2 + 1, r)] = cvt(m[2]) * a0 + cvt(m[3]) * a1;
            }
        }
        self.sites[k] = out;
    }

    /// Apply a two-qubit gate on adjacent sites (k, k+1); `k` is the high
    /// bit of the 4x4 index. Truncates to chi_max.
    pub fn apply_2q_adjacent(&mut self, m: &[Complex64; 16], k: usize) -> Result<()> {
        self.move_center(k);
        let (chi_l, _, _) = lfused(self.chi_left(k), &self.sites[k]);
        let (_, _, chi_r) = lfused(self.chi_left(k + 1), &self.sites[k + 1]);
        // theta[(l, s0, s1), r] = sum_b A[l, s0, b] B[b, s1, r]
        let a = &self.sites[k]; // (chi_l*2, chi_b)
        let b = reshape_l_to_mat(&self.sites[k + 1], self.chi_left(k + 1), 2 * chi_r);
        let theta = a * b; // (chi_l*2, 2*chi_r)
        // gate on (s0, s1)
        let mut gated = CMat::zeros(chi_l * 2, 2 * chi_r);
        for l in 0..chi_l {
            for r in 0..chi_r {
                let mut v = [C::new(0.0, 0.0); 4];
                for s0 in 0..2 {
                    for s1 in 0..2 {
                        v[s0 * 2 + s1] = theta[(l * 2 + s0, s1 * chi_r + r)];
                    }
                }
                for (row, vr) in (0..4).map(|row| {
                    let mut acc = C::new(0.0, 0.0);
                    for col in 0..4 {
                        acc += cvt(m[row * 4 + col]) * v[col];
                    }
                    (row, acc)
                }) {
                    gated[(l * 2 + row / 2, (row % 2) * chi_r + r)] = vr;
                }
            }
        }
        self.split(k, gated, chi_l, chi_r)
    }

    /// SVD split of a two-site block back into tensors, truncating to
    /// chi_max and accumulating the discarded weight.
    fn split(&mut self, k: usize, theta: CMat, chi_l: usize, chi_r: usize) -> Result<()> {
        let svd = theta.svd(true, true);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let s = &svd.singular_values;
        let full = s.len();
        let keep = s
            .iter()
            .take(self.chi_max)
            .filter(|&&x| x > 1e-14)
            .count()
            .max(1);
        let discarded: f64 = s.iter().skip(keep).map(|x| x * x).sum();
        self.truncation_error += discarded;
        let kept_norm: f64 = s.iter().take(keep).map(|x| x * x).sum::<f64>().sqrt();
        if kept_norm < 1e-300 {
            return Err(SimError::TruncatedToZero(k));
        }
        let mut left = CMat::zeros(chi_l * 2, keep);
        for r in 0..chi_l * 2 {
            for c in 0..keep {
                left[(r, c)] = u[(r, c)];
            }
        }
        // fold singular values (renormalized) into the right tensor
        let mut right = CMat::zeros(keep, 2 * chi_r);
        for r in 0..keep {
            let w = s[r] / kept_norm;
            for c in 0..2 * chi_r {
                right[(r, c)] = vt[(r, c)] * C::new(w, 0.0);
            }
        }
        let _ = full;
        self.sites[k] = left;
        self.sites[k + 1] = mat_to_lfused(&right, keep, 2, chi_r);
        self.center = k + 1;
        Ok(())
    }

    /// Apply a two-qubit gate with |a - b| >= 1 by swapping `b` next to `a`.
    pub fn apply_2q(&mut self, m: &[Complex64; 16], a: usize, b: usize) -> Result<()> {
        if a.abs_diff(b) == 1 {
            if a < b {
                return self.apply_2q_adjacent(m, a);
            }
            // reverse orientation: conjugate by the index swap
            let mut flipped = [Complex64::ZERO; 16];
            for r in 0..4 {
                for c in 0..4 {
                    let fr = ((r & 1) << 1) | (r >> 1);
                    let fc = ((c & 1) << 1) | (c >> 1);
                    flipped[fr * 4 + fc] = m[r * 4 + c];
                }
            }
            return self.apply_2q_adjacent(&flipped, b);
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let sw = swap_gate().m;
        // bring hi down to lo+1
        for k in (lo + 1..hi).rev() {
            self.apply_2q_adjacent(&sw, k)?;
        }
        let res = if a < b {
            self.apply_2q_adjacent(m, lo)
        } else {
            let mut flipped = [Complex64::ZERO; 16];
            for r in 0..4 {
                for c in 0..4 {
                    let fr = ((r & 1) << 1) | (r >> 1);
                    let fc = ((c & 1) << 1) | (c >> 1);
                    flipped[fr * 4 + fc] = m[r * 4 + c];
                }
            }
            self.apply_2q_adjacent(&flipped, lo)
        };
        for k in lo + 1..hi {
            self.apply_2q_adjacent(&sw, k)?;
        }
        res
    }

    /// Probability of outcome 1 at site `k` (center moves there).
    pub fn prob_one(&mut self, k: usize) -> f64 {
        self.move_center(k);
        let (chi_l, _, chi_r) = lfused(self.chi_left(k), &self.sites[k]);
        let site = &self.sites[k];
        let mut p1 = 0.0;
        let mut tot = 0.0;
        for l in 0..chi_l {
            for r in 0..chi_r {
                let w0 = site[(l * 2, r)].norm_sqr();
                let w1 = site[(l * 2 + 1, r)].norm_sqr();
                p1 += w1;
                tot += w0 + w1;
            }
        }
        p1 / tot
    }

    pub fn z_expectation(&mut self, k: usize) -> f64 {
        1.0 - 2.0 * self.prob_one(k)
    }

    /// Project site `k` on `bit` and renormalize; returns the branch
    /// probability.
    pub fn project(&mut self, k: usize, bit: u8) -> Result<f64> {
        let p1 = self.prob_one(k);
        let p = if bit == 1 { p1 } else { 1.0 - p1 };
        if p < 1e-14 {
            return Err(SimError::DegenerateBranch(p));
        }
        let (chi_l, _, chi_r) = lfused(self.chi_left(k), &self.sites[k]);
        let site = &mut self.sites[k];
        let scale = C::new(1.0 / p.sqrt(), 0.0);
        for l in 0..chi_l {
            for r in 0..chi_r {
                let keep = (l * 2 + bit as usize, r);
                let kill = (l * 2 + (1 - bit as usize), r);
                site[keep] *= scale;
                site[kill] = C::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Reset site `k` to |0> (project-free: measured value already fixed by
    /// a preceding projection, so this is a conditional flip).
    pub fn set_zero_after_projection(&mut self, k: usize, measured: u8) {
        if measured == 1 {
            self.apply_1q(&crate::gates::pauli_x(), k);
        }
    }

    /// Renyi-2 entropy (bits) across the bond right of site `k`.
    pub fn bond_entropy(&mut self, k: usize) -> f64 {
        self.move_center(k);
        let (chi_l, _, _) = lfused(self.chi_left(k), &self.sites[k]);
        let m = reshape_l_to_mat(&self.sites[k], chi_l * 2, self.sites[k].ncols());
        let svd = m.svd(false, false);
        let p: f64 = svd
            .singular_values
            .iter()
            .map(|s| (s * s / svd.singular_values.iter().map(|x| x * x).sum::<f64>()).powi(2))
            .sum();
        -p.log2()
    }

    /// Dense amplitude vector (little-endian: site k = bit k); for oracle
    /// comparisons on small registers.
    pub fn to_statevector(&self) -> Result<crate::statevec::StateVector> {
        let n = self.n_sites();
        if n > 24 {
            return Err(SimError::Circuit("register too large to densify".into()));
        }
        let mut vecs: Vec<CMat> = vec![CMat::identity(1, 1)];
        for k in 0..n {
            let (chi_l, _, chi_r) = lfused(self.chi_left(k), &self.sites[k]);
            let mut next = Vec::with_capacity(vecs.len() * 2);
            for s in 0..2usize {
                for v in &vecs {
                    // v: (1, chi_l); slice site at phys=s: (chi_l, chi_r)
                    let mut slice = CMat::zeros(chi_l, chi_r);
                    for l in 0..chi_l {
                        for r in 0..chi_r {
                            slice[(l, r)] = self.sites[k][(l * 2 + s, r)];
                        }
                    }
                    next.push(v * slice);
                }
            }
            vecs = next;
        }
        let amps: Vec<Complex64> = vecs
            .iter()
            .map(|v| Complex64::new(v[(0, 0)].re, v[(0, 0)].im))
            .collect();
        crate::statevec::StateVector::from_amps(amps)
    }
}

fn cvt(z: Complex64) -> C {
    C::new(z.re, z.im)
}

fn reshape_l_to_mat(m: &CMat, rows: usize, cols: usize) -> CMat {
    // the lfused layout (chi_l*phys, chi_r) is row-grouped by chi_l; a
    // reshape to (chi_l, phys*chi_r) keeps (l, s, r) -> (l, s*chi_r + r)
    let (nr, nc) = m.shape();
    debug_assert_eq!(nr * nc, rows * cols);
    let phys = nr / rows.max(1);
    let mut out = CMat::zeros(rows, cols);
    for l in 0..rows {
        for s in 0..phys {
            for r in 0..nc {
                out[(l, s * nc + r)] = m[(l * phys + s, r)];
            }
        }
    }
    out
}

fn mat_to_lfused(m: &CMat, chi_l: usize, phys: usize, chi_r: usize) -> CMat {
    let mut out = CMat::zeros(chi_l * phys, chi_r);
    for l in 0..chi_l {
        for s in 0..phys {
            for r in 0..chi_r {
                out[(l * phys + s, r)] = m[(l, s * chi_r + r)];
            }
        }
    }
    out
}

/// Decode one shot with the MPS backend: run the mapped circuit, project
/// mapped measurements on the recorded bits, and emit tau_m(r) as the
/// schedule's patches complete. Deferred projections (wires never reused)
/// are flushed in schedule order.
pub struct MpsOutcome {
    pub a_z: Vec<f64>,
    pub tau: Vec<i8>,
    pub truncation_error: f64,
    pub max_bond: usize,
}

pub fn mps_sweep_decode(
    mapped: &MappedCircuit,
    schedule: &DecodingSchedule,
    record: &ShotRecord,
    chi: usize,
) -> Result<MpsOutcome> {
    let probe_wire = mapped
        .keep
        .iter()
        .find(|&&(q, _)| q == schedule.probe)
        .map(|&(_, w)| w)
        .ok_or_else(|| SimError::Decode("mapped circuit does not keep the probe".into()))?;
    let mut mps = Mps::zero(mapped.n_wires, chi);
    let mut max_bond = 1usize;

    // wires reused later must be projected the moment they are measured
    let mut last_use = vec![0usize; mapped.n_wires];
    let mut op_seq = Vec::new();
    for m in &mapped.circuit.moments {
        for op in &m.ops {
            op_seq.push(op.clone());
        }
    }
    for (i, op) in op_seq.iter().enumerate() {
        for q in op.support() {
            last_use[q] = i;
        }
    }

    let mut mi = 0usize; // measurement cursor
    let mut projected: Vec<bool> = vec![false; record.m.len()];
    let mut emitted = Vec::new();
    let mut taus = Vec::new();
    let mut pending: Vec<(usize, usize)> = Vec::new(); // (2d qubit, wire)

    // r = 0 happens before any projection only if no gates precede... the
    // schedule's tau(0) is the unconditioned probe; emit after all gates
    // when nothing has been projected yet is wrong, so emit r=0 after the
    // full unitary part only when the first projection hasn't occurred.
    let mut r0_emitted = false;

    let finish_patches =
        |mps: &mut Mps,
         projected: &mut Vec<bool>,
         emitted: &mut Vec<f64>,
         taus: &mut Vec<i8>,
         upto_r: &mut usize| {
            while *upto_r < schedule.patches.len()
                && schedule.patches[*upto_r].iter().all(|&q| projected[q])
            {
                let z = mps.z_expectation(probe_wire);
                emitted.push(z);
                taus.push(if z < 0.0 { -1 } else { 1 });
                *upto_r += 1;
            }
        };
    let mut upto_r = 0usize;

    for (i, op) in op_seq.iter().enumerate() {
        match op {
            Op::Unitary1(g, w) => mps.apply_1q(&g.m, *w),
            Op::Unitary2(g, a, b) => {
                mps.apply_2q(&g.m, *a, *b)?;
                max_bond = max_bond.max(mps.bond_dims().into_iter().max().unwrap_or(1));
            }
            Op::MeasureReset(w) => {
                if !r0_emitted {
                    // a_z before any conditioning: requires all gates in the
                    // probe's lightcone; the mapped order guarantees gates on
                    // a wire precede its measurement, and the probe is never
                    // measured, so every gate has run by the first
                    // projection... only gates already emitted matter.
                    let z = mps.z_expectation(probe_wire);
                    emitted.push(z);
                    taus.push(if z < 0.0 { -1 } else { 1 });
                    r0_emitted = true;
                }
                let q2d = mapped.measure_order[mi];
                mi += 1;
                if i < last_use[*w] {
                    // wire reused later: project now (schedule must follow
                    // the sweep order for these)
                    let bit = record.bit_of(q2d);
                    mps.project(*w, bit)?;
                    mps.set_zero_after_projection(*w, bit);
                    projected[q2d] = true;
                    finish_patches(&mut mps, &mut projected, &mut emitted, &mut taus, &mut upto_r);
                } else {
                    pending.push((q2d, *w));
                }
            }
            _ => {
                return Err(SimError::Decode(
                    "unexpected op in mapped circuit".into(),
                ))
            }
        }
    }
    if !r0_emitted {
        let z = mps.z_expectation(probe_wire);
        emitted.push(z);
        taus.push(if z < 0.0 { -1 } else { 1 });
    }
    // flush deferred projections in schedule order
    for r in upto_r..schedule.patches.len() {
        for &q in &schedule.patches[r] {
            if !projected[q] {
                let wire = pending
                    .iter()
                    .find(|&&(pq, _)| pq == q)
                    .map(|&(_, w)| w)
                    .ok_or_else(|| {
                        SimError::Decode(format!(
                            "schedule wants qubit {q} before the sweep measured it"
                        ))
                    })?;
                mps.project(wire, record.bit_of(q))?;
                projected[q] = true;
            }
        }
        let z = mps.z_expectation(probe_wire);
        emitted.push(z);
        taus.push(if z < 0.0 { -1 } else { 1 });
    }
    Ok(MpsOutcome {
        a_z: emitted,
        tau: taus,
        truncation_error: mps.truncation_error,
        max_bond,
    })
}

/// Least-squares fit of zeta(chi) = alpha / ln(chi) + beta over the given
/// (chi, zeta) samples; beta is the chi -> infinity extrapolation.
pub fn chi_extrapolate(points: &[(usize, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(SimError::Estimator("need at least two chi values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(c, _)| 1.0 / (c as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, z)| z).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-15 {
        return Err(SimError::Estimator("degenerate chi grid".into()));
    }
    let alpha = (n * sxy - sx * sy) / denom;
    let beta = (sy - alpha * sx) / n;
    let residual: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - alpha * x - beta).powi(2))
        .sum();
    Ok((alpha, beta, residual))
}

/// Expected decoded signal under random sign errors: correct with
/// probability q gives zeta_approx = (2q - 1) zeta.
pub fn damping_model(q: f64, zeta_true: f64) -> f64 {
    (2.0 * q - 1.0) * zeta_true
}

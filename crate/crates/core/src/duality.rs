//! Space-time dual transform on two-qubit gates and its polar decomposition
//! into a generalized measurement times a unitary.
//!
//! With gate matrices written as `U[(o0 o1)][(i0 i1)]` (rows = outputs), the
//! dual exchanges the roles of the two qubits' legs:
//! `Ut[(i1 o1)][(i0 o0)] = U[(o0 o1)][(i0 i1)]`, i.e. the dual maps the left
//! qubit's (input, output) pair to the right qubit's. The dual of a unitary
//! is generally not unitary; it factors as `Ut = 2 V H` with `V` unitary and
//! `H` Hermitian, `0 <= H^2 <= I`.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::gates::Gate2Q;

type CMat = DMatrix<Complex<f64>>;

/// Dual of a two-qubit gate as a raw 4x4 linear map (row-major, same index
/// convention as `Gate2Q`).
pub fn spacetime_dual(u: &[Complex64; 16]) -> [Complex64; 16] {
    let mut ut = [Complex64::ZERO; 16];
    for i0 in 0..2usize {
        for i1 in 0..2usize {
            for o0 in 0..2usize {
                for o1 in 0..2usize {
                    ut[(2 * i1 + o1) * 4 + (2 * i0 + o0)] = u[(2 * o0 + o1) * 4 + (2 * i0 + i1)];
                }
            }
        }
    }
    ut
}

pub fn spacetime_dual_gate(g: &Gate2Q) -> [Complex64; 16] {
    spacetime_dual(&g.m)
}

fn to_cmat(m: &[Complex64; 16]) -> CMat {
    CMat::from_fn(4, 4, |r, c| {
        let z = m[r * 4 + c];
        Complex::new(z.re, z.im)
    })
}

fn from_cmat(m: &CMat) -> [Complex64; 16] {
    let mut out = [Complex64::ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[r * 4 + c] = Complex64::new(m[(r, c)].re, m[(r, c)].im);
        }
    }
    out
}

/// Polar data of a dual gate: `u_tilde = 2 v h`.
#[derive(Clone, Debug)]
pub struct DualDecomposition {
    pub u_tilde: [Complex64; 16],
    pub v: [Complex64; 16],
    pub h: [Complex64; 16],
    /// eigenvalue of H on |psi_theta>
    pub lambda_psi: f64,
    /// threefold-degenerate eigenvalue of H on the orthogonal complement
    pub lambda_perp: f64,
    /// top eigenvector of H
    pub psi_theta: [Complex64; 4],
    /// true when H was singular and V was completed with the identity on
    /// the kernel
    pub kernel_completed: bool,
}

const EIG_CLAMP: f64 = -1e-12;

/// H = sqrt(Ut^dag Ut)/2 via Hermitian eigendecomposition; V = Ut H^{-1} / 2
/// on the support of H, completed with the identity on the kernel.
pub fn polar_decompose(u_tilde: &[Complex64; 16]) -> Result<DualDecomposition> {
    let ut = to_cmat(u_tilde);
    let h2 = ut.adjoint() * &ut * Complex::new(0.25, 0.0);
    let se = h2.symmetric_eigen();
    let mut eigs = [0.0f64; 4];
    for (k, &w) in se.eigenvalues.iter().enumerate() {
        if w < EIG_CLAMP {
            return Err(SimError::Circuit(format!(
                "dual gate has negative H^2 eigenvalue {w:.3e}; input not a dual of a unitary?"
            )));
        }
        eigs[k] = w.max(0.0).sqrt();
    }
    let vecs = &se.eigenvectors;
    let diag_sqrt = CMat::from_fn(4, 4, |i, j| {
        if i == j {
            Complex::new(eigs[i], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let h = vecs * &diag_sqrt * vecs.adjoint();

    // invert on the support; identity completion on the kernel
    let mut kernel_completed = false;
    let tol = 1e-12;
    let diag_inv = CMat::from_fn(4, 4, |i, j| {
        if i == j && eigs[i] > tol {
            Complex::new(1.0 / eigs[i], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let h_pinv = vecs * &diag_inv * vecs.adjoint();
    let mut v = &ut * &h_pinv * Complex::new(0.5, 0.0);
    if eigs.iter().any(|&e| e <= tol) {
        kernel_completed = true;
        // V currently annihilates the kernel of H; add unitary completion.
        // Identity on the orthogonal complement of the image/support.
        let mut support_proj = CMat::zeros(4, 4);
        for (k, &e) in eigs.iter().enumerate() {
            if e > tol {
                let col = vecs.column(k);
                for r in 0..4 {
                    for c in 0..4 {
                        support_proj[(r, c)] += col[r] * col[c].conj();
                    }
                }
            }
        }
        let eye = CMat::identity(4, 4);
        // kernel vectors mapped to themselves
        v += (&eye - &support_proj.clone()) * Complex::new(1.0, 0.0)
            - (&v.clone() * (&eye - &support_proj)) * Complex::new(1.0, 0.0);
    }

    // order eigenvalues: top (non-degenerate for theta != pi/2) vs rest
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eigs[b].partial_cmp(&eigs[a]).unwrap());
    let lambda_psi = eigs[order[0]];
    let lambda_perp = eigs[order[1]];
    let mut psi = [Complex64::ZERO; 4];
    for r in 0..4 {
        let z = vecs[(r, order[0])];
        psi[r] = Complex64::new(z.re, z.im);
    }
    // fix the eigenvector's global phase: largest-magnitude entry real positive
    let lead = psi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if psi[lead].norm() > 0.0 {
        let ph = psi[lead] / psi[lead].norm();
        for p in &mut psi {
            *p /= ph;
        }
    }

    Ok(DualDecomposition {
        u_tilde: *u_tilde,
        v: from_cmat(&v),
        h: from_cmat(&h),
        lambda_psi,
        lambda_perp,
        psi_theta: psi,
        kernel_completed,
    })
}

/// Closed-form measurement strength of the dual of fSim(theta, 2 theta):
/// the H eigenvalues and the top eigenvector.
///
/// Returns `(lambda_psi, lambda_perp, psi_theta)` with
/// `lambda_psi = sqrt(1 + 3 cos^2 theta)/2` on `|psi_theta>` and
/// `lambda_perp = |sin theta|/2` on its orthogonal complement.
/// `psi_theta = (e^{-i theta/2}|00> + e^{+i theta/2}|11>)/sqrt2`; the
/// half-angle phases are what the displayed `Ut^dag Ut` actually
/// diagonalizes to under this index convention.
pub fn measurement_strength(theta: f64) -> (f64, f64, [Complex64; 4]) {
    let lam_psi = 0.5 * (1.0 + 3.0 * theta.cos().powi(2)).sqrt();
    let lam_perp = 0.5 * theta.sin().abs();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let half = theta / 2.0;
    let psi = [
        Complex64::new(s * half.cos(), -s * half.sin()),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::new(s * half.cos(), s * half.sin()),
    ];
    (lam_psi, lam_perp, psi)
}

/// Restriction of V to span{|00>, |11>} after factoring out the iSWAP-like
/// action on span{|01>, |10>}; this is the 2x2 unitary the decomposition
/// leaves on the parity-even subspace.
pub fn v_prime(decomp: &DualDecomposition) -> [Complex64; 4] {
    let v = &decomp.v;
    [v[0], v[3], v[12], v[15]]
}

/// Max-norm distance between `u_tilde` and `2 V H` (reconstruction check).
pub fn reconstruction_error(d: &DualDecomposition) -> f64 {
    let v = to_cmat(&d.v);
    let h = to_cmat(&d.h);
    let recon = v * h * Complex::new(2.0, 0.0);
    let ut = to_cmat(&d.u_tilde);
    (ut - recon).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_unitarity_violation(m: &[Complex64; 16]) -> f64 {
    crate::gates::max_unitarity_violation_2q(m)
}

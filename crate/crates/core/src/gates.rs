//! Constructors for the gate families used in the circuits: five-parameter
//! fSim gates, random square-root Paulis, Z-rotation powers, and CUE-random
//! single-qubit unitaries.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const UNITARITY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cis(phi: f64) -> Complex64 {
    Complex64::new(phi.cos(), phi.sin())
}

fn reduce_angle(a: f64) -> f64 {
    // canonical range (-pi, pi]
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Five-parameter fSim family: swap angle, conditional phase, and the three
/// single-qubit phase angles. Angles are stored in radians, reduced to
/// (-pi, pi] on construction.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsimParams {
    pub theta: f64,
    pub phi: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub delta_minus_off: f64,
}

impl FsimParams {
    pub fn new(theta: f64, phi: f64, dp: f64, dm: f64, dmo: f64) -> Self {
        assert!(
            theta.is_finite()
                && phi.is_finite()
                && dp.is_finite()
                && dm.is_finite()
                && dmo.is_finite(),
            "fSim angles must be finite"
        );
        Self {
            theta: reduce_angle(theta),
            phi: reduce_angle(phi),
            delta_plus: reduce_angle(dp),
            delta_minus: reduce_angle(dm),
            delta_minus_off: reduce_angle(dmo),
        }
    }

    /// fSim(theta, phi) with all single-qubit phases zero.
    pub fn simple(theta: f64, phi: f64) -> Self {
        Self::new(theta, phi, 0.0, 0.0, 0.0)
    }
}

/// Provenance tag describing how a gate matrix was constructed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateLabel {
    Fsim(FsimParams),
    ZPow(f64),
    SqrtX(i8),
    SqrtY(i8),
    SqrtW(i8),
    SqrtV(i8),
    Cue,
    Hadamard,
    Pauli(char),
    Swap,
    Cnot,
    Other(String),
}

/// 2x2 unitary with a provenance label. Matrix is row-major.
#[derive(Clone, Debug)]
pub struct Gate1Q {
    pub m: [Complex64; 4],
    pub label: GateLabel,
}

/// 4x4 unitary with a provenance label. Matrix is row-major; the index is
/// `2*b(t0) + b(t1)` over the gate's two targets.
#[derive(Clone, Debug)]
pub struct Gate2Q {
    pub m: [Complex64; 16],
    pub label: GateLabel,
}

pub fn max_unitarity_violation_1q(m: &[Complex64; 4]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::ZERO;
            for k in 0..2 {
                acc += m[k * 2 + i].conj() * m[k * 2 + j];
            }
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((acc - expect).norm());
        }
    }
    worst
}

pub fn max_unitarity_violation_2q(m: &[Complex64; 16]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::ZERO;
            for k in 0..4 {
                acc += m[k * 4 + i].conj() * m[k * 4 + j];
            }
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((acc - expect).norm());
        }
    }
    worst
}

impl Gate1Q {
    pub fn checked(m: [Complex64; 4], label: GateLabel) -> Result<Self> {
        let v = max_unitarity_violation_1q(&m);
        if v > UNITARITY_TOL {
            return Err(SimError::NonUnitary(v));
        }
        Ok(Self { m, label })
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                m[0].conj(),
                m[2].conj(),
                m[1].conj(),
                m[3].conj(),
            ],
            label: self.label.clone(),
        }
    }

    /// self * rhs as matrices (self applied after rhs).
    pub fn compose(&self, rhs: &Gate1Q) -> Self {
        let mut m = [Complex64::ZERO; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m[i * 2 + j] += self.m[i * 2 + k] * rhs.m[k * 2 + j];
                }
            }
        }
        Self {
            m,
            label: GateLabel::Other("composed".into()),
        }
    }
}

impl Gate2Q {
    pub fn checked(m: [Complex64; 16], label: GateLabel) -> Result<Self> {
        let v = max_unitarity_violation_2q(&m);
        if v > UNITARITY_TOL {
            return Err(SimError::NonUnitary(v));
        }
        Ok(Self { m, label })
    }
}

/// Exact fSim matrix:
/// ```text
/// [ 1        0                          0                          0              ]
/// [ 0        e^{i(D+ + D-)} cos(th)    -i e^{i(D+ - Dmo)} sin(th)  0              ]
/// [ 0       -i e^{i(D+ + Dmo)} sin(th)  e^{i(D+ - D-)} cos(th)     0              ]
/// [ 0        0                          0                          e^{i(2D+ - phi)} ]
/// ```
pub fn fsim(p: &FsimParams) -> Gate2Q {
    let (ct, st) = (p.theta.cos(), p.theta.sin());
    let z = Complex64::ZERO;
    let mi = c(0.0, -1.0);
    let m = [
        Complex64::ONE,
        z,
        z,
        z,
        z,
        cis(p.delta_plus + p.delta_minus) * ct,
        mi * cis(p.delta_plus - p.delta_minus_off) * st,
        z,
        z,
        mi * cis(p.delta_plus + p.delta_minus_off) * st,
        cis(p.delta_plus - p.delta_minus) * ct,
        z,
        z,
        z,
        z,
        cis(2.0 * p.delta_plus - p.phi),
    ];
    Gate2Q {
        m,
        label: GateLabel::Fsim(*p),
    }
}

/// The fSim sub-family used by the dual-circuit construction: phi = 2 theta.
pub fn fsim_dualizable(theta: f64) -> Gate2Q {
    fsim(&FsimParams::simple(theta, 2.0 * theta))
}

/// diag(1, e^{i pi h})
pub fn z_pow(h: f64) -> Gate1Q {
    Gate1Q {
        m: [
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            cis(std::f64::consts::PI * h),
        ],
        label: GateLabel::ZPow(h),
    }
}

pub fn pauli_x() -> [Complex64; 4] {
    [
        Complex64::ZERO,
        Complex64::ONE,
        Complex64::ONE,
        Complex64::ZERO,
    ]
}

pub fn pauli_y() -> [Complex64; 4] {
    [Complex64::ZERO, c(0.0, -1.0), c(0.0, 1.0), Complex64::ZERO]
}

pub fn pauli_z() -> [Complex64; 4] {
    [
        Complex64::ONE,
        Complex64::ZERO,
        Complex64::ZERO,
        -Complex64::ONE,
    ]
}

pub fn hadamard() -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]
}

pub fn cnot() -> Gate2Q {
    let mut m = [Complex64::ZERO; 16];
    // control = high bit (targets[0]); |10> -> |11>, |11> -> |10>
    m[0] = Complex64::ONE;
    m[5] = Complex64::ONE;
    m[2 * 4 + 3] = Complex64::ONE;
    m[3 * 4 + 2] = Complex64::ONE;
    Gate2Q {
        m,
        label: GateLabel::Cnot,
    }
}

pub fn swap_gate() -> Gate2Q {
    let mut m = [Complex64::ZERO; 16];
    m[0] = Complex64::ONE;
    m[4 + 2] = Complex64::ONE;
    m[2 * 4 + 1] = Complex64::ONE;
    m[3 * 4 + 3] = Complex64::ONE;
    Gate2Q {
        m,
        label: GateLabel::Swap,
    }
}

/// Principal square root of a traceless Hermitian involution a*X + b*Y
/// (a^2 + b^2 = 1): eigenvalues +-1, principal root maps -1 -> i.
fn principal_sqrt_xy(a: f64, b: f64) -> [Complex64; 4] {
    // M = [[0, a - ib], [a + ib, 0]]; projectors P+- = (I +- M)/2;
    // sqrt = P+ + i P-
    let m01 = c(a, -b);
    let m10 = c(a, b);
    let half = c(0.5, 0.0);
    let i_half = c(0.0, 0.5);
    [
        half + i_half,
        (half - i_half) * m01,
        (half - i_half) * m10,
        half + i_half,
    ]
}

fn sqrt_xy_family(which: char, inverse: bool) -> Gate1Q {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = match which {
        'x' => (1.0, 0.0),
        'y' => (0.0, 1.0),
        'w' => (s, s),
        'v' => (s, -s),
        _ => unreachable!(),
    };
    let m = principal_sqrt_xy(a, b);
    let g = Gate1Q {
        m,
        label: match which {
            'x' => GateLabel::SqrtX(if inverse { -1 } else { 1 }),
            'y' => GateLabel::SqrtY(if inverse { -1 } else { 1 }),
            'w' => GateLabel::SqrtW(if inverse { -1 } else { 1 }),
            _ => GateLabel::SqrtV(if inverse { -1 } else { 1 }),
        },
    };
    if inverse {
        let mut d = g.dagger();
        d.label = g.label.clone();
        d
    } else {
        g
    }
}

/// The eight-element single-qubit set {sqrt(X)^{+-1}, sqrt(Y)^{+-1},
/// sqrt(W)^{+-1}, sqrt(V)^{+-1}} with W = (X+Y)/sqrt2, V = (X-Y)/sqrt2.
pub fn sq_gate_set() -> Vec<Gate1Q> {
    let mut v = Vec::with_capacity(8);
    for which in ['x', 'y', 'w', 'v'] {
        for inv in [false, true] {
            v.push(sqrt_xy_family(which, inv));
        }
    }
    v
}

/// Uniform draw from the eight-element square-root set.
pub fn random_sq_gate<R: Rng>(rng: &mut R) -> Gate1Q {
    let k = rng.gen_range(0..8usize);
    let which = ['x', 'x', 'y', 'y', 'w', 'w', 'v', 'v'][k];
    sqrt_xy_family(which, k % 2 == 1)
}

/// Index (0..8) of a square-root gate draw, for reproducible bookkeeping.
pub fn sq_gate_by_index(k: usize) -> Gate1Q {
    let which = ['x', 'x', 'y', 'y', 'w', 'w', 'v', 'v'][k % 8];
    sqrt_xy_family(which, k % 2 == 1)
}

/// Haar-random 2x2 unitary: QR of a complex-Gaussian matrix with the
/// R-diagonal phases fixed to be real positive.
pub fn cue_1q<R: Rng>(rng: &mut R) -> Gate1Q {
    let mut g = [Complex64::ZERO; 4];
    for gi in &mut g {
        *gi = c(gauss(rng), gauss(rng));
    }
    // Gram-Schmidt on columns
    let mut c0 = [g[0], g[2]];
    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    c0[0] /= n0;
    c0[1] /= n0;
    let mut c1 = [g[1], g[3]];
    let ip = c0[0].conj() * c1[0] + c0[1].conj() * c1[1];
    c1[0] -= ip * c0[0];
    c1[1] -= ip * c0[1];
    let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
    c1[0] /= n1;
    c1[1] /= n1;
    // triangular-factor phase fixing: multiply q_k by R_kk/|R_kk| so the
    // effective R has a real positive diagonal (R00 = n0 already is)
    let r11 = c1[0].conj() * g[1] + c1[1].conj() * g[3];
    let ph = r11 / r11.norm();
    c1[0] *= ph;
    c1[1] *= ph;
    Gate1Q {
        m: [c0[0], c1[0], c0[1], c1[1]],
        label: GateLabel::Cue,
    }
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn mat_eq(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn fsim_cz_and_swap_special_points() {
        let cz = fsim(&FsimParams::simple(0.0, PI));
        let mut expect = [Complex64::ZERO; 16];
        expect[0] = Complex64::ONE;
        expect[5] = Complex64::ONE;
        expect[10] = Complex64::ONE;
        expect[15] = -Complex64::ONE;
        assert!(mat_eq(&cz.m, &expect, 1e-12));

        let sw = fsim(&FsimParams::new(PI / 2.0, PI, PI / 2.0, 0.0, 0.0));
        assert!(mat_eq(&sw.m, &swap_gate().m, 1e-12));
    }

    #[test]
    fn fsim_family_is_unitary() {
        for theta in [PI / 10.0, 2.0 * PI / 5.0, 0.3, 1.2] {
            let g = fsim_dualizable(theta);
            assert!(max_unitarity_violation_2q(&g.m) < 1e-12);
        }
    }

    #[test]
    fn fsim_exchange_symmetric_without_offdiagonal_phase() {
        let g = fsim(&FsimParams::simple(0.7, 1.1));
        assert!((g.m[1 * 4 + 2] - g.m[2 * 4 + 1]).norm() < 1e-12);
    }

    #[test]
    fn sqrt_gates_square_to_their_pauli() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let targets: [(char, [Complex64; 4]); 4] = [
            ('x', pauli_x()),
            ('y', pauli_y()),
            (
                'w',
                [
                    Complex64::ZERO,
                    Complex64::new(s, -s),
                    Complex64::new(s, s),
                    Complex64::ZERO,
                ],
            ),
            (
                'v',
                [
                    Complex64::ZERO,
                    Complex64::new(s, s),
                    Complex64::new(s, -s),
                    Complex64::ZERO,
                ],
            ),
        ];
        for (which, target) in targets {
            let g = sqrt_xy_family(which, false);
            let sq = g.compose(&g);
            assert!(mat_eq(&sq.m, &target, 1e-12), "sqrt{which}^2 mismatch");
            // inverse really inverts
            let gi = sqrt_xy_family(which, true);
            let id = g.compose(&gi);
            let eye = [
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ONE,
            ];
            assert!(mat_eq(&id.m, &eye, 1e-12));
        }
    }

    #[test]
    fn random_sq_gate_draws_uniformly() {
        // chi^2 over the 8 gate labels, 10^4 draws
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 8];
        let draws = 10_000;
        for _ in 0..draws {
            let g = random_sq_gate(&mut rng);
            let k = match g.label {
                GateLabel::SqrtX(1) => 0,
                GateLabel::SqrtX(_) => 1,
                GateLabel::SqrtY(1) => 2,
                GateLabel::SqrtY(_) => 3,
                GateLabel::SqrtW(1) => 4,
                GateLabel::SqrtW(_) => 5,
                GateLabel::SqrtV(1) => 6,
                GateLabel::SqrtV(_) => 7,
                _ => unreachable!(),
            };
            counts[k] += 1;
        }
        let expect = draws as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&cnt| (cnt as f64 - expect).powi(2) / expect)
            .sum();
        // 7 dof, 99.9% quantile ~ 24.3
        assert!(chi2 < 24.3, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn z_pow_reference_points() {
        assert!(mat_eq(&z_pow(1.0).m, &pauli_z(), 1e-12));
        let eye = [
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ONE,
        ];
        assert!(mat_eq(&z_pow(0.0).m, &eye, 1e-12));
        let s = z_pow(0.5);
        let s2 = s.compose(&s);
        assert!(mat_eq(&s2.m, &pauli_z(), 1e-12));
    }

    #[test]
    fn cue_is_unitary_and_haar_moments_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 10_000;
        let mut m00 = 0.0;
        let mut nz = 0.0;
        for _ in 0..draws {
            let u = cue_1q(&mut rng);
            assert!(max_unitarity_violation_1q(&u.m) < 1e-12);
            m00 += u.m[0].norm_sqr();
            // Bloch z of U|0>: |u00|^2 - |u10|^2
            nz += u.m[0].norm_sqr() - u.m[2].norm_sqr();
        }
        // Haar: E|U00|^2 = 1/2; Bloch image of |0> uniform on the sphere
        assert!((m00 / draws as f64 - 0.5).abs() < 0.02);
        assert!((nz / draws as f64).abs() < 0.02);
    }
}

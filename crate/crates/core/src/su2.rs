//! Three spin-1/2 systems under collective SU(2) noise: the total angular
//! momentum basis and the two-dimensional decoherence-free subsystem in
//! `J = 1/2`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::Rate;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

/// Spin-1/2 matrix for Euler angles `(θ, φ, ψ)`.
pub fn euler_su2(a: EulerAngles) -> Matrix {
    let (c, s) = ((a.phi / 2.0).cos(), (a.phi / 2.0).sin());
    let e = |x: f64| C64::from_polar(1.0, x);
    Matrix::from_rows(&[
        vec![
            e(-(a.theta + a.psi) / 2.0) * c,
            -e(-(a.theta - a.psi) / 2.0) * s,
        ],
        vec![e((a.theta - a.psi) / 2.0) * s, e((a.theta + a.psi) / 2.0) * c],
    ])
}

/// Uniform `θ, ψ`, and `cos φ` uniform on `[-1, 1]`.
pub fn random_angles<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    EulerAngles {
        theta: rng.gen_range(0.0..2.0 * PI),
        phi: (1.0 - 2.0 * rng.gen::<f64>()).acos(),
        psi: rng.gen_range(0.0..2.0 * PI),
    }
}

pub fn random_su2(seed: u64) -> (EulerAngles, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_angles(&mut rng);
    (a, euler_su2(a))
}

/// `|J, M, β⟩`; `two_j` and `two_m` are `2J` and `2M`. `beta` is `None` in
/// `J = 3/2`, which occurs once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2BasisVector {
    pub two_j: u8,
    pub two_m: i8,
    pub beta: Option<u8>,
    pub amplitudes: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Basis {
    pub vectors: Vec<Su2BasisVector>,
}

/// Index of the three-qubit basis state `|abc⟩`.
fn ket(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).expect("binary label")
}

impl Su2Basis {
    /// Order: `J = 3/2` with `M = 3/2 .. -3/2`, then `J = 1/2, β = 0` with
    /// `M = ±1/2`, then `β = 1`.
    pub fn new() -> Self {
        let s2 = 1.0 / 2f64.sqrt();
        let s3 = 1.0 / 3f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        let s23 = (2.0f64 / 3.0).sqrt();
        let vec = |terms: &[(&str, f64)]| {
            let mut v = vec![ZERO; 8];
            for &(b, c) in terms {
                v[ket(b)] = C64::new(c, 0.0);
            }
            v
        };
        let mk = |two_j, two_m, beta, amplitudes| Su2BasisVector {
            two_j,
            two_m,
            beta,
            amplitudes,
        };
        let vectors = vec![
            mk(3, 3, None, vec(&[("000", 1.0)])),
            mk(3, 1, None, vec(&[("001", s3), ("010", s3), ("100", s3)])),
            mk(3, -1, None, vec(&[("110", s3), ("101", s3), ("011", s3)])),
            mk(3, -3, None, vec(&[("111", 1.0)])),
            mk(1, 1, Some(0), vec(&[("100", s2), ("010", -s2)])),
            mk(1, -1, Some(0), vec(&[("011", s2), ("101", -s2)])),
            mk(1, 1, Some(1), vec(&[("001", s23), ("010", -s6), ("100", -s6)])),
            mk(1, -1, Some(1), vec(&[("110", s23), ("101", -s6), ("011", -s6)])),
        ];
        Su2Basis { vectors }
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self) -> Matrix {
        let cols: Vec<Vec<C64>> = self.vectors.iter().map(|v| v.amplitudes.clone()).collect();
        Matrix::from_columns(&cols)
    }

    /// `max |V†V − I|`.
    pub fn orthonormality_residue(&self) -> f64 {
        let v = self.matrix();
        (&v.adjoint() * &v).max_abs_diff(&Matrix::identity(8))
    }
}

impl Default for Su2Basis {
    fn default() -> Self {
        Su2Basis::new()
    }
}

/// `U^{⊗3}` in the basis above.
pub fn block_form(basis: &Su2Basis, u: &Matrix) -> Matrix {
    let v = basis.matrix();
    &(&v.adjoint() * &u.kron_power(3)) * &v
}

/// Largest entry that breaks `U^{(3/2)} ⊕ U^{(1/2)} ⊗ I_2`: coupling between
/// `J` sectors, coupling between `β = 0` and `β = 1`, and the difference of
/// the two `β` blocks.
pub fn block_violation(basis: &Su2Basis, u: &Matrix) -> f64 {
    let b = block_form(basis, u);
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let cross_j = (i < 4) != (j < 4);
            let cross_beta = i >= 4 && j >= 4 && ((i < 6) != (j < 6));
            if cross_j || cross_beta {
                worst = worst.max(b[(i, j)].norm());
            }
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((b[(4 + i, 4 + j)] - b[(6 + i, 6 + j)]).norm());
        }
    }
    worst
}

/// Max violation over the identity and `trials` random rotations drawn from
/// one seeded stream.
pub fn block_structure_certificate(trials: usize, seed: u64) -> f64 {
    let basis = Su2Basis::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = block_violation(&basis, &Matrix::identity(2));
    for _ in 0..trials {
        let u = euler_su2(random_angles(&mut rng));
        worst = worst.max(block_violation(&basis, &u));
    }
    worst
}

/// Entries of the `J = 3/2` small-d matrix listed in closed form, indexed by
/// `(2m', 2m)`.
pub fn wigner_d_three_halves(two_mp: i8, two_m: i8, phi: f64) -> f64 {
    let (c, ch, sh) = (phi.cos(), (phi / 2.0).cos(), (phi / 2.0).sin());
    let base = |mp: i8, m: i8| -> Option<f64> {
        let r3 = 3f64.sqrt();
        Some(match (mp, m) {
            (3, 3) => (1.0 + c) / 2.0 * ch,
            (3, 1) => -r3 * (1.0 + c) / 2.0 * sh,
            (3, -1) => r3 * (1.0 - c) / 2.0 * ch,
            (3, -3) => -(1.0 - c) / 2.0 * sh,
            (1, 1) => (3.0 * c - 1.0) / 2.0 * ch,
            (1, -1) => -(3.0 * c + 1.0) / 2.0 * sh,
            _ => return None,
        })
    };
    // d_{m,m'} = (-1)^{m-m'} d_{m',m} = d_{-m',-m}
    let sign = |a: i8, b: i8| if ((a - b) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    base(two_mp, two_m)
        .or_else(|| base(two_m, two_mp).map(|v| sign(two_m, two_mp) * v))
        .or_else(|| base(-two_m, -two_mp))
        .or_else(|| base(-two_mp, -two_m).map(|v| sign(two_m, two_mp) * v))
        .expect("every (m', m) pair reaches a listed entry")
}

/// `⟨3/2, m'| U^{⊗3} |3/2, m⟩` from the closed form:
/// `e^{-i m' θ} d_{m',m}(φ) e^{-i m ψ}`.
pub fn three_halves_element(two_mp: i8, two_m: i8, a: EulerAngles) -> C64 {
    let phase = -(two_mp as f64) / 2.0 * a.theta - (two_m as f64) / 2.0 * a.psi;
    C64::from_polar(wigner_d_three_halves(two_mp, two_m, a.phi), phase)
}

/// Logical basis `|0_L⟩ = c1|½,½,0⟩ + c2|½,−½,0⟩`,
/// `|1_L⟩ = d1|½,½,1⟩ + d2|½,−½,1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalEncoding {
    pub c: [C64; 2],
    pub d: [C64; 2],
}

impl Default for LogicalEncoding {
    fn default() -> Self {
        let one = C64::new(1.0, 0.0);
        LogicalEncoding {
            c: [one, ZERO],
            d: [one, ZERO],
        }
    }
}

impl LogicalEncoding {
    pub fn new(c: [C64; 2], d: [C64; 2]) -> Result<Self> {
        for (name, v) in [("c", c), ("d", d)] {
            let n = v[0].norm_sqr() + v[1].norm_sqr();
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::BadNormalization(format!("|{name}1|² + |{name}2|² = {n}")));
            }
        }
        Ok(LogicalEncoding { c, d })
    }

    /// `α|0_L⟩ + β|1_L⟩` as an 8-amplitude vector.
    pub fn encode(&self, basis: &Su2Basis, logical: [C64; 2]) -> Result<Vec<C64>> {
        let n = logical[0].norm_sqr() + logical[1].norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::BadNormalization(format!("logical state norm² {n}")));
        }
        let mut out = vec![ZERO; 8];
        let terms = [
            (4, logical[0] * self.c[0]),
            (5, logical[0] * self.c[1]),
            (6, logical[1] * self.d[0]),
            (7, logical[1] * self.d[1]),
        ];
        for (idx, coeff) in terms {
            for (o, a) in out.iter_mut().zip(&basis.vectors[idx].amplitudes) {
                *o += coeff * a;
            }
        }
        Ok(out)
    }
}

/// Reduced state of the `β` register (2×2) and the weight outside `J = 1/2`.
pub fn beta_register(basis: &Su2Basis, state: &[C64]) -> (Matrix, f64) {
    let coord = |i: usize| -> C64 {
        basis.vectors[i]
            .amplitudes
            .iter()
            .zip(state)
            .map(|(b, s)| b.conj() * s)
            .sum()
    };
    // a[M][β]
    let a = [[coord(4), coord(6)], [coord(5), coord(7)]];
    let mut rho = Matrix::zeros(2, 2);
    for row in &a {
        for b in 0..2 {
            for bp in 0..2 {
                rho[(b, bp)] += row[b] * row[bp].conj();
            }
        }
    }
    let kept: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    (rho, (1.0 - kept).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalRoundtrip {
    /// `⟨ψ_L|ρ_β|ψ_L⟩` after the channel.
    pub fidelity: f64,
    /// `max |ρ_β(after) − ρ_β(before)|`: zero for every `U`, whatever `c, d`.
    pub invariance: f64,
    /// Weight that left the `J = 1/2` sector.
    pub leakage: f64,
}

/// Encode, apply `U^{⊗3}`, read out the `β` register. With `c ≠ d` the
/// logical qubit is correlated with `M`, so `fidelity < 1` already without
/// noise; `invariance` is the channel-independent statement.
pub fn logical_qubit_roundtrip(
    enc: &LogicalEncoding,
    u: &Matrix,
    logical: [C64; 2],
) -> Result<LogicalRoundtrip> {
    let basis = Su2Basis::new();
    let sent = enc.encode(&basis, logical)?;
    let received = u.kron_power(3).apply(&sent);
    let (before, _) = beta_register(&basis, &sent);
    let (after, leakage) = beta_register(&basis, &received);
    let mut fidelity = ZERO;
    for b in 0..2 {
        for bp in 0..2 {
            fidelity += logical[b].conj() * after[(b, bp)] * logical[bp];
        }
    }
    Ok(LogicalRoundtrip {
        fidelity: fidelity.re,
        invariance: after.max_abs_diff(&before),
        leakage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerSpot {
    pub phi: f64,
    pub computed: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Report {
    pub trials: usize,
    pub seed: u64,
    pub encoding: LogicalEncoding,
    pub basis_residue: f64,
    pub max_violation: f64,
    pub wigner: WignerSpot,
    pub min_roundtrip_fidelity: f64,
    pub max_invariance_residue: f64,
    pub rate: Rate,
}

pub fn su2_demo(trials: usize, seed: u64) -> Result<Su2Report> {
    su2_demo_with(trials, seed, &LogicalEncoding::default())
}

pub fn su2_demo_with(trials: usize, seed: u64, enc: &LogicalEncoding) -> Result<Su2Report> {
    let basis = Su2Basis::new();
    let max_violation = block_structure_certificate(trials, seed);

    let phi = PI / 3.0;
    let a = EulerAngles {
        theta: 0.0,
        phi,
        psi: 0.0,
    };
    let computed = block_form(&basis, &euler_su2(a))[(0, 0)].re;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5u64);
    let mut min_fid: f64 = 1.0;
    let mut max_inv: f64 = 0.0;
    for _ in 0..trials {
        let u = euler_su2(random_angles(&mut rng));
        let v = crate::linalg::random_state_vector(2, &mut rng);
        let rt = logical_qubit_roundtrip(enc, &u, [v[0], v[1]])?;
        min_fid = min_fid.min(rt.fidelity);
        max_inv = max_inv.max(rt.invariance);
    }
    Ok(Su2Report {
        trials,
        seed,
        encoding: *enc,
        basis_residue: basis.orthonormality_residue(),
        max_violation,
        wigner: WignerSpot {
            phi,
            computed,
            closed_form: (1.0 + phi.cos()) / 2.0 * (phi / 2.0).cos(),
        },
        min_roundtrip_fidelity: min_fid,
        max_invariance_residue: max_inv,
        rate: Rate::new(1, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angles(theta: f64, phi: f64, psi: f64) -> EulerAngles {
        EulerAngles { theta, phi, psi }
    }

    #[test]
    fn euler_special_cases() {
        let id = euler_su2(angles(0.0, 0.0, 0.0));
        assert!(id.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let diag = euler_su2(angles(0.7, 0.0, 0.0));
        assert!(diag.is_diagonal(1e-15));
        assert!((diag[(0, 0)] - C64::from_polar(1.0, -0.35)).norm() < 1e-15);
    }

    #[test]
    fn determinant_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let u = euler_su2(random_angles(&mut rng));
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn basis_is_orthonormal_with_exact_squares() {
        let basis = Su2Basis::new();
        assert!(basis.orthonormality_residue() < 1e-12);
        let allowed = [0.0, 1.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0 / 6.0];
        for v in &basis.vectors {
            for a in &v.amplitudes {
                assert_eq!(a.im, 0.0);
                let sq = a.re * a.re;
                assert!(allowed.iter().any(|x| (sq - x).abs() < 1e-15), "{sq}");
            }
        }
    }

    #[test]
    fn basis_labels_match_jz() {
        // J_z is diagonal in the computational basis: (#zeros - #ones)/2
        let basis = Su2Basis::new();
        for v in &basis.vectors {
            for (idx, a) in v.amplitudes.iter().enumerate() {
                if a.norm() > 0.0 {
                    let ones = idx.count_ones() as i8;
                    assert_eq!(3 - 2 * ones, v.two_m);
                }
            }
        }
    }

    #[test]
    fn identity_has_no_violation() {
        assert!(block_violation(&Su2Basis::new(), &Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn random_rotations_keep_block_structure() {
        assert!(block_structure_certificate(50, 11) <= 1e-10);
    }

    #[test]
    fn non_su2_noise_breaks_structure() {
        // a two-qubit-correlated operator does not respect the sectors
        let basis = Su2Basis::new();
        let v = basis.matrix();
        let mut u3 = Matrix::identity(8);
        u3[(0, 0)] = ZERO;
        u3[(1, 1)] = ZERO;
        u3[(0, 1)] = C64::new(1.0, 0.0);
        u3[(1, 0)] = C64::new(1.0, 0.0);
        let b = &(&v.adjoint() * &u3) * &v;
        assert!(b[(0, 4)].norm() + b[(0, 6)].norm() + b[(1, 4)].norm() + b[(1, 6)].norm() > 0.1);
    }

    #[test]
    fn wigner_spot_value() {
        let phi = PI / 3.0;
        let b = block_form(&Su2Basis::new(), &euler_su2(angles(0.0, phi, 0.0)));
        let closed = 0.75 * (PI / 6.0).cos();
        assert!((b[(0, 0)].re - closed).abs() < 1e-12);
        assert!((wigner_d_three_halves(3, 3, phi) - closed).abs() < 1e-15);
    }

    #[test]
    fn three_halves_block_matches_closed_form() {
        let basis = Su2Basis::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ms = [3i8, 1, -1, -3];
        for _ in 0..10 {
            let a = random_angles(&mut rng);
            let b = block_form(&basis, &euler_su2(a));
            for (i, &mp) in ms.iter().enumerate() {
                for (j, &m) in ms.iter().enumerate() {
                    let want = three_halves_element(mp, m, a);
                    assert!((b[(i, j)] - want).norm() < 1e-12, "({mp},{m})");
                }
            }
        }
    }

    #[test]
    fn logical_roundtrip() {
        let enc = LogicalEncoding::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let u = euler_su2(random_angles(&mut rng));
            let v = crate::linalg::random_state_vector(2, &mut rng);
            let rt = logical_qubit_roundtrip(&enc, &u, [v[0], v[1]]).unwrap();
            assert!(rt.fidelity >= 1.0 - 1e-9);
            assert!(rt.leakage < 1e-12);
        }
    }

    #[test]
    fn unequal_gauge_states_still_invariant() {
        let s = 0.5f64.sqrt();
        let enc = LogicalEncoding::new(
            [C64::new(s, 0.0), C64::new(0.0, s)],
            [C64::new(1.0, 0.0), ZERO],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let logical = [C64::new(s, 0.0), C64::new(s, 0.0)];
        let base = logical_qubit_roundtrip(&enc, &Matrix::identity(2), logical).unwrap();
        for _ in 0..10 {
            let u = euler_su2(random_angles(&mut rng));
            let rt = logical_qubit_roundtrip(&enc, &u, logical).unwrap();
            assert!(rt.invariance < 1e-12);
            assert!((rt.fidelity - base.fidelity).abs() < 1e-12);
        }
        assert!(base.fidelity < 1.0 - 1e-3);
    }

    #[test]
    fn bad_coefficients_rejected() {
        let err = LogicalEncoding::new([C64::new(1.0, 0.0), C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]);
        assert!(matches!(err, Err(Error::BadNormalization(_))));
    }

    #[test]
    fn demo_report() {
        let r = su2_demo(50, 11).unwrap();
        assert!(r.max_violation <= 1e-10);
        assert!((r.wigner.computed - r.wigner.closed_form).abs() < 1e-12);
        assert!(r.min_roundtrip_fidelity >= 1.0 - 1e-9);
        assert_eq!((r.rate.numerator, r.rate.denominator), (1, 3));
    }
}

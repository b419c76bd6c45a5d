//! Lab-frame and rotated-frame Hamiltonians of the driven ring.
//!
//! ```text
//! H_spin = Σ_k [ Ω_k σ_x^(k) + Δ P_k + β P_k P_(k+1) ]          (lab)
//! U† H_spin U = H_xy + H_1 + H_2 + βL/4                          (rotated)
//! H_xy = Σ_k [ Ω_k σ_z^(k) + (β/4)(σ_+^(k) σ_-^(k+1) + h.c.) ]
//! H_1  = (Δ/2) Σ_k (1 − σ_x^(k))
//! H_2  = (β/4) Σ_k [ σ_+^(k) σ_+^(k+1) + σ_-^(k) σ_-^(k+1) − 2σ_x^(k) ]
//! ```
//!
//! Site `L + 1` is identified with site 1. Sums run over every site `k`, so
//! for `L = 2` the bond between the two sites is counted twice, exactly as the
//! ring sum prescribes.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::basis::{sigma_z_value, site_mask, Frame};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::params::SystemParams;

/// Largest ring handled by the exact-diagonalization builders by default.
pub const DEFAULT_ED_CAP: usize = 14;

/// Largest ring for which fully dense operators (the frame rotation) are
/// materialized.
pub const DENSE_CAP: usize = 10;

pub(crate) fn check_cap(what: &'static str, sites: usize, cap: usize) -> Result<()> {
    if sites > cap {
        return Err(Error::Resource {
            what,
            requested: sites,
            cap,
        });
    }
    Ok(())
}

/// Ring neighbour of site `k` (1-based).
#[inline]
pub fn next_site(k: usize, sites: usize) -> usize {
    k % sites + 1
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Single-site operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `σ_+ = |1⟩⟨0|`
    Plus,
    /// `σ_- = |0⟩⟨1|`
    Minus,
    /// `(1 + σ_z)/2`, the projector on bit value 1.
    Up,
}

/// `σ^(k)` acting on an `sites`-site ring.
pub fn local_operator(sites: usize, frame: Frame, k: usize, op: Pauli) -> OperatorMatrix {
    let dim = 1usize << sites;
    let m = site_mask(k);
    let entries = (0..dim).filter_map(move |i| {
        let up = i & m != 0;
        match op {
            Pauli::X => Some((i ^ m, i, re(1.0))),
            // σ_y|1⟩ = i|0⟩, σ_y|0⟩ = −i|1⟩
            Pauli::Y => Some((i ^ m, i, if up { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) })),
            Pauli::Z => Some((i, i, re(sigma_z_value(i, k)))),
            Pauli::Plus => (!up).then_some((i | m, i, re(1.0))),
            Pauli::Minus => up.then_some((i & !m, i, re(1.0))),
            Pauli::Up => up.then_some((i, i, re(1.0))),
        }
    });
    OperatorMatrix::from_triplets(dim, frame, entries)
}

/// `H_spin` in the lab frame with the default cap.
pub fn build_h_spin(params: &SystemParams) -> Result<OperatorMatrix> {
    build_h_spin_capped(params, DEFAULT_ED_CAP)
}

pub fn build_h_spin_capped(params: &SystemParams, cap: usize) -> Result<OperatorMatrix> {
    let l = params.sites();
    check_cap("H_spin", l, cap)?;
    let dim = 1usize << l;
    let rabi = params.rabi_frequencies();
    let (delta, beta) = (params.delta(), params.beta());
    let mut entries = Vec::with_capacity(dim * (l + 1));
    for i in 0..dim {
        let mut diag = 0.0;
        for k in 1..=l {
            let occupied = i & site_mask(k) != 0;
            if occupied {
                diag += delta;
                if i & site_mask(next_site(k, l)) != 0 {
                    diag += beta;
                }
            }
            if rabi[k - 1] != 0.0 {
                entries.push((i ^ site_mask(k), i, re(rabi[k - 1])));
            }
        }
        entries.push((i, i, re(diag)));
    }
    Ok(OperatorMatrix::from_triplets(dim, Frame::Lab, entries).flag_hermitian_unchecked())
}

/// The rotated-frame decomposition `U† H_spin U = h_xy + h1 + h2 + shift·1`.
#[derive(Clone, Debug)]
pub struct RotatedParts {
    pub h_xy: OperatorMatrix,
    pub h1: OperatorMatrix,
    pub h2: OperatorMatrix,
    /// `βL/4`.
    pub shift: f64,
}

impl RotatedParts {
    /// `h_xy + h1 + h2 + shift`.
    pub fn total(&self) -> Result<OperatorMatrix> {
        let id = OperatorMatrix::identity(self.h_xy.dim(), Frame::Rotated);
        self.h_xy.add(&self.h1)?.add(&self.h2)?.add_scaled(&id, re(self.shift))
    }
}

pub fn build_rotated_parts(params: &SystemParams) -> Result<RotatedParts> {
    build_rotated_parts_capped(params, DEFAULT_ED_CAP)
}

pub fn build_rotated_parts_capped(params: &SystemParams, cap: usize) -> Result<RotatedParts> {
    let l = params.sites();
    check_cap("rotated Hamiltonian", l, cap)?;
    Ok(RotatedParts {
        h_xy: build_h_xy(params),
        h1: build_h1(l, params.delta()),
        h2: build_h2(l, params.beta()),
        shift: params.beta() * l as f64 / 4.0,
    })
}

/// `H_xy` alone (rotated frame). Conserves the number of `|+⟩` sites.
pub fn build_h_xy(params: &SystemParams) -> OperatorMatrix {
    let l = params.sites();
    let dim = 1usize << l;
    let rabi = params.rabi_frequencies();
    let hop = params.beta() / 4.0;
    let mut entries = Vec::with_capacity(dim * (l + 1));
    for i in 0..dim {
        let diag: f64 = (1..=l).map(|k| rabi[k - 1] * sigma_z_value(i, k)).sum();
        entries.push((i, i, re(diag)));
        if hop != 0.0 {
            for k in 1..=l {
                let pair = site_mask(k) | site_mask(next_site(k, l));
                let bits = i & pair;
                // σ_+σ_- + σ_-σ_+ exchanges the two bits when they differ.
                if bits != 0 && bits != pair {
                    entries.push((i ^ pair, i, re(hop)));
                }
            }
        }
    }
    OperatorMatrix::from_triplets(dim, Frame::Rotated, entries).flag_hermitian_unchecked()
}

fn build_h1(l: usize, delta: f64) -> OperatorMatrix {
    let dim = 1usize << l;
    if delta == 0.0 {
        return OperatorMatrix::zeros(dim, Frame::Rotated).flag_hermitian_unchecked();
    }
    let half = delta / 2.0;
    let entries = (0..dim).flat_map(move |i| {
        std::iter::once((i, i, re(half * l as f64))).chain((1..=l).map(move |k| (i ^ site_mask(k), i, re(-half))))
    });
    OperatorMatrix::from_triplets(dim, Frame::Rotated, entries).flag_hermitian_unchecked()
}

fn build_h2(l: usize, beta: f64) -> OperatorMatrix {
    let dim = 1usize << l;
    if beta == 0.0 {
        return OperatorMatrix::zeros(dim, Frame::Rotated).flag_hermitian_unchecked();
    }
    let q = beta / 4.0;
    let mut entries = Vec::with_capacity(dim * 2 * l);
    for i in 0..dim {
        for k in 1..=l {
            let pair = site_mask(k) | site_mask(next_site(k, l));
            let bits = i & pair;
            // σ_+σ_+ + σ_-σ_- flips both bits when they agree.
            if bits == 0 || bits == pair {
                entries.push((i ^ pair, i, re(q)));
            }
            entries.push((i ^ site_mask(k), i, re(-2.0 * q)));
        }
    }
    OperatorMatrix::from_triplets(dim, Frame::Rotated, entries).flag_hermitian_unchecked()
}

/// `U = ∏_k exp(−i(π/4)σ_y^(k))` as a lab-frame matrix. Dense, so limited to
/// [`DENSE_CAP`] sites; use [`StateVector::to_rotated`](crate::basis::StateVector::to_rotated)
/// for states of larger rings.
pub fn rotation_unitary(sites: usize) -> Result<OperatorMatrix> {
    check_cap("rotation unitary", sites, DENSE_CAP)?;
    let dim = 1usize << sites;
    let c = FRAC_1_SQRT_2;
    // single-site u[out][in]
    let u = [[c, c], [-c, c]];
    let entries = (0..dim).flat_map(move |i| {
        (0..dim).map(move |j| {
            let v: f64 = (1..=sites)
                .map(|k| {
                    let bo = usize::from(i & site_mask(k) != 0);
                    let bi = usize::from(j & site_mask(k) != 0);
                    u[bo][bi]
                })
                .product();
            (i, j, re(v))
        })
    });
    Ok(OperatorMatrix::from_triplets(dim, Frame::Lab, entries))
}

/// Frobenius norm of `U† H_spin U − (h_xy + h1 + h2 + βL/4)`, formed with
/// the dense rotation matrix.
pub fn frame_identity_residual(params: &SystemParams) -> Result<f64> {
    let u = rotation_unitary(params.sites())?;
    let rotated = build_h_spin(params)?.to_rotated_frame(&u)?;
    let diff = rotated.sub(&build_rotated_parts(params)?.total()?)?;
    Ok(diff.triplets().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::StateVector;

    fn sorted_eigs(m: &OperatorMatrix) -> Vec<f64> {
        m.eigenvalues().unwrap()
    }

    fn assert_spectrum(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn two_site_ring_counts_the_bond_twice() {
        let p = SystemParams::clean(2, 1.0, 0.0, 0.0).unwrap();
        assert_spectrum(&sorted_eigs(&build_h_spin(&p).unwrap()), &[0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn pure_detuning_counts_rydberg_atoms() {
        let p = SystemParams::clean(3, 0.0, 0.0, 1.0).unwrap();
        assert_spectrum(
            &sorted_eigs(&build_h_spin(&p).unwrap()),
            &[0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0],
        );
    }

    #[test]
    fn zero_prefactors_vanish() {
        let p = SystemParams::clean(4, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(build_rotated_parts(&p).unwrap().h1.nnz(), 0);
        let p = SystemParams::clean(4, 0.0, 2.0, 0.7).unwrap();
        let parts = build_rotated_parts(&p).unwrap();
        assert_eq!(parts.h2.nnz(), 0);
        assert!(parts.h_xy.triplets().all(|(i, j, _)| i == j));
    }

    #[test]
    fn cap_is_enforced() {
        let p = SystemParams::clean(15, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(build_h_spin(&p), Err(Error::Resource { .. })));
        assert!(matches!(rotation_unitary(11), Err(Error::Resource { .. })));
    }

    #[test]
    fn single_site_rotation() {
        let u = rotation_unitary(1).unwrap();
        let up = u.apply(&StateVector::no_rydberg(1)).unwrap();
        assert!((up.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((up.amplitudes()[1].re + FRAC_1_SQRT_2).abs() < 1e-15);

        let id = OperatorMatrix::identity(2, Frame::Lab);
        let u2 = u.matmul(&u).unwrap();
        assert!(u2.max_abs_diff(&id).unwrap() > 0.5);
        let u4 = u2.matmul(&u2).unwrap();
        // U⁴ = exp(−iπσ_y) = −1
        assert!(u4.add(&id).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn frame_identity_holds_for_a_disordered_ring() {
        let p = SystemParams::new(5, 1.3, 0.7, -0.4, vec![1, 3, 2, 5, 4]).unwrap();
        assert!(frame_identity_residual(&p).unwrap() < 1e-12);
        let two = SystemParams::clean(2, 0.9, 1.1, 0.3).unwrap();
        assert!(frame_identity_residual(&two).unwrap() < 1e-12);
    }

    #[test]
    fn unitary_matches_state_rotation() {
        let u = rotation_unitary(3).unwrap();
        let phi = StateVector::basis_state(3, Frame::Lab, 5);
        let via_matrix = u.adjoint().apply(&phi).unwrap();
        let via_sites = phi.to_rotated();
        for (a, b) in via_matrix.amplitudes().iter().zip(via_sites.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}

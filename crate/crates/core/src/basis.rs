//! Basis and frame conventions shared by every matrix and state in the crate.
//!
//! Computational basis states of an `L`-site ring are indexed by integers in
//! `0..2^L`. Site `k` (1-based, as in the physics notation) lives in bit
//! `k - 1`. The meaning of a bit value depends on the frame:
//!
//! | frame     | bit 0 | bit 1 | `σ_z` on bit 0 / bit 1 |
//! |-----------|-------|-------|------------------------|
//! | `Lab`     | `|P⟩` | `|R⟩` | `-1` / `+1`            |
//! | `Rotated` | `|−⟩` | `|+⟩` | `-1` / `+1`            |
//!
//! The two frames are related by `U = ∏_k exp(-i(π/4)σ_y^(k))`: a rotated-frame
//! vector `φ` represents the lab-frame vector `Uφ`. With the Pauli matrices
//! written in the (bit 1, bit 0) = (up, down) order, the single-site rotation
//! acts as
//!
//! ```text
//! U|P⟩ = (|P⟩ − |R⟩)/√2        U|R⟩ = (|P⟩ + |R⟩)/√2
//! ```
//!
//! so the rotated-frame states map to `|±⟩ ↦ (|P⟩ ± |R⟩)/√2` in the lab. The
//! sign of `U|P⟩` is a convention; spectra and populations do not depend on it.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which single-site basis the computational basis refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// `|P⟩` (bit 0) and `|R⟩` (bit 1).
    Lab,
    /// `|−⟩` (bit 0) and `|+⟩` (bit 1), eigenstates of the rotated `σ_z`.
    Rotated,
}

impl Frame {
    pub(crate) fn expect(self, found: Frame) -> Result<()> {
        if self == found {
            Ok(())
        } else {
            Err(Error::FrameMismatch { expected: self, found })
        }
    }
}

/// Bit mask of site `k` (1-based).
#[inline]
pub fn site_mask(k: usize) -> usize {
    1 << (k - 1)
}

/// Value of `σ_z^(k)` on basis state `index`.
#[inline]
pub fn sigma_z_value(index: usize, k: usize) -> f64 {
    if index & site_mask(k) != 0 {
        1.0
    } else {
        -1.0
    }
}

/// Number of set bits: Rydberg atoms in the lab frame, fermions in the
/// rotated frame.
#[inline]
pub fn excitation_count(index: usize) -> usize {
    index.count_ones() as usize
}

/// A normalized-by-construction state of an `L`-site ring tagged with its frame.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    sites: usize,
    frame: Frame,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(sites: usize, frame: Frame, amps: Vec<C64>) -> Result<Self> {
        let dim = 1usize << sites;
        if amps.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(StateVector { sites, frame, amps })
    }

    pub fn basis_state(sites: usize, frame: Frame, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << sites];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { sites, frame, amps }
    }

    /// `|0⟩ = ∏_k |P⟩_k`: no Rydberg atoms, lab frame.
    pub fn no_rydberg(sites: usize) -> Self {
        Self::basis_state(sites, Frame::Lab, 0)
    }

    /// `|G⟩ = ∏_k |−⟩_k`: the fermionic vacuum, rotated frame.
    pub fn fermion_vacuum(sites: usize) -> Self {
        Self::basis_state(sites, Frame::Rotated, 0)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::validation("cannot normalize the zero vector"));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        self.frame.expect(other.frame)?;
        if self.sites != other.sites {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest elementwise difference, for equality checks up to tolerance.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Express the state in the rotated frame (`φ = U†ψ`). No-op if already rotated.
    pub fn to_rotated(&self) -> StateVector {
        match self.frame {
            Frame::Rotated => self.clone(),
            Frame::Lab => self.rotate_sites(Frame::Rotated, -1.0),
        }
    }

    /// Express the state in the lab frame (`ψ = Uφ`). No-op if already lab.
    pub fn to_lab(&self) -> StateVector {
        match self.frame {
            Frame::Lab => self.clone(),
            Frame::Rotated => self.rotate_sites(Frame::Lab, 1.0),
        }
    }

    // Applies the single-site rotation [[c, s·sign], [-s·sign, c]] on every site
    // (row = output bit). sign = +1 is U, sign = -1 is U†.
    fn rotate_sites(&self, target: Frame, sign: f64) -> StateVector {
        let c = FRAC_1_SQRT_2;
        let s = FRAC_1_SQRT_2 * sign;
        let mut amps = self.amps.clone();
        for k in 1..=self.sites {
            let m = site_mask(k);
            for i in 0..amps.len() {
                if i & m == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | m];
                    amps[i] = a0 * c + a1 * s;
                    amps[i | m] = -a0 * s + a1 * c;
                }
            }
        }
        StateVector {
            sites: self.sites,
            frame: target,
            amps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip_is_identity() {
        let psi = StateVector::from_amplitudes(
            3,
            Frame::Lab,
            (0..8).map(|i| C64::new(i as f64, 0.5 - i as f64)).collect(),
        )
        .unwrap()
        .normalized()
        .unwrap();
        let back = psi.to_rotated().to_lab();
        assert!(psi.max_abs_diff(&back).unwrap() < 1e-14);
    }

    #[test]
    fn vacuum_maps_to_minus_superposition() {
        let lab = StateVector::fermion_vacuum(1).to_lab();
        let a = lab.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[1].re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn no_rydberg_overlap_with_vacuum_is_two_to_minus_l() {
        for l in 1..=6 {
            let g = StateVector::fermion_vacuum(l).to_lab();
            let p = StateVector::no_rydberg(l).overlap(&g).unwrap();
            assert!((p - 0.5f64.powi(l as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn cross_frame_inner_product_is_rejected() {
        let a = StateVector::no_rydberg(2);
        let b = StateVector::fermion_vacuum(2);
        assert!(matches!(a.inner(&b), Err(Error::FrameMismatch { .. })));
    }
}

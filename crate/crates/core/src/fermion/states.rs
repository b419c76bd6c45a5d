//! Fully symmetric few-fermion eigenstates of `H_xy`, built directly as
//! rotated-frame amplitude vectors.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{excitation_energy, ExcitationLabel, Parity};
use crate::basis::{excitation_count, Frame, StateVector};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Which symmetric state to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetricLabel {
    /// `|1⟩ = η†_(o,L)|G⟩`, the spin wave.
    One,
    /// `|2_n⟩ = η†_(e,L−n+1) η†_(e,n)|G⟩`, `1 ≤ n ≤ ⌊L/2⌋`.
    Two(usize),
    /// `|3_lpq⟩` from odd modes with `l + p + q ∈ {L, 2L}`.
    Three(usize, usize, usize),
}

#[derive(Clone, Debug)]
pub struct SymmetricState {
    pub label: SymmetricLabel,
    /// Rotated frame, unit norm.
    pub vector: StateVector,
    pub energy_above_ground: f64,
}

/// Single-particle orbital `φ(k) = L^(−1/2) exp(iα_n k)`, `k = 1..=L`.
pub fn mode_orbital(sites: usize, parity: Parity, n: usize) -> Vec<C64> {
    let alpha = parity.momentum(n, sites);
    let norm = 1.0 / (sites as f64).sqrt();
    (1..=sites).map(|k| C64::from_polar(norm, alpha * k as f64)).collect()
}

/// `a†_1 a†_2 … a†_N |G⟩` for fermion orbitals `a†_i = Σ_k φ_i(k) c†_k`.
///
/// Creation operators in ascending site order produce `+|config⟩`, so the
/// amplitude of a configuration with occupied sites `s_1 < … < s_N` is
/// `det[φ_i(s_j)]`.
pub fn slater_state(sites: usize, orbitals: &[Vec<C64>]) -> Result<StateVector> {
    let n = orbitals.len();
    if orbitals.iter().any(|o| o.len() != sites) {
        return Err(Error::validation("orbital length differs from ring size"));
    }
    let dim = 1usize << sites;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (i, amp) in amps.iter_mut().enumerate() {
        if excitation_count(i) != n {
            continue;
        }
        if n == 0 {
            *amp = C64::new(1.0, 0.0);
            continue;
        }
        let occupied: Vec<usize> = (0..sites).filter(|b| i >> b & 1 == 1).collect();
        let m = DMatrix::from_fn(n, n, |r, c| orbitals[r][occupied[c]]);
        *amp = m.determinant();
    }
    StateVector::from_amplitudes(sites, Frame::Rotated, amps)
}

/// Odd-mode partner `L − n`, with index 0 identified with `L`.
fn odd_partner(n: usize, sites: usize) -> usize {
    if n == sites {
        sites
    } else {
        sites - n
    }
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

fn three_partner(t: [usize; 3], sites: usize) -> [usize; 3] {
    sorted3(t.map(|n| odd_partner(n, sites)))
}

/// Canonical labels `(l, p, q)` of the symmetric three-fermion states.
///
/// Triples of distinct odd-mode indices in `1..=L` summing to `L` or `2L`;
/// a triple and its partner `(L−l, L−p, L−q)` describe the same state and
/// only the lexicographically smaller one is kept.
pub fn three_fermion_labels(sites: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for l in 1..=sites {
        for p in l + 1..=sites {
            for q in p + 1..=sites {
                let s = l + p + q;
                if s != sites && s != 2 * sites {
                    continue;
                }
                let t = [l, p, q];
                if t <= three_partner(t, sites) {
                    out.push((l, p, q));
                }
            }
        }
    }
    out
}

fn check_three(sites: usize, t: [usize; 3]) -> Result<()> {
    let [l, p, q] = t;
    if t.iter().any(|&n| n == 0 || n > sites) {
        return Err(Error::validation(format!(
            "three-fermion indices must lie in 1..={sites}"
        )));
    }
    if l == p || p == q || l == q {
        return Err(Error::validation("three-fermion indices must be distinct"));
    }
    let s = l + p + q;
    if s != sites && s != 2 * sites {
        return Err(Error::validation(format!(
            "three-fermion indices must sum to {sites} or {}, got {s}",
            2 * sites
        )));
    }
    Ok(())
}

pub fn build_symmetric_state(label: SymmetricLabel, params: &SystemParams) -> Result<SymmetricState> {
    params.clean_rabi()?;
    let l = params.sites();
    let orb = |parity, n| mode_orbital(l, parity, n);
    let (vector, excitation) = match label {
        SymmetricLabel::One => (
            slater_state(l, &[orb(Parity::Odd, l)])?,
            ExcitationLabel::new(Parity::Odd, [l])?,
        ),
        SymmetricLabel::Two(n) => {
            if n == 0 || n > l / 2 {
                return Err(Error::validation(format!("|2_n⟩ needs 1 ≤ n ≤ {}, got {n}", l / 2)));
            }
            let a = l - n + 1;
            (
                slater_state(l, &[orb(Parity::Even, a), orb(Parity::Even, n)])?,
                ExcitationLabel::new(Parity::Even, [a, n])?,
            )
        }
        SymmetricLabel::Three(a, b, c) => {
            let t = [a, b, c];
            check_three(l, t)?;
            let direct = slater_state(l, &t.map(|n| orb(Parity::Odd, n)))?;
            let vector = if sorted3(t) == three_partner(t, l) {
                direct
            } else {
                let mirrored = slater_state(l, &t.map(|n| orb(Parity::Odd, odd_partner(n, l))))?;
                let amps = direct
                    .amplitudes()
                    .iter()
                    .zip(mirrored.amplitudes())
                    .map(|(x, y)| (x - y) * std::f64::consts::FRAC_1_SQRT_2)
                    .collect();
                StateVector::from_amplitudes(l, Frame::Rotated, amps)?
            };
            (vector, ExcitationLabel::new(Parity::Odd, t)?)
        }
    };
    Ok(SymmetricState {
        label,
        vector,
        energy_above_ground: excitation_energy(&excitation, params)?,
    })
}

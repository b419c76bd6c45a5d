//! Free-fermion solution of `H_xy` in the strong-driving limit.
//!
//! After the Jordan-Wigner transformation the ring is a tight-binding chain
//! whose boundary condition depends on fermion-number parity: odd states see
//! periodic momenta `α = 2nπ/L`, even states antiperiodic momenta
//! `α = 2(n − ½)π/L`. Every mode costs `2Ω + (β/2)cos α` above the vacuum
//! `|G⟩`, whose energy is `−LΩ`.

mod jw;
mod oracle;
mod states;

pub use jw::{
    annihilation, boundary_term, eta_dagger, jw_operators, number_operator, parity_operator, string_free_hamiltonian,
    JW_CAP,
};
pub use oracle::{free_fermion_spectrum, validate_against_ed, EdOracleReport, ORACLE_TOL};
pub use states::{
    build_symmetric_state, mode_orbital, slater_state, three_fermion_labels, SymmetricLabel, SymmetricState,
};

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Fermion-number parity sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Odd fermion number, periodic momenta `2nπ/L`.
    Odd,
    /// Even fermion number, antiperiodic momenta `2(n − ½)π/L`.
    Even,
}

impl Parity {
    pub fn of_count(count: usize) -> Parity {
        if count % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Momentum of mode `n` (1-based) on an `sites`-site ring.
    pub fn momentum(self, n: usize, sites: usize) -> f64 {
        let n = n as f64;
        match self {
            Parity::Odd => 2.0 * n * PI / sites as f64,
            Parity::Even => 2.0 * (n - 0.5) * PI / sites as f64,
        }
    }
}

/// A single fermionic eigenmode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub parity: Parity,
    pub n: usize,
    pub alpha: f64,
    pub energy: f64,
}

/// All `L` modes of one parity sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    pub parity: Parity,
    pub sites: usize,
    pub omega: f64,
    pub beta: f64,
    pub modes: Vec<Mode>,
    /// `−LΩ`.
    pub ground_energy: f64,
}

impl ModeSet {
    pub fn mode(&self, n: usize) -> &Mode {
        &self.modes[n - 1]
    }
}

/// Single-mode excitation energy `2Ω + (β/2)cos α`.
pub fn mode_energy(omega: f64, beta: f64, alpha: f64) -> f64 {
    2.0 * omega + 0.5 * beta * alpha.cos()
}

pub fn mode_set(params: &SystemParams, parity: Parity) -> Result<ModeSet> {
    let omega = params.clean_rabi()?;
    let l = params.sites();
    let beta = params.beta();
    let modes = (1..=l)
        .map(|n| {
            let alpha = parity.momentum(n, l);
            Mode {
                parity,
                n,
                alpha,
                energy: mode_energy(omega, beta, alpha),
            }
        })
        .collect();
    Ok(ModeSet {
        parity,
        sites: l,
        omega,
        beta,
        modes,
        ground_energy: -(l as f64) * omega,
    })
}

/// A set of occupied modes of one parity sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcitationLabel {
    parity: Parity,
    modes: BTreeSet<usize>,
}

impl ExcitationLabel {
    /// Fails if the number of modes does not match the sector parity.
    pub fn new(parity: Parity, modes: impl IntoIterator<Item = usize>) -> Result<Self> {
        let modes: BTreeSet<usize> = modes.into_iter().collect();
        if Parity::of_count(modes.len()) != parity {
            return Err(Error::validation(format!(
                "{} fermions cannot live in the {parity:?} sector",
                modes.len()
            )));
        }
        if modes.contains(&0) {
            return Err(Error::validation("mode indices start at 1"));
        }
        Ok(ExcitationLabel { parity, modes })
    }

    /// The fermionic vacuum `|G⟩`.
    pub fn vacuum() -> Self {
        ExcitationLabel {
            parity: Parity::Even,
            modes: BTreeSet::new(),
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.modes.iter().copied()
    }

    pub fn fermion_count(&self) -> usize {
        self.modes.len()
    }
}

/// Energy of the labelled state above `|G⟩`.
pub fn excitation_energy(label: &ExcitationLabel, params: &SystemParams) -> Result<f64> {
    let set = mode_set(params, label.parity)?;
    label
        .modes()
        .map(|n| {
            if n > set.sites {
                Err(Error::validation(format!("mode {n} exceeds ring size {}", set.sites)))
            } else {
                Ok(set.mode(n).energy)
            }
        })
        .sum()
}

//! The one-fermion problem with site-dependent Rabi frequencies: a
//! tight-binding ring with random on-site energies `2Ω_k`.

use nalgebra::DMatrix;

use super::Realization;
use crate::basis::{site_mask, Frame, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{eigh_real, Eigh};
use crate::spin::{build_h_xy, check_cap, local_operator, next_site, Pauli};

/// Largest ring for the many-body cross-check.
pub const ED_CHECK_CAP: usize = 10;

/// `h_kk = 2Ω_k`, `h_(k,k+1) = β/4` around the ring.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleFermionMatrix {
    pub h: DMatrix<f64>,
}

impl SingleFermionMatrix {
    pub fn new(omega_k: &[f64], beta: f64) -> Result<Self> {
        let l = omega_k.len();
        if l < 2 {
            return Err(Error::validation("ring needs at least 2 sites"));
        }
        let mut h = DMatrix::zeros(l, l);
        for k in 1..=l {
            h[(k - 1, k - 1)] = 2.0 * omega_k[k - 1];
            let n = next_site(k, l);
            h[(k - 1, n - 1)] += beta / 4.0;
            h[(n - 1, k - 1)] += beta / 4.0;
        }
        Ok(SingleFermionMatrix { h })
    }

    pub fn from_realization(r: &Realization, beta: f64) -> Result<Self> {
        Self::new(&r.omega_k, beta)
    }
}

/// Excitation energies above `|G⟩` and eigenvectors (columns), ascending.
pub fn single_fermion_spectrum(r: &Realization, beta: f64) -> Result<Eigh<f64>> {
    Ok(eigh_real(SingleFermionMatrix::from_realization(r, beta)?.h))
}

/// `w_ν = |Σ_k ψ_ν(k)|²/L`, the share of the uniform spin wave in each
/// eigenstate. Sums to one.
pub fn absorption_weights(eig: &Eigh<f64>) -> Vec<f64> {
    let l = eig.vectors.nrows() as f64;
    eig.vectors.column_iter().map(|c| c.sum().powi(2) / l).collect()
}

/// Inverse participation ratio `Σ_k |ψ_ν(k)|⁴` of each eigenvector column.
pub fn localization_diagnostic(vectors: &DMatrix<f64>) -> Vec<f64> {
    vectors
        .column_iter()
        .map(|c| c.iter().map(|x| x.powi(4)).sum())
        .collect()
}

#[derive(Clone, Debug)]
pub struct DisorderedEdReport {
    pub max_energy_deviation: f64,
    pub max_weight_deviation: f64,
    pub ed_energies: Vec<f64>,
    pub ed_weights: Vec<f64>,
}

/// Compare the single-fermion reduction with the many-body `H_xy` of the same
/// realization: its one-fermion block above the vacuum, and the transition
/// weights `|⟨ν|Σ_k σ_x^(k)|G⟩|²/L`.
pub fn ed_cross_check_disordered(r: &Realization, beta: f64, tol: f64) -> Result<DisorderedEdReport> {
    let l = r.sites();
    check_cap("disordered cross-check", l, ED_CHECK_CAP)?;
    let params = r.params(beta)?;
    let h = build_h_xy(&params);
    let vacuum_energy = h.get(0, 0).re;
    let one = DMatrix::from_fn(l, l, |a, b| h.get(site_mask(a + 1), site_mask(b + 1)).re);
    let ed = eigh_real(one);
    let ed_energies: Vec<f64> = ed.values.iter().map(|e| e - vacuum_energy).collect();

    let dim = 1usize << l;
    let mut sx = crate::operator::OperatorMatrix::zeros(dim, Frame::Rotated);
    for k in 1..=l {
        sx = sx.add(&local_operator(l, Frame::Rotated, k, Pauli::X))?;
    }
    let driven = sx.apply(&StateVector::fermion_vacuum(l))?;
    let ed_weights: Vec<f64> = ed
        .vectors
        .column_iter()
        .map(|c| {
            let amp: f64 = (0..l).map(|k| c[k] * driven.amplitudes()[site_mask(k + 1)].re).sum();
            amp * amp / l as f64
        })
        .collect();

    let reduced = single_fermion_spectrum(r, beta)?;
    let weights = absorption_weights(&reduced);
    let max_energy_deviation = ed_energies
        .iter()
        .zip(&reduced.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let max_weight_deviation = ed_weights
        .iter()
        .zip(&weights)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if max_energy_deviation > tol || max_weight_deviation > tol {
        return Err(Error::Oracle(format!(
            "single-fermion reduction disagrees with exact diagonalization: \
             energies {max_energy_deviation:.3e}, weights {max_weight_deviation:.3e}"
        )));
    }
    Ok(DisorderedEdReport {
        max_energy_deviation,
        max_weight_deviation,
        ed_energies,
        ed_weights,
    })
}

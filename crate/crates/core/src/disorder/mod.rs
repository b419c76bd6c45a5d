//! Quench disorder: atom-number fluctuations frozen in from a superfluid give
//! each site its own collective Rabi frequency `Ω_k = Ω₀√N_k`.

mod absorption;
mod spectrum;

pub use absorption::{
    absorption_profile, fit_red_wing, red_wing_model, AbsorptionProfile, BinSpec, ProfileMetadata, RedWingFit,
};
pub use spectrum::{
    absorption_weights, ed_cross_check_disordered, localization_diagnostic, single_fermion_spectrum,
    DisorderedEdReport, SingleFermionMatrix, ED_CHECK_CAP,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Sampling recipe for an ensemble of frozen occupations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchEnsemble {
    pub sites: usize,
    /// Total number of ground-state atoms `N_g`.
    pub atoms: u32,
    pub realizations: usize,
    pub master_seed: u64,
}

impl QuenchEnsemble {
    pub fn new(sites: usize, atoms: u32, realizations: usize, master_seed: u64) -> Result<Self> {
        let e = QuenchEnsemble {
            sites,
            atoms,
            realizations,
            master_seed,
        };
        e.validate()?;
        Ok(e)
    }

    /// `N_g = N₀·L` atoms.
    pub fn with_mean_occupation(sites: usize, n0: u32, realizations: usize, master_seed: u64) -> Result<Self> {
        Self::new(sites, n0 * sites as u32, realizations, master_seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::validation(format!(
                "ring needs at least 2 sites, got {}",
                self.sites
            )));
        }
        if self.atoms == 0 {
            return Err(Error::validation("ensemble needs at least one atom"));
        }
        if self.realizations == 0 {
            return Err(Error::validation("ensemble needs at least one realization"));
        }
        Ok(())
    }

    /// Non-fatal remarks about the ensemble.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if (self.atoms as usize) < self.sites {
            w.push(format!(
                "{} atoms on {} sites: empty sites are likely",
                self.atoms, self.sites
            ));
        }
        if !(self.atoms as usize).is_multiple_of(self.sites) {
            w.push("atom number is not a multiple of the ring size; N₀ is fractional".into());
        }
        w
    }

    /// `N₀ = N_g/L`.
    pub fn mean_occupation(&self) -> f64 {
        f64::from(self.atoms) / self.sites as f64
    }

    /// Independent deterministic stream for one realization.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Occupations of realization `index`: every atom lands on a uniformly
    /// random site.
    pub fn occupations(&self, index: usize) -> Vec<u32> {
        let mut rng = self.rng(index);
        let mut n = vec![0u32; self.sites];
        for _ in 0..self.atoms {
            n[rng.random_range(0..self.sites)] += 1;
        }
        n
    }
}

/// One frozen configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub index: usize,
    pub occupations: Vec<u32>,
    /// `Ω₀ = Ω/√N₀`.
    pub omega0: f64,
    /// `Ω_k = Ω₀√N_k`.
    pub omega_k: Vec<f64>,
    /// `Ω_k − Ω`.
    pub delta_omega_k: Vec<f64>,
}

impl Realization {
    /// `omega` is the clean collective Rabi frequency `Ω = Ω₀√N₀`.
    pub fn from_occupations(index: usize, occupations: Vec<u32>, omega: f64, n0: f64) -> Result<Self> {
        if !(n0 > 0.0) {
            return Err(Error::validation("mean occupation must be positive"));
        }
        let omega0 = omega / n0.sqrt();
        let omega_k: Vec<f64> = occupations.iter().map(|&n| omega0 * f64::from(n).sqrt()).collect();
        let delta_omega_k = omega_k.iter().map(|w| w - omega).collect();
        Ok(Realization {
            index,
            occupations,
            omega0,
            omega_k,
            delta_omega_k,
        })
    }

    pub fn sites(&self) -> usize {
        self.occupations.len()
    }

    pub fn has_empty_site(&self) -> bool {
        self.occupations.contains(&0)
    }

    /// Spin-model parameters at zero detuning.
    pub fn params(&self, beta: f64) -> Result<SystemParams> {
        SystemParams::new(self.sites(), beta, self.omega0, 0.0, self.occupations.clone())
    }
}

/// Draw every realization of the ensemble, in index order.
pub fn sample_occupations(ensemble: &QuenchEnsemble, omega: f64) -> Result<Vec<Realization>> {
    ensemble.validate()?;
    let n0 = ensemble.mean_occupation();
    (0..ensemble.realizations)
        .into_par_iter()
        .map(|i| Realization::from_occupations(i, ensemble.occupations(i), omega, n0))
        .collect()
}

/// Leading-order covariance `⟨δΩ_k δΩ_m⟩ = Ω²/(4N₀)(δ_km − 1/L)`.
pub fn covariance_theory(omega: f64, n0: f64, sites: usize, k: usize, m: usize) -> f64 {
    let kron = if k == m { 1.0 } else { 0.0 };
    omega * omega / (4.0 * n0) * (kron - 1.0 / sites as f64)
}

/// Linearized `δΩ_k ≈ δN_k·Ω/(2N₀)`.
pub fn linearized_delta_omega(occupation: u32, omega: f64, n0: f64) -> f64 {
    (f64::from(occupation) - n0) * omega / (2.0 * n0)
}

/// Sample covariance of `δΩ_k` and `δΩ_m` (1-based sites) with its standard
/// error.
pub fn sample_covariance(realizations: &[Realization], k: usize, m: usize) -> (f64, f64) {
    let r = realizations.len() as f64;
    let xs: Vec<f64> = realizations.iter().map(|z| z.delta_omega_k[k - 1]).collect();
    let ys: Vec<f64> = realizations.iter().map(|z| z.delta_omega_k[m - 1]).collect();
    let mx = xs.iter().sum::<f64>() / r;
    let my = ys.iter().sum::<f64>() / r;
    let prods: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let cov = prods.iter().sum::<f64>() / r;
    let var = prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / (r - 1.0);
    (cov, (var / r).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_are_conserved() {
        let e = QuenchEnsemble::new(7, 7, 50, 3).unwrap();
        for r in sample_occupations(&e, 10.0).unwrap() {
            assert_eq!(r.occupations.iter().sum::<u32>(), 7);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let e = QuenchEnsemble::with_mean_occupation(10, 20, 4, 99).unwrap();
        assert_eq!(e.occupations(2), e.occupations(2));
        assert_ne!(e.occupations(1), e.occupations(2));
        let other = QuenchEnsemble {
            master_seed: 100,
            ..e.clone()
        };
        assert_ne!(e.occupations(0), other.occupations(0));
    }

    #[test]
    fn ensemble_mean_occupation() {
        let e = QuenchEnsemble::with_mean_occupation(5, 10, 4000, 1).unwrap();
        let rs = sample_occupations(&e, 10.0).unwrap();
        for k in 0..5 {
            let mean = rs.iter().map(|r| f64::from(r.occupations[k])).sum::<f64>() / rs.len() as f64;
            // binomial standard error √(N_g p(1−p)/R) ≈ 0.045
            assert!((mean - 10.0).abs() < 0.25, "site {k}: {mean}");
        }
    }

    #[test]
    fn warnings_and_validation() {
        assert!(QuenchEnsemble::new(1, 5, 1, 0).is_err());
        assert!(QuenchEnsemble::new(5, 0, 1, 0).is_err());
        assert!(QuenchEnsemble::new(5, 5, 0, 0).is_err());
        assert_eq!(QuenchEnsemble::new(5, 3, 1, 0).unwrap().warnings().len(), 2);
        assert!(QuenchEnsemble::new(5, 10, 1, 0).unwrap().warnings().is_empty());
    }

    #[test]
    fn clean_occupations_give_no_fluctuation() {
        let r = Realization::from_occupations(0, vec![4; 6], 10.0, 4.0).unwrap();
        assert!(r.delta_omega_k.iter().all(|d| d.abs() < 1e-14));
        assert!((r.omega0 - 5.0).abs() < 1e-14);
        assert!(r.params(1.0).unwrap().is_clean());
    }

    #[test]
    fn linearization_matches_exact_to_first_order() {
        let (omega, n0) = (10.0, 400.0);
        let r = Realization::from_occupations(0, vec![404, 396], omega, n0).unwrap();
        for (k, &n) in r.occupations.iter().enumerate() {
            let lin = linearized_delta_omega(n, omega, n0);
            assert!((r.delta_omega_k[k] - lin).abs() < 1e-3);
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the ring. All energies are in units of the
/// nearest-neighbour interaction `β` unless the caller chooses otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    sites: usize,
    beta: f64,
    omega0: f64,
    delta: f64,
    occupations: Vec<u32>,
}

impl SystemParams {
    pub fn new(sites: usize, beta: f64, omega0: f64, delta: f64, occupations: Vec<u32>) -> Result<Self> {
        let p = SystemParams {
            sites,
            beta,
            omega0,
            delta,
            occupations,
        };
        p.validate()?;
        Ok(p)
    }

    /// Uniform occupation `N_k = 1`, so the collective Rabi frequency equals
    /// `omega`.
    pub fn clean(sites: usize, beta: f64, omega: f64, delta: f64) -> Result<Self> {
        Self::new(sites, beta, omega, delta, vec![1; sites])
    }

    fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::validation(format!(
                "ring needs at least 2 sites, got {}",
                self.sites
            )));
        }
        if self.occupations.len() != self.sites {
            return Err(Error::validation(format!(
                "{} occupations given for {} sites",
                self.occupations.len(),
                self.sites
            )));
        }
        for (name, v) in [("beta", self.beta), ("omega0", self.omega0), ("delta", self.delta)] {
            if !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega0 < 0.0 {
            return Err(Error::validation(format!(
                "omega0 must be non-negative, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn with_omega0(&self, omega0: f64) -> Result<Self> {
        Self::new(self.sites, self.beta, omega0, self.delta, self.occupations.clone())
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.sites, self.beta, self.omega0, delta, self.occupations.clone())
    }

    /// `√N_k`, the collective enhancement of site `k` (1-based).
    pub fn enhancement(&self, k: usize) -> f64 {
        f64::from(self.occupations[k - 1]).sqrt()
    }

    /// Collective Rabi frequency `Ω_k = Ω₀√N_k` of site `k` (1-based).
    pub fn rabi(&self, k: usize) -> f64 {
        self.omega0 * self.enhancement(k)
    }

    pub fn rabi_frequencies(&self) -> Vec<f64> {
        (1..=self.sites).map(|k| self.rabi(k)).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.occupations.windows(2).all(|w| w[0] == w[1])
    }

    /// The uniform collective Rabi frequency `Ω` of a clean ring.
    pub fn clean_rabi(&self) -> Result<f64> {
        if !self.is_clean() {
            return Err(Error::validation(
                "free-fermion analytics require uniform occupations (clean ring)",
            ));
        }
        Ok(self.rabi(1))
    }
}

/// Ratio of nearest- to next-nearest-neighbour van der Waals interaction on an
/// `L`-site ring, `64 cos⁶(π/L)`. Only nearest-neighbour terms are modelled.
pub fn next_nearest_suppression(sites: usize) -> f64 {
    64.0 * (std::f64::consts::PI / sites as f64).cos().powi(6)
}

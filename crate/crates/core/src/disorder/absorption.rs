//! Ensemble-averaged absorption line of the `|G⟩ → one fermion` transition
//! under a weak oscillating detuning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spectrum::{absorption_weights, single_fermion_spectrum};
use super::{QuenchEnsemble, Realization};
use crate::error::{Error, Result};

/// Histogram window. The centre defaults to `ω_L = 2Ω + β/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinSpec {
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_half_width() -> f64 {
    2.5
}

fn default_bins() -> usize {
    200
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec {
            center: None,
            half_width: default_half_width(),
            bins: default_bins(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub sites: usize,
    pub omega: f64,
    pub beta: f64,
    pub mean_occupation: f64,
    pub realizations: usize,
    pub seed: u64,
    /// Realizations containing at least one empty site.
    pub empty_site_realizations: usize,
    /// Average weight per realization that fell outside the window.
    pub weight_outside_window: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionProfile {
    /// Bin centres.
    pub omega: Vec<f64>,
    pub bin_width: f64,
    /// Normalized to unit sum over the window.
    pub intensity: Vec<f64>,
    /// `ω_L = 2Ω + β/2`.
    pub omega_l: f64,
    pub metadata: ProfileMetadata,
}

impl AbsorptionProfile {
    /// Centre of the highest bin.
    pub fn peak_position(&self) -> f64 {
        let i = argmax(&self.intensity);
        self.omega[i]
    }

    /// Full width at half maximum, interpolating linearly where the line
    /// first drops below half height on either side of the peak.
    pub fn fwhm(&self) -> f64 {
        let y = &self.intensity;
        let p = argmax(y);
        let half = 0.5 * y[p];
        let crossing = |i: usize, j: usize| {
            let (x0, x1) = (self.omega[i], self.omega[j]);
            let (y0, y1) = (y[i], y[j]);
            x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        };
        let left = (0..p)
            .rev()
            .find(|&i| y[i] < half)
            .map_or(self.omega[0], |i| crossing(i, i + 1));
        let right = (p + 1..y.len())
            .find(|&i| y[i] < half)
            .map_or(self.omega[y.len() - 1], |i| crossing(i - 1, i));
        right - left
    }

    /// Share of the weight below `ω_L`.
    pub fn red_weight_fraction(&self) -> f64 {
        self.omega
            .iter()
            .zip(&self.intensity)
            .filter(|(w, _)| **w < self.omega_l)
            .map(|(_, i)| i)
            .sum()
    }
}

fn argmax(y: &[f64]) -> usize {
    y.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

fn histogram(r: &Realization, beta: f64, lo: f64, width: f64, bins: usize) -> Result<(Vec<f64>, f64)> {
    let eig = single_fermion_spectrum(r, beta)?;
    let mut h = vec![0.0; bins];
    let mut outside = 0.0;
    for (e, w) in eig.values.iter().zip(absorption_weights(&eig)) {
        let x = (e - lo) / width;
        if x >= 0.0 && x < bins as f64 {
            h[x as usize] += w;
        } else {
            outside += w;
        }
    }
    Ok((h, outside))
}

/// Average the first-order absorption weights of every realization into a
/// histogram. `omega` is the clean collective Rabi frequency `Ω = Ω₀√N₀`.
///
/// Realizations run in parallel; the reduction is done in index order so the
/// result does not depend on the thread count.
pub fn absorption_profile(
    ensemble: &QuenchEnsemble,
    omega: f64,
    beta: f64,
    bins: &BinSpec,
) -> Result<AbsorptionProfile> {
    ensemble.validate()?;
    if bins.bins == 0 || !(bins.half_width > 0.0) {
        return Err(Error::validation("bin spec needs a positive width and bin count"));
    }
    let omega_l = 2.0 * omega + beta / 2.0;
    let center = bins.center.unwrap_or(omega_l);
    let lo = center - bins.half_width;
    let width = 2.0 * bins.half_width / bins.bins as f64;
    let n0 = ensemble.mean_occupation();

    let per_realization: Vec<(Vec<f64>, f64, bool)> = (0..ensemble.realizations)
        .into_par_iter()
        .map(|i| {
            let r = Realization::from_occupations(i, ensemble.occupations(i), omega, n0)?;
            let (h, outside) = histogram(&r, beta, lo, width, bins.bins)?;
            Ok((h, outside, r.has_empty_site()))
        })
        .collect::<Result<_>>()?;

    let mut total = vec![0.0; bins.bins];
    let mut outside = 0.0;
    let mut empty = 0;
    for (h, o, e) in &per_realization {
        for (t, x) in total.iter_mut().zip(h) {
            *t += x;
        }
        outside += o;
        empty += usize::from(*e);
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        for t in &mut total {
            *t /= sum;
        }
    }
    Ok(AbsorptionProfile {
        omega: (0..bins.bins).map(|i| lo + (i as f64 + 0.5) * width).collect(),
        bin_width: width,
        intensity: total,
        omega_l,
        metadata: ProfileMetadata {
            sites: ensemble.sites,
            omega,
            beta,
            mean_occupation: n0,
            realizations: ensemble.realizations,
            seed: ensemble.master_seed,
            empty_site_realizations: empty,
            weight_outside_window: outside / ensemble.realizations as f64,
        },
    })
}

/// Perturbative tail `Ω²/(4N₀(ω − ω_L)²)`, up to an overall scale.
pub fn red_wing_model(omega_grid: &[f64], omega: f64, beta: f64, n0: f64) -> Result<Vec<f64>> {
    let omega_l = 2.0 * omega + beta / 2.0;
    omega_grid
        .iter()
        .map(|&w| {
            let d = w - omega_l;
            if d == 0.0 {
                Err(Error::validation("red-wing model is singular at ω_L"))
            } else {
                Ok(omega * omega / (4.0 * n0 * d * d))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RedWingFit {
    /// Least-squares multiplier on [`red_wing_model`].
    pub scale: f64,
    pub omega: Vec<f64>,
    pub simulated: Vec<f64>,
    pub model: Vec<f64>,
    /// Largest `|model − simulated|/simulated` over the fitted bins.
    pub max_relative_deviation: f64,
}

/// Fit one scale factor of the inverse-square tail to the profile bins with
/// `ω_L − far ≤ ω ≤ ω_L − near`.
pub fn fit_red_wing(profile: &AbsorptionProfile, near: f64, far: f64) -> Result<RedWingFit> {
    let (omega, simulated): (Vec<f64>, Vec<f64>) = profile
        .omega
        .iter()
        .zip(&profile.intensity)
        .filter(|(w, _)| **w >= profile.omega_l - far && **w <= profile.omega_l - near)
        .map(|(w, i)| (*w, *i))
        .unzip();
    if omega.is_empty() {
        return Err(Error::validation("no profile bins inside the red-wing window"));
    }
    let m = &profile.metadata;
    let shape = red_wing_model(&omega, m.omega, m.beta, m.mean_occupation)?;
    let scale =
        shape.iter().zip(&simulated).map(|(a, b)| a * b).sum::<f64>() / shape.iter().map(|a| a * a).sum::<f64>();
    let model: Vec<f64> = shape.iter().map(|a| scale * a).collect();
    let max_relative_deviation = model
        .iter()
        .zip(&simulated)
        .map(|(a, b)| if *b > 0.0 { (a - b).abs() / b } else { f64::INFINITY })
        .fold(0.0, f64::max);
    Ok(RedWingFit {
        scale,
        omega,
        simulated,
        model,
        max_relative_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_limit_is_a_single_line() {
        // search seeds for a realization that happens to be uniform
        let e = QuenchEnsemble::new(2, 2, 1, 0).unwrap();
        let mut found_clean = false;
        for seed in 0..20 {
            let e = QuenchEnsemble {
                master_seed: seed,
                ..e.clone()
            };
            if e.occupations(0) == vec![1, 1] {
                let p = absorption_profile(&e, 10.0, 1.0, &BinSpec::default()).unwrap();
                let nonzero: Vec<_> = p.intensity.iter().filter(|x| **x > 1e-12).collect();
                assert_eq!(nonzero.len(), 1);
                assert!((p.peak_position() - p.omega_l).abs() <= p.bin_width);
                found_clean = true;
            }
        }
        assert!(found_clean);
    }

    #[test]
    fn profile_is_normalized_and_deterministic() {
        let e = QuenchEnsemble::with_mean_occupation(20, 30, 40, 7).unwrap();
        let a = absorption_profile(&e, 10.0, 1.0, &BinSpec::default()).unwrap();
        let b = absorption_profile(&e, 10.0, 1.0, &BinSpec::default()).unwrap();
        assert!((a.intensity.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.intensity.iter().all(|x| *x >= 0.0));
        assert_eq!(a, b);
    }

    #[test]
    fn model_scaling() {
        let grid = [19.0, 18.5];
        let m = red_wing_model(&[20.0, 19.5], 10.0, 1.0, 20.0).unwrap();
        assert!((m[0] / m[1] - 4.0).abs() < 1e-12);
        let a = red_wing_model(&grid, 10.0, 1.0, 20.0).unwrap();
        let b = red_wing_model(&grid, 10.0, 1.0, 10.0).unwrap();
        assert!((b[0] / a[0] - 2.0).abs() < 1e-12);
        assert!(red_wing_model(&[20.5], 10.0, 1.0, 20.0).is_err());
    }

    #[test]
    fn fwhm_of_a_triangle() {
        let omega: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let intensity = vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0, 0.0, 0.0];
        let p = AbsorptionProfile {
            omega,
            bin_width: 1.0,
            intensity,
            omega_l: 5.0,
            metadata: ProfileMetadata {
                sites: 2,
                omega: 1.0,
                beta: 1.0,
                mean_occupation: 1.0,
                realizations: 1,
                seed: 0,
                empty_site_realizations: 0,
                weight_outside_window: 0.0,
            },
        };
        assert!((p.fwhm() - 3.0).abs() < 1e-12);
        assert_eq!(p.peak_position(), 5.0);
        assert!((p.red_weight_fraction() - 3.0).abs() < 1e-12);
    }
}

//! Excitation protocols: adiabatic preparation of `|G⟩`, RF Rabi flops to
//! `|1⟩`, the two-pulse route to `|2_n⟩`, and fermion-number readout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::propagate::{propagate_with, Generator, Probe, PropagationResult, Recording, StepControl};
use super::schedule::{DeltaProfile, LaserSchedule, OmegaProfile, Segment};
use crate::basis::{excitation_count, StateVector};
use crate::error::{Error, Result};
use crate::fermion::{build_symmetric_state, Parity, SymmetricLabel};
use crate::flow::{symmetric_block, symmetric_gap};
use crate::linalg::eigh_real;
use crate::params::SystemParams;
use crate::spin::{build_h_spin, check_cap, DEFAULT_ED_CAP};
use crate::symmetry::{symmetric_sector, SymmetrySector};

/// `ω_L = 2Ω + β/2`, the `|G⟩ → |1⟩` resonance of the free-fermion model.
pub fn resonance_frequency(params: &SystemParams) -> Result<f64> {
    Ok(2.0 * params.clean_rabi()? + params.beta() / 2.0)
}

/// Rotating-wave coupling `V = Δ_osc√L/4` between `|G⟩` and `|1⟩`.
pub fn rwa_coupling(amplitude: f64, sites: usize) -> f64 {
    amplitude.abs() * (sites as f64).sqrt() / 4.0
}

/// Two-level Rabi period `π/V`: the time for `P₁` to go from 0 to 1 and back.
pub fn rwa_rabi_period(amplitude: f64, sites: usize) -> f64 {
    PI / rwa_coupling(amplitude, sites)
}

/// Bare `|1⟩ → |2_n⟩` frequency `2Ω + β(cos α_(e,n) − ½)`.
pub fn second_pulse_bare_frequency(params: &SystemParams, n: usize) -> Result<f64> {
    let omega = params.clean_rabi()?;
    let alpha = Parity::Even.momentum(n, params.sites());
    Ok(2.0 * omega + params.beta() * (alpha.cos() - 0.5))
}

/// Ramp `Ω₀(t) = Ω_f (t/T)^exponent` from zero while the detuning goes
/// linearly from `delta0` to `delta_final`.
///
/// The gap is smallest at the start of the ramp, where it is set by `Δ`, so
/// a slow start (`exponent > 1`) buys more adiabaticity than a longer linear
/// ramp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdiabaticRamp {
    pub omega_final: f64,
    pub duration: f64,
    pub delta0: f64,
    #[serde(default)]
    pub delta_final: f64,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
}

fn default_exponent() -> f64 {
    2.0
}

impl Default for AdiabaticRamp {
    fn default() -> Self {
        AdiabaticRamp {
            omega_final: 10.0,
            duration: 200.0,
            delta0: 1.0,
            delta_final: 0.0,
            exponent: default_exponent(),
        }
    }
}

impl AdiabaticRamp {
    pub fn schedule(&self) -> Result<LaserSchedule> {
        if self.delta0 <= 0.0 {
            return Err(Error::validation(format!(
                "adiabatic preparation needs a positive initial detuning, got {}",
                self.delta0
            )));
        }
        LaserSchedule::new(vec![Segment {
            duration: self.duration,
            delta: DeltaProfile::Ramp {
                from: self.delta0,
                to: self.delta_final,
            },
            omega0: OmegaProfile::Power {
                from: 0.0,
                to: self.omega_final,
                exponent: self.exponent,
            },
        }])
    }

    /// Parameters at the end of the ramp.
    pub fn final_params(&self, params: &SystemParams) -> Result<SystemParams> {
        params.with_omega0(self.omega_final)?.with_delta(self.delta_final)
    }
}

#[derive(Clone, Debug)]
pub struct PreparedGround {
    /// Lab frame.
    pub state: StateVector,
    /// `|⟨G|ψ⟩|²` with the fermion vacuum.
    pub fidelity: f64,
    pub params: SystemParams,
    pub run: PropagationResult,
}

/// Start from `|0⟩` (no Rydberg atoms) and ramp the laser on.
pub fn adiabatic_prepare_ground(
    params: &SystemParams,
    ramp: &AdiabaticRamp,
    control: &StepControl,
) -> Result<PreparedGround> {
    let schedule = ramp.schedule()?;
    let l = params.sites();
    let vacuum = StateVector::fermion_vacuum(l).to_lab();
    let recording = Recording {
        probes: vec![Probe::new("G", &vacuum)],
        ..Recording::uniform(schedule.span(), 50)
    };
    let generator = Generator::new(params)?;
    let run = propagate_with(&generator, &StateVector::no_rydberg(l), &schedule, control, &recording)?;
    let fidelity = vacuum.overlap(&run.final_state)?;
    Ok(PreparedGround {
        state: run.final_state.clone(),
        fidelity,
        params: ramp.final_params(params)?,
        run,
    })
}

/// Smallest symmetric-sector gap met along the ramp, sampled at `samples + 1`
/// equally spaced times.
pub fn ramp_min_gap(params: &SystemParams, ramp: &AdiabaticRamp, samples: usize) -> Result<f64> {
    let schedule = ramp.schedule()?;
    let sector = symmetric_sector(params.sites())?;
    let n = samples.max(1);
    let mut min = f64::INFINITY;
    for i in 0..=n {
        let (delta, omega0) = schedule.at(schedule.span() * i as f64 / n as f64);
        let p = params.with_omega0(omega0)?.with_delta(delta)?;
        min = min.min(symmetric_gap(&p, &sector)?);
    }
    Ok(min)
}

/// Oscillating detuning `Δ(t) = Δ_static + amplitude·cos(ωt + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfDrive {
    pub amplitude: f64,
    pub omega: f64,
    pub duration: f64,
    #[serde(default)]
    pub phase: f64,
}

impl RfDrive {
    /// Drive at fixed `Ω₀ = params.omega0()` around `Δ = params.delta()`.
    pub fn schedule(&self, params: &SystemParams) -> Result<LaserSchedule> {
        LaserSchedule::new(vec![Segment {
            duration: self.duration,
            delta: DeltaProfile::Sinusoid {
                offset: params.delta(),
                amplitude: self.amplitude,
                omega: self.omega,
                phase: self.phase,
            },
            omega0: OmegaProfile::Constant { value: params.omega0() },
        }])
    }
}

#[derive(Clone, Debug)]
pub struct RabiTrace {
    pub times: Vec<f64>,
    /// `P₁(t) = |⟨1|ψ(t)⟩|²`.
    pub p1: Vec<f64>,
    pub peak: f64,
    /// Period of the best-fitting `A sin²(πt/T)`.
    pub period: Option<f64>,
    /// Largest population outside the fully symmetric sector.
    pub max_outside_symmetric: f64,
    pub run: PropagationResult,
}

/// Estimate the Rabi period of a trace that starts near zero population by a
/// least-squares fit of `A sin²(πt/T)`. Fast small oscillations on top of
/// the envelope average out of the fit.
pub fn extract_rabi_period(times: &[f64], population: &[f64]) -> Option<f64> {
    if times.len() < 3 || times.len() != population.len() {
        return None;
    }
    let span = times[times.len() - 1] - times[0];
    let dt = span / (times.len() - 1) as f64;
    if !(span > 0.0) || !population.iter().any(|&p| p > 0.0) {
        return None;
    }
    // residual after the optimal amplitude; the A sin² model is linear in A
    let residual = |period: f64| {
        let (mut ps, mut ss) = (0.0, 0.0);
        for (&t, &p) in times.iter().zip(population) {
            let s = (PI * t / period).sin().powi(2);
            ps += p * s;
            ss += s * s;
        }
        if ss > 0.0 {
            -ps * ps / ss
        } else {
            0.0
        }
    };
    let (lo, hi) = (4.0 * dt, 4.0 * span);
    let n = 4000;
    let grid: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();
    let best = (0..=n).min_by(|&a, &b| residual(grid[a]).total_cmp(&residual(grid[b])))?;
    // golden-section refinement between the neighbouring grid points
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(n)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if residual(c) < residual(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Some(0.5 * (a + b))
}

/// Drive `initial` with an oscillating detuning and follow `P₁(t)`.
///
/// The full cosine drive is simulated; no rotating-wave approximation.
pub fn rf_spectroscopy(
    initial: &StateVector,
    params: &SystemParams,
    drive: &RfDrive,
    samples: usize,
    control: &StepControl,
) -> Result<RabiTrace> {
    let l = params.sites();
    let one = build_symmetric_state(SymmetricLabel::One, params)?.vector.to_lab();
    let schedule = drive.schedule(params)?;
    let recording = Recording {
        probes: vec![Probe::new("1", &one)],
        sector: Some(symmetric_sector(l)?),
        ..Recording::uniform(schedule.span(), samples)
    };
    let generator = Generator::new(params)?;
    let run = propagate_with(&generator, &initial.to_lab(), &schedule, control, &recording)?;
    let p1 = run.population(0);
    let peak = p1.iter().copied().fold(0.0, f64::max);
    let period = extract_rabi_period(&run.times, &p1);
    Ok(RabiTrace {
        times: run.times.clone(),
        p1,
        peak,
        period,
        max_outside_symmetric: run.max_outside_sector().unwrap_or(0.0),
        run,
    })
}

/// One calibrated π-pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseReport {
    pub frequency: f64,
    /// Free-fermion transition frequency without `H₂` shifts.
    pub bare_frequency: f64,
    pub duration: f64,
    /// Target population at the end of the pulse.
    pub target_population: f64,
}

#[derive(Clone, Debug)]
pub struct TwoStepReport {
    pub first: PulseReport,
    pub second: PulseReport,
    pub ground: f64,
    pub one: f64,
    /// `P(|2_m⟩)` for `m = 1..=⌊L/2⌋`.
    pub two: Vec<f64>,
    pub final_state: StateVector,
}

/// Exact energies, in the symmetric sector, of the eigenstates that overlap
/// most with each of `targets`.
fn dressed_energies(params: &SystemParams, sector: &SymmetrySector, targets: &[&StateVector]) -> Result<Vec<f64>> {
    let eig = eigh_real(symmetric_block(params, sector)?);
    targets
        .iter()
        .map(|t| {
            let c = sector.coefficients(t)?;
            let best = (0..eig.values.len())
                .max_by(|&a, &b| {
                    let w = |j: usize| {
                        c.iter()
                            .enumerate()
                            .map(|(i, ci)| ci * eig.vectors[(i, j)])
                            .sum::<num_complex::Complex64>()
                            .norm_sqr()
                    };
                    w(a).total_cmp(&w(b))
                })
                .expect("non-empty sector");
            Ok(eig.values[best])
        })
        .collect()
}

/// Run a pulse long enough to pass the first population maximum of `target`,
/// and stop it there.
#[allow(clippy::too_many_arguments)]
fn calibrated_pulse(
    generator: &Generator,
    state: &StateVector,
    params: &SystemParams,
    amplitude: f64,
    frequency: f64,
    coupling: f64,
    target: &StateVector,
    control: &StepControl,
) -> Result<(f64, StateVector, f64)> {
    let window = 1.6 * PI / (2.0 * coupling);
    let drive = RfDrive {
        amplitude,
        omega: frequency,
        duration: window,
        phase: 0.0,
    };
    let samples = 800;
    let recording = Recording {
        probes: vec![Probe::new("target", target)],
        keep_states: true,
        ..Recording::uniform(window, samples)
    };
    let run = propagate_with(generator, state, &drive.schedule(params)?, control, &recording)?;
    let pop = run.population(0);
    let (i, p) = pop
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, p)| (i, *p))
        .expect("samples recorded");
    Ok((run.times[i], run.states[i].clone(), p))
}

/// `|G⟩ → |1⟩ → |2_n⟩` with two π-pulses of oscillating detuning.
///
/// Pulse frequencies are the exact symmetric-sector transition energies
/// between the eigenstates closest to the free-fermion states, so the `H₂`
/// level shifts are included; pulse lengths are taken from the simulated
/// population maximum.
pub fn two_step_pulse(
    initial: &StateVector,
    params: &SystemParams,
    n: usize,
    amplitude: f64,
    control: &StepControl,
) -> Result<TwoStepReport> {
    let l = params.sites();
    check_cap("two-step pulse", l, DEFAULT_ED_CAP)?;
    if n == 0 || n > l / 2 {
        return Err(Error::validation(format!("|2_n⟩ needs 1 ≤ n ≤ {}, got {n}", l / 2)));
    }
    let sector = symmetric_sector(l)?;
    let lab = |label| -> Result<StateVector> { Ok(build_symmetric_state(label, params)?.vector.to_lab()) };
    let g = StateVector::fermion_vacuum(l).to_lab();
    let one = lab(SymmetricLabel::One)?;
    let twos = (1..=l / 2)
        .map(|m| lab(SymmetricLabel::Two(m)))
        .collect::<Result<Vec<_>>>()?;
    let target = &twos[n - 1];

    let e = dressed_energies(params, &sector, &[&g, &one, target])?;
    // Static matrix elements of Σ P_k; the rotating-wave coupling is half of amplitude·|⟨b|ΣP|a⟩|.
    let rydberg = build_h_spin(&SystemParams::new(l, 0.0, 0.0, 1.0, params.occupations().to_vec())?)?;
    let v1 = 0.5 * amplitude.abs() * rydberg.matrix_element(&one, &g)?.norm();
    let v2 = 0.5 * amplitude.abs() * rydberg.matrix_element(target, &one)?.norm();
    if v1 == 0.0 || v2 == 0.0 {
        return Err(Error::validation("pulse amplitude gives no coupling"));
    }
    let generator = Generator::new(params)?;

    let f1 = e[1] - e[0];
    let (d1, after_first, p1) =
        calibrated_pulse(&generator, &initial.to_lab(), params, amplitude, f1, v1, &one, control)?;
    let f2 = e[2] - e[1];
    let (d2, after_second, p2) =
        calibrated_pulse(&generator, &after_first, params, amplitude, f2, v2, target, control)?;

    Ok(TwoStepReport {
        first: PulseReport {
            frequency: f1,
            bare_frequency: resonance_frequency(params)?,
            duration: d1,
            target_population: p1,
        },
        second: PulseReport {
            frequency: f2,
            bare_frequency: second_pulse_bare_frequency(params, n)?,
            duration: d2,
            target_population: p2,
        },
        ground: g.overlap(&after_second)?,
        one: one.overlap(&after_second)?,
        two: twos.iter().map(|s| s.overlap(&after_second)).collect::<Result<_>>()?,
        final_state: after_second,
    })
}

/// Distribution of the number of `|+⟩` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionCount {
    /// `probabilities[m]` for `m = 0..=L`.
    pub probabilities: Vec<f64>,
    pub mean: f64,
}

/// Measure `n_+` on `state` (converted to the rotated frame if needed).
pub fn fermion_number_readout(state: &StateVector) -> FermionCount {
    let rotated = state.to_rotated();
    let norm2 = rotated.norm().powi(2);
    let mut probabilities = vec![0.0; state.sites() + 1];
    for (i, a) in rotated.amplitudes().iter().enumerate() {
        probabilities[excitation_count(i)] += a.norm_sqr() / norm2;
    }
    let mean = probabilities.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    FermionCount { probabilities, mean }
}

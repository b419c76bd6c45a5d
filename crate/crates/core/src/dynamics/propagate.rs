//! Time-dependent Schrödinger propagation under `H_spin(t)`.
//!
//! Each step is a fourth-order commutator-free Magnus step (two exponentials
//! evaluated at the Gauss–Legendre nodes), with the exponentials applied to
//! the state by a truncated Taylor series. Steps are controlled by step
//! doubling: the local error estimate `‖ψ_h/2,h/2 − ψ_h‖/15` must stay below
//! `tolerance·h`.

use num_complex::Complex64 as C64;

use super::schedule::LaserSchedule;
use crate::basis::{excitation_count, site_mask, Frame, StateVector};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::params::SystemParams;
use crate::spin::{build_h_spin, next_site};
use crate::symmetry::SymmetrySector;

const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const C1: f64 = 0.5 - SQRT3_6;
const C2: f64 = 0.5 + SQRT3_6;
const A1: f64 = 0.25 + SQRT3_6;
const A2: f64 = 0.25 - SQRT3_6;

/// Adaptive step control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Allowed local error per unit time.
    pub tolerance: f64,
    pub initial_step: f64,
    /// Below this step size the integration is abandoned.
    pub min_step: f64,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tolerance: 1e-8,
            initial_step: 1e-2,
            min_step: 1e-10,
            max_step: 1.0,
        }
    }
}

/// A reference state whose population `|⟨ref|ψ(t)⟩|²` is recorded.
#[derive(Clone, Debug)]
pub struct Probe {
    pub name: String,
    pub state: StateVector,
}

impl Probe {
    pub fn new(name: impl Into<String>, state: &StateVector) -> Self {
        Probe {
            name: name.into(),
            state: state.to_lab(),
        }
    }
}

/// What to record during a run.
#[derive(Clone, Debug, Default)]
pub struct Recording {
    /// Sample times inside the schedule span; `0` and the end are always added.
    pub times: Vec<f64>,
    pub probes: Vec<Probe>,
    /// Track the population outside this sector.
    pub sector: Option<SymmetrySector>,
    pub keep_states: bool,
}

impl Recording {
    /// `samples + 1` equally spaced times over `[0, span]`.
    pub fn uniform(span: f64, samples: usize) -> Self {
        let n = samples.max(1);
        Recording {
            times: (0..=n)
                .map(|i| if i == n { span } else { span * i as f64 / n as f64 })
                .collect(),
            ..Recording::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub time: f64,
    pub norm: f64,
    /// `⟨n_+⟩`, the mean number of `|+⟩` sites.
    pub fermion_number: f64,
    /// One entry per probe, in probe order.
    pub populations: Vec<f64>,
    /// `1 − ‖Pψ‖²` for the tracked sector.
    pub outside_sector: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    /// Lab frame; empty unless requested.
    pub states: Vec<StateVector>,
    pub observables: Vec<Observation>,
    pub final_state: StateVector,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest `|‖ψ‖ − 1|` seen at the sample times.
    pub max_norm_drift: f64,
}

impl PropagationResult {
    /// Population trace of probe `i`.
    pub fn population(&self, i: usize) -> Vec<f64> {
        self.observables.iter().map(|o| o.populations[i]).collect()
    }

    pub fn max_outside_sector(&self) -> Option<f64> {
        self.observables
            .iter()
            .map(|o| o.outside_sector)
            .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
    }
}

/// `H(Ω₀, Δ) = Ω₀·D + Δ·N + W` with `D = Σ√N_k σ_x`, `N = Σ P_k`,
/// `W = β Σ P_k P_{k+1}`.
pub(crate) struct Generator {
    sites: usize,
    drive: OperatorMatrix,
    rydberg: Vec<f64>,
    interaction: Vec<f64>,
    drive_norm: f64,
    rydberg_norm: f64,
    interaction_norm: f64,
}

impl Generator {
    pub(crate) fn new(params: &SystemParams) -> Result<Self> {
        let l = params.sites();
        let unit = SystemParams::new(l, 0.0, 1.0, 0.0, params.occupations().to_vec())?;
        let drive = build_h_spin(&unit)?;
        let dim = 1usize << l;
        let rydberg: Vec<f64> = (0..dim).map(|i| excitation_count(i) as f64).collect();
        let interaction: Vec<f64> = (0..dim)
            .map(|i| {
                let bonds = (1..=l)
                    .filter(|&k| i & site_mask(k) != 0 && i & site_mask(next_site(k, l)) != 0)
                    .count();
                params.beta() * bonds as f64
            })
            .collect();
        let drive_norm = (0..dim)
            .map(|i| drive.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Generator {
            sites: l,
            rydberg_norm: max_abs(&rydberg),
            interaction_norm: max_abs(&interaction),
            drive,
            rydberg,
            interaction,
            drive_norm,
        })
    }

    /// `y = H x` for coefficients `(ω, δ, w)` of `(D, N, W)`.
    fn apply(&self, coef: (f64, f64, f64), x: &[C64], y: &mut [C64]) {
        let (w_drive, w_det, w_int) = coef;
        for (i, yi) in y.iter_mut().enumerate() {
            let off: C64 = self.drive.row(i).map(|(j, v)| v * x[j]).sum();
            *yi = off * w_drive + x[i] * (w_det * self.rydberg[i] + w_int * self.interaction[i]);
        }
    }

    fn norm_bound(&self, coef: (f64, f64, f64)) -> f64 {
        coef.0.abs() * self.drive_norm + coef.1.abs() * self.rydberg_norm + coef.2.abs() * self.interaction_norm
    }

    /// `⟨ψ|H|ψ⟩` at fixed `(Ω₀, Δ)`.
    #[cfg(test)]
    pub(crate) fn energy(&self, omega0: f64, delta: f64, psi: &[C64]) -> f64 {
        let mut y = vec![C64::new(0.0, 0.0); psi.len()];
        self.apply((omega0, delta, 1.0), psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `exp(−i h H) v` by substepped Taylor series.
    fn expmv(&self, coef: (f64, f64, f64), h: f64, v: &mut [C64], scratch: &mut [C64]) {
        let bound = h.abs() * self.norm_bound(coef);
        if bound == 0.0 {
            return;
        }
        let substeps = bound.ceil().max(1.0) as usize;
        let tau = h / substeps as f64;
        let minus_i_tau = C64::new(0.0, -tau);
        let mut term = vec![C64::new(0.0, 0.0); v.len()];
        for _ in 0..substeps {
            term.copy_from_slice(v);
            let vnorm = l2(v);
            for k in 1..=40 {
                self.apply(coef, &term, scratch);
                let f = minus_i_tau / k as f64;
                for (t, s) in term.iter_mut().zip(scratch.iter()) {
                    *t = s * f;
                }
                for (a, t) in v.iter_mut().zip(&term) {
                    *a += t;
                }
                if l2(&term) <= 1e-17 * vnorm {
                    break;
                }
            }
        }
    }

    fn cfm4_step(
        &self,
        schedule: &LaserSchedule,
        segment: usize,
        t: f64,
        h: f64,
        psi: &[C64],
        scratch: &mut [C64],
    ) -> Vec<C64> {
        let (d1, o1) = schedule.at_in(segment, t + C1 * h);
        let (d2, o2) = schedule.at_in(segment, t + C2 * h);
        let mut v = psi.to_vec();
        self.expmv((A1 * o1 + A2 * o2, A1 * d1 + A2 * d2, 0.5), h, &mut v, scratch);
        self.expmv((A2 * o1 + A1 * o2, A2 * d1 + A1 * d2, 0.5), h, &mut v, scratch);
        v
    }
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn observe(t: f64, psi: &StateVector, recording: &Recording) -> Result<Observation> {
    let norm = psi.norm();
    let rotated = psi.to_rotated();
    let fermion_number = rotated
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * excitation_count(i) as f64)
        .sum();
    let populations = recording
        .probes
        .iter()
        .map(|p| p.state.overlap(psi))
        .collect::<Result<Vec<_>>>()?;
    let outside_sector = match &recording.sector {
        Some(s) => Some(norm * norm - s.population(psi)?),
        None => None,
    };
    Ok(Observation {
        time: t,
        norm,
        fermion_number,
        populations,
        outside_sector,
    })
}

/// Integrate `i∂_t ψ = H_spin(t) ψ` over the whole schedule.
///
/// `β` and the occupations come from `params`; `Δ(t)` and `Ω₀(t)` come from
/// the schedule and override the static values in `params`.
pub fn propagate(
    initial: &StateVector,
    schedule: &LaserSchedule,
    params: &SystemParams,
    control: &StepControl,
    recording: &Recording,
) -> Result<PropagationResult> {
    let generator = Generator::new(params)?;
    propagate_with(&generator, initial, schedule, control, recording)
}

pub(crate) fn propagate_with(
    generator: &Generator,
    initial: &StateVector,
    schedule: &LaserSchedule,
    control: &StepControl,
    recording: &Recording,
) -> Result<PropagationResult> {
    Frame::Lab.expect(initial.frame())?;
    if initial.sites() != generator.sites {
        return Err(Error::Dimension {
            expected: 1 << generator.sites,
            found: initial.dim(),
        });
    }
    if (initial.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "initial state must be normalized, norm = {}",
            initial.norm()
        )));
    }
    if !(control.tolerance > 0.0 && control.min_step > 0.0 && control.initial_step > 0.0) {
        return Err(Error::validation("step control values must be positive"));
    }
    let span = schedule.span();
    let mut stops: Vec<f64> = recording.times.clone();
    if stops.iter().any(|&t| !(0.0..=span).contains(&t)) {
        return Err(Error::validation(format!("sample times must lie in [0, {span}]")));
    }
    stops.push(0.0);
    stops.push(span);
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut events: Vec<f64> = stops
        .iter()
        .copied()
        .chain(schedule.boundaries().iter().copied())
        .collect();
    events.sort_by(f64::total_cmp);
    events.dedup();

    let sites = generator.sites;
    let mut psi = initial.amplitudes().to_vec();
    let mut scratch = vec![C64::new(0.0, 0.0); psi.len()];
    let mut t = 0.0;
    let mut h = control.initial_step.min(control.max_step);
    let (mut accepted, mut rejected) = (0, 0);

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut observables = Vec::new();
    let mut max_drift: f64 = 0.0;
    let mut record = |t: f64, amps: &[C64]| -> Result<()> {
        let state = StateVector::from_amplitudes(sites, Frame::Lab, amps.to_vec())?;
        let obs = observe(t, &state, recording)?;
        max_drift = max_drift.max((obs.norm - 1.0).abs());
        times.push(t);
        observables.push(obs);
        if recording.keep_states {
            states.push(state);
        }
        Ok(())
    };

    let mut next_stop = 0;
    for &event in &events {
        while t < event {
            let segment = schedule.segment_index(t);
            let target = event.min(schedule.segment_end(segment));
            let remaining = target - t;
            if remaining <= 1e-13 * target.abs().max(1.0) {
                t = target;
                break;
            }
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let full = generator.cfm4_step(schedule, segment, t, step, &psi, &mut scratch);
            let mid = generator.cfm4_step(schedule, segment, t, step / 2.0, &psi, &mut scratch);
            let half = generator.cfm4_step(schedule, segment, t + step / 2.0, step / 2.0, &mid, &mut scratch);
            let diff: f64 = full
                .iter()
                .zip(&half)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let err = diff / 15.0;
            // rounding in the exponentials sets a floor on the estimate
            let allowed = (control.tolerance * step).max(1e-14);
            let factor = if err == 0.0 {
                2.0
            } else {
                (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 2.0)
            };
            if err <= allowed {
                accepted += 1;
                psi = half;
                t = if clipped { target } else { t + step };
                if !clipped || factor < 1.0 {
                    h = (step * factor).min(control.max_step);
                }
            } else {
                rejected += 1;
                h = step * factor;
                if h < control.min_step {
                    return Err(Error::Integration(format!(
                        "step size fell below {:e} at t = {t}",
                        control.min_step
                    )));
                }
            }
        }
        if next_stop < stops.len() && stops[next_stop] == event {
            record(event, &psi)?;
            next_stop += 1;
        }
    }

    Ok(PropagationResult {
        times,
        states,
        observables,
        final_state: StateVector::from_amplitudes(sites, Frame::Lab, psi)?,
        accepted_steps: accepted,
        rejected_steps: rejected,
        max_norm_drift: max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh_complex;

    #[test]
    fn zero_hamiltonian_leaves_state_unchanged() {
        let p = SystemParams::clean(3, 0.0, 0.0, 0.0).unwrap();
        let s = LaserSchedule::constant(5.0, 0.0, 0.0).unwrap();
        let psi = StateVector::basis_state(3, Frame::Lab, 5);
        let r = propagate(&psi, &s, &p, &StepControl::default(), &Recording::default()).unwrap();
        assert_eq!(r.final_state, psi);
        assert_eq!(r.times, vec![0.0, 5.0]);
    }

    #[test]
    fn constant_hamiltonian_matches_eigen_exponential() {
        let l = 4;
        let p = SystemParams::new(l, 1.0, 0.7, -0.4, vec![1, 2, 1, 3]).unwrap();
        let t_end = 3.0;
        let s = LaserSchedule::constant(t_end, p.delta(), p.omega0()).unwrap();
        let psi = StateVector::no_rydberg(l);
        let r = propagate(&psi, &s, &p, &StepControl::default(), &Recording::default()).unwrap();

        let eig = eigh_complex(build_h_spin(&p).unwrap().to_dense());
        let v = &eig.vectors;
        let c = v.adjoint() * nalgebra::DVector::from_column_slice(psi.amplitudes());
        let phased = nalgebra::DVector::from_iterator(
            c.len(),
            c.iter()
                .zip(&eig.values)
                .map(|(ci, e)| ci * C64::from_polar(1.0, -e * t_end)),
        );
        let exact = v * phased;
        let got = r.final_state.amplitudes();
        let dev = got
            .iter()
            .zip(exact.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-8, "deviation {dev}");
        assert!(r.max_norm_drift < 1e-9);
    }

    #[test]
    fn single_site_rabi_oscillation() {
        // Without interactions the two sites are independent resonant
        // two-level atoms, each with P_R(t) = sin²(Ω₀t) and period π/Ω₀.
        let p = SystemParams::clean(2, 0.0, 0.0, 0.0).unwrap();
        let omega0 = 1.3;
        let span = std::f64::consts::PI / omega0;
        let s = LaserSchedule::constant(span, 0.0, omega0).unwrap();
        let rec = Recording {
            probes: vec![Probe::new(
                "R on site 1 only",
                &StateVector::basis_state(2, Frame::Lab, 0b01),
            )],
            ..Recording::uniform(span, 20)
        };
        let r = propagate(&StateVector::no_rydberg(2), &s, &p, &StepControl::default(), &rec).unwrap();
        for o in &r.observables {
            let excited = (omega0 * o.time).sin().powi(2);
            assert!((o.populations[0] - excited * (1.0 - excited)).abs() < 1e-8);
        }
        assert!((r.final_state.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn oscillating_drive_matches_fine_midpoint_exponentials() {
        use crate::dynamics::{DeltaProfile, OmegaProfile, Segment};
        let l = 3;
        let p = SystemParams::clean(l, 1.0, 0.0, 0.0).unwrap();
        let s = LaserSchedule::new(vec![Segment {
            duration: 2.0,
            delta: DeltaProfile::Sinusoid {
                offset: 0.3,
                amplitude: 0.8,
                omega: 5.0,
                phase: 0.4,
            },
            omega0: OmegaProfile::Ramp { from: 0.5, to: 2.0 },
        }])
        .unwrap();
        let psi = StateVector::no_rydberg(l);
        let r = propagate(&psi, &s, &p, &StepControl::default(), &Recording::default()).unwrap();

        // reference: exact exponentials of H at the midpoints of 4000 slices
        let n = 4000;
        let h = s.span() / n as f64;
        let mut v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        for i in 0..n {
            let (delta, omega0) = s.at((i as f64 + 0.5) * h);
            let hm = build_h_spin(&p.with_omega0(omega0).unwrap().with_delta(delta).unwrap()).unwrap();
            let eig = eigh_complex(hm.to_dense());
            let c = eig.vectors.adjoint() * &v;
            let c = nalgebra::DVector::from_iterator(
                c.len(),
                c.iter()
                    .zip(&eig.values)
                    .map(|(ci, e)| ci * C64::from_polar(1.0, -e * h)),
            );
            v = &eig.vectors * c;
        }
        let dev = r
            .final_state
            .amplitudes()
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        // midpoint rule error is O(h²) ≈ 1e-6 here
        assert!(dev < 1e-5, "deviation {dev}");
    }

    #[test]
    fn energy_is_conserved_for_static_schedule() {
        let l = 4;
        let p = SystemParams::clean(l, 1.0, 1.5, 0.3).unwrap();
        let s = LaserSchedule::constant(100.0, p.delta(), p.omega0()).unwrap();
        let g = Generator::new(&p).unwrap();
        let psi = StateVector::no_rydberg(l);
        let r = propagate_with(&g, &psi, &s, &StepControl::default(), &Recording::default()).unwrap();
        let e0 = g.energy(1.5, 0.3, psi.amplitudes());
        let e1 = g.energy(1.5, 0.3, r.final_state.amplitudes());
        let h_norm = g.norm_bound((1.5, 0.3, 1.0));
        assert!((e1 - e0).abs() < 1e-8 * h_norm, "drift {}", (e1 - e0).abs());
        assert!(r.max_norm_drift < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = SystemParams::clean(3, 1.0, 1.0, 0.0).unwrap();
        let s = LaserSchedule::constant(1.0, 0.0, 1.0).unwrap();
        let rot = StateVector::fermion_vacuum(3);
        assert!(propagate(&rot, &s, &p, &StepControl::default(), &Recording::default()).is_err());
        let rec = Recording {
            times: vec![2.0],
            ..Recording::default()
        };
        let lab = StateVector::no_rydberg(3);
        assert!(propagate(&lab, &s, &p, &StepControl::default(), &rec).is_err());
    }
}

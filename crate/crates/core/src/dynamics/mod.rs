//! Driven dynamics of the lab-frame Hamiltonian with time-dependent `Δ(t)`
//! and `Ω₀(t)`.

mod propagate;
mod protocols;
mod schedule;

pub use propagate::{propagate, Observation, Probe, PropagationResult, Recording, StepControl};
pub use protocols::{
    adiabatic_prepare_ground, extract_rabi_period, fermion_number_readout, ramp_min_gap, resonance_frequency,
    rf_spectroscopy, rwa_coupling, rwa_rabi_period, second_pulse_bare_frequency, two_step_pulse, AdiabaticRamp,
    FermionCount, PreparedGround, PulseReport, RabiTrace, RfDrive, TwoStepReport,
};
pub use schedule::{DeltaProfile, LaserSchedule, OmegaProfile, Segment};

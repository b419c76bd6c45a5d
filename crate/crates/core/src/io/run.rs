//! Experiment drivers and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::basis::StateVector;
use crate::disorder::{absorption_profile, QuenchEnsemble};
use crate::dynamics::{
    propagate, resonance_frequency, rf_spectroscopy, rwa_rabi_period, two_step_pulse, Probe, Recording, RfDrive,
    StepControl,
};
use crate::error::{Error, Result};
use crate::fermion::{free_fermion_spectrum, ORACLE_TOL};
use crate::flow::{spectral_flow, symmetric_block, DetuningPath};
use crate::io::config::{Experiment, ExperimentConfig};
use crate::linalg::eigh_real;
use crate::spin::{build_h_spin, build_h_xy, frame_identity_residual, DENSE_CAP};
use crate::symmetry::{canonical_representative, symmetric_sector};

/// Samples recorded along an adiabatic ramp.
const ADIABATIC_SAMPLES: usize = 200;

/// Gap threshold for counting avoided crossings of the `|0⟩` curve.
const AVOIDED_CROSSING_GAP: f64 = 0.2;

/// Tolerance of the frame-identity check.
const FRAME_TOL: f64 = 1e-12;

/// A result table: `#` metadata lines, a header row and data rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Failed checks of a `validate` run.
    pub failures: usize,
}

impl Table {
    fn new(config: &ExperimentConfig, columns: &[&'static str]) -> Self {
        let meta = [
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("experiment", config.experiment.name().to_string()),
            ("seed", config.seed.to_string()),
            ("config_sha256", config.hash()),
            (
                "units",
                "beta (energies and frequencies in units of beta, times in units of 1/beta)".to_string(),
            ),
            ("L", config.sites.to_string()),
            ("omega", num(config.omega)),
            ("delta", num(config.delta)),
        ];
        Table {
            metadata: meta.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            failures: 0,
        }
    }

    fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}").expect("writing to a string");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Where the table goes: the configured path, or `<experiment>.csv`.
pub fn output_path(config: &ExperimentConfig) -> PathBuf {
    config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.experiment.name())))
}

pub fn write_table(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv()).map_err(|source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

/// Run the configured experiment.
pub fn run(config: &ExperimentConfig) -> Result<Table> {
    match config.experiment {
        Experiment::Spectrum => spectrum(config),
        Experiment::Flow => flow(config),
        Experiment::Adiabatic => adiabatic(config),
        Experiment::Rabi => rabi(config),
        Experiment::Pulse2 => pulse2(config),
        Experiment::Absorption => absorption(config),
        Experiment::Validate => validate(config),
    }
}

fn spectrum(config: &ExperimentConfig) -> Result<Table> {
    let params = config.params()?;
    let mut t = Table::new(config, &["sector", "level_index", "energy"]);
    if params.is_clean() {
        let sector = symmetric_sector(config.sites)?;
        let values = eigh_real(symmetric_block(&params, &sector)?).values;
        t.meta("symmetric_rank", sector.rank().to_string());
        if values.len() > 1 {
            t.meta("symmetric_gap", num(values[1] - values[0]));
        }
        t.meta("resonance_frequency", num(resonance_frequency(&params)?));
        for (i, e) in values.iter().enumerate() {
            t.rows.push(vec!["symmetric".into(), i.to_string(), num(*e)]);
        }
    }
    if config.sites <= DENSE_CAP {
        for (i, e) in build_h_spin(&params)?.eigenvalues()?.iter().enumerate() {
            t.rows.push(vec!["full".into(), i.to_string(), num(*e)]);
        }
    }
    Ok(t)
}

fn flow(config: &ExperimentConfig) -> Result<Table> {
    let spec = config
        .flow
        .as_ref()
        .ok_or_else(|| Error::validation("flow section missing"))?;
    let params = config.params()?;
    let sector = symmetric_sector(config.sites)?;
    let grid = spec.grid();
    let path = match &spec.deltas {
        Some(d) => DetuningPath::Tabulated(d.clone()),
        None => DetuningPath::Fixed(config.delta),
    };
    let flow = spectral_flow(&params, &grid, &sector, &path)?;
    let mut t = Table::new(config, &["omega", "level_index", "energy"]);
    t.meta("level_index", "curve label, numbered by energy at the first grid point");
    t.meta("vacuum_curve", flow.vacuum_curve.to_string());
    t.meta("vacuum_stays_ground", flow.vacuum_stays_ground().to_string());
    t.meta("vacuum_min_gap", num(flow.vacuum_min_gap()));
    t.meta(
        "vacuum_avoided_crossings_below_0.2",
        flow.vacuum_avoided_crossings(AVOIDED_CROSSING_GAP).to_string(),
    );
    for (c, curve) in flow.curves.iter().enumerate() {
        for (w, e) in grid.iter().zip(curve) {
            t.rows.push(vec![num(*w), c.to_string(), num(*e)]);
        }
    }
    Ok(t)
}

fn adiabatic(config: &ExperimentConfig) -> Result<Table> {
    let params = config.params()?;
    let schedule = match (&config.schedule, &config.ramp) {
        (Some(s), _) => s.clone(),
        (None, Some(r)) => r.schedule()?,
        (None, None) => return Err(Error::validation("adiabatic run needs a ramp or a schedule")),
    };
    let l = config.sites;
    let vacuum = StateVector::fermion_vacuum(l).to_lab();
    let recording = Recording {
        probes: vec![Probe::new("G", &vacuum)],
        ..Recording::uniform(schedule.span(), ADIABATIC_SAMPLES)
    };
    let run = propagate(
        &StateVector::no_rydberg(l),
        &schedule,
        &params,
        &StepControl::default(),
        &recording,
    )?;

    let mut t = Table::new(config, &["time", "delta", "omega0", "fidelity", "fermion_number"]);
    t.meta("final_fidelity", num(vacuum.overlap(&run.final_state)?));
    if params.is_clean() {
        let (delta, omega0) = schedule.at(schedule.span());
        let end = params.with_omega0(omega0)?.with_delta(delta)?;
        let sector = symmetric_sector(l)?;
        let ground = eigh_real(symmetric_block(&end, &sector)?);
        let coeffs: Vec<_> = ground.vectors.column(0).iter().map(|&x| x.into()).collect();
        let state = sector.embed(&coeffs, crate::basis::Frame::Lab)?;
        t.meta("exact_ground_fidelity", num(vacuum.overlap(&state)?));
    }
    t.meta("accepted_steps", run.accepted_steps.to_string());
    t.meta("rejected_steps", run.rejected_steps.to_string());
    t.meta("max_norm_drift", num(run.max_norm_drift));
    for o in &run.observables {
        let (delta, omega0) = schedule.at(o.time);
        t.rows.push(vec![
            num(o.time),
            num(delta),
            num(omega0),
            num(o.populations[0]),
            num(o.fermion_number),
        ]);
    }
    Ok(t)
}

fn rabi(config: &ExperimentConfig) -> Result<Table> {
    let d = config
        .drive
        .as_ref()
        .ok_or_else(|| Error::validation("drive section missing"))?;
    let params = config.params()?;
    let drive = RfDrive {
        amplitude: d.amplitude,
        omega: d.omega,
        duration: d.duration,
        phase: d.phase,
    };
    let initial = StateVector::fermion_vacuum(config.sites);
    let trace = rf_spectroscopy(&initial, &params, &drive, d.samples, &StepControl::default())?;
    let mut t = Table::new(config, &["time", "p1", "fermion_number", "outside_symmetric"]);
    t.meta("drive_amplitude", num(d.amplitude));
    t.meta("drive_omega", num(d.omega));
    t.meta("resonance_frequency", num(resonance_frequency(&params)?));
    t.meta("rwa_period", num(rwa_rabi_period(d.amplitude, config.sites)));
    t.meta("peak_p1", num(trace.peak));
    t.meta("period", trace.period.map_or_else(|| "none".to_string(), num));
    t.meta("max_outside_symmetric", num(trace.max_outside_symmetric));
    for (o, p1) in trace.run.observables.iter().zip(&trace.p1) {
        t.rows.push(vec![
            num(o.time),
            num(*p1),
            num(o.fermion_number),
            num(o.outside_sector.unwrap_or(0.0)),
        ]);
    }
    Ok(t)
}

fn pulse2(config: &ExperimentConfig) -> Result<Table> {
    let spec = config
        .pulse2
        .as_ref()
        .ok_or_else(|| Error::validation("pulse2 section missing"))?;
    let params = config.params()?;
    let initial = StateVector::fermion_vacuum(config.sites);
    let r = two_step_pulse(&initial, &params, spec.n, spec.amplitude, &StepControl::default())?;
    let mut t = Table::new(config, &["state", "population"]);
    t.meta("target", format!("2_{}", spec.n));
    t.meta("amplitude", num(spec.amplitude));
    for (name, p) in [("first", &r.first), ("second", &r.second)] {
        t.meta(&format!("{name}_pulse_frequency"), num(p.frequency));
        t.meta(&format!("{name}_pulse_bare_frequency"), num(p.bare_frequency));
        t.meta(&format!("{name}_pulse_duration"), num(p.duration));
        t.meta(&format!("{name}_pulse_target_population"), num(p.target_population));
    }
    t.rows.push(vec!["G".into(), num(r.ground)]);
    t.rows.push(vec!["1".into(), num(r.one)]);
    for (m, p) in r.two.iter().enumerate() {
        t.rows.push(vec![format!("2_{}", m + 1), num(*p)]);
    }
    Ok(t)
}

fn absorption(config: &ExperimentConfig) -> Result<Table> {
    let spec = config
        .ensemble
        .as_ref()
        .ok_or_else(|| Error::validation("ensemble section missing"))?;
    let bins = config.bins.clone().unwrap_or_default();
    let ensemble = QuenchEnsemble::new(config.sites, spec.atoms, spec.realizations, config.seed)?;
    let p = absorption_profile(&ensemble, config.omega, config.beta, &bins)?;
    let mut t = Table::new(config, &["omega", "intensity"]);
    let m = &p.metadata;
    t.meta("atoms", spec.atoms.to_string());
    t.meta("mean_occupation", num(m.mean_occupation));
    t.meta("realizations", m.realizations.to_string());
    t.meta("resonance_frequency", num(p.omega_l));
    t.meta("bin_width", num(p.bin_width));
    t.meta("peak_position", num(p.peak_position()));
    t.meta("fwhm", num(p.fwhm()));
    t.meta("red_weight_fraction", num(p.red_weight_fraction()));
    t.meta("empty_site_realizations", m.empty_site_realizations.to_string());
    t.meta("weight_outside_window", num(m.weight_outside_window));
    for w in ensemble.warnings() {
        t.meta("warning", w);
    }
    for (w, i) in p.omega.iter().zip(&p.intensity) {
        t.rows.push(vec![num(*w), num(*i)]);
    }
    Ok(t)
}

fn validate(config: &ExperimentConfig) -> Result<Table> {
    let params = config.params()?;
    let l = config.sites;
    let mut t = Table::new(config, &["check", "value", "tolerance", "pass"]);
    let mut checks: Vec<(&str, f64, f64)> = vec![("frame_identity", frame_identity_residual(&params)?, FRAME_TOL)];

    let sector = symmetric_sector(l)?;
    let mut reps: Vec<usize> = (0..1usize << l).map(|i| canonical_representative(i, l)).collect();
    reps.sort_unstable();
    reps.dedup();
    checks.push(("symmetric_rank", sector.rank().abs_diff(reps.len()) as f64, 0.0));

    if params.is_clean() {
        let ed = build_h_xy(&params).eigenvalues()?;
        let fermion = free_fermion_spectrum(&params)?;
        let dev = ed.iter().zip(&fermion).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(("fermion_oracle", dev, ORACLE_TOL));
    }

    for (name, value, tol) in checks {
        let pass = value <= tol;
        t.failures += usize::from(!pass);
        t.rows.push(vec![name.into(), num(value), num(tol), pass.to_string()]);
    }
    t.meta("failures", t.failures.to_string());
    Ok(t)
}

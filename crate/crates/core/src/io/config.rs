//! JSON experiment configuration. Parsing walks the document key by key and
//! reports every problem it finds, not only the first.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::disorder::BinSpec;
use crate::dynamics::{rwa_rabi_period, AdiabaticRamp, LaserSchedule, Segment};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::spin::{DEFAULT_ED_CAP, DENSE_CAP};

/// Largest ring for the single-fermion absorption experiment.
pub const ABSORPTION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    Flow,
    Adiabatic,
    Rabi,
    Pulse2,
    Absorption,
    Validate,
}

const SECTIONS: [&str; 7] = ["flow", "ramp", "schedule", "drive", "pulse2", "ensemble", "bins"];

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Spectrum,
        Experiment::Flow,
        Experiment::Adiabatic,
        Experiment::Rabi,
        Experiment::Pulse2,
        Experiment::Absorption,
        Experiment::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Flow => "flow",
            Experiment::Adiabatic => "adiabatic",
            Experiment::Rabi => "rabi",
            Experiment::Pulse2 => "pulse2",
            Experiment::Absorption => "absorption",
            Experiment::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Optional sections this experiment reads.
    pub fn sections(self) -> &'static [&'static str] {
        match self {
            Experiment::Flow => &["flow"],
            Experiment::Adiabatic => &["ramp", "schedule"],
            Experiment::Rabi => &["drive"],
            Experiment::Pulse2 => &["pulse2"],
            Experiment::Absorption => &["ensemble", "bins"],
            Experiment::Spectrum | Experiment::Validate => &[],
        }
    }

    /// Largest ring the experiment accepts.
    pub fn site_cap(self) -> usize {
        match self {
            Experiment::Absorption => ABSORPTION_CAP,
            Experiment::Validate => DENSE_CAP,
            _ => DEFAULT_ED_CAP,
        }
    }

    fn allows_occupations(self) -> bool {
        matches!(
            self,
            Experiment::Spectrum | Experiment::Adiabatic | Experiment::Validate
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit system of every physical number in a config. Only `"beta"` exists:
/// energies and frequencies in units of `β`, times in units of `1/β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Beta,
}

/// Rabi-frequency sweep. Grid values are collective frequencies `Ω`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// One detuning per grid point; the top-level `delta` otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
}

impl FlowSpec {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.omega_max
                } else {
                    self.omega_min + (self.omega_max - self.omega_min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriveSpec {
    pub amplitude: f64,
    pub omega: f64,
    pub duration: f64,
    pub phase: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pulse2Spec {
    pub n: usize,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub atoms: u32,
    pub realizations: usize,
}

/// A parsed and validated experiment, with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub units: Units,
    #[serde(rename = "L")]
    pub sites: usize,
    pub beta: f64,
    /// Collective Rabi frequency `Ω = Ω₀√N₀`.
    pub omega: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub occupations: Option<Vec<u32>>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp: Option<AdiabaticRamp>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<LaserSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse2: Option<Pulse2Spec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<BinSpec>,
}

impl ExperimentConfig {
    /// Mean occupation `N₀` of the given occupations (1 for a clean ring).
    pub fn mean_occupation(&self) -> f64 {
        match &self.occupations {
            Some(n) => n.iter().map(|&x| f64::from(x)).sum::<f64>() / n.len() as f64,
            None => 1.0,
        }
    }

    /// Single-atom Rabi frequency `Ω₀ = Ω/√N₀`.
    pub fn omega0(&self) -> f64 {
        self.omega / self.mean_occupation().sqrt()
    }

    pub fn params(&self) -> Result<SystemParams> {
        let occ = self.occupations.clone().unwrap_or_else(|| vec![1; self.sites]);
        SystemParams::new(self.sites, self.beta, self.omega0(), self.delta, occ)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, ignoring `output_path`.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig {
            output_path: None,
            ..self.clone()
        };
        let digest = Sha256::digest(serde_json::to_vec(&canonical).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Key-by-key reader over one JSON object. `null` counts as absent.
struct Fields<'a> {
    prefix: String,
    map: &'a Map<String, Value>,
    used: BTreeSet<&'a str>,
}

impl<'a> Fields<'a> {
    fn new(prefix: &str, map: &'a Map<String, Value>) -> Self {
        Fields {
            prefix: prefix.to_string(),
            map,
            used: BTreeSet::new(),
        }
    }

    fn name(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn has(&self, key: &str) -> bool {
        self.map.get(key).is_some_and(|v| !v.is_null())
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.insert(k.as_str());
        (!v.is_null()).then_some(v)
    }

    fn fail(&self, errs: &mut Vec<String>, key: &str, msg: impl fmt::Display) {
        errs.push(format!("{}: {msg}", self.name(key)));
    }

    fn f64(&mut self, errs: &mut Vec<String>, key: &str) -> Option<f64> {
        let v = self.get(key)?;
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.fail(errs, key, format!("expected a number, got {v}"));
                None
            }
        }
    }

    fn uint(&mut self, errs: &mut Vec<String>, key: &str) -> Option<u64> {
        let v = self.get(key)?;
        let r = v.as_u64();
        if r.is_none() {
            self.fail(errs, key, format!("expected a non-negative integer, got {v}"));
        }
        r
    }

    fn usize(&mut self, errs: &mut Vec<String>, key: &str) -> Option<usize> {
        let v = self.uint(errs, key)?;
        let r = usize::try_from(v).ok();
        if r.is_none() {
            self.fail(errs, key, format!("{v} is too large"));
        }
        r
    }

    fn u32(&mut self, errs: &mut Vec<String>, key: &str) -> Option<u32> {
        let v = self.uint(errs, key)?;
        let r = u32::try_from(v).ok();
        if r.is_none() {
            self.fail(errs, key, format!("{v} is too large"));
        }
        r
    }

    fn string(&mut self, errs: &mut Vec<String>, key: &str) -> Option<&'a str> {
        let v = self.get(key)?;
        let r = v.as_str();
        if r.is_none() {
            self.fail(errs, key, format!("expected a string, got {v}"));
        }
        r
    }

    fn list<T>(
        &mut self,
        errs: &mut Vec<String>,
        key: &str,
        item: impl Fn(&Value) -> Option<T>,
        what: &str,
    ) -> Option<Vec<T>> {
        let v = self.get(key)?;
        let Some(arr) = v.as_array() else {
            self.fail(errs, key, format!("expected an array of {what}, got {v}"));
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        let mut ok = true;
        for (i, x) in arr.iter().enumerate() {
            match item(x) {
                Some(t) => out.push(t),
                None => {
                    errs.push(format!("{}[{i}]: expected {what}, got {x}", self.name(key)));
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn object(&mut self, errs: &mut Vec<String>, key: &str) -> Option<Fields<'a>> {
        let v = self.get(key)?;
        match v.as_object() {
            Some(m) => Some(Fields::new(&self.name(key), m)),
            None => {
                self.fail(errs, key, format!("expected an object, got {v}"));
                None
            }
        }
    }

    fn finish(self, errs: &mut Vec<String>) {
        for k in self.map.keys() {
            if !self.used.contains(k.as_str()) {
                errs.push(format!("{}: unknown key", self.name(k)));
            }
        }
    }
}

fn check(errs: &mut Vec<String>, ok: bool, field: &str, msg: impl fmt::Display) {
    if !ok {
        errs.push(format!("{field}: {msg}"));
    }
}

/// Parse and validate a JSON experiment description.
///
/// On failure the error lists every problem found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("not valid JSON: {e}")]))?;
    let Value::Object(map) = value else {
        return Err(Error::Config(vec!["the document must be a JSON object".into()]));
    };
    let mut errs = Vec::new();
    let mut top = Fields::new("", &map);

    let experiment = match top.string(&mut errs, "experiment") {
        Some(name) => {
            let e = Experiment::from_name(name);
            if e.is_none() {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                errs.push(format!(
                    "experiment: unknown experiment {name:?}, expected one of {}",
                    names.join(", ")
                ));
            }
            e
        }
        None => {
            if !top.has("experiment") {
                errs.push("experiment: missing".into());
            }
            None
        }
    };
    let absorption = experiment == Some(Experiment::Absorption);

    match top.string(&mut errs, "units") {
        Some("beta") => {}
        Some(other) => errs.push(format!("units: only \"beta\" is supported, got {other:?}")),
        None if !top.has("units") => {
            errs.push("units: missing; state \"units\": \"beta\" (energies in units of beta, times in 1/beta)".into())
        }
        None => {}
    }

    let parsed_sites = top.usize(&mut errs, "L");
    if parsed_sites.is_none() && !top.has("L") && !absorption {
        errs.push("L: missing".into());
    }
    let sites = parsed_sites.unwrap_or(if absorption { 50 } else { 0 });
    if parsed_sites.is_some() || absorption {
        check(
            &mut errs,
            sites >= 2,
            "L",
            format!("ring needs at least 2 sites, got {sites}"),
        );
        if let Some(e) = experiment {
            check(
                &mut errs,
                sites <= e.site_cap(),
                "L",
                format!("{sites} sites exceeds the cap of {} for {e}", e.site_cap()),
            );
        }
    }

    let beta = top.f64(&mut errs, "beta").unwrap_or(1.0);
    check(
        &mut errs,
        beta == 1.0,
        "beta",
        format!("beta is the unit of energy, so it must be 1, got {beta}"),
    );

    if top.has("omega") && top.has("omega_over_beta") {
        errs.push("omega: given twice (also as omega_over_beta)".into());
    }
    let omega = top
        .f64(&mut errs, "omega")
        .or_else(|| top.f64(&mut errs, "omega_over_beta"));
    if omega.is_none() && !top.has("omega") && !top.has("omega_over_beta") && !absorption {
        errs.push("omega: missing".into());
    }
    let omega = omega.unwrap_or(if absorption { 10.0 } else { 0.0 });
    check(
        &mut errs,
        omega >= 0.0,
        "omega",
        format!("must be non-negative, got {omega}"),
    );

    let delta = top.f64(&mut errs, "delta").unwrap_or(0.0);

    let occupations = top.list(
        &mut errs,
        "occupations",
        |v| v.as_u64().and_then(|x| u32::try_from(x).ok()),
        "non-negative integers",
    );
    if let Some(occ) = &occupations {
        check(
            &mut errs,
            occ.len() == sites,
            "occupations",
            format!("{} entries for {sites} sites", occ.len()),
        );
        check(
            &mut errs,
            occ.iter().any(|&n| n > 0),
            "occupations",
            "at least one site must be occupied",
        );
        if let Some(e) = experiment.filter(|e| !e.allows_occupations()) {
            errs.push(format!("occupations: not accepted by {e}, which needs a uniform ring"));
        }
        let clean = occ.windows(2).all(|w| w[0] == w[1]);
        if experiment == Some(Experiment::Spectrum) && !clean && sites > DENSE_CAP {
            errs.push(format!(
                "occupations: a non-uniform ring has no symmetric sector, and the full spectrum is limited to {DENSE_CAP} sites"
            ));
        }
    }
    let occupations = occupations.filter(|o| o.windows(2).any(|w| w[0] != w[1]) || o.first() != Some(&1));

    let seed = top.uint(&mut errs, "seed").unwrap_or(0);
    let output_path = top.string(&mut errs, "output_path").map(PathBuf::from);

    let n0 = occupations
        .as_ref()
        .filter(|o| o.len() == sites && !o.is_empty())
        .map_or(1.0, |o| o.iter().map(|&x| f64::from(x)).sum::<f64>() / sites as f64);
    let omega0 = omega / n0.sqrt();
    let omega_l = 2.0 * omega + beta / 2.0;

    let mut sections: Vec<(&str, Fields<'_>)> = Vec::new();
    let mut schedule_value = None;
    for name in SECTIONS {
        if !top.has(name) {
            top.get(name);
            continue;
        }
        if let Some(e) = experiment {
            if !e.sections().contains(&name) {
                top.get(name);
                errs.push(format!("{name}: section does not apply to experiment {e}"));
                continue;
            }
        }
        if name == "schedule" {
            schedule_value = top.get(name);
        } else if let Some(f) = top.object(&mut errs, name) {
            sections.push((name, f));
        }
    }
    top.finish(&mut errs);
    let mut section = |name: &str| {
        sections
            .iter()
            .position(|(n, _)| *n == name)
            .map(|i| sections.remove(i).1)
    };

    let mut cfg = ExperimentConfig {
        experiment: experiment.unwrap_or(Experiment::Spectrum),
        units: Units::Beta,
        sites,
        beta,
        omega,
        delta,
        occupations,
        seed,
        output_path,
        flow: None,
        ramp: None,
        schedule: None,
        drive: None,
        pulse2: None,
        ensemble: None,
        bins: None,
    };

    match experiment {
        Some(Experiment::Flow) => {
            let mut f = section("flow");
            let mut read = |key: &str, errs: &mut Vec<String>| f.as_mut().and_then(|f| f.f64(errs, key));
            let omega_min = read("omega_min", &mut errs).unwrap_or(0.0);
            let omega_max = read("omega_max", &mut errs).unwrap_or(omega);
            let points = f.as_mut().and_then(|f| f.usize(&mut errs, "points")).unwrap_or(101);
            let deltas = f
                .as_mut()
                .and_then(|f| f.list(&mut errs, "deltas", Value::as_f64, "numbers"));
            check(
                &mut errs,
                omega_min >= 0.0,
                "flow.omega_min",
                format!("must be non-negative, got {omega_min}"),
            );
            check(
                &mut errs,
                omega_max > omega_min,
                "flow.omega_max",
                format!("must exceed omega_min, got {omega_max}"),
            );
            check(
                &mut errs,
                points >= 2,
                "flow.points",
                format!("need at least 2 grid points, got {points}"),
            );
            if let Some(d) = &deltas {
                check(
                    &mut errs,
                    d.len() == points,
                    "flow.deltas",
                    format!("{} entries for {points} points", d.len()),
                );
            }
            if let Some(f) = f {
                f.finish(&mut errs);
            }
            cfg.flow = Some(FlowSpec {
                omega_min,
                omega_max,
                points,
                deltas,
            });
        }
        Some(Experiment::Adiabatic) => {
            let f = section("ramp");
            if let Some(v) = schedule_value {
                if f.is_some() {
                    errs.push("schedule: give either ramp or schedule, not both".into());
                }
                match serde_json::from_value::<Vec<Segment>>(v.clone()) {
                    Ok(segments) => match LaserSchedule::new(segments) {
                        Ok(s) => cfg.schedule = Some(s),
                        Err(e) => errs.push(format!("schedule: {e}")),
                    },
                    Err(e) => errs.push(format!("schedule: {e}")),
                }
            } else {
                let mut f = f;
                let mut read = |key: &str, errs: &mut Vec<String>| f.as_mut().and_then(|f| f.f64(errs, key));
                let ramp = AdiabaticRamp {
                    omega_final: read("omega_final", &mut errs).unwrap_or(omega0),
                    duration: read("duration", &mut errs).unwrap_or(200.0),
                    delta0: read("delta0", &mut errs).unwrap_or(1.0),
                    delta_final: read("delta_final", &mut errs).unwrap_or(delta),
                    exponent: read("exponent", &mut errs).unwrap_or(2.0),
                };
                check(
                    &mut errs,
                    ramp.omega_final >= 0.0,
                    "ramp.omega_final",
                    "must be non-negative",
                );
                check(&mut errs, ramp.duration > 0.0, "ramp.duration", "must be positive");
                check(
                    &mut errs,
                    ramp.delta0 > 0.0,
                    "ramp.delta0",
                    "must be positive so that |0⟩ starts as the ground state",
                );
                check(&mut errs, ramp.exponent > 0.0, "ramp.exponent", "must be positive");
                if let Some(f) = f {
                    f.finish(&mut errs);
                }
                cfg.ramp = Some(ramp);
            }
        }
        Some(Experiment::Rabi) => {
            let mut f = section("drive");
            let mut read = |key: &str, errs: &mut Vec<String>| f.as_mut().and_then(|f| f.f64(errs, key));
            let amplitude = read("amplitude", &mut errs).unwrap_or(0.2);
            let drive_omega = read("omega", &mut errs).unwrap_or(omega_l);
            let phase = read("phase", &mut errs).unwrap_or(0.0);
            let duration = read("duration", &mut errs);
            let samples = f.as_mut().and_then(|f| f.usize(&mut errs, "samples")).unwrap_or(600);
            check(
                &mut errs,
                amplitude > 0.0,
                "drive.amplitude",
                format!("must be positive, got {amplitude}"),
            );
            check(
                &mut errs,
                drive_omega > 0.0,
                "drive.omega",
                format!("must be positive, got {drive_omega}"),
            );
            check(&mut errs, samples >= 1, "drive.samples", "need at least one sample");
            let duration = duration.unwrap_or_else(|| 1.5 * rwa_rabi_period(amplitude, sites.max(1)));
            check(
                &mut errs,
                duration > 0.0 && duration.is_finite(),
                "drive.duration",
                "must be positive",
            );
            if let Some(f) = f {
                f.finish(&mut errs);
            }
            cfg.drive = Some(DriveSpec {
                amplitude,
                omega: drive_omega,
                duration,
                phase,
                samples,
            });
        }
        Some(Experiment::Pulse2) => {
            let mut f = section("pulse2");
            let n = f.as_mut().and_then(|f| f.usize(&mut errs, "n")).unwrap_or(1);
            let amplitude = f.as_mut().and_then(|f| f.f64(&mut errs, "amplitude")).unwrap_or(0.01);
            check(
                &mut errs,
                n >= 1 && n <= sites / 2,
                "pulse2.n",
                format!("need 1 ≤ n ≤ {}, got {n}", sites / 2),
            );
            check(
                &mut errs,
                amplitude > 0.0,
                "pulse2.amplitude",
                format!("must be positive, got {amplitude}"),
            );
            if let Some(f) = f {
                f.finish(&mut errs);
            }
            cfg.pulse2 = Some(Pulse2Spec { n, amplitude });
        }
        Some(Experiment::Absorption) => {
            let mut f = section("ensemble");
            let mean = f.as_mut().and_then(|f| f.u32(&mut errs, "mean_occupation"));
            let atoms = f.as_mut().and_then(|f| f.u32(&mut errs, "atoms"));
            let realizations = f
                .as_mut()
                .and_then(|f| f.usize(&mut errs, "realizations"))
                .unwrap_or(1000);
            if mean.is_some() && atoms.is_some() {
                errs.push("ensemble: give either mean_occupation or atoms, not both".into());
            }
            let atoms = atoms.unwrap_or_else(|| mean.unwrap_or(20).saturating_mul(sites as u32));
            check(&mut errs, atoms > 0, "ensemble", "needs at least one atom");
            check(
                &mut errs,
                realizations > 0,
                "ensemble.realizations",
                "needs at least one realization",
            );
            if let Some(f) = f {
                f.finish(&mut errs);
            }
            cfg.ensemble = Some(EnsembleSpec { atoms, realizations });

            let mut b = section("bins");
            let center = b.as_mut().and_then(|b| b.f64(&mut errs, "center")).unwrap_or(omega_l);
            let half_width = b.as_mut().and_then(|b| b.f64(&mut errs, "half_width")).unwrap_or(2.5);
            let bins = b.as_mut().and_then(|b| b.usize(&mut errs, "bins")).unwrap_or(200);
            check(
                &mut errs,
                half_width > 0.0,
                "bins.half_width",
                format!("must be positive, got {half_width}"),
            );
            check(&mut errs, bins > 0, "bins.bins", "need at least one bin");
            if let Some(b) = b {
                b.finish(&mut errs);
            }
            cfg.bins = Some(BinSpec {
                center: Some(center),
                half_width,
                bins,
            });
        }
        _ => {}
    }

    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_spectrum() {
        let c = parse_config(r#"{"experiment":"spectrum","units":"beta","L":4,"omega":1.0,"delta":0.0,"beta":1.0}"#)
            .unwrap();
        assert_eq!(c.experiment, Experiment::Spectrum);
        assert_eq!(c.sites, 4);
        assert_eq!(c.omega0(), 1.0);
        assert!(c.params().unwrap().is_clean());
    }

    #[test]
    fn negative_size_names_the_field() {
        let e = errors(r#"{"experiment":"spectrum","units":"beta","L":-3,"omega":1.0}"#);
        assert_eq!(e.len(), 1);
        assert!(e[0].starts_with("L:"), "{e:?}");
    }

    #[test]
    fn absorption_defaults() {
        let c = parse_config(
            r#"{"experiment":"absorption","units":"beta","omega_over_beta":10,"ensemble":{"realizations":1000}}"#,
        )
        .unwrap();
        assert_eq!(c.sites, 50);
        assert_eq!(c.omega, 10.0);
        let e = c.ensemble.unwrap();
        assert_eq!(e.realizations, 1000);
        assert_eq!(e.atoms, 1000);
        let b = c.bins.unwrap();
        assert_eq!(b.center, Some(20.5));
    }

    #[test]
    fn all_errors_are_reported() {
        let e = errors(
            r#"{"experiment":"rabi","L":99,"omega":-1,"delta":"x","colour":1,
                "drive":{"amplitude":0,"samples":2.5,"extra":true},"ensemble":{}}"#,
        );
        let has = |prefix: &str| e.iter().any(|m| m.starts_with(prefix));
        for p in [
            "units:",
            "L:",
            "omega:",
            "delta:",
            "colour:",
            "drive.amplitude:",
            "drive.samples:",
            "drive.extra:",
            "ensemble:",
        ] {
            assert!(has(p), "missing {p} in {e:?}");
        }
    }

    #[test]
    fn unit_annotation_is_required() {
        let e = errors(r#"{"experiment":"spectrum","L":4,"omega":1.0}"#);
        assert_eq!(e.len(), 1);
        assert!(e[0].starts_with("units:"));
        assert!(!errors(r#"{"experiment":"spectrum","units":"hz","L":4,"omega":1.0}"#).is_empty());
    }

    #[test]
    fn caps_and_occupations() {
        assert!(errors(r#"{"experiment":"spectrum","units":"beta","L":15,"omega":1}"#)[0].contains("cap"));
        assert!(parse_config(r#"{"experiment":"absorption","units":"beta","L":300}"#).is_ok());
        let e = errors(r#"{"experiment":"rabi","units":"beta","L":4,"omega":1,"occupations":[1,2,1,1]}"#);
        assert!(e[0].starts_with("occupations:"));
        let c = parse_config(r#"{"experiment":"spectrum","units":"beta","L":4,"omega":2,"occupations":[1,4,1,4]}"#)
            .unwrap();
        assert_eq!(c.mean_occupation(), 2.5);
        assert!(!c.params().unwrap().is_clean());
    }

    #[test]
    fn sections_must_match_the_experiment() {
        let e = errors(r#"{"experiment":"flow","units":"beta","L":4,"omega":1,"drive":{}}"#);
        assert_eq!(e, vec!["drive: section does not apply to experiment flow".to_string()]);
        let e = errors(r#"{"experiment":"adiabatic","units":"beta","L":4,"omega":1,"ramp":{},"schedule":[]}"#);
        assert!(e.iter().any(|m| m.contains("not both")));
    }

    #[test]
    fn schedule_section() {
        let c = parse_config(
            r#"{"experiment":"adiabatic","units":"beta","L":4,"omega":1,
                "schedule":[{"duration":2,"delta":{"kind":"constant","value":0.5},"omega0":{"kind":"ramp","from":0,"to":1}}]}"#,
        )
        .unwrap();
        assert_eq!(c.schedule.unwrap().span(), 2.0);
        let e = errors(
            r#"{"experiment":"adiabatic","units":"beta","L":4,"omega":1,
                "schedule":[{"duration":-2,"delta":{"kind":"constant","value":0.5},"omega0":{"kind":"constant","value":1}}]}"#,
        );
        assert!(e[0].starts_with("schedule:"));
    }

    #[test]
    fn round_trip_and_hash() {
        let c = parse_config(r#"{"experiment":"rabi","units":"beta","L":8,"omega":10,"output_path":"a.csv"}"#).unwrap();
        let back = parse_config(&c.to_json()).unwrap();
        assert_eq!(c, back);
        let moved = ExperimentConfig {
            output_path: Some("b.csv".into()),
            ..c.clone()
        };
        assert_eq!(c.hash(), moved.hash());
        assert_ne!(c.hash(), ExperimentConfig { seed: 1, ..c }.hash());
    }
}

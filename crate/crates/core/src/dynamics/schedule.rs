use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time dependence of the detuning within one segment. `τ` is the time since
/// the segment started.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaProfile {
    Constant {
        value: f64,
    },
    /// Linear from `from` at `τ = 0` to `to` at the end of the segment.
    Ramp {
        from: f64,
        to: f64,
    },
    /// `offset + amplitude·cos(ωτ + phase)`.
    Sinusoid {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

/// Time dependence of the single-atom Rabi frequency within one segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaProfile {
    Constant {
        value: f64,
    },
    Ramp {
        from: f64,
        to: f64,
    },
    /// `from + (to − from)(τ/duration)^exponent`; slow start for `exponent > 1`.
    Power {
        from: f64,
        to: f64,
        exponent: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub duration: f64,
    pub delta: DeltaProfile,
    pub omega0: OmegaProfile,
}

fn lerp(a: f64, b: f64, x: f64) -> f64 {
    a + (b - a) * x
}

impl DeltaProfile {
    fn at(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            DeltaProfile::Constant { value } => value,
            DeltaProfile::Ramp { from, to } => lerp(from, to, tau / duration),
            DeltaProfile::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => offset + amplitude * (omega * tau + phase).cos(),
        }
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            DeltaProfile::Constant { value } => vec![value],
            DeltaProfile::Ramp { from, to } => vec![from, to],
            DeltaProfile::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => vec![offset, amplitude, omega, phase],
        }
    }
}

impl OmegaProfile {
    fn at(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            OmegaProfile::Constant { value } => value,
            OmegaProfile::Ramp { from, to } => lerp(from, to, tau / duration),
            OmegaProfile::Power { from, to, exponent } => lerp(from, to, (tau / duration).powf(exponent)),
        }
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            OmegaProfile::Constant { value } => vec![value],
            OmegaProfile::Ramp { from, to } => vec![from, to],
            OmegaProfile::Power { from, to, .. } => vec![from, to],
        }
    }
}

/// Piecewise schedule of `Δ(t)` and `Ω₀(t)`, starting at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct LaserSchedule {
    segments: Vec<Segment>,
    starts: Vec<f64>,
}

impl TryFrom<Vec<Segment>> for LaserSchedule {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        LaserSchedule::new(segments)
    }
}

impl From<LaserSchedule> for Vec<Segment> {
    fn from(s: LaserSchedule) -> Self {
        s.segments
    }
}

impl LaserSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::validation("schedule needs at least one segment"));
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::validation(format!(
                    "segment {i}: duration must be positive and finite, got {}",
                    s.duration
                )));
            }
            if s.delta
                .values()
                .iter()
                .chain(&s.omega0.values())
                .any(|v| !v.is_finite())
            {
                return Err(Error::validation(format!("segment {i}: non-finite value")));
            }
            if let OmegaProfile::Power { exponent, .. } = s.omega0 {
                if !(exponent > 0.0 && exponent.is_finite()) {
                    return Err(Error::validation(format!("segment {i}: exponent must be positive")));
                }
            }
            if s.omega0.values().iter().any(|&v| v < 0.0) {
                return Err(Error::validation(format!("segment {i}: omega0 must be non-negative")));
            }
            starts.push(t);
            t += s.duration;
        }
        Ok(LaserSchedule { segments, starts })
    }

    /// A single segment with fixed `Δ` and `Ω₀`.
    pub fn constant(duration: f64, delta: f64, omega0: f64) -> Result<Self> {
        Self::new(vec![Segment {
            duration,
            delta: DeltaProfile::Constant { value: delta },
            omega0: OmegaProfile::Constant { value: omega0 },
        }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total duration.
    pub fn span(&self) -> f64 {
        let last = self.segments.len() - 1;
        self.starts[last] + self.segments[last].duration
    }

    /// Times where one segment hands over to the next.
    pub fn boundaries(&self) -> &[f64] {
        &self.starts[1..]
    }

    fn locate(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// `(Δ(t), Ω₀(t))`. Times outside the span are clamped.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.span());
        let i = self.locate(t);
        let s = &self.segments[i];
        let tau = (t - self.starts[i]).min(s.duration);
        (s.delta.at(tau, s.duration), s.omega0.at(tau, s.duration))
    }

    /// Evaluate inside segment `i` only, so that steps ending on a boundary
    /// see the segment they belong to.
    pub(crate) fn at_in(&self, i: usize, t: f64) -> (f64, f64) {
        let s = &self.segments[i];
        let tau = (t - self.starts[i]).clamp(0.0, s.duration);
        (s.delta.at(tau, s.duration), s.omega0.at(tau, s.duration))
    }

    pub(crate) fn segment_index(&self, t: f64) -> usize {
        self.locate(t)
    }

    pub(crate) fn segment_end(&self, i: usize) -> f64 {
        self.starts[i] + self.segments[i].duration
    }
}

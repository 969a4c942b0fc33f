//! Final fidelity as a function of the Rabi frequency.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::engine::{fidelity, run_sequence, IntegratorSettings, Mode};
use crate::error::{Error, Result};
use crate::protocols::PulseSequence;
use crate::state::StateVector;

/// Default grid: 200 points over the interval (0.08, 0.48).
pub const DEFAULT_OMEGA_MIN: f64 = 0.08;
pub const DEFAULT_OMEGA_MAX: f64 = 0.48;
pub const DEFAULT_POINTS: usize = 200;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub sequence: PulseSequence,
    pub initial: StateVector,
    /// Engine compared against the ideal reference.
    pub mode: Mode,
}

impl SweepSpec {
    pub fn new(sequence: PulseSequence, initial: StateVector) -> Self {
        SweepSpec {
            omega_min: DEFAULT_OMEGA_MIN,
            omega_max: DEFAULT_OMEGA_MAX,
            points: DEFAULT_POINTS,
            sequence,
            initial,
            mode: Mode::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < omega_min < omega_max, got ({}, {})",
                self.omega_min, self.omega_max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        self.sequence.validate()
    }

    /// Uniform grid including both endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.omega_max - self.omega_min;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.omega_min + span * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Sweep points on the rayon pool; serial when the `parallel` feature is
    /// disabled.
    Parallel,
}

/// Runs the sweep with [`Execution::Parallel`].
pub fn sweep_rabi(spec: &SweepSpec, settings: &IntegratorSettings) -> Result<Vec<SweepRow>> {
    sweep_rabi_with(spec, settings, Execution::Parallel)
}

pub fn sweep_rabi_with(spec: &SweepSpec, settings: &IntegratorSettings, execution: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    settings.validate()?;
    // The ideal rotations depend on θ only, so one reference serves every Ω.
    let (ideal, _) = run_sequence(&spec.sequence, &spec.initial, Mode::Ideal, settings)?;
    let settings = IntegratorSettings {
        trace_stride: usize::MAX,
        ..*settings
    };
    let point = |omega: f64| -> Result<SweepRow> {
        let sequence = spec.sequence.with_rabi(omega);
        let (state, _) = run_sequence(&sequence, &spec.initial, spec.mode, &settings)?;
        Ok(SweepRow {
            omega,
            fidelity: fidelity(&ideal, &state)?,
        })
    };
    let grid = spec.grid();
    match execution {
        Execution::Serial => grid.into_iter().map(point).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => grid.into_par_iter().map(point).collect(),
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => grid.into_iter().map(point).collect(),
    }
}

/// Interior local maxima of the sampled curve (plateaus count once, at
/// their first point).
pub fn local_maxima(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < rows.len() {
        let f = rows[i].fidelity;
        if f > rows[i - 1].fidelity {
            let mut j = i;
            while j + 1 < rows.len() && rows[j + 1].fidelity == f {
                j += 1;
            }
            if j + 1 < rows.len() && rows[j + 1].fidelity < f {
                out.push(rows[i]);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: &[f64]) -> Vec<SweepRow> {
        f.iter()
            .enumerate()
            .map(|(i, &fidelity)| SweepRow { omega: i as f64, fidelity })
            .collect()
    }

    #[test]
    fn maxima_detection() {
        let m = local_maxima(&rows(&[0.1, 0.5, 0.2, 0.3, 0.3, 0.1, 0.9]));
        let at: Vec<f64> = m.iter().map(|r| r.omega).collect();
        assert_eq!(at, vec![1.0, 3.0]);
        assert!(local_maxima(&rows(&[0.1, 0.2, 0.3])).is_empty());
    }
}

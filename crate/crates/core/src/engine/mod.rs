//! Sequence evolution with the three engines, fidelity, and time-resolved
//! fidelity traces.

mod full;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

pub use full::{evolve_full, step_plan, DIVERGENCE_TOL};
pub use oracle::{oracle_certified, oracle_evolve};

use crate::error::{Error, Result};
use crate::protocols::PulseSequence;
use crate::pulses::{apply_block, apply_ideal};
use crate::state::StateVector;

/// Trace samples recorded per pulse when `trace_stride` is left at 0.
pub const DEFAULT_TRACE_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Steps per period `2π/(Δ_max + Ω)` of the fastest phase.
    pub samples_per_period: usize,
    /// Record every Nth step; 0 picks a stride giving about
    /// [`DEFAULT_TRACE_SAMPLES`] samples per pulse.
    pub trace_stride: usize,
    /// Bound on the max amplitude difference between a run and its
    /// half-step repeat.
    pub convergence_tol: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            samples_per_period: 64,
            trace_stride: 0,
            convergence_tol: 1e-8,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_period < 16 {
            return Err(Error::InvalidArgument(format!(
                "samples_per_period must be at least 16, got {}",
                self.samples_per_period
            )));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }

    /// The same settings with the step size halved.
    pub fn halved(&self) -> Self {
        IntegratorSettings {
            samples_per_period: self.samples_per_period * 2,
            trace_stride: self.trace_stride.saturating_mul(2),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Full,
    Block,
    Ideal,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "block" => Ok(Mode::Block),
            "ideal" => Ok(Mode::Ideal),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (expected full, block or ideal)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Block => "block",
            Mode::Ideal => "ideal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub fidelity: f64,
    pub pulse_index: usize,
}

/// `F(t)` against the co-evolved ideal state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FidelityTrace {
    pub samples: Vec<TraceSample>,
}

impl FidelityTrace {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Appends a per-pulse fragment, shifting its times by `offset`.
    pub fn append_shifted(&mut self, fragment: FidelityTrace, offset: f64, pulse_index: usize) {
        self.samples.extend(fragment.samples.into_iter().map(|s| TraceSample {
            t: s.t + offset,
            pulse_index,
            ..s
        }));
    }

    pub fn last_fidelity(&self) -> Option<f64> {
        self.samples.last().map(|s| s.fidelity)
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Applies `sequence` to `initial` pulse by pulse in list order.
///
/// In full mode the ideal state is evolved alongside and the trace samples
/// `F(t)` during every pulse; the other modes record one sample per pulse
/// end. A non-empty sequence always starts the trace with `F(0) = 1`.
pub fn run_sequence(
    sequence: &PulseSequence,
    initial: &StateVector,
    mode: Mode,
    settings: &IntegratorSettings,
) -> Result<(StateVector, FidelityTrace)> {
    let config = &sequence.config;
    if initial.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            left: initial.dim(),
            right: config.dim(),
        });
    }
    let mut trace = FidelityTrace::default();
    if sequence.pulses.is_empty() {
        return Ok((initial.clone(), trace));
    }
    trace.samples.push(TraceSample {
        t: 0.0,
        fidelity: fidelity(initial, initial)?,
        pulse_index: 0,
    });

    let mut state = initial.clone();
    let mut ideal = initial.clone();
    let mut t = 0.0;
    for (index, pulse) in sequence.pulses.iter().enumerate() {
        let next_ideal = apply_ideal(config, pulse, &ideal)?;
        match mode {
            Mode::Full => {
                let (next, fragment) = evolve_full(config, pulse, &state, settings, Some(&ideal))?;
                trace.append_shifted(fragment, t, index);
                state = next;
            }
            Mode::Block | Mode::Ideal => {
                state = if mode == Mode::Block {
                    apply_block(config, pulse, &state)?
                } else {
                    next_ideal.clone()
                };
                trace.samples.push(TraceSample {
                    t: t + pulse.duration(),
                    fidelity: fidelity(&next_ideal, &state)?,
                    pulse_index: index,
                });
            }
        }
        ideal = next_ideal;
        t += pulse.duration();
    }
    Ok((state, trace))
}

/// Result of a full-engine run repeated with half the step size.
#[derive(Debug, Clone)]
pub struct CertifiedRun {
    pub state: StateVector,
    pub trace: FidelityTrace,
    /// Max amplitude difference between the two runs.
    pub step_halving_diff: f64,
}

/// Runs the full engine twice (step size `dt` and `dt/2`) and fails with
/// [`Error::NotConverged`] if the final amplitudes differ by more than
/// `settings.convergence_tol`. The run at the given settings is returned.
pub fn run_certified(
    sequence: &PulseSequence,
    initial: &StateVector,
    settings: &IntegratorSettings,
) -> Result<CertifiedRun> {
    let (coarse, trace) = run_sequence(sequence, initial, Mode::Full, settings)?;
    let (fine, _) = run_sequence(sequence, initial, Mode::Full, &settings.halved())?;
    let diff = coarse.max_abs_diff(&fine)?;
    if diff > settings.convergence_tol {
        return Err(Error::NotConverged {
            diff,
            tol: settings.convergence_tol,
        });
    }
    Ok(CertifiedRun {
        state: coarse,
        trace,
        step_halving_diff: diff,
    })
}

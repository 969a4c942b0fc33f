//! Exact evolution during one pulse.
//!
//! The interaction-picture amplitudes obey
//!
//! `∂t D_α = (iΩ/2) Σ_k e^{±i(Δ_k(α) t + φ)} D_{α ⊕ 2^k}`
//!
//! summed over every qubit `k` (the `+` sign when `α_k = 0`). Written for
//! `D_α = X_α + iY_α` this is the real system of dimension `2^{n+1}`; it is
//! integrated here in complex form with classical fixed-step RK4.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{FidelityTrace, IntegratorSettings, TraceSample};
use crate::error::{Error, Result};
use crate::pulses::{apply_to_pair, classify_transitions, rotation, BlockClass, Pulse};
use crate::register::{BasisIndex, ChainConfig};
use crate::state::StateVector;

/// Norm drift that aborts an integration.
pub const DIVERGENCE_TOL: f64 = 1e-6;

/// Upper bound on the number of steps of a single pulse.
const MAX_STEPS: usize = 1 << 34;

/// Phasors are advanced by multiplication and re-evaluated exactly at this
/// step interval.
const RESYNC_INTERVAL: usize = 256;

/// One coupled pair `(α, α ⊕ 2^k)` with its detuning from the drive.
#[derive(Debug, Clone, Copy)]
struct Coupling {
    a0: usize,
    a1: usize,
    delta: f64,
}

fn couplings(config: &ChainConfig, drive: f64) -> Vec<Coupling> {
    let mut out = Vec::with_capacity(config.n() * config.dim() / 2);
    for k in 0..config.n() {
        for a in (0..config.dim()).map(BasisIndex).filter(|a| a.bit(k) == 0) {
            out.push(Coupling {
                a0: a.0,
                a1: a.flip(k).0,
                delta: drive - config.transition_unchecked(k, a),
            });
        }
    }
    out
}

/// Number of RK4 steps used for a pulse, and the step size.
pub fn step_plan(config: &ChainConfig, pulse: &Pulse, settings: &IntegratorSettings) -> Result<(usize, f64)> {
    let tau = pulse.duration();
    if tau == 0.0 {
        return Ok((0, 0.0));
    }
    let drive = pulse.drive_frequency(config);
    // |Δ| + Ω bounds the local frequency of every driven pair.
    let fastest = couplings(config, drive)
        .iter()
        .map(|c| c.delta.abs())
        .fold(0.0, f64::max)
        + pulse.rabi;
    let target = TAU / fastest / settings.samples_per_period as f64;
    let steps = (tau / target).ceil();
    if !steps.is_finite() || steps > MAX_STEPS as f64 {
        return Err(Error::StepUnderflow {
            dt: target,
            duration: tau,
        });
    }
    let steps = (steps as usize).max(1);
    Ok((steps, tau / steps as f64))
}

#[inline]
fn derivative(pairs: &[Coupling], phasors: &[Complex64], coeff: Complex64, y: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (p, z) in pairs.iter().zip(phasors) {
        let cz = coeff * z;
        out[p.a0] += cz * y[p.a1];
        let czc = coeff * z.conj();
        out[p.a1] += czc * y[p.a0];
    }
}

/// Integrates one pulse exactly (far-resonant couplings included).
///
/// When `ideal_reference` is given it is taken as the ideal state at the
/// start of the pulse, and the returned trace holds `F(t)` against that
/// reference rotated by the partial angle `Ω t`. Trace times are relative
/// to the pulse start and every sample carries `pulse_index = 0`.
pub fn evolve_full(
    config: &ChainConfig,
    pulse: &Pulse,
    state: &StateVector,
    settings: &IntegratorSettings,
    ideal_reference: Option<&StateVector>,
) -> Result<(StateVector, FidelityTrace)> {
    settings.validate()?;
    pulse.validate_for(config)?;
    if state.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: config.dim(),
        });
    }
    state.ensure_normalized(DIVERGENCE_TOL)?;
    if let Some(r) = ideal_reference {
        if r.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                left: r.dim(),
                right: state.dim(),
            });
        }
    }

    let mut trace = FidelityTrace::default();
    let (steps, dt) = step_plan(config, pulse, settings)?;
    if steps == 0 {
        return Ok((state.clone(), trace));
    }

    let drive = pulse.drive_frequency(config);
    let pairs = couplings(config, drive);
    let resonant: Vec<(usize, usize)> = classify_transitions(config, pulse)?
        .into_iter()
        .filter(|b| b.class == BlockClass::Resonant)
        .map(|b| (b.alpha0.0, b.alpha1.0))
        .collect();
    let stride = match settings.trace_stride {
        0 => (steps / super::DEFAULT_TRACE_SAMPLES).max(1),
        s => s,
    };

    let dim = config.dim();
    let coeff = Complex64::new(0.0, 0.5 * pulse.rabi);
    let half: Vec<Complex64> = pairs
        .iter()
        .map(|p| Complex64::from_polar(1.0, 0.5 * p.delta * dt))
        .collect();
    let mut z0 = vec![Complex64::new(0.0, 0.0); pairs.len()];
    let mut zh = z0.clone();
    let mut z1 = z0.clone();

    let norm0 = state.norm_sqr();
    let mut y = state.amplitudes().to_vec();
    let zero = vec![Complex64::new(0.0, 0.0); dim];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);
    let h = dt;
    let h2 = 0.5 * dt;
    let h6 = dt / 6.0;

    for i in 0..steps {
        let t = i as f64 * dt;
        if i % RESYNC_INTERVAL == 0 {
            for (z, p) in z0.iter_mut().zip(&pairs) {
                *z = Complex64::from_polar(1.0, p.delta * t + pulse.phi);
            }
            let drift = (y.iter().map(|c| c.norm_sqr()).sum::<f64>() - norm0).abs();
            if !(drift <= DIVERGENCE_TOL) {
                return Err(Error::Divergence { drift, t, dt, steps: i });
            }
        }
        for ((a, b), (m, z)) in zh.iter_mut().zip(z1.iter_mut()).zip(half.iter().zip(&z0)) {
            *a = z * m;
            *b = *a * m;
        }

        derivative(&pairs, &z0, coeff, &y, &mut k1);
        for j in 0..dim {
            tmp[j] = y[j] + h2 * k1[j];
        }
        derivative(&pairs, &zh, coeff, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = y[j] + h2 * k2[j];
        }
        derivative(&pairs, &zh, coeff, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = y[j] + h * k3[j];
        }
        derivative(&pairs, &z1, coeff, &tmp, &mut k4);
        for j in 0..dim {
            y[j] += h6 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        std::mem::swap(&mut z0, &mut z1);

        let done = i + 1;
        if let Some(reference) = ideal_reference {
            if done % stride == 0 || done == steps {
                let t_now = done as f64 * dt;
                let u = rotation(pulse.rabi * t_now, pulse.phi);
                let mut r = reference.amplitudes().to_vec();
                for &(a0, a1) in &resonant {
                    apply_to_pair(&u, &mut r, a0, a1);
                }
                let overlap: Complex64 = r.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
                trace.samples.push(TraceSample {
                    t: t_now,
                    fidelity: overlap.norm_sqr(),
                    pulse_index: 0,
                });
            }
        }
    }

    let drift = (y.iter().map(|c| c.norm_sqr()).sum::<f64>() - norm0).abs();
    if !(drift <= DIVERGENCE_TOL) {
        return Err(Error::Divergence {
            drift,
            t: steps as f64 * dt,
            dt,
            steps,
        });
    }
    Ok((StateVector::from_amplitudes(config.n(), y)?, trace))
}

//! Independent reference for small chains: the lab-frame Hamiltonian
//! `H(t) = H0 + W(t)` is built as a dense matrix and propagated with
//! exponentials of frozen Hermitian matrices (fourth-order commutator-free
//! Magnus, two exponentials per step, each by eigendecomposition). The
//! result is mapped back to the interaction picture with `e^{+iE_α τ}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulses::Pulse;
use crate::register::{BasisIndex, ChainConfig};
use crate::state::StateVector;

pub const ORACLE_MAX_QUBITS: usize = 3;

fn hamiltonian(config: &ChainConfig, pulse: &Pulse, energies: &[f64], t: f64) -> DMatrix<Complex64> {
    let dim = config.dim();
    let mut h = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(energies[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let drive = pulse.drive_frequency(config);
    // -Ω/2 (e^{i(wt+φ)} I⁺_k + h.c.), with I⁺_k = |0_k⟩⟨1_k|.
    let coupling = Complex64::from_polar(-0.5 * pulse.rabi, drive * t + pulse.phi);
    for k in 0..config.n() {
        for a in (0..dim).map(BasisIndex).filter(|a| a.bit(k) == 0) {
            let b = a.flip(k);
            h[(a.0, b.0)] += coupling;
            h[(b.0, a.0)] += coupling.conj();
        }
    }
    h
}

/// `exp(-i h A)` for Hermitian `A`.
fn expm_hermitian(a: DMatrix<Complex64>, h: f64) -> DMatrix<Complex64> {
    let eig = a.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| {
        if r == c {
            Complex64::from_polar(1.0, -h * eig.eigenvalues[r])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    v * phases * v.adjoint()
}

/// Evolves `state` through `pulse` in the lab frame with a step close to
/// `dt` (rounded so the pulse holds a whole number of steps).
pub fn oracle_evolve(config: &ChainConfig, pulse: &Pulse, state: &StateVector, dt: f64) -> Result<StateVector> {
    if config.n() > ORACLE_MAX_QUBITS {
        return Err(Error::OracleTooLarge {
            n: config.n(),
            max: ORACLE_MAX_QUBITS,
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("oracle step must be positive, got {dt}")));
    }
    pulse.validate_for(config)?;
    if state.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: config.dim(),
        });
    }
    let tau = pulse.duration();
    let energies: Vec<f64> = (0..config.dim())
        .map(|a| config.energy_unchecked(BasisIndex(a)))
        .collect();
    let steps = (tau / dt).ceil() as usize;
    let mut c = nalgebra::DVector::from_column_slice(state.amplitudes());
    if steps > 0 {
        let h = tau / steps as f64;
        let s3 = 3f64.sqrt();
        let (n1, n2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
        let (w1, w2) = ((3.0 - 2.0 * s3) / 12.0, (3.0 + 2.0 * s3) / 12.0);
        for i in 0..steps {
            let t = i as f64 * h;
            let h1 = hamiltonian(config, pulse, &energies, t + n1 * h);
            let h2 = hamiltonian(config, pulse, &energies, t + n2 * h);
            let first = expm_hermitian(&h1 * Complex64::from(w2) + &h2 * Complex64::from(w1), h);
            let second = expm_hermitian(h1 * Complex64::from(w1) + h2 * Complex64::from(w2), h);
            c = second * (first * c);
        }
    }
    let amps = c
        .iter()
        .zip(&energies)
        .map(|(ca, &e)| ca * Complex64::from_polar(1.0, e * tau))
        .collect();
    StateVector::from_amplitudes(config.n(), amps)
}

/// Halves the oracle step until two successive results agree to `tol`.
/// Returns the finest result, the last difference and the step used.
pub fn oracle_certified(
    config: &ChainConfig,
    pulse: &Pulse,
    state: &StateVector,
    dt0: f64,
    tol: f64,
    max_halvings: usize,
) -> Result<(StateVector, f64, f64)> {
    let mut dt = dt0;
    let mut prev = oracle_evolve(config, pulse, state, dt)?;
    let mut diff = f64::INFINITY;
    for _ in 0..max_halvings {
        dt *= 0.5;
        let next = oracle_evolve(config, pulse, state, dt)?;
        diff = next.max_abs_diff(&prev)?;
        prev = next;
        if diff < tol {
            return Ok((prev, diff, dt));
        }
    }
    Err(Error::NotConverged { diff, tol })
}

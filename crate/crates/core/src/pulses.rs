//! RF pulses and the two analytic engines.
//!
//! A pulse on qubit `k` couples the `2^{n-1}` pairs of basis states that
//! differ only in bit `k`. Neglecting the far-resonant couplings (other
//! qubits, and detunings of the order of the Larmor frequencies) every pair
//! evolves independently under a closed-form 2×2 propagator. The ideal
//! engine keeps only the exactly resonant pairs; the block engine also
//! evolves the near-resonant ones with their true detuning.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::register::{BasisIndex, ChainConfig};
use crate::state::StateVector;

pub type Mat2 = Matrix2<Complex64>;

/// Relative tolerance (scaled by `w_k`) below which a detuning counts as an
/// exact resonance.
pub const RESONANCE_RTOL: f64 = 1e-9;

/// One rectangular RF pulse `R_k^{μ,ν}(θ, φ)` at Rabi frequency `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub k: usize,
    pub mu: i32,
    pub nu: i32,
    /// Rotation angle `θ = Ω τ` in radians.
    pub theta: f64,
    pub phi: f64,
    pub rabi: f64,
}

impl Pulse {
    pub fn new(k: usize, mu: i32, nu: i32, theta: f64, phi: f64, rabi: f64) -> Result<Self> {
        let pulse = Pulse { k, mu, nu, theta, phi, rabi };
        pulse.check_parameters()?;
        Ok(pulse)
    }

    fn check_parameters(&self) -> Result<()> {
        if !(self.rabi.is_finite() && self.rabi > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "Rabi frequency must be positive, got {}",
                self.rabi
            )));
        }
        // θ = 0 is the identity and is accepted.
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(Error::InvalidPulse(format!(
                "rotation angle must be non-negative, got {}",
                self.theta
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidPulse(format!("phase must be finite, got {}", self.phi)));
        }
        Ok(())
    }

    /// Same pulse at another Rabi frequency; the duration rescales so the
    /// rotation angle is kept.
    pub fn with_rabi(self, rabi: f64) -> Self {
        Pulse { rabi, ..self }
    }

    pub fn duration(&self) -> f64 {
        self.theta / self.rabi
    }

    pub fn drive_frequency(&self, config: &ChainConfig) -> f64 {
        config.line(self.k, self.mu, self.nu)
    }

    /// Checks that the pulse addresses a resonance that exists on `config`.
    pub fn validate_for(&self, config: &ChainConfig) -> Result<()> {
        self.check_parameters()?;
        let offsets = config.allowed_offsets(self.k)?;
        if !offsets.contains(self.mu, self.nu) {
            return Err(Error::InvalidOffsets {
                k: self.k,
                mu: self.mu,
                nu: self.nu,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R_{}^{{{},{}}}({:.6}, {:.6}) @ Ω={}",
            self.k, self.mu, self.nu, self.theta, self.phi, self.rabi
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockClass {
    Resonant,
    NearResonant,
    FarResonant,
}

/// A bit-`k` pair driven by a pulse. Index 0 of every 2×2 block is the
/// `α_k = 0` member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionBlock {
    pub alpha0: BasisIndex,
    pub alpha1: BasisIndex,
    pub delta: f64,
    pub class: BlockClass,
}

/// Splits all bit-`k` pairs of the pulse into resonant, near-resonant
/// (`|Δ| ≤ 2(J + J')`) and far-resonant blocks, sorted by `alpha0`.
pub fn classify_transitions(config: &ChainConfig, pulse: &Pulse) -> Result<Vec<TransitionBlock>> {
    pulse.validate_for(config)?;
    let k = pulse.k;
    let drive = pulse.drive_frequency(config);
    let tol = RESONANCE_RTOL * config.larmor()[k];
    let near = 2.0 * (config.j1() + config.j2()) + tol;
    let blocks = (0..config.dim())
        .map(BasisIndex)
        .filter(|a| a.bit(k) == 0)
        .map(|alpha0| {
            let delta = drive - config.transition_unchecked(k, alpha0);
            let class = if delta.abs() < tol {
                BlockClass::Resonant
            } else if delta.abs() <= near {
                BlockClass::NearResonant
            } else {
                BlockClass::FarResonant
            };
            TransitionBlock {
                alpha0,
                alpha1: alpha0.flip(k),
                delta,
                class,
            }
        })
        .collect();
    Ok(blocks)
}

/// Closed-form interaction-picture propagator of one driven pair after time
/// `t`:
///
/// `U(t) = diag(e^{iΔt/2}, e^{-iΔt/2}) · [[c − i(Δ/Ωe)s, i(Ω/Ωe)e^{iφ}s], [i(Ω/Ωe)e^{-iφ}s, c + i(Δ/Ωe)s]]`
///
/// with `Ωe = √(Ω² + Δ²)`, `c = cos(Ωe t/2)` and `s = sin(Ωe t/2)`.
pub fn block_propagator(delta: f64, rabi: f64, phi: f64, t: f64) -> Result<Mat2> {
    if !(rabi.is_finite() && rabi > 0.0) {
        return Err(Error::InvalidPulse(format!(
            "Rabi frequency must be positive, got {rabi}"
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    Ok(propagator(delta, rabi, phi, t))
}

pub(crate) fn propagator(delta: f64, rabi: f64, phi: f64, t: f64) -> Mat2 {
    let omega_e = rabi.hypot(delta);
    let (s, c) = (0.5 * omega_e * t).sin_cos();
    let i = Complex64::i();
    let dr = delta / omega_e;
    let off = rabi / omega_e * s;
    let m00 = Complex64::new(c, -dr * s);
    let m11 = Complex64::new(c, dr * s);
    let m01 = i * Complex64::from_polar(off, phi);
    let m10 = i * Complex64::from_polar(off, -phi);
    let p = Complex64::from_polar(1.0, 0.5 * delta * t);
    let pc = p.conj();
    Mat2::new(p * m00, p * m01, pc * m10, pc * m11)
}

/// Resonant rotation by `angle`: the `Δ = 0` propagator.
pub(crate) fn rotation(angle: f64, phi: f64) -> Mat2 {
    let (s, c) = (0.5 * angle).sin_cos();
    let i = Complex64::i();
    Mat2::new(
        Complex64::new(c, 0.0),
        i * Complex64::from_polar(s, phi),
        i * Complex64::from_polar(s, -phi),
        Complex64::new(c, 0.0),
    )
}

#[inline]
pub(crate) fn apply_to_pair(u: &Mat2, amps: &mut [Complex64], a0: usize, a1: usize) {
    let (x, y) = (amps[a0], amps[a1]);
    amps[a0] = u[(0, 0)] * x + u[(0, 1)] * y;
    amps[a1] = u[(1, 0)] * x + u[(1, 1)] * y;
}

fn check_state(config: &ChainConfig, state: &StateVector) -> Result<()> {
    if state.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: config.dim(),
        });
    }
    Ok(())
}

/// Ideal pulse: rotates the resonant pairs by `θ`, leaves everything else
/// untouched.
pub fn apply_ideal(config: &ChainConfig, pulse: &Pulse, state: &StateVector) -> Result<StateVector> {
    apply_ideal_angle(config, pulse, state, pulse.theta)
}

/// Ideal pulse stopped after the partial rotation `angle = Ω t`.
pub fn apply_ideal_angle(
    config: &ChainConfig,
    pulse: &Pulse,
    state: &StateVector,
    angle: f64,
) -> Result<StateVector> {
    check_state(config, state)?;
    let blocks = classify_transitions(config, pulse)?;
    let u = rotation(angle, pulse.phi);
    let mut out = state.clone();
    for b in blocks.iter().filter(|b| b.class == BlockClass::Resonant) {
        apply_to_pair(&u, out.amplitudes_mut(), b.alpha0.0, b.alpha1.0);
    }
    Ok(out)
}

/// Near-resonant pulse: every resonant and near-resonant pair evolves under
/// [`block_propagator`] with its own detuning for the pulse duration.
pub fn apply_block(config: &ChainConfig, pulse: &Pulse, state: &StateVector) -> Result<StateVector> {
    check_state(config, state)?;
    let blocks = classify_transitions(config, pulse)?;
    let tau = pulse.duration();
    let mut out = state.clone();
    for b in blocks.iter().filter(|b| b.class != BlockClass::FarResonant) {
        let u = if b.class == BlockClass::Resonant {
            rotation(pulse.theta, pulse.phi)
        } else {
            propagator(b.delta, pulse.rabi, pulse.phi, tau)
        };
        apply_to_pair(&u, out.amplitudes_mut(), b.alpha0.0, b.alpha1.0);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseAngle {
    Pi,
    HalfPi,
}

impl PulseAngle {
    pub fn radians(self) -> f64 {
        match self {
            PulseAngle::Pi => PI,
            PulseAngle::HalfPi => FRAC_PI_2,
        }
    }
}

/// Rabi frequency at which a pair detuned by `delta` completes `k` full
/// cycles during the pulse, so its unwanted transition vanishes at the end:
/// `|Δ|/√(4k²−1)` for a π-pulse and `|Δ|/√(16k²−1)` for a π/2-pulse.
pub fn optimal_rabi(delta: f64, k: u32, angle: PulseAngle) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "detuning must be finite and non-zero, got {delta}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidArgument("harmonic k must be at least 1".into()));
    }
    let k = match angle {
        PulseAngle::Pi => k as f64,
        PulseAngle::HalfPi => 2.0 * k as f64,
    };
    Ok(delta.abs() / (4.0 * k * k - 1.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_mat(u: &Mat2, expected: [[Complex64; 2]; 2], eps: f64) {
        for r in 0..2 {
            for col in 0..2 {
                assert!(
                    (u[(r, col)] - expected[r][col]).norm() < eps,
                    "entry ({r},{col}) = {} expected {}",
                    u[(r, col)],
                    expected[r][col]
                );
            }
        }
    }

    #[test]
    fn propagator_resonant_examples() {
        let u = block_propagator(0.0, 1.0, FRAC_PI_2, PI).unwrap();
        assert_mat(&u, [[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]], 1e-15);
        let u = block_propagator(0.0, 2.0, -FRAC_PI_2, FRAC_PI_2 / 2.0).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_mat(&u, [[c(h, 0.0), c(h, 0.0)], [c(-h, 0.0), c(h, 0.0)]], 1e-15);
    }

    #[test]
    fn propagator_at_two_pi_null() {
        let delta = 0.8;
        let rabi = delta / 15f64.sqrt();
        let t = PI / rabi;
        let u = block_propagator(delta, rabi, 0.3, t).unwrap();
        assert!(u[(0, 1)].norm() < 1e-14);
        assert!(u[(1, 0)].norm() < 1e-14);
        let half = 0.5 * delta * t;
        // Δτ/2 = (π/2)·√15 ≈ 6.0837 rad.
        assert_abs_diff_eq!(half, 0.5 * PI * 15f64.sqrt(), epsilon = 1e-12);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, half)).norm() < 1e-13);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -half)).norm() < 1e-13);
    }

    #[test]
    fn propagator_rejects_bad_rabi() {
        assert!(block_propagator(0.1, 0.0, 0.0, 1.0).is_err());
        assert!(block_propagator(0.1, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn optimal_rabi_examples() {
        assert_abs_diff_eq!(optimal_rabi(0.8, 1, PulseAngle::Pi).unwrap(), 0.8 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(optimal_rabi(0.8, 1, PulseAngle::Pi).unwrap(), 0.46188, epsilon = 1e-5);
        assert_abs_diff_eq!(optimal_rabi(0.8, 4, PulseAngle::Pi).unwrap(), 0.100791, epsilon = 1e-6);
        assert_abs_diff_eq!(optimal_rabi(-0.8, 1, PulseAngle::HalfPi).unwrap(), 0.20656, epsilon = 1e-5);
        assert!(optimal_rabi(0.0, 1, PulseAngle::Pi).is_err());
        assert!(optimal_rabi(0.8, 0, PulseAngle::Pi).is_err());
    }

    #[test]
    fn classify_near_resonant_table() {
        let config = ChainConfig::default_chain();
        let pulse = Pulse::new(1, 0, 1, PI, 0.0, 0.1).unwrap();
        let blocks = classify_transitions(&config, &pulse).unwrap();
        assert_eq!(blocks.len(), 8);
        assert!(blocks.windows(2).all(|w| w[0].alpha0 < w[1].alpha0));
        let mut mags: Vec<f64> = blocks.iter().map(|b| b.delta.abs()).collect();
        mags.sort_by(f64::total_cmp);
        let expected = [0.0, 0.0, 0.8, 0.8, 19.2, 20.0, 20.0, 20.8];
        for (m, e) in mags.iter().zip(expected) {
            assert_abs_diff_eq!(*m, e, epsilon = 1e-10);
        }
        assert_eq!(blocks.iter().filter(|b| b.class == BlockClass::Resonant).count(), 2);
        assert!(blocks.iter().all(|b| b.class != BlockClass::FarResonant));
        for b in &blocks {
            let d1 = config.detuning(pulse.drive_frequency(&config), 1, b.alpha1).unwrap();
            assert_eq!(b.delta, d1);
        }
    }

    #[test]
    fn classify_two_qubit_border() {
        let config = ChainConfig::new(vec![5.0, 11.0], 1.0, 0.0).unwrap();
        let pulse = Pulse::new(0, 1, 0, PI, 0.0, 0.2).unwrap();
        let blocks = classify_transitions(&config, &pulse).unwrap();
        let deltas: Vec<f64> = blocks.iter().map(|b| b.delta).collect();
        assert_eq!(deltas, vec![0.0, 2.0]);
        assert_eq!(blocks[1].class, BlockClass::NearResonant);
    }

    #[test]
    fn classify_rejects_impossible_offsets() {
        let config = ChainConfig::default_chain();
        let pulse = Pulse::new(0, 2, 1, PI, 0.0, 0.1).unwrap();
        assert!(matches!(
            classify_transitions(&config, &pulse),
            Err(Error::InvalidOffsets { k: 0, mu: 2, nu: 1 })
        ));
    }

    #[test]
    fn ideal_first_shor_pulse() {
        let config = ChainConfig::default_chain();
        let pulse = Pulse::new(2, 2, 1, FRAC_PI_2, FRAC_PI_2, 0.1).unwrap();
        let psi = StateVector::basis(4, BasisIndex(0)).unwrap();
        let out = apply_ideal(&config, &pulse, &psi).unwrap();
        let expected = StateVector::from_sparse(4, &[(0, c(FRAC_1_SQRT_2, 0.0)), (4, c(FRAC_1_SQRT_2, 0.0))]).unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn ideal_inverse_by_phase_shift() {
        let config = ChainConfig::default_chain();
        let pulse = Pulse::new(1, 0, -1, 1.1, 0.4, 0.1).unwrap();
        let inverse = Pulse { phi: pulse.phi + PI, ..pulse };
        let psi = StateVector::from_amplitudes(
            4,
            (0..16).map(|a| c((a as f64).cos(), (a as f64 * 0.3).sin())).collect(),
        )
        .unwrap()
        .normalized();
        let there = apply_ideal(&config, &pulse, &psi).unwrap();
        let back = apply_ideal(&config, &inverse, &there).unwrap();
        assert!(back.max_abs_diff(&psi).unwrap() < 1e-14);
    }

    #[test]
    fn ideal_ignores_unpopulated_pairs() {
        let config = ChainConfig::default_chain();
        // Resonant pairs of R_2^{2,1} are (0, 4) only; |0010> sits in a detuned pair.
        let pulse = Pulse::new(2, 2, 1, PI, 0.7, 0.1).unwrap();
        let psi = StateVector::basis(4, BasisIndex(2)).unwrap();
        assert_eq!(apply_ideal(&config, &pulse, &psi).unwrap(), psi);
    }

    #[test]
    fn block_matches_ideal_on_resonant_support() {
        let config = ChainConfig::default_chain();
        let pulse = Pulse::new(2, 2, 1, FRAC_PI_2, FRAC_PI_2, 0.1).unwrap();
        let psi = StateVector::basis(4, BasisIndex(0)).unwrap();
        let a = apply_block(&config, &pulse, &psi).unwrap();
        let b = apply_ideal(&config, &pulse, &psi).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn block_single_pair_is_closed_form() {
        let config = ChainConfig::new(vec![5.0, 11.0], 1.0, 0.0).unwrap();
        let pulse = Pulse::new(1, -1, 0, 2.0, 0.3, 0.4).unwrap();
        // |00> and |10> form the pair detuned by -2J.
        let psi = StateVector::from_sparse(2, &[(0, c(0.6, 0.0)), (2, c(0.0, 0.8))]).unwrap();
        let out = apply_block(&config, &pulse, &psi).unwrap();
        let u = block_propagator(-2.0, 0.4, 0.3, 5.0).unwrap();
        let x = u[(0, 0)] * psi[0] + u[(0, 1)] * psi[2];
        let y = u[(1, 0)] * psi[0] + u[(1, 1)] * psi[2];
        assert!((out[0] - x).norm() < 1e-15);
        assert!((out[2] - y).norm() < 1e-15);
    }

    #[test]
    fn block_nulls_two_j_prime_pairs_at_optimal_rabi() {
        let config = ChainConfig::default_chain();
        let rabi = optimal_rabi(0.8, 2, PulseAngle::Pi).unwrap();
        let pulse = Pulse::new(1, 0, 1, PI, FRAC_PI_2, rabi).unwrap();
        for b in classify_transitions(&config, &pulse).unwrap() {
            if (b.delta.abs() - 0.8).abs() > 1e-9 {
                continue;
            }
            let psi = StateVector::basis(4, b.alpha0).unwrap();
            let out = apply_block(&config, &pulse, &psi).unwrap();
            assert!(out[b.alpha1.0].norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn pulse_validation() {
        assert!(Pulse::new(0, 1, 1, PI, 0.0, 0.0).is_err());
        assert!(Pulse::new(0, 1, 1, -1.0, 0.0, 0.1).is_err());
        let config = ChainConfig::default_chain();
        assert!(Pulse::new(3, 1, 1, PI, 0.0, 0.1).unwrap().validate_for(&config).is_ok());
        assert!(Pulse::new(3, 0, 1, PI, 0.0, 0.1).unwrap().validate_for(&config).is_err());
        assert!(Pulse::new(4, 1, 1, PI, 0.0, 0.1).unwrap().validate_for(&config).is_err());
    }
}

//! The two built-in algorithms on the four-qubit register: factoring 4 and
//! teleporting one qubit across three spins, with their ideal states and
//! post-processing.
//!
//! Register layout for factoring: `x` = qubits (3, 2), `y` = qubits (1, 0),
//! so `|x;y⟩` is the basis index `4x + y`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulses::Pulse;
use crate::register::ChainConfig;
use crate::state::StateVector;

/// Ordered pulses on a chain. Pulses are stored in application order, i.e.
/// the right-most factor of an operator product comes first.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub config: ChainConfig,
    pub pulses: Vec<Pulse>,
    /// Sequence-level Rabi frequency used by pulses without an override.
    pub rabi: f64,
    pub label: String,
}

impl PulseSequence {
    pub fn new(config: ChainConfig, rabi: f64, label: impl Into<String>) -> Result<Self> {
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(Error::InvalidPulse(format!("Rabi frequency must be positive, got {rabi}")));
        }
        Ok(PulseSequence {
            config,
            pulses: Vec::new(),
            rabi,
            label: label.into(),
        })
    }

    /// Appends `R_k^{μ,ν}(θ, φ)` at the sequence Rabi frequency.
    pub fn push(&mut self, k: usize, mu: i32, nu: i32, theta: f64, phi: f64) -> Result<()> {
        let pulse = Pulse::new(k, mu, nu, theta, phi, self.rabi)?;
        self.push_pulse(pulse)
    }

    pub fn push_pulse(&mut self, pulse: Pulse) -> Result<()> {
        pulse.validate_for(&self.config)?;
        if !(pulse.theta > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "sequence pulses need a positive rotation angle, got {}",
                pulse.theta
            )));
        }
        self.pulses.push(pulse);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.pulses {
            p.validate_for(&self.config)?;
            if !(p.theta > 0.0) {
                return Err(Error::InvalidPulse(format!("non-positive rotation angle {}", p.theta)));
            }
        }
        Ok(())
    }

    /// Every pulse moved to Rabi frequency `rabi`.
    pub fn with_rabi(&self, rabi: f64) -> Self {
        PulseSequence {
            pulses: self.pulses.iter().map(|p| p.with_rabi(rabi)).collect(),
            rabi,
            ..self.clone()
        }
    }

    /// The first `count` pulses.
    pub fn prefix(&self, count: usize) -> Self {
        PulseSequence {
            pulses: self.pulses[..count.min(self.pulses.len())].to_vec(),
            ..self.clone()
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(Pulse::duration).sum()
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }
}

fn require_four(config: &ChainConfig) -> Result<()> {
    if config.n() != 4 {
        return Err(Error::WrongRegisterSize {
            expected: 4,
            got: config.n(),
        });
    }
    Ok(())
}

/// Factoring 4 with `q = 3`: three π/2-pulses build the uniform `x`
/// superposition, four π-pulses evaluate `3^x mod 4` into `y`, five
/// π-pulses transform `x`.
pub fn shor4_sequence(config: &ChainConfig, rabi: f64) -> Result<PulseSequence> {
    require_four(config)?;
    let mut seq = PulseSequence::new(config.clone(), rabi, "shor4")?;
    let h = FRAC_PI_2;
    let steps: [(usize, i32, i32, f64, f64); 12] = [
        (2, 2, 1, h, h),
        (3, 1, 1, h, h),
        (3, -1, 1, h, h),
        (0, 1, 1, PI, h),
        (0, 1, -1, PI, h),
        (1, -2, 1, PI, h),
        (1, -2, -1, PI, h),
        (0, -1, -1, PI, -h),
        (2, 0, 1, PI, -h),
        (0, -1, 1, PI, h),
        (0, -1, -1, PI, -h),
        (2, -2, -1, PI, h),
    ];
    for (k, mu, nu, theta, phi) in steps {
        seq.push(k, mu, nu, theta, phi)?;
    }
    Ok(seq)
}

/// Index of the last pulse of each factoring stage (exclusive bounds of
/// the prefixes that produce Ψ1, Ψ2, Ψ3).
pub const SHOR4_STAGE_ENDS: [usize; 3] = [3, 7, 12];

/// Teleporting qubit 3 to qubit 0: three pulses entangle qubits 2 and 0,
/// two realize a CNOT from 3 onto 2, two rotate qubit 3.
pub fn teleport_sequence(config: &ChainConfig, rabi: f64) -> Result<PulseSequence> {
    require_four(config)?;
    let mut seq = PulseSequence::new(config.clone(), rabi, "teleport")?;
    let h = FRAC_PI_2;
    let steps: [(usize, i32, i32, f64, f64); 7] = [
        (2, 2, 1, h, -h),
        (2, 0, 1, h, -h),
        (0, 1, -1, PI, -h),
        (2, 0, 1, PI, h),
        (2, 0, -1, PI, -h),
        (3, 1, 1, h, -h),
        (3, -1, 1, h, -h),
    ];
    for (k, mu, nu, theta, phi) in steps {
        seq.push(k, mu, nu, theta, phi)?;
    }
    Ok(seq)
}

pub const TELEPORT_STAGE_ENDS: [usize; 3] = [3, 5, 7];

fn half_on(support: &[usize]) -> StateVector {
    let entries: Vec<(usize, Complex64)> =
        support.iter().map(|&a| (a, Complex64::new(0.5, 0.0))).collect();
    StateVector::from_sparse(4, &entries).expect("indices are in range")
}

/// Ideal states after each factoring stage, starting from `|0000⟩`.
pub fn shor4_ideal_states() -> [StateVector; 3] {
    [
        half_on(&[0b0000, 0b0100, 0b1000, 0b1100]),
        half_on(&[0b0001, 0b0111, 0b1001, 0b1111]),
        half_on(&[0b0001, 0b0011, 0b1001, 0b1011]),
    ]
}

/// Initial teleportation state `C0|0000⟩ + C1|1000⟩`.
pub fn teleport_initial(c0: Complex64, c1: Complex64) -> StateVector {
    StateVector::from_sparse(4, &[(0b0000, c0), (0b1000, c1)]).expect("indices are in range")
}

/// Ideal teleportation states Φ1, Φ2, Φ3 for the input `(c0, c1)`.
pub fn teleport_ideal_states(c0: Complex64, c1: Complex64) -> [StateVector; 3] {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let phi1 = StateVector::from_sparse(
        4,
        &[(0b0000, r * c0), (0b0101, r * c0), (0b1000, r * c1), (0b1101, r * c1)],
    );
    let phi2 = StateVector::from_sparse(
        4,
        &[(0b0000, r * c0), (0b0101, r * c0), (0b1100, r * c1), (0b1001, r * c1)],
    );
    let h = 0.5;
    let phi3 = StateVector::from_sparse(
        4,
        &[
            (0b0000, h * c0),
            (0b0001, h * c1),
            (0b0101, h * c0),
            (0b0100, h * c1),
            (0b1001, h * c1),
            (0b1000, -h * c0),
            (0b1100, h * c1),
            (0b1101, -h * c0),
        ],
    );
    [phi1.unwrap(), phi2.unwrap(), phi3.unwrap()]
}

/// Outcome probabilities of the `x` register after tracing out `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementReport {
    pub x_probs: [f64; 4],
    pub inferred_period: Option<u32>,
}

/// Minimum probability for an `x` outcome to count as a peak.
pub const PEAK_THRESHOLD: f64 = 0.1;

pub fn x_register_probabilities(state: &StateVector) -> Result<MeasurementReport> {
    if state.n() != 4 {
        return Err(Error::WrongRegisterSize {
            expected: 4,
            got: state.n(),
        });
    }
    let mut x_probs = [0.0; 4];
    for (alpha, amp) in state.amplitudes().iter().enumerate() {
        x_probs[alpha >> 2] += amp.norm_sqr();
    }
    let total: f64 = x_probs.iter().sum();
    if total > 0.0 {
        x_probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(MeasurementReport {
        inferred_period: infer_period(&x_probs),
        x_probs,
    })
}

/// The peaks of `|x|` after the transform sit at multiples of `4/T`; the
/// period is `4` over the gcd of the peak positions and 4.
fn infer_period(x_probs: &[f64; 4]) -> Option<u32> {
    let peaks: Vec<u32> = (0..4u32).filter(|&x| x_probs[x as usize] > PEAK_THRESHOLD).collect();
    if peaks.is_empty() {
        return None;
    }
    let spacing = peaks.iter().fold(4u32, |g, &x| gcd(g, x));
    Some(4 / spacing)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for MeasurementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "x-register probabilities (y traced out):")?;
        for (x, p) in self.x_probs.iter().enumerate() {
            writeln!(f, "  p(x={:02b}) = {}", x, crate::runner::output::fmt_sig(*p))?;
        }
        match self.inferred_period {
            Some(t) => writeln!(f, "inferred period T = {t}"),
            None => writeln!(f, "inferred period: none"),
        }
    }
}

/// Bob's correction for each of Alice's outcomes `(i3, i2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    Identity,
    Not,
    MinusSigmaZ,
    NotSigmaZ,
}

impl Correction {
    pub fn for_outcome(outcome: usize) -> Self {
        match outcome {
            0b00 => Correction::Identity,
            0b01 => Correction::Not,
            0b10 => Correction::MinusSigmaZ,
            _ => Correction::NotSigmaZ,
        }
    }

    pub fn apply(self, [b0, b1]: [Complex64; 2]) -> [Complex64; 2] {
        match self {
            Correction::Identity => [b0, b1],
            Correction::Not => [b1, b0],
            Correction::MinusSigmaZ => [-b0, b1],
            // σ_z first, then the swap.
            Correction::NotSigmaZ => [-b1, b0],
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correction::Identity => "id",
            Correction::Not => "N",
            Correction::MinusSigmaZ => "-sigma_z",
            Correction::NotSigmaZ => "N sigma_z",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    /// Alice's outcome as the two bits `(i3, i2)`.
    pub outcome: usize,
    pub probability: f64,
    pub correction: Correction,
    /// Population of qubit 1 in `|1⟩` within the branch; zero ideally.
    pub leak: f64,
    /// Bob's corrected qubit-0 state, or `None` for an empty branch.
    pub bob: Option<[Complex64; 2]>,
    /// `|⟨Φx|corrected⟩|²`.
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub branches: Vec<TeleportBranch>,
}

impl TeleportReport {
    pub fn min_overlap(&self) -> f64 {
        self.branches
            .iter()
            .filter_map(|b| b.overlap)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Branches with less probability than this are reported as empty.
pub const EMPTY_BRANCH: f64 = 1e-12;

/// Post-selects each of Alice's outcomes, extracts Bob's qubit conditioned
/// on qubit 1 being `|0⟩`, applies the correction table and compares with
/// `Φx = c0|0⟩ + c1|1⟩`.
pub fn teleport_verify(state: &StateVector, c0: Complex64, c1: Complex64) -> Result<TeleportReport> {
    if state.n() != 4 {
        return Err(Error::WrongRegisterSize {
            expected: 4,
            got: state.n(),
        });
    }
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    let amps = state.amplitudes();
    let branches = (0..4)
        .map(|outcome| {
            let base = outcome << 2;
            let probability: f64 = (0..4).map(|low| amps[base | low].norm_sqr()).sum();
            let correction = Correction::for_outcome(outcome);
            if probability < EMPTY_BRANCH {
                return TeleportBranch {
                    outcome,
                    probability,
                    correction,
                    leak: 0.0,
                    bob: None,
                    overlap: None,
                };
            }
            let leak = (amps[base | 0b10].norm_sqr() + amps[base | 0b11].norm_sqr()) / probability;
            let raw = [amps[base], amps[base | 0b01]];
            let bob_norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
            let (bob, overlap) = if bob_norm * bob_norm < EMPTY_BRANCH {
                (None, None)
            } else {
                let scaled = [raw[0] / bob_norm, raw[1] / bob_norm];
                let corrected = correction.apply(scaled);
                let ov = c0.conj() * corrected[0] + c1.conj() * corrected[1];
                (Some(corrected), Some(ov.norm_sqr()))
            };
            TeleportBranch {
                outcome,
                probability,
                correction,
                leak,
                bob,
                overlap,
            }
        })
        .collect();
    Ok(TeleportReport { branches })
}

impl fmt::Display for TeleportReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::runner::output::fmt_sig;
        writeln!(f, "teleportation branches (Alice = qubits 3,2; Bob = qubit 0):")?;
        for b in &self.branches {
            write!(
                f,
                "  outcome {:02b}: p = {}, correction = {}, qubit-1 leak = {}",
                b.outcome,
                fmt_sig(b.probability),
                b.correction,
                fmt_sig(b.leak)
            )?;
            match (b.bob, b.overlap) {
                (Some([x, y]), Some(ov)) => writeln!(
                    f,
                    ", bob = ({}{:+}i, {}{:+}i), overlap = {}",
                    fmt_sig(x.re),
                    fmt_sig(x.im),
                    fmt_sig(y.re),
                    fmt_sig(y.im),
                    fmt_sig(ov)
                )?,
                _ => writeln!(f, ", empty branch")?,
            }
        }
        Ok(())
    }
}

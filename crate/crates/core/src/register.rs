//! Static model of the spin chain: basis indexing, the diagonal spectrum,
//! single-flip transition frequencies, offset classes and detunings.
//!
//! Frequencies are plain angular frequencies in model units and ħ = 1, so
//! energies and frequencies share one unit.

use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used when comparing transition frequencies for
/// degeneracy, scaled by the largest Larmor frequency.
pub const DEGENERACY_RTOL: f64 = 1e-9;

/// A computational basis state. Bit `j` is the state of qubit `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    #[inline]
    pub fn bit(self, j: usize) -> u8 {
        ((self.0 >> j) & 1) as u8
    }

    #[inline]
    pub fn flip(self, k: usize) -> Self {
        BasisIndex(self.0 ^ (1 << k))
    }

    #[inline]
    pub fn with_bit(self, k: usize, value: u8) -> Self {
        if value == 0 {
            BasisIndex(self.0 & !(1 << k))
        } else {
            BasisIndex(self.0 | (1 << k))
        }
    }

    /// Bit string `i_{n-1} … i_0`, most significant qubit first.
    pub fn label(self, n: usize) -> String {
        (0..n).rev().map(|j| if self.bit(j) == 1 { '1' } else { '0' }).collect()
    }

    /// Parses a bit string such as `"0101"`.
    pub fn from_label(label: &str) -> Option<Self> {
        if label.is_empty() || label.len() > usize::BITS as usize - 1 {
            return None;
        }
        usize::from_str_radix(label, 2).ok().map(BasisIndex)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The set of resonance offsets `(μ, ν)` a qubit can be driven at.
///
/// The set is always a product of the possible nearest-neighbor shifts `μ`
/// and next-nearest shifts `ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetSet {
    pub mu: Vec<i32>,
    pub nu: Vec<i32>,
}

impl OffsetSet {
    fn for_neighbor_count(first: usize, second: usize) -> Self {
        OffsetSet {
            mu: offsets_for(first),
            nu: offsets_for(second),
        }
    }

    pub fn contains(&self, mu: i32, nu: i32) -> bool {
        self.mu.contains(&mu) && self.nu.contains(&nu)
    }

    pub fn pairs(&self) -> Vec<(i32, i32)> {
        self.mu
            .iter()
            .flat_map(|&m| self.nu.iter().map(move |&v| (m, v)))
            .collect()
    }
}

fn offsets_for(neighbors: usize) -> Vec<i32> {
    match neighbors {
        0 => vec![0],
        1 => vec![-1, 1],
        _ => vec![-2, 0, 2],
    }
}

/// Chain size, Larmor frequencies and the two Ising couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    n: usize,
    larmor: Vec<f64>,
    j1: f64,
    j2: f64,
}

impl ChainConfig {
    /// Builds and validates a chain.
    ///
    /// Requires `n >= 2`, positive pairwise-distinct Larmor frequencies,
    /// `j1 > j2 >= 0` (the decoupled chain `j1 = j2 = 0` is tolerated) and a
    /// non-degenerate transition spectrum.
    pub fn new(larmor: Vec<f64>, j1: f64, j2: f64) -> Result<Self> {
        let config = Self::new_unchecked(larmor, j1, j2);
        config.validate()?;
        Ok(config)
    }

    /// Builds a chain without any validation. Useful for analytic checks on
    /// chains that are deliberately degenerate.
    pub fn new_unchecked(larmor: Vec<f64>, j1: f64, j2: f64) -> Self {
        ChainConfig {
            n: larmor.len(),
            larmor,
            j1,
            j2,
        }
    }

    /// The parameter set used for both protocol simulations:
    /// `w = (100, 200, 400, 800)`, `J = 10`, `J' = 0.4`.
    pub fn default_chain() -> Self {
        Self::new(vec![100.0, 200.0, 400.0, 800.0], 10.0, 0.4)
            .expect("reference parameters are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn j1(&self) -> f64 {
        self.j1
    }

    pub fn j2(&self) -> f64 {
        self.j2
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 qubits, got {}",
                self.n
            )));
        }
        if self.n > 20 {
            return Err(Error::InvalidConfig(format!(
                "{} qubits is beyond what a dense state vector can hold here",
                self.n
            )));
        }
        for (k, &w) in self.larmor.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "Larmor frequency w_{k} = {w} must be positive"
                )));
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.larmor[a] == self.larmor[b] {
                    return Err(Error::InvalidConfig(format!(
                        "Larmor frequencies w_{a} and w_{b} coincide ({})",
                        self.larmor[a]
                    )));
                }
            }
        }
        if !(self.j1.is_finite() && self.j2.is_finite()) || self.j2 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "couplings must be finite with J' >= 0 (J = {}, J' = {})",
                self.j1, self.j2
            )));
        }
        if self.j1 == 0.0 && self.j2 == 0.0 {
            log::warn!("decoupled chain (J = J' = 0): conditional pulses cannot be resolved");
        } else if self.j1 <= self.j2 {
            return Err(Error::InvalidConfig(format!(
                "need J > J' (J = {}, J' = {})",
                self.j1, self.j2
            )));
        } else if self.j2 == 0.0 {
            log::warn!("J' = 0: chain reduces to the nearest-neighbor Ising model");
        }
        self.check_degeneracy()
    }

    /// Two resonance lines belonging to different offset classes must not
    /// coincide. Lines are grouped by the effective offsets `(μ, ν)`; an
    /// offset axis whose coupling vanishes collapses to zero.
    fn check_degeneracy(&self) -> Result<()> {
        let tol = DEGENERACY_RTOL * self.larmor.iter().cloned().fold(0.0, f64::max);
        let mut lines: Vec<(usize, i32, i32, f64)> = Vec::new();
        for k in 0..self.n {
            for alpha in (0..self.dim()).map(BasisIndex) {
                if alpha.bit(k) == 1 {
                    continue;
                }
                let (mu, nu) = self.offsets_of(k, alpha);
                let mu = if self.j1 == 0.0 { 0 } else { mu };
                let nu = if self.j2 == 0.0 { 0 } else { nu };
                if !lines.iter().any(|l| l.0 == k && l.1 == mu && l.2 == nu) {
                    lines.push((k, mu, nu, self.line(k, mu, nu)));
                }
            }
        }
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                if (a.3 - b.3).abs() < tol {
                    return Err(Error::Degenerate {
                        k: a.0,
                        k_other: b.0,
                        freq_a: a.3,
                        freq_b: b.3,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_qubit(&self, k: usize) -> Result<()> {
        if k >= self.n {
            Err(Error::QubitOutOfRange { k, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_index(&self, alpha: BasisIndex) -> Result<()> {
        if alpha.0 >= self.dim() {
            Err(Error::IndexOutOfRange {
                alpha: alpha.0,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// `(-1)^{α_l}`, or 0 when `l` lies outside the chain.
    #[inline]
    fn spin_sign(&self, alpha: BasisIndex, l: isize) -> i32 {
        if l < 0 || l as usize >= self.n {
            0
        } else if alpha.bit(l as usize) == 0 {
            1
        } else {
            -1
        }
    }

    /// The offsets `(μ, ν)` of the bit-`k` flip of `alpha`.
    pub fn offsets_of(&self, k: usize, alpha: BasisIndex) -> (i32, i32) {
        let k = k as isize;
        let mu = self.spin_sign(alpha, k + 1) + self.spin_sign(alpha, k - 1);
        let nu = self.spin_sign(alpha, k + 2) + self.spin_sign(alpha, k - 2);
        (mu, nu)
    }

    /// The drive frequency `w_k + μJ + νJ'`.
    #[inline]
    pub fn line(&self, k: usize, mu: i32, nu: i32) -> f64 {
        self.larmor[k] + mu as f64 * self.j1 + nu as f64 * self.j2
    }

    /// Energy `E_α` (ħ = 1) of a basis state.
    pub fn energy_of(&self, alpha: BasisIndex) -> Result<f64> {
        self.check_index(alpha)?;
        Ok(self.energy_unchecked(alpha))
    }

    pub(crate) fn energy_unchecked(&self, alpha: BasisIndex) -> f64 {
        let s = |l: usize| if alpha.bit(l) == 0 { 1.0 } else { -1.0 };
        let zeeman: f64 = (0..self.n).map(|k| s(k) * self.larmor[k]).sum();
        let first: f64 = (0..self.n - 1).map(|k| s(k) * s(k + 1)).sum();
        let second: f64 = (0..self.n.saturating_sub(2)).map(|k| s(k) * s(k + 2)).sum();
        -0.5 * (zeeman + self.j1 * first + self.j2 * second)
    }

    /// Frequency of the bit-`k` flip of `alpha`,
    /// `E_{α|α_k=1} − E_{α|α_k=0}`. Does not depend on `α_k` itself.
    pub fn transition_frequency(&self, k: usize, alpha: BasisIndex) -> Result<f64> {
        self.check_qubit(k)?;
        self.check_index(alpha)?;
        Ok(self.transition_unchecked(k, alpha))
    }

    #[inline]
    pub(crate) fn transition_unchecked(&self, k: usize, alpha: BasisIndex) -> f64 {
        let (mu, nu) = self.offsets_of(k, alpha);
        self.line(k, mu, nu)
    }

    /// The `(μ, ν)` pairs at which qubit `k` has a resonant transition.
    pub fn allowed_offsets(&self, k: usize) -> Result<OffsetSet> {
        self.check_qubit(k)?;
        let in_chain = |l: isize| l >= 0 && (l as usize) < self.n;
        let k = k as isize;
        let first = [k - 1, k + 1].into_iter().filter(|&l| in_chain(l)).count();
        let second = [k - 2, k + 2].into_iter().filter(|&l| in_chain(l)).count();
        Ok(OffsetSet::for_neighbor_count(first, second))
    }

    /// Detuning `Δ_k = w − ω_k(α)` of a drive at `drive_w` from the bit-`k`
    /// flip of `alpha`.
    pub fn detuning(&self, drive_w: f64, k: usize, alpha: BasisIndex) -> Result<f64> {
        Ok(drive_w - self.transition_frequency(k, alpha)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn chain4() -> ChainConfig {
        ChainConfig::default_chain()
    }

    #[test]
    fn energy_examples() {
        let c = chain4();
        assert_abs_diff_eq!(c.energy_of(BasisIndex(0)).unwrap(), -765.4, epsilon = 1e-12);
        assert_abs_diff_eq!(c.energy_of(BasisIndex(15)).unwrap(), 734.6, epsilon = 1e-12);
        let free = ChainConfig::new(vec![100.0, 200.0, 400.0, 800.0], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(free.energy_of(BasisIndex(0)).unwrap(), -750.0, epsilon = 1e-12);
        assert!(matches!(
            c.energy_of(BasisIndex(16)),
            Err(Error::IndexOutOfRange { alpha: 16, dim: 16 })
        ));
    }

    #[test]
    fn transition_examples() {
        let c = chain4();
        assert_abs_diff_eq!(
            c.transition_frequency(2, BasisIndex(0)).unwrap(),
            420.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            c.transition_frequency(3, BasisIndex(0)).unwrap(),
            810.4,
            epsilon = 1e-12
        );
        assert!(matches!(
            c.transition_frequency(4, BasisIndex(0)),
            Err(Error::QubitOutOfRange { k: 4, n: 4 })
        ));
    }

    #[test]
    fn transition_is_energy_difference() {
        let c = chain4();
        for k in 0..4 {
            for a in 0..16 {
                let alpha = BasisIndex(a);
                let up = c.energy_of(alpha.with_bit(k, 1)).unwrap();
                let down = c.energy_of(alpha.with_bit(k, 0)).unwrap();
                assert_abs_diff_eq!(
                    c.transition_frequency(k, alpha).unwrap(),
                    up - down,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn allowed_offsets_examples() {
        let c = chain4();
        assert_eq!(
            c.allowed_offsets(0).unwrap(),
            OffsetSet { mu: vec![-1, 1], nu: vec![-1, 1] }
        );
        assert_eq!(
            c.allowed_offsets(2).unwrap(),
            OffsetSet { mu: vec![-2, 0, 2], nu: vec![-1, 1] }
        );
        let two = ChainConfig::new(vec![5.0, 11.0], 1.0, 0.0).unwrap();
        assert_eq!(
            two.allowed_offsets(0).unwrap(),
            OffsetSet { mu: vec![-1, 1], nu: vec![0] }
        );
        assert!(c.allowed_offsets(7).is_err());
    }

    #[test]
    fn detuning_examples() {
        let c = chain4();
        let drive = 200.0 + 0.4;
        let alpha = BasisIndex::from_label("1001").unwrap();
        assert_abs_diff_eq!(c.detuning(drive, 1, alpha).unwrap(), 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(c.detuning(drive, 1, BasisIndex(0)).unwrap(), -20.0, epsilon = 1e-10);
        let on = c.transition_frequency(2, BasisIndex(5)).unwrap();
        assert_eq!(c.detuning(on, 2, BasisIndex(5)).unwrap(), 0.0);
    }

    #[test]
    fn labels() {
        assert_eq!(BasisIndex(5).label(3), "101");
        assert_eq!(BasisIndex(1).label(4), "0001");
        assert_eq!(BasisIndex::from_label("1011"), Some(BasisIndex(11)));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ChainConfig::new(vec![100.0], 1.0, 0.0).is_err());
        assert!(ChainConfig::new(vec![100.0, 100.0], 1.0, 0.0).is_err());
        assert!(ChainConfig::new(vec![100.0, -2.0], 1.0, 0.0).is_err());
        assert!(ChainConfig::new(vec![100.0, 200.0, 400.0], 0.4, 10.0).is_err());
        // J = 2J' makes μ = ±2 and ν = ∓2 lines of a middle qubit coincide.
        assert!(matches!(
            ChainConfig::new(vec![100.0, 200.0, 400.0, 800.0, 1600.0], 2.0, 1.0),
            Err(Error::Degenerate { .. })
        ));
        // Lines of neighboring qubits overlap when J is comparable to w.
        assert!(matches!(
            ChainConfig::new(vec![100.0, 140.0], 20.0, 0.0),
            Err(Error::Degenerate { .. })
        ));
    }
}

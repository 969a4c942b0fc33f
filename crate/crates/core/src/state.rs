use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::register::BasisIndex;

/// Interaction-picture amplitudes `D_α` over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, alpha: BasisIndex) -> Result<Self> {
        let dim = 1usize << n;
        if alpha.0 >= dim {
            return Err(Error::IndexOutOfRange { alpha: alpha.0, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[alpha.0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be `2^n`. No normalization is
    /// imposed.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: dim,
            });
        }
        Ok(StateVector { n, amps })
    }

    /// Builds a state from `(index, amplitude)` pairs, zero elsewhere.
    pub fn from_sparse(n: usize, entries: &[(usize, Complex64)]) -> Result<Self> {
        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for &(alpha, c) in entries {
            if alpha >= dim {
                return Err(Error::IndexOutOfRange { alpha, dim });
            }
            amps[alpha] += c;
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amps.iter_mut().for_each(|c| *c /= norm);
        }
        self
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol {
            Err(Error::NotNormalized { norm_sqr })
        } else {
            Ok(())
        }
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `max_α |self_α − other_α|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// As [`max_abs_diff`](Self::max_abs_diff), after rotating `other` by the
    /// global phase that best aligns it with `self`.
    pub fn max_abs_diff_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max))
    }

    /// Multiplies every amplitude by `phase`.
    pub fn scaled(mut self, phase: Complex64) -> Self {
        self.amps.iter_mut().for_each(|c| *c *= phase);
        self
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, alpha: usize) -> &Complex64 {
        &self.amps[alpha]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_insensitive_distance() {
        let a = StateVector::from_sparse(2, &[(0, Complex64::new(0.6, 0.0)), (3, Complex64::new(0.0, 0.8))])
            .unwrap();
        let b = a.clone().scaled(Complex64::from_polar(1.0, 1.234));
        assert!(a.max_abs_diff(&b).unwrap() > 0.5);
        assert!(a.max_abs_diff_up_to_phase(&b).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(StateVector::from_amplitudes(2, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::basis(2, BasisIndex(4)).is_err());
    }
}

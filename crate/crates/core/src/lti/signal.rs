//! Uniformly sampled real-valued signals.

use crate::error::{Error, Result};

/// A uniformly sampled real sequence with its sample rate in Hz.
///
/// All loop signals (references, error, actuator outputs, disturbances) are
/// carried as `SampledSignal`s in normalized track-pitch units.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl SampledSignal {
    /// Wrap a sample vector; every sample must be finite and the rate positive.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// All-zero signal of the given length.
    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate)
    }

    /// Unit impulse at sample 0.
    pub fn impulse(len: usize, sample_rate: f64) -> Result<Self> {
        let mut samples = vec![0.0; len];
        if len > 0 {
            samples[0] = 1.0;
        }
        Self::new(samples, sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample at index `k`, reading 0 outside the recorded range.
    pub fn get(&self, k: usize) -> f64 {
        self.samples.get(k).copied().unwrap_or(0.0)
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Elementwise a*self + b*other; lengths and rates must match.
    pub fn lin_comb(&self, a: f64, other: &SampledSignal, b: f64) -> Result<SampledSignal> {
        if self.len() != other.len() {
            return Err(Error::InvalidSignal(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        if !rates_match(self.sample_rate, other.sample_rate) {
            return Err(Error::SampleRateMismatch {
                expected_hz: self.sample_rate,
                actual_hz: other.sample_rate,
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        SampledSignal::new(samples, self.sample_rate)
    }

    /// Signal advanced by `n` samples (future values shifted to the present,
    /// zero-padded at the tail). Used for reference preview.
    pub fn advanced(&self, n: usize) -> SampledSignal {
        let mut samples = vec![0.0; self.samples.len()];
        for k in 0..self.samples.len() {
            samples[k] = self.get(k + n);
        }
        Self {
            samples,
            sample_rate: self.sample_rate,
        }
    }

    pub(crate) fn from_raw(samples: Vec<f64>, sample_rate: f64) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }
}

/// Relative comparison of sample rates; exact float equality is too brittle
/// after 1/T round trips.
pub(crate) fn rates_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(SampledSignal::new(vec![0.0, f64::NAN], 1.0).is_err());
        assert!(SampledSignal::new(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn rms_of_constant() {
        let s = SampledSignal::new(vec![2.0; 100], 10.0).unwrap();
        assert!((s.rms() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn advance_shifts_and_pads() {
        let s = SampledSignal::new(vec![1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(s.advanced(1).samples(), &[2.0, 3.0, 0.0]);
        assert_eq!(s.advanced(5).samples(), &[0.0, 0.0, 0.0]);
    }
}

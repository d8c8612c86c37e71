//! Discrete-time LTI systems: rational transfer functions in the unit delay,
//! simulation, frequency response, interconnection algebra, and stability /
//! strict-positive-realness tests.
//!
//! Coefficient vectors are in ascending powers of q^-1, so
//! `num = [b0, b1, ...]`, `den = [a0, a1, ...]` denotes
//! (b0 + b1 q^-1 + ...) / (a0 + a1 q^-1 + ...). The denominator leading
//! coefficient is normalized to 1 on construction, which keeps every system
//! causal by construction.

mod filter;
mod poly;
mod roots;
mod signal;

pub use filter::FilterState;
pub use signal::SampledSignal;

pub(crate) use poly::eval as poly_eval;
pub(crate) use poly::mul as poly_mul;
pub(crate) use roots::delay_poly_roots;
pub(crate) use signal::rates_match;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::Write;

/// Tolerance on |root| - 1 used by the stability test; roots within this band
/// of the unit circle are classified unstable.
pub const STABILITY_TOL: f64 = 1e-9;

/// Rational discrete-time SISO system in the unit delay q^-1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
    sample_time: f64,
}

impl DiscreteTransferFunction {
    /// Build a transfer function from delay-polynomial coefficients.
    ///
    /// The denominator is normalized so its leading coefficient is 1 and
    /// trailing near-zero coefficients are trimmed from both polynomials.
    pub fn new(num: Vec<f64>, den: Vec<f64>, sample_time: f64) -> Result<Self> {
        if !(sample_time > 0.0) || !sample_time.is_finite() {
            return Err(Error::InvalidSystem(format!(
                "sample time must be positive, got {sample_time}"
            )));
        }
        if den.is_empty() {
            return Err(Error::InvalidSystem("empty denominator".into()));
        }
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidSystem("non-finite coefficient".into()));
        }
        let lead = den[0];
        if lead == 0.0 {
            return Err(Error::InvalidSystem(
                "zero leading denominator coefficient".into(),
            ));
        }
        let num = if num.is_empty() { vec![0.0] } else { num };
        let num = poly::trim_trailing(poly::scale(&num, 1.0 / lead));
        let den = poly::trim_trailing(poly::scale(&den, 1.0 / lead));
        Ok(Self {
            num,
            den,
            sample_time,
        })
    }

    /// Unity system.
    pub fn identity(sample_time: f64) -> Self {
        Self::new(vec![1.0], vec![1.0], sample_time).expect("identity is always valid")
    }

    /// Constant gain.
    pub fn constant(gain: f64, sample_time: f64) -> Result<Self> {
        Self::new(vec![gain], vec![1.0], sample_time)
    }

    /// Pure delay of `n` samples.
    pub fn delay(n: usize, sample_time: f64) -> Self {
        let mut num = vec![0.0; n + 1];
        num[n] = 1.0;
        Self::new(num, vec![1.0], sample_time).expect("delay is always valid")
    }

    /// FIR system with the given tap vector.
    pub fn fir(taps: &[f64], sample_time: f64) -> Result<Self> {
        Self::new(taps.to_vec(), vec![1.0], sample_time)
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn sample_time(&self) -> f64 {
        self.sample_time
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.sample_time
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.sample_time
    }

    /// True when the zero-delay numerator coefficient vanishes, i.e. the
    /// output depends on past inputs only.
    pub fn is_strictly_proper(&self) -> bool {
        self.num[0] == 0.0 || self.num[0].abs() < poly::COEFF_TRIM * poly::max_abs(&self.num)
    }

    /// True when the numerator is identically zero.
    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0.0)
    }

    /// Number of leading zero numerator coefficients (pure delay), or `None`
    /// for the zero system.
    pub fn relative_degree(&self) -> Option<usize> {
        self.num.iter().position(|c| *c != 0.0)
    }

    /// Evaluate at a complex unit-delay argument `w` (= e^{-j w T} on the
    /// frequency axis).
    pub fn eval_delay(&self, w: Complex64) -> Complex64 {
        poly::eval(&self.num, w) / poly::eval(&self.den, w)
    }

    /// Frequency response value at `freq_hz` (no range check).
    pub(crate) fn response_at(&self, freq_hz: f64) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * freq_hz * self.sample_time;
        self.eval_delay(Complex64::from_polar(1.0, -theta))
    }

    /// Drive the system with `input` from zero initial conditions.
    pub fn simulate(&self, input: &SampledSignal) -> Result<SampledSignal> {
        if !rates_match(input.sample_rate(), self.sample_rate()) {
            return Err(Error::SampleRateMismatch {
                expected_hz: self.sample_rate(),
                actual_hz: input.sample_rate(),
            });
        }
        let mut f = FilterState::new(self);
        let out: Vec<f64> = input.samples().iter().map(|&u| f.step(u)).collect();
        if let Some(i) = out.iter().position(|y| !y.is_finite()) {
            return Err(Error::NonFiniteSample {
                signal: "simulate output",
                index: i,
            });
        }
        Ok(SampledSignal::from_raw(out, input.sample_rate()))
    }

    /// Frequency response over a grid of frequencies in (0, Nyquist).
    pub fn freq_response(&self, frequencies: &[f64]) -> Result<FrequencyResponse> {
        let nyq = self.nyquist();
        for &f in frequencies {
            if !(f > 0.0 && f < nyq) {
                return Err(Error::FrequencyOutOfRange {
                    freq_hz: f,
                    nyquist_hz: nyq,
                });
            }
        }
        let values = frequencies.iter().map(|&f| self.response_at(f)).collect();
        FrequencyResponse::new(frequencies.to_vec(), values)
    }

    /// Default analysis grid: 4096 logarithmically spaced points from 1 Hz to
    /// 0.999 Nyquist, dense enough to resolve lightly damped resonances.
    pub fn default_grid(&self) -> Vec<f64> {
        log_grid(1.0, 0.999 * self.nyquist(), 4096)
    }

    fn combine(&self, other: &Self) -> Result<()> {
        if (self.sample_time - other.sample_time).abs()
            > 1e-12 * self.sample_time.max(other.sample_time)
        {
            return Err(Error::SampleTimeMismatch {
                left: self.sample_time,
                right: other.sample_time,
            });
        }
        Ok(())
    }

    /// Series interconnection self * other.
    pub fn series(&self, other: &Self) -> Result<Self> {
        self.combine(other)?;
        Self::new(
            poly::mul(&self.num, &other.num),
            poly::mul(&self.den, &other.den),
            self.sample_time,
        )
    }

    /// Parallel interconnection self + other.
    pub fn parallel(&self, other: &Self) -> Result<Self> {
        self.combine(other)?;
        let num = poly::add(
            &poly::mul(&self.num, &other.den),
            &poly::mul(&other.num, &self.den),
        );
        Self::new(num, poly::mul(&self.den, &other.den), self.sample_time)
    }

    /// Difference self - other.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.parallel(&other.neg())
    }

    /// Negated system.
    pub fn neg(&self) -> Self {
        Self {
            num: poly::scale(&self.num, -1.0),
            den: self.den.clone(),
            sample_time: self.sample_time,
        }
    }

    /// Scaled system.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            num: poly::trim_trailing(poly::scale(&self.num, k)),
            den: self.den.clone(),
            sample_time: self.sample_time,
        }
    }

    /// Closed loop forward / (1 + forward * loop).
    pub fn feedback(&self, loop_tf: &Self) -> Result<Self> {
        self.combine(loop_tf)?;
        let num = poly::mul(&self.num, &loop_tf.den);
        let den = poly::add(
            &poly::mul(&self.den, &loop_tf.den),
            &poly::mul(&self.num, &loop_tf.num),
        );
        if den[0] == 0.0 || den[0].abs() < poly::COEFF_TRIM * poly::max_abs(&den) {
            return Err(Error::IllPosedLoop(
                "1 + forward*loop has zero leading coefficient".into(),
            ));
        }
        Self::new(num, den, self.sample_time)
    }

    /// Poles in the z plane.
    pub fn poles(&self) -> Vec<Complex64> {
        delay_poly_roots(&self.den)
    }

    /// All poles strictly inside the unit circle; roots within
    /// `STABILITY_TOL` of the circle count as unstable.
    pub fn is_stable(&self) -> bool {
        roots::max_root_magnitude(&self.den) < 1.0 - STABILITY_TOL
    }

    /// Strict positive realness over the given grid: stable and the real part
    /// of the frequency response positive at every grid point.
    pub fn is_spr(&self, frequencies: &[f64]) -> Result<SprReport> {
        if frequencies.is_empty() {
            return Err(Error::InvalidParameter("empty SPR grid".into()));
        }
        let resp = self.freq_response(frequencies)?;
        let mut min_real = f64::INFINITY;
        let mut argmin = frequencies[0];
        for (f, v) in resp.iter() {
            if v.re < min_real {
                min_real = v.re;
                argmin = f;
            }
        }
        let stable = self.is_stable();
        Ok(SprReport {
            is_spr: stable && min_real > 0.0,
            is_stable: stable,
            min_real_part: min_real,
            argmin_frequency: argmin,
            grid_size: frequencies.len(),
        })
    }
}

/// Logarithmically spaced frequency grid.
pub fn log_grid(f_lo: f64, f_hi: f64, n: usize) -> Vec<f64> {
    assert!(f_lo > 0.0 && f_hi > f_lo && n >= 2);
    let ratio = (f_hi / f_lo).ln();
    (0..n)
        .map(|i| f_lo * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Complex frequency response samples over a strictly increasing Hz grid.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    frequencies: Vec<f64>,
    values: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn new(frequencies: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::InvalidParameter(
                "frequency and value lengths differ".into(),
            ));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "frequency grid must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            frequencies,
            values,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.frequencies
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Write as CSV with columns `freq_hz, real, imag, mag_db, phase_deg`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "freq_hz,real,imag,mag_db,phase_deg")?;
        for (f, v) in self.iter() {
            let mag_db = 20.0 * v.norm().log10();
            let phase_deg = v.arg().to_degrees();
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_sig(f),
                fmt_sig(v.re),
                fmt_sig(v.im),
                fmt_sig(mag_db),
                fmt_sig(phase_deg)
            )?;
        }
        Ok(())
    }
}

/// Format a value with 12 significant digits, the precision CSV round-trip
/// tests rely on.
pub(crate) fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

/// Outcome of a strict-positive-realness test on a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprReport {
    pub is_spr: bool,
    pub is_stable: bool,
    pub min_real_part: f64,
    pub argmin_frequency: f64,
    pub grid_size: usize,
}

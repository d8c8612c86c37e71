//! Zero-phase plant inversion for feedforward tracking.
//!
//! A stable plant q^-rho B(q^-1)/A(q^-1) is inverted by factoring the
//! numerator into a well-damped part B+ and an uninvertible part B- (zeros on
//! or outside the unit circle), then mirroring B-:
//!
//!   causal_filter = A * reverse(B-) / (B+ * B-(1)^2)
//!
//! The cascade plant * causal_filter equals q^-(rho+deg B-) times a real,
//! nonnegative frequency gain, so after advancing by `preview_samples` the
//! cascade has exactly zero phase and unity DC gain.

use crate::error::{Error, Result};
use crate::lti::{delay_poly_roots, DiscreteTransferFunction};
use num_complex::Complex64;

/// Numerator roots with magnitude at or above 1 - this tolerance are treated
/// as uninvertible; root-finding jitter otherwise flips the classification.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;

/// Zero-phase inverse of a stable plant: a causal filter plus the number of
/// samples of input preview needed for exact phase cancellation.
///
/// The factor polynomials are kept alongside the assembled filter so
/// frequency-domain evaluation can cancel the plant denominator exactly
/// instead of evaluating the convolved numerator near its root cluster.
#[derive(Debug, Clone)]
pub struct ZpetcInverse {
    causal_filter: DiscreteTransferFunction,
    preview_samples: usize,
    plant_den: Vec<f64>,
    b_plus: Vec<f64>,
    b_minus_rev: Vec<f64>,
    inv_scale: f64,
}

impl ZpetcInverse {
    /// Invert `plant`. Fails if the plant is unstable, identically zero, or
    /// has a numerator zero at z = 1 (the mirror normalization divides by
    /// B-(1)).
    pub fn new(plant: &DiscreteTransferFunction) -> Result<Self> {
        if !plant.is_stable() {
            return Err(Error::UnstableSystem(
                "zero-phase inversion requires a stable plant".into(),
            ));
        }
        if plant.is_zero() {
            return Err(Error::ZeroPhaseInversion("zero numerator".into()));
        }
        let rho = plant.relative_degree().expect("nonzero numerator");
        let b = &plant.numerator()[rho..];
        let b0 = b[0];
        let zeros = delay_poly_roots(b);
        let mut stable_zeros = Vec::new();
        let mut unstable_zeros = Vec::new();
        for z in zeros {
            if z.norm() < 1.0 - UNIT_CIRCLE_TOL {
                stable_zeros.push(z);
            } else {
                unstable_zeros.push(z);
            }
        }
        let b_plus = scale_poly(&poly_from_roots(&stable_zeros)?, b0);
        let b_minus = poly_from_roots(&unstable_zeros)?;
        let b_minus_at_one: f64 = b_minus.iter().sum();
        if b_minus_at_one.abs() < 1e-9 {
            return Err(Error::ZeroPhaseInversion(
                "numerator zero at z = 1".into(),
            ));
        }
        let mut b_minus_rev: Vec<f64> = b_minus.clone();
        b_minus_rev.reverse();

        let num = crate::lti::poly_mul(plant.denominator(), &b_minus_rev);
        let den = scale_poly(&b_plus, b_minus_at_one * b_minus_at_one);
        let raw = DiscreteTransferFunction::new(num, den, plant.sample_time())?;
        let preview_samples = rho + b_minus.len() - 1;

        // Pin the compensated cascade DC gain to exactly 1. The plant
        // denominator cancels between plant and inverse, so evaluate the
        // remaining factors directly; the convolved numerator is badly
        // conditioned at DC when the plant has poles near z = 1.
        let one = Complex64::new(1.0, 0.0);
        let dc = (crate::lti::poly_eval(plant.numerator(), one)
            * crate::lti::poly_eval(&b_minus_rev, one)
            / (crate::lti::poly_eval(&b_plus, one) * b_minus_at_one * b_minus_at_one))
            .re;
        if !dc.is_finite() || dc.abs() < 1e-12 {
            return Err(Error::ZeroPhaseInversion(format!(
                "degenerate cascade DC gain {dc}"
            )));
        }
        let causal_filter = raw.scaled(1.0 / dc);
        if !causal_filter.is_stable() {
            return Err(Error::ZeroPhaseInversion(
                "inverse filter is unstable".into(),
            ));
        }
        let inv = Self {
            causal_filter,
            preview_samples,
            plant_den: plant.denominator().to_vec(),
            b_plus,
            b_minus_rev,
            inv_scale: 1.0 / (b_minus_at_one * b_minus_at_one * dc),
        };
        inv.certify(plant)?;
        Ok(inv)
    }

    /// Verify the zero-phase property on a dense grid before handing the
    /// inverse out. Clustered numerator roots of composed systems cannot be
    /// factored faithfully in double precision; such plants are rejected
    /// rather than silently returning an inverse without the property.
    fn certify(&self, plant: &DiscreteTransferFunction) -> Result<()> {
        let dc = self.compensated_dc_gain(plant);
        if (dc - 1.0).abs() > 1e-12 {
            return Err(Error::ZeroPhaseInversion(format!(
                "zero-phase property not certified: DC gain {dc}"
            )));
        }
        for &f in &crate::lti::log_grid(1.0, 0.999 * plant.nyquist(), 512) {
            let v = self.compensated_response_at(plant, f);
            if v.im.abs() > 1e-9 * v.norm().max(1.0) {
                return Err(Error::ZeroPhaseInversion(format!(
                    "zero-phase property not certified: phase {} rad at {f} Hz",
                    v.arg()
                )));
            }
        }
        Ok(())
    }

    pub fn causal_filter(&self) -> &DiscreteTransferFunction {
        &self.causal_filter
    }

    pub fn preview_samples(&self) -> usize {
        self.preview_samples
    }

    /// Uncompensated cascade `actual * causal_filter`; its phase is a pure
    /// `preview_samples` delay on top of the zero-phase gain.
    pub fn cascade_with(&self, actual: &DiscreteTransferFunction) -> Result<DiscreteTransferFunction> {
        actual.series(&self.causal_filter)
    }

    /// Delay-compensated cascade as a rational system. Only representable
    /// when the uncompensated cascade carries the full preview as a pure
    /// delay factor (true for minimum-phase plants).
    pub fn compensated_cascade_with(
        &self,
        actual: &DiscreteTransferFunction,
    ) -> Result<DiscreteTransferFunction> {
        let cascade = self.cascade_with(actual)?;
        let num = cascade.numerator();
        let scale = num.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if num.len() <= self.preview_samples
            || num[..self.preview_samples]
                .iter()
                .any(|c| c.abs() > 1e-12 * scale)
        {
            return Err(Error::ZeroPhaseInversion(
                "compensated cascade is non-causal for this plant".into(),
            ));
        }
        DiscreteTransferFunction::new(
            num[self.preview_samples..].to_vec(),
            cascade.denominator().to_vec(),
            cascade.sample_time(),
        )
    }

    /// Frequency response of the causal filter at `freq_hz`, evaluated in
    /// factored form so the inverted plant's denominator cancels exactly
    /// against the matching factor in a cascade.
    pub fn causal_response_at(&self, freq_hz: f64) -> Complex64 {
        let theta =
            2.0 * std::f64::consts::PI * freq_hz * self.causal_filter.sample_time();
        let w = Complex64::from_polar(1.0, -theta);
        crate::lti::poly_eval(&self.plant_den, w) * crate::lti::poly_eval(&self.b_minus_rev, w)
            * self.inv_scale
            / crate::lti::poly_eval(&self.b_plus, w)
    }

    /// Frequency response of the delay-compensated cascade
    /// `actual * causal_filter * q^(+preview)` at `freq_hz`.
    pub fn compensated_response_at(
        &self,
        actual: &DiscreteTransferFunction,
        freq_hz: f64,
    ) -> Complex64 {
        let theta =
            2.0 * std::f64::consts::PI * freq_hz * self.causal_filter.sample_time();
        let advance = Complex64::from_polar(1.0, theta * self.preview_samples as f64);
        actual.response_at(freq_hz) * self.causal_response_at(freq_hz) * advance
    }

    /// DC gain of the compensated cascade, evaluated in factored form.
    pub fn compensated_dc_gain(&self, actual: &DiscreteTransferFunction) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        (actual.eval_delay(one)
            * crate::lti::poly_eval(&self.plant_den, one)
            * crate::lti::poly_eval(&self.b_minus_rev, one)
            * self.inv_scale
            / crate::lti::poly_eval(&self.b_plus, one))
        .re
    }
}

fn scale_poly(p: &[f64], k: f64) -> Vec<f64> {
    p.iter().map(|c| c * k).collect()
}

/// Real-coefficient polynomial Prod (1 - z_i q^-1) from a conjugate-closed
/// root set, pairing complex roots into quadratics.
fn poly_from_roots(roots: &[Complex64]) -> Result<Vec<f64>> {
    let mut poly = vec![1.0];
    let mut pending: Vec<Complex64> = roots.to_vec();
    while let Some(z) = pending.pop() {
        if z.im.abs() <= 1e-8 * z.norm().max(1.0) {
            poly = crate::lti::poly_mul(&poly, &[1.0, -z.re]);
        } else {
            let partner = pending
                .iter()
                .position(|w| (w.conj() - z).norm() <= 1e-6 * z.norm().max(1.0));
            let Some(i) = partner else {
                return Err(Error::ZeroPhaseInversion(format!(
                    "complex zero {z} has no conjugate partner"
                )));
            };
            pending.swap_remove(i);
            poly = crate::lti::poly_mul(&poly, &[1.0, -2.0 * z.re, z.norm_sqr()]);
        }
    }
    Ok(poly)
}

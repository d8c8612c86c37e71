//! Parametric surrogate plants for the dual-stage servo.
//!
//! The plant set bundles six systems sharing one sample rate:
//!
//! - `g_v`: coarse voice-coil stage — discretized double integrator (lightly
//!   damped rigid-body pole pair) times a list of resonant modes.
//! - `g_m`: fine micro-actuator stage — flat DC gain with one sample delay
//!   and high-frequency resonances.
//! - `h`: cross-coupling path from the seeking actuator's coil input to an
//!   output disturbance on the following head.
//! - `f_s`: the known part of the disturbance path handed to the adaptive
//!   controller (estimated sensitivity times the coupling model by default).
//! - `k_v`, `k_m`: stabilizing feedback controllers designed against the
//!   plant estimates, with gains normalized at their loop crossovers.
//!
//! Estimates `g_v_hat`, `g_m_hat` equal the actual plants unless a mismatch
//! spec perturbs the actuals; zero-phase inverses are always built from the
//! estimates, which is what a drive would do.

mod zpetc;

pub use zpetc::{ZpetcInverse, UNIT_CIRCLE_TOL};

use crate::error::{Error, Result};
use crate::lti::DiscreteTransferFunction;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// One resonant mode: frequency, relative damping, multiplicative gain.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ResonantMode {
    pub freq_hz: f64,
    pub damping: f64,
    #[serde(default = "one")]
    pub gain: f64,
}

fn one() -> f64 {
    1.0
}

/// Voice-coil stage parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VcmParams {
    /// Acceleration constant; |G_v| ~ gain/(2 pi f)^2 below the modes.
    pub gain: f64,
    /// Rigid-body pole pair frequency; a small positive value keeps the
    /// surrogate strictly stable while preserving the -40 dB/dec slope.
    pub rigid_pole_hz: f64,
    pub modes: Vec<ResonantMode>,
}

impl Default for VcmParams {
    fn default() -> Self {
        Self {
            gain: 4.0e7,
            rigid_pole_hz: 20.0,
            modes: vec![
                ResonantMode {
                    freq_hz: 5_000.0,
                    damping: 0.02,
                    gain: 0.2,
                },
                ResonantMode {
                    freq_hz: 8_000.0,
                    damping: 0.02,
                    gain: 0.1,
                },
            ],
        }
    }
}

/// Micro-actuator stage parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MaParams {
    pub dc_gain: f64,
    pub modes: Vec<ResonantMode>,
}

impl Default for MaParams {
    fn default() -> Self {
        Self {
            dc_gain: 1.0,
            modes: vec![ResonantMode {
                freq_hz: 10_000.0,
                damping: 0.05,
                gain: 1.0,
            }],
        }
    }
}

/// Cross-coupling path parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CouplingParams {
    pub gain: f64,
    pub modes: Vec<ResonantMode>,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self {
            // Calibrated so the default bang-bang seek produces a peak output
            // disturbance near 20% of a track pitch.
            gain: 0.065,
            modes: vec![
                ResonantMode {
                    freq_hz: 2_000.0,
                    damping: 0.03,
                    gain: 1.0,
                },
                ResonantMode {
                    freq_hz: 5_000.0,
                    damping: 0.03,
                    gain: 1.0,
                },
            ],
        }
    }
}

/// Feedback controller design knobs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ControllerParams {
    pub vcm_crossover_hz: f64,
    pub vcm_boost_zero_hz: f64,
    pub vcm_boost_pole_hz: f64,
    pub vcm_lead_zero_hz: f64,
    pub vcm_lead_pole_hz: f64,
    /// Pole damping of the notch placed over each voice-coil mode.
    pub vcm_notch_damping: f64,
    pub ma_crossover_hz: f64,
    pub ma_lead_zero_hz: f64,
    pub ma_lead_pole_hz: f64,
    /// Pole damping of the notch placed over each micro-actuator mode.
    pub ma_notch_damping: f64,
    /// Second-order rolloff keeping the micro-actuator loop gain below unity
    /// near Nyquist.
    pub ma_lowpass_hz: f64,
    pub ma_lowpass_damping: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            vcm_crossover_hz: 1_000.0,
            vcm_boost_zero_hz: 100.0,
            vcm_boost_pole_hz: 20.0,
            vcm_lead_zero_hz: 250.0,
            vcm_lead_pole_hz: 4_000.0,
            vcm_notch_damping: 0.6,
            ma_crossover_hz: 3_000.0,
            ma_lead_zero_hz: 1_000.0,
            ma_lead_pole_hz: 6_000.0,
            ma_notch_damping: 0.8,
            ma_lowpass_hz: 7_000.0,
            ma_lowpass_damping: 0.9,
        }
    }
}

/// Multiplicative model mismatch applied to an actual plant while the
/// unperturbed parameters remain the estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MismatchSpec {
    /// Overall gain factor.
    pub gain_error: f64,
    /// Relative shift applied to each mode frequency.
    pub resonance_freq_shift: f64,
    /// Relative shift applied to each mode damping.
    pub damping_shift: f64,
}

impl Default for MismatchSpec {
    fn default() -> Self {
        Self {
            gain_error: 1.0,
            resonance_freq_shift: 0.0,
            damping_shift: 0.0,
        }
    }
}

impl MismatchSpec {
    pub fn is_null(&self) -> bool {
        self.gain_error == 1.0 && self.resonance_freq_shift == 0.0 && self.damping_shift == 0.0
    }

    fn apply_to_modes(&self, modes: &[ResonantMode]) -> Vec<ResonantMode> {
        modes
            .iter()
            .map(|m| ResonantMode {
                freq_hz: m.freq_hz * (1.0 + self.resonance_freq_shift),
                damping: m.damping * (1.0 + self.damping_shift),
                gain: m.gain,
            })
            .collect()
    }
}

/// Choice of the known-path filter handed to the adaptive controller.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(rename_all = "snake_case")]
pub enum FsSpec {
    /// Estimated closed-loop sensitivity times the coupling model.
    #[default]
    SensitivityTimesCoupling,
    /// Unity filter, for ablation runs.
    Identity,
}

/// Complete parametric description of a plant set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PlantParams {
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub vcm: VcmParams,
    #[serde(default)]
    pub ma: MaParams,
    #[serde(default)]
    pub coupling: CouplingParams,
    #[serde(default)]
    pub controllers: ControllerParams,
    #[serde(default)]
    pub fs: FsSpec,
    /// Mismatch of the actual voice-coil stage against its estimate.
    #[serde(default)]
    pub vcm_mismatch: Option<MismatchSpec>,
    /// Mismatch of the actual micro-actuator against its estimate.
    #[serde(default)]
    pub ma_mismatch: Option<MismatchSpec>,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            sample_rate_hz: 50_000.0,
            vcm: VcmParams::default(),
            ma: MaParams::default(),
            coupling: CouplingParams::default(),
            controllers: ControllerParams::default(),
            fs: FsSpec::default(),
            vcm_mismatch: None,
            ma_mismatch: None,
        }
    }
}

/// Denominator [1, a1, a2] of a two-pole resonator at the given mode, with
/// poles mapped by z = e^(sT) so the mode frequency is preserved exactly at
/// any sample rate.
fn mode_den_poly(mode: &ResonantMode, sample_time: f64) -> Result<Vec<f64>> {
    let nyquist = 0.5 / sample_time;
    if !(mode.freq_hz > 0.0 && mode.freq_hz < nyquist) {
        return Err(Error::InvalidParameter(format!(
            "resonance at {} Hz outside (0, {nyquist}) Hz",
            mode.freq_hz
        )));
    }
    if !(mode.damping > 0.0 && mode.damping < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mode damping must be in (0,1), got {}",
            mode.damping
        )));
    }
    let w0 = 2.0 * std::f64::consts::PI * mode.freq_hz;
    let r = (-mode.damping * w0 * sample_time).exp();
    let wd = w0 * (1.0 - mode.damping * mode.damping).sqrt();
    Ok(vec![1.0, -2.0 * r * (wd * sample_time).cos(), r * r])
}

/// Unity-DC two-pole resonator scaled by the mode gain. With `nyquist_zero`
/// a (1 + q^-1) numerator factor is added, which keeps the discrete peak
/// magnitude close to the analog 1/(2 damping) value for modes in the upper
/// decade.
fn resonant_mode_tf(
    mode: &ResonantMode,
    sample_time: f64,
    nyquist_zero: bool,
) -> Result<DiscreteTransferFunction> {
    let den = mode_den_poly(mode, sample_time)?;
    let dc: f64 = den.iter().sum();
    let num = if nyquist_zero {
        vec![mode.gain * dc / 2.0, mode.gain * dc / 2.0]
    } else {
        vec![mode.gain * dc]
    };
    DiscreteTransferFunction::new(num, den, sample_time)
}

fn product_of_modes(
    modes: &[ResonantMode],
    sample_time: f64,
    nyquist_zero: bool,
) -> Result<DiscreteTransferFunction> {
    let mut acc = DiscreteTransferFunction::identity(sample_time);
    for m in modes {
        acc = acc.series(&resonant_mode_tf(m, sample_time, nyquist_zero)?)?;
    }
    Ok(acc)
}

/// First-order lead/lag section (1 - z_z q^-1)/(1 - z_p q^-1) with corner
/// frequencies mapped by z = e^(-2 pi f T).
fn first_order_section(
    zero_hz: f64,
    pole_hz: f64,
    sample_time: f64,
) -> Result<DiscreteTransferFunction> {
    let zz = (-2.0 * std::f64::consts::PI * zero_hz * sample_time).exp();
    let zp = (-2.0 * std::f64::consts::PI * pole_hz * sample_time).exp();
    DiscreteTransferFunction::new(vec![1.0, -zz], vec![1.0, -zp], sample_time)
}

/// Coarse-stage surrogate: damped double integrator times resonant modes,
/// strictly proper through the zero-order-hold numerator delay.
pub fn build_vcm_plant(params: &VcmParams, sample_rate_hz: f64) -> Result<DiscreteTransferFunction> {
    check_rate(sample_rate_hz)?;
    let t = 1.0 / sample_rate_hz;
    if !(params.rigid_pole_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "rigid-body pole frequency must be positive".into(),
        ));
    }
    let rho = (-2.0 * std::f64::consts::PI * params.rigid_pole_hz * t).exp();
    // Zero-order-hold double integrator T^2/2 q^-1 (1 + q^-1)/(1 - q^-1)^2
    // with the marginal poles pulled to rho.
    let k = params.gain * t * t / 2.0;
    let rigid = DiscreteTransferFunction::new(
        vec![0.0, k, k],
        vec![1.0, -2.0 * rho, rho * rho],
        t,
    )?;
    rigid.series(&product_of_modes(&params.modes, t, false)?)
}

/// Fine-stage surrogate: flat DC gain, one sample delay, high-frequency
/// resonances.
pub fn build_ma_plant(params: &MaParams, sample_rate_hz: f64) -> Result<DiscreteTransferFunction> {
    check_rate(sample_rate_hz)?;
    let t = 1.0 / sample_rate_hz;
    let base = DiscreteTransferFunction::new(vec![0.0, params.dc_gain], vec![1.0], t)?;
    base.series(&product_of_modes(&params.modes, t, true)?)
}

/// Cross-coupling surrogate from the seeking coil input to an output
/// disturbance: lightly damped mid-band modes behind one sample delay.
/// A zero gain yields the zero system.
pub fn build_cross_coupling(
    params: &CouplingParams,
    sample_rate_hz: f64,
) -> Result<DiscreteTransferFunction> {
    check_rate(sample_rate_hz)?;
    let t = 1.0 / sample_rate_hz;
    let base = DiscreteTransferFunction::new(vec![0.0, params.gain], vec![1.0], t)?;
    base.series(&product_of_modes(&params.modes, t, false)?)
}

fn check_rate(sample_rate_hz: f64) -> Result<()> {
    if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    Ok(())
}

/// Voice-coil feedback controller: integral boost, lead, one notch per plant
/// mode, gain-normalized so |K_v G_v| = 1 at the requested crossover.
pub fn build_vcm_controller(
    params: &ControllerParams,
    g_v_nominal: &DiscreteTransferFunction,
    vcm_modes: &[ResonantMode],
) -> Result<DiscreteTransferFunction> {
    let t = g_v_nominal.sample_time();
    let boost = first_order_section(params.vcm_boost_zero_hz, params.vcm_boost_pole_hz, t)?;
    let lead = first_order_section(params.vcm_lead_zero_hz, params.vcm_lead_pole_hz, t)?;
    let mut raw = boost.series(&lead)?;
    for m in vcm_modes {
        raw = raw.series(&notch(m, params.vcm_notch_damping, t)?)?;
    }
    normalize_crossover(raw, g_v_nominal, params.vcm_crossover_hz)
}

/// Micro-actuator feedback controller: lead, one notch per plant mode, and a
/// second-order rolloff, gain-normalized at the requested crossover.
pub fn build_ma_controller(
    params: &ControllerParams,
    g_m_nominal: &DiscreteTransferFunction,
    ma_modes: &[ResonantMode],
) -> Result<DiscreteTransferFunction> {
    let t = g_m_nominal.sample_time();
    let mut raw = first_order_section(params.ma_lead_zero_hz, params.ma_lead_pole_hz, t)?;
    for m in ma_modes {
        raw = raw.series(&notch(m, params.ma_notch_damping, t)?)?;
    }
    let rolloff = resonant_mode_tf(
        &ResonantMode {
            freq_hz: params.ma_lowpass_hz,
            damping: params.ma_lowpass_damping,
            gain: 1.0,
        },
        t,
        false,
    )?;
    raw = raw.series(&rolloff)?;
    normalize_crossover(raw, g_m_nominal, params.ma_crossover_hz)
}

/// Notch with zeros on the plant mode poles and wider-damped poles at the
/// same frequency, unity DC gain.
fn notch(mode: &ResonantMode, pole_damping: f64, sample_time: f64) -> Result<DiscreteTransferFunction> {
    let zero_poly = mode_den_poly(mode, sample_time)?;
    let pole_poly = mode_den_poly(
        &ResonantMode {
            freq_hz: mode.freq_hz,
            damping: pole_damping,
            gain: 1.0,
        },
        sample_time,
    )?;
    let k = pole_poly.iter().sum::<f64>() / zero_poly.iter().sum::<f64>();
    DiscreteTransferFunction::new(
        zero_poly.iter().map(|c| c * k).collect(),
        pole_poly,
        sample_time,
    )
}

fn normalize_crossover(
    raw: DiscreteTransferFunction,
    plant: &DiscreteTransferFunction,
    crossover_hz: f64,
) -> Result<DiscreteTransferFunction> {
    let mag = (raw.response_at(crossover_hz) * plant.response_at(crossover_hz)).norm();
    if !(mag > 0.0) || !mag.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cannot normalize controller gain at {crossover_hz} Hz"
        )));
    }
    Ok(raw.scaled(1.0 / mag))
}

/// The six-system bundle used by the loop, plus the zero-phase inverses of
/// the plant estimates and the feedback controllers.
#[derive(Debug, Clone)]
pub struct PlantSet {
    g_v: DiscreteTransferFunction,
    g_m: DiscreteTransferFunction,
    g_v_hat: DiscreteTransferFunction,
    g_m_hat: DiscreteTransferFunction,
    h: DiscreteTransferFunction,
    f_s: DiscreteTransferFunction,
    k_v: DiscreteTransferFunction,
    k_m: DiscreteTransferFunction,
    g_v_inv: ZpetcInverse,
    g_m_inv: ZpetcInverse,
    sample_rate_hz: f64,
}

impl PlantSet {
    /// Assemble a plant set from parameters.
    ///
    /// Controllers and inverses are designed from the unperturbed (estimate)
    /// parameters; mismatch specs perturb the actual plants only. Fails
    /// loudly if either single-loop sensitivity 1/(1+K_v G_v) or
    /// 1/(1+K_m G_m) is unstable, or if a mismatch destabilizes its loop.
    pub fn from_params(params: &PlantParams) -> Result<Self> {
        let fs_rate = params.sample_rate_hz;
        let g_v_hat = build_vcm_plant(&params.vcm, fs_rate)?;
        let g_m_hat = build_ma_plant(&params.ma, fs_rate)?;

        let g_v = match &params.vcm_mismatch {
            Some(spec) => {
                let perturbed = VcmParams {
                    gain: params.vcm.gain * spec.gain_error,
                    rigid_pole_hz: params.vcm.rigid_pole_hz,
                    modes: spec.apply_to_modes(&params.vcm.modes),
                };
                build_vcm_plant(&perturbed, fs_rate)?
            }
            None => g_v_hat.clone(),
        };
        let g_m = match &params.ma_mismatch {
            Some(spec) => {
                let perturbed = MaParams {
                    dc_gain: params.ma.dc_gain * spec.gain_error,
                    modes: spec.apply_to_modes(&params.ma.modes),
                };
                build_ma_plant(&perturbed, fs_rate)?
            }
            None => g_m_hat.clone(),
        };

        let k_v = build_vcm_controller(&params.controllers, &g_v_hat, &params.vcm.modes)?;
        let k_m = build_ma_controller(&params.controllers, &g_m_hat, &params.ma.modes)?;
        let h = build_cross_coupling(&params.coupling, fs_rate)?;

        Self::assemble(g_v, g_m, g_v_hat, g_m_hat, h, k_v, k_m, params.fs)
    }

    /// Assemble from explicit systems; used by tests and by in-model-class
    /// coupling replacement.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        g_v: DiscreteTransferFunction,
        g_m: DiscreteTransferFunction,
        g_v_hat: DiscreteTransferFunction,
        g_m_hat: DiscreteTransferFunction,
        h: DiscreteTransferFunction,
        k_v: DiscreteTransferFunction,
        k_m: DiscreteTransferFunction,
        fs: FsSpec,
    ) -> Result<Self> {
        let sample_rate_hz = g_v.sample_rate();
        for (name, sys) in [
            ("g_m", &g_m),
            ("g_v_hat", &g_v_hat),
            ("g_m_hat", &g_m_hat),
            ("h", &h),
            ("k_v", &k_v),
            ("k_m", &k_m),
        ] {
            if (sys.sample_time() - g_v.sample_time()).abs() > 1e-12 * g_v.sample_time() {
                return Err(Error::SampleTimeMismatch {
                    left: g_v.sample_time(),
                    right: sys.sample_time(),
                });
            }
            let _ = name;
        }
        for (name, sys) in [("g_v", &g_v), ("g_m", &g_m), ("h", &h)] {
            if !sys.is_strictly_proper() {
                return Err(Error::InvalidSystem(format!(
                    "{name} must be strictly proper for a well-posed loop"
                )));
            }
        }

        let s_v = DiscreteTransferFunction::identity(g_v.sample_time())
            .feedback(&k_v.series(&g_v)?)?;
        if !s_v.is_stable() {
            return Err(Error::UnstableSystem(
                "voice-coil loop sensitivity 1/(1+K_v G_v) is unstable".into(),
            ));
        }
        let s_m = DiscreteTransferFunction::identity(g_m.sample_time())
            .feedback(&k_m.series(&g_m)?)?;
        if !s_m.is_stable() {
            return Err(Error::UnstableSystem(
                "micro-actuator loop sensitivity 1/(1+K_m G_m) is unstable".into(),
            ));
        }

        let g_v_inv = ZpetcInverse::new(&g_v_hat)?;
        let g_m_inv = ZpetcInverse::new(&g_m_hat)?;

        let f_s = match fs {
            FsSpec::Identity => DiscreteTransferFunction::identity(g_v.sample_time()),
            FsSpec::SensitivityTimesCoupling => {
                let s_hat = estimated_sensitivity(&g_v_hat, &g_m_hat, &k_v, &k_m)?;
                s_hat.series(&h)?
            }
        };

        Ok(Self {
            g_v,
            g_m,
            g_v_hat,
            g_m_hat,
            h,
            f_s,
            k_v,
            k_m,
            g_v_inv,
            g_m_inv,
            sample_rate_hz,
        })
    }

    /// Replace the actual coupling path (and rebuild `f_s` from the retained
    /// coupling model `h_known`). Used to plant a disturbance path that the
    /// adaptive controller class can cancel exactly.
    pub fn with_coupling(
        &self,
        h_actual: DiscreteTransferFunction,
        h_known: &DiscreteTransferFunction,
        fs: FsSpec,
    ) -> Result<Self> {
        let mut out = self.clone();
        if !h_actual.is_strictly_proper() {
            return Err(Error::InvalidSystem(
                "coupling path must be strictly proper".into(),
            ));
        }
        out.f_s = match fs {
            FsSpec::Identity => DiscreteTransferFunction::identity(h_actual.sample_time()),
            FsSpec::SensitivityTimesCoupling => {
                let s_hat =
                    estimated_sensitivity(&self.g_v_hat, &self.g_m_hat, &self.k_v, &self.k_m)?;
                s_hat.series(h_known)?
            }
        };
        out.h = h_actual;
        Ok(out)
    }

    pub fn g_v(&self) -> &DiscreteTransferFunction {
        &self.g_v
    }
    pub fn g_m(&self) -> &DiscreteTransferFunction {
        &self.g_m
    }
    pub fn g_v_hat(&self) -> &DiscreteTransferFunction {
        &self.g_v_hat
    }
    pub fn g_m_hat(&self) -> &DiscreteTransferFunction {
        &self.g_m_hat
    }
    pub fn h(&self) -> &DiscreteTransferFunction {
        &self.h
    }
    pub fn f_s(&self) -> &DiscreteTransferFunction {
        &self.f_s
    }
    pub fn k_v(&self) -> &DiscreteTransferFunction {
        &self.k_v
    }
    pub fn k_m(&self) -> &DiscreteTransferFunction {
        &self.k_m
    }
    pub fn g_v_inv(&self) -> &ZpetcInverse {
        &self.g_v_inv
    }
    pub fn g_m_inv(&self) -> &ZpetcInverse {
        &self.g_m_inv
    }
    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }
    pub fn sample_time(&self) -> f64 {
        self.g_v.sample_time()
    }
}

/// Sensitivity of the decoupled loop computed from plant estimates:
/// 1/(1 + K_v G_v (1 + G_m_hat K_m) + K_m G_m), with every G a hat.
pub(crate) fn estimated_sensitivity(
    g_v_hat: &DiscreteTransferFunction,
    g_m_hat: &DiscreteTransferFunction,
    k_v: &DiscreteTransferFunction,
    k_m: &DiscreteTransferFunction,
) -> Result<DiscreteTransferFunction> {
    let one = DiscreteTransferFunction::identity(g_v_hat.sample_time());
    let loop_gain = g_v_hat
        .series(k_v)?
        .series(&one.parallel(&g_m_hat.series(k_m)?)?)?
        .parallel(&g_m_hat.series(k_m)?)?;
    one.feedback(&loop_gain)
}

/// Write a plant's coefficients as CSV with columns
/// `power_of_delay, numerator, denominator` (shorter polynomial zero-padded).
pub fn write_coefficient_csv<W: Write>(
    sys: &DiscreteTransferFunction,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "power_of_delay,numerator,denominator")?;
    let n = sys.numerator().len().max(sys.denominator().len());
    for i in 0..n {
        let b = sys.numerator().get(i).copied().unwrap_or(0.0);
        let a = sys.denominator().get(i).copied().unwrap_or(0.0);
        writeln!(
            w,
            "{i},{},{}",
            crate::lti::fmt_sig(b),
            crate::lti::fmt_sig(a)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{log_grid, SampledSignal};
    use num_complex::Complex64;

    const FS: f64 = 50_000.0;

    #[test]
    fn rigid_body_slope_is_minus_forty_db_per_decade() {
        let params = VcmParams {
            gain: 4.0e7,
            rigid_pole_hz: 5.0,
            modes: vec![],
        };
        let g = build_vcm_plant(&params, FS).unwrap();
        let m100 = g.response_at(100.0).norm();
        let m1k = g.response_at(1_000.0).norm();
        let slope_db = 20.0 * (m1k / m100).log10();
        assert!(
            (slope_db + 40.0).abs() < 0.5,
            "slope {slope_db} dB/dec not near -40"
        );
        assert!(g.is_stable());
        assert!(g.is_strictly_proper());
    }

    #[test]
    fn vcm_resonance_peaks_sit_on_their_modes() {
        let g = build_vcm_plant(&VcmParams::default(), FS).unwrap();
        // Compensate the rigid-body rolloff so each local peak stands out.
        for mode_hz in [5_000.0, 8_000.0] {
            let grid = log_grid(0.8 * mode_hz, 1.2 * mode_hz, 2_000);
            let peak = grid
                .iter()
                .map(|&f| (f, g.response_at(f).norm() * f * f))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(
                (peak.0 - mode_hz).abs() < 0.02 * mode_hz,
                "peak at {} Hz, expected near {mode_hz} Hz",
                peak.0
            );
        }
    }

    #[test]
    fn vcm_gain_scales_response_pointwise() {
        let base = VcmParams::default();
        let doubled = VcmParams {
            gain: 2.0 * base.gain,
            ..base.clone()
        };
        let g1 = build_vcm_plant(&base, FS).unwrap();
        let g2 = build_vcm_plant(&doubled, FS).unwrap();
        for &f in &log_grid(10.0, 20_000.0, 50) {
            let r = g2.response_at(f) / g1.response_at(f);
            assert!((r - Complex64::new(2.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn ma_without_modes_is_scaled_delay() {
        let params = MaParams {
            dc_gain: 0.7,
            modes: vec![],
        };
        let g = build_ma_plant(&params, FS).unwrap();
        assert_eq!(g.numerator(), &[0.0, 0.7]);
        assert_eq!(g.denominator(), &[1.0]);
    }

    #[test]
    fn ma_default_flat_at_low_frequency() {
        let g = build_ma_plant(&MaParams::default(), FS).unwrap();
        let mag = g.response_at(100.0).norm();
        assert!((mag - 1.0).abs() < 0.01, "|G_m(100 Hz)| = {mag}");
    }

    #[test]
    fn ma_resonance_peak_matches_second_order_formula() {
        let g = build_ma_plant(&MaParams::default(), FS).unwrap();
        let grid = log_grid(8_000.0, 12_000.0, 4_000);
        let peak = grid
            .iter()
            .map(|&f| g.response_at(f).norm())
            .fold(0.0f64, f64::max);
        let expected = 1.0 / (2.0 * 0.05);
        assert!(
            (peak - expected).abs() < 0.15 * expected,
            "peak {peak}, expected about {expected}"
        );
    }

    #[test]
    fn zero_coupling_gain_is_zero_system() {
        let params = CouplingParams {
            gain: 0.0,
            ..CouplingParams::default()
        };
        let h = build_cross_coupling(&params, FS).unwrap();
        assert!(h.is_zero());
        let u = SampledSignal::impulse(64, FS).unwrap();
        assert!(h.simulate(&u).unwrap().samples().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn coupling_impulse_energy_is_finite() {
        let h = build_cross_coupling(&CouplingParams::default(), FS).unwrap();
        assert!(h.is_stable());
        let n = 50_000;
        let d = h.simulate(&SampledSignal::impulse(n, FS).unwrap()).unwrap();
        let energy: f64 = d.samples().iter().map(|x| x * x).sum();
        let tail: f64 = d.samples()[n / 2..].iter().map(|x| x * x).sum();
        assert!(energy.is_finite() && energy > 0.0);
        assert!(tail < 1e-6 * energy, "ringing does not decay");
    }

    #[test]
    fn default_plant_set_assembles() {
        let set = PlantSet::from_params(&PlantParams::default()).unwrap();
        assert!(set.g_v().is_stable());
        assert!(set.g_m().is_stable());
        assert!(set.h().is_stable());
        assert!(set.f_s().is_stable());
        assert!(set.f_s().is_strictly_proper());
        assert!(set.g_v_inv().causal_filter().is_stable());
        assert!(set.g_m_inv().causal_filter().is_stable());
    }

    #[test]
    fn fs_identity_option() {
        let params = PlantParams {
            fs: FsSpec::Identity,
            ..PlantParams::default()
        };
        let set = PlantSet::from_params(&params).unwrap();
        assert_eq!(set.f_s().numerator(), &[1.0]);
        assert_eq!(set.f_s().denominator(), &[1.0]);
    }

    #[test]
    fn zpetc_holds_for_every_default_plant() {
        let set = PlantSet::from_params(&PlantParams::default()).unwrap();
        let grid = log_grid(1.0, 0.999 * 0.5 * FS, 1024);
        for (name, sys) in [
            ("g_v", set.g_v()),
            ("g_m", set.g_m()),
            ("g_v_hat", set.g_v_hat()),
            ("g_m_hat", set.g_m_hat()),
            ("h", set.h()),
        ] {
            let inv = ZpetcInverse::new(sys).unwrap();
            for &f in &grid {
                let v = inv.compensated_response_at(sys, f);
                assert!(
                    v.im.abs() <= 1e-9 * v.norm().max(1.0),
                    "{name}: phase {} at {f} Hz",
                    v.im
                );
            }
            let dc = inv.compensated_dc_gain(sys);
            assert!((dc - 1.0).abs() < 1e-12, "{name}: DC gain {dc}");
        }
        // The composed known-path filter has clustered numerator roots near
        // z = 1 that no double-precision factorization can split; its
        // inversion must be a certified rejection, not a bad inverse.
        assert!(matches!(
            ZpetcInverse::new(set.f_s()),
            Err(Error::ZeroPhaseInversion(_))
        ));
    }

    #[test]
    fn null_mismatch_reproduces_nominal() {
        let mut params = PlantParams::default();
        params.ma_mismatch = Some(MismatchSpec::default());
        let set = PlantSet::from_params(&params).unwrap();
        assert_eq!(set.g_m().numerator(), set.g_m_hat().numerator());
        assert_eq!(set.g_m().denominator(), set.g_m_hat().denominator());
    }

    #[test]
    fn gain_mismatch_scales_pointwise() {
        let mut params = PlantParams::default();
        params.ma_mismatch = Some(MismatchSpec {
            gain_error: 1.1,
            ..MismatchSpec::default()
        });
        let set = PlantSet::from_params(&params).unwrap();
        for &f in &log_grid(10.0, 20_000.0, 30) {
            let r = set.g_m().response_at(f) / set.g_m_hat().response_at(f);
            assert!((r - Complex64::new(1.1, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn resonance_shift_is_small_in_band_large_at_resonance() {
        let mut params = PlantParams::default();
        params.ma_mismatch = Some(MismatchSpec {
            gain_error: 1.0,
            resonance_freq_shift: 0.05,
            damping_shift: 0.0,
        });
        let set = PlantSet::from_params(&params).unwrap();
        let low_err = log_grid(10.0, 1_000.0, 200)
            .iter()
            .map(|&f| {
                (set.g_m_inv().compensated_response_at(set.g_m(), f) - Complex64::new(1.0, 0.0))
                    .norm()
            })
            .fold(0.0f64, f64::max);
        assert!(low_err < 0.05, "low-frequency mismatch {low_err}");
        let at_res = (set
            .g_m_inv()
            .compensated_response_at(set.g_m(), 10_000.0)
            - Complex64::new(1.0, 0.0))
        .norm();
        assert!(at_res > low_err, "mismatch should grow near the resonance");
    }

    #[test]
    fn destabilizing_mismatch_is_rejected() {
        let mut params = PlantParams::default();
        params.ma_mismatch = Some(MismatchSpec {
            gain_error: 200.0,
            resonance_freq_shift: -0.4,
            damping_shift: -0.9,
        });
        match PlantSet::from_params(&params) {
            Err(Error::UnstableSystem(_)) | Err(Error::InvalidParameter(_)) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn mode_above_nyquist_rejected() {
        let params = MaParams {
            dc_gain: 1.0,
            modes: vec![ResonantMode {
                freq_hz: 30_000.0,
                damping: 0.05,
                gain: 1.0,
            }],
        };
        assert!(build_ma_plant(&params, FS).is_err());
    }

    #[test]
    fn coefficient_csv_round_trips() {
        let set = PlantSet::from_params(&PlantParams::default()).unwrap();
        let mut buf = Vec::new();
        write_coefficient_csv(set.g_m(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "power_of_delay,numerator,denominator");
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[0].parse::<usize>().unwrap(), i);
            let b: f64 = cols[1].parse().unwrap();
            let expect = set.g_m().numerator().get(i).copied().unwrap_or(0.0);
            assert!((b - expect).abs() <= 1e-11 * expect.abs().max(1.0));
        }
    }
}

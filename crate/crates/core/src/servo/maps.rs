//! Closed-loop transfer functions of the decoupled dual-stage loop.
//!
//! With loop gain L = G_v K_v (1 + G_m_hat K_m) + G_m K_m the loop satisfies
//!
//!   S          = 1 / (1 + L)                        (runout -> error)
//!   R_rv_to_e  = S (C_m - C_v)                      (VCM reference -> error)
//!   R_r_to_e   = -(1 + S (C_m - 1))                 (total reference -> error)
//!   P_dual     = R_r_to_e + R_rv_to_e G_m_hat K_m   (secondary path)
//!
//! where C_v = G_v Gv_hat^-1 and C_m = G_m Gm_hat^-1 are the plant-inverse
//! cascades. The R_r_to_e form above is algebraically identical to
//! -S (C_m + G_v K_v + G_m K_m + G_v K_v G_m_hat K_m) but keeps polynomial
//! degrees low enough for time-domain filtering. The per-sample simulator in
//! [`super::sim`] realizes exactly these maps; the equivalence is pinned by
//! the oracle tests.
//!
//! Cascade alignment: `Causal` uses the zero-phase inverses' causal filters
//! directly (preview 0), matching the simulator in adaptive operation.
//! `Compensated` advances the cascades by their preview, yielding the ideal
//! zero-phase maps; as rational systems those exist only for minimum-phase
//! plants, so general plants use [`ZeroPhaseMapEvaluator`] in the frequency
//! domain instead.

use crate::error::Result;
use crate::lti::DiscreteTransferFunction;
use crate::plant::PlantSet;
use num_complex::Complex64;

/// How plant-inverse cascades enter the closed-loop maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpetcAlignment {
    /// Causal inverse filters, preview 0 (what the adaptive loop runs).
    Causal,
    /// Preview-advanced cascades (zero phase); rational form requires
    /// minimum-phase plants.
    Compensated,
}

/// Every named closed-loop map of the dual-stage and single-stage loops.
#[derive(Debug, Clone)]
pub struct ClosedLoopMaps {
    pub s: DiscreteTransferFunction,
    pub s_v: DiscreteTransferFunction,
    pub s_m: DiscreteTransferFunction,
    pub g_m_bar: DiscreteTransferFunction,
    pub r_rv_to_e: DiscreteTransferFunction,
    pub r_r_to_e: DiscreteTransferFunction,
    pub r_rv_to_y: DiscreteTransferFunction,
    pub r_r_to_y: DiscreteTransferFunction,
    pub p_dual: DiscreteTransferFunction,
    pub r_uv2_to_y: DiscreteTransferFunction,
    pub rbar_rv_to_y: DiscreteTransferFunction,
    pub rbar_uv2_to_y: DiscreteTransferFunction,
}

/// Overall sensitivity 1/(1 + G_v K_v + G_m K_m + G_v K_v G_m_hat K_m).
pub fn sensitivity(plants: &PlantSet) -> Result<DiscreteTransferFunction> {
    let one = DiscreteTransferFunction::identity(plants.sample_time());
    let gmhat_km = plants.g_m_hat().series(plants.k_m())?;
    let loop_gain = plants
        .g_v()
        .series(plants.k_v())?
        .series(&one.parallel(&gmhat_km)?)?
        .parallel(&plants.g_m().series(plants.k_m())?)?;
    one.feedback(&loop_gain)
}

/// Voice-coil loop sensitivity 1/(1 + K_v G_v).
pub fn vcm_sensitivity(plants: &PlantSet) -> Result<DiscreteTransferFunction> {
    let one = DiscreteTransferFunction::identity(plants.sample_time());
    one.feedback(&plants.g_v().series(plants.k_v())?)
}

/// Micro-actuator loop sensitivity 1/(1 + K_m G_m).
pub fn ma_sensitivity(plants: &PlantSet) -> Result<DiscreteTransferFunction> {
    let one = DiscreteTransferFunction::identity(plants.sample_time());
    one.feedback(&plants.g_m().series(plants.k_m())?)
}

/// The micro-actuator plant as the outer loop sees it behind the decoupling
/// branch: G_m + K_v G_v (G_m_hat - G_m)/(1 + K_v G_v).
pub fn modified_ma_plant(plants: &PlantSet) -> Result<DiscreteTransferFunction> {
    let l_v = plants.g_v().series(plants.k_v())?;
    let one = DiscreteTransferFunction::identity(plants.sample_time());
    let t_v = l_v.feedback(&one)?;
    let mismatch = plants.g_m_hat().sub(plants.g_m())?;
    plants.g_m().parallel(&t_v.series(&mismatch)?)
}

/// Plant-inverse cascades under the requested alignment.
fn cascades(
    plants: &PlantSet,
    alignment: ZpetcAlignment,
) -> Result<(DiscreteTransferFunction, DiscreteTransferFunction)> {
    match alignment {
        ZpetcAlignment::Causal => Ok((
            plants.g_v_inv().cascade_with(plants.g_v())?,
            plants.g_m_inv().cascade_with(plants.g_m())?,
        )),
        ZpetcAlignment::Compensated => Ok((
            plants.g_v_inv().compensated_cascade_with(plants.g_v())?,
            plants.g_m_inv().compensated_cascade_with(plants.g_m())?,
        )),
    }
}

/// All closed-loop maps with the adaptive controller `c` in place (pass the
/// zero system for the plant-only maps).
pub fn closed_loop_maps(
    plants: &PlantSet,
    alignment: ZpetcAlignment,
    c: &DiscreteTransferFunction,
) -> Result<ClosedLoopMaps> {
    let one = DiscreteTransferFunction::identity(plants.sample_time());
    let (cascade_v, cascade_m) = cascades(plants, alignment)?;
    let gmhat_km = plants.g_m_hat().series(plants.k_m())?;
    let gv_kv = plants.g_v().series(plants.k_v())?;

    let s = sensitivity(plants)?;
    let s_v = vcm_sensitivity(plants)?;
    let s_m = ma_sensitivity(plants)?;
    let g_m_bar = modified_ma_plant(plants)?;

    let r_rv_to_e = s.series(&cascade_m.sub(&cascade_v)?)?;
    let r_r_to_e = one.parallel(&s.series(&cascade_m.sub(&one)?)?)?.neg();
    let r_rv_to_y = r_rv_to_e.neg();
    let r_r_to_y = r_r_to_e.neg();
    // Algebraically r_r_to_e + r_rv_to_e GmHat Km, grouped under a single S
    // factor to limit polynomial degree growth.
    let inner = cascade_m
        .sub(&one)?
        .sub(&cascade_m.sub(&cascade_v)?.series(&gmhat_km)?)?;
    let p_dual = one.parallel(&s.series(&inner)?)?.neg();

    let c_fs = c.series(plants.f_s())?;
    let r_uv2_to_y = s
        .series(plants.h())?
        .parallel(&p_dual.neg().series(&c_fs)?)?;

    let rbar_rv_to_y = s_v.series(&cascade_v.parallel(&gv_kv)?)?;
    let rbar_uv2_to_y = s_v.series(plants.h())?.parallel(
        &rbar_rv_to_y
            .series(&one.parallel(&gmhat_km)?)?
            .series(&c_fs)?,
    )?;

    Ok(ClosedLoopMaps {
        s,
        s_v,
        s_m,
        g_m_bar,
        r_rv_to_e,
        r_r_to_e,
        r_rv_to_y,
        r_r_to_y,
        p_dual,
        r_uv2_to_y,
        rbar_rv_to_y,
        rbar_uv2_to_y,
    })
}

/// Reference-to-error maps of the dual-stage loop without an adaptive
/// controller.
pub fn reference_maps(plants: &PlantSet, alignment: ZpetcAlignment) -> Result<ClosedLoopMaps> {
    let zero = DiscreteTransferFunction::constant(0.0, plants.sample_time())?;
    closed_loop_maps(plants, alignment, &zero)
}

/// Maps of the pretraining (single-stage) configuration with controller `c`
/// injected through the reference path.
pub fn single_stage_maps(
    plants: &PlantSet,
    alignment: ZpetcAlignment,
    c: &DiscreteTransferFunction,
) -> Result<ClosedLoopMaps> {
    closed_loop_maps(plants, alignment, c)
}

/// Frequency-domain evaluation of the key maps with zero-phase (compensated)
/// cascades, usable for any plant set. The convergence gate and the
/// reference-limit checks live on this path because the compensated cascades
/// of non-minimum-phase plants have no rational realization.
pub struct ZeroPhaseMapEvaluator<'a> {
    plants: &'a PlantSet,
    s: DiscreteTransferFunction,
    s_v: DiscreteTransferFunction,
    gmhat_km: DiscreteTransferFunction,
    gv_kv: DiscreteTransferFunction,
}

impl<'a> ZeroPhaseMapEvaluator<'a> {
    pub fn new(plants: &'a PlantSet) -> Result<Self> {
        Ok(Self {
            plants,
            s: sensitivity(plants)?,
            s_v: vcm_sensitivity(plants)?,
            gmhat_km: plants.g_m_hat().series(plants.k_m())?,
            gv_kv: plants.g_v().series(plants.k_v())?,
        })
    }

    pub fn sensitivity_at(&self, freq_hz: f64) -> Complex64 {
        self.s.response_at(freq_hz)
    }

    fn cascade_v(&self, freq_hz: f64) -> Complex64 {
        self.plants
            .g_v_inv()
            .compensated_response_at(self.plants.g_v(), freq_hz)
    }

    fn cascade_m(&self, freq_hz: f64) -> Complex64 {
        self.plants
            .g_m_inv()
            .compensated_response_at(self.plants.g_m(), freq_hz)
    }

    pub fn r_rv_to_e_at(&self, freq_hz: f64) -> Complex64 {
        self.s.response_at(freq_hz) * (self.cascade_m(freq_hz) - self.cascade_v(freq_hz))
    }

    pub fn r_r_to_e_at(&self, freq_hz: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        -(one + self.s.response_at(freq_hz) * (self.cascade_m(freq_hz) - one))
    }

    /// Secondary path from the adaptive controller output to the measured
    /// output: -(R_r_to_y + R_rv_to_y G_m_hat K_m).
    pub fn p_dual_at(&self, freq_hz: f64) -> Complex64 {
        self.r_r_to_e_at(freq_hz)
            + self.r_rv_to_e_at(freq_hz) * self.gmhat_km.response_at(freq_hz)
    }

    /// Single-stage secondary path from the controller injection to the
    /// output: R_bar_rv_to_y (1 + K_m G_m_hat), negated to share the error
    /// sign convention of `p_dual_at`.
    pub fn p_single_at(&self, freq_hz: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let rbar_rv_to_y = self.s_v.response_at(freq_hz)
            * (self.cascade_v(freq_hz) + self.gv_kv.response_at(freq_hz));
        -(rbar_rv_to_y * (one + self.gmhat_km.response_at(freq_hz)))
    }
}

/// Stability of the causal secondary-path realization; the zero-phase
/// advance is a pure phase factor and does not move poles.
pub fn secondary_path_stable(plants: &PlantSet) -> Result<bool> {
    let maps = reference_maps(plants, ZpetcAlignment::Causal)?;
    Ok(maps.p_dual.is_stable())
}

/// Numerically faithful filtering realizations of the error-channel maps.
///
/// The composed map polynomials carry near-unit-circle factors whose
/// convolved coefficients cannot represent the low-frequency response to
/// better than ~1e-4; filtering an input through them misses the per-sample
/// loop by far more than the rational functions differ. These realizations
/// apply the numerators as cascades of the exact component factors and keep
/// only the closed-loop characteristic polynomial as a single recursion,
/// which is not cancellation-dominated.
pub struct ChannelOracles {
    s_num_factors: Vec<DiscreteTransferFunction>,
    s_den: DiscreteTransferFunction,
    s_v_num_factors: Vec<DiscreteTransferFunction>,
    s_v_den: DiscreteTransferFunction,
    h: DiscreteTransferFunction,
    g_v: DiscreteTransferFunction,
    cm_minus_one: DiscreteTransferFunction,
    cm_minus_cv: DiscreteTransferFunction,
    invv_plus_kv: DiscreteTransferFunction,
}

impl ChannelOracles {
    pub fn new(plants: &PlantSet) -> Result<Self> {
        let t = plants.sample_time();
        let fir = |p: &[f64]| DiscreteTransferFunction::new(p.to_vec(), vec![1.0], t);
        let s = sensitivity(plants)?;
        let s_v = vcm_sensitivity(plants)?;
        let one = DiscreteTransferFunction::identity(t);
        let cascade_v = plants.g_v_inv().cascade_with(plants.g_v())?;
        let cascade_m = plants.g_m_inv().cascade_with(plants.g_m())?;
        Ok(Self {
            s_num_factors: vec![
                fir(plants.g_v().denominator())?,
                fir(plants.k_v().denominator())?,
                fir(plants.g_m_hat().denominator())?,
                fir(plants.k_m().denominator())?,
                fir(plants.g_m().denominator())?,
                fir(plants.k_m().denominator())?,
            ],
            s_den: DiscreteTransferFunction::new(vec![1.0], s.denominator().to_vec(), t)?,
            s_v_num_factors: vec![
                fir(plants.g_v().denominator())?,
                fir(plants.k_v().denominator())?,
            ],
            s_v_den: DiscreteTransferFunction::new(vec![1.0], s_v.denominator().to_vec(), t)?,
            h: plants.h().clone(),
            g_v: plants.g_v().clone(),
            cm_minus_one: cascade_m.sub(&one)?,
            cm_minus_cv: cascade_m.sub(&cascade_v)?,
            invv_plus_kv: plants
                .g_v_inv()
                .causal_filter()
                .parallel(plants.k_v())?,
        })
    }

    fn through_s(&self, input: &SampledSignal) -> Result<SampledSignal> {
        let mut sig = input.clone();
        for f in &self.s_num_factors {
            sig = f.simulate(&sig)?;
        }
        self.s_den.simulate(&sig)
    }

    fn through_s_v(&self, input: &SampledSignal) -> Result<SampledSignal> {
        let mut sig = input.clone();
        for f in &self.s_v_num_factors {
            sig = f.simulate(&sig)?;
        }
        self.s_v_den.simulate(&sig)
    }

    /// e = S r_o.
    pub fn error_from_runout(&self, r_o: &SampledSignal) -> Result<SampledSignal> {
        self.through_s(r_o)
    }

    /// e = -(S H) u_v2.
    pub fn error_from_seek(&self, u_v2: &SampledSignal) -> Result<SampledSignal> {
        let y = self.through_s(&self.h.simulate(u_v2)?)?;
        y.lin_comb(-1.0, &y, 0.0)
    }

    /// e = R_r_to_e r = -(r + S (C_m - 1) r).
    pub fn error_from_reference(&self, r: &SampledSignal) -> Result<SampledSignal> {
        let inner = self.through_s(&self.cm_minus_one.simulate(r)?)?;
        r.lin_comb(-1.0, &inner, -1.0)
    }

    /// e = R_rv_to_e r_v = S (C_m - C_v) r_v.
    pub fn error_from_vcm_reference(&self, r_v: &SampledSignal) -> Result<SampledSignal> {
        self.through_s(&self.cm_minus_cv.simulate(r_v)?)
    }

    /// Single-stage e = -Rbar_rv_to_y r_v = -S_v G_v (Gv_hat_inv + K_v) r_v.
    pub fn single_stage_error_from_vcm_reference(
        &self,
        r_v: &SampledSignal,
    ) -> Result<SampledSignal> {
        let y = self.through_s_v(&self.g_v.simulate(&self.invv_plus_kv.simulate(r_v)?)?)?;
        y.lin_comb(-1.0, &y, 0.0)
    }
}

impl ClosedLoopMaps {
    /// Map entries by export name, for frequency-response CSV dumps.
    pub fn named(&self) -> [(&'static str, &DiscreteTransferFunction); 12] {
        [
            ("s", &self.s),
            ("s_v", &self.s_v),
            ("s_m", &self.s_m),
            ("g_m_bar", &self.g_m_bar),
            ("r_rv_to_e", &self.r_rv_to_e),
            ("r_r_to_e", &self.r_r_to_e),
            ("r_rv_to_y", &self.r_rv_to_y),
            ("r_r_to_y", &self.r_r_to_y),
            ("p_dual", &self.p_dual),
            ("r_uv2_to_y", &self.r_uv2_to_y),
            ("rbar_rv_to_y", &self.rbar_rv_to_y),
            ("rbar_uv2_to_y", &self.rbar_uv2_to_y),
        ]
    }
}

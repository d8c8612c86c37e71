//! Per-sample simulation of the decoupled dual-stage loop.
//!
//! Wiring (one sample, all filters direct-form):
//!
//! ```text
//!   d   = H u_v2                         x   = F_s u_v2
//!   y_t = y_v + y_m                      y   = y_t + d
//!   e   = r_o - y                        s   = e + r
//!   s_v = s + r_v            (switch 1 on, single-stage only)
//!   v   = K_m s                          (switch 2 on)
//!   u_m = v + Gm_hat_inv (r - r_v)       (switch 2 on, else 0)
//!   u_v = K_v (s_v + Gm_hat v) + Gv_hat_inv r_v
//!   y_v = G_v u_v                        y_m = sat(G_m u_m)
//! ```
//!
//! Strict properness of G_v, G_m and H breaks every algebraic cycle: plant
//! outputs at sample k depend on inputs up to k-1 only. The decoupling
//! branch feeds K_v with Gm_hat applied to the feedback portion K_m s of the
//! micro-actuator command; switch 2 removes both the micro-actuator and this
//! branch, switch 1 adds r_v to the voice-coil error junction so the
//! single-stage loop presents the same stationary point to the adaptation.
//! Under these choices the simulation reproduces the maps in [`super::maps`]
//! exactly, which the oracle-equivalence tests pin down.

use crate::error::{Error, Result};
use crate::lti::{rates_match, FilterState, SampledSignal};
use crate::plant::PlantSet;
use std::io::Write;

/// Loop configuration: plant bundle, switch states, saturation handling and
/// reference preview.
#[derive(Debug, Clone)]
pub struct LoopConfig {
    pub plants: PlantSet,
    /// Micro-actuator stroke limit in track-pitch units.
    pub ma_stroke_limit: f64,
    /// Routes r_v into the voice-coil error junction (single-stage mode).
    pub switch1: bool,
    /// Enables the micro-actuator and the decoupling branch.
    pub switch2: bool,
    pub saturation_enabled: bool,
    /// Advance reference inputs of the inverse filters by their preview;
    /// valid when the reference signals are known ahead of time. Adaptive
    /// runs leave this off and let the adaptation absorb the phase lag.
    pub reference_preview: bool,
}

impl LoopConfig {
    /// Track-following dual-stage configuration (switch 1 off, switch 2 on).
    pub fn dual_stage(plants: PlantSet) -> Self {
        Self {
            plants,
            ma_stroke_limit: 1.0,
            switch1: false,
            switch2: true,
            saturation_enabled: true,
            reference_preview: false,
        }
    }

    /// Pretraining single-stage configuration (switch 1 on, switch 2 off).
    pub fn single_stage(plants: PlantSet) -> Self {
        Self {
            plants,
            ma_stroke_limit: 1.0,
            switch1: true,
            switch2: false,
            saturation_enabled: false,
            reference_preview: false,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, sys) in [
            ("g_v", self.plants.g_v()),
            ("g_m", self.plants.g_m()),
            ("h", self.plants.h()),
        ] {
            if !sys.is_strictly_proper() {
                return Err(Error::IllPosedLoop(format!(
                    "{name} has direct feedthrough; the loop has an algebraic cycle"
                )));
            }
        }
        if !(self.ma_stroke_limit > 0.0) {
            return Err(Error::InvalidParameter(
                "stroke limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-sample record of every named loop signal.
#[derive(Debug, Clone)]
pub struct LoopTrace {
    pub e: SampledSignal,
    pub e_v: SampledSignal,
    pub e_t: SampledSignal,
    pub u_v: SampledSignal,
    pub u_m: SampledSignal,
    pub y_v: SampledSignal,
    pub y_m: SampledSignal,
    pub y_t: SampledSignal,
    pub y: SampledSignal,
    pub r: SampledSignal,
    pub r_v: SampledSignal,
    pub x: SampledSignal,
    pub d: SampledSignal,
    pub r_o: SampledSignal,
    pub saturation_count: usize,
}

impl LoopTrace {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.e.sample_rate()
    }

    pub fn named(&self) -> [(&'static str, &SampledSignal); 14] {
        [
            ("e", &self.e),
            ("e_v", &self.e_v),
            ("e_t", &self.e_t),
            ("u_v", &self.u_v),
            ("u_m", &self.u_m),
            ("y_v", &self.y_v),
            ("y_m", &self.y_m),
            ("y_t", &self.y_t),
            ("y", &self.y),
            ("r", &self.r),
            ("r_v", &self.r_v),
            ("x", &self.x),
            ("d", &self.d),
            ("r_o", &self.r_o),
        ]
    }

    /// One column per signal, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<&str> = self.named().iter().map(|(n, _)| *n).collect();
        writeln!(w, "sample,{}", names.join(","))?;
        for k in 0..self.len() {
            let row: Vec<String> = self
                .named()
                .iter()
                .map(|(_, s)| crate::lti::fmt_sig(s.get(k)))
                .collect();
            writeln!(w, "{k},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Simulate the loop over the given exogenous signals (all the same length
/// and rate): runout `r_o`, seeking-coil input `u_v2`, total reference `r`,
/// voice-coil reference `r_v`.
pub fn simulate_loop(
    config: &LoopConfig,
    r_o: &SampledSignal,
    u_v2: &SampledSignal,
    r: &SampledSignal,
    r_v: &SampledSignal,
) -> Result<LoopTrace> {
    config.validate()?;
    let plants = &config.plants;
    let n = r_o.len();
    for (name, sig) in [("u_v2", u_v2), ("r", r), ("r_v", r_v)] {
        if sig.len() != n {
            return Err(Error::InvalidSignal(format!(
                "{name} length {} does not match r_o length {n}",
                sig.len()
            )));
        }
        if !rates_match(sig.sample_rate(), r_o.sample_rate()) {
            return Err(Error::SampleRateMismatch {
                expected_hz: r_o.sample_rate(),
                actual_hz: sig.sample_rate(),
            });
        }
    }
    if !rates_match(r_o.sample_rate(), plants.sample_rate_hz()) {
        return Err(Error::SampleRateMismatch {
            expected_hz: plants.sample_rate_hz(),
            actual_hz: r_o.sample_rate(),
        });
    }

    let mut f_h = FilterState::new(plants.h());
    let mut f_fs = FilterState::new(plants.f_s());
    let mut f_gv = FilterState::new(plants.g_v());
    let mut f_gm = FilterState::new(plants.g_m());
    let mut f_kv = FilterState::new(plants.k_v());
    let mut f_km = FilterState::new(plants.k_m());
    let mut f_gmhat = FilterState::new(plants.g_m_hat());
    let mut f_gvinv = FilterState::new(plants.g_v_inv().causal_filter());
    let mut f_gminv = FilterState::new(plants.g_m_inv().causal_filter());

    // Reference inputs of the inverse filters, optionally advanced by the
    // preview each inverse needs for zero-phase tracking.
    let r_minus_rv = r.lin_comb(1.0, r_v, -1.0)?;
    let (rv_in, m_in) = if config.reference_preview {
        (
            r_v.advanced(plants.g_v_inv().preview_samples()),
            r_minus_rv.advanced(plants.g_m_inv().preview_samples()),
        )
    } else {
        (r_v.clone(), r_minus_rv)
    };

    let mut out = TraceBuilder::new(n);
    let mut saturation_count = 0usize;

    for k in 0..n {
        let d = f_h.step(u_v2.get(k));
        let x = f_fs.step(u_v2.get(k));

        let y_v = f_gv.peek();
        let y_m_raw = f_gm.peek();
        let y_m = if config.switch2 {
            if config.saturation_enabled && y_m_raw.abs() > config.ma_stroke_limit {
                saturation_count += 1;
                config.ma_stroke_limit * y_m_raw.signum()
            } else {
                y_m_raw
            }
        } else {
            0.0
        };

        let y_t = y_v + y_m;
        let y = y_t + d;
        let e = r_o.get(k) - y;
        if !e.is_finite() {
            return Err(Error::NonFiniteSample {
                signal: "e",
                index: k,
            });
        }

        let s = e + r.get(k);
        let s_v = if config.switch1 { s + r_v.get(k) } else { s };

        let (u_m, w) = if config.switch2 {
            let v = f_km.step(s);
            let w = f_gmhat.step(v);
            (v + f_gminv.step(m_in.get(k)), w)
        } else {
            (0.0, 0.0)
        };
        let u_v = f_kv.step(s_v + w) + f_gvinv.step(rv_in.get(k));

        f_gv.step(u_v);
        f_gm.step(u_m);

        debug_assert_eq!(y_t, y_v + y_m);
        debug_assert_eq!(y, y_t + d);
        debug_assert_eq!(e, r_o.get(k) - y);

        out.push(Row {
            e,
            e_v: r_v.get(k) - e,
            e_t: r.get(k) - e,
            u_v,
            u_m,
            y_v,
            y_m,
            y_t,
            y,
            r: r.get(k),
            r_v: r_v.get(k),
            x,
            d,
            r_o: r_o.get(k),
        });
    }

    Ok(out.finish(r_o.sample_rate(), saturation_count))
}

struct Row {
    e: f64,
    e_v: f64,
    e_t: f64,
    u_v: f64,
    u_m: f64,
    y_v: f64,
    y_m: f64,
    y_t: f64,
    y: f64,
    r: f64,
    r_v: f64,
    x: f64,
    d: f64,
    r_o: f64,
}

struct TraceBuilder {
    cols: [Vec<f64>; 14],
}

impl TraceBuilder {
    fn new(n: usize) -> Self {
        Self {
            cols: std::array::from_fn(|_| Vec::with_capacity(n)),
        }
    }

    fn push(&mut self, row: Row) {
        let vals = [
            row.e, row.e_v, row.e_t, row.u_v, row.u_m, row.y_v, row.y_m, row.y_t, row.y, row.r,
            row.r_v, row.x, row.d, row.r_o,
        ];
        for (col, v) in self.cols.iter_mut().zip(vals) {
            col.push(v);
        }
    }

    fn finish(self, rate: f64, saturation_count: usize) -> LoopTrace {
        let [e, e_v, e_t, u_v, u_m, y_v, y_m, y_t, y, r, r_v, x, d, r_o] = self.cols;
        let sig = |v: Vec<f64>| SampledSignal::new(v, rate).expect("loop samples are finite");
        LoopTrace {
            e: sig(e),
            e_v: sig(e_v),
            e_t: sig(e_t),
            u_v: sig(u_v),
            u_m: sig(u_m),
            y_v: sig(y_v),
            y_m: sig(y_m),
            y_t: sig(y_t),
            y: sig(y),
            r: sig(r),
            r_v: sig(r_v),
            x: sig(x),
            d: sig(d),
            r_o: sig(r_o),
            saturation_count,
        }
    }
}

/// Residuals of the converged-loop output split: the micro-actuator tracks
/// the filtered disturbance, the voice coil absorbs the rest, and the total
/// output reduces to runout minus its filtered image.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionReport {
    /// max |y_m - (-d_s + G_m K_m r_os)| after warmup.
    pub ym_residual: f64,
    /// max |y_v - (r_o - r_os - d + d_s - G_m K_m r_os)| after warmup.
    pub yv_residual: f64,
    /// max |y - (r_o - r_os)| after warmup.
    pub y_residual: f64,
}

/// Check the output decomposition of a trace produced with a converged (or
/// perfect-knowledge) reference design, skipping `warmup` samples.
pub fn dual_output_decomposition(
    trace: &LoopTrace,
    plants: &PlantSet,
    warmup: usize,
) -> Result<DecompositionReport> {
    let s = super::maps::sensitivity(plants)?;
    let d_s = s.simulate(&trace.d)?;
    let r_os = s.simulate(&trace.r_o)?;
    let gm_km = plants.g_m().series(plants.k_m())?;
    let gm_km_ros = gm_km.simulate(&r_os)?;

    let mut ym_residual = 0.0f64;
    let mut yv_residual = 0.0f64;
    let mut y_residual = 0.0f64;
    for k in warmup..trace.len() {
        let ym_ref = -d_s.get(k) + gm_km_ros.get(k);
        ym_residual = ym_residual.max((trace.y_m.get(k) - ym_ref).abs());
        let yv_ref =
            trace.r_o.get(k) - r_os.get(k) - trace.d.get(k) + d_s.get(k) - gm_km_ros.get(k);
        yv_residual = yv_residual.max((trace.y_v.get(k) - yv_ref).abs());
        let y_ref = trace.r_o.get(k) - r_os.get(k);
        y_residual = y_residual.max((trace.y.get(k) - y_ref).abs());
    }
    Ok(DecompositionReport {
        ym_residual,
        yv_residual,
        y_residual,
    })
}

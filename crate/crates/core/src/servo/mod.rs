//! The sensitivity-decoupled dual-stage feedback loop: closed-loop map
//! algebra and per-sample simulation, plus the single-stage (pretraining)
//! wiring behind the two mode switches.

mod maps;
mod sim;

pub use maps::{
    closed_loop_maps, ma_sensitivity, modified_ma_plant, reference_maps, secondary_path_stable,
    sensitivity, single_stage_maps, vcm_sensitivity, ChannelOracles, ClosedLoopMaps,
    ZeroPhaseMapEvaluator, ZpetcAlignment,
};
pub use sim::{
    dual_output_decomposition, simulate_loop, DecompositionReport, LoopConfig, LoopTrace,
};

//! Simulation library for a multi-actuator hard disk drive servo in which one
//! dual-stage actuator seeks while the other follows a track. The seeking
//! actuator couples vibration into the following head through the shared
//! pivot; this crate models the coupled loop and adapts a feedforward
//! reference-shaping FIR controller to reject that disturbance.
//!
//! The crate is organized bottom-up:
//!
//! - [`lti`]: discrete-time transfer functions, signals, simulation,
//!   frequency response, interconnection algebra, stability and SPR tests.
//! - [`plant`]: parametric surrogate plants (coarse voice-coil stage, fine
//!   micro-actuator stage, cross-coupling path), stabilizing controllers,
//!   and zero-phase plant inverses.
//! - [`servo`]: the sensitivity-decoupled dual-stage loop, its closed-loop
//!   maps, and per-sample simulation with micro-actuator saturation.
//! - [`adaptive`]: the FIR reference-shaping controller, iterative batch
//!   least-squares adaptation, the SPR convergence gate, and the staged
//!   pretraining / fine-tuning pipeline.
//! - [`scenario`]: signal generators, scenario execution, metrics, and CSV
//!   artifact export for the command-line front end.
//!
//! All values are immutable after construction and all operations are pure,
//! so independent simulations and scenario runs may execute concurrently
//! without synchronization.

pub mod adaptive;
pub mod error;
pub mod lti;
pub mod plant;
pub mod scenario;
pub mod servo;

pub use error::{Error, Result};
pub use lti::{DiscreteTransferFunction, FrequencyResponse, SampledSignal, SprReport};





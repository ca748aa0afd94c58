//! Gridshell design on generalized Dupin cyclide patches.
//!
//! The crate follows one classical membrane-shell pipeline end to end:
//!
//! 1. [`cyclide`] evaluates a generalized Dupin cyclide patch in
//!    curvature-line parameters.
//! 2. [`membrane`] carries the closed-form membrane forces T1, T2 under
//!    uniform normal pressure, including their transport through Laguerre
//!    transformations built in [`laguerre`].
//! 3. [`grid`] discretizes the loaded surface into a beam gridshell with
//!    tributary loads and per-member target axial forces.
//! 4. [`fem`] solves the linear elastic space-frame model.
//! 5. [`optimize`] sizes the pipe sections by bound-constrained Nelder-Mead
//!    so member axial forces match the membrane targets, plus a one-shot
//!    stress-ratio adjustment after a transformation.
//! 6. [`pipeline`] / [`config`] / [`report`] / [`export`] wire the stages
//!    into the configuration-driven CLI.

pub mod config;
pub mod cyclide;
pub mod error;
pub mod export;
pub mod fem;
pub mod grid;
pub mod laguerre;
pub mod membrane;
pub mod optimize;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};

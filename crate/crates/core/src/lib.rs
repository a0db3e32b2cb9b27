//! Motion-driven learning game engine.

pub mod autopilot;
pub mod content;
pub mod game;
pub mod gesture;
pub mod landmark;
pub mod pipeline;
pub mod pose;
pub mod session;
pub mod synth;
pub mod trace;

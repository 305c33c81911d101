//! Fingerprint and iris matching with score-level fusion.

pub mod imaging;
pub mod fingerprint;
pub mod fusion;
pub mod iris;
pub mod registry;
pub mod synth;

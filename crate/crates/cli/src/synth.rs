use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Subcommand;

use biofuse::imaging::encode_pgm;
use biofuse::synth::{EyeSpec, FingerSpec, Pose};

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Ridge pattern with planted minutiae; --seed picks the finger.
    Finger {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        minutiae: usize,
        #[arg(long, default_value_t = 30.0)]
        spacing: f64,
        #[arg(long, default_value_t = 320)]
        size: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        dx: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        dy: f64,
        /// Rotation in degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        noise_seed: u64,
    },
    /// Eye with known geometry; --seed picks the geometry.
    Eye {
        #[arg(long)]
        out: PathBuf,
        /// Iris texture seed; defaults to --seed.
        #[arg(long)]
        texture: Option<u64>,
        /// Rotation in degrees, counterclockwise.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rotation: f64,
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        noise_seed: u64,
    },
}

pub fn render(kind: &SynthKind, seed: u64) -> Result<()> {
    let (out, img) = match kind {
        SynthKind::Finger { out, minutiae, spacing, size, dx, dy, angle, noise, noise_seed } => {
            let spec = FingerSpec::random_sized(seed, *minutiae, *spacing, *size);
            let pose = Pose { dx: *dx, dy: *dy, dtheta: angle.to_radians() };
            (out, spec.render(&pose, *noise, *noise_seed))
        }
        SynthKind::Eye { out, texture, rotation, noise, noise_seed } => {
            let spec = EyeSpec::random(seed, texture.unwrap_or(seed));
            (out, spec.render(rotation.to_radians(), *noise, *noise_seed))
        }
    };
    fs::write(out, encode_pgm(&img)).with_context(|| format!("cannot write {}", out.display()))
}

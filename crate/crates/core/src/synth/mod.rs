//! Seeded synthetic fixtures: ridge patterns with planted minutiae and eyes
//! with known geometry and iris texture. Every generator is a pure function
//! of its seed, so fixtures are reproducible byte for byte.

mod eye;
mod finger;

pub use eye::{EyeSpec, IrisTexture, TextureSpectrum, TextureTerm};
pub use finger::{FingerSpec, PlantedMinutia, Pose};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

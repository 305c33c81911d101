use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::rng;
use crate::imaging::GrayImage;
use crate::iris::{IrisGeometry, NormalizedStrip};

const PUPIL_LEVEL: f64 = 0.05;
const SCLERA_LEVEL: f64 = 0.9;
const IRIS_LEVEL: f64 = 0.5;
/// Texture swing; the tanh squash keeps it inside `(0.32, 0.68)`, clear of
/// both the pupil threshold and the sclera.
const IRIS_SWING: f64 = 0.18;
const SQUASH: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureTerm {
    /// Cycles per revolution.
    pub angular: f64,
    /// Cycles across the band, signed so that spirals go both ways.
    pub radial: f64,
    pub phase: f64,
    pub amplitude: f64,
}

/// Spectrum controls for random iris textures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureSpectrum {
    pub terms: usize,
    pub max_angular: u32,
    pub max_radial: f64,
    /// Amplitude falls off as `angular^-exponent`.
    pub exponent: f64,
}

impl Default for TextureSpectrum {
    fn default() -> Self {
        Self { terms: 200, max_angular: 40, max_radial: 4.0, exponent: 1.2 }
    }
}

/// Periodic texture on the normalized annulus: `rho` in `[0, 1]` from pupil
/// to limbus, angle `t` counterclockwise from +x.
#[derive(Debug, Clone, PartialEq)]
pub struct IrisTexture {
    pub terms: Vec<TextureTerm>,
}

impl IrisTexture {
    pub fn random(seed: u64) -> Self {
        Self::random_with(seed, &TextureSpectrum::default())
    }

    pub fn random_with(seed: u64, spectrum: &TextureSpectrum) -> Self {
        let mut rng = rng(seed, 3);
        let mut terms: Vec<TextureTerm> = (0..spectrum.terms)
            .map(|_| {
                let angular = f64::from(rng.random_range(1..=spectrum.max_angular.max(1)));
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                TextureTerm {
                    angular,
                    radial: sign * rng.random_range(0.0..spectrum.max_radial),
                    phase: rng.random_range(0.0..2.0 * PI),
                    amplitude: angular.powf(-spectrum.exponent) * rng.random_range(0.5..1.0),
                }
            })
            .collect();
        // Unit variance before the squash.
        let power: f64 = terms.iter().map(|t| t.amplitude * t.amplitude / 2.0).sum();
        let norm = power.sqrt().max(f64::MIN_POSITIVE);
        for t in &mut terms {
            t.amplitude /= norm;
        }
        Self { terms }
    }

    pub fn value(&self, rho: f64, t: f64) -> f64 {
        let g: f64 = self
            .terms
            .iter()
            .map(|k| k.amplitude * (2.0 * PI * k.radial * rho + k.angular * t + k.phase).cos())
            .sum();
        IRIS_LEVEL + IRIS_SWING * (SQUASH * g).tanh()
    }

    /// The texture sampled exactly on a strip grid, turned counterclockwise
    /// by `rotation`.
    pub fn strip(&self, radial: usize, angular: usize, rotation: f64) -> NormalizedStrip {
        NormalizedStrip::from_fn(radial, angular, |i, j| {
            let rho = (i as f64 + 0.5) / radial as f64;
            self.value(rho, 2.0 * PI * j as f64 / angular as f64 - rotation)
        })
    }
}

/// A frontal eye: dark pupil, textured iris annulus, bright sclera.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeSpec {
    pub width: usize,
    pub height: usize,
    pub geometry: IrisGeometry,
    pub texture: IrisTexture,
}

impl EyeSpec {
    /// A 256x256 eye with random geometry and a texture drawn from
    /// `texture_seed`, so several geometries can share one iris.
    pub fn random(seed: u64, texture_seed: u64) -> Self {
        let mut rng = rng(seed, 4);
        let pupil_r = rng.random_range(22.0..38.0);
        let iris_r = pupil_r + rng.random_range(45.0..60.0);
        let (width, height) = (256, 256);
        let margin = iris_r + 10.0;
        let geometry = IrisGeometry {
            pupil_cx: rng.random_range(margin..width as f64 - margin),
            pupil_cy: rng.random_range(margin..height as f64 - margin),
            pupil_r,
            iris_r,
        };
        Self { width, height, geometry, texture: IrisTexture::random(texture_seed) }
    }

    /// Intensity at a point for an eye turned counterclockwise by `rotation`
    /// about the pupil center. Edges are ramped over one pixel.
    pub fn intensity(&self, x: f64, y: f64, rotation: f64) -> f64 {
        let g = &self.geometry;
        let (dx, dy) = (x - g.pupil_cx, g.pupil_cy - y);
        let r = dx.hypot(dy);
        let into_iris = (r - g.pupil_r + 0.5).clamp(0.0, 1.0);
        let into_sclera = (r - g.iris_r + 0.5).clamp(0.0, 1.0);
        let rho = ((r - g.pupil_r) / (g.iris_r - g.pupil_r)).clamp(0.0, 1.0);
        let iris = self.texture.value(rho, dy.atan2(dx) - rotation);
        let outer = (1.0 - into_sclera) * iris + into_sclera * SCLERA_LEVEL;
        (1.0 - into_iris) * PUPIL_LEVEL + into_iris * outer
    }

    pub fn render(&self, rotation: f64, noise: f64, noise_seed: u64) -> GrayImage {
        let mut rng = rng(noise_seed, 5);
        let normal = Normal::new(0.0, noise.max(0.0)).expect("finite noise level");
        GrayImage::from_fn(self.width, self.height, |x, y| {
            let v = self.intensity(x as f64, y as f64, rotation);
            if noise > 0.0 {
                v + normal.sample(&mut rng)
            } else {
                v
            }
        })
        .expect("synthetic eye has valid size")
    }
}

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::rng;
use crate::fingerprint::MinutiaKind;
use crate::imaging::GrayImage;

const BACKGROUND: f64 = 0.55;
const CONTRAST: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedMinutia {
    pub x: f64,
    pub y: f64,
    pub kind: MinutiaKind,
    /// Winding of the phase singularity, ±1.
    pub charge: f64,
}

/// Rigid motion applied when rendering: rotation about the image center,
/// then translation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl Pose {
    pub fn apply(&self, x: f64, y: f64, center: (f64, f64)) -> (f64, f64) {
        let (s, c) = self.dtheta.sin_cos();
        let (rx, ry) = (x - center.0, y - center.1);
        (center.0 + c * rx - s * ry + self.dx, center.1 + s * rx + c * ry + self.dy)
    }

    pub fn invert(&self, x: f64, y: f64, center: (f64, f64)) -> (f64, f64) {
        let (s, c) = self.dtheta.sin_cos();
        let (rx, ry) = (x - self.dx - center.0, y - self.dy - center.1);
        (center.0 + c * rx + s * ry, center.1 - s * rx + c * ry)
    }
}

/// Parallel ridges of one period and direction, bent by phase singularities
/// at the planted minutiae, inside an elliptical finger area.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerSpec {
    pub width: usize,
    pub height: usize,
    pub period: f64,
    /// Ridge direction in `[0, π)`.
    pub ridge_angle: f64,
    pub phase: f64,
    /// Center of the concentric ridge arcs; ridges run along `ridge_angle`
    /// where they cross the image center.
    pub core: (f64, f64),
    pub minutiae: Vec<PlantedMinutia>,
    /// Semi-axes of the finger area, centered in the image.
    pub radii: (f64, f64),
}

impl FingerSpec {
    /// A 256x256 print with `count` minutiae at least `spacing` apart and
    /// well inside the finger area.
    pub fn random(seed: u64, count: usize, spacing: f64) -> Self {
        Self::random_sized(seed, count, spacing, 256)
    }

    /// As [`FingerSpec::random`] on a `side x side` image. The finger area
    /// leaves about 24 px of background on each side, so copies moved by up
    /// to 20 px stay in frame.
    pub fn random_sized(seed: u64, count: usize, spacing: f64, side: usize) -> Self {
        let mut rng = rng(seed, 1);
        let (width, height) = (side, side);
        let half = side as f64 / 2.0;
        let radii = (rng.random_range(half - 36.0..half - 28.0), rng.random_range(half - 32.0..half - 24.0));
        let period = rng.random_range(8.5..10.0);
        let mut spec = FingerSpec {
            width,
            height,
            period,
            ridge_angle: rng.random_range(0.0..PI),
            phase: rng.random_range(0.0..2.0 * PI),
            core: (0.0, 0.0),
            minutiae: Vec::new(),
            radii,
        };
        let center = spec.center();
        let margin = 28.0;
        let mut attempts = 0;
        while spec.minutiae.len() < count {
            attempts += 1;
            assert!(attempts < 100_000, "cannot place {count} minutiae {spacing} px apart");
            let x = rng.random_range(0.0..width as f64);
            let y = rng.random_range(0.0..height as f64);
            let inner = (((x - center.0) / (radii.0 - margin)).powi(2) + ((y - center.1) / (radii.1 - margin)).powi(2)) <= 1.0;
            let kind = if rng.random_bool(0.5) { MinutiaKind::Ending } else { MinutiaKind::Bifurcation };
            let charge = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            if inner && spec.minutiae.iter().all(|m| (m.x - x).hypot(m.y - y) >= spacing) {
                spec.minutiae.push(PlantedMinutia { x, y, kind, charge });
            }
        }
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let reach = sign * rng.random_range(110.0..170.0);
        let (s, c) = spec.ridge_angle.sin_cos();
        spec.core = (center.0 - reach * s, center.1 + reach * c);
        spec.settle();
        spec
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }

    fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Unit vector across the ridges at `(x, y)`.
    fn normal(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = (x - self.core.0, y - self.core.1);
        let r = dx.hypot(dy).max(f64::MIN_POSITIVE);
        (dx / r, dy / r)
    }

    /// Phase without the singular term of minutia `skip`. The smooth part
    /// grows at exactly omega per pixel across the ridges, so the period is
    /// the same everywhere.
    fn smooth_phase(&self, x: f64, y: f64, skip: Option<usize>) -> f64 {
        let mut phi = self.omega() * (x - self.core.0).hypot(y - self.core.1) + self.phase;
        for (k, m) in self.minutiae.iter().enumerate() {
            if Some(k) != skip {
                // Winding measured in the local (across, along) frame, which
                // is mirrored relative to image axes.
                let (nx, ny) = self.normal(m.x, m.y);
                let (dx, dy) = (x - m.x, y - m.y);
                phi += m.charge * (dx * ny - dy * nx).atan2(dx * nx + dy * ny);
            }
        }
        phi
    }

    /// Moves each singularity across the ridges until the surrounding phase
    /// makes it a ridge ending (π/2) or a bifurcation (-π/2).
    fn settle(&mut self) {
        for _ in 0..50 {
            let mut worst: f64 = 0.0;
            for k in 0..self.minutiae.len() {
                let m = self.minutiae[k];
                let target = match m.kind {
                    MinutiaKind::Ending => PI / 2.0,
                    MinutiaKind::Bifurcation => -PI / 2.0,
                };
                let err = (target - self.smooth_phase(m.x, m.y, Some(k)) + PI).rem_euclid(2.0 * PI) - PI;
                worst = worst.max(err.abs());
                let (nx, ny) = self.normal(m.x, m.y);
                let du = err / self.omega();
                self.minutiae[k].x += nx * du;
                self.minutiae[k].y += ny * du;
            }
            if worst < 1e-9 {
                break;
            }
        }
    }

    /// Noise-free intensity at canonical coordinates.
    pub fn intensity(&self, x: f64, y: f64) -> f64 {
        let c = self.center();
        let r = ((x - c.0) / self.radii.0).hypot((y - c.1) / self.radii.1);
        // Contrast fades over the last few pixels of the finger area.
        let edge = ((1.0 - r) * self.radii.0.min(self.radii.1) / 4.0).clamp(0.0, 1.0);
        BACKGROUND - CONTRAST * edge * self.smooth_phase(x, y, None).cos()
    }

    /// Planted minutia positions after `pose`.
    pub fn planted(&self, pose: &Pose) -> Vec<PlantedMinutia> {
        let c = self.center();
        self.minutiae
            .iter()
            .map(|m| {
                let (x, y) = pose.apply(m.x, m.y, c);
                PlantedMinutia { x, y, ..*m }
            })
            .collect()
    }

    /// Renders the print moved by `pose`, with Gaussian noise of std `noise`.
    pub fn render(&self, pose: &Pose, noise: f64, noise_seed: u64) -> GrayImage {
        let c = self.center();
        let mut rng = rng(noise_seed, 2);
        let normal = Normal::new(0.0, noise.max(0.0)).expect("finite noise level");
        GrayImage::from_fn(self.width, self.height, |x, y| {
            let (px, py) = pose.invert(x as f64, y as f64, c);
            let v = self.intensity(px, py);
            if noise > 0.0 {
                v + normal.sample(&mut rng)
            } else {
                v
            }
        })
        .expect("synthetic print has valid size")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settled_phase_hits_the_kind_target() {
        let spec = FingerSpec::random(11, 6, 40.0);
        for (k, m) in spec.minutiae.iter().enumerate() {
            let target = if m.kind == MinutiaKind::Ending { PI / 2.0 } else { -PI / 2.0 };
            let err = (target - spec.smooth_phase(m.x, m.y, Some(k)) + PI).rem_euclid(2.0 * PI) - PI;
            assert!(err.abs() < 1e-6, "minutia {k}: {err}");
        }
    }

    #[test]
    fn pose_round_trips() {
        let p = Pose { dx: 7.0, dy: -3.0, dtheta: 0.3 };
        let (x, y) = p.apply(40.0, 90.0, (128.0, 128.0));
        let (bx, by) = p.invert(x, y, (128.0, 128.0));
        assert!((bx - 40.0).abs() < 1e-9 && (by - 90.0).abs() < 1e-9);
    }

    #[test]
    fn rendering_is_deterministic() {
        let spec = FingerSpec::random(3, 4, 40.0);
        let pose = Pose { dx: 2.0, dy: 1.0, dtheta: 0.1 };
        assert_eq!(spec.render(&pose, 0.05, 9), spec.render(&pose, 0.05, 9));
    }
}

use std::f64::consts::PI;

use super::trace::{branches, trace, Px};
use super::{angle_diff, Minutia, MinutiaKind};
use crate::imaging::{neighbors8, BinaryImage, FloatField};

/// Pixels traced along a ridge to decide which way a minutia points.
const TRACE_LEN: usize = 10;

/// Half the summed absolute differences of circularly adjacent neighbors.
pub fn crossing_number(n: &[bool; 8]) -> u8 {
    let sum: u8 = (0..8).map(|i| u8::from(n[i] != n[(i + 7) % 8])).sum();
    sum / 2
}

fn traced_directions(skel: &BinaryImage, p: Px) -> Vec<f64> {
    let arms = branches(skel, p);
    let all: Vec<Px> = arms.iter().flat_map(|(_, px)| px.iter().copied()).collect();
    arms.iter()
        .filter_map(|(lead, own)| {
            let blocked: Vec<Px> = all.iter().copied().filter(|q| !own.contains(q)).collect();
            trace(skel, p, *lead, &blocked, TRACE_LEN).direction(p)
        })
        .collect()
}

/// Ending: the ridge it terminates. Bifurcation: the stem, i.e. the arm
/// left over once the two closest-aligned arms are taken as the fork.
fn minutia_direction(skel: &BinaryImage, p: Px, kind: MinutiaKind) -> Option<f64> {
    let dirs = traced_directions(skel, p);
    match kind {
        MinutiaKind::Ending => dirs.first().copied(),
        MinutiaKind::Bifurcation => {
            if dirs.len() != 3 {
                return None;
            }
            let stem = (0..3)
                .min_by(|&a, &b| {
                    let fork = |s: usize| {
                        let (i, j) = ((s + 1) % 3, (s + 2) % 3);
                        angle_diff(dirs[i], dirs[j])
                    };
                    fork(a).total_cmp(&fork(b))
                })
                .unwrap();
            Some(dirs[stem])
        }
    }
}

/// Crossing-number minutiae inside the mask. Directions come from the
/// orientation field, flipped by π where the traced ridge disagrees.
/// Same-kind detections within 2 px of an earlier one are dropped.
pub fn extract_minutiae(thinned: &BinaryImage, orientation: &FloatField, mask: &BinaryImage) -> Vec<Minutia> {
    let mut found: Vec<(Px, MinutiaKind)> = Vec::new();
    for (x, y) in thinned.iter_set() {
        if !mask.get(x, y) {
            continue;
        }
        let kind = match crossing_number(&neighbors8(thinned, x, y)) {
            1 => MinutiaKind::Ending,
            3 => MinutiaKind::Bifurcation,
            _ => continue,
        };
        let near = found.iter().any(|&((fx, fy), k)| k == kind && fx.abs_diff(x) <= 2 && fy.abs_diff(y) <= 2);
        if !near {
            found.push(((x, y), kind));
        }
    }
    found
        .into_iter()
        .map(|((x, y), kind)| {
            let field = orientation.at_pixel(x, y);
            let theta = match minutia_direction(thinned, (x, y), kind) {
                Some(d) if angle_diff(field, d) > PI / 2.0 => field + PI,
                _ => field,
            };
            Minutia::new(x as f64, y as f64, theta, kind)
        })
        .collect()
}

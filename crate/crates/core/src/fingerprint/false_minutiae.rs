use std::f64::consts::PI;

use super::trace::{branches, trace, Px, TraceEnd};
use super::{angle_diff, axial_diff, Minutia, MinutiaKind};
use crate::imaging::BinaryImage;

/// Angular slack for the "opposing" and "orthogonal" tests.
const ANGLE_SLACK: f64 = PI / 6.0;

/// Euclidean distance from `(x, y)` to the nearest pixel outside the mask
/// (the image exterior counts as outside), or `None` if farther than `limit`.
pub(crate) fn distance_to_background(mask: &BinaryImage, x: usize, y: usize, limit: f64) -> Option<f64> {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let (xi, yi) = (x as isize, y as isize);
    let edge = [xi + 1, yi + 1, w - xi, h - yi].into_iter().min().unwrap() as f64;
    let mut best = if edge <= limit { Some(edge) } else { None };
    let r = limit.ceil() as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            let (nx, ny) = (xi + dx, yi + dy);
            if nx < 0 || ny < 0 || nx >= w || ny >= h || mask.get(nx as usize, ny as usize) {
                continue;
            }
            let d = (dx as f64).hypot(dy as f64);
            if d <= limit && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

fn px(m: &Minutia) -> Px {
    (m.x.round() as usize, m.y.round() as usize)
}

fn near(a: Px, b: Px, tol: usize) -> bool {
    a.0.abs_diff(b.0) <= tol && a.1.abs_diff(b.1) <= tol
}

/// Pairs `(i, j)` of live entries closer than `gap`, nearest first. Ties
/// keep index order so the greedy passes are deterministic.
fn close_pairs(list: &[Minutia], alive: &[bool], gap: f64, allowed: impl Fn(&Minutia, &Minutia) -> bool) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            if alive[i] && alive[j] && list[i].distance(&list[j]) < gap && allowed(&list[i], &list[j]) {
                pairs.push((list[i].distance(&list[j]), i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    pairs.into_iter().map(|(_, i, j)| (i, j)).collect()
}

fn remove_pairs(alive: &mut [bool], pairs: Vec<(usize, usize)>, keep_going: impl Fn(usize, usize) -> bool) {
    for (i, j) in pairs {
        if alive[i] && alive[j] && keep_going(i, j) {
            alive[i] = false;
            alive[j] = false;
        }
    }
}

fn junction_arms(skel: &BinaryImage, p: Px, max_len: usize) -> Vec<TraceEnd> {
    let arms = branches(skel, p);
    let all: Vec<Px> = arms.iter().flat_map(|(_, own)| own.iter().copied()).collect();
    arms.iter()
        .map(|(lead, own)| {
            let blocked: Vec<Px> = all.iter().copied().filter(|q| !own.contains(q)).collect();
            trace(skel, p, *lead, &blocked, max_len).end
        })
        .collect()
}

/// Applies, in order, the border, break, spur, hole and bridge rules and
/// returns the survivors in their original order.
pub fn filter_false_minutiae(
    minutiae: &[Minutia],
    thinned: &BinaryImage,
    mask: &BinaryImage,
    avg_ridge_gap: f64,
) -> Vec<Minutia> {
    let gap = avg_ridge_gap;
    let mut alive = vec![true; minutiae.len()];
    let is = |m: &Minutia, k: MinutiaKind| m.kind == k;

    // Border: anything within one ridge gap of the background.
    for (i, m) in minutiae.iter().enumerate() {
        let (x, y) = px(m);
        if distance_to_background(mask, x, y, gap).is_some() {
            alive[i] = false;
        }
    }

    // Break: two facing endings across a short gap.
    let pairs = close_pairs(minutiae, &alive, gap, |a, b| {
        is(a, MinutiaKind::Ending)
            && is(b, MinutiaKind::Ending)
            && (angle_diff(f64::from(a.theta), f64::from(b.theta)) - PI).abs() < ANGLE_SLACK
    });
    remove_pairs(&mut alive, pairs, |_, _| true);

    // Spur: an ending whose arm reaches a junction within one ridge gap.
    let steps = gap.ceil() as usize;
    for i in 0..minutiae.len() {
        if !alive[i] || !is(&minutiae[i], MinutiaKind::Ending) {
            continue;
        }
        let p = px(&minutiae[i]);
        let Some((lead, _)) = branches(thinned, p).into_iter().next() else {
            continue;
        };
        let t = trace(thinned, p, lead, &[], steps);
        if let TraceEnd::Junction(j) = t.end {
            if (t.path.len() as f64) < gap {
                alive[i] = false;
                let fork = (0..minutiae.len())
                    .filter(|&k| alive[k] && is(&minutiae[k], MinutiaKind::Bifurcation) && near(px(&minutiae[k]), j, 2))
                    .min_by_key(|&k| {
                        let q = px(&minutiae[k]);
                        q.0.abs_diff(j.0) + q.1.abs_diff(j.1)
                    });
                if let Some(k) = fork {
                    alive[k] = false;
                }
            }
        }
    }

    // Hole: two close bifurcations joined by two separate skeleton paths.
    let loop_len = (3.0 * gap).ceil() as usize;
    let pairs = close_pairs(minutiae, &alive, gap, |a, b| {
        is(a, MinutiaKind::Bifurcation) && is(b, MinutiaKind::Bifurcation)
    });
    remove_pairs(&mut alive, pairs, |i, j| {
        let target = px(&minutiae[j]);
        let hits = junction_arms(thinned, px(&minutiae[i]), loop_len)
            .into_iter()
            .filter(|end| matches!(end, TraceEnd::Junction(q) if near(*q, target, 2)))
            .count();
        hits >= 2
    });

    // Bridge: a short link running across the ridge flow.
    let pairs = close_pairs(minutiae, &alive, gap, |a, b| {
        is(a, MinutiaKind::Bifurcation) || is(b, MinutiaKind::Bifurcation)
    });
    remove_pairs(&mut alive, pairs, |i, j| {
        let (a, b) = (&minutiae[i], &minutiae[j]);
        let link = (f64::from(b.y) - f64::from(a.y)).atan2(f64::from(b.x) - f64::from(a.x));
        axial_diff(link, f64::from(a.theta)) > PI / 2.0 - ANGLE_SLACK
    });

    minutiae.iter().zip(&alive).filter(|(_, &keep)| keep).map(|(m, _)| *m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::extract_minutiae;
    use crate::imaging::{FieldKind, FloatField};

    fn field(w: usize, h: usize, theta: f64) -> FloatField {
        let (bw, bh) = (w.div_ceil(16), h.div_ceil(16));
        FloatField::new(bw, bh, 16, FieldKind::Orientation, vec![theta; bw * bh])
    }

    fn run(skel: &BinaryImage, theta: f64, gap: f64) -> (Vec<Minutia>, Vec<Minutia>) {
        let (w, h) = (skel.width(), skel.height());
        let mask = BinaryImage::filled(w, h, true);
        let found = extract_minutiae(skel, &field(w, h, theta), &mask);
        let kept = filter_false_minutiae(&found, skel, &mask, gap);
        (found, kept)
    }

    #[test]
    fn broken_ridge_is_rejoined() {
        // Two collinear segments with a 3-pixel gap between x=29 and x=33.
        let skel = BinaryImage::from_fn(64, 40, |x, y| y == 20 && ((12..30).contains(&x) || (33..52).contains(&x)));
        let (found, kept) = run(&skel, 0.0, 9.0);
        assert_eq!(found.len(), 4);
        let xs: Vec<f32> = kept.iter().map(|m| m.x).collect();
        assert_eq!(xs, vec![12.0, 51.0]);
    }

    #[test]
    fn short_spur_is_removed() {
        let mut skel = BinaryImage::from_fn(64, 40, |x, y| y == 20 && (10..54).contains(&x));
        for y in 16..20 {
            skel.set(32, y, true);
        }
        let (found, kept) = run(&skel, 0.0, 9.0);
        assert_eq!(found.iter().filter(|m| m.kind == MinutiaKind::Bifurcation).count(), 1);
        assert_eq!(found.len(), 4);
        let xs: Vec<f32> = kept.iter().map(|m| m.x).collect();
        assert_eq!(xs, vec![10.0, 53.0]);
    }

    #[test]
    fn clean_segment_is_untouched() {
        let skel = BinaryImage::from_fn(64, 40, |x, y| y == 20 && (15..45).contains(&x));
        let (found, kept) = run(&skel, 0.0, 9.0);
        assert_eq!(found.len(), 2);
        assert_eq!(kept, found);
    }

    #[test]
    fn minutiae_near_the_mask_edge_are_dropped() {
        let skel = BinaryImage::from_fn(64, 40, |x, y| y == 20 && (5..45).contains(&x));
        let mask = BinaryImage::filled(64, 40, true);
        let found = extract_minutiae(&skel, &field(64, 40, 0.0), &mask);
        let kept = filter_false_minutiae(&found, &skel, &mask, 9.0);
        let xs: Vec<f32> = kept.iter().map(|m| m.x).collect();
        assert_eq!(xs, vec![44.0]);
    }

    #[test]
    fn small_hole_is_removed() {
        // A ridge that splits at (28,20) around a small eye and closes at (36,20).
        let mut skel = BinaryImage::from_fn(72, 40, |x, y| y == 20 && ((10..29).contains(&x) || (36..60).contains(&x)));
        for x in 30..35 {
            skel.set(x, 18, true);
            skel.set(x, 22, true);
        }
        for p in [(29, 19), (29, 21), (35, 19), (35, 21)] {
            skel.set(p.0, p.1, true);
        }
        let (found, kept) = run(&skel, 0.0, 9.0);
        assert_eq!(found.iter().filter(|m| m.kind == MinutiaKind::Bifurcation).count(), 2, "{found:?}");
        assert_eq!(kept.len(), 2, "{kept:?}");
        assert!(kept.iter().all(|m| m.kind == MinutiaKind::Ending));
    }

    #[test]
    fn break_and_spur_rules_are_idempotent() {
        let skel = BinaryImage::from_fn(64, 40, |x, y| y == 20 && ((12..30).contains(&x) || (33..52).contains(&x)));
        let mask = BinaryImage::filled(64, 40, true);
        let found = extract_minutiae(&skel, &field(64, 40, 0.0), &mask);
        let once = filter_false_minutiae(&found, &skel, &mask, 9.0);
        assert_eq!(filter_false_minutiae(&once, &skel, &mask, 9.0), once);
    }
}

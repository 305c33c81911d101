use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{angle_diff, wrap_pi, FingerprintError, FingerprintTemplate, MatchParams, Minutia, RegistrationTransform};

type Bin = (i32, i32, i32);

fn center(t: &FingerprintTemplate) -> (f64, f64) {
    (t.image_width as f64 / 2.0, t.image_height as f64 / 2.0)
}

fn rotate(x: f64, y: f64, c: (f64, f64), angle: f64) -> (f64, f64) {
    let (s, k) = angle.sin_cos();
    let (rx, ry) = (x - c.0, y - c.1);
    (c.0 + k * rx - s * ry, c.1 + s * rx + k * ry)
}

/// Hough-style registration: every (template, input) pair votes for the
/// rotation/translation that would map one onto the other. The winning
/// bin's pairs are averaged into the returned transform.
pub fn register_minutiae(
    template: &FingerprintTemplate,
    input: &FingerprintTemplate,
    params: &MatchParams,
) -> Result<RegistrationTransform, FingerprintError> {
    if template.minutiae.is_empty() || input.minutiae.is_empty() {
        return Err(FingerprintError::EmptyTemplate);
    }
    let c = center(template);
    let angle_bins = (2.0 * PI / params.hough_angle_bin).round() as i32;
    let mut acc: BTreeMap<Bin, Vec<(f64, f64, f64)>> = BTreeMap::new();
    for t in &template.minutiae {
        for i in &input.minutiae {
            let dtheta = wrap_pi(f64::from(i.theta) - f64::from(t.theta));
            let (rx, ry) = rotate(f64::from(t.x), f64::from(t.y), c, dtheta);
            let (dx, dy) = (f64::from(i.x) - rx, f64::from(i.y) - ry);
            let mut ka = (dtheta / params.hough_angle_bin).round() as i32;
            // +π and -π are the same rotation.
            if angle_bins > 0 && 2 * ka >= angle_bins {
                ka -= angle_bins;
            }
            let kx = (dx / params.hough_xy_bin).round() as i32;
            let ky = (dy / params.hough_xy_bin).round() as i32;
            acc.entry((ka, kx, ky)).or_default().push((dtheta, dx, dy));
        }
    }
    // BTreeMap order makes the final tie-break deterministic.
    let (bin, votes) = acc
        .iter()
        .max_by(|(a, va), (b, vb)| {
            va.len()
                .cmp(&vb.len())
                .then_with(|| b.0.abs().cmp(&a.0.abs()))
                .then_with(|| (b.1.abs() + b.2.abs()).cmp(&(a.1.abs() + a.2.abs())))
                .then_with(|| b.cmp(a))
        })
        .expect("non-empty sets produce votes");
    let n = votes.len() as f64;
    let base = f64::from(bin.0) * params.hough_angle_bin;
    let dtheta = wrap_pi(base + votes.iter().map(|v| wrap_pi(v.0 - base)).sum::<f64>() / n);
    let dx = votes.iter().map(|v| v.1).sum::<f64>() / n;
    let dy = votes.iter().map(|v| v.2).sum::<f64>() / n;
    Ok(RegistrationTransform { dx, dy, dtheta, support: votes.len() })
}

/// Maps an input minutia back into the template frame.
fn undo(m: &Minutia, reg: &RegistrationTransform, c: (f64, f64)) -> (f64, f64, f64) {
    let (x, y) = rotate(f64::from(m.x) - reg.dx, f64::from(m.y) - reg.dy, c, -reg.dtheta);
    (x, y, f64::from(m.theta) - reg.dtheta)
}

/// Fraction of minutiae paired after registration: greedy nearest-first,
/// one-to-one, same kind, within both thresholds, divided by the larger set.
pub fn match_minutiae(template: &FingerprintTemplate, input: &FingerprintTemplate, params: &MatchParams) -> f64 {
    let (t, i) = (&template.minutiae, &input.minutiae);
    if t.is_empty() || i.is_empty() {
        return 0.0;
    }
    let reg = register_minutiae(template, input, params).expect("both sets are non-empty");
    let c = center(template);
    let moved: Vec<(f64, f64, f64)> = i.iter().map(|m| undo(m, &reg, c)).collect();

    let mut candidates = Vec::new();
    for (a, mt) in t.iter().enumerate() {
        for (b, &(x, y, theta)) in moved.iter().enumerate() {
            if mt.kind != i[b].kind {
                continue;
            }
            let d = (f64::from(mt.x) - x).hypot(f64::from(mt.y) - y);
            if d <= params.theta0 && angle_diff(f64::from(mt.theta), theta) <= params.theta1 {
                candidates.push((d, a, b));
            }
        }
    }
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then((p.1, p.2).cmp(&(q.1, q.2))));
    let (mut used_t, mut used_i) = (vec![false; t.len()], vec![false; i.len()]);
    let mut matched = 0usize;
    for (_, a, b) in candidates {
        if !used_t[a] && !used_i[b] {
            used_t[a] = true;
            used_i[b] = true;
            matched += 1;
        }
    }
    matched as f64 / t.len().max(i.len()) as f64
}

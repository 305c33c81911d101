//! Walking along one-pixel-wide skeleton curves.

use super::minutiae::crossing_number;
use crate::imaging::{neighbors8, BinaryImage};

/// Neighbor offsets in the same order as [`neighbors8`].
pub(crate) const OFFSETS: [(isize, isize); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

pub(crate) type Px = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TraceEnd {
    /// Ran off the end of the curve.
    Ending,
    /// Reached a branching pixel.
    Junction(Px),
    /// Stopped after the step budget.
    Limit,
}

#[derive(Debug, Clone)]
pub(crate) struct Trace {
    pub path: Vec<Px>,
    pub end: TraceEnd,
}

impl Trace {
    /// Direction from `origin` toward the last traced pixel.
    pub(crate) fn direction(&self, origin: Px) -> Option<f64> {
        let &(x, y) = self.path.last()?;
        Some((y as f64 - origin.1 as f64).atan2(x as f64 - origin.0 as f64))
    }
}

pub(crate) fn cn_at(skel: &BinaryImage, p: Px) -> u8 {
    crossing_number(&neighbors8(skel, p.0, p.1))
}

fn step(p: Px, k: usize, skel: &BinaryImage) -> Option<Px> {
    let (dx, dy) = OFFSETS[k];
    let (x, y) = (p.0 as isize + dx, p.1 as isize + dy);
    skel.get_or_false(x, y).then_some((x as usize, y as usize))
}

/// Groups the set neighbors of `p` into circular runs; each run is one
/// branch leaving `p`. Each branch is represented by its first 4-neighbor
/// if it has one, otherwise by its first pixel, plus all of its pixels.
pub(crate) fn branches(skel: &BinaryImage, p: Px) -> Vec<(Px, Vec<Px>)> {
    let n = neighbors8(skel, p.0, p.1);
    let Some(start) = (0..8).find(|&i| !n[i]) else {
        return Vec::new();
    };
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for j in 1..=8 {
        let i = (start + j) % 8;
        if n[i] {
            if n[(i + 7) % 8] && !runs.is_empty() {
                runs.last_mut().unwrap().push(i);
            } else {
                runs.push(vec![i]);
            }
        }
    }
    runs.into_iter()
        .map(|run| {
            let lead = run.iter().copied().find(|k| k % 2 == 0).unwrap_or(run[0]);
            let pixels = run.iter().filter_map(|&k| step(p, k, skel)).collect();
            (step(p, lead, skel).expect("run pixel is set"), pixels)
        })
        .collect()
}

/// Follows the skeleton from `origin` through `first`, never revisiting
/// `origin`, `blocked` or earlier path pixels, for at most `max_len` pixels.
pub(crate) fn trace(skel: &BinaryImage, origin: Px, first: Px, blocked: &[Px], max_len: usize) -> Trace {
    let mut visited: Vec<Px> = blocked.to_vec();
    visited.push(origin);
    let mut path = vec![first];
    let mut cur = first;
    loop {
        if cn_at(skel, cur) >= 3 {
            return Trace { path, end: TraceEnd::Junction(cur) };
        }
        if path.len() >= max_len {
            return Trace { path, end: TraceEnd::Limit };
        }
        visited.push(cur);
        let open: Vec<Px> = (0..8).filter_map(|k| step(cur, k, skel)).filter(|q| !visited.contains(q)).collect();
        // Prefer stepping onto a branching pixel so junctions are never
        // skipped diagonally, then 4-neighbors over diagonals.
        let next = open
            .iter()
            .copied()
            .find(|&q| cn_at(skel, q) >= 3)
            .or_else(|| open.iter().copied().find(|q| q.0 == cur.0 || q.1 == cur.1))
            .or_else(|| open.first().copied());
        match next {
            Some(q) => {
                path.push(q);
                cur = q;
            }
            None => return Trace { path, end: TraceEnd::Ending },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn follows_a_line_to_its_end() {
        let skel = BinaryImage::from_fn(20, 10, |x, y| y == 5 && (3..15).contains(&x));
        let t = trace(&skel, (3, 5), (4, 5), &[], 50);
        assert_eq!(t.end, TraceEnd::Ending);
        assert_eq!(t.path.len(), 11);
        assert_eq!(t.direction((3, 5)), Some(0.0));
    }

    #[test]
    fn stops_at_a_junction() {
        let mut skel = BinaryImage::from_fn(20, 20, |x, y| y == 10 && (2..18).contains(&x));
        for y in 3..10 {
            skel.set(10, y, true);
        }
        let t = trace(&skel, (10, 3), (10, 4), &[], 50);
        assert_eq!(t.end, TraceEnd::Junction((10, 10)));
    }

    #[test]
    fn branch_runs() {
        let mut skel = BinaryImage::filled(9, 9, false);
        for p in [(4, 4), (3, 3), (5, 3), (4, 5)] {
            skel.set(p.0, p.1, true);
        }
        assert_eq!(branches(&skel, (4, 4)).len(), 3);
    }
}

use super::BinaryImage;

/// The 8-neighborhood of `(x, y)` in circular order starting north and
/// running clockwise: N, NE, E, SE, S, SW, W, NW. Out-of-bounds is `false`.
pub fn neighbors8(img: &BinaryImage, x: usize, y: usize) -> [bool; 8] {
    let (x, y) = (x as isize, y as isize);
    [
        img.get_or_false(x, y - 1),
        img.get_or_false(x + 1, y - 1),
        img.get_or_false(x + 1, y),
        img.get_or_false(x + 1, y + 1),
        img.get_or_false(x, y + 1),
        img.get_or_false(x - 1, y + 1),
        img.get_or_false(x - 1, y),
        img.get_or_false(x - 1, y - 1),
    ]
}

fn transitions(n: &[bool; 8]) -> usize {
    (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count()
}

fn zhang_suen_pass(img: &mut BinaryImage, second: bool) -> bool {
    let mut doomed = Vec::new();
    for (x, y) in img.iter_set() {
        let n = neighbors8(img, x, y);
        let count = n.iter().filter(|&&b| b).count();
        // Lü-Wang lower bound of 3 neighbors: with the original bound of 2,
        // two-pixel-thick diagonal strokes are eaten away from their tips.
        if !(3..=6).contains(&count) || transitions(&n) != 1 {
            continue;
        }
        let (p2, p4, p6, p8) = (n[0], n[2], n[4], n[6]);
        let keep = if second {
            p2 && p4 && p8 || p2 && p6 && p8
        } else {
            p2 && p4 && p6 || p4 && p6 && p8
        };
        if !keep {
            doomed.push((x, y));
        }
    }
    // Parallel deletion erases a 2x2 square outright; spare one corner of any
    // fully doomed square so no component can vanish.
    let mut marked = BinaryImage::filled(img.width(), img.height(), false);
    for &(x, y) in &doomed {
        marked.set(x, y, true);
    }
    let spared: Vec<(usize, usize)> = doomed
        .iter()
        .copied()
        .filter(|&(x, y)| {
            let (x, y) = (x as isize, y as isize);
            [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)].iter().all(|&(a, b)| marked.get_or_false(a, b))
        })
        .collect();
    for &(x, y) in &spared {
        marked.set(x, y, false);
    }
    let removed = marked.count();
    for (x, y) in marked.iter_set().collect::<Vec<_>>() {
        img.set(x, y, false);
    }
    removed > 0
}

/// Number of 8-connected groups formed by the set neighbors of a pixel
/// (the pixel itself excluded).
fn neighbor_groups(n: &[bool; 8]) -> usize {
    let mut parent: [usize; 8] = std::array::from_fn(|i| i);
    fn root(p: &mut [usize; 8], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    let mut join = |a: usize, b: usize| {
        if n[a] && n[b] {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            parent[ra] = rb;
        }
    };
    for i in 0..8 {
        join(i, (i + 1) % 8);
    }
    // Edge neighbors two steps apart on the ring touch diagonally.
    for i in [0, 2, 4, 6] {
        join(i, (i + 2) % 8);
    }
    (0..8).filter(|&i| n[i] && root(&mut parent, i) == i).count()
}

/// Removes corner pixels of 4-connected staircases, leaving lines 8-connected
/// and one pixel wide. A corner has two perpendicular edge neighbors with
/// the diagonal between them empty; it is only removed when its neighbors
/// stay connected and no hole can form. Sequential so that neighboring
/// corners are re-checked.
fn remove_staircase_corners(img: &mut BinaryImage) -> bool {
    let mut changed = false;
    let (w, h) = (img.width(), img.height());
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            let n = neighbors8(img, x, y);
            let corner = [0usize, 2, 4, 6].iter().any(|&i| n[i] && n[(i + 2) % 8] && !n[i + 1]);
            let open_edge = [0usize, 2, 4, 6].iter().any(|&i| !n[i]);
            if corner && open_edge && neighbor_groups(&n) == 1 {
                img.set(x, y, false);
                changed = true;
            }
        }
    }
    changed
}

/// Zhang-Suen thinning (with the Lü-Wang neighbor bound) iterated to a fixed
/// point, followed by staircase cleanup. The result is a subset of the input.
pub fn thin(img: &BinaryImage) -> BinaryImage {
    let mut out = img.clone();
    loop {
        let mut changed = false;
        loop {
            let a = zhang_suen_pass(&mut out, false);
            let b = zhang_suen_pass(&mut out, true);
            if !(a || b) {
                break;
            }
            changed = true;
        }
        changed |= remove_staircase_corners(&mut out);
        if !changed {
            return out;
        }
    }
}

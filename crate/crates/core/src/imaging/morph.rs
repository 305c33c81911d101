use super::BinaryImage;

fn reduce(mut vals: impl Iterator<Item = bool>, all: bool) -> bool {
    if all {
        vals.all(|b| b)
    } else {
        vals.any(|b| b)
    }
}

/// One separable pass of a square min/max filter. `all == true` computes
/// erosion (every pixel in the window set), otherwise dilation.
fn square_filter(mask: &BinaryImage, radius: usize, all: bool) -> BinaryImage {
    let (w, h) = (mask.width(), mask.height());
    let r = radius as isize;

    let mut horizontal = BinaryImage::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            let it = (-r..=r).map(|d| mask.get((x as isize + d).clamp(0, w as isize - 1) as usize, y));
            horizontal.set(x, y, reduce(it, all));
        }
    }
    let mut out = BinaryImage::filled(w, h, false);
    for y in 0..h {
        for x in 0..w {
            let it =
                (-r..=r).map(|d| horizontal.get(x, (y as isize + d).clamp(0, h as isize - 1) as usize));
            out.set(x, y, reduce(it, all));
        }
    }
    out
}

/// Square-element dilation with replicated edges.
pub fn dilate(mask: &BinaryImage, radius: usize) -> BinaryImage {
    square_filter(mask, radius, false)
}

/// Square-element erosion with replicated edges.
pub fn erode(mask: &BinaryImage, radius: usize) -> BinaryImage {
    square_filter(mask, radius, true)
}

/// Closing followed by opening with a `(2r+1)`-square structuring element.
pub fn morph_close_open(mask: &BinaryImage, radius: usize) -> BinaryImage {
    let radius = radius.max(1);
    let closed = erode(&dilate(mask, radius), radius);
    dilate(&erode(&closed, radius), radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_true_is_fixed_point() {
        let m = BinaryImage::filled(20, 12, true);
        assert_eq!(morph_close_open(&m, 2), m);
    }

    #[test]
    fn single_hole_is_filled() {
        let mut m = BinaryImage::filled(32, 32, true);
        m.set(15, 9, false);
        assert_eq!(morph_close_open(&m, 1).count(), 32 * 32);
    }

    #[test]
    fn isolated_speck_is_removed() {
        let mut m = BinaryImage::filled(32, 32, false);
        m.set(10, 20, true);
        assert_eq!(morph_close_open(&m, 1).count(), 0);
    }

    proptest! {
        #[test]
        fn closing_extensive_opening_antiextensive(
            bits in prop::collection::vec(any::<bool>(), 24 * 18), radius in 1usize..4
        ) {
            let m = BinaryImage::new(24, 18, bits).unwrap();
            let closed = erode(&dilate(&m, radius), radius);
            prop_assert!(m.is_subset_of(&closed));
            prop_assert!(morph_close_open(&m, radius).is_subset_of(&closed));
        }
    }
}

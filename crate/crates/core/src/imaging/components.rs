use super::BinaryImage;

/// 8-connected component labeling. Label 0 is background; components are
/// numbered from 1 in raster order of their first pixel.
#[derive(Debug, Clone)]
pub struct Components {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    /// Pixel count per component, indexed by `label - 1`.
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Label of the largest component; ties go to the lowest label.
    pub fn largest(&self) -> Option<u32> {
        self.sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i as u32 + 1)
    }

    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

pub fn label_components(mask: &BinaryImage) -> Components {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        let mut size = 0;
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if mask.get_or_false(nx, ny) {
                        let j = ny as usize * w + nx as usize;
                        if labels[j] == 0 {
                            labels[j] = label;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        sizes.push(size);
    }
    Components { width: w, height: h, labels, sizes }
}

/// Sets every background pixel that is not 4-connected to the image border.
pub fn fill_holes(mask: &BinaryImage) -> BinaryImage {
    let (w, h) = (mask.width(), mask.height());
    let mut outside = vec![false; w * h];
    let mut stack: Vec<usize> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !mask.get(x, y) {
                outside[y * w + x] = true;
                stack.push(y * w + x);
            }
        }
    }
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut visit = |nx: usize, ny: usize| {
            let j = ny * w + nx;
            if !outside[j] && !mask.get(nx, ny) {
                outside[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(x - 1, y);
        }
        if x + 1 < w {
            visit(x + 1, y);
        }
        if y > 0 {
            visit(x, y - 1);
        }
        if y + 1 < h {
            visit(x, y + 1);
        }
    }
    BinaryImage::from_fn(w, h, |x, y| !outside[y * w + x])
}

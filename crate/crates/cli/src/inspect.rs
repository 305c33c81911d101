use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use biofuse::fingerprint::{extract_template, FingerprintError, MinutiaKind};
use biofuse::imaging::{encode_pgm, GrayImage, Raster};
use biofuse::iris::{extract_iris, IrisError};
use biofuse::registry::Pipelines;

fn write(out: &Path, name: &str, img: &impl Raster) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, encode_pgm(img)).with_context(|| format!("cannot write {}", path.display()))
}

fn finger_stage(e: &FingerprintError) -> &'static str {
    match e {
        FingerprintError::ImageTooSmall { .. } | FingerprintError::BadParams(_) => "segment",
        FingerprintError::BlockTooSmall(_) => "orientation",
        _ => "extract",
    }
}

fn iris_stage(e: &IrisError) -> &'static str {
    match e {
        IrisError::NoPupilFound | IrisError::BoundaryNotFound | IrisError::BadGeometry(_) => "localize",
        IrisError::BadDimensions { .. } => "normalize",
        _ => "encode",
    }
}

/// Mask, enhanced image, skeleton and a minutiae overlay: the print dimmed
/// to mid-gray with white 3x3 marks on endings and black on bifurcations.
pub fn finger(img: &GrayImage, pipelines: &Pipelines, out: &Path) -> Result<()> {
    let (template, stages) = extract_template(img, &pipelines.finger)
        .map_err(|e| anyhow::anyhow!("stage {}: {e}", finger_stage(&e)))?;
    write(out, "mask.pgm", &stages.mask.to_gray())?;
    write(out, "enhanced.pgm", &GrayImage::from_real_stretched(&stages.enhanced)?)?;
    write(out, "thin.pgm", &stages.thinned.to_gray())?;

    let (w, h) = (img.width(), img.height());
    let mut overlay: Vec<f64> = img.data().iter().map(|v| 0.25 + 0.5 * v).collect();
    for m in &template.minutiae {
        let mark = if m.kind == MinutiaKind::Ending { 1.0 } else { 0.0 };
        let (cx, cy) = (m.x.round() as isize, m.y.round() as isize);
        for y in cy - 1..=cy + 1 {
            for x in cx - 1..=cx + 1 {
                if (0..w as isize).contains(&x) && (0..h as isize).contains(&y) {
                    overlay[y as usize * w + x as usize] = mark;
                }
            }
        }
    }
    write(out, "minutiae.pgm", &GrayImage::new(w, h, overlay)?)?;

    let endings = template.minutiae.iter().filter(|m| m.kind == MinutiaKind::Ending).count();
    println!("minutiae {} endings {} bifurcations {}", template.minutiae.len(), endings, template.minutiae.len() - endings);
    Ok(())
}

/// Normalized strip and its validity mask, plus code statistics.
pub fn iris(img: &GrayImage, pipelines: &Pipelines, out: &Path) -> Result<()> {
    let t = extract_iris(img, &pipelines.iris).map_err(|e| anyhow::anyhow!("stage {}: {e}", iris_stage(&e)))?;
    let s = &t.strip;
    let clamped: Vec<f64> = s.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    write(out, "strip.pgm", &GrayImage::new(s.angular, s.radial, clamped)?)?;
    let mask: Vec<f64> = s.valid.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
    write(out, "strip_mask.pgm", &GrayImage::new(s.angular, s.radial, mask)?)?;
    let g = t.geometry;
    println!(
        "pupil ({:.4}, {:.4}) r {:.4} iris r {:.4}",
        g.pupil_cx, g.pupil_cy, g.pupil_r, g.iris_r
    );
    for code in [&t.haar, &t.mellin] {
        println!(
            "{:?} bits {} valid {} balance {:.4}",
            code.scheme,
            code.len(),
            code.valid_count(),
            code.balance()
        );
    }
    Ok(())
}

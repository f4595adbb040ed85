//! Quantitative comparison metrics between images.

use thiserror::Error;

use crate::image_io::RgbImage8;
use crate::morphology::{MatrixImage, ScalarImage, StructuringElement};
use crate::suprema::PARALLEL_TOL;
use crate::sym2::{eigendecompose, SpectralDecomp, EIGEN_TIE_TOL};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

fn check_dims(a: &RgbImage8, b: &RgbImage8) -> Result<(), MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

/// Per-channel absolute difference as three scalar images on the 0..255 scale.
pub fn channel_abs_diff(a: &RgbImage8, b: &RgbImage8) -> Result<[ScalarImage; 3], MetricsError> {
    check_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    let diff = |ch: usize| {
        let data = a
            .data()
            .iter()
            .skip(ch)
            .step_by(3)
            .zip(b.data().iter().skip(ch).step_by(3))
            .map(|(&x, &y)| (x as f64 - y as f64).abs())
            .collect();
        ScalarImage::new(w, h, data)
    };
    Ok([diff(0), diff(1), diff(2)])
}

/// Sum over channels of the Frobenius norm of the channel difference,
/// on the 0..255 tonal scale.
pub fn frobenius_error_sum(a: &RgbImage8, b: &RgbImage8) -> Result<f64, MetricsError> {
    let diffs = channel_abs_diff(a, b)?;
    Ok(diffs
        .iter()
        .map(|d| d.data().iter().map(|v| v * v).sum::<f64>().sqrt())
        .sum())
}

/// Mean over pixels of the gap between the leading eigenvalue `lambda1` of
/// the structuring-element neighbourhood and the second value `mu` selected
/// by the exact log-exp supremum rule.
pub fn mean_top_eigen_gap(img: &MatrixImage, se: &StructuringElement) -> f64 {
    assert!(se.is_flat(), "flat SEs only");
    let cells = se.cells();
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut total = 0.0;
    for row in 0..h {
        for col in 0..w {
            let mut decomps: Vec<SpectralDecomp> = Vec::with_capacity(cells.len());
            for &(du, dv, _) in &cells {
                let (r, c) = (row - du, col - dv);
                if r >= 0 && r < h && c >= 0 && c < w {
                    decomps.push(eigendecompose(img.get(r as usize, c as usize)));
                }
            }
            total += selection_gap(&decomps);
        }
    }
    total / (img.width() * img.height()) as f64
}

fn selection_gap(decomps: &[SpectralDecomp]) -> f64 {
    let best = decomps
        .iter()
        .cloned()
        .reduce(|a, b| if b.lambda > a.lambda { b } else { a })
        .expect("neighbourhood never empty");
    let mut mu = f64::NEG_INFINITY;
    for d in decomps {
        if (d.phi - best.phi).sin().abs() >= PARALLEL_TOL {
            mu = mu.max(d.lambda);
        }
        if (d.phi + FRAC_PI_2 - best.phi).sin().abs() >= PARALLEL_TOL {
            mu = mu.max(d.mu);
        }
    }
    if mu == f64::NEG_INFINITY {
        mu = decomps.iter().map(|d| d.mu).fold(f64::NEG_INFINITY, f64::max);
    } else if mu >= best.lambda - EIGEN_TIE_TOL {
        mu = best.lambda;
    }
    best.lambda - mu
}

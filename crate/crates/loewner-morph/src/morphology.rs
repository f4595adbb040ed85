//! Sliding-window morphological operators on matrix images and on scalar
//! channels.
//!
//! Border policy: the structuring element is intersected with the image
//! domain, no padding. Dilation reads `f(x - u)` (reflected SE), erosion
//! `f(x + u)`. Per-pixel outputs are independent and computed in parallel;
//! results do not depend on the degree of parallelism.

use rayon::prelude::*;
use thiserror::Error;

use crate::image_io::RgbImage8;
use crate::suprema::{SupMethod, SupremumError};
use crate::sym2::Sym2;

#[derive(Debug, Error)]
pub enum StructuringElementError {
    #[error("structuring element size must be odd and >= 1, got {0}")]
    EvenSize(usize),
    #[error("structuring element must contain at least one active cell")]
    EmptyMask,
    #[error("anchor ({0}, {1}) outside the {2}x{3} mask")]
    AnchorOutOfBounds(usize, usize, usize, usize),
    #[error("offset grid shape does not match the mask")]
    OffsetShapeMismatch,
}

/// Rectangular grid of symmetric 2x2 matrices, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixImage {
    width: usize,
    height: usize,
    pixels: Vec<Sym2>,
}

impl MatrixImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Sym2>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel buffer length mismatch");
        MatrixImage {
            width,
            height,
            pixels,
        }
    }

    pub fn constant(width: usize, height: usize, value: Sym2) -> Self {
        MatrixImage::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Sym2) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        MatrixImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> Sym2 {
        self.pixels[row * self.width + col]
    }

    pub fn pixels(&self) -> &[Sym2] {
        &self.pixels
    }

    pub fn max_entry_distance(&self, other: &MatrixImage) -> f64 {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| a.max_entry_distance(b))
            .fold(0.0, f64::max)
    }
}

/// Scalar-valued image used by the grey-scale path.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        ScalarImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Binary mask with an anchor; an optional aligned offset grid turns it into
/// a non-flat grey-scale SE.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuringElement {
    rows: usize,
    cols: usize,
    mask: Vec<bool>,
    anchor: (usize, usize),
    offsets: Option<Vec<f64>>,
}

impl StructuringElement {
    /// Flat square SE of odd side `k`, anchored at the centre.
    pub fn square(k: usize) -> Result<Self, StructuringElementError> {
        if k == 0 || k % 2 == 0 {
            return Err(StructuringElementError::EvenSize(k));
        }
        StructuringElement::from_mask(k, k, vec![true; k * k], (k / 2, k / 2), None)
    }

    pub fn from_mask(
        rows: usize,
        cols: usize,
        mask: Vec<bool>,
        anchor: (usize, usize),
        offsets: Option<Vec<f64>>,
    ) -> Result<Self, StructuringElementError> {
        assert_eq!(mask.len(), rows * cols);
        if anchor.0 >= rows || anchor.1 >= cols {
            return Err(StructuringElementError::AnchorOutOfBounds(
                anchor.0, anchor.1, rows, cols,
            ));
        }
        if !mask.iter().any(|&m| m) {
            return Err(StructuringElementError::EmptyMask);
        }
        if let Some(ref o) = offsets {
            if o.len() != mask.len() {
                return Err(StructuringElementError::OffsetShapeMismatch);
            }
        }
        Ok(StructuringElement {
            rows,
            cols,
            mask,
            anchor,
            offsets,
        })
    }

    pub fn is_flat(&self) -> bool {
        self.offsets.is_none()
    }

    /// Active cells as offsets `(du, dv, beta)` relative to the anchor.
    pub fn cells(&self) -> Vec<(isize, isize, f64)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.mask[r * self.cols + c] {
                    let beta = self
                        .offsets
                        .as_ref()
                        .map_or(0.0, |o| o[r * self.cols + c]);
                    out.push((
                        r as isize - self.anchor.0 as isize,
                        c as isize - self.anchor.1 as isize,
                        beta,
                    ));
                }
            }
        }
        out
    }
}

fn matrix_filter(
    img: &MatrixImage,
    se: &StructuringElement,
    erosion: bool,
    f: impl Fn(&[Sym2]) -> Result<Sym2, SupremumError> + Sync,
) -> Result<MatrixImage, SupremumError> {
    let cells = se.cells();
    let (w, h) = (img.width as isize, img.height as isize);
    let pixels: Result<Vec<Sym2>, SupremumError> = (0..img.height * img.width)
        .into_par_iter()
        .map(|idx| {
            let row = (idx / img.width) as isize;
            let col = (idx % img.width) as isize;
            let mut neigh = Vec::with_capacity(cells.len());
            for &(du, dv, _) in &cells {
                let (r, c) = if erosion {
                    (row + du, col + dv)
                } else {
                    (row - du, col - dv)
                };
                if r >= 0 && r < h && c >= 0 && c < w {
                    neigh.push(img.get(r as usize, c as usize));
                }
            }
            f(&neigh)
        })
        .collect();
    Ok(MatrixImage::new(img.width, img.height, pixels?))
}

/// Matrix-valued dilation with the chosen supremum back-end. Flat SEs only.
pub fn dilate(
    img: &MatrixImage,
    se: &StructuringElement,
    method: SupMethod,
) -> Result<MatrixImage, SupremumError> {
    assert!(se.is_flat(), "matrix morphology supports flat SEs only");
    matrix_filter(img, se, false, |n| method.supremum(n))
}

/// Matrix-valued erosion, the infimum dual of [`dilate`].
pub fn erode(
    img: &MatrixImage,
    se: &StructuringElement,
    method: SupMethod,
) -> Result<MatrixImage, SupremumError> {
    assert!(se.is_flat(), "matrix morphology supports flat SEs only");
    matrix_filter(img, se, true, |n| method.infimum(n))
}

/// Opening: erosion followed by dilation.
pub fn open(
    img: &MatrixImage,
    se: &StructuringElement,
    method: SupMethod,
) -> Result<MatrixImage, SupremumError> {
    dilate(&erode(img, se, method)?, se, method)
}

/// Closing: dilation followed by erosion.
pub fn close(
    img: &MatrixImage,
    se: &StructuringElement,
    method: SupMethod,
) -> Result<MatrixImage, SupremumError> {
    erode(&dilate(img, se, method)?, se, method)
}

fn grey_filter(channel: &ScalarImage, se: &StructuringElement, erosion: bool) -> ScalarImage {
    let cells = se.cells();
    let (w, h) = (channel.width as isize, channel.height as isize);
    let mut data = Vec::with_capacity(channel.data.len());
    for row in 0..h {
        for col in 0..w {
            let mut extreme = if erosion {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            for &(du, dv, beta) in &cells {
                let (r, c) = if erosion {
                    (row + du, col + dv)
                } else {
                    (row - du, col - dv)
                };
                if r >= 0 && r < h && c >= 0 && c < w {
                    let v = channel.get(r as usize, c as usize);
                    extreme = if erosion {
                        extreme.min(v - beta)
                    } else {
                        extreme.max(v + beta)
                    };
                }
            }
            data.push(extreme);
        }
    }
    ScalarImage::new(channel.width, channel.height, data)
}

/// Grey-scale dilation `max { f(x - u) + b(u) }`; flat when no offsets.
pub fn grey_dilate(channel: &ScalarImage, se: &StructuringElement) -> ScalarImage {
    grey_filter(channel, se, false)
}

/// Grey-scale erosion `min { f(x + u) - b(u) }`.
pub fn grey_erode(channel: &ScalarImage, se: &StructuringElement) -> ScalarImage {
    grey_filter(channel, se, true)
}

fn rgb_channelwise(img: &RgbImage8, se: &StructuringElement, erosion: bool) -> RgbImage8 {
    let (w, h) = (img.width(), img.height());
    let mut channels: Vec<ScalarImage> = Vec::with_capacity(3);
    for ch in 0..3 {
        let data: Vec<f64> = img.data().iter().skip(ch).step_by(3).map(|&b| b as f64).collect();
        let filtered = grey_filter(&ScalarImage::new(w, h, data), se, erosion);
        channels.push(filtered);
    }
    let mut out = Vec::with_capacity(3 * w * h);
    for i in 0..w * h {
        for ch in &channels {
            out.push(ch.data[i].round().clamp(0.0, 255.0) as u8);
        }
    }
    RgbImage8::new(w, h, out)
}

/// Independent grey-scale dilation of the three RGB channels.
pub fn channelwise_dilate(img: &RgbImage8, se: &StructuringElement) -> RgbImage8 {
    rgb_channelwise(img, se, false)
}

/// Independent grey-scale erosion of the three RGB channels.
pub fn channelwise_erode(img: &RgbImage8, se: &StructuringElement) -> RgbImage8 {
    rgb_channelwise(img, se, true)
}

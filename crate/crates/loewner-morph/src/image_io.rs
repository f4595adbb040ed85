//! Image reading/writing (binary PPM and PNG), synthetic test images, and
//! the conversion between byte images and matrix images.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::colour::{rgb_to_sym2, sym2_to_rgb, RgbColour};
use crate::morphology::MatrixImage;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported image format for {0}")]
    UnsupportedFormat(String),
    #[error("invalid PPM data: {0}")]
    InvalidPpm(String),
    #[error("PNG error: {0}")]
    Png(String),
    #[error("image dimensions must be positive")]
    ZeroSize,
}

/// 8-bit RGB image, row-major byte triples, top-left origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage8 {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage8 {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), 3 * width * height, "byte buffer length mismatch");
        RgbImage8 {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(3 * width * height);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RgbImage8::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Decodes a binary (P6, maxval 255) PPM from memory.
pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage8, ImageIoError> {
    let mut pos = 0usize;
    let magic = take_token(bytes, &mut pos)
        .ok_or_else(|| ImageIoError::InvalidPpm("missing magic number".into()))?;
    if magic != b"P6" {
        return Err(ImageIoError::InvalidPpm(format!(
            "expected P6 magic, got {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = parse_number(bytes, &mut pos, "width")?;
    let height = parse_number(bytes, &mut pos, "height")?;
    let maxval = parse_number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(ImageIoError::InvalidPpm(format!(
            "only maxval 255 is supported, got {maxval}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroSize);
    }
    // Exactly one whitespace byte separates the header from the payload.
    pos += 1;
    let need = 3 * width * height;
    let payload = bytes
        .get(pos..pos + need)
        .ok_or_else(|| ImageIoError::InvalidPpm("truncated pixel data".into()))?;
    Ok(RgbImage8::new(width, height, payload.to_vec()))
}

/// Encodes as binary PPM with exactly one whitespace after the maxval.
pub fn encode_ppm(img: &RgbImage8) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.data.len() + 32);
    write!(out, "P6\n{} {}\n255\n", img.width, img.height).unwrap();
    out.extend_from_slice(&img.data);
    out
}

fn take_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    skip_whitespace_and_comments(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (*pos > start).then(|| &bytes[start..*pos])
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            return;
        }
    }
}

fn parse_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize, ImageIoError> {
    let tok = take_token(bytes, pos)
        .ok_or_else(|| ImageIoError::InvalidPpm(format!("missing {what}")))?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ImageIoError::InvalidPpm(format!("malformed {what}")))
}

/// Reads a PPM (P6) or PNG file, dispatching on the file's magic bytes.
pub fn read_image(path: impl AsRef<Path>) -> Result<RgbImage8, ImageIoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImageIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if bytes.starts_with(b"P6") {
        decode_ppm(&bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        let decoded = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
            .map_err(|e| ImageIoError::Png(e.to_string()))?
            .to_rgb8();
        let (w, h) = (decoded.width() as usize, decoded.height() as usize);
        if w == 0 || h == 0 {
            return Err(ImageIoError::ZeroSize);
        }
        Ok(RgbImage8::new(w, h, decoded.into_raw()))
    } else {
        Err(ImageIoError::UnsupportedFormat(path.display().to_string()))
    }
}

/// Writes PPM or PNG, chosen by the file extension (`.ppm`/`.pnm` or `.png`).
pub fn write_image(img: &RgbImage8, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    if img.width == 0 || img.height == 0 {
        return Err(ImageIoError::ZeroSize);
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "ppm" | "pnm" => fs::write(path, encode_ppm(img)).map_err(|source| ImageIoError::Io {
            path: path.display().to_string(),
            source,
        }),
        "png" => {
            let buf = image::RgbImage::from_raw(
                img.width as u32,
                img.height as u32,
                img.data.clone(),
            )
            .expect("buffer length checked by construction");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| ImageIoError::Png(e.to_string()))
        }
        other => Err(ImageIoError::UnsupportedFormat(format!(
            "{} (extension {other:?})",
            path.display()
        ))),
    }
}

/// Left half `left`, right half `right`; `width` must be even.
pub fn synth_halves(
    width: usize,
    height: usize,
    left: [u8; 3],
    right: [u8; 3],
) -> Result<RgbImage8, ImageIoError> {
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroSize);
    }
    assert!(width % 2 == 0, "width must be even");
    Ok(RgbImage8::from_fn(width, height, |x, _| {
        if x < width / 2 {
            left
        } else {
            right
        }
    }))
}

/// Per-pixel application of the colour bijection chain.
pub fn to_matrix_image(img: &RgbImage8) -> MatrixImage {
    MatrixImage::from_fn(img.width, img.height, |row, col| {
        let [r, g, b] = img.get(col, row);
        rgb_to_sym2(RgbColour::from_bytes(r, g, b))
    })
}

/// Inverse chain: clamps to the bi-cone, then quantises to bytes.
pub fn from_matrix_image(mimg: &MatrixImage) -> RgbImage8 {
    RgbImage8::from_fn(mimg.width(), mimg.height(), |col, row| {
        let (r, g, b) = sym2_to_rgb(mimg.get(row, col)).to_bytes();
        [r, g, b]
    })
}

/// The 64x64 natural-style test image bundled with the crate.
pub fn natural_test_image() -> RgbImage8 {
    decode_ppm(include_bytes!("../assets/natural64.ppm"))
        .expect("bundled test image is valid PPM")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym2::Sym2;
    use std::f64::consts::SQRT_2;

    #[test]
    fn decode_single_red_pixel() {
        let img = decode_ppm(b"P6\n1 1\n255\n\xff\x00\x00").unwrap();
        assert_eq!(img.get(0, 0), [255, 0, 0]);
    }

    #[test]
    fn ppm_roundtrip_is_byte_exact() {
        let img = RgbImage8::from_fn(5, 4, |x, y| [(x * 50) as u8, (y * 60) as u8, 7]);
        let encoded = encode_ppm(&img);
        assert_eq!(decode_ppm(&encoded).unwrap(), img);
    }

    #[test]
    fn decode_rejects_bad_input() {
        assert!(decode_ppm(b"P5\n1 1\n255\n\x00").is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\x00\x00").is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\nxx").is_err());
    }

    #[test]
    fn ppm_and_png_decode_identically() {
        let dir = std::env::temp_dir().join("loewner_morph_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let img = synth_halves(8, 4, [10, 200, 30], [250, 0, 128]).unwrap();
        let ppm = dir.join("x.ppm");
        let png = dir.join("x.png");
        write_image(&img, &ppm).unwrap();
        write_image(&img, &png).unwrap();
        assert_eq!(read_image(&ppm).unwrap(), img);
        assert_eq!(read_image(&png).unwrap(), img);
    }

    #[test]
    fn read_missing_file_is_io_error() {
        assert!(matches!(
            read_image("/nonexistent/missing.ppm"),
            Err(ImageIoError::Io { .. })
        ));
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(
            synth_halves(0, 4, [0; 3], [0; 3]),
            Err(ImageIoError::ZeroSize)
        ));
    }

    #[test]
    fn synth_halves_layout() {
        let img = synth_halves(2, 1, [255, 255, 255], [0, 0, 0]).unwrap();
        assert_eq!(img.get(0, 0), [255, 255, 255]);
        assert_eq!(img.get(1, 0), [0, 0, 0]);
        let c = [9, 9, 9];
        let constant = synth_halves(4, 4, c, c).unwrap();
        assert!(constant.data().chunks(3).all(|p| p == c));
    }

    #[test]
    fn apex_matrices() {
        let black = to_matrix_image(&synth_halves(2, 2, [0; 3], [0; 3]).unwrap());
        let white = to_matrix_image(&synth_halves(2, 2, [255; 3], [255; 3]).unwrap());
        for i in 0..4 {
            assert!(
                black.pixels()[i].max_entry_distance(&Sym2::scaled_identity(-SQRT_2 / 2.0))
                    < 1e-12
            );
            assert!(
                white.pixels()[i].max_entry_distance(&Sym2::scaled_identity(SQRT_2 / 2.0))
                    < 1e-12
            );
        }
    }

    #[test]
    fn matrix_roundtrip_greys() {
        let img = RgbImage8::from_fn(16, 16, |x, y| {
            let v = (y * 16 + x) as u8;
            [v, v, v]
        });
        assert_eq!(from_matrix_image(&to_matrix_image(&img)), img);
    }

    #[test]
    fn bundled_image_is_64x64() {
        let img = natural_test_image();
        assert_eq!((img.width(), img.height()), (64, 64));
    }
}

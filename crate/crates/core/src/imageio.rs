//! Grayscale image files (binary/ASCII PGM and 8-bit grayscale PNG) and the
//! corruption primitives used by the attack harnesses.
//!
//! Only 8-bit single-channel data is accepted. Anything else is rejected
//! rather than converted.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageFileFormat {
    PgmBinary,
    PgmAscii,
    PngGray8,
}

impl ImageFileFormat {
    /// Guesses the format from a file extension; `.pgm` means binary PGM.
    pub fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" | "pnm" => Some(ImageFileFormat::PgmBinary),
            "png" => Some(ImageFileFormat::PngGray8),
            _ => None,
        }
    }
}

impl FromStr for ImageFileFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pgm" | "pgm-binary" => Ok(ImageFileFormat::PgmBinary),
            "pgm-ascii" => Ok(ImageFileFormat::PgmAscii),
            "png" => Ok(ImageFileFormat::PngGray8),
            other => Err(format!(
                "unknown image format '{other}' (expected pgm, pgm-ascii or png)"
            )),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a PGM (P5 or P2) or PNG file, detected from its leading bytes.
pub fn read_image(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        decode_pgm(&bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::Unsupported(format!(
            "netpbm variant P{} (only grayscale P2/P5 is supported)",
            bytes[1] as char
        )))
    } else {
        Err(Error::Malformed("unrecognized file signature".into()))
    }
}

pub fn write_image(image: &GrayImage, path: &Path, format: ImageFileFormat) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        ImageFileFormat::PgmBinary => {
            out.write_all(&encode_pgm_binary(image))
                .map_err(io_err(path))?;
        }
        ImageFileFormat::PgmAscii => {
            out.write_all(encode_pgm_ascii(image).as_bytes())
                .map_err(io_err(path))?;
        }
        ImageFileFormat::PngGray8 => {
            let mut enc = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc
                .write_header()
                .map_err(|e| Error::Malformed(format!("png encoder: {e}")))?;
            writer
                .write_image_data(image.pixels())
                .map_err(|e| Error::Malformed(format!("png encoder: {e}")))?;
            writer
                .finish()
                .map_err(|e| Error::Malformed(format!("png encoder: {e}")))?;
        }
    }
    out.flush().map_err(io_err(path))
}

/// `P5\n<w> <h>\n255\n` followed by the raw row-major bytes.
pub fn encode_pgm_binary(image: &GrayImage) -> Vec<u8> {
    let mut buf = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    buf.extend_from_slice(image.pixels());
    buf
}

pub fn encode_pgm_ascii(image: &GrayImage) -> String {
    let mut s = format!("P2\n{} {}\n255\n", image.width(), image.height());
    for row in image.pixels().chunks(image.width()) {
        let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Malformed(format!("missing {what} in PGM header")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("unreadable {what} in PGM header")))
    }
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let binary = match data.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(Error::Malformed("not a PGM file".into())),
    };
    let mut cur = HeaderCursor { data, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Unsupported(format!(
            "PGM maxval {maxval} (only 8-bit maxval 255 is supported)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Malformed(format!("zero dimension {width}x{height}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Malformed("dimensions overflow".into()))?;
    let pixels = if binary {
        // exactly one whitespace byte separates maxval from the raster
        match data.get(cur.pos) {
            Some(c) if c.is_ascii_whitespace() => {}
            _ => return Err(Error::Malformed("missing separator after maxval".into())),
        }
        let raster = &data[cur.pos + 1..];
        if raster.len() < count {
            return Err(Error::Malformed(format!(
                "pixel payload truncated: expected {count} bytes, found {}",
                raster.len()
            )));
        }
        raster[..count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v = cur.number("pixel value").map_err(|_| {
                Error::Malformed(format!(
                    "pixel payload truncated after {} values",
                    pixels.len()
                ))
            })?;
            if v > 255 {
                return Err(Error::Malformed(format!("pixel value {v} exceeds maxval")));
            }
            pixels.push(v as u8);
        }
        pixels
    };
    GrayImage::new(height, width, pixels)
}

pub fn decode_png(data: &[u8]) -> Result<GrayImage> {
    let mut decoder = png::Decoder::new(BufReader::new(std::io::Cursor::new(data)));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Unsupported(format!(
            "png {:?} at {:?} bits (only 8-bit grayscale is supported)",
            info.color_type, info.bit_depth
        )));
    }
    if info.trns.is_some() {
        return Err(Error::Unsupported("png with transparency".into()));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Malformed("png too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;
    buf.truncate(frame.buffer_size());
    if frame.line_size != width {
        return Err(Error::Malformed("unexpected png row stride".into()));
    }
    GrayImage::new(height, width, buf)
}

/// Fraction of an image removed by the cropping attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CropRatio {
    Sixteenth,
    Quarter,
    Half,
}

impl CropRatio {
    pub const ALL: [CropRatio; 3] = [CropRatio::Sixteenth, CropRatio::Quarter, CropRatio::Half];

    pub fn nominal(self) -> f64 {
        match self {
            CropRatio::Sixteenth => 1.0 / 16.0,
            CropRatio::Quarter => 0.25,
            CropRatio::Half => 0.5,
        }
    }

    /// `(rows, cols)` of the zeroed top-left rectangle.
    pub fn region(self, height: usize, width: usize) -> (usize, usize) {
        match self {
            CropRatio::Sixteenth => (height / 4, width / 4),
            CropRatio::Quarter => (height / 2, width / 2),
            CropRatio::Half => (height / 2, width),
        }
    }
}

impl fmt::Display for CropRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CropRatio::Sixteenth => "1/16",
            CropRatio::Quarter => "1/4",
            CropRatio::Half => "1/2",
        })
    }
}

impl FromStr for CropRatio {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "1/16" => Ok(CropRatio::Sixteenth),
            "1/4" => Ok(CropRatio::Quarter),
            "1/2" => Ok(CropRatio::Half),
            other => Err(format!(
                "unknown crop ratio '{other}' (expected 1/16, 1/4 or 1/2)"
            )),
        }
    }
}

/// Zeroes the top-left crop rectangle. Ratio 1/2 removes the top half; the
/// smaller ratios remove a square block of quarter or half side length.
pub fn crop_region(image: &GrayImage, ratio: CropRatio) -> Result<GrayImage> {
    let (rows, cols) = ratio.region(image.height(), image.width());
    if rows == 0 || cols == 0 {
        return Err(Error::TooSmall(format!(
            "{}x{} image has no {ratio} crop region",
            image.height(),
            image.width()
        )));
    }
    let mut out = image.clone();
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, 0);
        }
    }
    Ok(out)
}

/// Salt-and-pepper noise: every pixel is picked independently with
/// probability `density` and forced to 0 or 255 with equal odds. Uses a
/// ChaCha8 stream seeded from `seed`.
pub fn add_salt_pepper(image: &GrayImage, density: f64, seed: u64) -> Result<GrayImage> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::domain(format!(
            "noise density {density} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = image.clone();
    for p in out.pixels_mut() {
        if rng.gen::<f64>() < density {
            *p = if rng.gen::<bool>() { 255 } else { 0 };
        }
    }
    Ok(out)
}

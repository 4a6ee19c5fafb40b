use crate::error::{Error, Result};

/// An 8-bit grayscale image stored row-major, top row first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::domain(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        let expected = height
            .checked_mul(width)
            .ok_or_else(|| Error::domain("image dimensions overflow"))?;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(GrayImage {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Result<Self> {
        GrayImage::new(height, width, vec![value; height * width])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        GrayImage::new(height, width, pixels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(height, width)`
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    /// Same dimensions, new pixel buffer.
    pub(crate) fn with_pixels(&self, pixels: Vec<u8>) -> GrayImage {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        GrayImage {
            height: self.height,
            width: self.width,
            pixels,
        }
    }

    pub(crate) fn ensure_same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            })
        }
    }
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pixels.len() <= 64 {
            let rows: Vec<&[u8]> = self.pixels.chunks(self.width).collect();
            f.debug_struct("GrayImage")
                .field("height", &self.height)
                .field("width", &self.width)
                .field("rows", &rows)
                .finish()
        } else {
            f.debug_struct("GrayImage")
                .field("height", &self.height)
                .field("width", &self.width)
                .finish_non_exhaustive()
        }
    }
}

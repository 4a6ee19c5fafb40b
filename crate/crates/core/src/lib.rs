//! Grayscale image encryption driven by the chaotic log-map
//! `v' = mod((u + e) ln v, 1)`.
//!
//! A 512-bit public key and a 512-bit secret key are XORed into a main key,
//! which the key schedule compresses into four (initial value, control
//! parameter) pairs. Each pair seeds one log-map sequence, and the sequences
//! drive four stages applied in order: permutation, DNA coding, diffusion and
//! bit reversion. Decryption regenerates the same sequences and undoes the
//! stages in reverse.
//!
//! ```
//! use logmap_cipher::{cipher, key, GrayImage};
//!
//! let image = GrayImage::from_fn(8, 8, |i, j| (i * 8 + j) as u8).unwrap();
//! let public = key::parse_key(&"01".repeat(256), key::KeyFormat::Binary).unwrap();
//! let secret = key::parse_key(&"0011".repeat(128), key::KeyFormat::Binary).unwrap();
//! let params = key::derive_params_from_keys(&public, &secret);
//!
//! let c = cipher::encrypt_image(&image, &params).unwrap();
//! assert_eq!(cipher::decrypt(&c, &params).unwrap(), image);
//! ```
//!
//! The [`analysis`] module carries the statistical battery used to judge
//! ciphertexts (entropy, histogram variance, chi-square, adjacent-pixel
//! correlation, NPCR/UACI, PSNR) and the key-sensitivity, differential,
//! cropping and noise harnesses.

pub mod analysis;
pub mod chaos;
pub mod cipher;
pub mod dna;
pub mod error;
pub mod image;
pub mod imageio;
pub mod key;
pub mod report;

pub use error::{Error, Result};
pub use image::GrayImage;
pub use key::{BitKey512, DerivedParams};
pub use report::AnalysisReport;

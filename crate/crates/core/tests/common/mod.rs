//! Shared fixtures for the integration suites.
#![allow(dead_code)]

pub mod oracle;

use logmap_cipher::key::{random_public_key, BitKey512};
use logmap_cipher::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};

/// Tonal mean and standard deviation of the standard 512x512 Lena portrait.
pub const PORTRAIT_MEAN: f64 = 124.0;
pub const PORTRAIT_STD: f64 = 47.9;

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (
        mean,
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt(),
    )
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Deterministic stand-in for a natural photograph: multi-octave value noise
/// (large smooth regions down to fine texture) plus a few hard-edged
/// elliptical objects and fine grain, rescaled to portrait-like tonal statistics.
pub fn natural_image(height: usize, width: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = vec![0.0f64; height * width];

    let mut amplitude = 1.0;
    let mut cell = 128usize;
    while cell >= 2 {
        let gh = height / cell + 2;
        let gw = width / cell + 2;
        let lattice: Vec<f64> = (0..gh * gw).map(|_| rng.gen::<f64>() - 0.5).collect();
        for i in 0..height {
            let (ci, ti) = (i / cell, smoothstep((i % cell) as f64 / cell as f64));
            for j in 0..width {
                let (cj, tj) = (j / cell, smoothstep((j % cell) as f64 / cell as f64));
                let at = |a: usize, b: usize| lattice[a * gw + b];
                let top = at(ci, cj) * (1.0 - tj) + at(ci, cj + 1) * tj;
                let bottom = at(ci + 1, cj) * (1.0 - tj) + at(ci + 1, cj + 1) * tj;
                field[i * width + j] += amplitude * (top * (1.0 - ti) + bottom * ti);
            }
        }
        amplitude *= 0.72;
        cell /= 2;
    }

    for _ in 0..12 {
        let ci = rng.gen_range(0.0..height as f64);
        let cj = rng.gen_range(0.0..width as f64);
        let ri = rng.gen_range(0.05..0.25) * height as f64;
        let rj = rng.gen_range(0.05..0.25) * width as f64;
        let lift = rng.gen_range(-0.6..0.6);
        for i in 0..height {
            for j in 0..width {
                let di = (i as f64 - ci) / ri;
                let dj = (j as f64 - cj) / rj;
                if di * di + dj * dj < 1.0 {
                    field[i * width + j] += lift;
                }
            }
        }
    }

    // sensor grain carrying about 3% of the signal variance
    let grain = (12.0 * 0.03 * moments(&field).1.powi(2)).sqrt();
    for x in field.iter_mut() {
        *x += grain * (rng.gen::<f64>() - 0.5);
    }

    let (mean, std) = moments(&field);
    let pixels = field
        .iter()
        .map(|x| {
            (PORTRAIT_MEAN + PORTRAIT_STD * (x - mean) / std)
                .round()
                .clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(height, width, pixels).unwrap()
}

pub fn random_image(height: usize, width: usize, rng: &mut impl Rng) -> GrayImage {
    let mut px = vec![0u8; height * width];
    rng.fill(px.as_mut_slice());
    GrayImage::new(height, width, px).unwrap()
}

/// Reproducible (public, secret) key pairs.
pub fn key_pairs(count: usize, seed: u64) -> Vec<(BitKey512, BitKey512)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let public = random_public_key(&mut rng).unwrap();
            let secret = random_public_key(&mut rng).unwrap();
            (public, secret)
        })
        .collect()
}

//! Statistical tests and attack simulations for ciphertext images.
//!
//! Every randomized routine takes an explicit seed and draws from ChaCha8,
//! so a report is reproducible from its inputs and seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cipher::{decrypt, encrypt_image};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::imageio::{add_salt_pepper, crop_region, CropRatio};
use crate::key::{derive_params_from_keys, random_public_key, BitKey512, DerivedParams};
use crate::report::{self, AnalysisReport};

/// Name of the generator recorded in seeded reports.
pub const RNG_NAME: &str = "ChaCha8";

/// Default number of sampled pixel pairs for correlation.
pub const DEFAULT_CORRELATION_SAMPLES: usize = 3000;

pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
    total: u64,
}

impl Histogram {
    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Builds a histogram directly from bin counts.
    pub fn from_counts(counts: [u64; 256]) -> Result<Self> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::Degenerate("histogram with no samples".into()));
        }
        Ok(Histogram { counts, total })
    }
}

pub fn histogram(image: &GrayImage) -> Histogram {
    let mut counts = [0u64; 256];
    for &p in image.pixels() {
        counts[p as usize] += 1;
    }
    Histogram {
        counts,
        total: image.len() as u64,
    }
}

/// `(1/256^2) * sum_i sum_j (x_i - x_j)^2 / 2` over the bin counts, which is
/// the population variance of the counts.
pub fn histogram_variance(h: &Histogram) -> f64 {
    let n = 256.0;
    let mean = h.total as f64 / n;
    // sum_i sum_j (x_i - x_j)^2 / 2 = n * sum_i (x_i - mean)^2
    let ss: f64 = h.counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum();
    ss / n
}

/// Chi-square statistic against a uniform 256-bin histogram.
pub fn chi_square(h: &Histogram) -> f64 {
    let expected = h.total as f64 / 256.0;
    h.counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

/// Shannon entropy of the pixel distribution in bits.
pub fn entropy(image: &GrayImage) -> f64 {
    entropy_of(&histogram(image))
}

pub fn entropy_of(h: &Histogram) -> f64 {
    let total = h.total as f64;
    h.counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    /// Neighbor at (+1 row, +1 column).
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
    ];

    fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }

    pub fn metric_name(self) -> &'static str {
        match self {
            Direction::Horizontal => report::CORR_H,
            Direction::Vertical => report::CORR_V,
            Direction::Diagonal => report::CORR_D,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "horizontal" | "h" => Ok(Direction::Horizontal),
            "vertical" | "v" => Ok(Direction::Vertical),
            "diagonal" | "d" => Ok(Direction::Diagonal),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

/// Adjacent-pixel pairs at `samples` uniformly drawn positions that have a
/// neighbor in `direction`.
pub fn sample_pairs(
    image: &GrayImage,
    direction: Direction,
    samples: usize,
    seed: u64,
) -> Result<Vec<(u8, u8)>> {
    let (di, dj) = direction.offset();
    let rows = image.height().saturating_sub(di);
    let cols = image.width().saturating_sub(dj);
    if rows == 0 || cols == 0 {
        return Err(Error::TooSmall(format!(
            "{}x{} image has no {direction} neighbors",
            image.height(),
            image.width()
        )));
    }
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..samples)
        .map(|_| {
            let i = rng.gen_range(0..rows);
            let j = rng.gen_range(0..cols);
            (image.get(i, j), image.get(i + di, j + dj))
        })
        .collect())
}

/// Pearson correlation with population moments.
pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let n = pairs.len() as f64;
    let ex = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let ey = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut cov, mut dx, mut dy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        cov += (x - ex) * (y - ey);
        dx += (x - ex).powi(2);
        dy += (y - ey).powi(2);
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::Degenerate(
            "zero variance in sampled pixels; correlation undefined".into(),
        ));
    }
    Ok(cov / (dx.sqrt() * dy.sqrt()))
}

/// Correlation of adjacent pixels over `samples` seeded positions.
pub fn correlation(
    image: &GrayImage,
    direction: Direction,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = sample_pairs(image, direction, samples, seed)?
        .into_iter()
        .map(|(x, y)| (f64::from(x), f64::from(y)))
        .collect();
    pearson(&pairs)
}

/// Mean of `runs` sampled correlations; run `t` draws its positions with
/// seed `seed + t`.
pub fn correlation_mean(
    image: &GrayImage,
    direction: Direction,
    samples: usize,
    runs: u64,
    seed: u64,
) -> Result<f64> {
    if runs == 0 {
        return Err(Error::domain("runs must be positive"));
    }
    let mut total = 0.0;
    for t in 0..runs {
        total += correlation(image, direction, samples, seed.wrapping_add(t))?;
    }
    Ok(total / runs as f64)
}

/// NPCR and UACI in percent.
pub fn npcr_uaci(c1: &GrayImage, c2: &GrayImage) -> Result<(f64, f64)> {
    c1.ensure_same_dims(c2)?;
    let n = c1.len() as f64;
    let (mut changed, mut intensity) = (0u64, 0u64);
    for (&a, &b) in c1.pixels().iter().zip(c2.pixels()) {
        if a != b {
            changed += 1;
        }
        intensity += u64::from(a.abs_diff(b));
    }
    Ok((
        100.0 * changed as f64 / n,
        100.0 * intensity as f64 / (255.0 * n),
    ))
}

/// Percentage of pixel positions where the images differ.
pub fn diff_percent(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    npcr_uaci(a, b).map(|(npcr, _)| npcr)
}

pub fn mse(reference: &GrayImage, candidate: &GrayImage) -> Result<f64> {
    reference.ensure_same_dims(candidate)?;
    let sum: u64 = reference
        .pixels()
        .iter()
        .zip(candidate.pixels())
        .map(|(&a, &b)| u64::from(a.abs_diff(b)).pow(2))
        .sum();
    Ok(sum as f64 / reference.len() as f64)
}

/// `10 log10(255^2 / MSE)`; positive infinity for identical images.
pub fn psnr(reference: &GrayImage, candidate: &GrayImage) -> Result<f64> {
    let e = mse(reference, candidate)?;
    if e == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (255.0f64 * 255.0 / e).log10())
    }
}

/// Entropy, histogram statistics and three-direction correlation of a single
/// image.
pub fn statistical_report(image: &GrayImage, samples: usize, seed: u64) -> Result<AnalysisReport> {
    let h = histogram(image);
    let mut r = AnalysisReport::new("statistics").with_seed(seed);
    r.set(report::ENTROPY, entropy_of(&h))
        .set(report::VARIANCE, histogram_variance(&h))
        .set(report::CHI_SQUARE, chi_square(&h));
    for d in Direction::ALL {
        r.set(d.metric_name(), correlation(image, d, samples, seed)?);
    }
    r.label("rng", RNG_NAME);
    Ok(r)
}

fn flip_random_bit(image: &GrayImage, rng: &mut ChaCha8Rng) -> GrayImage {
    let mut out = image.clone();
    let idx = rng.gen_range(0..image.len());
    let bit = rng.gen_range(0..8u32);
    out.pixels_mut()[idx] ^= 1 << bit;
    out
}

/// Differential attack with key material held fixed: each trial flips one
/// random bit of one random pixel and compares the two ciphertexts.
///
/// The stages act pixel-wise apart from the position scramble, so under fixed
/// parameters exactly one ciphertext pixel changes and NPCR is `100 / (m n)`.
pub fn differential_attack_test(
    image: &GrayImage,
    params: &DerivedParams,
    trials: u64,
    seed: u64,
) -> Result<AnalysisReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let base = encrypt_image(image, params)?;
    let (mut npcr, mut uaci) = (0.0, 0.0);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let modified = flip_random_bit(image, &mut rng);
        let (n, u) = npcr_uaci(&base, &encrypt_image(&modified, params)?)?;
        npcr += n;
        uaci += u;
    }
    let mut r = AnalysisReport::new("differential")
        .with_seed(seed)
        .with_trials(trials);
    r.set(report::NPCR, npcr / trials as f64)
        .set(report::UACI, uaci / trials as f64);
    r.label("rng", RNG_NAME).label("key_policy", "fixed");
    Ok(r)
}

/// Differential attack where each plaintext gets its own public key, as when
/// the public key is generated from the image being encrypted. The secret key
/// stays fixed; both public keys are drawn from the trial's seeded stream.
pub fn differential_attack_test_rekeyed(
    image: &GrayImage,
    secret: &BitKey512,
    trials: u64,
    seed: u64,
) -> Result<AnalysisReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let (mut npcr, mut uaci) = (0.0, 0.0);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let modified = flip_random_bit(image, &mut rng);
        let pk_original = random_public_key(&mut rng)?;
        let pk_modified = random_public_key(&mut rng)?;
        let c1 = encrypt_image(image, &derive_params_from_keys(&pk_original, secret))?;
        let c2 = encrypt_image(&modified, &derive_params_from_keys(&pk_modified, secret))?;
        let (n, u) = npcr_uaci(&c1, &c2)?;
        npcr += n;
        uaci += u;
    }
    let mut r = AnalysisReport::new("differential")
        .with_seed(seed)
        .with_trials(trials);
    r.set(report::NPCR, npcr / trials as f64)
        .set(report::UACI, uaci / trials as f64);
    r.label("rng", RNG_NAME)
        .label("key_policy", "per-plaintext public key");
    Ok(r)
}

/// Encrypts under the original secret key and under each variant with one
/// bit flipped (public key fixed), reporting the percentage of differing
/// ciphertext pixels per variant (`diff_percent_bit_<pos>`) and their mean
/// (`diff_percent`). Also reports how much of the plaintext survives
/// decryption of the original ciphertext under each wrong key
/// (`decrypt_diff_percent`, the mean difference from the plaintext).
pub fn key_sensitivity_test(
    image: &GrayImage,
    secret: &BitKey512,
    public: &BitKey512,
    flip_positions: &[usize],
) -> Result<AnalysisReport> {
    let params = derive_params_from_keys(public, secret);
    let base = encrypt_image(image, &params)?;
    let mut r = AnalysisReport::new("key_sensitivity");
    let (mut total, mut total_dec) = (0.0, 0.0);
    for &pos in flip_positions {
        let variant = derive_params_from_keys(public, &secret.flip_bit(pos)?);
        let d = diff_percent(&base, &encrypt_image(image, &variant)?)?;
        total += d;
        total_dec += diff_percent(image, &decrypt(&base, &variant)?)?;
        r.set(format!("{}_bit_{pos}", report::DIFF_PERCENT), d);
    }
    if !flip_positions.is_empty() {
        let n = flip_positions.len() as f64;
        r.set(report::DIFF_PERCENT, total / n)
            .set("decrypt_diff_percent", total_dec / n);
    }
    Ok(r)
}

/// Encrypt, zero the crop region of the ciphertext, decrypt, and compare with
/// the plaintext.
pub fn cropping_attack_test(
    image: &GrayImage,
    params: &DerivedParams,
    ratio: CropRatio,
) -> Result<AnalysisReport> {
    let cipher = encrypt_image(image, params)?;
    let cropped = crop_region(&cipher, ratio)?;
    let recovered = decrypt(&cropped, params)?;
    let (rows, cols) = ratio.region(image.height(), image.width());
    let mut r = AnalysisReport::new("crop");
    r.set(report::PSNR_DB, psnr(image, &recovered)?)
        .set("crop_fraction", (rows * cols) as f64 / image.len() as f64);
    r.label("ratio", ratio.to_string());
    Ok(r)
}

/// Encrypt, add seeded salt-and-pepper noise to the ciphertext, decrypt, and
/// compare with the plaintext.
pub fn noise_attack_test(
    image: &GrayImage,
    params: &DerivedParams,
    density: f64,
    seed: u64,
) -> Result<AnalysisReport> {
    let cipher = encrypt_image(image, params)?;
    let noisy = add_salt_pepper(&cipher, density, seed)?;
    let recovered = decrypt(&noisy, params)?;
    let mut r = AnalysisReport::new("noise").with_seed(seed);
    r.set(report::PSNR_DB, psnr(image, &recovered)?)
        .set("density", density)
        .set("corrupted_fraction", diff_percent(&cipher, &noisy)? / 100.0);
    r.label("rng", RNG_NAME);
    Ok(r)
}

//! The four cipher stages and the encrypt/decrypt pipelines.
//!
//! Every stage draws its own log-map sequence of length `m * n` from one
//! (initial value, control parameter) pair:
//!
//! 1. permutation: pixels move to the rank of their sequence value,
//! 2. DNA coding: rule `1 + floor(8 x)` rewrites each pixel,
//! 3. diffusion: XOR with `floor(256 x)`,
//! 4. bit reversion: XOR with the bit-reversed `floor(256 x)`.
//!
//! Sequence index `r` corresponds to pixel `(i, j)` with `r = n i + j`
//! (row-major) throughout.

use crate::chaos::{generate_sequence, ChaoticSequence, MapKind};
use crate::dna::DnaRule;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::key::DerivedParams;

/// Intermediate images of one encryption.
#[derive(Debug, Clone, PartialEq)]
pub struct StageBundle {
    pub permuted: GrayImage,
    pub dna_encoded: GrayImage,
    pub diffused: GrayImage,
    pub cipher: GrayImage,
}

fn check_len(image: &GrayImage, seq: &[f64]) -> Result<()> {
    if seq.len() == image.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: image.len(),
            actual: seq.len(),
        })
    }
}

/// Indices that stably sort `seq` ascending.
pub fn sort_order(seq: &[f64]) -> Vec<usize> {
    // Sorting (value, index) pairs keeps equal values in input order and is
    // much more cache friendly than sorting indices through a lookup.
    let mut keyed: Vec<(f64, usize)> = seq.iter().copied().zip(0..).collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Byte stream `floor(256 x)`.
pub fn keystream_bytes(seq: &[f64]) -> impl Iterator<Item = u8> + '_ {
    seq.iter()
        .map(|&x| (256.0 * x).floor().clamp(0.0, 255.0) as u8)
}

pub fn permute(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    permute_values(image, seq.values())
}

/// Output position `k` receives the input pixel whose sequence value ranks
/// `k`-th (0-based) in ascending order.
pub fn permute_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let src = image.pixels();
    let out = sort_order(seq).into_iter().map(|p| src[p]).collect();
    Ok(image.with_pixels(out))
}

pub fn inverse_permute(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    inverse_permute_values(image, seq.values())
}

pub fn inverse_permute_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let src = image.pixels();
    let mut out = vec![0u8; src.len()];
    for (k, p) in sort_order(seq).into_iter().enumerate() {
        out[p] = src[k];
    }
    Ok(image.with_pixels(out))
}

pub fn dna_encode_image(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    dna_encode_values(image, seq.values())
}

pub fn dna_encode_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let out = image
        .pixels()
        .iter()
        .zip(seq)
        .map(|(&p, &x)| DnaRule::from_chaotic(x).encode(p))
        .collect();
    Ok(image.with_pixels(out))
}

pub fn dna_decode_image(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    dna_decode_values(image, seq.values())
}

pub fn dna_decode_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let out = image
        .pixels()
        .iter()
        .zip(seq)
        .map(|(&p, &x)| DnaRule::from_chaotic(x).decode(p))
        .collect();
    Ok(image.with_pixels(out))
}

/// XOR with `floor(256 x)`. Self-inverse.
pub fn diffuse(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    diffuse_values(image, seq.values())
}

pub fn diffuse_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let out = image
        .pixels()
        .iter()
        .zip(keystream_bytes(seq))
        .map(|(&p, k)| p ^ k)
        .collect();
    Ok(image.with_pixels(out))
}

/// The 8-bit string of `byte` reversed end to end.
pub fn reverse_bits(byte: u8) -> u8 {
    byte.reverse_bits()
}

/// XOR with the bit-reversed `floor(256 x)`. Self-inverse.
pub fn bit_revert(image: &GrayImage, seq: &ChaoticSequence) -> Result<GrayImage> {
    bit_revert_values(image, seq.values())
}

pub fn bit_revert_values(image: &GrayImage, seq: &[f64]) -> Result<GrayImage> {
    check_len(image, seq)?;
    let out = image
        .pixels()
        .iter()
        .zip(keystream_bytes(seq))
        .map(|(&p, k)| p ^ reverse_bits(k))
        .collect();
    Ok(image.with_pixels(out))
}

/// The four stage sequences for an image of `len` pixels.
pub fn stage_sequences(params: &DerivedParams, len: usize) -> Result<[ChaoticSequence; 4]> {
    let gen = |i: usize| generate_sequence(MapKind::LogMap, params.stage(i), len, 0);
    Ok([gen(0)?, gen(1)?, gen(2)?, gen(3)?])
}

/// Encrypts `image`; the intermediate images are returned when
/// `capture_stages` is set.
pub fn encrypt(
    image: &GrayImage,
    params: &DerivedParams,
    capture_stages: bool,
) -> Result<(GrayImage, Option<StageBundle>)> {
    let [x1, x2, x3, x4] = stage_sequences(params, image.len())?;
    let permuted = permute(image, &x1)?;
    let dna_encoded = dna_encode_image(&permuted, &x2)?;
    let diffused = diffuse(&dna_encoded, &x3)?;
    let cipher = bit_revert(&diffused, &x4)?;
    let stages = capture_stages.then(|| StageBundle {
        permuted,
        dna_encoded,
        diffused,
        cipher: cipher.clone(),
    });
    Ok((cipher, stages))
}

pub fn encrypt_image(image: &GrayImage, params: &DerivedParams) -> Result<GrayImage> {
    encrypt(image, params, false).map(|(c, _)| c)
}

pub fn decrypt(cipher: &GrayImage, params: &DerivedParams) -> Result<GrayImage> {
    let [x1, x2, x3, x4] = stage_sequences(params, cipher.len())?;
    let diffused = bit_revert(cipher, &x4)?;
    let dna_encoded = diffuse(&diffused, &x3)?;
    let permuted = dna_decode_image(&dna_encoded, &x2)?;
    inverse_permute(&permuted, &x1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::DerivedParams;
    use proptest::prelude::*;

    fn img(h: usize, w: usize, px: &[u8]) -> GrayImage {
        GrayImage::new(h, w, px.to_vec()).unwrap()
    }

    #[test]
    fn permute_worked_example() {
        let a = img(2, 2, &[1, 2, 3, 4]);
        let seq = [0.9, 0.1, 0.4, 0.2];
        let p = permute_values(&a, &seq).unwrap();
        assert_eq!(p.pixels(), &[2, 4, 3, 1]);
        assert_eq!(inverse_permute_values(&p, &seq).unwrap(), a);
    }

    #[test]
    fn permute_trivial_cases() {
        let c = GrayImage::filled(3, 3, 77).unwrap();
        let seq = [0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6];
        assert_eq!(permute_values(&c, &seq).unwrap(), c);
        assert_eq!(inverse_permute_values(&c, &seq).unwrap(), c);

        let a = GrayImage::from_fn(3, 3, |i, j| (i * 10 + j) as u8).unwrap();
        let inc: Vec<f64> = (0..9).map(|k| k as f64 / 10.0).collect();
        assert_eq!(permute_values(&a, &inc).unwrap(), a);
    }

    #[test]
    fn ties_keep_input_order() {
        let a = img(1, 4, &[1, 2, 3, 4]);
        let seq = [0.5, 0.5, 0.1, 0.5];
        let p = permute_values(&a, &seq).unwrap();
        assert_eq!(p.pixels(), &[3, 1, 2, 4]);
        assert_eq!(inverse_permute_values(&p, &seq).unwrap(), a);
    }

    #[test]
    fn length_mismatch() {
        let a = img(2, 2, &[1, 2, 3, 4]);
        assert!(matches!(
            permute_values(&a, &[0.1, 0.2]),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 2
            })
        ));
        assert!(inverse_permute_values(&a, &[0.1]).is_err());
        assert!(dna_encode_values(&a, &[0.1]).is_err());
        assert!(dna_decode_values(&a, &[0.1]).is_err());
        assert!(diffuse_values(&a, &[0.1]).is_err());
        assert!(bit_revert_values(&a, &[0.1]).is_err());
    }

    #[test]
    fn dna_stage_examples() {
        let a = img(1, 3, &[167, 0, 200]);
        assert_eq!(dna_encode_values(&a, &[0.0, 0.05, 0.12]).unwrap(), a);
        assert_eq!(
            dna_encode_values(&img(1, 1, &[167]), &[0.5])
                .unwrap()
                .pixels(),
            &[14]
        );
    }

    #[test]
    fn dna_stage_matches_per_pixel_rules() {
        let a = img(1, 4, &[167, 3, 250, 91]);
        let seqs: [[f64; 4]; 2] = [[0.01, 0.13, 0.26, 0.38], [0.51, 0.63, 0.76, 0.99]];
        for seq in seqs {
            let out = dna_encode_values(&a, &seq).unwrap();
            for (r, x) in seq.iter().enumerate() {
                let rule = DnaRule::new(1 + (x * 8.0) as u8).unwrap();
                assert_eq!(out.pixels()[r], rule.encode(a.pixels()[r]));
            }
            assert_eq!(dna_decode_values(&out, &seq).unwrap(), a);
        }
    }

    #[test]
    fn diffusion_examples() {
        let a = img(1, 2, &[167, 5]);
        assert_eq!(diffuse_values(&a, &[0.0, 0.0]).unwrap(), a);
        let d = diffuse_values(&img(1, 1, &[167]), &[89.0 / 256.0]).unwrap();
        assert_eq!(d.pixels(), &[254]);
    }

    #[test]
    fn reverse_bits_examples() {
        assert_eq!(reverse_bits(1), 128);
        assert_eq!(reverse_bits(255), 255);
        assert_eq!(reverse_bits(167), 229);
    }

    #[test]
    fn bit_revert_examples() {
        let a = img(1, 2, &[167, 5]);
        assert_eq!(bit_revert_values(&a, &[0.0, 0.0]).unwrap(), a);
        let b = bit_revert_values(&img(1, 1, &[0]), &[1.0 / 256.0]).unwrap();
        assert_eq!(b.pixels(), &[128]);
    }

    #[test]
    fn single_pixel_encrypt_is_deterministic() {
        let p = DerivedParams::from_schedule_bytes([210, 37, 163, 66, 189, 110, 87, 138]);
        let a = img(1, 1, &[99]);
        let (c1, stages) = encrypt(&a, &p, true).unwrap();
        let (c2, _) = encrypt(&a, &p, false).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(stages.unwrap().permuted, a);
        assert_eq!(decrypt(&c1, &p).unwrap(), a);
    }

    #[test]
    fn stage_bundle_is_consistent() {
        let p = DerivedParams::from_schedule_bytes([1, 2, 3, 4, 5, 6, 7, 8]);
        let a = GrayImage::from_fn(5, 7, |i, j| (i * 31 + j * 7) as u8).unwrap();
        let (c, stages) = encrypt(&a, &p, true).unwrap();
        let s = stages.unwrap();
        assert_eq!(s.cipher, c);
        let mut hist_a = [0u32; 256];
        let mut hist_p = [0u32; 256];
        a.pixels().iter().for_each(|&v| hist_a[v as usize] += 1);
        s.permuted
            .pixels()
            .iter()
            .for_each(|&v| hist_p[v as usize] += 1);
        assert_eq!(hist_a, hist_p);
    }

    fn arb_image() -> impl Strategy<Value = GrayImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(h, w)| {
            proptest::collection::vec(any::<u8>(), h * w)
                .prop_map(move |px| GrayImage::new(h, w, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn round_trip(a in arb_image(), s in any::<[u8; 8]>()) {
            let p = DerivedParams::from_schedule_bytes(s);
            let c = encrypt_image(&a, &p).unwrap();
            prop_assert_eq!(decrypt(&c, &p).unwrap(), a);
        }

        #[test]
        fn stage_inverses(
            (a, seq) in arb_image().prop_flat_map(|a| {
                let n = a.len();
                (Just(a), proptest::collection::vec(0.0f64..1.0, n))
            })
        ) {
            let p = permute_values(&a, &seq).unwrap();
            prop_assert_eq!(inverse_permute_values(&p, &seq).unwrap(), a.clone());
            let d = diffuse_values(&a, &seq).unwrap();
            prop_assert_eq!(diffuse_values(&d, &seq).unwrap(), a.clone());
            let b = bit_revert_values(&a, &seq).unwrap();
            prop_assert_eq!(bit_revert_values(&b, &seq).unwrap(), a.clone());
            let e = dna_encode_values(&a, &seq).unwrap();
            prop_assert_eq!(dna_decode_values(&e, &seq).unwrap(), a);
        }
    }
}

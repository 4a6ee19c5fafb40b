//! Slow, literal re-implementation of the key schedule and the four cipher
//! stages, kept independent of the library's lookup tables and sort.
//! Images are `Vec<Vec<u8>>` indexed `[row][col]`; sequences are indexed
//! with the row-major formula `n * i + j`.
#![allow(clippy::needless_range_loop)]

pub type Matrix = Vec<Vec<u8>>;

const E: f64 = std::f64::consts::E;
const REMAP: f64 = 1e-12;

/// Nucleotides for the groups 00, 01, 10, 11 under each rule.
const RULES: [&str; 8] = [
    "ACGT", "AGCT", "CATG", "GATC", "CTAG", "GTAC", "TCGA", "TGCA",
];

pub fn to_matrix(px: &[u8], m: usize, n: usize) -> Matrix {
    (0..m).map(|i| px[n * i..n * i + n].to_vec()).collect()
}

pub fn flatten(a: &Matrix) -> Vec<u8> {
    a.iter().flatten().copied().collect()
}

pub fn key_bits(bytes: &[u8; 64]) -> String {
    bytes.iter().map(|b| format!("{b:08b}")).collect()
}

/// `(V, U)` from a 512-character bit string.
pub fn schedule(bits: &str) -> ([f64; 4], [f64; 4]) {
    let bits: Vec<u32> = bits.chars().map(|c| c.to_digit(2).unwrap()).collect();
    assert_eq!(bits.len(), 512);
    // E[k][r][c] = bit 64k + 8r + c
    let mut f = [[0u32; 8]; 8];
    for k in 0..8 {
        for r in 0..8 {
            let sum: u32 = (0..8).map(|c| bits[64 * k + 8 * r + c]).sum();
            f[r][k] = sum % 2;
        }
    }
    let weights = [128, 64, 32, 16, 8, 4, 2, 1];
    let s: Vec<u32> = (0..8)
        .map(|k| (0..8).map(|r| weights[r] * f[r][k]).sum())
        .collect();
    let mut v = [0.0; 4];
    let mut u = [0.0; 4];
    for i in 0..4 {
        v[i] = s[i] as f64 / 256.0;
        if v[i] == 0.0 {
            v[i] = REMAP;
        }
        u[i] = s[i + 4] as f64 / 256.0 + (s[i + 4] % 10) as f64;
    }
    (v, u)
}

pub fn log_map(v0: f64, u: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut v = v0;
    for _ in 0..len {
        let y = (u + E) * v.ln();
        v = y - y.floor();
        if v >= 1.0 || v == 0.0 {
            v = REMAP;
        }
        out.push(v);
    }
    out
}

/// Ascending sort by repeated minimum selection; on equal values the lower
/// index is taken first.
fn sorted(x: &[f64]) -> Vec<f64> {
    let mut taken = vec![false; x.len()];
    let mut y = Vec::with_capacity(x.len());
    for _ in 0..x.len() {
        let mut best: Option<usize> = None;
        for p in 0..x.len() {
            if !taken[p] && best.is_none_or(|b| x[p] < x[b]) {
                best = Some(p);
            }
        }
        let b = best.unwrap();
        taken[b] = true;
        y.push(x[b]);
    }
    y
}

/// `a1[k][l] = a[i][j]` where `x[n i + j] = y[n k + l]`, each source used once.
pub fn permute(a: &Matrix, x: &[f64]) -> Matrix {
    let (m, n) = (a.len(), a[0].len());
    let y = sorted(x);
    let mut used = vec![false; m * n];
    let mut out = vec![vec![0u8; n]; m];
    for k in 0..m {
        for l in 0..n {
            'search: for i in 0..m {
                for j in 0..n {
                    if !used[n * i + j] && x[n * i + j] == y[n * k + l] {
                        used[n * i + j] = true;
                        out[k][l] = a[i][j];
                        break 'search;
                    }
                }
            }
        }
    }
    out
}

fn canonical(nucleotide: char) -> &'static str {
    match nucleotide {
        'A' => "00",
        'C' => "01",
        'G' => "10",
        'T' => "11",
        _ => unreachable!(),
    }
}

pub fn dna_encode(value: u8, rule: usize) -> u8 {
    let bits = format!("{value:08b}");
    let table: Vec<char> = RULES[rule - 1].chars().collect();
    let mut out = String::new();
    for g in 0..4 {
        let group = usize::from_str_radix(&bits[2 * g..2 * g + 2], 2).unwrap();
        out.push_str(canonical(table[group]));
    }
    u8::from_str_radix(&out, 2).unwrap()
}

pub fn dna_stage(a: &Matrix, x: &[f64]) -> Matrix {
    let n = a[0].len();
    a.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &p)| dna_encode(p, 1 + (8.0 * x[n * i + j]).floor() as usize))
                .collect()
        })
        .collect()
}

/// Digit-wise sum mod 2 of the two 8-bit binary forms.
pub fn binary_sum(a: u8, b: u8) -> u8 {
    let (sa, sb) = (format!("{a:08b}"), format!("{b:08b}"));
    let digits: String = sa
        .chars()
        .zip(sb.chars())
        .map(|(p, q)| {
            let d = (p.to_digit(2).unwrap() + q.to_digit(2).unwrap()) % 2;
            char::from_digit(d, 2).unwrap()
        })
        .collect();
    u8::from_str_radix(&digits, 2).unwrap()
}

pub fn reversed(byte: u8) -> u8 {
    let s: String = format!("{byte:08b}").chars().rev().collect();
    u8::from_str_radix(&s, 2).unwrap()
}

pub fn diffuse_stage(a: &Matrix, x: &[f64]) -> Matrix {
    let n = a[0].len();
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, p) in row.iter_mut().enumerate() {
            *p = binary_sum(*p, (256.0 * x[n * i + j]).floor() as u8);
        }
    }
    out
}

pub fn bit_revert_stage(a: &Matrix, x: &[f64]) -> Matrix {
    let n = a[0].len();
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, p) in row.iter_mut().enumerate() {
            *p = binary_sum(*p, reversed((256.0 * x[n * i + j]).floor() as u8));
        }
    }
    out
}

/// All four stage outputs for one image and one main key.
pub fn encrypt_stages(a: &Matrix, main_key_bits: &str) -> [Matrix; 4] {
    let (v, u) = schedule(main_key_bits);
    let len = a.len() * a[0].len();
    let x: Vec<Vec<f64>> = (0..4).map(|i| log_map(v[i], u[i], len)).collect();
    let a1 = permute(a, &x[0]);
    let a2 = dna_stage(&a1, &x[1]);
    let a3 = diffuse_stage(&a2, &x[2]);
    let a4 = bit_revert_stage(&a3, &x[3]);
    [a1, a2, a3, a4]
}

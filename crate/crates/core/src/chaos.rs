//! One-dimensional chaotic maps: the logistic map and the log-map
//! `v' = mod((u + e) ln v, 1)`, together with Lyapunov-exponent estimators,
//! orbit generation and bifurcation scans.
//!
//! All arithmetic is `f64`. Orbits are chaotic, so ULP-level differences in
//! `ln` between math libraries grow into completely different sequences;
//! ciphertexts are only reproducible within one build.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler's number, the offset added to the log-map control parameter.
pub const EULER: f64 = std::f64::consts::E;

/// Substitute for an iterate (or derived initial value) that is exactly zero,
/// keeping the state inside the open interval (0, 1).
pub const ZERO_REMAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapKind {
    Logistic,
    LogMap,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Logistic => f.write_str("logistic"),
            MapKind::LogMap => f.write_str("log"),
        }
    }
}

impl MapKind {
    /// Checks `u` against the control-parameter domain of this map.
    pub fn check_control(self, u: f64) -> Result<()> {
        let ok = match self {
            MapKind::Logistic => (0.0..=4.0).contains(&u),
            MapKind::LogMap => u >= 0.0 && u.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "control parameter {u} outside the domain of the {self} map"
            )))
        }
    }

    fn step_unchecked(self, v: f64, u: f64) -> f64 {
        match self {
            MapKind::Logistic => u * v * (1.0 - v),
            MapKind::LogMap => log_map_unchecked(v, u),
        }
    }
}

/// Initial value and control parameter for one orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub v0: f64,
    pub u: f64,
}

impl MapParams {
    pub fn new(v0: f64, u: f64) -> Self {
        MapParams { v0, u }
    }

    pub fn validate(&self, kind: MapKind) -> Result<()> {
        check_state(self.v0)?;
        kind.check_control(self.u)
    }
}

fn check_state(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("state {v} outside (0, 1)")))
    }
}

/// One step of the logistic map `u v (1 - v)`.
pub fn logistic_step(v: f64, u: f64) -> Result<f64> {
    check_state(v)?;
    MapKind::Logistic.check_control(u)?;
    Ok(u * v * (1.0 - v))
}

/// One step of the log-map, `mod((u + e) ln v, 1)` with a floored modulus.
/// An exact zero result is replaced by [`ZERO_REMAP`].
pub fn log_map_step(v: f64, u: f64) -> Result<f64> {
    check_state(v)?;
    MapKind::LogMap.check_control(u)?;
    Ok(log_map_unchecked(v, u))
}

#[inline]
pub(crate) fn log_map_unchecked(v: f64, u: f64) -> f64 {
    let mut r = ((u + EULER) * v.ln()).rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative operands
    if r >= 1.0 {
        r = 0.0;
    }
    if r == 0.0 {
        ZERO_REMAP
    } else {
        r
    }
}

/// A recorded orbit segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticSequence {
    values: Vec<f64>,
    params: MapParams,
    kind: MapKind,
    burn_in: usize,
}

impl ChaoticSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn params(&self) -> MapParams {
        self.params
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Iterates the map `burn_in` times without recording, then records the next
/// `length` iterates. The initial value itself is never emitted.
pub fn generate_sequence(
    kind: MapKind,
    params: MapParams,
    length: usize,
    burn_in: usize,
) -> Result<ChaoticSequence> {
    params.validate(kind)?;
    if length == 0 {
        return Err(Error::domain("sequence length must be positive"));
    }
    let mut v = params.v0;
    for _ in 0..burn_in {
        v = kind.step_unchecked(v, params.u);
    }
    let mut values = Vec::with_capacity(length);
    for _ in 0..length {
        v = kind.step_unchecked(v, params.u);
        values.push(v);
    }
    Ok(ChaoticSequence {
        values,
        params,
        kind,
        burn_in,
    })
}

/// Lyapunov exponent of the logistic map, averaging `ln|u - 2u v_i|` over the
/// `n - 1` orbit points `v_1 = v0, v_2, ..., v_{n-1}`.
///
/// Returns negative infinity if the orbit lands exactly on a superstable
/// point (zero derivative).
pub fn lyapunov_logistic(params: MapParams, n: usize) -> Result<f64> {
    params.validate(MapKind::Logistic)?;
    if n < 2 {
        return Err(Error::domain("need at least two iterations"));
    }
    let u = params.u;
    let mut v = params.v0;
    let mut sum = 0.0;
    for _ in 1..n {
        let d = (u - 2.0 * u * v).abs();
        if d == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        sum += d.ln();
        v = u * v * (1.0 - v);
    }
    Ok(sum / (n - 1) as f64)
}

/// Lyapunov exponent of the log-map, averaging `ln((u + e) / v_i)` over the
/// orbit. Points where `(u + e) ln v_i` is an exact integer sit on a
/// discontinuity of the modulus; they are skipped and not counted.
pub fn lyapunov_logmap(params: MapParams, n: usize) -> Result<f64> {
    params.validate(MapKind::LogMap)?;
    if n < 2 {
        return Err(Error::domain("need at least two iterations"));
    }
    let c = params.u + EULER;
    let mut v = params.v0;
    let mut sum = 0.0;
    let mut counted = 0usize;
    for _ in 1..n {
        let product = c * v.ln();
        if product > product.floor() {
            sum += (c / v).ln();
            counted += 1;
        }
        v = log_map_unchecked(v, params.u);
    }
    if counted == 0 {
        return Err(Error::Degenerate(
            "every orbit point sat on a modulus discontinuity".into(),
        ));
    }
    Ok(sum / counted as f64)
}

/// Lyapunov exponent for either map.
pub fn lyapunov(kind: MapKind, params: MapParams, n: usize) -> Result<f64> {
    match kind {
        MapKind::Logistic => lyapunov_logistic(params, n),
        MapKind::LogMap => lyapunov_logmap(params, n),
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive. A single step
/// yields `min`.
pub fn control_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::domain("grid needs at least one step"));
    }
    if !(min.is_finite() && max.is_finite()) || min > max || (steps > 1 && min == max) {
        return Err(Error::domain(format!("invalid control range {min}..{max}")));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let span = max - min;
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                max
            } else {
                min + span * k as f64 / last
            }
        })
        .collect())
}

/// Bifurcation diagram samples: for each control value on the grid, settle
/// the orbit for `settle` iterations, then emit `keep` successive `(u, v)`
/// points.
pub fn bifurcation_scan(
    kind: MapKind,
    u_min: f64,
    u_max: f64,
    u_steps: usize,
    settle: usize,
    keep: usize,
    v0: f64,
) -> Result<Vec<(f64, f64)>> {
    if keep == 0 {
        return Err(Error::domain("keep must be positive"));
    }
    let grid = control_grid(u_min, u_max, u_steps)?;
    kind.check_control(u_min)?;
    kind.check_control(u_max)?;
    check_state(v0)?;
    let mut points = Vec::with_capacity(grid.len() * keep);
    for u in grid {
        let seq = generate_sequence(kind, MapParams::new(v0, u), keep, settle)?;
        points.extend(seq.values().iter().map(|&v| (u, v)));
    }
    Ok(points)
}

/// Lyapunov exponent at every control value on the grid.
pub fn lyapunov_scan(
    kind: MapKind,
    u_min: f64,
    u_max: f64,
    u_steps: usize,
    v0: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    control_grid(u_min, u_max, u_steps)?
        .into_iter()
        .map(|u| lyapunov(kind, MapParams::new(v0, u), n).map(|le| (u, le)))
        .collect()
}

/// Writes `(u, value)` rows as CSV with header `u,<value_column>`.
pub fn write_scan_csv<W: Write>(
    mut out: W,
    value_column: &str,
    points: &[(f64, f64)],
) -> std::io::Result<()> {
    writeln!(out, "u,{value_column}")?;
    for &(u, v) in points {
        writeln!(out, "{},{}", decimal(u), decimal(v))?;
    }
    Ok(())
}

/// Plain decimal notation carrying at least 15 significant digits.
fn decimal(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0.000000000000000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic_step(0.5, 4.0).unwrap(), 1.0);
        assert_eq!(logistic_step(0.5, 2.0).unwrap(), 0.5);
        assert!((logistic_step(0.3, 3.9).unwrap() - 0.819).abs() < 1e-12);
    }

    #[test]
    fn logistic_domain_errors() {
        assert!(logistic_step(0.0, 2.0).is_err());
        assert!(logistic_step(1.0, 2.0).is_err());
        assert!(logistic_step(0.5, 4.1).is_err());
        assert!(logistic_step(0.5, -0.1).is_err());
    }

    #[test]
    fn log_map_examples() {
        // reference values from 40-digit evaluation of mod((u+e) ln v, 1)
        let a = log_map_step(0.5, 0.0).unwrap();
        assert!((a - 0.115_830_614_636_279_9).abs() < 1e-12, "{a}");
        let b = log_map_step(0.9, 5.0).unwrap();
        assert!((b - 0.186_797_846_561_124_7).abs() < 1e-12, "{b}");
    }

    #[test]
    fn log_map_remaps_exact_zero() {
        // e ln v = -1 has no f64 solution near exp(-1/e); -2 does. Scan a few
        // ulps around exp(-k/e) for a state whose product is exactly integral.
        let found = (1..=5).find_map(|k| {
            let target = -(k as f64);
            let center = (target / EULER).exp().to_bits();
            (center - 8..=center + 8)
                .map(f64::from_bits)
                .find(|v| EULER * v.ln() == target)
        });
        let v = found.expect("no state with integral product");
        assert_eq!(log_map_step(v, 0.0).unwrap(), ZERO_REMAP);
    }

    #[test]
    fn log_map_domain_errors() {
        assert!(log_map_step(0.0, 1.0).is_err());
        assert!(log_map_step(1.0, 1.0).is_err());
        assert!(log_map_step(0.5, -1e-9).is_err());
    }

    #[test]
    fn sequence_examples() {
        let s = generate_sequence(MapKind::LogMap, MapParams::new(0.5, 0.0), 1, 0).unwrap();
        assert_eq!(s.values(), &[log_map_step(0.5, 0.0).unwrap()]);

        let s = generate_sequence(MapKind::Logistic, MapParams::new(0.5, 2.0), 3, 0).unwrap();
        assert_eq!(s.values(), &[0.5, 0.5, 0.5]);

        let full = generate_sequence(MapKind::LogMap, MapParams::new(0.5, 0.0), 3, 0).unwrap();
        let tail = generate_sequence(MapKind::LogMap, MapParams::new(0.5, 0.0), 2, 1).unwrap();
        assert_eq!(tail.values(), &full.values()[1..]);
        assert_eq!(tail.burn_in(), 1);
    }

    #[test]
    fn sequence_rejects_bad_input() {
        assert!(generate_sequence(MapKind::LogMap, MapParams::new(0.5, 0.0), 0, 0).is_err());
        assert!(generate_sequence(MapKind::Logistic, MapParams::new(0.5, 5.0), 4, 0).is_err());
        assert!(generate_sequence(MapKind::LogMap, MapParams::new(1.5, 1.0), 4, 0).is_err());
    }

    #[test]
    fn lyapunov_logistic_at_four_is_ln2() {
        let le = lyapunov_logistic(MapParams::new(0.3, 4.0), 1_000_000).unwrap();
        assert!((le - std::f64::consts::LN_2).abs() < 0.01, "{le}");
    }

    #[test]
    fn lyapunov_logistic_sign() {
        // v0=0.3, u=2 converges onto the superstable point 0.5 exactly
        let le = lyapunov_logistic(MapParams::new(0.3, 2.0), 100_000).unwrap();
        assert!(le < 0.0);
        let le = lyapunov_logistic(MapParams::new(0.3, 3.9), 100_000).unwrap();
        assert!(le > 0.0);
    }

    #[test]
    fn lyapunov_logmap_positive() {
        for u in [0.0, 9.9] {
            let le = lyapunov_logmap(MapParams::new(0.5, u), 100_000).unwrap();
            assert!(le > (u + EULER).ln(), "u={u} le={le}");
        }
    }

    #[test]
    fn bifurcation_fixed_point_and_two_cycle() {
        let pts = bifurcation_scan(MapKind::Logistic, 2.0, 2.0, 1, 500, 5, 0.3).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(pts
            .iter()
            .all(|&(u, v)| u == 2.0 && (v - 0.5).abs() < 1e-12));

        // period-2 points of u v (1 - v): ((u+1) ± sqrt((u+1)(u-3))) / 2u
        let u: f64 = 3.2;
        let disc = ((u + 1.0) * (u - 3.0)).sqrt();
        let hi = (u + 1.0 + disc) / (2.0 * u);
        let lo = (u + 1.0 - disc) / (2.0 * u);
        let pts = bifurcation_scan(MapKind::Logistic, 3.2, 3.2, 1, 500, 4, 0.3).unwrap();
        let vs: Vec<f64> = pts.iter().map(|p| p.1).collect();
        for pair in vs.windows(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            assert!((a - lo).abs() < 1e-9 && (b - hi).abs() < 1e-9, "{vs:?}");
        }
    }

    #[test]
    fn bifurcation_logmap_fills_interval() {
        let pts = bifurcation_scan(MapKind::LogMap, 0.0, 10.0, 100, 500, 50, 0.5).unwrap();
        assert_eq!(pts.len(), 100 * 50);
        for chunk in pts.chunks(50) {
            let mut bins = [false; 5];
            for &(_, v) in chunk {
                assert!(v > 0.0 && v < 1.0);
                bins[(v * 5.0) as usize] = true;
            }
            assert!(bins.iter().filter(|&&b| b).count() >= 4, "u={}", chunk[0].0);
        }
    }

    #[test]
    fn bifurcation_rejects_bad_range() {
        assert!(bifurcation_scan(MapKind::Logistic, 3.0, 2.0, 10, 10, 1, 0.3).is_err());
        assert!(bifurcation_scan(MapKind::Logistic, 3.0, 4.5, 10, 10, 1, 0.3).is_err());
        assert!(bifurcation_scan(MapKind::LogMap, -1.0, 2.0, 10, 10, 1, 0.3).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = control_grid(0.0, 10.0, 101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 10.0);
        assert!((g[37] - 3.7).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_scan_csv(
            &mut buf,
            "le",
            &[(0.5, 1.234_567_890_123_456_7), (10.0, 0.001)],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u,le");
        assert_eq!(lines.len(), 3);
        for line in &lines[1..] {
            for field in line.split(',') {
                let digits = field
                    .chars()
                    .filter(|c| c.is_ascii_digit())
                    .collect::<String>();
                assert!(digits.trim_start_matches('0').len() >= 12, "{field}");
                assert!(!field.contains('e'));
                field.parse::<f64>().unwrap();
            }
        }
    }
}

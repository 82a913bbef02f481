//! Faure (0,m,s)-nets and their nested uniform scrambling.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::lattice::is_prime;
use super::{stratum_point, PointSet, RngStream};
use crate::error::{Error, Result};

/// Largest net we are willing to build.
const MAX_NET_POINTS: u64 = 1 << 24;

fn check_params(b: u64, m: u32, s: usize) -> Result<u64> {
    if !is_prime(b) {
        return Err(Error::invalid(format!("net base must be prime, got {b}")));
    }
    if s == 0 || (s as u64) > b {
        return Err(Error::invalid(format!(
            "net dimension s must satisfy 1 <= s <= b (b = {b}, s = {s})"
        )));
    }
    if m == 0 {
        return Err(Error::invalid("net depth m must be >= 1"));
    }
    match b.checked_pow(m) {
        Some(n) if n <= MAX_NET_POINTS => Ok(n),
        _ => Err(Error::invalid(format!("b^m too large (b = {b}, m = {m})"))),
    }
}

/// Generator matrices `C_i = P^i mod b`, `P` the upper-triangular Pascal matrix.
fn generator_matrices(b: u64, m: usize, s: usize) -> Vec<Vec<Vec<u64>>> {
    let mut binom = vec![vec![0u64; m]; m];
    for c in 0..m {
        binom[c][0] = 1;
        for r in 1..=c {
            binom[c][r] = (binom[c - 1][r - 1] + if r < c { binom[c - 1][r] } else { 0 }) % b;
        }
    }
    (0..s as u64)
        .map(|i| {
            let mut mat = vec![vec![0u64; m]; m];
            for (r, row) in mat.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate().skip(r) {
                    // binom(c, r) * i^(c-r); 0^0 = 1
                    let mut pw = 1u64;
                    for _ in 0..(c - r) {
                        pw = pw * i % b;
                    }
                    *entry = binom[c][r] * pw % b;
                }
            }
            mat
        })
        .collect()
}

/// Output digits `y_0, …, y_{m−1}` (most significant first) of every point on every axis.
fn faure_digits(b: u64, m: u32, s: usize) -> Vec<Vec<Vec<u64>>> {
    let m = m as usize;
    let n = b.pow(m as u32);
    let mats = generator_matrices(b, m, s);
    (0..n)
        .map(|k| {
            let mut input = vec![0u64; m];
            let mut rest = k;
            for a in input.iter_mut() {
                *a = rest % b;
                rest /= b;
            }
            mats.iter()
                .map(|mat| {
                    mat.iter()
                        .map(|row| row.iter().zip(&input).map(|(c, a)| c * a).sum::<u64>() % b)
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn digits_to_index(digits: &[u64], b: u64) -> u64 {
    digits.iter().fold(0, |acc, &y| acc * b + y)
}

/// The unscrambled Faure (0,m,s)-net in base `b`: `b^m` points on the `b^{-m}` grid.
pub fn faure_net(b: u64, m: u32, s: usize) -> Result<PointSet> {
    let n = check_params(b, m, s)?;
    let nf = n as f64;
    let data = faure_digits(b, m, s)
        .iter()
        .flat_map(|axes| axes.iter().map(|d| digits_to_index(d, b) as f64 / nf))
        .collect();
    Ok(PointSet::from_raw(s, n as usize, data))
}

/// Nested uniform scrambling of depth `m`, followed by uniform jitter below
/// the `b^{-m}` resolution and a random row order.
///
/// Digit `r` on each axis is permuted by a uniform permutation chosen
/// independently for every prefix `(y_0, …, y_{r−1})` of the original digits,
/// so every elementary interval of volume `b^{-m}` maps onto another one.
pub fn sample_scrambled_net(b: u64, m: u32, s: usize, rng: &mut RngStream) -> Result<PointSet> {
    let n = check_params(b, m, s)?;
    let digits = faure_digits(b, m, s);
    let mut perms: HashMap<(usize, usize, u64), Vec<u64>> = HashMap::new();
    let mut data = Vec::with_capacity(n as usize * s);
    for axes in &digits {
        for (axis, orig) in axes.iter().enumerate() {
            let mut prefix = 0u64;
            let mut scrambled = 0u64;
            for (r, &y) in orig.iter().enumerate() {
                let perm = perms.entry((axis, r, prefix)).or_insert_with(|| {
                    let mut p: Vec<u64> = (0..b).collect();
                    p.shuffle(rng);
                    p
                });
                scrambled = scrambled * b + perm[y as usize];
                prefix = prefix * b + y;
            }
            data.push(stratum_point(scrambled, rng.random::<f64>(), n));
        }
    }
    let mut order: Vec<usize> = (0..n as usize).collect();
    order.shuffle(rng);
    Ok(PointSet::from_raw(s, n as usize, data).permuted(&order))
}

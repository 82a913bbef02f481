//! Local, star, δ-cover and weighted star discrepancy of finite point sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_delta_cover, Region};
use crate::samplers::PointSet;

/// Default cap on box–point tests for one exact or cover computation.
pub const DEFAULT_WORK_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    Exact,
    CoverUpper,
    CoverLower,
}

/// Which side of the discrepancy function attains the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Too many points: closed count at the corner minus the volume.
    Excess,
    /// Too few points: volume minus the open count at the corner.
    Deficit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub corner: Vec<f64>,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub kind: DiscrepancyKind,
    pub witness: Option<Witness>,
}

/// `|#(P ∩ box)/N − vol(box)|`.
pub fn local_discrepancy<R: Region + ?Sized>(points: &PointSet, region: &R) -> Result<f64> {
    if points.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: points.dim(),
        });
    }
    let count = points.rows().filter(|p| region.contains_point(p)).count();
    Ok((count as f64 / points.len() as f64 - region.volume()).abs())
}

/// Exact star discrepancy with the default work cap.
pub fn star_discrepancy_exact(points: &PointSet) -> Result<DiscrepancyResult> {
    star_discrepancy_exact_with_cap(points, DEFAULT_WORK_CAP)
}

/// Exact star discrepancy by enumeration of the critical grid.
///
/// On every axis the candidate corners are the point coordinates and 1. At a
/// grid corner `x` the supremum of `A([0,y))/N − vol(y)` over `y ↓ x` is the
/// closed count (`p ≤ x`) minus `vol(x)`, and the supremum of
/// `vol(y) − A([0,y))/N` over `y ↑ x` is `vol(x)` minus the open count
/// (`p < x`). The last axis is swept with prefix sums, so the work is about
/// `(N+1)^{d−1} · 2N` box–point tests; more than `cap` is refused.
pub fn star_discrepancy_exact_with_cap(points: &PointSet, cap: u128) -> Result<DiscrepancyResult> {
    let d = points.dim();
    let n = points.len();
    if d == 0 {
        return Err(Error::invalid("star discrepancy needs d >= 1"));
    }
    let cands: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut c: Vec<f64> = points.rows().map(|p| p[i]).collect();
            c.push(1.0);
            c.sort_by(|a, b| a.total_cmp(b));
            c.dedup();
            c
        })
        .collect();
    let last = d - 1;
    let k_last = cands[last].len();
    let outer: u128 = cands[..last].iter().map(|c| c.len() as u128).product();
    let work = outer.saturating_mul((n + k_last) as u128);
    if work > cap {
        return Err(Error::BudgetExceeded {
            needed: work,
            cap,
        });
    }
    let rank: Vec<usize> = points
        .rows()
        .map(|p| cands[last].partition_point(|&c| c < p[last]))
        .collect();

    let sweep = |corner: &[f64]| -> (f64, usize, Side) {
        let mut h_closed = vec![0u32; k_last];
        let mut h_open = vec![0u32; k_last];
        for (p, &r) in points.rows().zip(&rank) {
            let inner = &p[..last];
            if inner.iter().zip(corner).all(|(a, b)| a <= b) {
                h_closed[r] += 1;
                if inner.iter().zip(corner).all(|(a, b)| a < b) {
                    h_open[r] += 1;
                }
            }
        }
        let vol_outer: f64 = corner.iter().product();
        let nf = n as f64;
        let (mut closed, mut open) = (0u32, 0u32);
        let mut best = (f64::NEG_INFINITY, 0, Side::Excess);
        for (k, &c) in cands[last].iter().enumerate() {
            closed += h_closed[k];
            let vol = vol_outer * c;
            let excess = closed as f64 / nf - vol;
            let deficit = vol - open as f64 / nf;
            if excess > best.0 {
                best = (excess, k, Side::Excess);
            }
            if deficit > best.0 {
                best = (deficit, k, Side::Deficit);
            }
            open += h_open[k];
        }
        best
    };

    let first_len = if d == 1 { 1 } else { cands[0].len() };
    let best = (0..first_len)
        .into_par_iter()
        .map(|i0| {
            // odometer over axes 1..last with axis 0 fixed at i0
            let mut idx = vec![0usize; last];
            if last > 0 {
                idx[0] = i0;
            }
            let mut best: (f64, Vec<usize>, Side) = (f64::NEG_INFINITY, vec![], Side::Excess);
            loop {
                let corner: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| cands[i][j]).collect();
                let (v, k, side) = sweep(&corner);
                if v > best.0 {
                    let mut at = idx.clone();
                    at.push(k);
                    best = (v, at, side);
                }
                let mut axis = 1;
                loop {
                    if axis >= last {
                        return best;
                    }
                    if idx[axis] + 1 < cands[axis].len() {
                        idx[axis] += 1;
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
        })
        .reduce(
            || (f64::NEG_INFINITY, vec![], Side::Excess),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );

    let corner = best.1.iter().enumerate().map(|(i, &j)| cands[i][j]).collect();
    Ok(DiscrepancyResult {
        value: best.0.clamp(0.0, 1.0),
        kind: DiscrepancyKind::Exact,
        witness: Some(Witness {
            corner,
            side: best.2,
        }),
    })
}

/// Bounds from a δ-cover: `lower` is the largest local discrepancy over the
/// cover's anchored boxes, `upper = lower + δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverBounds {
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
    pub cover_size: usize,
}

pub fn star_discrepancy_cover(points: &PointSet, delta: f64) -> Result<CoverBounds> {
    star_discrepancy_cover_with_cap(points, delta, DEFAULT_WORK_CAP)
}

pub fn star_discrepancy_cover_with_cap(points: &PointSet, delta: f64, cap: u128) -> Result<CoverBounds> {
    let d = points.dim();
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1], got {delta}")));
    }
    let m = (d as f64 / delta).ceil() as u128;
    let size = m.checked_pow(d as u32).unwrap_or(u128::MAX);
    let work = size.saturating_mul(points.len() as u128);
    if work > cap {
        return Err(Error::BudgetExceeded { needed: work, cap });
    }
    let cover = build_delta_cover(d, delta)?;
    let nf = points.len() as f64;
    let lower = cover
        .iter()
        .map(|x| {
            let count = points
                .rows()
                .filter(|p| p.iter().zip(x).all(|(a, b)| a < b))
                .count();
            (count as f64 / nf - x.iter().product::<f64>()).abs()
        })
        .fold(0.0, f64::max);
    Ok(CoverBounds {
        lower,
        upper: lower + delta,
        delta,
        cover_size: cover.len(),
    })
}

/// Weights `γ_u` for nonempty coordinate subsets `u` (0-based coordinates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weights {
    /// `γ_u = ∏_{j∈u} γ_j`.
    Product { gamma: Vec<f64> },
    /// One entry per subset; subsets not listed are an error when queried.
    Explicit { entries: Vec<SubsetWeight> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetWeight {
    pub u: Vec<usize>,
    pub gamma: f64,
}

impl Weights {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Weights::Product { gamma } => {
                if gamma.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: gamma.len(),
                    });
                }
                if gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
                    return Err(Error::invalid("weights must be finite and nonnegative"));
                }
            }
            Weights::Explicit { entries } => {
                for e in entries {
                    if !e.gamma.is_finite() || e.gamma < 0.0 {
                        return Err(Error::invalid("weights must be finite and nonnegative"));
                    }
                    if e.u.is_empty() || e.u.iter().any(|&c| c >= d) {
                        return Err(Error::invalid(format!(
                            "weight subset {:?} is empty or out of range for d = {d}",
                            e.u
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `γ_u` for the subset given as a sorted coordinate list.
    pub fn get(&self, u: &[usize]) -> Result<f64> {
        match self {
            Weights::Product { gamma } => Ok(u.iter().map(|&j| gamma[j]).product()),
            Weights::Explicit { entries } => entries
                .iter()
                .find(|e| {
                    let mut s = e.u.clone();
                    s.sort_unstable();
                    s.dedup();
                    s == u
                })
                .map(|e| e.gamma)
                .ok_or_else(|| Error::invalid(format!("no weight given for subset {u:?}"))),
        }
    }
}

/// Nonempty subsets of `0..d` as sorted coordinate lists, by bitmask order.
pub(crate) fn nonempty_subsets(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1u64 << d)).map(move |mask| (0..d).filter(|&j| mask >> j & 1 == 1).collect())
}

/// `max_u γ_u · D*(P_u)` over nonempty `u`, where `P_u` is the projection of
/// `P` onto the coordinates in `u`. Anchoring the remaining coordinates at 1
/// makes the local discrepancy of `P` equal that of its projection.
pub fn weighted_star_discrepancy(points: &PointSet, weights: &Weights) -> Result<f64> {
    let d = points.dim();
    if d > 20 {
        return Err(Error::invalid("weighted discrepancy enumerates 2^d subsets; d must be <= 20"));
    }
    weights.validate(d)?;
    let mut best = 0.0f64;
    for u in nonempty_subsets(d) {
        let gamma = weights.get(&u)?;
        if gamma == 0.0 {
            continue;
        }
        let proj = points.project(&u)?;
        best = best.max(gamma * star_discrepancy_exact(&proj)?.value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CornerBox0;
    use crate::samplers::{sample_mc, RngStream};
    use rand::Rng;

    /// Sup of the discrepancy function by brute force over all corners built
    /// from point coordinates, 1, and points just above/below each coordinate.
    fn brute_star(points: &PointSet) -> f64 {
        let d = points.dim();
        let n = points.len() as f64;
        let mut axes: Vec<Vec<f64>> = vec![vec![]; d];
        for p in points.rows() {
            for i in 0..d {
                axes[i].push(p[i]);
                axes[i].push((p[i] + 1e-12).min(1.0));
            }
        }
        for a in axes.iter_mut() {
            a.push(1.0);
        }
        let mut best = 0.0f64;
        let mut idx = vec![0usize; d];
        loop {
            let x: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect();
            let count = points
                .rows()
                .filter(|p| p.iter().zip(&x).all(|(a, b)| a < b))
                .count();
            let vol: f64 = x.iter().product();
            best = best.max((count as f64 / n - vol).abs());
            let mut axis = 0;
            loop {
                if axis == d {
                    return best;
                }
                if idx[axis] + 1 < axes[axis].len() {
                    idx[axis] += 1;
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    fn centered_grid(n: usize) -> PointSet {
        let rows: Vec<Vec<f64>> = (1..=n).map(|i| vec![(2 * i - 1) as f64 / (2 * n) as f64]).collect();
        PointSet::from_rows(1, &rows).unwrap()
    }

    #[test]
    fn local_discrepancy_examples() {
        let p = PointSet::from_rows(1, &[vec![0.25], vec![0.75]]).unwrap();
        let b = CornerBox0::new(vec![0.5]).unwrap();
        assert_eq!(local_discrepancy(&p, &b).unwrap(), 0.0);
        let q = PointSet::from_rows(1, &[vec![0.25]]).unwrap();
        let b = CornerBox0::new(vec![0.2]).unwrap();
        assert_eq!(local_discrepancy(&q, &b).unwrap(), 0.2);
        assert!(local_discrepancy(&q, &CornerBox0::new(vec![0.2, 0.2]).unwrap()).is_err());
    }

    #[test]
    fn local_discrepancy_matches_membership_loop() {
        let mut rng = RngStream::new(3);
        for _ in 0..50 {
            let p = sample_mc(5, 2, &mut rng);
            let upper = vec![rng.random::<f64>(), rng.random::<f64>()];
            let b = CornerBox0::new(upper.clone()).unwrap();
            let mut count = 0;
            for i in 0..5 {
                let r = p.row(i);
                if r[0] < upper[0] && r[1] < upper[1] {
                    count += 1;
                }
            }
            let expect = (count as f64 / 5.0 - upper[0] * upper[1]).abs();
            assert!((local_discrepancy(&p, &b).unwrap() - expect).abs() <= 1e-15);
        }
    }

    #[test]
    fn centered_grid_is_one_over_2n() {
        for n in [1, 2, 4, 8, 16] {
            let r = star_discrepancy_exact(&centered_grid(n)).unwrap();
            assert_eq!(r.value, 1.0 / (2 * n) as f64);
        }
        assert_eq!(star_discrepancy_exact(&centered_grid(4)).unwrap().value, 0.125);
    }

    #[test]
    fn single_point_examples() {
        let p = PointSet::from_rows(2, &[vec![0.5, 0.5]]).unwrap();
        let r = star_discrepancy_exact(&p).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.witness.unwrap().side, Side::Excess);
        for x in [0.0, 0.1, 0.5, 0.9] {
            let p = PointSet::from_rows(1, &[vec![x]]).unwrap();
            assert_eq!(star_discrepancy_exact(&p).unwrap().value, f64::max(x, 1.0 - x));
        }
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = RngStream::new(17);
        for d in 1..=3 {
            for n in [1, 2, 3, 5, 8] {
                for _ in 0..5 {
                    let p = sample_mc(n, d, &mut rng);
                    let exact = star_discrepancy_exact(&p).unwrap().value;
                    let brute = brute_star(&p);
                    assert!((exact - brute).abs() < 1e-9, "d={d} n={n}: {exact} vs {brute}");
                }
            }
        }
    }

    #[test]
    fn permutation_invariant_and_bounded() {
        let mut rng = RngStream::new(21);
        let p = sample_mc(30, 2, &mut rng);
        let rev: Vec<usize> = (0..30).rev().collect();
        let a = star_discrepancy_exact(&p).unwrap().value;
        let b = star_discrepancy_exact(&p.permuted(&rev)).unwrap().value;
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn budget_is_enforced() {
        let mut rng = RngStream::new(1);
        let p = sample_mc(200, 3, &mut rng);
        assert!(matches!(
            star_discrepancy_exact_with_cap(&p, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            star_discrepancy_cover_with_cap(&p, 0.01, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn cover_sandwich() {
        let grid = centered_grid(8);
        let c = star_discrepancy_cover(&grid, 1.0 / 16.0).unwrap();
        assert!(c.lower <= 1.0 / 16.0 && c.upper <= 0.125 + 1e-15);
        let exact = star_discrepancy_exact(&grid).unwrap().value;
        assert!(c.lower <= exact && exact <= c.upper);

        let mut rng = RngStream::new(4);
        let p = sample_mc(20, 2, &mut rng);
        let full = star_discrepancy_cover(&p, 1.0).unwrap();
        assert!(full.lower >= 0.0 && full.upper >= 1.0);
        let c = star_discrepancy_cover(&p, 0.05).unwrap();
        let exact = star_discrepancy_exact(&p).unwrap().value;
        assert!(c.lower <= exact && exact <= c.upper);
    }

    #[test]
    fn weighted_examples() {
        let p = centered_grid(4);
        let w = Weights::Product { gamma: vec![1.0] };
        assert_eq!(weighted_star_discrepancy(&p, &w).unwrap(), 0.125);

        let mut rng = RngStream::new(6);
        let q = sample_mc(12, 3, &mut rng);
        let zero = Weights::Product { gamma: vec![0.0; 3] };
        assert_eq!(weighted_star_discrepancy(&q, &zero).unwrap(), 0.0);

        let grid = PointSet::from_rows(
            2,
            &[vec![0.125, 0.375], vec![0.375, 0.875], vec![0.625, 0.125], vec![0.875, 0.625]],
        )
        .unwrap();
        let w = Weights::Product { gamma: vec![1.0, 1.0] };
        let expect = [vec![0], vec![1], vec![0, 1]]
            .iter()
            .map(|u| brute_star(&grid.project(u).unwrap()))
            .fold(0.0, f64::max);
        assert!((weighted_star_discrepancy(&grid, &w).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn weighted_single_subset_is_projection() {
        let mut rng = RngStream::new(8);
        let p = sample_mc(10, 3, &mut rng);
        let w = Weights::Explicit {
            entries: nonempty_subsets(3)
                .map(|u| SubsetWeight {
                    gamma: if u == vec![0, 2] { 0.7 } else { 0.0 },
                    u,
                })
                .collect(),
        };
        let proj = star_discrepancy_exact(&p.project(&[0, 2]).unwrap()).unwrap().value;
        assert_eq!(weighted_star_discrepancy(&p, &w).unwrap(), 0.7 * proj);

        let missing = Weights::Explicit {
            entries: vec![SubsetWeight { u: vec![0], gamma: 1.0 }],
        };
        assert!(weighted_star_discrepancy(&p, &missing).is_err());
    }
}

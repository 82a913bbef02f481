//! Randomized point-set constructions.
//!
//! Every construction returns a *sampling scheme*: each point is uniform in
//! `[0,1)^d` and the row order is exchangeable. Constructions whose natural
//! order is not exchangeable are symmetrized by a final uniform row shuffle.

mod lattice;
mod net;
mod pointset;
mod rng;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use lattice::{is_prime, sample_rsj, LatticeCells};
pub use net::{faure_net, sample_scrambled_net};
pub use pointset::{concat, PointSet};
pub use rng::RngStream;

use crate::error::{Error, Result};

/// Description of a sampling construction and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", from = "RawSchemeSpec")]
pub enum SchemeSpec {
    MonteCarlo,
    SimpleStratified,
    GeneralizedStratified {
        beta: usize,
        strata: StrataSpec,
    },
    RsjRank1Lattice,
    LatinHypercube,
    ScrambledNet {
        base: u64,
        m: u32,
        s: usize,
    },
    Mixed {
        left: Box<SchemeSpec>,
        d_left: usize,
        right: Box<SchemeSpec>,
        d_right: usize,
    },
    /// Two points in `[0,1)` with joint CDF `min{x, y, (x²+y²)/2}`; probability-only.
    MinCopula,
    /// Two points in `[0,1)^2` placed in quadrant slots by a fixed pair table.
    FourSlot,
    /// `p_1 = (X, Y)`, `p_2 = (Y, X)` with independent uniform `X, Y`.
    SwapScheme,
}

// Serde ignores `deny_unknown_fields` on unit variants of internally tagged
// enums, so parsing goes through this mirror with empty struct variants.
#[derive(Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
enum RawSchemeSpec {
    MonteCarlo {},
    SimpleStratified {},
    GeneralizedStratified { beta: usize, strata: StrataSpec },
    RsjRank1Lattice {},
    LatinHypercube {},
    ScrambledNet { base: u64, m: u32, s: usize },
    Mixed {
        left: Box<SchemeSpec>,
        d_left: usize,
        right: Box<SchemeSpec>,
        d_right: usize,
    },
    MinCopula {},
    FourSlot {},
    SwapScheme {},
}

impl From<RawSchemeSpec> for SchemeSpec {
    fn from(raw: RawSchemeSpec) -> Self {
        match raw {
            RawSchemeSpec::MonteCarlo {} => SchemeSpec::MonteCarlo,
            RawSchemeSpec::SimpleStratified {} => SchemeSpec::SimpleStratified,
            RawSchemeSpec::GeneralizedStratified { beta, strata } => {
                SchemeSpec::GeneralizedStratified { beta, strata }
            }
            RawSchemeSpec::RsjRank1Lattice {} => SchemeSpec::RsjRank1Lattice,
            RawSchemeSpec::LatinHypercube {} => SchemeSpec::LatinHypercube,
            RawSchemeSpec::ScrambledNet { base, m, s } => SchemeSpec::ScrambledNet { base, m, s },
            RawSchemeSpec::Mixed {
                left,
                d_left,
                right,
                d_right,
            } => SchemeSpec::Mixed {
                left,
                d_left,
                right,
                d_right,
            },
            RawSchemeSpec::MinCopula {} => SchemeSpec::MinCopula,
            RawSchemeSpec::FourSlot {} => SchemeSpec::FourSlot,
            RawSchemeSpec::SwapScheme {} => SchemeSpec::SwapScheme,
        }
    }
}

/// Strata for generalized stratified sampling; each family partitions the
/// cube into `β` cells of volume `1/β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrataSpec {
    /// `B_j = [(j−1)/n, j/n) × [0,1)^{d−1}`.
    Stripes { n: usize },
    /// Fundamental cells of the rank-1 lattice with generator `g / n`, `n` prime.
    LatticeCells { g: Vec<u64>, n: u64 },
}

impl StrataSpec {
    pub fn count(&self) -> usize {
        match self {
            StrataSpec::Stripes { n } => *n,
            StrataSpec::LatticeCells { n, .. } => *n as usize,
        }
    }
}

impl SchemeSpec {
    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            SchemeSpec::MonteCarlo => "mc".into(),
            SchemeSpec::SimpleStratified => "simple_stratified".into(),
            SchemeSpec::GeneralizedStratified { beta, strata } => match strata {
                StrataSpec::Stripes { .. } => format!("gss_stripes_b{beta}"),
                StrataSpec::LatticeCells { .. } => format!("gss_lattice_b{beta}"),
            },
            SchemeSpec::RsjRank1Lattice => "rsj".into(),
            SchemeSpec::LatinHypercube => "lhs".into(),
            SchemeSpec::ScrambledNet { base, m, s } => format!("net_b{base}_m{m}_s{s}"),
            SchemeSpec::Mixed {
                left,
                d_left,
                right,
                d_right,
            } => format!("{}:{d_left}+{}:{d_right}", left.label(), right.label()),
            SchemeSpec::MinCopula => "min_copula".into(),
            SchemeSpec::FourSlot => "four_slot".into(),
            SchemeSpec::SwapScheme => "swap".into(),
        }
    }

    /// Checks that `(n, d)` is admissible for this construction.
    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("N must be >= 1"));
        }
        match self {
            SchemeSpec::MonteCarlo | SchemeSpec::LatinHypercube => {
                if d == 0 {
                    return Err(Error::invalid("d must be >= 1"));
                }
            }
            SchemeSpec::SimpleStratified => {
                if d != 1 {
                    return Err(Error::invalid(
                        "simple stratified sampling is one-dimensional (d = 1)",
                    ));
                }
            }
            SchemeSpec::GeneralizedStratified { beta, strata } => {
                if *beta < n {
                    return Err(Error::invalid(format!(
                        "generalized stratified sampling needs beta >= N (beta = {beta}, N = {n})"
                    )));
                }
                if strata.count() != *beta {
                    return Err(Error::invalid(format!(
                        "strata family has {} cells but beta = {beta}",
                        strata.count()
                    )));
                }
                match strata {
                    StrataSpec::Stripes { .. } if d == 0 => {
                        return Err(Error::invalid("d must be >= 1"));
                    }
                    StrataSpec::LatticeCells { g, n: p } => {
                        if g.len() != d {
                            return Err(Error::DimensionMismatch {
                                expected: d,
                                got: g.len(),
                            });
                        }
                        LatticeCells::new(g, *p)?;
                    }
                    _ => {}
                }
            }
            SchemeSpec::RsjRank1Lattice => {
                if !is_prime(n as u64) {
                    return Err(Error::NotPrime(n as u64));
                }
                if d == 0 {
                    return Err(Error::invalid("d must be >= 1"));
                }
            }
            SchemeSpec::ScrambledNet { base, m, s } => {
                let pts = base
                    .checked_pow(*m)
                    .ok_or_else(|| Error::invalid("b^m overflows"))?;
                if pts != n as u64 {
                    return Err(Error::invalid(format!(
                        "scrambled net needs N = b^m = {pts}, got N = {n}"
                    )));
                }
                if d != *s {
                    return Err(Error::DimensionMismatch {
                        expected: *s,
                        got: d,
                    });
                }
                if !is_prime(*base) || *s == 0 || *s as u64 > *base {
                    return Err(Error::invalid(format!(
                        "scrambled net needs prime b >= s >= 1 (b = {base}, s = {s})"
                    )));
                }
            }
            SchemeSpec::Mixed {
                left,
                d_left,
                right,
                d_right,
            } => {
                if d_left + d_right != d {
                    return Err(Error::invalid(format!(
                        "mixed scheme needs d = d_left + d_right ({d} != {d_left} + {d_right})"
                    )));
                }
                left.validate(n, *d_left)?;
                right.validate(n, *d_right)?;
            }
            SchemeSpec::MinCopula => {
                return Err(Error::Unsupported(
                    "min_copula has no sampler; use its exact probability oracle".into(),
                ));
            }
            SchemeSpec::FourSlot | SchemeSpec::SwapScheme => {
                if n != 2 || d != 2 {
                    return Err(Error::invalid(format!(
                        "{} is a two-point scheme in d = 2 (got N = {n}, d = {d})",
                        self.label()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `(k + u) / n`, kept inside the half-open stratum `[k/n, (k+1)/n)` despite rounding.
pub(crate) fn stratum_point(k: u64, u: f64, n: u64) -> f64 {
    let nf = n as f64;
    let lo = k as f64 / nf;
    let hi = (k + 1) as f64 / nf;
    let x = (k as f64 + u) / nf;
    if x >= hi {
        hi.next_down().max(lo)
    } else if x < lo {
        lo
    } else {
        x
    }
}

/// One draw of the scheme described by `spec`.
pub fn sample(spec: &SchemeSpec, n: usize, d: usize, rng: &mut RngStream) -> Result<PointSet> {
    spec.validate(n, d)?;
    match spec {
        SchemeSpec::MonteCarlo => Ok(sample_mc(n, d, rng)),
        SchemeSpec::SimpleStratified => Ok(sample_simple_stratified(n, rng)),
        SchemeSpec::GeneralizedStratified { beta, strata } => sample_gss(*beta, strata, n, d, rng),
        SchemeSpec::RsjRank1Lattice => sample_rsj(n, d, rng),
        SchemeSpec::LatinHypercube => Ok(sample_lhs(n, d, rng)),
        SchemeSpec::ScrambledNet { base, m, s } => sample_scrambled_net(*base, *m, *s, rng),
        SchemeSpec::Mixed {
            left,
            d_left,
            right,
            d_right,
        } => {
            let x = sample(left, n, *d_left, &mut rng.fork())?;
            let y = sample(right, n, *d_right, &mut rng.fork())?;
            concat(&x, &y)
        }
        SchemeSpec::MinCopula => unreachable!("rejected by validate"),
        SchemeSpec::FourSlot => Ok(sample_four_slot(rng)),
        SchemeSpec::SwapScheme => Ok(sample_swap(rng)),
    }
}

pub fn sample_mc(n: usize, d: usize, rng: &mut RngStream) -> PointSet {
    let data = (0..n * d).map(|_| rng.random::<f64>()).collect();
    PointSet::from_raw(d, n, data)
}

/// `p_j = (π(j) − U_j) / N` with `U_j` uniform on `(0,1]`.
pub fn sample_simple_stratified(n: usize, rng: &mut RngStream) -> PointSet {
    let mut perm: Vec<u64> = (0..n as u64).collect();
    perm.shuffle(rng);
    // π(j) − U_j = (π(j) − 1) + (1 − U_j), and 1 − U_j is uniform on [0,1)
    let data = perm
        .iter()
        .map(|&k| stratum_point(k, rng.random::<f64>(), n as u64))
        .collect();
    PointSet::from_raw(1, n, data)
}

/// Latin hypercube sample: independent permutations per axis and independent jitter.
pub fn sample_lhs(n: usize, d: usize, rng: &mut RngStream) -> PointSet {
    let mut data = vec![0.0; n * d];
    let mut perm: Vec<u64> = (0..n as u64).collect();
    for i in 0..d {
        perm.shuffle(rng);
        for (j, &k) in perm.iter().enumerate() {
            data[j * d + i] = stratum_point(k, rng.random::<f64>(), n as u64);
        }
    }
    PointSet::from_raw(d, n, data)
}

/// Generalized stratified sampling: a uniform `N`-subset of the `β` strata,
/// one uniform point in each selected stratum, rows shuffled.
pub fn sample_gss(
    beta: usize,
    strata: &StrataSpec,
    n: usize,
    d: usize,
    rng: &mut RngStream,
) -> Result<PointSet> {
    SchemeSpec::GeneralizedStratified {
        beta,
        strata: strata.clone(),
    }
    .validate(n, d)?;
    let mut chosen = index::sample(rng, beta, n).into_vec();
    chosen.shuffle(rng);
    let mut data = Vec::with_capacity(n * d);
    match strata {
        StrataSpec::Stripes { .. } => {
            for &k in &chosen {
                data.push(stratum_point(k as u64, rng.random::<f64>(), beta as u64));
                data.extend((1..d).map(|_| rng.random::<f64>()));
            }
        }
        StrataSpec::LatticeCells { g, n: p } => {
            let cells = LatticeCells::new(g, *p)?;
            for &k in &chosen {
                data.extend(cells.sample_in_cell(k, rng));
            }
        }
    }
    Ok(PointSet::from_raw(d, n, data))
}

/// Pair probabilities of the four-slot scheme in units of 1/32, indexed by
/// slot (0: `[0,½)²`, 1: `[½,1)×[0,½)`, 2: `[0,½)×[½,1)`, 3: `[½,1)²`).
pub const FOUR_SLOT_TABLE_32: [[u32; 4]; 4] = [
    [2, 0, 1, 5],
    [0, 2, 5, 1],
    [1, 5, 2, 0],
    [5, 1, 0, 2],
];

/// Lower-left corner of a four-slot quadrant, in units of ½.
pub(crate) fn slot_offset(slot: usize) -> [u64; 2] {
    [(slot % 2) as u64, (slot / 2) as u64]
}

pub fn sample_four_slot(rng: &mut RngStream) -> PointSet {
    let mut r = rng.random_range(0..32u32);
    let mut pair = (0, 0);
    'outer: for (i, row) in FOUR_SLOT_TABLE_32.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if r < w {
                pair = (i, j);
                break 'outer;
            }
            r -= w;
        }
    }
    let mut data = Vec::with_capacity(4);
    for slot in [pair.0, pair.1] {
        for off in slot_offset(slot) {
            data.push(stratum_point(off, rng.random::<f64>(), 2));
        }
    }
    PointSet::from_raw(2, 2, data)
}

pub fn sample_swap(rng: &mut RngStream) -> PointSet {
    let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
    PointSet::from_raw(2, 2, vec![x, y, y, x])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cell_index, is_net};

    fn occupancy(p: &PointSet, axis: usize, n: u64) -> Vec<usize> {
        let mut occ = vec![0; n as usize];
        for r in p.rows() {
            occ[cell_index(r[axis], n) as usize] += 1;
        }
        occ
    }

    #[test]
    fn simple_stratified_one_per_stratum() {
        let root = RngStream::new(1);
        for rep in 0..1000 {
            let p = sample(&SchemeSpec::SimpleStratified, 4, 1, &mut root.split(rep)).unwrap();
            assert_eq!(occupancy(&p, 0, 4), vec![1; 4]);
        }
        let one = sample_simple_stratified(1, &mut root.split(9999));
        assert!((0.0..1.0).contains(&one.row(0)[0]));
    }

    #[test]
    fn simple_stratified_pair_never_in_same_half() {
        let root = RngStream::new(2);
        let both_low = (0..100_000)
            .filter(|&r| {
                let p = sample_simple_stratified(2, &mut root.split(r));
                let low = p.rows().all(|x| x[0] < 0.5);
                low
            })
            .count();
        assert_eq!(both_low, 0);
    }

    #[test]
    fn lhs_one_per_slice_on_every_axis() {
        let root = RngStream::new(3);
        for rep in 0..500 {
            let p = sample(&SchemeSpec::LatinHypercube, 3, 2, &mut root.split(rep)).unwrap();
            for axis in 0..2 {
                assert_eq!(occupancy(&p, axis, 3), vec![1; 3]);
            }
        }
        let both_low = (0..100_000)
            .filter(|&r| {
                let p = sample_lhs(2, 2, &mut root.split(10_000 + r));
                let low = p.rows().all(|x| x[0] < 0.5 && x[1] < 0.5);
                low
            })
            .count();
        assert_eq!(both_low, 0);
    }

    #[test]
    fn rsj_one_point_per_vertical_slab() {
        let root = RngStream::new(4);
        for rep in 0..10_000 {
            let p = sample(&SchemeSpec::RsjRank1Lattice, 5, 2, &mut root.split(rep)).unwrap();
            assert_eq!(occupancy(&p, 0, 5), vec![1; 5]);
            assert_eq!(occupancy(&p, 1, 5), vec![1; 5]);
        }
    }

    #[test]
    fn rsj_rejects_composite_and_accepts_two() {
        let mut rng = RngStream::new(5);
        assert_eq!(
            sample(&SchemeSpec::RsjRank1Lattice, 6, 2, &mut rng),
            Err(Error::NotPrime(6))
        );
        let p = sample(&SchemeSpec::RsjRank1Lattice, 2, 3, &mut rng).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn gss_with_beta_equal_n_covers_every_stripe() {
        let root = RngStream::new(6);
        let spec = SchemeSpec::GeneralizedStratified {
            beta: 6,
            strata: StrataSpec::Stripes { n: 6 },
        };
        for rep in 0..500 {
            let p = sample(&spec, 6, 3, &mut root.split(rep)).unwrap();
            assert_eq!(occupancy(&p, 0, 6), vec![1; 6]);
        }
    }

    #[test]
    fn gss_selection_marginal_is_hypergeometric() {
        let root = RngStream::new(7);
        let reps = 100_000;
        let hits = (0..reps)
            .filter(|&r| {
                let p = sample_gss(5, &StrataSpec::Stripes { n: 5 }, 3, 1, &mut root.split(r))
                    .unwrap();
                occupancy(&p, 0, 5)[2] == 1
            })
            .count();
        let p = 0.6;
        let sd = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((hits as f64 / reps as f64 - p).abs() <= 4.0 * sd);
    }

    #[test]
    fn gss_lattice_cells_distinct() {
        let cells = LatticeCells::new(&[1, 2], 5).unwrap();
        let strata = StrataSpec::LatticeCells { g: vec![1, 2], n: 5 };
        let root = RngStream::new(8);
        for rep in 0..2000 {
            let p = sample_gss(5, &strata, 5, 2, &mut root.split(rep)).unwrap();
            let mut seen: Vec<usize> = p.rows().map(|r| cells.cell_of(r)).collect();
            seen.sort();
            assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn parameter_errors() {
        let mut rng = RngStream::new(0);
        let gss = SchemeSpec::GeneralizedStratified {
            beta: 2,
            strata: StrataSpec::Stripes { n: 2 },
        };
        assert!(sample(&gss, 3, 1, &mut rng).is_err());
        let net = SchemeSpec::ScrambledNet { base: 3, m: 2, s: 2 };
        assert!(sample(&net, 8, 2, &mut rng).is_err());
        assert!(sample(&net, 9, 3, &mut rng).is_err());
        let mixed = SchemeSpec::Mixed {
            left: Box::new(SchemeSpec::LatinHypercube),
            d_left: 2,
            right: Box::new(SchemeSpec::MonteCarlo),
            d_right: 3,
        };
        assert!(sample(&mixed, 4, 4, &mut rng).is_err());
        assert!(matches!(
            sample(&SchemeSpec::MinCopula, 2, 1, &mut rng),
            Err(Error::Unsupported(_))
        ));
        assert!(sample(&SchemeSpec::SimpleStratified, 4, 2, &mut rng).is_err());
    }

    #[test]
    fn mixed_concatenates_and_replays() {
        let spec = SchemeSpec::Mixed {
            left: Box::new(SchemeSpec::LatinHypercube),
            d_left: 2,
            right: Box::new(SchemeSpec::MonteCarlo),
            d_right: 3,
        };
        let a = sample(&spec, 16, 5, &mut RngStream::new(42)).unwrap();
        let b = sample(&spec, 16, 5, &mut RngStream::new(42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 5);
        for axis in 0..2 {
            assert_eq!(occupancy(&a, axis, 16), vec![1; 16]);
        }
    }

    #[test]
    fn scrambled_net_through_dispatcher() {
        let spec = SchemeSpec::ScrambledNet { base: 3, m: 2, s: 2 };
        let p = sample(&spec, 9, 2, &mut RngStream::new(1)).unwrap();
        assert!(is_net(&p, 3, 2, 2, 0).unwrap());
    }

    #[test]
    fn four_slot_table_sums_to_one() {
        let total: u32 = FOUR_SLOT_TABLE_32.iter().flatten().sum();
        assert_eq!(total, 32);
        for (i, row) in FOUR_SLOT_TABLE_32.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, FOUR_SLOT_TABLE_32[j][i]);
            }
            let row: u32 = row.iter().sum();
            assert_eq!(row, 8, "slot marginal must be 1/4");
        }
    }

    #[test]
    fn stratum_point_stays_in_stratum() {
        for n in [3u64, 5, 7, 10, 1 << 20] {
            for k in [0, n / 2, n - 1] {
                for u in [0.0, 0.5, 1.0f64.next_down()] {
                    let x = stratum_point(k, u, n);
                    assert!(x >= k as f64 / n as f64 && x < (k + 1) as f64 / n as f64);
                }
            }
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec: SchemeSpec = serde_json::from_str(
            r#"{"scheme":"mixed","left":{"scheme":"latin_hypercube"},"d_left":2,
                "right":{"scheme":"monte_carlo"},"d_right":3}"#,
        )
        .unwrap();
        assert_eq!(spec.label(), "lhs:2+mc:3");
        assert!(serde_json::from_str::<SchemeSpec>(r#"{"scheme":"monte_carlo","x":1}"#).is_err());
    }
}

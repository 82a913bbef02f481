//! The acceptance suite: twelve end-to-end checks with pinned tolerances.
//!
//! Each criterion returns an outcome with a one-line summary and the tables
//! behind it, so the same code drives the test target and `report`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{c0_bound_theta, hoeffding_tail, BoundParams};
use crate::discrepancy::{star_discrepancy_cover, star_discrepancy_exact};
use crate::error::Result;
use crate::geometry::{build_delta_cover, is_net, CornerBox1, Interval};
use crate::integrate::{maxlemma_check, variance_study, TestFunction};
use crate::negdep::{
    corner_cells, lhs_anchored_prob_exact, min_copula_cdf, min_copula_rect_prob, rsj_small_prob,
    test_conditional_nqd, test_pairwise_nd, AnalyticTwoPointScheme, RectEvent, Verdict,
};
use crate::samplers::{
    faure_net, is_prime, sample, sample_lhs, sample_mc, sample_scrambled_net, PointSet, RngStream,
    SchemeSpec, FOUR_SLOT_TABLE_32,
};
use crate::stats::{wilson_interval, Z_999};

pub const CRITERIA: u8 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 20_190_501 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub summary: String,
    /// Wall-clock limit the criterion must finish within.
    pub time_limit_secs: f64,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl CriterionOutcome {
    /// `PASS [ 5] title: summary (1.23 s)`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary,
            self.elapsed.as_secs_f64()
        )
    }
}

struct Check {
    passed: bool,
    summary: String,
    tables: Vec<Table>,
}

fn f(x: f64) -> String {
    x.to_string()
}

/// Runs criterion `id` (1–12).
pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let rng = RngStream::new(cfg.seed).split(id as u64);
    type Runner = fn(RngStream) -> Result<Check>;
    let (title, limit, run): (&str, f64, Runner) = match id {
        1 => ("min-copula counterexample", 1.0, min_copula),
        2 => ("four-slot conditional counterexample", 1.0, four_slot),
        3 => ("swap-scheme counterexamples", 1.0, swap_scheme),
        4 => ("RSJ exact lower bound", 10.0, rsj_lower_bound),
        5 => ("LHS oracle vs simulation", 300.0, lhs_oracle),
        6 => ("C0 theta bound at desk scale", 600.0, c0_desk_scale),
        7 => ("Hoeffding tail", 60.0, hoeffding),
        8 => ("variance reduction", 300.0, variance_reduction),
        9 => ("concatenation", 1.0, concatenation),
        10 => ("discrepancy engine", 60.0, discrepancy_engine),
        11 => ("net machinery", 600.0, net_machinery),
        12 => ("max lemma", 60.0, max_lemma),
        _ => {
            return Err(crate::Error::invalid(format!(
                "criterion id must lie in 1..={CRITERIA}, got {id}"
            )))
        }
    };
    let start = Instant::now();
    let check = run(rng)?;
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < limit;
    let mut summary = check.summary;
    if !in_time {
        summary.push_str(&format!("; exceeded {limit} s"));
    }
    Ok(CriterionOutcome {
        id,
        title: title.into(),
        passed: check.passed && in_time,
        summary,
        time_limit_secs: limit,
        elapsed,
        tables: check.tables,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CriterionOutcome>> {
    (1..=CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}

fn min_copula(_: RngStream) -> Result<Check> {
    let witness = min_copula_rect_prob([0.75, 0.25], RectEvent::Upper)?;
    let f34 = min_copula_cdf(0.75, 0.25);
    let product = (1.0 - 0.75) * (1.0 - 0.25);
    let mut ok = (witness - 0.25).abs() <= 1e-15 && (f34 - 0.25).abs() <= 1e-15 && witness > product;
    let mut table = Table::new("min_copula_diagonal", &["q", "f_qq", "q_squared"]);
    for k in 1..=9 {
        let q = k as f64 / 10.0;
        let v = min_copula_rect_prob([q, q], RectEvent::Lower)?;
        ok &= (v - q * q).abs() <= 1e-15;
        table.push(vec![f(q), f(v), f(q * q)]);
    }
    let rep = test_pairwise_nd(
        &SchemeSpec::MinCopula,
        2,
        &CornerBox1::new(vec![0.75])?,
        &CornerBox1::new(vec![0.25])?,
        0,
        &mut RngStream::new(0),
    )?;
    ok &= rep.hit.verdict == Verdict::Violated;
    Ok(Check {
        passed: ok,
        summary: format!("P(p1>=3/4, p2>=1/4) = {witness} > {product}; F(q,q) = q^2 on 0.1..0.9"),
        tables: vec![table],
    })
}

fn four_slot(_: RngStream) -> Result<Check> {
    let total: u32 = FOUR_SLOT_TABLE_32.iter().flatten().sum();
    let half = Interval::new(vec![0.5], vec![1.0])?;
    let r = test_conditional_nqd(&SchemeSpec::FourSlot, 2, 2, 1, &half, &half, 0.5, 0.5, 0, &mut RngStream::new(0))?;
    let ok = total == 32
        && (r.lhs - 1.0 / 3.0).abs() <= 1e-15
        && (r.rhs - 0.25).abs() <= 1e-15
        && r.verdict == Verdict::Violated;
    Ok(Check {
        passed: ok,
        summary: format!("conditional joint {} vs product {}", r.lhs, r.rhs),
        tables: vec![],
    })
}

fn swap_scheme(_: RngStream) -> Result<Check> {
    let s = AnalyticTwoPointScheme::SwapScheme;
    let u = CornerBox1::new(vec![0.5, 0.5])?;
    let pair = test_pairwise_nd(&SchemeSpec::SwapScheme, 2, &u, &u, 0, &mut RngStream::new(0))?;
    let mut ok = (pair.hit.lhs - 0.25).abs() <= 1e-12
        && (pair.hit.rhs - 1.0 / 16.0).abs() <= 1e-12
        && pair.hit.verdict == Verdict::Violated;
    // closed form P(X ≥ max(u1, v2)) P(Y ≥ max(u2, v1))
    let full = Interval::from(&u);
    ok &= (s.joint_prob(&full, &full)? - 0.25).abs() <= 1e-12;

    let mut table = Table::new("swap_conditional", &["a", "b", "alpha", "beta", "lhs", "rhs"]);
    let boxes = [
        Interval::new(vec![0.2], vec![0.7])?,
        Interval::new(vec![0.5], vec![1.0])?,
        Interval::unit(1),
    ];
    let grid = [0.25, 0.5, 0.75];
    let mut worst = 0.0f64;
    for (a, b) in [(&boxes[0], &boxes[1]), (&boxes[2], &boxes[2]), (&boxes[1], &boxes[0])] {
        for &al in &grid {
            for &be in &grid {
                let r = test_conditional_nqd(&SchemeSpec::SwapScheme, 2, 2, 1, a, b, al, be, 0, &mut RngStream::new(0))?;
                worst = worst.max((r.lhs - r.rhs).abs());
                ok &= r.verdict == Verdict::Holds;
                table.push(vec![
                    format!("[{};{})", a.a[0], a.b[0]),
                    format!("[{};{})", b.a[0], b.b[0]),
                    f(al),
                    f(be),
                    f(r.lhs),
                    f(r.rhs),
                ]);
            }
        }
    }
    ok &= worst <= 1e-12;
    Ok(Check {
        passed: ok,
        summary: format!(
            "pairwise {} > {}; conditional max |lhs - rhs| = {worst:e}",
            pair.hit.lhs, pair.hit.rhs
        ),
        tables: vec![table],
    })
}

/// `6 / (N²(N−1)²(N−2))` against `(3/N)^6`.
fn rsj_sides(n: u64) -> (f64, f64) {
    let nf = n as f64;
    (
        6.0 / (nf * nf * (nf - 1.0) * (nf - 1.0) * (nf - 2.0)),
        (3.0 / nf).powi(6),
    )
}

/// Smallest prime from which `6/(N²(N−1)²(N−2)) > (3/N)^6` holds for every
/// prime up to `limit`.
pub fn rsj_threshold_prime(limit: u64) -> Option<u64> {
    let mut first = None;
    for n in (3..=limit).filter(|&n| is_prime(n)) {
        let (lower, product) = rsj_sides(n);
        if lower > product {
            first.get_or_insert(n);
        } else {
            first = None;
        }
    }
    first
}

fn rsj_lower_bound(_: RngStream) -> Result<Check> {
    let v = rsj_small_prob(5, &corner_cells(3, 3), 3)?;
    let threshold = rsj_threshold_prime(10_000);
    let mut table = Table::new("rsj_threshold", &["n", "triple_lower_bound", "product"]);
    for n in (3..=200).filter(|&n| is_prime(n)) {
        let (a, b) = rsj_sides(n);
        table.push(vec![n.to_string(), f(a), f(b)]);
    }
    Ok(Check {
        passed: v >= 0.005 && threshold.is_some(),
        summary: format!(
            "P(p1,p2,p3 in [0,3/5)^2) = {v} >= 0.005; lower bound beats product from prime N = {}",
            threshold.map_or("none".into(), |n| n.to_string())
        ),
        tables: vec![table],
    })
}

const LHS_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn grid_points(d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                LHS_GRID.iter().map(move |&q| {
                    let mut p = p.clone();
                    p.push(q);
                    p
                })
            })
            .collect();
    }
    out
}

/// Counts replications in which the first `t` points lie in `[0,q)`, for every `q` at once.
fn count_anchored(
    reps: u64,
    root: &RngStream,
    draw: impl Fn(&mut RngStream) -> PointSet + Sync,
    grid: &[Vec<f64>],
    t: usize,
) -> Vec<u64> {
    (0..reps)
        .into_par_iter()
        .fold(
            || vec![0u64; grid.len()],
            |mut acc, r| {
                let p = draw(&mut root.split(r));
                for (c, q) in acc.iter_mut().zip(grid) {
                    if p.rows().take(t).all(|x| x.iter().zip(q).all(|(a, b)| a < b)) {
                        *c += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; grid.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn lhs_oracle(rng: RngStream) -> Result<Check> {
    let reps = 100_000u64;
    let mut table = Table::new(
        "lhs_oracle",
        &["n", "d", "t", "q", "exact", "empirical", "wilson_lo", "wilson_hi", "inside", "nd_holds"],
    );
    let (mut cells, mut inside, mut nd_ok) = (0usize, 0usize, true);
    for (k, (n, d, t)) in [(4usize, 2usize, 2usize), (6, 2, 3), (8, 3, 4)].into_iter().enumerate() {
        let grid = grid_points(d);
        let counts = count_anchored(reps, &rng.split(k as u64), |r| sample_lhs(n, d, r), &grid, t);
        for (q, &c) in grid.iter().zip(&counts) {
            let exact = lhs_anchored_prob_exact(n as u64, q, t as u64)?;
            let (lo, hi) = wilson_interval(c, reps, Z_999);
            let is_inside = lo <= exact && exact <= hi;
            let nd = exact <= q.iter().product::<f64>().powi(t as i32);
            cells += 1;
            inside += is_inside as usize;
            nd_ok &= nd;
            let qs: Vec<String> = q.iter().map(|v| v.to_string()).collect();
            table.push(vec![
                n.to_string(),
                d.to_string(),
                t.to_string(),
                qs.join(";"),
                f(exact),
                f(c as f64 / reps as f64),
                f(lo),
                f(hi),
                is_inside.to_string(),
                nd.to_string(),
            ]);
        }
    }
    let frac = inside as f64 / cells as f64;
    Ok(Check {
        passed: frac >= 0.99 && nd_ok,
        summary: format!("{inside}/{cells} cells inside the 99.9% interval; oracle ND inequality {}", if nd_ok { "holds" } else { "FAILS" }),
        tables: vec![table],
    })
}

fn c0_desk_scale(rng: RngStream) -> Result<Check> {
    let (n, d, reps) = (256usize, 2usize, 500u64);
    let bound = c0_bound_theta(&BoundParams::new(n as u64, d, 0.0).with_theta(0.9))?.bound_value;
    let mut table = Table::new("c0_desk_scale", &["scheme", "rep", "star_discrepancy", "bound", "within"]);
    let mut parts = vec![];
    let mut ok = true;
    for (k, spec) in [SchemeSpec::LatinHypercube, SchemeSpec::MonteCarlo].iter().enumerate() {
        let root = rng.split(k as u64);
        let ds: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let p = sample(spec, n, d, &mut root.split(r))?;
                Ok(star_discrepancy_exact(&p)?.value)
            })
            .collect::<Result<_>>()?;
        let within = ds.iter().filter(|&&v| v <= bound).count();
        for (r, v) in ds.iter().enumerate() {
            table.push(vec![spec.label(), r.to_string(), f(*v), f(bound), (*v <= bound).to_string()]);
        }
        let frac = within as f64 / reps as f64;
        ok &= frac >= 0.9;
        let max = ds.iter().cloned().fold(0.0, f64::max);
        parts.push(format!("{} {within}/{reps} (max D* {max:.4})", spec.label()));
    }
    Ok(Check {
        passed: ok,
        summary: format!("bound {bound:.4}; {}", parts.join(", ")),
        tables: vec![table],
    })
}

fn hoeffding(rng: RngStream) -> Result<Check> {
    let (n, reps, vol) = (100usize, 100_000u64, 0.3);
    let ts = [5.0, 10.0, 15.0];
    let counts = (0..reps)
        .into_par_iter()
        .fold(
            || [0u64; 3],
            |mut acc, r| {
                let p = sample_mc(n, 1, &mut rng.split(r));
                let s = p.rows().filter(|x| x[0] < vol).count() as f64 - vol * n as f64;
                for (c, t) in acc.iter_mut().zip(ts) {
                    *c += (s.abs() >= t) as u64;
                }
                acc
            },
        )
        .reduce(|| [0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let mut table = Table::new("hoeffding", &["t", "empirical", "stderr", "bound", "within"]);
    let mut ok = true;
    let mut parts = vec![];
    for (t, c) in ts.iter().zip(counts) {
        let p = c as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let bound = hoeffding_tail(n as u64, *t, 1.0)?;
        let within = p - 3.0 * se <= bound;
        ok &= within;
        table.push(vec![f(*t), f(p), f(se), f(bound), within.to_string()]);
        parts.push(format!("t={t}: {p:.5} <= {bound:.5}"));
    }
    Ok(Check {
        passed: ok,
        summary: parts.join(", "),
        tables: vec![table],
    })
}

fn variance_reduction(mut rng: RngStream) -> Result<Check> {
    let reps = 10_000;
    let cells = [
        (SchemeSpec::LatinHypercube, 64usize, 3usize, TestFunction::ProductCoords),
        (SchemeSpec::LatinHypercube, 64, 3, TestFunction::CornerIndicator { a: vec![0.3, 0.5, 0.7] }),
        (SchemeSpec::RsjRank1Lattice, 5, 2, TestFunction::ProductCoords),
        (SchemeSpec::RsjRank1Lattice, 5, 2, TestFunction::CornerIndicator { a: vec![0.3, 0.5] }),
    ];
    let mut table = Table::new(
        "variance",
        &crate::integrate::VarianceStudy::CSV_COLUMNS,
    );
    let mut ok = true;
    let mut parts = vec![];
    for (spec, n, d, func) in &cells {
        let s = variance_study(spec, func, *n, *d, reps, &mut rng)?;
        ok &= s.no_worse_than_mc(3.0);
        parts.push(format!("{}/{} {:.3}±{:.3}", s.scheme, s.function, s.ratio, s.ratio_stderr));
        table.push(s.csv_record());
    }
    Ok(Check {
        passed: ok,
        summary: format!("ratios {}", parts.join(", ")),
        tables: vec![table],
    })
}

fn binomial(t: usize, k: usize) -> f64 {
    (0..k).map(|i| (t - i) as f64 / (i + 1) as f64).product()
}

fn concatenation(_: RngStream) -> Result<Check> {
    let n = 6u64;
    let grid_a = [0.2, 0.45, 0.7, 1.0];
    let grid_b = [[0.3, 0.9], [0.5, 0.5], [0.8, 0.25], [1.0, 0.6]];
    let mut table = Table::new(
        "concatenation",
        &["right", "a", "b", "t", "upper_joint", "upper_rhs", "lower_joint", "lower_rhs"],
    );
    let mut worst_factor = 0.0f64;
    let mut ok = true;
    for &a in &grid_a {
        for b in &grid_b {
            let va = a;
            let vb = b[0] * b[1];
            let v = va * vb;
            for t in 1..=4usize {
                let pa = |k: usize| -> Result<f64> {
                    if k == 0 {
                        Ok(1.0)
                    } else {
                        lhs_anchored_prob_exact(n, &[a], k as u64)
                    }
                };
                // right factor: LHS, or Monte Carlo for the hybrid sequence
                for right in ["lhs", "mc"] {
                    let pb = |k: usize| -> Result<f64> {
                        match (k, right) {
                            (0, _) => Ok(1.0),
                            (_, "lhs") => lhs_anchored_prob_exact(n, b, k as u64),
                            _ => Ok(vb.powi(k as i32)),
                        }
                    };
                    let upper = pa(t)? * pb(t)?;
                    if right == "lhs" {
                        // an LHS in d' + d'' dimensions is the concatenation of independent factors
                        let whole = lhs_anchored_prob_exact(n, &[a, b[0], b[1]], t as u64)?;
                        worst_factor = worst_factor.max((whole - upper).abs());
                    }
                    // P(no point of the first t in A×B) by inclusion–exclusion over exchangeable points
                    let mut lower = 0.0;
                    for k in 0..=t {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        lower += sign * binomial(t, k) * pa(k)? * pb(k)?;
                    }
                    let upper_rhs = v.powi(t as i32);
                    let lower_rhs = (1.0 - v).powi(t as i32);
                    ok &= upper <= upper_rhs + 1e-12 && lower <= lower_rhs + 1e-12;
                    table.push(vec![
                        right.into(),
                        f(a),
                        format!("{};{}", b[0], b[1]),
                        t.to_string(),
                        f(upper),
                        f(upper_rhs),
                        f(lower),
                        f(lower_rhs),
                    ]);
                }
            }
        }
    }
    ok &= worst_factor <= 1e-12;
    Ok(Check {
        passed: ok,
        summary: format!(
            "{} product boxes x t<=4, joint = product of factors to {worst_factor:e}; ND inequalities {}",
            grid_a.len() * grid_b.len(),
            if ok { "hold" } else { "FAIL" }
        ),
        tables: vec![table],
    })
}

fn discrepancy_engine(rng: RngStream) -> Result<Check> {
    let mut ok = true;
    let mut table = Table::new("centered_grid", &["n", "star_discrepancy", "expected"]);
    for n in [2usize, 4, 8, 16] {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![(2 * i + 1) as f64 / (2 * n) as f64]).collect();
        let v = star_discrepancy_exact(&PointSet::from_rows(1, &rows)?)?.value;
        let expect = 1.0 / (2 * n) as f64;
        ok &= (v - expect).abs() <= 1e-15;
        table.push(vec![n.to_string(), f(v), f(expect)]);
    }
    let mut sandwich = Table::new("cover_sandwich", &["set", "n", "d", "delta", "lower", "exact", "upper", "ok"]);
    let mut failures = 0;
    for k in 0..100u64 {
        let mut r = rng.split(k);
        let n = 1 + (k as usize * 7) % 32;
        let d = 1 + (k as usize % 2);
        let p = sample_mc(n, d, &mut r);
        let exact = star_discrepancy_exact(&p)?.value;
        for delta in [0.1, 0.05] {
            let c = star_discrepancy_cover(&p, delta)?;
            let good = c.lower <= exact && exact <= c.upper;
            failures += (!good) as usize;
            sandwich.push(vec![
                k.to_string(),
                n.to_string(),
                d.to_string(),
                f(delta),
                f(c.lower),
                f(exact),
                f(c.upper),
                good.to_string(),
            ]);
        }
    }
    ok &= failures == 0;
    let mut card_ok = true;
    for delta in [1.0, 0.5, 0.3, 0.25, 0.1, 0.07, 0.05, 0.01] {
        card_ok &= build_delta_cover(1, delta)?.len() == (1.0f64 / delta).ceil() as usize;
    }
    ok &= card_ok;
    Ok(Check {
        passed: ok,
        summary: format!(
            "centered grids exact; {failures} sandwich failures over 200 cases; d=1 cover sizes {}",
            if card_ok { "= ceil(1/delta)" } else { "WRONG" }
        ),
        tables: vec![table, sandwich],
    })
}

const NET_CORNERS: [f64; 4] = [0.1, 0.3, 0.6, 0.85];

fn net_machinery(rng: RngStream) -> Result<Check> {
    let mut ok = true;
    for (k, (b, m, s)) in [(2u64, 3u32, 1usize), (3, 2, 2), (5, 2, 3)].into_iter().enumerate() {
        ok &= is_net(&faure_net(b, m, s)?, b, m, s, 0)?;
        for r in 0..20 {
            let p = sample_scrambled_net(b, m, s, &mut rng.split(k as u64).split(r))?;
            ok &= is_net(&p, b, m, s, 0)?;
        }
    }
    let nets_ok = ok;
    let spec = SchemeSpec::ScrambledNet { base: 3, m: 2, s: 2 };
    let mut table = Table::new("net_pairwise", &crate::negdep::DependenceReport::CSV_COLUMNS);
    let mut violated = 0;
    let mut inconclusive = 0;
    let mut root = rng.split(100);
    for &u in &NET_CORNERS {
        for &v in &NET_CORNERS {
            let q = CornerBox1::new(vec![u, u])?;
            let r = CornerBox1::new(vec![v, v])?;
            let rep = test_pairwise_nd(&spec, 9, &q, &r, 100_000, &mut root)?;
            violated += rep.violated() as usize;
            inconclusive += [&rep.hit, &rep.miss]
                .iter()
                .filter(|x| x.verdict == Verdict::Inconclusive)
                .count();
            table.push(rep.hit.csv_record());
            table.push(rep.miss.csv_record());
        }
    }
    ok &= violated == 0;
    Ok(Check {
        passed: ok,
        summary: format!(
            "nets {} before and after scrambling; pairwise sweep: {violated} violated, {inconclusive}/32 inconclusive",
            if nets_ok { "valid" } else { "INVALID" }
        ),
        tables: vec![table],
    })
}

fn max_lemma(rng: RngStream) -> Result<Check> {
    let cases: Vec<(usize, usize, f64)> = (1..=8)
        .flat_map(|nv| (1..=nv).flat_map(move |t| [0.5, 1.0, 2.0].map(|xi| (nv, t, xi))))
        .collect();
    let outcomes = cases
        .par_iter()
        .enumerate()
        .map(|(k, &(nv, t, xi))| maxlemma_check(nv, t, xi, 100_000, &mut rng.split(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("max_lemma", &["nvars", "t", "xi", "centroid", "max_sampled", "passes"]);
    for o in &outcomes {
        table.push(vec![
            o.nvars.to_string(),
            o.t.to_string(),
            f(o.xi),
            f(o.centroid_value),
            f(o.max_sampled),
            o.passes.to_string(),
        ]);
    }
    let passed = outcomes.iter().filter(|o| o.passes).count();
    Ok(Check {
        passed: passed == outcomes.len(),
        summary: format!("{passed}/{} cases peak at the centroid", outcomes.len()),
        tables: vec![table],
    })
}

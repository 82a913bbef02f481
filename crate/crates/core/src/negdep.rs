//! Empirical and exact certification of negative dependence notions.
//!
//! Empirical testers draw `R` independent realizations of a scheme and compare
//! a Wilson 99% interval for the joint probability with the product
//! reference. The outcome is three-valued: a tester can refute or support an
//! inequality, and says so explicitly when it can do neither. Schemes with a
//! closed-form law (the two-point schemes below) are evaluated exactly.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CornerBox0, CornerBox1, Interval, Region};
use crate::integrate::elementary_symmetric;
use crate::samplers::{
    is_prime, sample, slot_offset, LatticeCells, PointSet, RngStream, SchemeSpec, StrataSpec,
    FOUR_SLOT_TABLE_32,
};
use crate::stats::{falling, wilson_halfwidth, Z_99};

/// Conditional testers give up below this many conditioning hits.
pub const MIN_CONDITIONING_HITS: u64 = 100;
/// Slack for exact comparisons, absorbing rounding in closed forms.
pub const EXACT_TOL: f64 = 1e-12;
/// Largest `N` accepted by [`rsj_small_prob`].
pub const RSJ_EXACT_MAX_N: u64 = 31;

const REPS_PER_TASK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    UpperNd,
    LowerNd,
    PairwiseNd,
    ConditionalNqd,
    CiNqd,
}

impl Notion {
    pub fn as_str(self) -> &'static str {
        match self {
            Notion::UpperNd => "upper_nd",
            Notion::LowerNd => "lower_nd",
            Notion::PairwiseNd => "pairwise_nd",
            Notion::ConditionalNqd => "conditional_nqd",
            Notion::CiNqd => "ci_nqd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `violated` iff `lhs − hw > rhs`, `holds` iff `lhs + hw ≤ rhs`.
    pub fn from_interval(lhs: f64, halfwidth: f64, rhs: f64) -> Verdict {
        if lhs - halfwidth > rhs {
            Verdict::Violated
        } else if lhs + halfwidth <= rhs {
            Verdict::Holds
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn exact(lhs: f64, rhs: f64) -> Verdict {
        if lhs > rhs + EXACT_TOL {
            Verdict::Violated
        } else {
            Verdict::Holds
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// What was tested: boxes, number of points, coordinates and thresholds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventDescriptor {
    pub boxes: Vec<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub coordinates: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub thresholds: Vec<f64>,
    pub gamma: f64,
    /// The event is the complement (all points miss their boxes).
    #[serde(default)]
    pub complement: bool,
}

impl EventDescriptor {
    /// Comma-free single-field rendering for CSV rows.
    pub fn compact(&self) -> String {
        let mut s = String::new();
        for (k, b) in self.boxes.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let axes: Vec<String> = b
                .a
                .iter()
                .zip(&b.b)
                .map(|(a, b)| format!("[{a};{b})"))
                .collect();
            s.push_str(&axes.join("x"));
        }
        if let Some(t) = self.t {
            let _ = write!(s, " t={t}");
        }
        if !self.coordinates.is_empty() {
            let c: Vec<String> = self.coordinates.iter().map(|c| c.to_string()).collect();
            let _ = write!(s, " coords={}", c.join(";"));
        }
        if !self.thresholds.is_empty() {
            let c: Vec<String> = self.thresholds.iter().map(|c| c.to_string()).collect();
            let _ = write!(s, " thresholds={}", c.join(";"));
        }
        let _ = write!(s, " gamma={}", self.gamma);
        if self.complement {
            s.push_str(" complement");
        }
        s.trim().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub notion: Notion,
    pub scheme: String,
    pub event: EventDescriptor,
    pub lhs: f64,
    pub rhs: f64,
    /// Zero for exact evaluations.
    pub ci_halfwidth: f64,
    pub verdict: Verdict,
    /// Zero for exact evaluations.
    pub replications: u64,
    pub exact: bool,
}

impl DependenceReport {
    pub const CSV_COLUMNS: [&'static str; 9] = [
        "notion",
        "scheme",
        "event",
        "lhs",
        "rhs",
        "ci_halfwidth",
        "verdict",
        "replications",
        "exact",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.notion.as_str().into(),
            self.scheme.clone(),
            self.event.compact(),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.ci_halfwidth.to_string(),
            self.verdict.as_str().into(),
            self.replications.to_string(),
            self.exact.to_string(),
        ]
    }

    fn empirical(
        notion: Notion,
        spec: &SchemeSpec,
        event: EventDescriptor,
        hits: u64,
        reps: u64,
        rhs: f64,
    ) -> Self {
        let lhs = hits as f64 / reps as f64;
        let hw = wilson_halfwidth(hits, reps, Z_99);
        let rhs = rhs.clamp(0.0, 1.0);
        DependenceReport {
            notion,
            scheme: spec.label(),
            event,
            lhs,
            rhs,
            ci_halfwidth: hw,
            verdict: Verdict::from_interval(lhs, hw, rhs),
            replications: reps,
            exact: false,
        }
    }

    fn exact(notion: Notion, spec: &SchemeSpec, event: EventDescriptor, lhs: f64, rhs: f64) -> Self {
        let lhs = lhs.clamp(0.0, 1.0);
        let rhs = rhs.clamp(0.0, 1.0);
        DependenceReport {
            notion,
            scheme: spec.label(),
            event,
            lhs,
            rhs,
            ci_halfwidth: 0.0,
            verdict: Verdict::exact(lhs, rhs),
            replications: 0,
            exact: true,
        }
    }
}

/// Two-point schemes whose joint law is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticTwoPointScheme {
    /// `d = 1`, joint CDF `F(x,y) = min{x, y, (x²+y²)/2}`.
    MinCopula,
    /// `d = 2`, quadrant slots drawn from a fixed pair table.
    FourSlot,
    /// `d = 2`, `p_1 = (X, Y)`, `p_2 = (Y, X)`.
    SwapScheme,
}

impl AnalyticTwoPointScheme {
    pub fn from_spec(spec: &SchemeSpec) -> Option<Self> {
        match spec {
            SchemeSpec::MinCopula => Some(Self::MinCopula),
            SchemeSpec::FourSlot => Some(Self::FourSlot),
            SchemeSpec::SwapScheme => Some(Self::SwapScheme),
            _ => None,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::MinCopula => 1,
            Self::FourSlot | Self::SwapScheme => 2,
        }
    }

    /// `P(p_1 ∈ A, p_2 ∈ B)`.
    pub fn joint_prob(self, a: &Interval, b: &Interval) -> Result<f64> {
        let d = self.dim();
        for q in [a, b] {
            q.validate()?;
            if q.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: q.dim(),
                });
            }
        }
        let p = match self {
            Self::MinCopula => {
                let f = min_copula_cdf;
                f(a.b[0], b.b[0]) - f(a.a[0], b.b[0]) - f(a.b[0], b.a[0]) + f(a.a[0], b.a[0])
            }
            Self::FourSlot => {
                let share = |q: &Interval, slot: usize| {
                    let [ox, oy] = slot_offset(slot);
                    let (x0, y0) = (ox as f64 / 2.0, oy as f64 / 2.0);
                    4.0 * q.axis_overlap(0, x0, x0 + 0.5) * q.axis_overlap(1, y0, y0 + 0.5)
                };
                let mut p = 0.0;
                for (i, row) in FOUR_SLOT_TABLE_32.iter().enumerate() {
                    for (j, &w) in row.iter().enumerate() {
                        p += w as f64 / 32.0 * share(a, i) * share(b, j);
                    }
                }
                p
            }
            Self::SwapScheme => {
                // X must lie in a's first and b's second side, Y the other way round.
                let x = (a.b[0].min(b.b[1]) - a.a[0].max(b.a[1])).max(0.0);
                let y = (a.b[1].min(b.b[0]) - a.a[1].max(b.a[0])).max(0.0);
                x * y
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }
}

/// `F(x, y) = min{x, y, (x² + y²)/2}`.
pub fn min_copula_cdf(x: f64, y: f64) -> f64 {
    x.min(y).min((x * x + y * y) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RectEvent {
    /// `p_1 ∈ [0,u_1), p_2 ∈ [0,u_2)`.
    Lower,
    /// `p_1 ∈ [u_1,1), p_2 ∈ [u_2,1)`.
    Upper,
}

pub fn min_copula_rect_prob(u: [f64; 2], which: RectEvent) -> Result<f64> {
    if u.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::invalid(format!("u must lie in [0,1]^2, got {u:?}")));
    }
    let f = min_copula_cdf;
    Ok(match which {
        RectEvent::Lower => f(u[0], u[1]),
        RectEvent::Upper => 1.0 - f(u[0], 1.0) - f(1.0, u[1]) + f(u[0], u[1]),
    })
}

/// Sums per-replication event counts over `reps` draws of `spec`.
///
/// Replication `r` uses the substream `root.split(r)`, and counts are
/// integers, so the result does not depend on the number of threads.
fn count_events<F>(
    spec: &SchemeSpec,
    n: usize,
    d: usize,
    reps: u64,
    rng: &mut RngStream,
    events: usize,
    record: F,
) -> Result<Vec<u64>>
where
    F: Fn(&PointSet, &mut [u64]) + Sync,
{
    if reps == 0 {
        return Err(Error::invalid("replications must be >= 1"));
    }
    spec.validate(n, d)?;
    let root = rng.fork();
    let tasks = reps.div_ceil(REPS_PER_TASK);
    (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut acc = vec![0u64; events];
            let end = ((task + 1) * REPS_PER_TASK).min(reps);
            for r in task * REPS_PER_TASK..end {
                let p = sample(spec, n, d, &mut root.split(r))?;
                record(&p, &mut acc);
            }
            Ok(acc)
        })
        .try_reduce(
            || vec![0u64; events],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

fn check_box(q: &Interval) -> Result<usize> {
    q.validate()?;
    if q.dim() == 0 {
        return Err(Error::invalid("test box must have d >= 1"));
    }
    Ok(q.dim())
}

fn check_t(t: usize, n: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::invalid(format!("t must satisfy 1 <= t <= N (t = {t}, N = {n})")));
    }
    Ok(())
}

fn analytic_n(a: AnalyticTwoPointScheme, n: usize, d: usize) -> Result<()> {
    if n != 2 || d != a.dim() {
        return Err(Error::invalid(format!(
            "{a:?} is a two-point scheme in d = {} (got N = {n}, d = {d})",
            a.dim()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn nd_test(
    spec: &SchemeSpec,
    n: usize,
    q: &Interval,
    t: usize,
    gamma: f64,
    reps: u64,
    rng: &mut RngStream,
    complement: bool,
) -> Result<DependenceReport> {
    let d = check_box(q)?;
    check_t(t, n)?;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::invalid("gamma must be positive and finite"));
    }
    let (notion, marginal) = if complement {
        (Notion::LowerNd, 1.0 - q.volume())
    } else {
        (Notion::UpperNd, q.volume())
    };
    let rhs = gamma * marginal.powi(t as i32);
    let event = EventDescriptor {
        boxes: vec![q.clone()],
        t: Some(t),
        gamma,
        complement,
        ..Default::default()
    };
    if let Some(a) = AnalyticTwoPointScheme::from_spec(spec) {
        analytic_n(a, n, d)?;
        let full = Interval::unit(d);
        let in_q = a.joint_prob(q, &full)?;
        let both = a.joint_prob(q, q)?;
        let lhs = match (t, complement) {
            (1, false) => in_q,
            (1, true) => 1.0 - in_q,
            (_, false) => both,
            (_, true) => 1.0 - in_q - a.joint_prob(&full, q)? + both,
        };
        return Ok(DependenceReport::exact(notion, spec, event, lhs, rhs));
    }
    let hits = count_events(spec, n, d, reps, rng, 1, |p, acc| {
        if p.rows().take(t).all(|x| q.contains_point(x) != complement) {
            acc[0] += 1;
        }
    })?;
    Ok(DependenceReport::empirical(notion, spec, event, hits[0], reps, rhs))
}

/// Upper ND: `P(p_1, …, p_t ∈ Q) ≤ γ · vol(Q)^t`.
#[allow(clippy::too_many_arguments)]
pub fn test_upper_nd(
    spec: &SchemeSpec,
    n: usize,
    q: &Interval,
    t: usize,
    gamma: f64,
    reps: u64,
    rng: &mut RngStream,
) -> Result<DependenceReport> {
    nd_test(spec, n, q, t, gamma, reps, rng, false)
}

/// Lower ND: `P(p_1, …, p_t ∉ Q) ≤ γ · (1 − vol(Q))^t`.
pub fn test_lower_nd(
    spec: &SchemeSpec,
    n: usize,
    q: &Interval,
    t: usize,
    gamma: f64,
    reps: u64,
    rng: &mut RngStream,
) -> Result<DependenceReport> {
    nd_test(spec, n, q, t, gamma, reps, rng, true)
}

/// Both forms of the pairwise inequality for one pair of boxes anchored at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseReport {
    /// `P(p_1 ∈ Q, p_2 ∈ R) ≤ vol(Q) vol(R)`.
    pub hit: DependenceReport,
    /// `P(p_1 ∉ Q, p_2 ∉ R) ≤ (1 − vol(Q))(1 − vol(R))`.
    pub miss: DependenceReport,
}

impl PairwiseReport {
    pub fn violated(&self) -> bool {
        self.hit.verdict == Verdict::Violated || self.miss.verdict == Verdict::Violated
    }
}

pub fn test_pairwise_nd(
    spec: &SchemeSpec,
    n: usize,
    q: &CornerBox1,
    r: &CornerBox1,
    reps: u64,
    rng: &mut RngStream,
) -> Result<PairwiseReport> {
    let (qi, ri) = (Interval::from(q), Interval::from(r));
    let d = check_box(&qi)?;
    if check_box(&ri)? != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: ri.dim(),
        });
    }
    if n < 2 {
        return Err(Error::invalid("pairwise tests need N >= 2"));
    }
    let (vq, vr) = (qi.volume(), ri.volume());
    let event = |complement| EventDescriptor {
        boxes: vec![qi.clone(), ri.clone()],
        t: Some(2),
        gamma: 1.0,
        complement,
        ..Default::default()
    };
    let rhs_hit = vq * vr;
    let rhs_miss = (1.0 - vq) * (1.0 - vr);
    if let Some(a) = AnalyticTwoPointScheme::from_spec(spec) {
        analytic_n(a, n, d)?;
        let full = Interval::unit(d);
        let both = a.joint_prob(&qi, &ri)?;
        let miss = 1.0 - a.joint_prob(&qi, &full)? - a.joint_prob(&full, &ri)? + both;
        return Ok(PairwiseReport {
            hit: DependenceReport::exact(Notion::PairwiseNd, spec, event(false), both, rhs_hit),
            miss: DependenceReport::exact(Notion::PairwiseNd, spec, event(true), miss, rhs_miss),
        });
    }
    let c = count_events(spec, n, d, reps, rng, 2, |p, acc| {
        let a = qi.contains_point(p.row(0));
        let b = ri.contains_point(p.row(1));
        if a && b {
            acc[0] += 1;
        }
        if !a && !b {
            acc[1] += 1;
        }
    })?;
    Ok(PairwiseReport {
        hit: DependenceReport::empirical(Notion::PairwiseNd, spec, event(false), c[0], reps, rhs_hit),
        miss: DependenceReport::empirical(Notion::PairwiseNd, spec, event(true), c[1], reps, rhs_miss),
    })
}

/// Halfwidth for an estimated product `p̂_1 p̂_2` from the marginal halfwidths.
fn product_halfwidth(p1: f64, h1: f64, p2: f64, h2: f64) -> f64 {
    p1 * h2 + p2 * h1 + h1 * h2
}

/// `cond × [lo,1) × [0,1)^{d−k−1}`, `k` the dimension of `cond`.
fn conditioned_box(cond: &Interval, lo: f64, d: usize) -> Interval {
    let mut a = cond.a.clone();
    let mut b = cond.b.clone();
    a.push(lo);
    b.push(1.0);
    a.resize(d, 0.0);
    b.resize(d, 1.0);
    Interval { a, b }
}

/// Conditional NQD on coordinate `coord` (0-based) given that the first
/// `coord` coordinates of `p_1` lie in `a` and those of `p_2` in `b`:
///
/// `P(p_1^(i) ≥ α, p_2^(i) ≥ β | ·) ≤ P(p_1^(i) ≥ α | ·) P(p_2^(i) ≥ β | ·)`.
///
/// The right-hand side is itself estimated; the reported halfwidth covers
/// both sides, so `violated` and `holds` remain conservative.
#[allow(clippy::too_many_arguments)]
pub fn test_conditional_nqd(
    spec: &SchemeSpec,
    n: usize,
    d: usize,
    coord: usize,
    a: &Interval,
    b: &Interval,
    alpha: f64,
    beta: f64,
    reps: u64,
    rng: &mut RngStream,
) -> Result<DependenceReport> {
    if coord >= d {
        return Err(Error::invalid(format!("coordinate {coord} out of range for d = {d}")));
    }
    for c in [a, b] {
        c.validate()?;
        if c.dim() != coord {
            return Err(Error::DimensionMismatch {
                expected: coord,
                got: c.dim(),
            });
        }
    }
    if !(0.0..1.0).contains(&alpha) || !(0.0..1.0).contains(&beta) {
        return Err(Error::invalid("thresholds must lie in [0,1)"));
    }
    if n < 2 {
        return Err(Error::invalid("pairwise tests need N >= 2"));
    }
    let event = EventDescriptor {
        boxes: vec![a.clone(), b.clone()],
        coordinates: vec![coord],
        thresholds: vec![alpha, beta],
        gamma: 1.0,
        ..Default::default()
    };
    if let Some(s) = AnalyticTwoPointScheme::from_spec(spec) {
        analytic_n(s, n, d)?;
        let ca = conditioned_box(a, 0.0, d);
        let cb = conditioned_box(b, 0.0, d);
        let ha = conditioned_box(a, alpha, d);
        let hb = conditioned_box(b, beta, d);
        let cond = s.joint_prob(&ca, &cb)?;
        if cond <= 0.0 {
            return Ok(DependenceReport {
                notion: Notion::ConditionalNqd,
                scheme: spec.label(),
                event,
                lhs: 0.0,
                rhs: 0.0,
                ci_halfwidth: 0.0,
                verdict: Verdict::Inconclusive,
                replications: 0,
                exact: true,
            });
        }
        let lhs = s.joint_prob(&ha, &hb)? / cond;
        let rhs = s.joint_prob(&ha, &cb)? / cond * (s.joint_prob(&ca, &hb)? / cond);
        return Ok(DependenceReport::exact(Notion::ConditionalNqd, spec, event, lhs, rhs));
    }
    let c = count_events(spec, n, d, reps, rng, 4, |p, acc| {
        let (x, y) = (p.row(0), p.row(1));
        if !(a.contains_point(&x[..coord]) && b.contains_point(&y[..coord])) {
            return;
        }
        acc[0] += 1;
        let (u, v) = (x[coord] >= alpha, y[coord] >= beta);
        acc[1] += (u && v) as u64;
        acc[2] += u as u64;
        acc[3] += v as u64;
    })?;
    let hits = c[0];
    let (lhs, rhs, hw) = if hits == 0 {
        (0.0, 0.0, 1.0)
    } else {
        let h = hits as f64;
        let (p, p1, p2) = (c[1] as f64 / h, c[2] as f64 / h, c[3] as f64 / h);
        let hw_rhs = product_halfwidth(
            p1,
            wilson_halfwidth(c[2], hits, Z_99),
            p2,
            wilson_halfwidth(c[3], hits, Z_99),
        );
        (p, p1 * p2, wilson_halfwidth(c[1], hits, Z_99) + hw_rhs)
    };
    let verdict = if hits < MIN_CONDITIONING_HITS {
        Verdict::Inconclusive
    } else {
        Verdict::from_interval(lhs, hw, rhs)
    };
    Ok(DependenceReport {
        notion: Notion::ConditionalNqd,
        scheme: spec.label(),
        event,
        lhs,
        rhs,
        ci_halfwidth: hw,
        verdict,
        replications: reps,
        exact: false,
    })
}

/// One cross-coordinate factorization check: the joint tail event on
/// coordinates `i` and `j` against the product of the per-coordinate pair
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub coordinates: [usize; 2],
    /// `[q, r, s, t]`: `p_1^(i) ≥ q, p_2^(i) ≥ r, p_1^(j) ≥ s, p_2^(j) ≥ t`.
    pub thresholds: [f64; 4],
    pub joint: f64,
    pub product: f64,
    pub deviation: f64,
    pub ci_halfwidth: f64,
    /// `|deviation| ≤ ci_halfwidth`.
    pub consistent: bool,
}

/// Per-coordinate NQD plus finite factorization checks across coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiNqdReport {
    pub nqd: DependenceReport,
    pub factorization: Vec<FactorizationCheck>,
    /// Always true: independence of the coordinate pairs is only checked on a finite grid.
    pub partial: bool,
}

/// Thresholds for the other coordinate in factorization checks.
pub const FACTOR_GRID: [f64; 3] = [0.25, 0.5, 0.75];

/// `P(p_1^(i) ≥ q, p_2^(i) ≥ r) ≤ (1 − q)(1 − r)` for coordinate `coord`.
#[allow(clippy::too_many_arguments)]
pub fn test_ci_nqd(
    spec: &SchemeSpec,
    n: usize,
    d: usize,
    coord: usize,
    q: f64,
    r: f64,
    reps: u64,
    rng: &mut RngStream,
) -> Result<CiNqdReport> {
    if coord >= d {
        return Err(Error::invalid(format!("coordinate {coord} out of range for d = {d}")));
    }
    if !(0.0..1.0).contains(&q) || !(0.0..1.0).contains(&r) {
        return Err(Error::invalid("thresholds must lie in [0,1)"));
    }
    if n < 2 {
        return Err(Error::invalid("pairwise tests need N >= 2"));
    }
    let rhs = (1.0 - q) * (1.0 - r);
    let event = EventDescriptor {
        coordinates: vec![coord],
        thresholds: vec![q, r],
        gamma: 1.0,
        ..Default::default()
    };
    let others: Vec<usize> = (0..d).filter(|&j| j != coord).collect();
    let grid: Vec<(usize, f64, f64)> = others
        .iter()
        .flat_map(|&j| {
            FACTOR_GRID
                .iter()
                .flat_map(move |&s| FACTOR_GRID.iter().map(move |&t| (j, s, t)))
        })
        .collect();
    let tail = |lo1: &[(usize, f64)], lo2: &[(usize, f64)]| {
        let mk = |lo: &[(usize, f64)]| {
            let mut b = Interval::unit(d);
            for &(k, v) in lo {
                b.a[k] = v;
            }
            b
        };
        (mk(lo1), mk(lo2))
    };

    if let Some(s) = AnalyticTwoPointScheme::from_spec(spec) {
        analytic_n(s, n, d)?;
        let (b1, b2) = tail(&[(coord, q)], &[(coord, r)]);
        let lhs = s.joint_prob(&b1, &b2)?;
        let mut factorization = Vec::with_capacity(grid.len());
        for &(j, sj, tj) in &grid {
            let (c1, c2) = tail(&[(j, sj)], &[(j, tj)]);
            let (j1, j2) = tail(&[(coord, q), (j, sj)], &[(coord, r), (j, tj)]);
            let joint = s.joint_prob(&j1, &j2)?;
            let product = lhs * s.joint_prob(&c1, &c2)?;
            factorization.push(FactorizationCheck {
                coordinates: [coord, j],
                thresholds: [q, r, sj, tj],
                joint,
                product,
                deviation: joint - product,
                ci_halfwidth: 0.0,
                consistent: (joint - product).abs() <= EXACT_TOL,
            });
        }
        return Ok(CiNqdReport {
            nqd: DependenceReport::exact(Notion::CiNqd, spec, event, lhs, rhs),
            factorization,
            partial: true,
        });
    }

    // counters: 0 main pair; then per grid entry (pair on j, joint)
    let c = count_events(spec, n, d, reps, rng, 1 + 2 * grid.len(), |p, acc| {
        let (x, y) = (p.row(0), p.row(1));
        let main = x[coord] >= q && y[coord] >= r;
        acc[0] += main as u64;
        for (k, &(j, sj, tj)) in grid.iter().enumerate() {
            let pair = x[j] >= sj && y[j] >= tj;
            acc[1 + 2 * k] += pair as u64;
            acc[2 + 2 * k] += (pair && main) as u64;
        }
    })?;
    let rf = reps as f64;
    let main = c[0] as f64 / rf;
    let hw_main = wilson_halfwidth(c[0], reps, Z_99);
    let factorization = grid
        .iter()
        .enumerate()
        .map(|(k, &(j, sj, tj))| {
            let pair = c[1 + 2 * k] as f64 / rf;
            let joint = c[2 + 2 * k] as f64 / rf;
            let hw = wilson_halfwidth(c[2 + 2 * k], reps, Z_99)
                + product_halfwidth(main, hw_main, pair, wilson_halfwidth(c[1 + 2 * k], reps, Z_99));
            let product = main * pair;
            FactorizationCheck {
                coordinates: [coord, j],
                thresholds: [q, r, sj, tj],
                joint,
                product,
                deviation: joint - product,
                ci_halfwidth: hw,
                consistent: (joint - product).abs() <= hw,
            }
        })
        .collect();
    Ok(CiNqdReport {
        nqd: DependenceReport::empirical(Notion::CiNqd, spec, event, c[0], reps, rhs),
        factorization,
        partial: true,
    })
}

/// Exact `P(p_1, …, p_t ∈ [0,q))` for Latin hypercube sampling with `N` points.
///
/// On each axis the `t` points occupy `t` distinct slices, chosen uniformly.
/// Writing `q_i N = k_i + θ_i`, the first `k_i` slices lie inside the box and
/// slice `k_i` overlaps it with fraction `θ_i`, which gives
/// `∏_i [(k_i)_t + t θ_i (k_i)_{t−1}] / (N)_t`.
pub fn lhs_anchored_prob_exact(n: u64, q: &[f64], t: u64) -> Result<f64> {
    if t == 0 || t > n {
        return Err(Error::invalid(format!("t must satisfy 1 <= t <= N (t = {t}, N = {n})")));
    }
    if q.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::invalid("q must lie in [0,1]^d"));
    }
    let nt = falling(n, t);
    Ok(q.iter()
        .map(|&qi| {
            let x = qi * n as f64;
            let k = (x.floor() as u64).min(n);
            let theta = if k == n { 0.0 } else { x - k as f64 };
            (falling(k, t) + t as f64 * theta * falling(k, t - 1)) / nt
        })
        .product())
}

/// Volumes `λ(A ∩ B_j)` of a corner box with every stratum of the family.
pub fn strata_overlaps(strata: &StrataSpec, a: &CornerBox0) -> Result<Vec<f64>> {
    a.validate()?;
    let d = a.upper.len();
    match strata {
        StrataSpec::Stripes { n } => {
            if d == 0 || *n == 0 {
                return Err(Error::invalid("stripes need d >= 1 and n >= 1"));
            }
            let rest: f64 = a.upper[1..].iter().product();
            let nf = *n as f64;
            Ok((0..*n)
                .map(|j| {
                    let (lo, hi) = (j as f64 / nf, (j + 1) as f64 / nf);
                    (a.upper[0].min(hi) - lo).max(0.0) * rest
                })
                .collect())
        }
        StrataSpec::LatticeCells { g, n } => {
            if d != 2 || g.len() != 2 {
                return Err(Error::Unsupported(
                    "lattice-cell overlaps are implemented for d = 2 only".into(),
                ));
            }
            let cells = LatticeCells::new(g, *n)?;
            Ok((0..cells.count()).map(|k| cells.corner_overlap(k, &a.upper)).collect())
        }
    }
}

/// Exact `P(p_1, …, p_t ∈ A)` for generalized stratified sampling.
///
/// The first `t` points sit in an ordered uniform `t`-tuple of distinct strata,
/// so the probability is `t! e_t(β λ(A ∩ B_1), …, β λ(A ∩ B_β)) / (β)_t`.
pub fn gss_anchored_prob_exact(
    beta: usize,
    strata: &StrataSpec,
    a: &CornerBox0,
    n: usize,
    t: usize,
) -> Result<f64> {
    if strata.count() != beta {
        return Err(Error::invalid(format!(
            "strata family has {} cells but beta = {beta}",
            strata.count()
        )));
    }
    if n > beta {
        return Err(Error::invalid("generalized stratified sampling needs beta >= N"));
    }
    if t == 0 || t > n {
        return Err(Error::invalid(format!("t must satisfy 1 <= t <= N (t = {t}, N = {n})")));
    }
    let x: Vec<f64> = strata_overlaps(strata, a)?
        .into_iter()
        .map(|v| (beta as f64 * v).clamp(0.0, 1.0))
        .collect();
    let t_fact = falling(t as u64, t as u64);
    Ok((elementary_symmetric(&x, t) * t_fact / falling(beta as u64, t as u64)).clamp(0.0, 1.0))
}

/// Grid cells `(i, j)` with `i < k1`, `j < k2` of the `n × n` grid, i.e. the
/// cells of `[0, k1/n) × [0, k2/n)`.
pub fn corner_cells(k1: u64, k2: u64) -> Vec<[u64; 2]> {
    (0..k1).flat_map(|i| (0..k2).map(move |j| [i, j])).collect()
}

/// Exact `P(p_1, …, p_t ∈ Q)` for the RSJ rank-1 lattice in `d = 2`, `Q` a
/// union of cells of the `N × N` grid.
///
/// Every generator and shift places one point in each of `N` grid cells and
/// jitter keeps it there; if `K` of those cells lie in `Q`, the symmetrized
/// order puts the first `t` points in `Q` with probability `(K)_t / (N)_t`.
pub fn rsj_small_prob(n: u64, cells: &[[u64; 2]], t: u64) -> Result<f64> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if n > RSJ_EXACT_MAX_N {
        return Err(Error::BudgetExceeded {
            needed: (n as u128).pow(5),
            cap: (RSJ_EXACT_MAX_N as u128).pow(5),
        });
    }
    if t == 0 || t > n {
        return Err(Error::invalid(format!("t must satisfy 1 <= t <= N (t = {t}, N = {n})")));
    }
    let nu = n as usize;
    let mut in_q = vec![false; nu * nu];
    for &[i, j] in cells {
        if i >= n || j >= n {
            return Err(Error::invalid(format!("cell ({i}, {j}) outside the {n}x{n} grid")));
        }
        in_q[i as usize * nu + j as usize] = true;
    }
    let nt = falling(n, t);
    // tally[K] = number of (g, U) configurations with K points in Q
    let mut tally = vec![0u64; nu + 1];
    for g1 in 1..n {
        for g2 in 1..n {
            for u1 in 0..n {
                for u2 in 0..n {
                    let hits = (0..n)
                        .filter(|&k| {
                            let i = (k * g1 + u1) % n;
                            let j = (k * g2 + u2) % n;
                            in_q[i as usize * nu + j as usize]
                        })
                        .count();
                    tally[hits] += 1;
                }
            }
        }
    }
    let configs = ((n - 1) * (n - 1) * n * n) as f64;
    Ok(tally
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * falling(k as u64, t) / nt)
        .sum::<f64>()
        / configs)
}

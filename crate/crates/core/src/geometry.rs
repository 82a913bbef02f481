//! Half-open boxes in the unit cube, δ-covers and elementary intervals.
//!
//! All membership tests are half-open, `[a, b)` on every axis, and compare
//! floating-point values exactly. Constructions elsewhere in the crate only
//! produce coordinates of the form `k / n` computed the same way as the box
//! corners they are tested against, so no tolerance is needed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::PointSet;

/// A single point of `[0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::invalid(format!("point coordinate {c} outside [0,1)")));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Measurable subset of the unit cube with an exact volume and a membership test.
pub trait Region {
    fn dim(&self) -> usize;

    /// Lebesgue measure of the region.
    fn volume(&self) -> f64;

    /// Half-open membership. `p` must have `self.dim()` coordinates.
    fn contains_point(&self, p: &[f64]) -> bool;
}

/// Dimension-checked membership test.
pub fn contains<R: Region + ?Sized>(region: &R, p: &[f64]) -> Result<bool> {
    if p.len() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: p.len(),
        });
    }
    Ok(region.contains_point(p))
}

/// Lebesgue measure of any region.
pub fn volume<R: Region + ?Sized>(region: &R) -> f64 {
    region.volume()
}

fn check_unit(values: &[f64], what: &str) -> Result<()> {
    match values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(v) => Err(Error::invalid(format!("{what} coordinate {v} outside [0,1]"))),
        None => Ok(()),
    }
}

/// Box `[0, upper)` anchored at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerBox0 {
    pub upper: Vec<f64>,
}

impl CornerBox0 {
    pub fn new(upper: Vec<f64>) -> Result<Self> {
        let b = CornerBox0 { upper };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit(&self.upper, "corner")
    }

    pub fn full(d: usize) -> Self {
        CornerBox0 {
            upper: vec![1.0; d],
        }
    }

    pub fn is_subset_of(&self, other: &CornerBox0) -> bool {
        self.upper.len() == other.upper.len()
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a <= b)
    }
}

impl Region for CornerBox0 {
    fn dim(&self) -> usize {
        self.upper.len()
    }

    fn volume(&self) -> f64 {
        self.upper.iter().product()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        debug_assert_eq!(p.len(), self.upper.len());
        p.iter().zip(&self.upper).all(|(x, u)| x < u)
    }
}

/// Box `[lower, 1)` anchored at the all-ones corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerBox1 {
    pub lower: Vec<f64>,
}

impl CornerBox1 {
    pub fn new(lower: Vec<f64>) -> Result<Self> {
        let b = CornerBox1 { lower };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit(&self.lower, "corner")
    }
}

impl Region for CornerBox1 {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn volume(&self) -> f64 {
        self.lower.iter().map(|l| 1.0 - l).product()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        debug_assert_eq!(p.len(), self.lower.len());
        p.iter().zip(&self.lower).all(|(x, l)| x >= l && *x < 1.0)
    }
}

/// Axis-parallel box `[a, b)`. Degenerate (zero-volume) boxes are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Interval {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let i = Interval { a, b };
        i.validate()?;
        Ok(i)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a.len(),
                got: self.b.len(),
            });
        }
        check_unit(&self.a, "interval")?;
        check_unit(&self.b, "interval")?;
        if self.a.iter().zip(&self.b).any(|(a, b)| a > b) {
            return Err(Error::invalid("interval requires a <= b componentwise"));
        }
        Ok(())
    }

    /// The whole cube `[0,1)^d`.
    pub fn unit(d: usize) -> Self {
        Interval {
            a: vec![0.0; d],
            b: vec![1.0; d],
        }
    }

    /// Length of the overlap of axis `i` with `[lo, hi)`.
    pub fn axis_overlap(&self, i: usize, lo: f64, hi: f64) -> f64 {
        (self.b[i].min(hi) - self.a[i].max(lo)).max(0.0)
    }
}

impl From<&CornerBox0> for Interval {
    fn from(c: &CornerBox0) -> Self {
        Interval {
            a: vec![0.0; c.upper.len()],
            b: c.upper.clone(),
        }
    }
}

impl From<&CornerBox1> for Interval {
    fn from(c: &CornerBox1) -> Self {
        Interval {
            a: c.lower.clone(),
            b: vec![1.0; c.lower.len()],
        }
    }
}

impl Region for Interval {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn volume(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| b - a).product()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        debug_assert_eq!(p.len(), self.a.len());
        p.iter()
            .zip(self.a.iter().zip(&self.b))
            .all(|(x, (a, b))| a <= x && x < b)
    }
}

/// Difference `outer \ inner` of two corner boxes anchored at 0, `inner ⊆ outer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDiff {
    pub outer: CornerBox0,
    pub inner: CornerBox0,
}

impl BoxDiff {
    pub fn new(outer: CornerBox0, inner: CornerBox0) -> Result<Self> {
        let d = BoxDiff { outer, inner };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        self.inner.validate()?;
        if self.outer.dim() != self.inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.outer.dim(),
                got: self.inner.dim(),
            });
        }
        if !self.inner.is_subset_of(&self.outer) {
            return Err(Error::invalid("box difference requires inner ⊆ outer"));
        }
        Ok(())
    }
}

impl Region for BoxDiff {
    fn dim(&self) -> usize {
        self.outer.dim()
    }

    fn volume(&self) -> f64 {
        self.outer.volume() - self.inner.volume()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        self.outer.contains_point(p) && !self.inner.contains_point(p)
    }
}

/// Elementary interval `∏ [k_l b^{-j_l}, (k_l + 1) b^{-j_l})` in base `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementaryInterval {
    pub base: u64,
    pub j: Vec<u32>,
    pub k: Vec<u64>,
}

impl ElementaryInterval {
    pub fn new(base: u64, j: Vec<u32>, k: Vec<u64>) -> Result<Self> {
        let e = ElementaryInterval { base, j, k };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::invalid("elementary interval base must be >= 2"));
        }
        if self.j.len() != self.k.len() {
            return Err(Error::DimensionMismatch {
                expected: self.j.len(),
                got: self.k.len(),
            });
        }
        for (&j, &k) in self.j.iter().zip(&self.k) {
            let cells = checked_pow(self.base, j)
                .ok_or_else(|| Error::invalid("elementary interval resolution overflows"))?;
            if k >= cells {
                return Err(Error::invalid(format!(
                    "elementary interval index {k} out of range for b^j = {cells}"
                )));
            }
        }
        Ok(())
    }

    fn axis_bounds(&self, l: usize) -> (f64, f64) {
        let cells = self.base.pow(self.j[l]) as f64;
        (self.k[l] as f64 / cells, (self.k[l] + 1) as f64 / cells)
    }
}

impl Region for ElementaryInterval {
    fn dim(&self) -> usize {
        self.j.len()
    }

    fn volume(&self) -> f64 {
        let b = self.base as f64;
        self.j.iter().map(|&j| b.powi(-(j as i32))).product()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        (0..self.j.len()).all(|l| {
            let (lo, hi) = self.axis_bounds(l);
            lo <= p[l] && p[l] < hi
        })
    }
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Index `k` of the cell `[k/n, (k+1)/n)` containing `x`, using the same
/// floating-point corners as [`ElementaryInterval::contains_point`].
pub(crate) fn cell_index(x: f64, n: u64) -> u64 {
    let nf = n as f64;
    let mut k = ((x * nf).floor().max(0.0) as u64).min(n - 1);
    while k > 0 && x < k as f64 / nf {
        k -= 1;
    }
    while k + 1 < n && x >= (k + 1) as f64 / nf {
        k += 1;
    }
    k
}

/// Any of the box shapes accepted by the testers and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnyBox {
    Corner0(CornerBox0),
    Corner1(CornerBox1),
    Interval(Interval),
    Diff(BoxDiff),
}

impl AnyBox {
    pub fn validate(&self) -> Result<()> {
        match self {
            AnyBox::Corner0(b) => b.validate(),
            AnyBox::Corner1(b) => b.validate(),
            AnyBox::Interval(b) => b.validate(),
            AnyBox::Diff(b) => b.validate(),
        }
    }

    /// The box as a single interval, when it is one.
    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            AnyBox::Corner0(b) => Some(b.into()),
            AnyBox::Corner1(b) => Some(b.into()),
            AnyBox::Interval(b) => Some(b.clone()),
            AnyBox::Diff(_) => None,
        }
    }
}

impl Region for AnyBox {
    fn dim(&self) -> usize {
        match self {
            AnyBox::Corner0(b) => b.dim(),
            AnyBox::Corner1(b) => b.dim(),
            AnyBox::Interval(b) => b.dim(),
            AnyBox::Diff(b) => b.dim(),
        }
    }

    fn volume(&self) -> f64 {
        match self {
            AnyBox::Corner0(b) => b.volume(),
            AnyBox::Corner1(b) => b.volume(),
            AnyBox::Interval(b) => b.volume(),
            AnyBox::Diff(b) => b.volume(),
        }
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        match self {
            AnyBox::Corner0(b) => b.contains_point(p),
            AnyBox::Corner1(b) => b.contains_point(p),
            AnyBox::Interval(b) => b.contains_point(p),
            AnyBox::Diff(b) => b.contains_point(p),
        }
    }
}

// ---------------------------------------------------------------------------
// Box differences split along a coordinate block

/// One factor of a product set: either a corner box or a difference of corner boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    Corner(CornerBox0),
    Diff(BoxDiff),
}

impl Region for Factor {
    fn dim(&self) -> usize {
        match self {
            Factor::Corner(b) => b.dim(),
            Factor::Diff(b) => b.dim(),
        }
    }

    fn volume(&self) -> f64 {
        match self {
            Factor::Corner(b) => b.volume(),
            Factor::Diff(b) => b.volume(),
        }
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        match self {
            Factor::Corner(b) => b.contains_point(p),
            Factor::Diff(b) => b.contains_point(p),
        }
    }
}

/// Cartesian product `left × right` with `left` on the leading coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSet {
    pub left: Factor,
    pub right: Factor,
}

impl Region for ProductSet {
    fn dim(&self) -> usize {
        self.left.dim() + self.right.dim()
    }

    fn volume(&self) -> f64 {
        self.left.volume() * self.right.volume()
    }

    fn contains_point(&self, p: &[f64]) -> bool {
        let (l, r) = p.split_at(self.left.dim());
        self.left.contains_point(l) && self.right.contains_point(r)
    }
}

/// Splits `B \ A` into the disjoint pieces `(B'\A') × B''` and `A' × (B''\A'')`,
/// where primes denote the first `d_left` coordinates and double primes the rest.
pub fn split_box_difference(diff: &BoxDiff, d_left: usize) -> Result<(ProductSet, ProductSet)> {
    let d = diff.dim();
    if d_left == 0 || d_left >= d {
        return Err(Error::invalid(format!(
            "d_left must lie in 1..{d}, got {d_left}"
        )));
    }
    let (b1, b2) = diff.outer.upper.split_at(d_left);
    let (a1, a2) = diff.inner.upper.split_at(d_left);
    let corner = |v: &[f64]| CornerBox0 { upper: v.to_vec() };
    let first = ProductSet {
        left: Factor::Diff(BoxDiff {
            outer: corner(b1),
            inner: corner(a1),
        }),
        right: Factor::Corner(corner(b2)),
    };
    let second = ProductSet {
        left: Factor::Corner(corner(a1)),
        right: Factor::Diff(BoxDiff {
            outer: corner(b2),
            inner: corner(a2),
        }),
    };
    Ok((first, second))
}

// ---------------------------------------------------------------------------
// δ-covers

/// Finite point family Γ such that every `y` in `[0,1)^d` is bracketed by
/// `x ≤ y ≤ z` with `x, z ∈ Γ ∪ {0}` and `vol[0,z] − vol[0,x] ≤ δ`.
///
/// Members with a coordinate equal to 1 are kept in `upper_witnesses`, so that
/// everything in `points` stays inside `[0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCover {
    pub delta: f64,
    pub dim: usize,
    /// Grid resolution per axis.
    pub resolution: u64,
    points: Vec<f64>,
    upper_witnesses: Vec<f64>,
}

impl DeltaCover {
    /// Total cardinality `|Γ|`, both lists included.
    pub fn len(&self) -> usize {
        (self.points.len() + self.upper_witnesses.len()) / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn upper_witnesses(&self) -> impl Iterator<Item = &[f64]> {
        self.upper_witnesses.chunks_exact(self.dim)
    }

    /// All members of Γ.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points().chain(self.upper_witnesses())
    }

    /// Smallest bracketing gap for `y` found by scanning Γ ∪ {0}.
    pub fn bracket_gap(&self, y: &[f64]) -> f64 {
        let mut lower = 0.0_f64; // the origin is always admissible below y
        let mut upper = f64::INFINITY;
        for w in self.iter() {
            let vol: f64 = w.iter().product();
            if w.iter().zip(y).all(|(a, b)| a <= b) {
                lower = lower.max(vol);
            }
            if w.iter().zip(y).all(|(a, b)| a >= b) {
                upper = upper.min(vol);
            }
        }
        upper - lower
    }

    /// Checks the cover property at `samples` uniform random points.
    /// Returns the first failing point, if any.
    pub fn validate<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Option<Vec<f64>> {
        let tol = 1e-12;
        (0..samples)
            .map(|_| (0..self.dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>())
            .find(|y| self.bracket_gap(y) > self.delta + tol)
    }
}

/// Builds a δ-cover of `[0,1)^d` on the uniform grid `{1/m, …, 1}^d` with
/// `m = ⌈d/δ⌉`. For `d = 1` this has the minimal cardinality `⌈1/δ⌉`.
pub fn build_delta_cover(d: usize, delta: f64) -> Result<DeltaCover> {
    if d == 0 {
        return Err(Error::invalid("cover dimension must be >= 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1], got {delta}")));
    }
    let m = (d as f64 / delta).ceil() as u64;
    let total = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > 50_000_000 {
        return Err(Error::BudgetExceeded {
            needed: total,
            cap: 50_000_000,
        });
    }
    let mf = m as f64;
    let mut points = Vec::new();
    let mut upper = Vec::new();
    let mut idx = vec![1u64; d];
    loop {
        let target = if idx.contains(&m) { &mut upper } else { &mut points };
        target.extend(idx.iter().map(|&k| k as f64 / mf));
        // odometer over {1..m}^d
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(DeltaCover {
                    delta,
                    dim: d,
                    resolution: m,
                    points,
                    upper_witnesses: upper,
                });
            }
            if idx[axis] < m {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 1;
            axis += 1;
        }
    }
}

/// Value of the δ-cover cardinality bound, saturated at `u64::MAX` when it overflows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityBound {
    pub value: u64,
    pub saturated: bool,
}

/// `⌈2^d (d^d/d!) (1/δ + 1)^d⌉` for `d > 1`, and the exact `⌈1/δ⌉` for `d = 1`.
pub fn cover_cardinality_bound(d: usize, delta: f64) -> Result<CardinalityBound> {
    if d == 0 {
        return Err(Error::invalid("cover dimension must be >= 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1], got {delta}")));
    }
    let raw = if d == 1 {
        1.0 / delta
    } else {
        let df = d as f64;
        // d^d / d! as a product of d/k keeps intermediate values small
        let ratio: f64 = (1..=d).map(|k| df / k as f64).product();
        2f64.powi(d as i32) * ratio * (1.0 / delta + 1.0).powi(d as i32)
    };
    Ok(ceil_saturating(raw))
}

fn ceil_saturating(x: f64) -> CardinalityBound {
    if !x.is_finite() || x >= u64::MAX as f64 {
        return CardinalityBound {
            value: u64::MAX,
            saturated: true,
        };
    }
    // absorb rounding noise on values that are integers in exact arithmetic
    let r = x.round();
    let v = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    CardinalityBound {
        value: v as u64,
        saturated: false,
    }
}

// ---------------------------------------------------------------------------
// (t, m, s)-nets

/// True iff every elementary interval of volume `b^{t−m}` holds exactly `b^t` points.
pub fn is_net(points: &PointSet, b: u64, m: u32, s: usize, t: u32) -> Result<bool> {
    if b < 2 {
        return Err(Error::invalid("net base must be >= 2"));
    }
    if t > m {
        return Err(Error::invalid("net quality t must not exceed m"));
    }
    if points.dim() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: points.dim(),
        });
    }
    let n = checked_pow(b, m).ok_or_else(|| Error::invalid("b^m overflows"))?;
    if points.len() as u64 != n {
        return Err(Error::CountMismatch {
            expected: n as usize,
            got: points.len(),
        });
    }
    let per_cell = b.pow(t);
    let level = m - t;
    let cells = b.pow(level) as usize;
    let mut ok = true;
    for_each_composition(level, s, &mut |js| {
        if !ok {
            return;
        }
        let mut counts = vec![0u64; cells];
        for p in points.rows() {
            let mut flat = 0u64;
            for (l, &j) in js.iter().enumerate() {
                let res = b.pow(j);
                flat = flat * res + cell_index(p[l], res);
            }
            counts[flat as usize] += 1;
        }
        ok = counts.iter().all(|&c| c == per_cell);
    });
    Ok(ok)
}

/// Calls `f` with every vector of `parts` nonnegative integers summing to `total`.
fn for_each_composition(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(rest: u32, pos: usize, buf: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if pos + 1 == buf.len() {
            buf[pos] = rest;
            f(buf);
            return;
        }
        for v in 0..=rest {
            buf[pos] = v;
            rec(rest - v, pos + 1, buf, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = vec![0; parts];
    rec(total, 0, &mut buf, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c0(v: &[f64]) -> CornerBox0 {
        CornerBox0::new(v.to_vec()).unwrap()
    }

    #[test]
    fn volumes() {
        assert_eq!(c0(&[1.0, 1.0]).volume(), 1.0);
        let diff = BoxDiff::new(c0(&[1.0, 1.0]), c0(&[0.5, 0.5])).unwrap();
        assert_eq!(diff.volume(), 0.75);
        let e = ElementaryInterval::new(2, vec![1, 2], vec![0, 3]).unwrap();
        assert_eq!(e.volume(), 0.125);
        assert_eq!(CornerBox1::new(vec![0.25, 0.5]).unwrap().volume(), 0.375);
    }

    #[test]
    fn half_open_membership() {
        assert!(!contains(&c0(&[0.5, 0.5]), &[0.5, 0.2]).unwrap());
        assert!(contains(&CornerBox1::new(vec![0.5]).unwrap(), &[0.5]).unwrap());
        let diff = BoxDiff::new(c0(&[0.8, 0.8]), c0(&[0.3, 0.3])).unwrap();
        assert!(contains(&diff, &[0.2, 0.5]).unwrap());
        assert!(!contains(&diff, &[0.2, 0.2]).unwrap());
        let e = ElementaryInterval::new(3, vec![1], vec![1]).unwrap();
        assert!(e.contains_point(&[1.0 / 3.0]));
        assert!(!e.contains_point(&[2.0 / 3.0]));
    }

    #[test]
    fn membership_dimension_mismatch() {
        assert_eq!(
            contains(&c0(&[0.5, 0.5]), &[0.1]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert!(CornerBox0::new(vec![1.5]).is_err());
        assert!(Interval::new(vec![0.6], vec![0.5]).is_err());
        assert!(BoxDiff::new(c0(&[0.5, 0.5]), c0(&[0.6, 0.1])).is_err());
        assert!(ElementaryInterval::new(2, vec![1], vec![2]).is_err());
        assert!(Point::new(vec![0.2, 1.0]).is_err());
    }

    #[test]
    fn empirical_membership_matches_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let boxes: Vec<Box<dyn Region>> = vec![
            Box::new(c0(&[0.3, 0.7])),
            Box::new(CornerBox1::new(vec![0.25, 0.6]).unwrap()),
            Box::new(Interval::new(vec![0.1, 0.2], vec![0.4, 0.9]).unwrap()),
            Box::new(BoxDiff::new(c0(&[0.9, 0.8]), c0(&[0.4, 0.5])).unwrap()),
            Box::new(ElementaryInterval::new(3, vec![1, 1], vec![2, 0]).unwrap()),
        ];
        let n = 100_000;
        for b in &boxes {
            let hits = (0..n)
                .filter(|_| b.contains_point(&[rng.random::<f64>(), rng.random::<f64>()]))
                .count();
            let v = b.volume();
            let sd = (v * (1.0 - v) / n as f64).sqrt();
            assert!((hits as f64 / n as f64 - v).abs() <= 4.0 * sd, "{v}");
        }
    }

    #[test]
    fn split_examples() {
        let diff = BoxDiff::new(c0(&[1.0, 1.0]), c0(&[0.5, 0.5])).unwrap();
        let (p1, p2) = split_box_difference(&diff, 1).unwrap();
        assert_eq!(p1.volume(), 0.5);
        assert_eq!(p2.volume(), 0.25);

        let same = BoxDiff::new(c0(&[0.4, 0.7]), c0(&[0.4, 0.7])).unwrap();
        let (p1, p2) = split_box_difference(&same, 1).unwrap();
        assert_eq!((p1.volume(), p2.volume()), (0.0, 0.0));

        assert!(split_box_difference(&diff, 0).is_err());
        assert!(split_box_difference(&diff, 2).is_err());
    }

    #[test]
    fn split_is_disjoint_and_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let outer: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let inner: Vec<f64> = outer.iter().map(|o| o * rng.random::<f64>()).collect();
            let diff = BoxDiff::new(c0(&outer), c0(&inner)).unwrap();
            let (p1, p2) = split_box_difference(&diff, 2).unwrap();
            assert!((p1.volume() + p2.volume() - diff.volume()).abs() <= 1e-12);
            for _ in 0..10_000 {
                let y: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let (a, b) = (p1.contains_point(&y), p2.contains_point(&y));
                assert!(!(a && b), "pieces overlap at {y:?}");
                assert_eq!(a || b, diff.contains_point(&y));
            }
        }
    }

    #[test]
    fn split_volumes_match_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let diff = BoxDiff::new(c0(&[0.9, 0.7, 0.8]), c0(&[0.3, 0.6, 0.5])).unwrap();
        let (p1, p2) = split_box_difference(&diff, 2).unwrap();
        let n = 100_000;
        let mut hits = [0usize; 2];
        for _ in 0..n {
            let y: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            hits[0] += p1.contains_point(&y) as usize;
            hits[1] += p2.contains_point(&y) as usize;
        }
        for (h, p) in hits.iter().zip([&p1, &p2]) {
            let v = p.volume();
            let sd = (v * (1.0 - v) / n as f64).sqrt();
            assert!((*h as f64 / n as f64 - v).abs() <= 4.0 * sd);
        }
    }

    #[test]
    fn one_dimensional_cover_is_minimal() {
        for delta in [1.0, 0.5, 0.3, 0.25, 0.1, 0.07] {
            let cover = build_delta_cover(1, delta).unwrap();
            assert_eq!(cover.len() as f64, (1.0 / delta).ceil(), "delta {delta}");
        }
        assert_eq!(build_delta_cover(1, 0.25).unwrap().len(), 4);
        assert_eq!(build_delta_cover(1, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn cover_points_stay_in_unit_cube() {
        let cover = build_delta_cover(2, 0.5).unwrap();
        assert_eq!(cover.resolution, 4);
        assert!(cover.len() <= 25);
        assert!(cover.points().all(|p| p.iter().all(|&c| c < 1.0)));
        assert!(cover.upper_witnesses().all(|p| p.contains(&1.0)));
    }

    #[test]
    fn covers_pass_randomized_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=4 {
            for delta in [0.5, 0.2, 0.1] {
                let cover = build_delta_cover(d, delta).unwrap();
                // the brute-force bracket scan is O(|Γ|) per sample
                let samples = (2_000_000 / cover.len()).clamp(20, 10_000);
                assert_eq!(cover.validate(samples, &mut rng), None, "d={d} δ={delta}");
            }
        }
    }

    #[test]
    fn cover_rejects_bad_delta() {
        assert!(build_delta_cover(2, 0.0).is_err());
        assert!(build_delta_cover(2, 1.5).is_err());
        assert!(build_delta_cover(0, 0.5).is_err());
    }

    #[test]
    fn cardinality_bound_values() {
        assert_eq!(cover_cardinality_bound(1, 0.1).unwrap().value, 10);
        assert_eq!(cover_cardinality_bound(2, 0.5).unwrap().value, 72);
        assert_eq!(cover_cardinality_bound(3, 0.25).unwrap().value, 4500);
        let huge = cover_cardinality_bound(400, 0.01).unwrap();
        assert!(huge.saturated);
        assert!(cover_cardinality_bound(2, 0.0).is_err());
    }

    #[test]
    fn net_checker_small_cases() {
        let good = PointSet::from_rows(1, &[vec![0.0], vec![0.5]]).unwrap();
        assert!(is_net(&good, 2, 1, 1, 0).unwrap());
        let bad = PointSet::from_rows(1, &[vec![0.0], vec![0.25]]).unwrap();
        assert!(!is_net(&bad, 2, 1, 1, 0).unwrap());
        assert!(matches!(
            is_net(&good, 2, 2, 1, 0),
            Err(Error::CountMismatch { .. })
        ));
    }

    #[test]
    fn cell_index_consistent_with_intervals() {
        for n in [3u64, 5, 7, 9, 25, 27] {
            for k in 0..n {
                let x = k as f64 / n as f64;
                assert_eq!(cell_index(x, n), k);
                let e = ElementaryInterval {
                    base: n,
                    j: vec![1],
                    k: vec![k],
                };
                assert!(e.contains_point(&[x]));
            }
        }
    }
}

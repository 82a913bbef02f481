//! RQMC estimation, quasivolumes, variance comparisons against Monte Carlo,
//! and a numeric check that elementary symmetric polynomials peak at the
//! simplex centroid.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Interval, Region};
use crate::samplers::{sample, RngStream, SchemeSpec};
use crate::stats::{moments, pairwise_sum};

/// Largest dimension for which quasivolumes (2^d corner evaluations) are computed.
pub const MAX_QUASIVOLUME_DIM: usize = 20;
/// Quasivolumes above `−QUASI_TOL` count as nonnegative.
pub const QUASI_TOL: f64 = 1e-12;
/// Minimum replications for a variance study.
pub const MIN_VARIANCE_REPS: usize = 30;

/// Shared integrand closure.
pub type Integrand = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A user-supplied integrand with declared structural properties.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub eval: Integrand,
    /// Monotone in each coordinate.
    pub monotone: bool,
    pub quasimonotone: bool,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("monotone", &self.monotone)
            .field("quasimonotone", &self.quasimonotone)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", from = "RawTestFunction")]
pub enum TestFunction {
    /// `∏ x_i`.
    ProductCoords,
    /// `Σ x_i`.
    SumCoords,
    /// Indicator of `[a, 1)`.
    CornerIndicator { a: Vec<f64> },
    /// `−∏ x_i`.
    NegProduct,
    #[serde(skip)]
    Custom(CustomFunction),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawTestFunction {
    ProductCoords {},
    SumCoords {},
    CornerIndicator { a: Vec<f64> },
    NegProduct {},
}

impl From<RawTestFunction> for TestFunction {
    fn from(raw: RawTestFunction) -> Self {
        match raw {
            RawTestFunction::ProductCoords {} => TestFunction::ProductCoords,
            RawTestFunction::SumCoords {} => TestFunction::SumCoords,
            RawTestFunction::CornerIndicator { a } => TestFunction::CornerIndicator { a },
            RawTestFunction::NegProduct {} => TestFunction::NegProduct,
        }
    }
}

impl TestFunction {
    pub fn custom(
        name: impl Into<String>,
        monotone: bool,
        quasimonotone: bool,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction::Custom(CustomFunction {
            name: name.into(),
            eval: Arc::new(eval),
            monotone,
            quasimonotone,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::ProductCoords => x.iter().product(),
            TestFunction::SumCoords => x.iter().sum(),
            TestFunction::CornerIndicator { a } => {
                if x.iter().zip(a).all(|(x, a)| x >= a) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::NegProduct => -x.iter().product::<f64>(),
            TestFunction::Custom(c) => (c.eval)(x),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::ProductCoords => "product".into(),
            TestFunction::SumCoords => "sum".into(),
            TestFunction::CornerIndicator { a } => {
                let a: Vec<String> = a.iter().map(|v| v.to_string()).collect();
                format!("corner[{}]", a.join(";"))
            }
            TestFunction::NegProduct => "neg_product".into(),
            TestFunction::Custom(c) => c.name.clone(),
        }
    }

    /// `∫_{[0,1)^d} f`, when known in closed form.
    pub fn integral(&self, d: usize) -> Option<f64> {
        match self {
            TestFunction::ProductCoords => Some(0.5f64.powi(d as i32)),
            TestFunction::SumCoords => Some(d as f64 / 2.0),
            TestFunction::CornerIndicator { a } => Some(a.iter().map(|a| 1.0 - a).product()),
            TestFunction::NegProduct => Some(-(0.5f64.powi(d as i32))),
            TestFunction::Custom(_) => None,
        }
    }

    /// Declared: monotone in each coordinate.
    pub fn monotone(&self) -> bool {
        match self {
            TestFunction::Custom(c) => c.monotone,
            _ => true,
        }
    }

    /// Declared: `f` is quasimonotone (for `NegProduct` only `−f` is).
    pub fn quasimonotone(&self) -> bool {
        match self {
            TestFunction::NegProduct => false,
            TestFunction::Custom(c) => c.quasimonotone,
            _ => true,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if let TestFunction::CornerIndicator { a } = self {
            if a.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: a.len(),
                });
            }
            if a.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::invalid("corner indicator needs a in [0,1]^d"));
            }
        }
        Ok(())
    }
}

/// One draw of `μ_P f = (1/N) Σ f(p_i)`.
pub fn rqmc_estimate(spec: &SchemeSpec, f: &TestFunction, n: usize, d: usize, rng: &mut RngStream) -> Result<f64> {
    f.validate(d)?;
    let p = sample(spec, n, d, rng)?;
    let values: Vec<f64> = p.rows().map(|x| f.eval(x)).collect();
    Ok(pairwise_sum(&values) / n as f64)
}

/// `Δ^d(f, [a,b)) = Σ_{J ⊆ [d]} (−1)^{|J|} f(a_J, b_{−J})`, where coordinates
/// in `J` are taken from `a` and the rest from `b`. In one dimension this is
/// `f(b) − f(a)`, and for `∏ x_i` it is `∏ (b_i − a_i)`.
pub fn quasivolume(f: &TestFunction, a: &Interval) -> Result<f64> {
    a.validate()?;
    let d = a.dim();
    if d > MAX_QUASIVOLUME_DIM {
        return Err(Error::invalid(format!(
            "quasivolume needs 2^d evaluations; d = {d} exceeds {MAX_QUASIVOLUME_DIM}"
        )));
    }
    f.validate(d)?;
    let mut x = vec![0.0; d];
    let terms: Vec<f64> = (0u64..1 << d)
        .map(|mask| {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = if mask >> i & 1 == 1 { a.a[i] } else { a.b[i] };
            }
            let v = f.eval(&x);
            if mask.count_ones() % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum QuasiScan {
    Passes { intervals: usize },
    Counterexample { interval: Interval, quasivolume: f64 },
}

impl QuasiScan {
    pub fn passes(&self) -> bool {
        matches!(self, QuasiScan::Passes { .. })
    }
}

/// Resolution `2^k` of the deterministic grid scanned by [`is_quasimonotone_scan`].
fn scan_grid_level(d: usize) -> u32 {
    (1..=4).rev().find(|&k| (k as usize) * d <= 12).unwrap_or(0)
}

/// Looks for an interval with `Δ^d(f, A) < −1e−12`: first every cell of a
/// dyadic grid, then `trials` random intervals.
pub fn is_quasimonotone_scan(f: &TestFunction, d: usize, trials: usize, rng: &mut RngStream) -> Result<QuasiScan> {
    if d == 0 || d > MAX_QUASIVOLUME_DIM {
        return Err(Error::invalid(format!("quasimonotonicity scan needs 1 <= d <= {MAX_QUASIVOLUME_DIM}")));
    }
    f.validate(d)?;
    let mut checked = 0;
    let mut check = |interval: Interval| -> Result<Option<QuasiScan>> {
        checked += 1;
        let q = quasivolume(f, &interval)?;
        Ok((q < -QUASI_TOL).then_some(QuasiScan::Counterexample {
            interval,
            quasivolume: q,
        }))
    };
    let k = scan_grid_level(d);
    if k > 0 {
        let m = 1u64 << k;
        let cells = m.pow(d as u32);
        for c in 0..cells {
            let mut a = vec![0.0; d];
            let mut b = vec![0.0; d];
            let mut rest = c;
            for i in 0..d {
                let j = rest % m;
                rest /= m;
                a[i] = j as f64 / m as f64;
                b[i] = (j + 1) as f64 / m as f64;
            }
            if let Some(found) = check(Interval { a, b })? {
                return Ok(found);
            }
        }
    }
    for _ in 0..trials {
        let (a, b): (Vec<f64>, Vec<f64>) = (0..d)
            .map(|_| {
                let (u, v) = (rng.random::<f64>(), rng.random::<f64>());
                (u.min(v), u.max(v))
            })
            .unzip();
        if let Some(found) = check(Interval { a, b })? {
            return Ok(found);
        }
    }
    Ok(QuasiScan::Passes { intervals: checked })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceStudy {
    pub scheme: String,
    pub function: String,
    pub n: usize,
    pub d: usize,
    pub replications: usize,
    pub mean_scheme: f64,
    pub mean_mc: f64,
    pub var_scheme: f64,
    pub var_mc: f64,
    /// `var_scheme / var_mc`.
    pub ratio: f64,
    /// Delta-method standard error of `ratio`.
    pub ratio_stderr: f64,
}

impl VarianceStudy {
    pub const CSV_COLUMNS: [&'static str; 11] = [
        "scheme",
        "function",
        "n",
        "d",
        "replications",
        "mean_scheme",
        "mean_mc",
        "var_scheme",
        "var_mc",
        "ratio",
        "ratio_stderr",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.scheme.clone(),
            self.function.clone(),
            self.n.to_string(),
            self.d.to_string(),
            self.replications.to_string(),
            self.mean_scheme.to_string(),
            self.mean_mc.to_string(),
            self.var_scheme.to_string(),
            self.var_mc.to_string(),
            self.ratio.to_string(),
            self.ratio_stderr.to_string(),
        ]
    }

    /// `ratio ≤ 1 + k · stderr`.
    pub fn no_worse_than_mc(&self, k: f64) -> bool {
        self.ratio <= 1.0 + k * self.ratio_stderr
    }
}

fn estimates(spec: &SchemeSpec, f: &TestFunction, n: usize, d: usize, reps: usize, root: &RngStream) -> Result<Vec<f64>> {
    (0..reps as u64)
        .into_par_iter()
        .map(|r| rqmc_estimate(spec, f, n, d, &mut root.split(r)))
        .collect()
}

/// Compares `Var(μ_P f)` with `Var(μ^MC f)` over `reps` independent draws of each.
///
/// With `Var(s²) ≈ (m_4 − s⁴)/R` for each sample variance, the ratio's
/// standard error is `ratio · sqrt(Var(s_P²)/s_P⁴ + Var(s_MC²)/s_MC⁴)`.
pub fn variance_study(
    spec: &SchemeSpec,
    f: &TestFunction,
    n: usize,
    d: usize,
    reps: usize,
    rng: &mut RngStream,
) -> Result<VarianceStudy> {
    if reps < MIN_VARIANCE_REPS {
        return Err(Error::invalid(format!(
            "variance study needs at least {MIN_VARIANCE_REPS} replications, got {reps}"
        )));
    }
    spec.validate(n, d)?;
    f.validate(d)?;
    let root = rng.fork();
    let a = estimates(spec, f, n, d, reps, &root.split(0))?;
    let m = estimates(&SchemeSpec::MonteCarlo, f, n, d, reps, &root.split(1))?;
    let (mean_a, var_a, m4_a) = moments(&a);
    let (mean_m, var_m, m4_m) = moments(&m);
    let r = reps as f64;
    let (ratio, ratio_stderr) = if var_m > 0.0 {
        let ratio = var_a / var_m;
        let rel_a = if var_a > 0.0 {
            ((m4_a - var_a * var_a) / r).max(0.0) / (var_a * var_a)
        } else {
            0.0
        };
        let rel_m = ((m4_m - var_m * var_m) / r).max(0.0) / (var_m * var_m);
        (ratio, ratio * (rel_a + rel_m).sqrt())
    } else if var_a > 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        (1.0, 0.0)
    };
    Ok(VarianceStudy {
        scheme: spec.label(),
        function: f.label(),
        n,
        d,
        replications: reps,
        mean_scheme: mean_a,
        mean_mc: mean_m,
        var_scheme: var_a,
        var_mc: var_m,
        ratio,
        ratio_stderr,
    })
}

/// `e_t(x) = Σ_{|S| = t} ∏_{i∈S} x_i` by the `O(n t)` recurrence
/// `e_k ← e_k + x_i e_{k−1}`.
pub fn elementary_symmetric(x: &[f64], t: usize) -> f64 {
    if t > x.len() {
        return 0.0;
    }
    let mut e = vec![0.0; t + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=t.min(i + 1)).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e[t]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxLemmaOutcome {
    pub nvars: usize,
    pub t: usize,
    pub xi: f64,
    pub trials: usize,
    pub centroid_value: f64,
    pub max_sampled: f64,
    pub passes: bool,
}

/// Samples `e_t` on the simplex `{x ≥ 0, Σ x = ξ}` (flat Dirichlet via
/// normalized exponentials) and checks that no draw exceeds the value at the
/// centroid `(ξ/n, …, ξ/n)` by more than a relative `1e−12`.
pub fn maxlemma_check(nvars: usize, t: usize, xi: f64, trials: usize, rng: &mut RngStream) -> Result<MaxLemmaOutcome> {
    if nvars == 0 || nvars > 8 {
        return Err(Error::invalid(format!("nvars must satisfy 1 <= nvars <= 8, got {nvars}")));
    }
    if t > nvars {
        return Err(Error::invalid(format!("t = {t} exceeds nvars = {nvars}")));
    }
    if !xi.is_finite() || xi < 0.0 {
        return Err(Error::invalid("xi must be finite and nonnegative"));
    }
    let centroid = elementary_symmetric(&vec![xi / nvars as f64; nvars], t);
    let mut x = vec![0.0; nvars];
    let mut max_sampled = f64::NEG_INFINITY;
    for _ in 0..trials {
        for v in x.iter_mut() {
            *v = -(1.0 - rng.random::<f64>()).ln();
        }
        let s: f64 = x.iter().sum();
        for v in x.iter_mut() {
            *v *= xi / s;
        }
        max_sampled = max_sampled.max(elementary_symmetric(&x, t));
    }
    let limit = centroid * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    Ok(MaxLemmaOutcome {
        nvars,
        t,
        xi,
        trials,
        centroid_value: centroid,
        max_sampled,
        passes: max_sampled <= limit,
    })
}

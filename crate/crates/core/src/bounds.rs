//! Probabilistic star discrepancy bounds for negatively dependent sampling
//! schemes, and the Hoeffding-type tail bound behind them.
//!
//! All logarithms are natural. `ρ ≥ 0` encodes the dependence constant
//! `γ = e^{ρd}`. Success probabilities are clamped to `[0, 1]`; the raw
//! formula value is kept alongside for audit.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::discrepancy::Weights;
use crate::error::{Error, Result};

pub const GH_SLOPE: f64 = 1.6741;
pub const GH_OFFSET: f64 = 10.7042;
pub const GH_THETA_SCALE: f64 = 0.7729;
pub const WEIGHTED_SLOPE: f64 = 1.674;
pub const WEIGHTED_THETA_OFFSET: f64 = 10.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub n: u64,
    pub d: usize,
    #[serde(default)]
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl BoundParams {
    pub fn new(n: u64, d: usize, rho: f64) -> Self {
        BoundParams {
            n,
            d,
            rho,
            theta: None,
            c: None,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    fn check(&self) -> Result<(f64, f64)> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::invalid(format!(
                "bounds need N >= 1 and d >= 1 (N = {}, d = {})",
                self.n, self.d
            )));
        }
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(Error::invalid(format!("rho must be finite and >= 0, got {}", self.rho)));
        }
        Ok((self.n as f64, self.d as f64))
    }

    fn require_c(&self) -> Result<f64> {
        match self.c {
            Some(c) if c > 0.0 && c.is_finite() => Ok(c),
            Some(c) => Err(Error::invalid(format!("c must be finite and > 0, got {c}"))),
            None => Err(Error::invalid("this bound needs c")),
        }
    }

    fn require_theta(&self) -> Result<f64> {
        match self.theta {
            Some(t) if t > 0.0 && t < 1.0 => Ok(t),
            Some(t) => Err(Error::invalid(format!("theta must lie in (0,1), got {t}"))),
            None => Err(Error::invalid("this bound needs theta")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    /// `c √(d/N)`.
    GhC,
    /// `0.7729 √(10.7042 + ρ + ln(1/(1−θ))/d) √(d/N)`.
    GhTheta,
    /// Twice [`FormulaId::GhTheta`], for mixed sequences.
    GhThetaMixed,
    /// `c √((d/N) max{1, ln(N/d)})`.
    C0C,
    /// `√(2/N) √(d ln η + ρd + ln(2/(1−θ)))`.
    C0Theta,
    /// `max_u c γ_u √(|u|/N)`.
    WeightedC,
    /// As [`FormulaId::WeightedC`] with `c = c_θ`.
    WeightedTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub formula: FormulaId,
    pub bound_value: f64,
    /// Clamped to `[0, 1]`.
    pub success_prob: f64,
    pub unclamped_prob: f64,
    pub clamped: bool,
    /// `η(N, d)` for [`FormulaId::C0Theta`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl BoundResult {
    fn new(formula: FormulaId, bound_value: f64, prob: f64) -> Self {
        let success_prob = prob.clamp(0.0, 1.0);
        BoundResult {
            formula,
            bound_value,
            success_prob,
            unclamped_prob: prob,
            clamped: success_prob != prob,
            eta: None,
        }
    }
}

/// `2 γ exp(−2t²/N)`.
pub fn hoeffding_tail(n: u64, t: f64, gamma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("N must be >= 1"));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::invalid(format!("t must be > 0, got {t}")));
    }
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::invalid(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    Ok(2.0 * gamma * (-2.0 * t * t / n as f64).exp())
}

/// `c √(d/N)` with probability at least `1 − e^{−(1.6741c² − 10.7042 − ρ)d}`.
pub fn gh_bound(p: &BoundParams) -> Result<BoundResult> {
    let (n, d) = p.check()?;
    let c = p.require_c()?;
    let prob = 1.0 - (-(GH_SLOPE * c * c - GH_OFFSET - p.rho) * d).exp();
    Ok(BoundResult::new(FormulaId::GhC, c * (d / n).sqrt(), prob))
}

/// `0.7729 √(10.7042 + ρ + ln(1/(1−θ))/d) √(d/N)` with probability `θ`.
pub fn gh_bound_theta(p: &BoundParams) -> Result<BoundResult> {
    let (n, d) = p.check()?;
    let theta = p.require_theta()?;
    let value = GH_THETA_SCALE * (GH_OFFSET + p.rho + (1.0 / (1.0 - theta)).ln() / d).sqrt() * (d / n).sqrt();
    Ok(BoundResult::new(FormulaId::GhTheta, value, theta))
}

/// Twice [`gh_bound_theta`]: the bound for a mixed sequence.
pub fn gh_bound_theta_mixed(p: &BoundParams) -> Result<BoundResult> {
    let r = gh_bound_theta(p)?;
    Ok(BoundResult {
        formula: FormulaId::GhThetaMixed,
        bound_value: 2.0 * r.bound_value,
        ..r
    })
}

/// `ξ = max{1, ln(N/d)}`.
pub fn xi(n: f64, d: f64) -> f64 {
    (n / d).ln().max(1.0)
}

/// `c √((d/N) ξ)` with probability at least
/// `1 − 2 e^{(−½(c²−1)ξ + ρ + ln(2e(2/c+1)))d}`.
pub fn c0_bound(p: &BoundParams) -> Result<BoundResult> {
    let (n, d) = p.check()?;
    let c = p.require_c()?;
    let xi = xi(n, d);
    let exponent = (-0.5 * (c * c - 1.0) * xi + p.rho + (2.0 * E * (2.0 / c + 1.0)).ln()) * d;
    let prob = 1.0 - 2.0 * exponent.exp();
    Ok(BoundResult::new(FormulaId::C0C, c * (d / n * xi).sqrt(), prob))
}

/// `η(N, d) = 6e · max(1, N/(2d ln 6e))^{1/2}`.
pub fn eta(n: u64, d: usize) -> f64 {
    let six_e = 6.0 * E;
    6.0 * E * (n as f64 / (2.0 * d as f64 * six_e.ln())).max(1.0).sqrt()
}

/// Whether `((η/2e) − 1) √(ln η) ≥ √(2N/d)`, the condition the choice of `η` must meet.
pub fn eta_condition_holds(n: u64, d: usize) -> bool {
    let e = eta(n, d);
    (e / (2.0 * E) - 1.0) * e.ln().sqrt() >= (2.0 * n as f64 / d as f64).sqrt()
}

/// `√(2/N) √(d ln η + ρd + ln(2/(1−θ)))` with probability `θ`.
pub fn c0_bound_theta(p: &BoundParams) -> Result<BoundResult> {
    let (n, d) = p.check()?;
    let theta = p.require_theta()?;
    let eta = eta(p.n, p.d);
    let value = (2.0 / n).sqrt() * (d * eta.ln() + p.rho * d + (2.0 / (1.0 - theta)).ln()).sqrt();
    Ok(BoundResult {
        eta: Some(eta),
        ..BoundResult::new(FormulaId::C0Theta, value, theta)
    })
}

/// `max_{∅≠u} γ_u √|u|` over the subsets carrying weight.
///
/// For product weights the best subset of each size `k` takes the `k` largest
/// weights, so sorting replaces the enumeration of `2^d` subsets.
fn weighted_max(weights: &Weights, d: usize) -> Result<f64> {
    weights.validate(d)?;
    Ok(match weights {
        Weights::Product { gamma } => {
            let mut g = gamma.clone();
            g.sort_by(|a, b| b.total_cmp(a));
            let mut prod = 1.0;
            let mut best = 0.0f64;
            for (k, gk) in g.iter().enumerate() {
                prod *= gk;
                best = best.max(prod * ((k + 1) as f64).sqrt());
            }
            best
        }
        Weights::Explicit { entries } => entries
            .iter()
            .map(|e| {
                let mut u = e.u.clone();
                u.sort_unstable();
                u.dedup();
                e.gamma * (u.len() as f64).sqrt()
            })
            .fold(0.0, f64::max),
    })
}

/// `max_u c γ_u √(|u|/N)` with probability at least
/// `2 − (1 + e^{−(1.674c² − 10.7042 − ρ)})^d`.
pub fn weighted_bound(p: &BoundParams, weights: &Weights) -> Result<BoundResult> {
    let (n, d) = p.check()?;
    let c = p.require_c()?;
    let value = c * weighted_max(weights, p.d)? / n.sqrt();
    let prob = 2.0 - (1.0 + (-(WEIGHTED_SLOPE * c * c - GH_OFFSET - p.rho)).exp()).powf(d);
    Ok(BoundResult::new(FormulaId::WeightedC, value, prob))
}

/// `c_θ = √(|ρ + 10.7 + ln((2−θ)^{1/d} − 1)| / 1.674)`.
pub fn weighted_c_theta(theta: f64, rho: f64, d: usize) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "theta must lie in (0,1) (at theta = 1 the logarithm diverges), got {theta}"
        )));
    }
    let inner = (2.0 - theta).powf(1.0 / d as f64) - 1.0;
    Ok(((rho + WEIGHTED_THETA_OFFSET + inner.ln()).abs() / WEIGHTED_SLOPE).sqrt())
}

/// [`weighted_bound`] with `c = c_θ`, holding with probability `θ`.
pub fn weighted_bound_theta(p: &BoundParams, weights: &Weights) -> Result<BoundResult> {
    let (n, _) = p.check()?;
    let theta = p.require_theta()?;
    let c = weighted_c_theta(theta, p.rho, p.d)?;
    let value = c * weighted_max(weights, p.d)? / n.sqrt();
    Ok(BoundResult::new(FormulaId::WeightedTheta, value, theta))
}

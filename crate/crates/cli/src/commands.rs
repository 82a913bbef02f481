//! One function per subcommand.

use std::path::{Path, PathBuf};

use negdep_qmc::bounds::{
    c0_bound, c0_bound_theta, eta, eta_condition_holds, gh_bound, gh_bound_theta, gh_bound_theta_mixed,
    weighted_bound, weighted_bound_theta, BoundParams, BoundResult,
};
use negdep_qmc::discrepancy::{
    star_discrepancy_cover_with_cap, star_discrepancy_exact_with_cap, weighted_star_discrepancy, Side, Weights,
    DEFAULT_WORK_CAP,
};
use negdep_qmc::geometry::is_net;
use negdep_qmc::integrate::variance_study;
use negdep_qmc::negdep::{
    corner_cells, gss_anchored_prob_exact, lhs_anchored_prob_exact, rsj_small_prob, test_ci_nqd,
    test_conditional_nqd, test_lower_nd, test_pairwise_nd, test_upper_nd, DependenceReport, Verdict,
    RSJ_EXACT_MAX_N,
};
use negdep_qmc::samplers::{faure_net, sample, sample_scrambled_net};
use negdep_qmc::suite::{run_criterion, SuiteConfig, CRITERIA};
use negdep_qmc::{CornerBox0, CornerBox1, Interval, RngStream, SchemeSpec};
use serde_json::json;

use crate::config::{
    BoundsConfig, DiscrepancyConfig, NegdepConfig, NegdepTest, NetCheckConfig, ReportConfig,
    SampleConfig, VarianceConfig,
};
use crate::output::{opt, write_file, write_json, write_stdout, Column, Table};
use crate::CliError;

/// Seed and output path after command-line overrides.
pub struct Ctx {
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Ctx {
    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

pub fn sample_cmd(cfg: &SampleConfig, ctx: &Ctx) -> Result<(), CliError> {
    let points = sample(&cfg.scheme, cfg.n, cfg.d, &mut RngStream::new(ctx.seed))?;
    let text = points.to_text();
    match ctx.out() {
        Some(path) => write_file(path, text.as_bytes()),
        None => write_stdout(text.as_bytes()),
    }
}

const DISCREPANCY_COLUMNS: [Column; 11] = [
    ("source", "where the points came from"),
    ("n", "number of points"),
    ("d", "dimension"),
    ("star_exact", "exact star discrepancy; empty if not requested"),
    ("witness_corner", "space-separated corner x of a box [0,x) attaining the supremum"),
    ("witness_side", "excess: closed count above volume; deficit: open count below volume"),
    ("delta", "cover resolution; empty if no cover bounds were requested"),
    ("cover_lower", "lower bound from the delta-cover"),
    ("cover_upper", "cover_lower + delta"),
    ("cover_size", "number of cover points"),
    ("weighted", "weighted star discrepancy; empty without weights"),
];

pub fn discrepancy_cmd(cfg: &DiscrepancyConfig, ctx: &Ctx, delta: Option<f64>) -> Result<(), CliError> {
    let points = cfg.points.load(ctx.seed)?;
    let cap = cfg.work_cap.unwrap_or(DEFAULT_WORK_CAP);
    let mut row = vec![cfg.points.label(), points.len().to_string(), points.dim().to_string()];
    if cfg.exact {
        let r = star_discrepancy_exact_with_cap(&points, cap)?;
        row.push(r.value.to_string());
        match r.witness {
            Some(w) => {
                let corner: Vec<String> = w.corner.iter().map(|x| x.to_string()).collect();
                row.push(corner.join(" "));
                row.push(match w.side {
                    Side::Excess => "excess".into(),
                    Side::Deficit => "deficit".into(),
                });
            }
            None => row.extend([String::new(), String::new()]),
        }
    } else {
        row.extend([String::new(), String::new(), String::new()]);
    }
    match delta.or(cfg.delta) {
        Some(delta) => {
            let c = star_discrepancy_cover_with_cap(&points, delta, cap)?;
            row.extend([
                c.delta.to_string(),
                c.lower.to_string(),
                c.upper.to_string(),
                c.cover_size.to_string(),
            ]);
        }
        None => row.extend(std::iter::repeat_n(String::new(), 4)),
    }
    row.push(match &cfg.weights {
        Some(w) => weighted_star_discrepancy(&points, w)?.to_string(),
        None => String::new(),
    });
    let mut table = Table::new("discrepancy", DISCREPANCY_COLUMNS.to_vec());
    table.push(row);
    table.emit(ctx.out())
}

const REPORT_DESCRIPTIONS: [&str; 9] = [
    "upper_nd, lower_nd, pairwise_nd, conditional_nqd or ci_nqd",
    "scheme label",
    "event parameters (boxes, t, coordinates, thresholds, gamma)",
    "probability of the joint event: exact or empirical frequency",
    "right-hand side of the inequality",
    "half-width of the 99% interval around lhs; 0 for exact values",
    "violated, holds or inconclusive",
    "number of replications; 0 for exact values",
    "whether lhs and rhs are exact",
];

/// Runs every test of the sweep; returns true if any verdict is `violated`.
pub fn negdep_cmd(cfg: &NegdepConfig, ctx: &Ctx, oracle: bool) -> Result<bool, CliError> {
    let mut columns: Vec<Column> = DependenceReport::CSV_COLUMNS
        .iter()
        .copied()
        .zip(REPORT_DESCRIPTIONS)
        .collect();
    if oracle {
        columns.push(("oracle", "closed-form lhs where one is implemented; empty otherwise"));
    }
    let mut table = Table::new("negdep", columns);
    let root = RngStream::new(ctx.seed);
    let mut next = 0u64;
    let mut stream = || {
        next += 1;
        root.split(next - 1)
    };
    let mut violated = false;
    let mut emit = |rep: DependenceReport, exact: Option<f64>| {
        violated |= rep.verdict == Verdict::Violated;
        let mut row = rep.csv_record();
        if oracle {
            row.push(opt(exact.or(rep.exact.then_some(rep.lhs))));
        }
        table.push(row);
    };
    let (spec, n, d, reps) = (&cfg.scheme, cfg.n, cfg.d, cfg.replications);
    for test in &cfg.tests {
        match test {
            NegdepTest::UpperNd { boxes, t, gamma } => {
                for q in boxes {
                    for &t in t {
                        for &g in gamma {
                            let rep = test_upper_nd(spec, n, q, t, g, reps, &mut stream())?;
                            let exact = if oracle { anchored_oracle(spec, n, q, t)? } else { None };
                            emit(rep, exact);
                        }
                    }
                }
            }
            NegdepTest::LowerNd { boxes, t, gamma } => {
                for q in boxes {
                    for &t in t {
                        for &g in gamma {
                            emit(test_lower_nd(spec, n, q, t, g, reps, &mut stream())?, None);
                        }
                    }
                }
            }
            NegdepTest::PairwiseNd { corners } => {
                let boxes = corners
                    .iter()
                    .map(|c| CornerBox1::new(c.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                for q in &boxes {
                    for r in &boxes {
                        let rep = test_pairwise_nd(spec, n, q, r, reps, &mut stream())?;
                        emit(rep.hit, None);
                        emit(rep.miss, None);
                    }
                }
            }
            NegdepTest::ConditionalNqd { coord, a, b, thresholds } => {
                for ai in a {
                    for bi in b {
                        for &alpha in thresholds {
                            for &beta in thresholds {
                                let rep = test_conditional_nqd(
                                    spec,
                                    n,
                                    d,
                                    *coord,
                                    ai,
                                    bi,
                                    alpha,
                                    beta,
                                    reps,
                                    &mut stream(),
                                )?;
                                emit(rep, None);
                            }
                        }
                    }
                }
            }
            NegdepTest::CiNqd { coord, thresholds } => {
                for &q in thresholds {
                    for &r in thresholds {
                        emit(test_ci_nqd(spec, n, d, *coord, q, r, reps, &mut stream())?.nqd, None);
                    }
                }
            }
        }
    }
    table.emit(ctx.out())?;
    Ok(violated)
}

/// Closed-form `P(p_1, …, p_t ∈ Q)` for boxes anchored at 0, where available.
fn anchored_oracle(spec: &SchemeSpec, n: usize, q: &Interval, t: usize) -> Result<Option<f64>, CliError> {
    if q.a.iter().any(|&a| a != 0.0) || t == 0 || t > n {
        return Ok(None);
    }
    Ok(match spec {
        SchemeSpec::LatinHypercube => Some(lhs_anchored_prob_exact(n as u64, &q.b, t as u64)?),
        SchemeSpec::GeneralizedStratified { beta, strata } => {
            if matches!(strata, negdep_qmc::StrataSpec::LatticeCells { .. }) && q.b.len() != 2 {
                None
            } else {
                Some(gss_anchored_prob_exact(*beta, strata, &CornerBox0::new(q.b.clone())?, n, t)?)
            }
        }
        SchemeSpec::RsjRank1Lattice if q.b.len() == 2 && (n as u64) <= RSJ_EXACT_MAX_N => {
            let k: Vec<f64> = q.b.iter().map(|b| b * n as f64).collect();
            if k.iter().all(|k| (k - k.round()).abs() < 1e-9) {
                let cells = corner_cells(k[0].round() as u64, k[1].round() as u64);
                Some(rsj_small_prob(n as u64, &cells, t as u64)?)
            } else {
                None
            }
        }
        _ => None,
    })
}

const BOUNDS_COLUMNS: [Column; 22] = [
    ("n", "number of points N"),
    ("d", "dimension"),
    ("rho", "dependence exponent rho (gamma = e^{rho d})"),
    ("theta", "target success probability; empty if not set"),
    ("c", "constant c; empty if not set"),
    ("gh_c", "c sqrt(d/N)"),
    ("gh_c_prob", "lower bound on its success probability, clamped to [0,1]"),
    ("gh_theta", "0.7729 sqrt(10.7042 + rho + ln(1/(1-theta))/d) sqrt(d/N)"),
    ("gh_theta_mixed", "2 gh_theta, the bound for mixed sequences"),
    ("c0_c", "c sqrt((d/N) max{1, ln(N/d)})"),
    ("c0_c_prob", "lower bound on its success probability, clamped to [0,1]"),
    ("c0_theta", "sqrt(2/N) sqrt(d ln eta + rho d + ln(2/(1-theta)))"),
    ("eta", "eta(N, d) = 6e max(1, N/(2d ln 6e))^{1/2}"),
    ("eta_condition", "whether eta satisfies ((eta/2e) - 1) sqrt(ln eta) >= sqrt(2N/d)"),
    ("weighted_c", "max_u c gamma_u sqrt(|u|/N)"),
    ("weighted_c_prob", "lower bound on its success probability, clamped to [0,1]"),
    ("weighted_theta", "weighted bound with c = c_theta"),
    ("gh_c_unclamped", "gh_c_prob before clamping"),
    ("c0_c_unclamped", "c0_c_prob before clamping"),
    ("weighted_c_unclamped", "weighted_c_prob before clamping"),
    ("vacuous", "true if some c-based probability bound is <= 0"),
    ("clamped", "true if some probability was clamped"),
];

pub fn bounds_cmd(cfg: &BoundsConfig, ctx: &Ctx) -> Result<(), CliError> {
    let g = &cfg.grid;
    let rhos = if g.rho.is_empty() { vec![0.0] } else { g.rho.clone() };
    let thetas: Vec<Option<f64>> = if g.theta.is_empty() {
        vec![None]
    } else {
        g.theta.iter().copied().map(Some).collect()
    };
    let cs: Vec<Option<f64>> = if g.c.is_empty() {
        vec![None]
    } else {
        g.c.iter().copied().map(Some).collect()
    };
    let mut table = Table::new("bounds", BOUNDS_COLUMNS.to_vec());
    for &n in &g.n {
        for &d in &g.d {
            let weights = match &cfg.weights {
                Some(w) => w.clone(),
                None => Weights::Product { gamma: vec![1.0; d] },
            };
            for &rho in &rhos {
                for &theta in &thetas {
                    for &c in &cs {
                        table.push(bounds_row(n, d, rho, theta, c, &weights)?);
                    }
                }
            }
        }
    }
    table.emit(ctx.out())
}

fn bounds_row(
    n: u64,
    d: usize,
    rho: f64,
    theta: Option<f64>,
    c: Option<f64>,
    weights: &Weights,
) -> Result<Vec<String>, CliError> {
    let p = BoundParams { n, d, rho, theta, c };
    let by_c = |f: &dyn Fn(&BoundParams) -> negdep_qmc::Result<BoundResult>| -> Result<Option<BoundResult>, CliError> {
        Ok(if c.is_some() { Some(f(&p)?) } else { None })
    };
    let by_theta = |f: &dyn Fn(&BoundParams) -> negdep_qmc::Result<BoundResult>| -> Result<Option<BoundResult>, CliError> {
        Ok(if theta.is_some() { Some(f(&p)?) } else { None })
    };
    let gh = by_c(&gh_bound)?;
    let gh_t = by_theta(&gh_bound_theta)?;
    let gh_m = by_theta(&gh_bound_theta_mixed)?;
    let c0 = by_c(&c0_bound)?;
    let c0_t = by_theta(&c0_bound_theta)?;
    let w = by_c(&|p| weighted_bound(p, weights))?;
    let w_t = by_theta(&|p| weighted_bound_theta(p, weights))?;
    let value = |r: &Option<BoundResult>| opt(r.map(|r| r.bound_value));
    let prob = |r: &Option<BoundResult>| opt(r.map(|r| r.success_prob));
    let raw = |r: &Option<BoundResult>| opt(r.map(|r| r.unclamped_prob));
    let with_c = [gh, c0, w];
    let vacuous = with_c.iter().flatten().any(|r| r.unclamped_prob <= 0.0);
    let clamped = [gh, gh_t, gh_m, c0, c0_t, w, w_t].iter().flatten().any(|r| r.clamped);
    Ok(vec![
        n.to_string(),
        d.to_string(),
        rho.to_string(),
        opt(theta),
        opt(c),
        value(&gh),
        prob(&gh),
        value(&gh_t),
        value(&gh_m),
        value(&c0),
        prob(&c0),
        value(&c0_t),
        eta(n, d).to_string(),
        eta_condition_holds(n, d).to_string(),
        value(&w),
        prob(&w),
        value(&w_t),
        raw(&gh),
        raw(&c0),
        raw(&w),
        vacuous.to_string(),
        clamped.to_string(),
    ])
}

const VARIANCE_DESCRIPTIONS: [&str; 11] = [
    "scheme label",
    "test function label",
    "number of points",
    "dimension",
    "replications R of each estimator",
    "mean of the scheme estimates",
    "mean of the Monte Carlo estimates",
    "sample variance of the scheme estimates",
    "sample variance of the Monte Carlo estimates",
    "var_scheme / var_mc",
    "delta-method standard error of the ratio",
];

pub fn variance_cmd(cfg: &VarianceConfig, ctx: &Ctx) -> Result<(), CliError> {
    let mut columns: Vec<Column> = negdep_qmc::integrate::VarianceStudy::CSV_COLUMNS
        .iter()
        .copied()
        .zip(VARIANCE_DESCRIPTIONS)
        .collect();
    columns.push(("no_worse_than_mc", "ratio <= 1 + 3 ratio_stderr"));
    let mut table = Table::new("variance", columns);
    let root = RngStream::new(ctx.seed);
    for (i, case) in cfg.studies.iter().enumerate() {
        let study = variance_study(
            &case.scheme,
            &case.function,
            case.n,
            case.d,
            cfg.replications,
            &mut root.split(i as u64),
        )?;
        let mut row = study.csv_record();
        row.push(study.no_worse_than_mc(3.0).to_string());
        table.push(row);
    }
    table.emit(ctx.out())
}

const NET_COLUMNS: [Column; 6] = [
    ("points", "faure, scrambled:<k> or the configured point source"),
    ("base", "base b"),
    ("m", "b^m points"),
    ("s", "dimension"),
    ("t", "quality parameter checked"),
    ("is_net", "every elementary interval of volume b^(t-m) holds b^t points"),
];

/// Returns true if some point set fails the net check.
pub fn net_check_cmd(cfg: &NetCheckConfig, ctx: &Ctx) -> Result<bool, CliError> {
    let mut sets = vec![];
    match &cfg.points {
        Some(src) => sets.push((src.label(), src.load(ctx.seed)?)),
        None => {
            sets.push(("faure".to_string(), faure_net(cfg.base, cfg.m, cfg.s)?));
            let root = RngStream::new(ctx.seed);
            for k in 0..cfg.scrambles {
                let p = sample_scrambled_net(cfg.base, cfg.m, cfg.s, &mut root.split(k))?;
                sets.push((format!("scrambled:{k}"), p));
            }
        }
    }
    let mut table = Table::new("net-check", NET_COLUMNS.to_vec());
    let mut failed = false;
    for (label, points) in &sets {
        let ok = is_net(points, cfg.base, cfg.m, cfg.s, cfg.t)?;
        failed |= !ok;
        table.push(vec![
            label.clone(),
            cfg.base.to_string(),
            cfg.m.to_string(),
            cfg.s.to_string(),
            cfg.t.to_string(),
            ok.to_string(),
        ]);
    }
    table.emit(ctx.out())?;
    Ok(failed)
}

/// Runs the acceptance criteria; returns true if any failed.
pub fn report_cmd(cfg: &ReportConfig, ctx: &Ctx) -> Result<bool, CliError> {
    let ids: Vec<u8> = match &cfg.criteria {
        Some(ids) => ids.clone(),
        None => (1..=CRITERIA).collect(),
    };
    if let Some(bad) = ids.iter().find(|&&id| id == 0 || id > CRITERIA) {
        return Err(CliError::Validation(format!("criterion id must lie in 1..={CRITERIA}, got {bad}")));
    }
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let suite = SuiteConfig { seed: ctx.seed };
    let mut outcomes = vec![];
    for id in ids {
        let outcome = run_criterion(id, &suite)?;
        println!("{}", outcome.line());
        for t in &outcome.tables {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&t.columns).map_err(|e| CliError::Io(e.to_string()))?;
            for row in &t.rows {
                w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            write_file(&dir.join(format!("{:02}_{}.csv", outcome.id, t.name)), &bytes)?;
        }
        outcomes.push(outcome);
    }
    let failed = outcomes.iter().any(|o| !o.passed);
    let summary = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": ctx.seed,
        "passed": !failed,
        "criteria": outcomes,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BoundsGrid;

    #[test]
    fn bounds_row_has_every_column() {
        let w = Weights::Product { gamma: vec![1.0; 3] };
        let row = bounds_row(100, 3, 0.0, Some(0.9), Some(3.0), &w).unwrap();
        assert_eq!(row.len(), BOUNDS_COLUMNS.len());
        let row = bounds_row(100, 3, 0.0, None, None, &w).unwrap();
        assert_eq!(row[5], "");
        assert_eq!(row[20], "false");
    }

    #[test]
    fn theta_one_is_rejected() {
        let cfg = BoundsConfig {
            grid: BoundsGrid {
                n: vec![10],
                d: vec![2],
                theta: vec![1.0],
                ..Default::default()
            },
            weights: None,
            seed: None,
            threads: None,
            out: None,
        };
        let ctx = Ctx { seed: 0, out: None };
        assert!(matches!(bounds_cmd(&cfg, &ctx), Err(CliError::Validation(_))));
    }

    #[test]
    fn lhs_oracle_only_for_anchored_boxes() {
        let q = Interval::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        let v = anchored_oracle(&SchemeSpec::LatinHypercube, 4, &q, 2).unwrap().unwrap();
        assert!((v - 1.0 / 36.0).abs() < 1e-15);
        let shifted = Interval::new(vec![0.1, 0.0], vec![0.5, 0.5]).unwrap();
        assert!(anchored_oracle(&SchemeSpec::LatinHypercube, 4, &shifted, 2).unwrap().is_none());
        assert!(anchored_oracle(&SchemeSpec::MonteCarlo, 4, &q, 2).unwrap().is_none());
    }

    #[test]
    fn rsj_oracle_on_grid_boxes() {
        let q = Interval::new(vec![0.0, 0.0], vec![0.6, 0.6]).unwrap();
        let v = anchored_oracle(&SchemeSpec::RsjRank1Lattice, 5, &q, 3).unwrap().unwrap();
        assert!((v - 0.01).abs() < 1e-15);
    }
}

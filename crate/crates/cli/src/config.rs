//! JSON experiment configurations, one document per subcommand.
//!
//! Every document may carry `seed`, `threads` and `out`; the matching
//! command-line flags override them. Unknown fields are rejected.

use std::path::PathBuf;

use negdep_qmc::discrepancy::Weights;
use negdep_qmc::integrate::TestFunction;
use negdep_qmc::{Interval, PointSet, RngStream, SchemeSpec};
use serde::Deserialize;

use crate::CliError;

/// Settings shared by every subcommand.
pub trait Common {
    fn seed(&self) -> Option<u64>;
    fn threads(&self) -> Option<usize>;
    fn out(&self) -> Option<&PathBuf>;
}

macro_rules! common {
    ($t:ty) => {
        impl Common for $t {
            fn seed(&self) -> Option<u64> {
                self.seed
            }
            fn threads(&self) -> Option<usize> {
                self.threads
            }
            fn out(&self) -> Option<&PathBuf> {
                self.out.as_ref()
            }
        }
    };
}

/// Where a point set comes from.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSource {
    /// A file in the point-set text format.
    File { path: PathBuf },
    Inline { dim: usize, rows: Vec<Vec<f64>> },
    /// One draw of a sampling scheme, seeded by the configuration seed.
    Scheme { scheme: SchemeSpec, n: usize, d: usize },
}

impl PointSource {
    pub fn load(&self, seed: u64) -> Result<PointSet, CliError> {
        match self {
            PointSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                Ok(PointSet::from_text(&text)?)
            }
            PointSource::Inline { dim, rows } => Ok(PointSet::from_rows(*dim, rows)?),
            PointSource::Scheme { scheme, n, d } => {
                Ok(negdep_qmc::samplers::sample(scheme, *n, *d, &mut RngStream::new(seed))?)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            PointSource::File { path } => path.display().to_string(),
            PointSource::Inline { .. } => "inline".into(),
            PointSource::Scheme { scheme, n, d } => format!("{}:n{n}:d{d}", scheme.label()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub scheme: SchemeSpec,
    pub n: usize,
    pub d: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(SampleConfig);

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancyConfig {
    pub points: PointSource,
    #[serde(default = "yes")]
    pub exact: bool,
    /// δ for cover bounds.
    pub delta: Option<f64>,
    pub weights: Option<Weights>,
    /// Cap on box–point tests; defaults to the library cap.
    pub work_cap: Option<u128>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(DiscrepancyConfig);

fn one() -> Vec<f64> {
    vec![1.0]
}

/// One sweep of dependence tests; every combination of the listed values is tested.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "notion", rename_all = "snake_case", deny_unknown_fields)]
pub enum NegdepTest {
    UpperNd {
        boxes: Vec<Interval>,
        t: Vec<usize>,
        #[serde(default = "one")]
        gamma: Vec<f64>,
    },
    LowerNd {
        boxes: Vec<Interval>,
        t: Vec<usize>,
        #[serde(default = "one")]
        gamma: Vec<f64>,
    },
    /// All ordered pairs of the boxes `[c, 1)` for the listed lower corners.
    PairwiseNd { corners: Vec<Vec<f64>> },
    /// 0-based coordinate; `a`, `b` are boxes over the preceding coordinates.
    ConditionalNqd {
        coord: usize,
        a: Vec<Interval>,
        b: Vec<Interval>,
        thresholds: Vec<f64>,
    },
    CiNqd { coord: usize, thresholds: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegdepConfig {
    pub scheme: SchemeSpec,
    pub n: usize,
    pub d: usize,
    pub replications: u64,
    pub tests: Vec<NegdepTest>,
    /// Add exact probabilities where a closed form is available.
    #[serde(default)]
    pub oracle: bool,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(NegdepConfig);

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsGrid {
    pub n: Vec<u64>,
    pub d: Vec<usize>,
    #[serde(default)]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<f64>,
    #[serde(default)]
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub grid: BoundsGrid,
    /// Weights for the weighted bounds; `γ_j = 1` for every coordinate by default.
    pub weights: Option<Weights>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(BoundsConfig);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceCase {
    pub scheme: SchemeSpec,
    pub function: TestFunction,
    pub n: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceConfig {
    pub studies: Vec<VarianceCase>,
    pub replications: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(VarianceConfig);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetCheckConfig {
    pub base: u64,
    pub m: u32,
    pub s: usize,
    #[serde(default)]
    pub t: u32,
    /// Points to check; the unscrambled Faure net and `scrambles` scrambled copies by default.
    pub points: Option<PointSource>,
    #[serde(default)]
    pub scrambles: u64,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}
common!(NetCheckConfig);

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    /// Criterion ids to run; all by default.
    pub criteria: Option<Vec<u8>>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// Output directory.
    pub out: Option<PathBuf>,
}
common!(ReportConfig);

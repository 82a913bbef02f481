//! Negatively dependent randomized quasi-Monte Carlo sampling.
//!
//! The crate builds randomized point sets in `[0,1)^d` (Monte Carlo, simple and
//! generalized stratified sampling, randomly shifted and jittered rank-1
//! lattices, Latin hypercube sampling, scrambled Faure nets and their
//! concatenations), computes their star discrepancy exactly or through
//! δ-covers, and checks several notions of negative dependence either
//! statistically or through closed-form probabilities.
//!
//! Module map:
//!
//! * [`geometry`]: half-open boxes, δ-covers, elementary intervals, net checks.
//! * [`samplers`]: point-set constructions and the seeded [`RngStream`].
//! * [`discrepancy`]: local, exact, cover-approximated and weighted star discrepancy.
//! * [`negdep`]: empirical testers and exact probability oracles.
//! * [`bounds`]: closed-form probabilistic discrepancy and tail bounds.
//! * [`integrate`]: RQMC estimation, quasivolumes, variance studies.
//! * [`suite`]: the end-to-end validation suite used by the CLI `report` command.

pub mod bounds;
pub mod discrepancy;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod negdep;
pub mod samplers;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
pub use geometry::{
    BoxDiff, CornerBox0, CornerBox1, DeltaCover, ElementaryInterval, Interval, Point, Region,
};
pub use samplers::{PointSet, RngStream, SchemeSpec, StrataSpec};

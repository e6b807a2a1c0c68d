//! Explicit doubling coverings.
//!
//! A `gamma`-doubling covering of a compact set `G` in a complex manifold `Y`
//! is a finite family of charts `psi_j : B_1 -> Y` whose images cover `G`,
//! each extending univalently to the ball `B_gamma` inside `Y`. This crate
//! builds such coverings for punctured annuli and polydiscs, for level sets
//! of monomials, and real a-charts for graphs of monomial maps, and checks
//! them: coverage by sampling, exact hyperplane avoidance, chains, and chart
//! counts against closed-form bounds.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod achart;
pub mod annulus;
pub mod chart;
pub mod cli;
pub mod error;
pub mod io;
pub mod levelset;
pub mod polydisc;
pub mod suspension;
pub mod verify;

pub use annulus::{cover_annulus, AnnulusLayout, Disk, WhitneyDiskParams};
pub use chart::{
    AmbientSpec, CPoint, Charts, Covering, DiagonalAffineChart, EtaParams, TargetRegion,
};
pub use error::{CoverError, Result};
pub use levelset::{cover_monomial_level_set, MonomialLevelChart};
pub use polydisc::{
    cover_punctured_polydisc, eta_from_delta, level_lower_bound, PolydiscCover,
    PolydiscCoveringPlan,
};
pub use suspension::{suspend_chart, suspend_covering, SuspensionParams};

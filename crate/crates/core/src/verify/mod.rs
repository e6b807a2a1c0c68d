//! Coverage sampling, doubling certificates, chains and scaling reports.

pub mod certify;
pub mod chain;
pub mod coverage;
pub mod index;
pub mod scaling;

pub use certify::{certify_doubling, certify_level_chart, certify_polydisc, DoublingReport};
pub use chain::{chain_between, intersection_witness, Chain};
pub use coverage::{check_coverage, check_coverage_with, sample_product_region, CoverageReport};
pub use index::{ChartLocator, CoverIndex, DiskIndex};
pub use scaling::{
    complexity_of, complexity_report, fit_log_exponent, linear_fit, scaling_experiment, write_csv,
    BoundFormula, ComplexityReport, Experiment, Fit, ScalingRow,
};

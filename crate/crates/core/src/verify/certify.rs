//! Per-chart doubling certificates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{tolerance, AmbientSpec, Charts, Covering};
use crate::levelset::{level_residual, MonomialLevelChart};
use crate::polydisc::PolydiscCover;

/// At most this many failing indices are listed.
pub const MAX_LISTED: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub kappa: usize,
    #[serde(skip)]
    pub per_chart: Vec<bool>,
    pub failed: usize,
    /// First failing chart indices (at most [`MAX_LISTED`]).
    pub failing: Vec<usize>,
    pub pass: bool,
}

impl DoublingReport {
    fn from_flags(per_chart: Vec<bool>) -> Self {
        let failing_all: Vec<usize> = per_chart
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(i, _)| i)
            .collect();
        Self {
            kappa: per_chart.len(),
            failed: failing_all.len(),
            failing: failing_all.into_iter().take(MAX_LISTED).collect(),
            pass: per_chart.iter().all(|&ok| ok),
            per_chart,
        }
    }
}

/// Points of the closed unit ball where level charts are spot-checked: the
/// centre and `+-e_i`, `+-i e_i`.
fn probe_points(dim: usize) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]];
    for i in 0..dim {
        for u in [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ] {
            let mut p = vec![Complex64::new(0.0, 0.0); dim];
            p[i] = u;
            out.push(p);
        }
    }
    out
}

/// Base certificate plus residual `<= tol |c|` at the probe points.
pub fn certify_level_chart(ch: &MonomialLevelChart) -> bool {
    if !ch.branch_defined() {
        return false;
    }
    let tol = tolerance();
    probe_points(ch.base().dim())
        .iter()
        .all(|x| match ch.evaluate(x, 1.0) {
            Ok(p) => level_residual(&p, ch.alpha(), ch.level()) <= tol,
            Err(_) => false,
        })
}

/// Affine charts: exact avoidance at scale `gamma`. Level charts: base avoidance and residuals.
pub fn certify_doubling(cov: &Covering) -> DoublingReport {
    let flags = match cov.charts() {
        Charts::Affine(v) => v
            .par_iter()
            .map(|ch| {
                ch.avoidance_certificate(cov.ambient(), cov.gamma())
                    .unwrap_or(false)
            })
            .collect(),
        Charts::Level(v) => v.par_iter().map(certify_level_chart).collect(),
    };
    DoublingReport::from_flags(flags)
}

/// [`certify_doubling`] over a lazily generated polydisc covering.
pub fn certify_polydisc(cover: &PolydiscCover) -> DoublingReport {
    let ambient: AmbientSpec = cover.ambient();
    let gamma = cover.gamma();
    let flags = (0..cover.kappa())
        .into_par_iter()
        .map(|i| {
            cover
                .chart(i)
                .avoidance_certificate(&ambient, gamma)
                .unwrap_or(false)
        })
        .collect();
    DoublingReport::from_flags(flags)
}

//! Sampling-based coverage checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::index::{ChartLocator, CoverIndex};
use crate::chart::{AmbientSpec, Covering, TargetRegion};
use crate::error::{CoverError, Result};
use crate::levelset::{direct_branch_values, MonomialLevelChart};

/// At most this many uncovered points are kept in a report.
pub const MAX_UNCOVERED: usize = 100;

/// Relative agreement required between a chart's branch value and a direct root.
pub const BRANCH_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub samples_total: usize,
    pub samples_covered: usize,
    pub uncovered: Vec<Vec<Complex64>>,
    pub pass: bool,
}

impl CoverageReport {
    fn from_flags(points: Vec<Vec<Complex64>>, covered: Vec<bool>) -> Self {
        let samples_total = covered.len();
        let samples_covered = covered.iter().filter(|&&c| c).count();
        let uncovered = points
            .into_iter()
            .zip(&covered)
            .filter(|(_, &c)| !c)
            .map(|(p, _)| p)
            .take(MAX_UNCOVERED)
            .collect();
        Self {
            samples_total,
            samples_covered,
            uncovered,
            pass: samples_covered == samples_total,
        }
    }

    pub fn rate(&self) -> f64 {
        if self.samples_total == 0 {
            1.0
        } else {
            self.samples_covered as f64 / self.samples_total as f64
        }
    }
}

fn radius_grid(inner: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![if inner > 0.0 { inner.sqrt() } else { 0.5 }];
    }
    (0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            if inner > 0.0 {
                inner.powf(1.0 - t)
            } else {
                t
            }
        })
        .collect()
}

/// Deterministic samples of `prod_i {inner_i <= |z_i| <= 1}`: about half on a
/// log-polar product grid, the rest seeded random with log-uniform moduli.
pub fn sample_product_region(inner: &[f64], n_samples: usize, seed: u64) -> Vec<Vec<Complex64>> {
    if inner.iter().any(|&r| r >= 1.0) || inner.is_empty() || n_samples == 0 {
        return Vec::new();
    }
    let dim = inner.len();
    let per_axis = ((n_samples / 2) as f64)
        .powf(1.0 / dim as f64)
        .floor()
        .max(1.0) as usize;
    let radial = ((per_axis as f64).sqrt().floor() as usize).max(1);
    let angular = (per_axis / radial).max(1);
    let axis_points: Vec<Vec<Complex64>> = inner
        .iter()
        .map(|&r0| {
            radius_grid(r0, radial)
                .into_iter()
                .flat_map(|r| {
                    (0..angular).map(move |k| {
                        Complex64::from_polar(r, 2.0 * PI * k as f64 / angular as f64)
                    })
                })
                .collect()
        })
        .collect();
    let grid_count = (radial * angular).pow(dim as u32).min(n_samples);
    let mut out = Vec::with_capacity(n_samples);
    for flat in 0..grid_count {
        let mut k = flat;
        out.push(
            axis_points
                .iter()
                .map(|pts| {
                    let z = pts[k % pts.len()];
                    k /= pts.len();
                    z
                })
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n_samples {
        out.push(
            inner
                .iter()
                .map(|&r0| {
                    let u: f64 = rng.gen();
                    let r = if r0 > 0.0 { r0.powf(u) } else { u.sqrt() };
                    Complex64::from_polar(r, rng.gen_range(-PI..PI))
                })
                .collect(),
        );
    }
    out
}

/// Coverage of a product region by any locator.
pub fn check_coverage_with(
    locator: &dyn ChartLocator,
    inner: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if inner.len() != locator.dim() {
        return Err(CoverError::RegionMismatch(format!(
            "region has {} axes, covering has {}",
            inner.len(),
            locator.dim()
        )));
    }
    let points = sample_product_region(inner, n_samples, seed);
    let covered: Vec<bool> = points
        .par_iter()
        .map(|p| !locator.locate_all(p).is_empty())
        .collect();
    Ok(CoverageReport::from_flags(points, covered))
}

/// Coverage of `region` by `cov`.
///
/// Product regions are sampled directly. For a level-set covering the
/// region is a graph: base points are sampled and every direct root branch
/// must be reproduced by a chart over a base chart containing the point.
pub fn check_coverage(
    cov: &Covering,
    region: &TargetRegion,
    n_samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    match (cov.ambient(), region) {
        (AmbientSpec::MonomialLevelSet { alpha, c }, TargetRegion::LevelGraph { inner }) => {
            let charts = cov
                .level_charts()
                .expect("level ambient holds level charts");
            check_graph_coverage(charts, alpha, *c, inner, n_samples, seed)
        }
        (AmbientSpec::MonomialLevelSet { .. }, _) | (_, TargetRegion::LevelGraph { .. }) => Err(
            CoverError::RegionMismatch("region kind does not fit the covering ambient".into()),
        ),
        (_, TargetRegion::Product { inner }) => {
            if inner.len() != cov.ambient().dim() {
                return Err(CoverError::RegionMismatch(format!(
                    "region has {} axes, ambient has {}",
                    inner.len(),
                    cov.ambient().dim()
                )));
            }
            let charts = cov
                .affine_charts()
                .expect("affine ambient holds affine charts");
            if charts.is_empty() {
                let points = sample_product_region(inner, n_samples, seed);
                let covered = vec![false; points.len()];
                return Ok(CoverageReport::from_flags(points, covered));
            }
            check_coverage_with(&CoverIndex::new(charts), inner, n_samples, seed)
        }
    }
}

fn check_graph_coverage(
    charts: &[MonomialLevelChart],
    alpha: &[u32],
    c: Complex64,
    inner: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    // group consecutive charts sharing a base chart
    let mut bases = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, ch) in charts.iter().enumerate() {
        if bases.last() != Some(ch.base()) {
            bases.push(ch.base().clone());
            members.push(Vec::new());
        }
        members.last_mut().expect("pushed above").push(i);
    }
    let base_points = sample_product_region(inner, n_samples, seed);
    let index = (!bases.is_empty()).then(|| CoverIndex::new(&bases));
    let per_point: Vec<(Vec<Vec<Complex64>>, Vec<bool>)> = base_points
        .par_iter()
        .map(|xbar| {
            let roots = direct_branch_values(alpha, c, xbar);
            let hits = index
                .as_ref()
                .map(|ix| ix.locate_all(xbar))
                .unwrap_or_default();
            let mut values = Vec::new();
            for &g in &hits {
                let pre = bases[g].preimage(xbar).expect("dimension checked");
                for &i in &members[g] {
                    if let Ok(p) = charts[i].evaluate(&pre, 1.0) {
                        values.push(p[0]);
                    }
                }
            }
            let mut pts = Vec::with_capacity(roots.len());
            let mut flags = Vec::with_capacity(roots.len());
            for r in roots {
                flags.push(
                    values
                        .iter()
                        .any(|v| (v - r).norm() <= BRANCH_MATCH_TOL * r.norm()),
                );
                let mut p = vec![r];
                p.extend_from_slice(xbar);
                pts.push(p);
            }
            (pts, flags)
        })
        .collect();
    let (points, covered): (Vec<_>, Vec<_>) = per_point.into_iter().unzip();
    Ok(CoverageReport::from_flags(
        points.concat(),
        covered.concat(),
    ))
}

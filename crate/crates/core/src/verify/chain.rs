//! Doubling chains by breadth-first search over the chart intersection graph.

use std::collections::{HashMap, HashSet, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use super::index::{ChartLocator, CoverIndex};
use crate::chart::{Covering, DiagonalAffineChart};
use crate::error::{CoverError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub chart_indices: Vec<usize>,
    /// Number of charts in the chain.
    pub length: usize,
    /// `witnesses[k]` lies in charts `k` and `k + 1` at unit scale.
    pub witnesses: Vec<Vec<Complex64>>,
}

const BISECTION_STEPS: usize = 200;

/// A point of `psi_a(B_1) ∩ psi_b(B_1)`, or `None` if the images are disjoint.
///
/// With `Q_a, Q_b` the squared preimage norms, the minimiser of
/// `t Q_a + (1 - t) Q_b` is an explicit weighted mean of the centres; at the
/// `t` where `Q_a = Q_b` it minimises `max(Q_a, Q_b)`. So the test is exact.
pub fn intersection_witness(
    a: &DiagonalAffineChart,
    b: &DiagonalAffineChart,
) -> Option<Vec<Complex64>> {
    if a.dim() != b.dim() {
        return None;
    }
    let wa: Vec<f64> = a.scales().iter().map(|d| 1.0 / d.norm_sqr()).collect();
    let wb: Vec<f64> = b.scales().iter().map(|d| 1.0 / d.norm_sqr()).collect();
    let point = |t: f64| -> Vec<Complex64> {
        (0..a.dim())
            .map(|i| {
                let (x, y) = (t * wa[i], (1.0 - t) * wb[i]);
                (a.translation()[i] * x + b.translation()[i] * y) / (x + y)
            })
            .collect()
    };
    let gap = |p: &[Complex64]| a.preimage_norm_sqr_unchecked(p) - b.preimage_norm_sqr_unchecked(p);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(&point(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    [lo, hi, 0.5 * (lo + hi)]
        .into_iter()
        .map(point)
        .find(|p| a.contains(p, 1.0).unwrap_or(false) && b.contains(p, 1.0).unwrap_or(false))
}

/// Shortest chain from a chart containing `p` to a chart containing `q`.
///
/// Multi-source BFS from all charts containing `p`; neighbours are expanded
/// in ascending index order, so the result is deterministic.
pub fn chain_between(cov: &Covering, p: &[Complex64], q: &[Complex64]) -> Result<Chain> {
    let charts = cov
        .affine_charts()
        .ok_or(CoverError::UnsupportedAmbient("monomial level set"))?;
    let dim = cov.ambient().dim();
    for v in [p, q] {
        if v.len() != dim {
            return Err(CoverError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let index = CoverIndex::new(charts);
    chain_in_index(&index, p, q)
}

pub fn chain_in_index(index: &CoverIndex, p: &[Complex64], q: &[Complex64]) -> Result<Chain> {
    let sources = index.locate_all(p);
    let targets: HashSet<usize> = index.locate_all(q).into_iter().collect();
    if sources.is_empty() || targets.is_empty() {
        return Err(CoverError::NoContainingChart);
    }
    let mut parent: HashMap<usize, Option<(usize, Vec<Complex64>)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in &sources {
        parent.insert(s, None);
        queue.push_back(s);
    }
    let mut end = sources.iter().copied().find(|s| targets.contains(s));
    while end.is_none() {
        let Some(u) = queue.pop_front() else { break };
        for v in index.overlap_candidates(u) {
            if parent.contains_key(&v) {
                continue;
            }
            if let Some(w) = intersection_witness(&index.charts()[u], &index.charts()[v]) {
                parent.insert(v, Some((u, w)));
                if targets.contains(&v) {
                    end = Some(v);
                    break;
                }
                queue.push_back(v);
            }
        }
    }
    let mut node = end.ok_or(CoverError::Disconnected)?;
    let mut chart_indices = vec![node];
    let mut witnesses = Vec::new();
    while let Some(Some((prev, w))) = parent.get(&node) {
        chart_indices.push(*prev);
        witnesses.push(w.clone());
        node = *prev;
    }
    chart_indices.reverse();
    witnesses.reverse();
    Ok(Chain {
        length: chart_indices.len(),
        chart_indices,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::cover_annulus;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn witness_is_exact_for_disks() {
        let a = DiagonalAffineChart::disk(c(0.0, 0.0), 1.0, 2.0).unwrap();
        let touching = DiagonalAffineChart::disk(c(2.0, 0.0), 1.0, 2.0).unwrap();
        let apart = DiagonalAffineChart::disk(c(2.0 + 1e-6, 0.0), 1.0, 2.0).unwrap();
        let w = intersection_witness(&a, &touching).unwrap();
        assert!((w[0] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(intersection_witness(&a, &apart).is_none());
    }

    #[test]
    fn witness_for_anisotropic_ellipsoids() {
        let a = DiagonalAffineChart::new(
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.1, 0.0)],
            2.0,
        )
        .unwrap();
        let b = DiagonalAffineChart::new(
            vec![c(0.9, 0.0), c(0.12, 0.0)],
            vec![c(0.1, 0.0), c(1.0, 0.0)],
            2.0,
        )
        .unwrap();
        let w = intersection_witness(&a, &b).unwrap();
        assert!(a.contains(&w, 1.0).unwrap() && b.contains(&w, 1.0).unwrap());
        let far = DiagonalAffineChart::new(
            vec![c(0.9, 0.0), c(0.2, 0.0)],
            vec![c(0.1, 0.0), c(0.1, 0.0)],
            2.0,
        )
        .unwrap();
        assert!(intersection_witness(&a, &far).is_none());
    }

    #[test]
    fn same_chart_gives_length_one() {
        let cov = cover_annulus(0.1, 2.0).unwrap();
        let p = [c(0.5, 0.0)];
        let ch = chain_between(&cov, &p, &p).unwrap();
        assert_eq!(ch.length, 1);
        assert!(ch.witnesses.is_empty());
    }

    #[test]
    fn antipodal_chain_is_witnessed() {
        let cov = cover_annulus(0.01, 2.0).unwrap();
        let charts = cov.affine_charts().unwrap();
        let ch = chain_between(&cov, &[c(0.0105, 0.0)], &[c(-0.0105, 0.0)]).unwrap();
        assert!(ch.length >= 2);
        assert_eq!(ch.witnesses.len(), ch.length - 1);
        for (k, w) in ch.witnesses.iter().enumerate() {
            assert!(charts[ch.chart_indices[k]].contains(w, 1.0).unwrap());
            assert!(charts[ch.chart_indices[k + 1]].contains(w, 1.0).unwrap());
        }
    }

    #[test]
    fn uncovered_endpoint() {
        let cov = cover_annulus(0.1, 2.0).unwrap();
        let r = chain_between(&cov, &[c(0.5, 0.0)], &[c(0.01, 0.0)]);
        assert!(matches!(r, Err(CoverError::NoContainingChart)));
    }

    #[test]
    fn disconnected_pieces() {
        let a = DiagonalAffineChart::disk(c(0.5, 0.0), 0.1, 2.0).unwrap();
        let b = DiagonalAffineChart::disk(c(-0.5, 0.0), 0.1, 2.0).unwrap();
        let cov = Covering::new(
            crate::chart::AmbientSpec::PuncturedPlane,
            2.0,
            None,
            crate::chart::Charts::Affine(vec![a, b]),
        )
        .unwrap();
        let r = chain_between(&cov, &[c(0.5, 0.0)], &[c(-0.5, 0.0)]);
        assert!(matches!(r, Err(CoverError::Disconnected)));
    }
}

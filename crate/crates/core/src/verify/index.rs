//! Point location over coverings.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::annulus::Disk;
use crate::chart::{DiagonalAffineChart, CONTAINS_SLACK};
use crate::polydisc::PolydiscCover;

/// Anything that can list the charts containing a point at unit scale.
pub trait ChartLocator: Sync {
    fn dim(&self) -> usize;
    fn kappa(&self) -> usize;
    /// Indices of all charts whose unit-scale image contains `p`, ascending.
    fn locate_all(&self, p: &[Complex64]) -> Vec<usize>;
}

impl ChartLocator for PolydiscCover {
    fn dim(&self) -> usize {
        PolydiscCover::dim(self)
    }

    fn kappa(&self) -> usize {
        PolydiscCover::kappa(self)
    }

    fn locate_all(&self, p: &[Complex64]) -> Vec<usize> {
        PolydiscCover::locate_all(self, p)
    }
}

/// Disks whose radius is at least this fraction of `|centre|` go to the near-origin list.
const WIDE_DISK: f64 = 0.5;
const BIN_PAD: f64 = 1e-9;

/// Bins disks in log-polar coordinates `(log |z|, arg z)`.
#[derive(Debug, Clone)]
pub struct DiskIndex {
    disks: Vec<Disk>,
    wide: Vec<usize>,
    cell_u: f64,
    n_theta: i64,
    bins: HashMap<(i64, i64), Vec<usize>>,
}

impl DiskIndex {
    pub fn new(disks: Vec<Disk>) -> Self {
        let mut rel: Vec<f64> = disks
            .iter()
            .filter(|d| d.radius < WIDE_DISK * d.center.norm())
            .map(|d| d.radius / d.center.norm())
            .collect();
        rel.sort_by(|a, b| a.total_cmp(b));
        let width = rel.get(rel.len() / 2).copied().unwrap_or(0.25).max(1e-6);
        let n_theta = ((2.0 * PI / width).floor() as i64).max(1);
        let mut index = Self {
            disks: Vec::new(),
            wide: Vec::new(),
            cell_u: width,
            n_theta,
            bins: HashMap::new(),
        };
        for (i, d) in disks.iter().enumerate() {
            match index.cells_of(d) {
                Some(cells) => {
                    for key in cells {
                        index.bins.entry(key).or_default().push(i);
                    }
                }
                None => index.wide.push(i),
            }
        }
        index.disks = disks;
        index
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    fn cell_t(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    fn theta_bin(&self, theta: f64) -> i64 {
        (((theta + PI) / self.cell_t()).floor() as i64).rem_euclid(self.n_theta)
    }

    /// Log-polar cells meeting the disk, or `None` for a wide disk.
    fn cells_of(&self, d: &Disk) -> Option<Vec<(i64, i64)>> {
        let c = d.center.norm();
        if !(d.radius < WIDE_DISK * c) {
            return None;
        }
        let u_lo = ((c - d.radius).ln() - BIN_PAD) / self.cell_u;
        let u_hi = ((c + d.radius).ln() + BIN_PAD) / self.cell_u;
        let half = (d.radius / c).asin() + BIN_PAD;
        let arg = d.center.arg();
        let t_lo = ((arg - half + PI) / self.cell_t()).floor() as i64;
        let t_hi = ((arg + half + PI) / self.cell_t()).floor() as i64;
        let t_span = (t_hi - t_lo).min(self.n_theta - 1);
        let mut out = Vec::new();
        for ku in u_lo.floor() as i64..=u_hi.floor() as i64 {
            for dt in 0..=t_span {
                out.push((ku, (t_lo + dt).rem_euclid(self.n_theta)));
            }
        }
        Some(out)
    }

    fn push_candidates(&self, keys: &[(i64, i64)], out: &mut Vec<usize>) {
        for key in keys {
            if let Some(v) = self.bins.get(key) {
                out.extend_from_slice(v);
            }
        }
        out.extend_from_slice(&self.wide);
        out.sort_unstable();
        out.dedup();
    }

    /// Indices of the disks containing `z`, ascending.
    pub fn query_point(&self, z: Complex64) -> Vec<usize> {
        let mut cands = Vec::new();
        if z.norm() > 0.0 {
            let key = (
                (z.norm().ln() / self.cell_u).floor() as i64,
                self.theta_bin(z.arg()),
            );
            self.push_candidates(&[key], &mut cands);
        } else {
            cands.extend_from_slice(&self.wide);
        }
        cands.retain(|&i| self.disks[i].contains(z));
        cands
    }

    /// Indices of the disks meeting the closed disk `d`, ascending.
    pub fn query_disk(&self, d: &Disk) -> Vec<usize> {
        let mut cands = match self.cells_of(d) {
            Some(keys) => {
                let mut v = Vec::new();
                self.push_candidates(&keys, &mut v);
                v
            }
            None => (0..self.disks.len()).collect(),
        };
        cands.retain(|&i| {
            let o = &self.disks[i];
            (o.center - d.center).norm() <= (o.radius + d.radius) * (1.0 + CONTAINS_SLACK)
        });
        cands
    }
}

/// Index over the charts of an affine covering.
///
/// Charts are grouped by their projection disk on the last axis; the groups
/// are located through a [`DiskIndex`] and candidates are checked exactly.
#[derive(Debug, Clone)]
pub struct CoverIndex {
    charts: Vec<DiagonalAffineChart>,
    groups: Vec<Vec<usize>>,
    disks: DiskIndex,
    dim: usize,
}

fn projection_disk(ch: &DiagonalAffineChart, axis: usize) -> Disk {
    Disk {
        center: ch.translation()[axis],
        radius: ch.scales()[axis].norm(),
    }
}

impl CoverIndex {
    pub fn new(charts: &[DiagonalAffineChart]) -> Self {
        let dim = charts.first().map(|c| c.dim()).unwrap_or(0);
        let mut key_of: HashMap<(u64, u64, u64), usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut disks = Vec::new();
        for (i, ch) in charts.iter().enumerate() {
            let d = projection_disk(ch, dim - 1);
            let key = (
                d.center.re.to_bits(),
                d.center.im.to_bits(),
                d.radius.to_bits(),
            );
            let g = *key_of.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                disks.push(d);
                groups.len() - 1
            });
            groups[g].push(i);
        }
        Self {
            charts: charts.to_vec(),
            groups,
            disks: DiskIndex::new(disks),
            dim,
        }
    }

    pub fn charts(&self) -> &[DiagonalAffineChart] {
        &self.charts
    }

    /// Charts that may meet chart `i` at unit scale (projections overlap on every axis), ascending.
    pub fn overlap_candidates(&self, i: usize) -> Vec<usize> {
        let ch = &self.charts[i];
        let mut out: Vec<usize> = self
            .disks
            .query_disk(&projection_disk(ch, self.dim - 1))
            .into_iter()
            .flat_map(|g| self.groups[g].iter().copied())
            .filter(|&j| {
                j != i
                    && (0..self.dim).all(|a| {
                        let (p, q) = (projection_disk(ch, a), projection_disk(&self.charts[j], a));
                        (p.center - q.center).norm()
                            <= (p.radius + q.radius) * (1.0 + CONTAINS_SLACK)
                    })
            })
            .collect();
        out.sort_unstable();
        out
    }
}

impl ChartLocator for CoverIndex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kappa(&self) -> usize {
        self.charts.len()
    }

    fn locate_all(&self, p: &[Complex64]) -> Vec<usize> {
        if p.len() != self.dim || self.charts.is_empty() {
            return Vec::new();
        }
        let mut hits: Vec<usize> = self
            .disks
            .query_point(p[self.dim - 1])
            .into_iter()
            .flat_map(|g| self.groups[g].iter().copied())
            .filter(|&i| self.charts[i].preimage_norm_sqr_unchecked(p) <= 1.0 + CONTAINS_SLACK)
            .collect();
        hits.sort_unstable();
        hits
    }
}

//! Whitney disk coverings of `D_1 \ D_delta` inside `C \ {0}`.
//!
//! Rings `[rho_{k+1}, rho_k]` with `rho_k = q^k` are covered by `M` equal
//! disks centred on the mid-circle `m_k = rho_k (1 + q) / 2`, each of radius
//! `r_k = m_k / (2 zeta)`. Every ring is a scaled copy of the first one, so
//! the angular count `M` is computed once and `kappa = K * M` where `K` is
//! the number of rings.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chart::{AmbientSpec, Charts, Covering, DiagonalAffineChart, TargetRegion};
use crate::error::{invalid, CoverError, Result};

/// Relative margin kept between the worst-case ring point and the disk boundary.
const RING_MARGIN: f64 = 1e-9;

/// Tuning of the ring construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyDiskParams {
    /// Ratio `q` between consecutive ring radii.
    pub ring_ratio: f64,
    /// Oversampling of the minimal angular count (`>= 1`).
    pub disks_per_ring_factor: f64,
}

impl WhitneyDiskParams {
    /// `q = 1 - 1/(4 zeta)` with the minimal angular count.
    pub fn for_zeta(zeta: f64) -> Self {
        Self {
            ring_ratio: 1.0 - 1.0 / (4.0 * zeta),
            disks_per_ring_factor: 1.0,
        }
    }
}

/// A closed disk `|z - center| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm_sqr()
            <= self.radius * self.radius * (1.0 + crate::chart::CONTAINS_SLACK)
    }
}

/// The ring geometry of an annulus covering, before it is turned into charts.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusLayout {
    zeta: f64,
    delta: f64,
    params: WhitneyDiskParams,
    rings: usize,
    per_ring: usize,
}

impl AnnulusLayout {
    pub fn new(delta: f64, zeta: f64) -> Result<Self> {
        Self::with_params(delta, zeta, WhitneyDiskParams::for_zeta(zeta))
    }

    pub fn with_params(delta: f64, zeta: f64, params: WhitneyDiskParams) -> Result<Self> {
        if !(zeta > 1.0) || !zeta.is_finite() {
            return Err(CoverError::InvalidDoublingFactor(zeta));
        }
        if !(delta > 0.0) || delta.is_nan() {
            return Err(invalid(format!("delta must be > 0, got {delta}")));
        }
        let q = params.ring_ratio;
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("ring ratio must lie in (0, 1), got {q}")));
        }
        if !(params.disks_per_ring_factor >= 1.0) || !params.disks_per_ring_factor.is_finite() {
            return Err(invalid("disks_per_ring_factor must be >= 1"));
        }
        let per_ring = angular_count(q, zeta, params.disks_per_ring_factor)?;
        let rings = if delta >= 1.0 {
            0
        } else {
            ring_count(q, delta)
        };
        Ok(Self {
            zeta,
            delta,
            params,
            rings,
            per_ring,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ring_ratio(&self) -> f64 {
        self.params.ring_ratio
    }

    /// Number of rings `K`.
    pub fn rings(&self) -> usize {
        self.rings
    }

    /// Disks per ring `M`.
    pub fn per_ring(&self) -> usize {
        self.per_ring
    }

    /// Total number of disks.
    pub fn count(&self) -> usize {
        self.rings * self.per_ring
    }

    /// Outer radius `rho_k` of ring `k`.
    pub fn ring_outer(&self, k: usize) -> f64 {
        self.params.ring_ratio.powi(k as i32)
    }

    /// Disk `j` of ring `k`.
    pub fn disk(&self, k: usize, j: usize) -> Disk {
        let q = self.params.ring_ratio;
        let mid = self.ring_outer(k) * (1.0 + q) / 2.0;
        let angle = 2.0 * PI * j as f64 / self.per_ring as f64;
        Disk {
            center: Complex64::from_polar(mid, angle),
            radius: mid / (2.0 * self.zeta),
        }
    }

    /// All disks, outermost ring first, by angle within a ring.
    pub fn disks(&self) -> Vec<Disk> {
        (0..self.rings)
            .flat_map(|k| (0..self.per_ring).map(move |j| (k, j)))
            .map(|(k, j)| self.disk(k, j))
            .collect()
    }

    /// Index (in [`Self::disks`] order) of every disk containing `z`.
    pub fn locate_all(&self, z: Complex64) -> Vec<usize> {
        self.locate_inflated(z, 1.0)
    }

    /// Index of every disk whose radius scaled by `factor` reaches `z`.
    pub fn locate_inflated(&self, z: Complex64, factor: f64) -> Vec<usize> {
        let modulus = z.norm();
        if self.rings == 0 || modulus == 0.0 {
            return Vec::new();
        }
        let q = self.params.ring_ratio;
        let m = self.per_ring as i64;
        // A scaled disk reaches |z| = mid (1 +- s) and arg = +- asin(s).
        let s = factor / (2.0 * self.zeta);
        let (k_lo, k_hi) = if s < 1.0 {
            let k0 = (modulus.ln() / q.ln()).floor() as i64;
            let reach = ((1.0 - s).ln().abs() / q.ln().abs()).ceil() as i64 + 1;
            ((k0 - reach).max(0), (k0 + reach).min(self.rings as i64 - 1))
        } else {
            (0, self.rings as i64 - 1)
        };
        let angle_reach = if s < 1.0 {
            (s.asin() / (2.0 * PI / m as f64)).ceil() as i64 + 1
        } else {
            m
        };
        let j0 = (z.arg() / (2.0 * PI) * m as f64).round() as i64;
        let half = angle_reach.min(m / 2);
        let mut hits = Vec::new();
        for k in k_lo..=k_hi {
            for dj in -half..=(m - 1 - half).min(half) {
                let j = (j0 + dj).rem_euclid(m) as usize;
                let disk = self.disk(k as usize, j);
                if (z - disk.center).norm() <= disk.radius * factor * (1.0 + 1e-9) {
                    hits.push(k as usize * self.per_ring + j);
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        hits
    }

    /// `A(zeta)` with `kappa <= A(zeta) (log(1/delta) + 1)` for every `delta`.
    ///
    /// `K = ceil(log(1/delta) / -log q)`, so `K <= (log(1/delta) + 1) / -log q`
    /// whenever `-log q <= 1`.
    pub fn construction_constant(&self) -> f64 {
        let lq = -self.params.ring_ratio.ln();
        self.per_ring as f64 / lq.min(1.0)
    }
}

/// Smallest `K` with `q^K <= delta`.
fn ring_count(q: f64, delta: f64) -> usize {
    let mut k = (delta.ln() / q.ln()).ceil().max(0.0) as usize;
    while q.powi(k as i32) > delta {
        k += 1;
    }
    while k > 0 && q.powi(k as i32 - 1) <= delta {
        k -= 1;
    }
    k
}

/// Squared distance from the worst point of the normalised ring `[q, 1]`
/// to its nearest disk centre when `count` centres are equally spaced.
fn worst_gap_sqr(q: f64, count: usize) -> f64 {
    let mid = (1.0 + q) / 2.0;
    let c = (PI / count as f64).cos();
    [q, 1.0]
        .iter()
        .map(|&rho| rho * rho + mid * mid - 2.0 * rho * mid * c)
        .fold(f64::MIN, f64::max)
}

fn angular_count(q: f64, zeta: f64, factor: f64) -> Result<usize> {
    let mid = (1.0 + q) / 2.0;
    let half_width = (1.0 - q) / 2.0;
    let radius = mid / (2.0 * zeta);
    if radius <= half_width * (1.0 + 1e-6) {
        return Err(invalid(format!(
            "ring ratio {q} too small for zeta {zeta}: disks cannot span the ring radially"
        )));
    }
    let budget = radius * radius * (1.0 - RING_MARGIN);
    // cos(pi/M) must dominate (rho^2 + m^2 - r^2) / (2 rho m) at both ring edges.
    let needed = [q, 1.0]
        .iter()
        .map(|&rho| (rho * rho + mid * mid - budget) / (2.0 * rho * mid))
        .fold(f64::MIN, f64::max);
    let mut count = if needed >= 1.0 {
        usize::MAX
    } else {
        (PI / needed.max(-1.0).acos()).ceil() as usize
    };
    if count == usize::MAX {
        return Err(invalid(
            "ring cannot be covered with the requested geometry",
        ));
    }
    count = count.max(2);
    while worst_gap_sqr(q, count) > budget {
        count += 1;
    }
    Ok(((count as f64 * factor).ceil() as usize).max(count))
}

/// A `zeta`-doubling covering of `D_1 \ D_delta` in `C \ {0}` by Whitney disks.
///
/// Returns the empty covering when `delta >= 1`.
pub fn cover_annulus(delta: f64, zeta: f64) -> Result<Covering> {
    let layout = AnnulusLayout::new(delta, zeta)?;
    covering_from_layout(&layout)
}

pub fn covering_from_layout(layout: &AnnulusLayout) -> Result<Covering> {
    let charts = layout
        .disks()
        .into_iter()
        .map(|d| DiagonalAffineChart::disk(d.center, d.radius, layout.zeta))
        .collect::<Result<Vec<_>>>()?;
    Covering::new(
        AmbientSpec::PuncturedPlane,
        layout.zeta,
        Some(TargetRegion::Product {
            inner: vec![layout.delta],
        }),
        Charts::Affine(charts),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_one_is_empty() {
        let cov = cover_annulus(1.0, 2.0).unwrap();
        assert_eq!(cov.kappa(), 0);
        assert_eq!(cover_annulus(3.0, 2.0).unwrap().kappa(), 0);
    }

    #[test]
    fn zeta_must_exceed_one() {
        assert!(matches!(
            cover_annulus(0.5, 1.0),
            Err(CoverError::InvalidDoublingFactor(_))
        ));
        assert!(matches!(
            cover_annulus(0.5, 0.5),
            Err(CoverError::InvalidDoublingFactor(_))
        ));
    }

    #[test]
    fn rings_reach_delta() {
        for &delta in &[0.5, 0.1, 1e-3, 1e-5] {
            let l = AnnulusLayout::new(delta, 2.0).unwrap();
            let k = l.rings();
            assert!(l.ring_outer(k) <= delta);
            assert!(l.ring_outer(k - 1) > delta);
        }
    }

    #[test]
    fn doubling_condition_has_factor_two_margin() {
        for &zeta in &[1.1, 2.0, 4.0, 9.0] {
            let l = AnnulusLayout::new(1e-3, zeta).unwrap();
            for d in l.disks() {
                assert!(zeta * d.radius < d.center.norm());
                assert!((2.0 * zeta * d.radius / d.center.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn minimal_angular_count() {
        for &zeta in &[1.5, 2.0, 4.0] {
            let q = 1.0 - 1.0 / (4.0 * zeta);
            let m = angular_count(q, zeta, 1.0).unwrap();
            let mid = (1.0 + q) / 2.0;
            let r = mid / (2.0 * zeta);
            assert!(worst_gap_sqr(q, m) <= r * r);
            assert!(worst_gap_sqr(q, m - 1) > r * r * (1.0 - RING_MARGIN));
        }
    }

    #[test]
    fn kappa_bounded_by_construction_constant() {
        for &zeta in &[2.0, 4.0] {
            for e in 1..=6 {
                let delta = 10f64.powi(-e);
                let l = AnnulusLayout::new(delta, zeta).unwrap();
                assert!(l.count() as f64 <= l.construction_constant() * ((1.0 / delta).ln() + 1.0));
            }
        }
    }

    #[test]
    fn locate_matches_linear_scan() {
        let l = AnnulusLayout::new(0.01, 2.0).unwrap();
        let disks = l.disks();
        for i in 0..500 {
            let t = i as f64 / 500.0;
            let z = Complex64::from_polar(0.01f64.powf(t), 7.3 * i as f64);
            let fast = l.locate_all(z);
            let slow: Vec<usize> = (0..disks.len()).filter(|&j| disks[j].contains(z)).collect();
            assert_eq!(fast, slow, "z = {z}");
            assert!(!fast.is_empty());
        }
    }

    #[test]
    fn bad_ring_ratio() {
        let p = WhitneyDiskParams {
            ring_ratio: 0.2,
            disks_per_ring_factor: 1.0,
        };
        assert!(AnnulusLayout::with_params(0.1, 4.0, p).is_err());
    }
}

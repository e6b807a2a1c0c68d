//! Doubling coverings of `Q_n^eta = {eta <= |x_i| <= 1}` in `C^n` minus the
//! coordinate hyperplanes, built by induction on the dimension.
//!
//! Level 1 is a `gamma^n`-doubling annulus covering. Level `l + 1` suspends
//! level `l` (factor `mu = gamma^{n-l+1}`) with `beta = gamma` over a
//! `layer_zeta(mu, gamma)`-doubling annulus covering, so the final factor is
//! `gamma`. The construction is a product, so [`PolydiscCover`] keeps only
//! the per-level annulus layouts and generates charts on demand.

use num_complex::Complex64;
use serde::Serialize;

use crate::annulus::{AnnulusLayout, Disk};
use crate::chart::{AmbientSpec, Charts, Covering, DiagonalAffineChart, EtaParams, TargetRegion};
use crate::error::{invalid, CoverError, Result};
use crate::suspension::{layer_height, layer_zeta};

/// Per-level bookkeeping of the induction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolydiscCoveringPlan {
    pub n: usize,
    pub eta: f64,
    pub gamma: f64,
    /// 0-based punctured axes.
    pub active_axes: Vec<usize>,
    /// Annulus doubling factor used at each level.
    pub per_level_zeta: Vec<f64>,
    /// Number of vertical disks `N_l` at each level.
    pub per_level_count: Vec<usize>,
    /// Chart count after each level; the last entry is `kappa`.
    pub per_level_kappa: Vec<usize>,
}

impl PolydiscCoveringPlan {
    pub fn kappa(&self) -> usize {
        self.per_level_kappa.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
enum AxisCover {
    Annulus(AnnulusLayout),
    /// A single unit disk around the origin on a non-punctured axis.
    Whole,
}

impl AxisCover {
    fn count(&self) -> usize {
        match self {
            AxisCover::Annulus(l) => l.count(),
            AxisCover::Whole => 1,
        }
    }

    fn disk(&self, j: usize) -> Disk {
        match self {
            AxisCover::Annulus(l) => l.disk(j / l.per_ring(), j % l.per_ring()),
            AxisCover::Whole => Disk {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
            },
        }
    }

    fn locate_inflated(&self, z: Complex64, factor: f64) -> Vec<usize> {
        match self {
            AxisCover::Annulus(l) => l.locate_inflated(z, factor),
            AxisCover::Whole => {
                if z.norm() <= factor * (1.0 + 1e-9) {
                    vec![0]
                } else {
                    Vec::new()
                }
            }
        }
    }
}

fn check_inputs(n: usize, eta: f64, gamma: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(gamma >= 2.0) || !gamma.is_finite() {
        return Err(CoverError::GammaTooSmall(gamma));
    }
    if !(eta > 0.0) || eta.is_nan() {
        return Err(invalid(format!("eta must be > 0, got {eta}")));
    }
    Ok(())
}

/// Doubling factor of the annulus covering at 0-based level `l`.
fn level_zeta(n: usize, l: usize, gamma: f64) -> f64 {
    if l == 0 {
        gamma.powi(n as i32)
    } else {
        layer_zeta(gamma.powi((n - l + 1) as i32), gamma)
    }
}

/// A lazily generated polydisc covering.
#[derive(Debug, Clone)]
pub struct PolydiscCover {
    n: usize,
    eta: f64,
    gamma: f64,
    active_axes: Vec<usize>,
    axes: Vec<AxisCover>,
    plan: PolydiscCoveringPlan,
}

impl PolydiscCover {
    /// All axes punctured.
    pub fn new(n: usize, eta: f64, gamma: f64) -> Result<Self> {
        Self::with_active_axes(n, (0..n).collect(), eta, gamma)
    }

    /// Only `active_axes` (0-based, increasing) are punctured; the other
    /// levels use one unit disk around the origin.
    pub fn with_active_axes(
        n: usize,
        active_axes: Vec<usize>,
        eta: f64,
        gamma: f64,
    ) -> Result<Self> {
        check_inputs(n, eta, gamma)?;
        AmbientSpec::PolydiscComplement {
            n,
            active_axes: active_axes.clone(),
        }
        .validate()?;
        let mut axes = Vec::with_capacity(n);
        let mut zetas = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        let mut kappas = Vec::with_capacity(n);
        let mut kappa: usize = 1;
        for l in 0..n {
            let zeta = level_zeta(n, l, gamma);
            let axis = if active_axes.contains(&l) {
                AxisCover::Annulus(AnnulusLayout::new(eta, zeta)?)
            } else {
                AxisCover::Whole
            };
            kappa = kappa
                .checked_mul(axis.count())
                .ok_or_else(|| invalid("chart count overflows usize"))?;
            zetas.push(zeta);
            counts.push(axis.count());
            kappas.push(kappa);
            axes.push(axis);
        }
        let plan = PolydiscCoveringPlan {
            n,
            eta,
            gamma,
            active_axes: active_axes.clone(),
            per_level_zeta: zetas,
            per_level_count: counts,
            per_level_kappa: kappas,
        };
        Ok(Self {
            n,
            eta,
            gamma,
            active_axes,
            axes,
            plan,
        })
    }

    pub fn plan(&self) -> &PolydiscCoveringPlan {
        &self.plan
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.plan.kappa()
    }

    pub fn ambient(&self) -> AmbientSpec {
        AmbientSpec::PolydiscComplement {
            n: self.n,
            active_axes: self.active_axes.clone(),
        }
    }

    pub fn target(&self) -> TargetRegion {
        let inner = (0..self.n)
            .map(|i| {
                if self.active_axes.contains(&i) {
                    self.eta
                } else {
                    0.0
                }
            })
            .collect();
        TargetRegion::Product { inner }
    }

    /// Disk indices per axis of chart `idx`; axis 0 varies fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        self.axes
            .iter()
            .map(|a| {
                let j = idx % a.count();
                idx /= a.count();
                j
            })
            .collect()
    }

    fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.axes)
            .rev()
            .fold(0, |acc, (&j, a)| acc * a.count() + j)
    }

    fn axis_scale(&self, i: usize, radius: f64) -> f64 {
        let mut scale = if i == 0 {
            radius
        } else {
            layer_height(radius, self.gamma)
        };
        for _ in i + 1..self.n {
            scale *= self.gamma;
        }
        scale
    }

    fn axis_factor(&self, i: usize) -> f64 {
        self.axis_scale(i, 1.0)
    }

    /// Chart `idx`, identical to the one the explicit suspension recursion produces.
    pub fn chart(&self, idx: usize) -> DiagonalAffineChart {
        assert!(idx < self.kappa(), "chart index {idx} out of range");
        let multi = self.multi_index(idx);
        let mut b = Vec::with_capacity(self.n);
        let mut d = Vec::with_capacity(self.n);
        for (i, (&j, axis)) in multi.iter().zip(&self.axes).enumerate() {
            let disk = axis.disk(j);
            b.push(disk.center);
            d.push(Complex64::new(self.axis_scale(i, disk.radius), 0.0));
        }
        DiagonalAffineChart::new(b, d, self.gamma).expect("polydisc chart scales are positive")
    }

    pub fn charts(&self) -> impl Iterator<Item = DiagonalAffineChart> + '_ {
        (0..self.kappa()).map(move |i| self.chart(i))
    }

    /// Every chart whose unit-scale image contains `p`, ascending.
    pub fn locate_all(&self, p: &[Complex64]) -> Vec<usize> {
        if p.len() != self.n || self.kappa() == 0 {
            return Vec::new();
        }
        // The chart's projection to axis i is the axis disk scaled by |d_i| / r.
        let per_axis: Vec<Vec<usize>> = self
            .axes
            .iter()
            .zip(p)
            .enumerate()
            .map(|(i, (a, &z))| a.locate_inflated(z, self.axis_factor(i)))
            .collect();
        if per_axis.iter().any(|v| v.is_empty()) {
            return Vec::new();
        }
        let mut hits = Vec::new();
        let mut cursor = vec![0usize; self.n];
        loop {
            let multi: Vec<usize> = cursor.iter().zip(&per_axis).map(|(&c, v)| v[c]).collect();
            let idx = self.flat_index(&multi);
            if self.chart(idx).preimage_norm_sqr_unchecked(p) <= 1.0 + crate::chart::CONTAINS_SLACK
            {
                hits.push(idx);
            }
            let mut axis = 0;
            loop {
                if axis == self.n {
                    hits.sort_unstable();
                    return hits;
                }
                cursor[axis] += 1;
                if cursor[axis] < per_axis[axis].len() {
                    break;
                }
                cursor[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Generates every chart.
    pub fn materialize(&self) -> Result<Covering> {
        Covering::new(
            self.ambient(),
            self.gamma,
            Some(self.target()),
            Charts::Affine(self.charts().collect()),
        )
    }
}

/// A `gamma`-doubling covering of `Q_n^eta` in `C^n \ Z` and its plan.
///
/// `eta >= 1` gives the empty covering. Requires `gamma >= 2`.
pub fn cover_punctured_polydisc(
    n: usize,
    eta: f64,
    gamma: f64,
) -> Result<(Covering, PolydiscCoveringPlan)> {
    let cover = PolydiscCover::new(n, eta, gamma)?;
    Ok((cover.materialize()?, cover.plan))
}

/// The plan (and hence `kappa`) without generating charts.
pub fn polydisc_plan(n: usize, eta: f64, gamma: f64) -> Result<PolydiscCoveringPlan> {
    Ok(PolydiscCover::new(n, eta, gamma)?.plan)
}

/// `eta = (c_lower delta^d / C_unit)^{1/alpha0}`.
pub fn eta_from_delta(delta: f64, p: &EtaParams) -> Result<f64> {
    p.validate()?;
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be > 0, got {delta}")));
    }
    Ok((p.c_lower * delta.powi(p.d as i32) / p.c_unit).powf(1.0 / p.alpha0 as f64))
}

/// Lower bound `(|c| / C_unit)^{1/alpha0}` on every coordinate of the level set `{x^alpha = c}`.
pub fn level_lower_bound(c: Complex64, c_unit: f64, alpha0: u32) -> Result<f64> {
    if c.norm() == 0.0 {
        return Err(CoverError::NotARegularValue);
    }
    if !(c_unit >= 1.0) || alpha0 == 0 {
        return Err(invalid("need C_unit >= 1 and alpha0 >= 1"));
    }
    Ok((c.norm() / c_unit).powf(1.0 / alpha0 as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::cover_annulus;
    use crate::suspension::suspend_covering;

    #[test]
    fn n1_is_the_annulus() {
        let (cov, plan) = cover_punctured_polydisc(1, 0.1, 2.0).unwrap();
        let ann = cover_annulus(0.1, 2.0).unwrap();
        assert_eq!(plan.per_level_zeta, vec![2.0]);
        assert_eq!(cov.affine_charts().unwrap(), ann.affine_charts().unwrap());
        assert_eq!(cov.ambient(), &AmbientSpec::polydisc(1));
    }

    #[test]
    fn lazy_matches_explicit_suspension() {
        for (n, eta, gamma) in [(2, 0.5, 2.0), (2, 0.6, 3.0), (3, 0.95, 2.0)] {
            let lazy = PolydiscCover::new(n, eta, gamma).unwrap();
            let mut cov = cover_annulus(eta, gamma.powi(n as i32)).unwrap();
            for _ in 1..n {
                cov = suspend_covering(&cov, eta, gamma).unwrap();
            }
            assert_eq!(cov.gamma(), gamma);
            let explicit = cov.affine_charts().unwrap();
            assert_eq!(explicit.len(), lazy.kappa());
            for (i, ch) in explicit.iter().enumerate() {
                assert_eq!(ch, &lazy.chart(i), "chart {i}");
            }
        }
    }

    #[test]
    fn recurrence_is_exact() {
        let plan = polydisc_plan(3, 0.1, 2.0).unwrap();
        for l in 1..3 {
            assert_eq!(
                plan.per_level_kappa[l],
                plan.per_level_kappa[l - 1] * plan.per_level_count[l]
            );
        }
        assert_eq!(plan.per_level_kappa[0], plan.per_level_count[0]);
        assert_eq!(plan.per_level_zeta[0], 8.0);
        assert!((plan.per_level_zeta[1] - 16.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((plan.per_level_zeta[2] - 8.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gamma_and_eta_errors() {
        assert!(matches!(
            PolydiscCover::new(2, 0.1, 1.5),
            Err(CoverError::GammaTooSmall(_))
        ));
        assert_eq!(polydisc_plan(2, 1.0, 2.0).unwrap().kappa(), 0);
        assert_eq!(cover_punctured_polydisc(2, 2.0, 2.0).unwrap().0.kappa(), 0);
    }

    #[test]
    fn final_charts_avoid_hyperplanes() {
        let cover = PolydiscCover::new(2, 0.05, 2.0).unwrap();
        let ambient = cover.ambient();
        assert!(cover
            .charts()
            .all(|c| c.avoidance_certificate(&ambient, 2.0).unwrap()));
    }

    #[test]
    fn locate_agrees_with_scan() {
        use rand::{Rng, SeedableRng};
        let cover = PolydiscCover::new(2, 0.3, 2.0).unwrap();
        let charts: Vec<_> = cover.charts().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p: Vec<Complex64> = (0..2)
                .map(|_| Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(-3.2..3.2)))
                .collect();
            let scan: Vec<usize> = (0..charts.len())
                .filter(|&i| charts[i].contains(&p, 1.0).unwrap())
                .collect();
            let hits = cover.locate_all(&p);
            assert!(!hits.is_empty());
            assert_eq!(hits, scan);
        }
    }

    #[test]
    fn inactive_axis_uses_one_disk() {
        let cover = PolydiscCover::with_active_axes(2, vec![1], 0.2, 2.0).unwrap();
        assert_eq!(cover.plan().per_level_count[0], 1);
        let ambient = cover.ambient();
        assert!(cover
            .charts()
            .all(|c| c.avoidance_certificate(&ambient, 2.0).unwrap()));
        let p = [Complex64::new(0.0, 0.0), Complex64::new(0.0, -0.5)];
        assert!(!cover.locate_all(&p).is_empty());
    }

    #[test]
    fn eta_formulas() {
        let one = EtaParams::new(1.0, 1.0, 1, 1).unwrap();
        assert!((eta_from_delta(0.37, &one).unwrap() - 0.37).abs() < 1e-15);
        let p = EtaParams::new(0.5, 2.0, 2, 2).unwrap();
        assert!((eta_from_delta(0.1, &p).unwrap() - 0.05).abs() < 1e-15);
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!((level_lower_bound(c(0.01), 1.0, 2).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(level_lower_bound(c(1.0), 1.0, 3).unwrap(), 1.0);
        assert_eq!(level_lower_bound(c(0.25), 1.0, 1).unwrap(), 0.25);
        assert!(matches!(
            level_lower_bound(c(0.0), 1.0, 1),
            Err(CoverError::NotARegularValue)
        ));
    }
}

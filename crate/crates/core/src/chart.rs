//! Charts, ambient regions and coverings.
//!
//! Every complex chart in this crate is diagonal affine, `psi(x) = b + D x`
//! with `D = diag(d)`, defined on the Euclidean (Hermitian) unit ball of
//! `C^n` and extended to the concentric ball of radius `gamma`. Membership
//! and hyperplane avoidance are then exact `O(n)` formulas.

use std::ops::Deref;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, CoverError, Result};
use crate::levelset::MonomialLevelChart;

/// Relative tolerance for equality-flavoured checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative slack on the squared-norm test in [`DiagonalAffineChart::contains`].
pub const CONTAINS_SLACK: f64 = 1e-12;

static TOL: OnceLock<f64> = OnceLock::new();

/// Tolerance in effect: `ATLAS_TOL` when set to a positive float, else [`DEFAULT_TOL`].
pub fn tolerance() -> f64 {
    *TOL.get_or_init(|| {
        std::env::var("ATLAS_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TOL)
    })
}

/// Fixes the tolerance before first use. Returns `false` if it was already fixed.
pub fn set_tolerance(tol: f64) -> bool {
    tol.is_finite() && tol > 0.0 && TOL.set(tol).is_ok()
}

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        Ok(Self(coords))
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for CPoint {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Hermitian norm of a complex vector.
pub fn hermitian_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `psi(x) = b + diag(d) x` on the unit ball, extendible to the ball of radius `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalAffineChart {
    b: Vec<Complex64>,
    d: Vec<Complex64>,
    gamma: f64,
}

impl DiagonalAffineChart {
    pub fn new(b: Vec<Complex64>, d: Vec<Complex64>, gamma: f64) -> Result<Self> {
        if b.is_empty() {
            return Err(invalid("chart dimension must be >= 1"));
        }
        if b.len() != d.len() {
            return Err(CoverError::DimensionMismatch {
                expected: b.len(),
                got: d.len(),
            });
        }
        if let Some(i) = d.iter().position(|z| z.norm() == 0.0 || !z.is_finite()) {
            return Err(invalid(format!("scale d[{i}] must be finite and nonzero")));
        }
        if b.iter().any(|z| !z.is_finite()) {
            return Err(invalid("translation must be finite"));
        }
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(CoverError::InvalidDoublingFactor(gamma));
        }
        Ok(Self { b, d, gamma })
    }

    /// The 1-D disk chart `x -> center + radius * x`.
    pub fn disk(center: Complex64, radius: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![center], vec![Complex64::new(radius, 0.0)], gamma)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn translation(&self) -> &[Complex64] {
        &self.b
    }

    pub fn scales(&self) -> &[Complex64] {
        &self.d
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `psi(x)`, valid for any `x` in the extension ball.
    pub fn eval(&self, x: &[Complex64]) -> Result<CPoint> {
        self.check_dim(x.len())?;
        Ok(CPoint(
            self.b
                .iter()
                .zip(&self.d)
                .zip(x)
                .map(|((b, d), x)| b + d * x)
                .collect(),
        ))
    }

    /// Affine preimage `D^{-1}(p - b)`.
    pub fn preimage(&self, p: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(p.len())?;
        Ok(self
            .b
            .iter()
            .zip(&self.d)
            .zip(p)
            .map(|((b, d), p)| (p - b) / d)
            .collect())
    }

    /// Squared Hermitian norm of the preimage of `p`.
    pub fn preimage_norm_sqr(&self, p: &[Complex64]) -> Result<f64> {
        self.check_dim(p.len())?;
        Ok(self.preimage_norm_sqr_unchecked(p))
    }

    pub(crate) fn preimage_norm_sqr_unchecked(&self, p: &[Complex64]) -> f64 {
        self.b
            .iter()
            .zip(&self.d)
            .zip(p)
            .map(|((b, d), p)| (p - b).norm_sqr() / d.norm_sqr())
            .sum()
    }

    /// Whether `p` lies in `psi(B_scale)`.
    pub fn contains(&self, p: &[Complex64], scale: f64) -> Result<bool> {
        if !(scale > 0.0) || scale > self.gamma {
            return Err(invalid(format!(
                "scale must lie in (0, gamma], got {scale}"
            )));
        }
        Ok(self.preimage_norm_sqr(p)? <= scale * scale * (1.0 + CONTAINS_SLACK))
    }

    /// Exact check that `psi(B_scale)` misses the zero set of `ambient`.
    ///
    /// The `i`-th coordinate of the image of `B_scale` is the closed disk of
    /// radius `scale |d_i|` about `b_i`, so avoidance of `{x_i = 0}` is
    /// `|b_i| > scale |d_i|`.
    pub fn avoidance_certificate(&self, ambient: &AmbientSpec, scale: f64) -> Result<bool> {
        if !(scale > 0.0) || scale > self.gamma * (1.0 + CONTAINS_SLACK) {
            return Err(invalid(format!(
                "scale must lie in (0, gamma], got {scale}"
            )));
        }
        match ambient {
            AmbientSpec::PuncturedPlane => {
                self.check_dim(1)?;
                Ok(self.avoids_axis(0, scale))
            }
            AmbientSpec::PolydiscComplement { n, active_axes } => {
                self.check_dim(*n)?;
                Ok(active_axes.iter().all(|&i| self.avoids_axis(i, scale)))
            }
            AmbientSpec::MonomialLevelSet { .. } => {
                Err(CoverError::UnsupportedAmbient("monomial level set"))
            }
        }
    }

    pub(crate) fn avoids_axis(&self, axis: usize, scale: f64) -> bool {
        self.b[axis].norm() > scale * self.d[axis].norm()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(CoverError::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// The manifold `Y` in which charts must live.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientSpec {
    /// `C \ {0}`.
    PuncturedPlane,
    /// `C^n` minus the coordinate hyperplanes `{x_i = 0}` for the active axes (0-based).
    PolydiscComplement { n: usize, active_axes: Vec<usize> },
    /// The level hypersurface `{x^alpha = c}`.
    MonomialLevelSet { alpha: Vec<u32>, c: Complex64 },
}

impl AmbientSpec {
    /// `C^n` minus all coordinate hyperplanes.
    pub fn polydisc(n: usize) -> Self {
        AmbientSpec::PolydiscComplement {
            n,
            active_axes: (0..n).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AmbientSpec::PuncturedPlane => Ok(()),
            AmbientSpec::PolydiscComplement { n, active_axes } => {
                if *n == 0 {
                    return Err(invalid("polydisc dimension must be >= 1"));
                }
                if active_axes.is_empty() {
                    return Err(invalid("active_axes must be nonempty"));
                }
                if active_axes.iter().any(|&i| i >= *n) {
                    return Err(invalid("active axis out of range"));
                }
                if active_axes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("active_axes must be strictly increasing"));
                }
                Ok(())
            }
            AmbientSpec::MonomialLevelSet { alpha, c } => {
                if alpha.is_empty() || alpha.contains(&0) {
                    return Err(invalid("all exponents must be >= 1"));
                }
                if c.norm() == 0.0 {
                    return Err(CoverError::NotARegularValue);
                }
                Ok(())
            }
        }
    }

    /// Dimension of the complex space containing the charts' images.
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpec::PuncturedPlane => 1,
            AmbientSpec::PolydiscComplement { n, .. } => *n,
            AmbientSpec::MonomialLevelSet { alpha, .. } => alpha.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AmbientSpec::PuncturedPlane => "punctured_plane",
            AmbientSpec::PolydiscComplement { .. } => "polydisc_complement",
            AmbientSpec::MonomialLevelSet { .. } => "monomial_level_set",
        }
    }
}

/// The compact set a covering is meant to cover.
///
/// `inner[i]` is the inner radius on axis `i`; the region is the product of
/// closed annuli `{inner[i] <= |z_i| <= 1}` (a full disk when `inner[i] = 0`).
#[derive(Debug, Clone, PartialEq)]
pub enum TargetRegion {
    /// A product of annuli in the ambient coordinates.
    Product { inner: Vec<f64> },
    /// The graph of all branches of `x_1 = (c / xbar^alphabar)^{1/alpha_1}` over
    /// a product of annuli in the `xbar = (x_2, ..., x_n)` coordinates.
    LevelGraph { inner: Vec<f64> },
}

impl TargetRegion {
    pub fn inner(&self) -> &[f64] {
        match self {
            TargetRegion::Product { inner } | TargetRegion::LevelGraph { inner } => inner,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.inner().iter().any(|&r| r >= 1.0)
    }
}

/// The charts of a covering; a covering never mixes chart kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Charts {
    Affine(Vec<DiagonalAffineChart>),
    Level(Vec<MonomialLevelChart>),
}

impl Charts {
    pub fn len(&self) -> usize {
        match self {
            Charts::Affine(v) => v.len(),
            Charts::Level(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A finite family of charts with a common doubling factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    ambient: AmbientSpec,
    gamma: f64,
    target: Option<TargetRegion>,
    charts: Charts,
}

impl Covering {
    pub fn new(
        ambient: AmbientSpec,
        gamma: f64,
        target: Option<TargetRegion>,
        charts: Charts,
    ) -> Result<Self> {
        ambient.validate()?;
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(CoverError::InvalidDoublingFactor(gamma));
        }
        let dim = ambient.dim();
        match &charts {
            Charts::Affine(v) => {
                if let AmbientSpec::MonomialLevelSet { .. } = ambient {
                    return Err(CoverError::RegionMismatch(
                        "affine charts in a level-set ambient".into(),
                    ));
                }
                for c in v {
                    if c.dim() != dim {
                        return Err(CoverError::DimensionMismatch {
                            expected: dim,
                            got: c.dim(),
                        });
                    }
                    if c.gamma() != gamma {
                        return Err(invalid("all charts must share the covering gamma"));
                    }
                }
            }
            Charts::Level(v) => {
                let AmbientSpec::MonomialLevelSet { alpha, c } = &ambient else {
                    return Err(CoverError::RegionMismatch(
                        "level charts need a level-set ambient".into(),
                    ));
                };
                for ch in v {
                    if ch.alpha() != alpha.as_slice() || ch.level() != *c {
                        return Err(invalid("level chart data differs from the ambient"));
                    }
                    if ch.base().gamma() != gamma {
                        return Err(invalid("all charts must share the covering gamma"));
                    }
                }
            }
        }
        if let Some(t) = &target {
            let expected = match (&ambient, t) {
                (AmbientSpec::MonomialLevelSet { .. }, TargetRegion::LevelGraph { .. }) => dim - 1,
                (AmbientSpec::MonomialLevelSet { .. }, _)
                | (_, TargetRegion::LevelGraph { .. }) => {
                    return Err(CoverError::RegionMismatch(
                        "target kind does not fit the ambient".into(),
                    ))
                }
                _ => dim,
            };
            if t.inner().len() != expected {
                return Err(CoverError::RegionMismatch(format!(
                    "target has {} axes, ambient needs {expected}",
                    t.inner().len()
                )));
            }
        }
        Ok(Self {
            ambient,
            gamma,
            target,
            charts,
        })
    }

    /// The covering with no charts (covering an empty region).
    pub fn empty(ambient: AmbientSpec, gamma: f64, target: Option<TargetRegion>) -> Result<Self> {
        let charts = match ambient {
            AmbientSpec::MonomialLevelSet { .. } => Charts::Level(Vec::new()),
            _ => Charts::Affine(Vec::new()),
        };
        Self::new(ambient, gamma, target, charts)
    }

    pub fn ambient(&self) -> &AmbientSpec {
        &self.ambient
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn target(&self) -> Option<&TargetRegion> {
        self.target.as_ref()
    }

    pub fn charts(&self) -> &Charts {
        &self.charts
    }

    /// Affine charts, or `None` for a level-set covering.
    pub fn affine_charts(&self) -> Option<&[DiagonalAffineChart]> {
        match &self.charts {
            Charts::Affine(v) => Some(v),
            Charts::Level(_) => None,
        }
    }

    pub fn level_charts(&self) -> Option<&[MonomialLevelChart]> {
        match &self.charts {
            Charts::Level(v) => Some(v),
            Charts::Affine(_) => None,
        }
    }

    /// Complexity: the number of charts.
    pub fn kappa(&self) -> usize {
        self.charts.len()
    }
}

/// Constants of the two-sided bounds feeding the `eta`-from-`delta` formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaParams {
    /// Lower Lojasiewicz constant `c_{n,d}`.
    pub c_lower: f64,
    /// Bound `C_y` with `1/C_y <= |U| <= C_y`.
    pub c_unit: f64,
    /// Degree.
    pub d: u32,
    /// Smallest exponent of the monomial.
    pub alpha0: u32,
}

impl EtaParams {
    pub fn new(c_lower: f64, c_unit: f64, d: u32, alpha0: u32) -> Result<Self> {
        let p = Self {
            c_lower,
            c_unit,
            d,
            alpha0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_lower > 0.0) {
            return Err(invalid("c_lower must be > 0"));
        }
        if !(self.c_unit >= 1.0) || !self.c_unit.is_finite() {
            return Err(invalid("C_unit must be >= 1"));
        }
        if self.c_lower > self.c_unit {
            return Err(invalid("c_lower must not exceed C_unit"));
        }
        if self.d == 0 || self.alpha0 == 0 {
            return Err(invalid("d and alpha0 must be positive"));
        }
        Ok(())
    }
}

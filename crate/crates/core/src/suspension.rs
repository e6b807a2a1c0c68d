//! Suspension of charts and layered coverings of `G x (D_1 \ D_delta)`.
//!
//! `Sigma_{lambda, a, beta} psi (x, y) = (psi~(beta x), lambda y + a)`. For a
//! diagonal affine `psi` this is again diagonal affine with scales
//! `(beta d, lambda)` and doubling factor `gamma / beta`.

use num_complex::Complex64;

use crate::annulus::{AnnulusLayout, Disk};
use crate::chart::{AmbientSpec, Charts, Covering, DiagonalAffineChart, TargetRegion};
use crate::error::{invalid, CoverError, Result};

/// Parameters of one suspension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuspensionParams {
    /// Layer height `lambda > 0`.
    pub lambda: f64,
    /// Vertical centre `a`.
    pub shift: Complex64,
    /// Thickening `beta`, `1 < beta < gamma`.
    pub beta: f64,
}

/// `(1 - 1/beta^2)^{1/2}`.
fn thickening_root(beta: f64) -> f64 {
    (1.0 - 1.0 / (beta * beta)).sqrt()
}

/// Doubling factor `theta = gamma / beta` of a suspended chart.
pub fn suspended_factor(gamma: f64, beta: f64) -> f64 {
    gamma / beta
}

/// Radius `nu = lambda sqrt(1 - 1/beta^2)` of the vertical disk a layer covers.
pub fn covered_radius(lambda: f64, beta: f64) -> f64 {
    lambda * thickening_root(beta)
}

/// Layer height `lambda = r (1 - 1/beta^2)^{-1/2}` that makes a layer cover a disk of radius `r`.
pub fn layer_height(radius: f64, beta: f64) -> f64 {
    radius / thickening_root(beta)
}

/// Doubling factor the vertical disks need: `zeta = (2 mu / beta) (1 - 1/beta^2)^{-1/2}`.
pub fn layer_zeta(mu: f64, beta: f64) -> f64 {
    2.0 * mu / beta / thickening_root(beta)
}

fn check_beta(beta: f64, gamma: f64) -> Result<()> {
    if beta > 1.0 && beta < gamma && beta.is_finite() {
        Ok(())
    } else {
        Err(CoverError::InvalidBeta { beta, gamma })
    }
}

/// The chart `(x, y) -> (b + beta D x, lambda y + a)` with factor `gamma / beta`.
pub fn suspend_chart(
    chart: &DiagonalAffineChart,
    p: &SuspensionParams,
) -> Result<DiagonalAffineChart> {
    check_beta(p.beta, chart.gamma())?;
    if !(p.lambda > 0.0) || !p.lambda.is_finite() {
        return Err(invalid(format!(
            "layer height must be > 0, got {}",
            p.lambda
        )));
    }
    let mut b = chart.translation().to_vec();
    b.push(p.shift);
    let mut d: Vec<Complex64> = chart.scales().iter().map(|d| d * p.beta).collect();
    d.push(Complex64::new(p.lambda, 0.0));
    DiagonalAffineChart::new(b, d, suspended_factor(chart.gamma(), p.beta))
}

/// Layered covering of `G x (D_1 \ D_delta)` in `Y x (C \ {0})`.
///
/// Uses a `zeta`-doubling annulus covering with `zeta = layer_zeta(mu, beta)`
/// and emits one suspended copy of every input chart per annulus disk,
/// ordered by (layer, inner chart).
pub fn suspend_covering(cov: &Covering, delta: f64, beta: f64) -> Result<Covering> {
    let mu = cov.gamma();
    check_beta(beta, mu)?;
    let layout = AnnulusLayout::new(delta, layer_zeta(mu, beta))?;
    if layout.count() > 0 && cov.kappa() == 0 {
        return Err(invalid(
            "cannot suspend an empty covering over a nonempty annulus",
        ));
    }
    suspend_over_disks(cov, &layout.disks(), beta, true, delta)
}

/// Suspends `cov` over an explicit list of vertical disks.
///
/// `active` says whether the new axis is punctured; `inner` is the inner
/// radius recorded in the target region for the new axis.
pub(crate) fn suspend_over_disks(
    cov: &Covering,
    disks: &[Disk],
    beta: f64,
    active: bool,
    inner: f64,
) -> Result<Covering> {
    let charts = cov
        .affine_charts()
        .ok_or(CoverError::UnsupportedAmbient("monomial level set"))?;
    let ambient = extend_ambient(cov.ambient(), active)?;
    let theta = suspended_factor(cov.gamma(), beta);
    let target = match cov.target() {
        Some(TargetRegion::Product { inner: v }) => {
            let mut v = v.clone();
            v.push(inner);
            Some(TargetRegion::Product { inner: v })
        }
        _ => None,
    };
    let mut out = Vec::with_capacity(disks.len() * charts.len());
    for disk in disks {
        let p = SuspensionParams {
            lambda: layer_height(disk.radius, beta),
            shift: disk.center,
            beta,
        };
        for chart in charts {
            out.push(suspend_chart(chart, &p)?);
        }
    }
    Covering::new(ambient, theta, target, Charts::Affine(out))
}

fn extend_ambient(ambient: &AmbientSpec, active: bool) -> Result<AmbientSpec> {
    let (n, mut axes) = match ambient {
        AmbientSpec::PuncturedPlane => (1, vec![0]),
        AmbientSpec::PolydiscComplement { n, active_axes } => (*n, active_axes.clone()),
        AmbientSpec::MonomialLevelSet { .. } => {
            return Err(CoverError::UnsupportedAmbient("monomial level set"))
        }
    };
    if active {
        axes.push(n);
    }
    if axes.is_empty() {
        return Err(invalid("suspension would leave no punctured axis"));
    }
    Ok(AmbientSpec::PolydiscComplement {
        n: n + 1,
        active_axes: axes,
    })
}

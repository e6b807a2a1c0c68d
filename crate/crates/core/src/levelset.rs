//! Coverings of the monomial level set `Y_c = {x^alpha = c}`.
//!
//! `Y_c` is the union of the graphs of the `alpha_1` branches of
//! `x_1 = (c / xbar^alphabar)^{1/alpha_1}` over the base coordinates
//! `xbar = (x_2, ..., x_n)`. A chart composes a base polydisc chart with one
//! branch, written with principal logarithms so it is single valued on the
//! whole extended ball.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chart::{
    hermitian_norm, AmbientSpec, CPoint, Charts, Covering, DiagonalAffineChart, TargetRegion,
    CONTAINS_SLACK,
};
use crate::error::{invalid, CoverError, Result};
use crate::polydisc::{level_lower_bound, PolydiscCover};

/// A base chart on `C^{n-1}` composed with branch `k` of the root.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialLevelChart {
    base: DiagonalAffineChart,
    branch: u32,
    alpha: Vec<u32>,
    c: Complex64,
}

impl MonomialLevelChart {
    pub fn new(
        base: DiagonalAffineChart,
        branch: u32,
        alpha: Vec<u32>,
        c: Complex64,
    ) -> Result<Self> {
        if alpha.len() < 2 || alpha.contains(&0) {
            return Err(invalid("need at least two exponents, all >= 1"));
        }
        if base.dim() + 1 != alpha.len() {
            return Err(CoverError::DimensionMismatch {
                expected: alpha.len() - 1,
                got: base.dim(),
            });
        }
        if branch >= alpha[0] {
            return Err(invalid(format!(
                "branch {branch} out of range for alpha_1 = {}",
                alpha[0]
            )));
        }
        if c.norm() == 0.0 {
            return Err(CoverError::NotARegularValue);
        }
        Ok(Self {
            base,
            branch,
            alpha,
            c,
        })
    }

    pub fn base(&self) -> &DiagonalAffineChart {
        &self.base
    }

    pub fn branch(&self) -> u32 {
        self.branch
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn level(&self) -> Complex64 {
        self.c
    }

    /// Whether the base chart keeps every coordinate away from 0 on `B_gamma`.
    pub fn branch_defined(&self) -> bool {
        let n = self.base.dim();
        (0..n).all(|i| self.base.avoids_axis(i, self.base.gamma()))
    }

    /// `(g_k(phi(x)), phi(x))` for `x` in the ball of radius `scale <= gamma`.
    pub fn evaluate(&self, x: &[Complex64], scale: f64) -> Result<CPoint> {
        let gamma = self.base.gamma();
        if !(scale > 0.0 && scale <= gamma) {
            return Err(invalid(format!(
                "scale must lie in (0, {gamma}], got {scale}"
            )));
        }
        if x.len() != self.base.dim() {
            return Err(CoverError::DimensionMismatch {
                expected: self.base.dim(),
                got: x.len(),
            });
        }
        if hermitian_norm(x) > scale * (1.0 + CONTAINS_SLACK) {
            return Err(invalid("point lies outside the requested ball"));
        }
        if !self.branch_defined() {
            return Err(CoverError::BranchUndefined(format!(
                "branch {}",
                self.branch
            )));
        }
        let b = self.base.translation();
        let d = self.base.scales();
        let mut log_sum = Complex64::new(0.0, 0.0);
        for i in 0..x.len() {
            let t = d[i] * x[i] / b[i];
            log_sum += (b[i].ln() + (Complex64::new(1.0, 0.0) + t).ln()) * self.alpha[i + 1] as f64;
        }
        let a1 = self.alpha[0] as f64;
        let rotation = Complex64::new(0.0, 2.0 * PI * self.branch as f64 / a1);
        let x1 = ((self.c.ln() - log_sum) / a1 + rotation).exp();
        let mut out = Vec::with_capacity(x.len() + 1);
        out.push(x1);
        for i in 0..x.len() {
            out.push(b[i] + d[i] * x[i]);
        }
        CPoint::new(out)
    }
}

/// `|p^alpha - c| / |c|`.
pub fn level_residual(p: &[Complex64], alpha: &[u32], c: Complex64) -> f64 {
    let value = p
        .iter()
        .zip(alpha)
        .fold(Complex64::new(1.0, 0.0), |acc, (z, &a)| acc * z.powu(a));
    (value - c).norm() / c.norm()
}

/// All roots `x_1` of `x_1^{alpha_1} = c / xbar^alphabar`, by direct root extraction.
pub fn direct_branch_values(alpha: &[u32], c: Complex64, xbar: &[Complex64]) -> Vec<Complex64> {
    let denom = xbar
        .iter()
        .zip(&alpha[1..])
        .fold(Complex64::new(1.0, 0.0), |acc, (z, &a)| acc * z.powu(a));
    let w = c / denom;
    let a1 = alpha[0];
    let root = w.powf(1.0 / a1 as f64);
    (0..a1)
        .map(|k| root * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / a1 as f64))
        .collect()
}

fn check_level(alpha: &[u32], c: Complex64) -> Result<()> {
    if alpha.len() < 2 || alpha.contains(&0) {
        return Err(invalid("need at least two exponents, all >= 1"));
    }
    let m = c.norm();
    if m == 0.0 {
        return Err(CoverError::NotARegularValue);
    }
    if !(m < 1.0) {
        return Err(CoverError::LevelOutsideRange(m));
    }
    Ok(())
}

/// Inner radius `eta = |c|^{1/min alpha}` of the base region.
pub fn base_eta(alpha: &[u32], c: Complex64) -> Result<f64> {
    check_level(alpha, c)?;
    level_lower_bound(c, 1.0, *alpha.iter().min().expect("nonempty"))
}

/// The lazy base covering of `Q_{n-1}^eta`.
pub fn level_base(alpha: &[u32], c: Complex64, gamma: f64) -> Result<PolydiscCover> {
    let eta = base_eta(alpha, c)?;
    PolydiscCover::new(alpha.len() - 1, eta, gamma)
}

/// Number of charts `alpha_1 * kappa(base)` without building them.
pub fn level_set_count(alpha: &[u32], c: Complex64, gamma: f64) -> Result<usize> {
    let base = level_base(alpha, c, gamma)?;
    base.kappa()
        .checked_mul(alpha[0] as usize)
        .ok_or_else(|| invalid("chart count overflows usize"))
}

/// A `gamma`-doubling covering of `Y_c` over `Q_{n-1}^eta`, ordered base chart first, then branch.
pub fn cover_monomial_level_set(alpha: &[u32], c: Complex64, gamma: f64) -> Result<Covering> {
    let base = level_base(alpha, c, gamma)?;
    let mut charts = Vec::with_capacity(base.kappa() * alpha[0] as usize);
    for ch in base.charts() {
        for k in 0..alpha[0] {
            charts.push(MonomialLevelChart::new(ch.clone(), k, alpha.to_vec(), c)?);
        }
    }
    let inner = vec![base_eta(alpha, c)?; alpha.len() - 1];
    Covering::new(
        AmbientSpec::MonomialLevelSet {
            alpha: alpha.to_vec(),
            c,
        },
        gamma,
        Some(TargetRegion::LevelGraph { inner }),
        Charts::Level(charts),
    )
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn sample_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n = hermitian_norm(&v);
            if n <= 1.0 {
                return v.into_iter().map(|z| z * radius).collect();
            }
        }
    }

    #[test]
    fn hyperbola_center() {
        let base = DiagonalAffineChart::disk(re(0.5), 0.05, 2.0).unwrap();
        let ch = MonomialLevelChart::new(base, 0, vec![1, 1], re(0.25)).unwrap();
        let p = ch.evaluate(&[re(0.0)], 1.0).unwrap();
        assert!((p[0] - re(0.5)).norm() < 1e-15);
        assert_eq!(p[1], re(0.5));
    }

    #[test]
    fn square_root_branches() {
        let base = DiagonalAffineChart::disk(re(0.5), 0.05, 2.0).unwrap();
        let v: Vec<Complex64> = (0..2)
            .map(|k| {
                MonomialLevelChart::new(base.clone(), k, vec![2, 1], re(0.25))
                    .unwrap()
                    .evaluate(&[re(0.0)], 1.0)
                    .unwrap()[0]
            })
            .collect();
        let s = 0.5f64.sqrt();
        assert!((v[0] - re(s)).norm() < 1e-14);
        assert!((v[1] - re(-s)).norm() < 1e-14);
        for x1 in v {
            assert!(level_residual(&[x1, re(0.5)], &[2, 1], re(0.25)) < 1e-14);
        }
    }

    #[test]
    fn uncertified_base_is_rejected() {
        let base = DiagonalAffineChart::disk(re(0.5), 0.3, 2.0).unwrap();
        let ch = MonomialLevelChart::new(base, 0, vec![1, 1], re(0.25)).unwrap();
        assert!(matches!(
            ch.evaluate(&[re(0.0)], 1.0),
            Err(CoverError::BranchUndefined(_))
        ));
    }

    #[test]
    fn level_errors() {
        assert!(matches!(
            cover_monomial_level_set(&[1, 1], re(0.0), 2.0),
            Err(CoverError::NotARegularValue)
        ));
        assert!(matches!(
            cover_monomial_level_set(&[1, 1], re(1.0), 2.0),
            Err(CoverError::LevelOutsideRange(_))
        ));
        assert!(cover_monomial_level_set(&[1], re(0.5), 2.0).is_err());
    }

    #[test]
    fn count_is_alpha1_times_base() {
        let base = level_base(&[2, 1], re(0.04), 2.0).unwrap();
        let cov = cover_monomial_level_set(&[2, 1], re(0.04), 2.0).unwrap();
        assert_eq!(cov.kappa(), 2 * base.kappa());
        assert_eq!(
            level_set_count(&[2, 1], re(0.04), 2.0).unwrap(),
            cov.kappa()
        );
        let cov = cover_monomial_level_set(&[1, 1], re(0.25), 2.0).unwrap();
        assert_eq!(
            cov.kappa(),
            level_base(&[1, 1], re(0.25), 2.0).unwrap().kappa()
        );
    }

    #[test]
    fn residuals_at_two_scales() {
        let c = Complex64::new(0.03, 0.02);
        let cov = cover_monomial_level_set(&[3, 2], c, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ch in cov.level_charts().unwrap().iter().step_by(5) {
            for _ in 0..50 {
                let x = sample_ball(&mut rng, 1, 1.0);
                assert!(level_residual(&ch.evaluate(&x, 1.0).unwrap(), &[3, 2], c) <= 1e-10);
                let x = sample_ball(&mut rng, 1, 2.0);
                assert!(level_residual(&ch.evaluate(&x, 2.0).unwrap(), &[3, 2], c) <= 1e-8);
            }
        }
    }

    #[test]
    fn branches_are_distinct_at_centres() {
        let c = re(0.04);
        let alpha = [3, 1];
        let cov = cover_monomial_level_set(&alpha, c, 2.0).unwrap();
        let charts = cov.level_charts().unwrap();
        let spacing = c.norm().powf(1.0 / 3.0)
            * (re(1.0) - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm();
        for group in charts.chunks(3).step_by(3) {
            let v: Vec<Complex64> = group
                .iter()
                .map(|ch| ch.evaluate(&[re(0.0)], 1.0).unwrap()[0])
                .collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!((v[i] - v[j]).norm() >= spacing * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn derivative_stays_away_from_zero() {
        let c = re(0.04);
        let alpha = [2u32, 1];
        let eta = base_eta(&alpha, c).unwrap();
        let cov = cover_monomial_level_set(&alpha, c, 2.0).unwrap();
        let floor = 2.0 * eta.powi(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ch in cov.level_charts().unwrap() {
            let p = ch.evaluate(&sample_ball(&mut rng, 1, 1.0), 1.0).unwrap();
            let deriv = 2.0 * p[0] * p[1];
            assert!(deriv.norm() >= floor);
        }
    }

    #[test]
    fn direct_roots_solve_the_equation() {
        let xbar = [Complex64::new(0.3, -0.4), Complex64::new(-0.7, 0.1)];
        let alpha = [4, 2, 3];
        let c = Complex64::new(-0.01, 0.02);
        let roots = direct_branch_values(&alpha, c, &xbar);
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!(level_residual(&[r, xbar[0], xbar[1]], &alpha, c) < 1e-12);
        }
    }
}

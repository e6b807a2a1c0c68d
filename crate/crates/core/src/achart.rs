//! Real a-charts for graphs of bounded monomial maps `b(x) = a x^mu` over `(eps, 1)^m`.
//!
//! The cube is covered by boxes `I_y = (y/2, 3y/2)` with `y_k = (2/3) 2^{-k}` per
//! axis. Each box is cut into unit pieces `z0 + [-1, 1]` of the rescaled
//! coordinate `z` in `x = y (1 + z / (2 C3))`; one chart per piece. The chart
//! extension to `|z_i| <= 3` is in closed form, so it is stored as
//! `(y, z0, C3)`.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, CoverError, Result};

/// Radius of the polydisc an a-chart must extend to.
pub const EXTENSION_RADIUS: f64 = 3.0;

/// Interior points checked by [`verify_achart`] in addition to the boundary torus.
pub const INTERIOR_SAMPLES: usize = 1000;

/// Slack on the a-chart bound.
pub const ACHART_SLACK: f64 = 1e-9;

/// `x -> a x^mu` with real exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialData {
    pub coeff: f64,
    pub mu: Vec<f64>,
}

impl MonomialData {
    pub fn new(coeff: f64, mu: Vec<f64>) -> Result<Self> {
        if !(coeff > 0.0) || !coeff.is_finite() {
            return Err(invalid(format!("coefficient must be > 0, got {coeff}")));
        }
        if mu.is_empty() || mu.iter().any(|m| !m.is_finite()) {
            return Err(invalid("exponents must be a nonempty list of finite reals"));
        }
        Ok(Self { coeff, mu })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// `M = sum |mu_i|`.
    pub fn total_degree(&self) -> f64 {
        self.mu.iter().map(|m| m.abs()).sum()
    }

    /// `A = 2^M`.
    pub fn value_bound(&self) -> f64 {
        2f64.powf(self.total_degree())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.coeff
            * x.iter()
                .zip(&self.mu)
                .map(|(x, m)| x.powf(*m))
                .product::<f64>()
    }
}

/// A map on `I^m` with a holomorphic extension to `Delta_3^m` that can be evaluated.
pub trait AChartMap {
    fn input_dim(&self) -> usize;
    /// The extension at `z`; `NotHolomorphic` where it is undefined.
    fn eval_ext(&self, z: &[Complex64]) -> Result<Vec<Complex64>>;
    /// A rigorous bound on the a-chart deviation, when one is known.
    fn certificate(&self) -> Option<f64> {
        None
    }
}

/// An [`AChartMap`] given by a closure.
pub struct FnChart<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[Complex64]) -> Vec<Complex64>> FnChart<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[Complex64]) -> Vec<Complex64>> AChartMap for FnChart<F> {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn eval_ext(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok((self.f)(z))
    }
}

/// One chart `w -> (y_i (1 + (z0_i + w_i)/(2 C3)))_i` followed by the monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RealAChart {
    pub y: Vec<f64>,
    pub z0: Vec<f64>,
    pub c3: f64,
    pub data: MonomialData,
}

impl RealAChart {
    pub fn new(y: Vec<f64>, z0: Vec<f64>, c3: f64, data: MonomialData) -> Result<Self> {
        let m = data.dim();
        if y.len() != m || z0.len() != m {
            return Err(CoverError::DimensionMismatch {
                expected: m,
                got: y.len().min(z0.len()),
            });
        }
        if !(c3 > EXTENSION_RADIUS) {
            return Err(invalid(format!("C3 must exceed 3, got {c3}")));
        }
        if y.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(invalid("box centres must lie in (0, 1)"));
        }
        if z0.iter().any(|v| !(v.abs() <= c3)) {
            return Err(invalid("offsets must satisfy |z0_i| <= C3"));
        }
        Ok(Self { y, z0, c3, data })
    }

    /// `psi(0)` in the first `m` coordinates.
    pub fn centre(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.z0)
            .map(|(y, z)| y * (1.0 + z / (2.0 * self.c3)))
            .collect()
    }

    /// `psi(w)` for real `w`.
    pub fn eval_real(&self, w: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self
            .y
            .iter()
            .zip(&self.z0)
            .zip(w)
            .map(|((y, z), w)| y * (1.0 + (z + w) / (2.0 * self.c3)))
            .collect();
        x.push(self.data.value(&x));
        x
    }

    /// `V(C3)` specialised to this chart: `A (exp(M s / (1 - s)) - 1)` with
    /// `s = max_i 3 / (2 C3 - |z0_i|)`.
    pub fn chart_certificate(&self) -> f64 {
        let s = self
            .z0
            .iter()
            .map(|z| EXTENSION_RADIUS / (2.0 * self.c3 - z.abs()))
            .fold(0.0, f64::max);
        let a = self.data.value(&self.centre());
        let last = a * ((self.data.total_degree() * s / (1.0 - s)).exp() - 1.0);
        let affine = self
            .y
            .iter()
            .map(|y| y * EXTENSION_RADIUS / (2.0 * self.c3))
            .fold(0.0, f64::max);
        last.max(affine)
    }
}

impl AChartMap for RealAChart {
    fn input_dim(&self) -> usize {
        self.y.len()
    }

    fn eval_ext(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.y.len() {
            return Err(CoverError::DimensionMismatch {
                expected: self.y.len(),
                got: z.len(),
            });
        }
        let centre = self.centre();
        let mut out = Vec::with_capacity(z.len() + 1);
        let mut log_sum = Complex64::new(0.0, 0.0);
        for i in 0..z.len() {
            let t = z[i] / (2.0 * self.c3 + self.z0[i]);
            if !(t.norm() < 1.0) {
                return Err(CoverError::NotHolomorphic(format!(
                    "|t_{i}| = {} >= 1",
                    t.norm()
                )));
            }
            let one_t = Complex64::new(1.0, 0.0) + t;
            out.push(one_t * centre[i]);
            log_sum += (one_t.ln() + centre[i].ln()) * self.data.mu[i];
        }
        out.push(log_sum.exp() * self.data.coeff);
        Ok(out)
    }

    fn certificate(&self) -> Option<f64> {
        Some(self.chart_certificate())
    }
}

/// Result of [`verify_achart`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AChartReport {
    pub max_deviation: f64,
    pub certificate: Option<f64>,
    pub pass: bool,
}

/// Max-coordinate deviation of the extension from `psi(0)` over the
/// distinguished torus `|z_i| = 3` (`grid^m` points) and
/// [`INTERIOR_SAMPLES`] seeded interior points of `Delta_3^m`.
pub fn verify_achart(ch: &dyn AChartMap, grid: usize) -> Result<AChartReport> {
    if grid == 0 {
        return Err(invalid("grid must be >= 1"));
    }
    let m = ch.input_dim();
    let origin = ch.eval_ext(&vec![Complex64::new(0.0, 0.0); m])?;
    let deviation = |z: &[Complex64]| -> Result<f64> {
        let v = ch.eval_ext(z)?;
        Ok(v.iter()
            .zip(&origin)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    };
    let mut max_dev: f64 = 0.0;
    let total = grid
        .checked_pow(m as u32)
        .ok_or_else(|| invalid("grid^m overflows"))?;
    let mut z = vec![Complex64::new(0.0, 0.0); m];
    for flat in 0..total {
        let mut k = flat;
        for zi in z.iter_mut() {
            *zi =
                Complex64::from_polar(EXTENSION_RADIUS, 2.0 * PI * (k % grid) as f64 / grid as f64);
            k /= grid;
        }
        max_dev = max_dev.max(deviation(&z)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..INTERIOR_SAMPLES {
        for zi in z.iter_mut() {
            *zi = Complex64::from_polar(
                EXTENSION_RADIUS * rng.gen::<f64>().sqrt(),
                rng.gen_range(-PI..PI),
            );
        }
        max_dev = max_dev.max(deviation(&z)?);
    }
    Ok(AChartReport {
        max_deviation: max_dev,
        certificate: ch.certificate(),
        pass: max_dev <= 1.0 + ACHART_SLACK,
    })
}

/// Largest `|psi~_{m+1}(z)| / (a y^mu)` over the boundary torus.
pub fn extended_value_ratio(ch: &RealAChart, grid: usize) -> Result<f64> {
    let m = ch.y.len();
    let reference = ch.data.value(&ch.y);
    let total = grid.pow(m as u32);
    let mut best: f64 = 0.0;
    let mut z = vec![Complex64::new(0.0, 0.0); m];
    for flat in 0..total {
        let mut k = flat;
        for zi in z.iter_mut() {
            *zi =
                Complex64::from_polar(EXTENSION_RADIUS, 2.0 * PI * (k % grid) as f64 / grid as f64);
            k /= grid;
        }
        best = best.max(ch.eval_ext(&z)?[m].norm() / reference);
    }
    Ok(best)
}

/// Per-axis box centres `y_k = (2/3) 2^{-k}`, `k = 0..=K`, with `K` minimal such that
/// the intervals `(y_k/2, 3 y_k/2)` cover `(eps, 1)`.
pub fn axis_scales(eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("eps must be > 0, got {eps}")));
    }
    let mut centres = vec![2.0 / 3.0];
    while centres.last().copied().unwrap() / 2.0 > eps {
        let next = centres.last().copied().unwrap() / 2.0;
        centres.push(next);
    }
    Ok(centres)
}

/// The `m`-fold product of [`axis_scales`], last axis fastest.
pub fn cover_unit_cube_scales(eps: f64, m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(invalid("m must be >= 1"));
    }
    let axis = axis_scales(eps)?;
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| axis.iter().map(move |&y| [p.as_slice(), &[y]].concat()))
            .collect();
    }
    Ok(out)
}

/// `V(C3) = A (exp(M s / (1 - s)) - 1)` with `s = 3 / C3`.
pub fn certified_bound(total_degree: f64, value_bound: f64, c3: f64) -> f64 {
    let s = EXTENSION_RADIUS / c3;
    if s >= 1.0 {
        return f64::INFINITY;
    }
    value_bound * ((total_degree * s / (1.0 - s)).exp() - 1.0)
}

/// Smallest integer `C3 >= 4` with `V(C3) <= 1` and `3 / (2 C3) <= 1`.
pub fn choose_c3(mu: &[f64], value_bound: f64) -> Result<f64> {
    if !(value_bound >= 1.0) || !value_bound.is_finite() {
        return Err(invalid(format!(
            "value bound must be >= 1, got {value_bound}"
        )));
    }
    let total: f64 = mu.iter().map(|m| m.abs()).sum();
    if !total.is_finite() {
        return Err(invalid("exponents must be finite"));
    }
    let mut c3 = 4.0;
    while certified_bound(total, value_bound, c3) > 1.0 {
        c3 += 1.0;
    }
    Ok(c3)
}

/// Odd offsets `-2 ceil(C3/2) + 1, ..., 2 ceil(C3/2) - 1`; unit pieces around them tile `(-C3, C3)`.
pub fn offsets(c3: f64) -> Vec<f64> {
    let h = (c3 / 2.0).ceil() as i64;
    (-h..h).map(|k| (2 * k + 1) as f64).collect()
}

/// Constant `C(mu)` with `N_eps <= C(mu) log(1/eps)^m` for `eps < 1/2`.
pub fn count_constant(m: usize, c3: f64) -> f64 {
    (offsets(c3).len() as f64 * 3.0 / LN_2).powi(m as i32)
}

/// `eps = delta / c`.
pub fn shrink_for_tube(delta: f64, lipschitz: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(lipschitz >= 1.0) || !lipschitz.is_finite() {
        return Err(invalid(format!(
            "Lipschitz constant must be >= 1, got {lipschitz}"
        )));
    }
    Ok(delta / lipschitz)
}

/// The a-charts covering the graph of `b` over `(eps, 1)^m ∩ {b < 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AChartSet {
    pub data: MonomialData,
    pub eps: f64,
    pub c3: f64,
    pub charts: Vec<RealAChart>,
}

/// Whether the real image of the piece `(y, z0)` meets `(eps, 1)^m ∩ {b < 1}`.
fn piece_is_useful(data: &MonomialData, y: &[f64], z0: &[f64], c3: f64, eps: f64) -> bool {
    let mut corner = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        let lo = (y[i] * (1.0 + (z0[i] - 1.0) / (2.0 * c3))).max(eps);
        let hi = (y[i] * (1.0 + (z0[i] + 1.0) / (2.0 * c3))).min(1.0);
        if lo >= hi {
            return false;
        }
        corner.push(if data.mu[i] >= 0.0 { lo } else { hi });
    }
    data.value(&corner) < 1.0
}

/// One chart per useful `(box centre, offset)` pair.
pub fn cover_monomial_graph(data: &MonomialData, eps: f64) -> Result<AChartSet> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let m = data.dim();
    let c3 = choose_c3(&data.mu, data.value_bound())?;
    let offs = offsets(c3);
    let boxes = cover_unit_cube_scales(eps, m)?;
    let mut offset_grid: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..m {
        offset_grid = offset_grid
            .into_iter()
            .flat_map(|p| offs.iter().map(move |&z| [p.as_slice(), &[z]].concat()))
            .collect();
    }
    let charts = boxes
        .par_iter()
        .flat_map_iter(|y| {
            offset_grid
                .iter()
                .filter(|z0| piece_is_useful(data, y, z0, c3, eps))
                .map(|z0| RealAChart {
                    y: y.clone(),
                    z0: z0.clone(),
                    c3,
                    data: data.clone(),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(AChartSet {
        data: data.clone(),
        eps,
        c3,
        charts,
    })
}

/// Point location for the real images of an [`AChartSet`].
pub struct AChartLocator<'a> {
    set: &'a AChartSet,
    scales: Vec<f64>,
    max_offset: i64,
    index: HashMap<(Vec<usize>, Vec<i64>), usize>,
}

impl<'a> AChartLocator<'a> {
    pub fn new(set: &'a AChartSet) -> Result<Self> {
        let scales = axis_scales(set.eps)?;
        let mut index = HashMap::with_capacity(set.charts.len());
        for (i, ch) in set.charts.iter().enumerate() {
            let ks =
                ch.y.iter()
                    .map(|&y| ((2.0 / (3.0 * y)).log2().round()) as usize)
                    .collect();
            let zs = ch.z0.iter().map(|&z| z.round() as i64).collect();
            index.insert((ks, zs), i);
        }
        let max_offset = offsets(set.c3).last().map(|&z| z as i64).unwrap_or(0);
        Ok(Self {
            set,
            scales,
            max_offset,
            index,
        })
    }

    /// Every chart whose real image contains the graph point over `x`, with its preimage `w`.
    pub fn locate(&self, x: &[f64]) -> Vec<(usize, Vec<f64>)> {
        let c3 = self.set.c3;
        let mut per_axis: Vec<Vec<(usize, i64, f64)>> = Vec::with_capacity(x.len());
        for &xi in x {
            let mut cands = Vec::new();
            for (k, &y) in self.scales.iter().enumerate() {
                let u = (xi / y - 1.0) * 2.0 * c3;
                let lo = (u - 1.0).ceil() as i64;
                let hi = (u + 1.0).floor() as i64;
                for z in lo..=hi {
                    if z.rem_euclid(2) == 1 && z.abs() <= self.max_offset {
                        cands.push((k, z, u - z as f64));
                    }
                }
            }
            if cands.is_empty() {
                return Vec::new();
            }
            per_axis.push(cands);
        }
        let mut out = Vec::new();
        let mut cursor = vec![0usize; x.len()];
        'outer: loop {
            let pick: Vec<&(usize, i64, f64)> =
                cursor.iter().zip(&per_axis).map(|(&c, v)| &v[c]).collect();
            let key = (
                pick.iter().map(|p| p.0).collect(),
                pick.iter().map(|p| p.1).collect(),
            );
            if let Some(&idx) = self.index.get(&key) {
                out.push((idx, pick.iter().map(|p| p.2).collect()));
            }
            for axis in 0..x.len() {
                cursor[axis] += 1;
                if cursor[axis] < per_axis[axis].len() {
                    continue 'outer;
                }
                cursor[axis] = 0;
            }
            break;
        }
        out.sort_by_key(|p| p.0);
        out
    }
}

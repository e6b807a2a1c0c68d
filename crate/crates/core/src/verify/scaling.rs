//! Complexity reports and scaling sweeps.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::achart::{count_constant, cover_monomial_graph, MonomialData};
use crate::annulus::AnnulusLayout;
use crate::chart::Covering;
use crate::error::{invalid, CoverError, Result};
use crate::levelset::{base_eta, level_set_count};
use crate::polydisc::polydisc_plan;

/// Named reference bounds on the chart count.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BoundFormula {
    /// `3 zeta log(3 zeta / delta)` Whitney disks.
    Annulus { zeta: f64, delta: f64 },
    /// `(9 gamma^n)^n (log(9 gamma^n / eta))^n`.
    Polydisc { n: usize, gamma: f64, eta: f64 },
    /// `kappa_inner * 3 zeta log(3 zeta / delta)`.
    Suspension {
        inner_kappa: f64,
        zeta: f64,
        delta: f64,
    },
    /// `alpha_1` times the polydisc bound in dimension `n - 1`.
    Levelset {
        alpha1: u32,
        n: usize,
        gamma: f64,
        eta: f64,
    },
    /// `C (log(1/eps))^m`.
    Achart { m: usize, constant: f64, eps: f64 },
}

impl BoundFormula {
    /// Builds a formula from its name and positional parameters, in field order.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let want = match name {
            "annulus" => 2,
            "polydisc" | "suspension" | "achart" => 3,
            "levelset" => 4,
            _ => return Err(CoverError::UnknownBound(name.to_string())),
        };
        if params.len() != want {
            return Err(invalid(format!(
                "bound `{name}` takes {want} parameters, got {}",
                params.len()
            )));
        }
        let p = params;
        Ok(match name {
            "annulus" => Self::Annulus {
                zeta: p[0],
                delta: p[1],
            },
            "polydisc" => Self::Polydisc {
                n: p[0] as usize,
                gamma: p[1],
                eta: p[2],
            },
            "suspension" => Self::Suspension {
                inner_kappa: p[0],
                zeta: p[1],
                delta: p[2],
            },
            "achart" => Self::Achart {
                m: p[0] as usize,
                constant: p[1],
                eps: p[2],
            },
            _ => Self::Levelset {
                alpha1: p[0] as u32,
                n: p[1] as usize,
                gamma: p[2],
                eta: p[3],
            },
        })
    }

    pub fn evaluate(&self) -> f64 {
        let whitney = |zeta: f64, delta: f64| 3.0 * zeta * (3.0 * zeta / delta).ln();
        let polydisc = |n: usize, gamma: f64, eta: f64| {
            let g = 9.0 * gamma.powi(n as i32);
            (g * (g / eta).ln()).powi(n as i32)
        };
        match *self {
            Self::Annulus { zeta, delta } => whitney(zeta, delta),
            Self::Polydisc { n, gamma, eta } => polydisc(n, gamma, eta),
            Self::Suspension {
                inner_kappa,
                zeta,
                delta,
            } => inner_kappa * whitney(zeta, delta),
            Self::Levelset {
                alpha1,
                n,
                gamma,
                eta,
            } => alpha1 as f64 * polydisc(n - 1, gamma, eta),
            Self::Achart { m, constant, eps } => constant * (1.0 / eps).ln().powi(m as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub kappa: usize,
    pub bound: f64,
    pub ratio: f64,
}

pub fn complexity_of(kappa: usize, formula: &BoundFormula) -> ComplexityReport {
    let bound = formula.evaluate();
    let ratio = if kappa == 0 {
        0.0
    } else {
        kappa as f64 / bound
    };
    ComplexityReport {
        kappa,
        bound,
        ratio,
    }
}

pub fn complexity_report(cov: &Covering, formula: &BoundFormula) -> ComplexityReport {
    complexity_of(cov.kappa(), formula)
}

/// A construction swept over one parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    /// Parameter `delta`.
    Annulus { zeta: f64 },
    /// Parameter `eta`.
    Polydisc { n: usize, gamma: f64 },
    /// Parameter: the level `c > 0`.
    Levelset { alpha: Vec<u32>, gamma: f64 },
    /// Parameter `eps`.
    Graph { data: MonomialData },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Annulus { .. } => "annulus",
            Self::Polydisc { .. } => "polydisc",
            Self::Levelset { .. } => "levelset",
            Self::Graph { .. } => "graph",
        }
    }

    /// `(kappa, reference bound)` at one parameter value, counting only where possible.
    pub fn run(&self, param: f64) -> Result<(usize, f64)> {
        match self {
            Self::Annulus { zeta } => {
                let k = AnnulusLayout::new(param, *zeta)?.count();
                Ok((
                    k,
                    BoundFormula::Annulus {
                        zeta: *zeta,
                        delta: param,
                    }
                    .evaluate(),
                ))
            }
            Self::Polydisc { n, gamma } => {
                let k = polydisc_plan(*n, param, *gamma)?.kappa();
                Ok((
                    k,
                    BoundFormula::Polydisc {
                        n: *n,
                        gamma: *gamma,
                        eta: param,
                    }
                    .evaluate(),
                ))
            }
            Self::Levelset { alpha, gamma } => {
                let c = Complex64::new(param, 0.0);
                let k = level_set_count(alpha, c, *gamma)?;
                let eta = base_eta(alpha, c)?;
                let f = BoundFormula::Levelset {
                    alpha1: alpha[0],
                    n: alpha.len(),
                    gamma: *gamma,
                    eta,
                };
                Ok((k, f.evaluate()))
            }
            Self::Graph { data } => {
                let set = cover_monomial_graph(data, param)?;
                let f = BoundFormula::Achart {
                    m: data.dim(),
                    constant: count_constant(data.dim(), set.c3),
                    eps: param,
                };
                Ok((set.charts.len(), f.evaluate()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub param: f64,
    pub kappa: usize,
    pub paper_bound: f64,
    pub ratio: f64,
    pub log_inv_param: f64,
}

/// Runs `exp` at every grid value; the grid must be strictly descending with at least 3 entries.
pub fn scaling_experiment(exp: &Experiment, grid: &[f64]) -> Result<Vec<ScalingRow>> {
    if grid.len() < 3 {
        return Err(CoverError::InsufficientPoints(grid.len()));
    }
    if grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(invalid("grid must be strictly descending"));
    }
    grid.iter()
        .map(|&param| {
            let (kappa, bound) = exp.run(param)?;
            let ratio = if kappa == 0 {
                0.0
            } else {
                kappa as f64 / bound
            };
            Ok(ScalingRow {
                param,
                kappa,
                paper_bound: bound,
                ratio,
                log_inv_param: (1.0 / param).ln(),
            })
        })
        .collect()
}

/// Writes rows as CSV with a header.
pub fn write_csv<W: Write>(rows: &[ScalingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| CoverError::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares `y = slope x + intercept`. A constant `y` fits perfectly (`r2 = 1`).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<Fit> {
    if xs.len() != ys.len() {
        return Err(invalid("x and y lengths differ"));
    }
    let n = xs.len();
    if n < 3 {
        return Err(CoverError::InsufficientPoints(n));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("all x values coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(Fit {
        slope,
        intercept,
        r2,
    })
}

/// Regresses `log kappa` on `log log(1/param)` over rows with `kappa > 0` and `param < 1`.
pub fn fit_log_exponent(rows: &[ScalingRow]) -> Result<Fit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.kappa > 0 && r.param > 0.0 && r.param < 1.0)
        .map(|r| ((1.0 / r.param).ln().ln(), (r.kappa as f64).ln()))
        .unzip();
    linear_fit(&xs, &ys)
}

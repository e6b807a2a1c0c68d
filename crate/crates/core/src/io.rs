//! JSON files for coverings and a-chart sets.
//!
//! Output is compact and deterministic: fixed field order, shortest
//! round-trip float formatting, one trailing newline.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::achart::{AChartSet, MonomialData, RealAChart};
use crate::chart::{AmbientSpec, Charts, Covering, DiagonalAffineChart, TargetRegion};
use crate::error::{CoverError, Result};
use crate::levelset::MonomialLevelChart;
use crate::polydisc::PolydiscCover;

/// Version stamped into every file.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AmbientWire {
    PuncturedPlane,
    PolydiscComplement { n: usize, active_axes: Vec<usize> },
    MonomialLevelSet { alpha: Vec<u32>, c: Complex64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TargetWire {
    Product { inner: Vec<f64> },
    LevelGraph { inner: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ChartWire {
    DiagAffine {
        b: Vec<Complex64>,
        d: Vec<Complex64>,
    },
    LevelBranch {
        b: Vec<Complex64>,
        d: Vec<Complex64>,
        branch: u32,
        alpha: Vec<u32>,
        c: Complex64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoveringFile {
    schema_version: u32,
    ambient: AmbientWire,
    gamma: f64,
    target: Option<TargetWire>,
    charts: Vec<ChartWire>,
}

fn format_err(e: impl std::fmt::Display) -> CoverError {
    CoverError::Format(e.to_string())
}

fn ambient_wire(a: &AmbientSpec) -> AmbientWire {
    match a {
        AmbientSpec::PuncturedPlane => AmbientWire::PuncturedPlane,
        AmbientSpec::PolydiscComplement { n, active_axes } => AmbientWire::PolydiscComplement {
            n: *n,
            active_axes: active_axes.clone(),
        },
        AmbientSpec::MonomialLevelSet { alpha, c } => AmbientWire::MonomialLevelSet {
            alpha: alpha.clone(),
            c: *c,
        },
    }
}

fn target_wire(t: &TargetRegion) -> TargetWire {
    match t {
        TargetRegion::Product { inner } => TargetWire::Product {
            inner: inner.clone(),
        },
        TargetRegion::LevelGraph { inner } => TargetWire::LevelGraph {
            inner: inner.clone(),
        },
    }
}

fn affine_wire(ch: &DiagonalAffineChart) -> ChartWire {
    ChartWire::DiagAffine {
        b: ch.translation().to_vec(),
        d: ch.scales().to_vec(),
    }
}

fn level_wire(ch: &MonomialLevelChart) -> ChartWire {
    ChartWire::LevelBranch {
        b: ch.base().translation().to_vec(),
        d: ch.base().scales().to_vec(),
        branch: ch.branch(),
        alpha: ch.alpha().to_vec(),
        c: ch.level(),
    }
}

fn write_parts<W: Write>(
    mut w: W,
    ambient: &AmbientSpec,
    gamma: f64,
    target: Option<&TargetRegion>,
    charts: impl Iterator<Item = ChartWire>,
) -> Result<()> {
    write!(w, "{{\"schema_version\":{SCHEMA_VERSION},\"ambient\":")?;
    serde_json::to_writer(&mut w, &ambient_wire(ambient)).map_err(format_err)?;
    w.write_all(b",\"gamma\":")?;
    serde_json::to_writer(&mut w, &gamma).map_err(format_err)?;
    w.write_all(b",\"target\":")?;
    serde_json::to_writer(&mut w, &target.map(target_wire)).map_err(format_err)?;
    w.write_all(b",\"charts\":[")?;
    for (i, ch) in charts.enumerate() {
        if i > 0 {
            w.write_all(b",")?;
        }
        serde_json::to_writer(&mut w, &ch).map_err(format_err)?;
    }
    w.write_all(b"]}\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_covering<W: Write>(cov: &Covering, w: W) -> Result<()> {
    match cov.charts() {
        Charts::Affine(v) => write_parts(
            w,
            cov.ambient(),
            cov.gamma(),
            cov.target(),
            v.iter().map(affine_wire),
        ),
        Charts::Level(v) => write_parts(
            w,
            cov.ambient(),
            cov.gamma(),
            cov.target(),
            v.iter().map(level_wire),
        ),
    }
}

/// Streams a lazy polydisc covering; the bytes equal those of the materialised covering.
pub fn write_polydisc<W: Write>(cover: &PolydiscCover, w: W) -> Result<()> {
    let target = cover.target();
    write_parts(
        w,
        &cover.ambient(),
        cover.gamma(),
        Some(&target),
        cover.charts().map(|c| affine_wire(&c)),
    )
}

pub fn covering_to_string(cov: &Covering) -> Result<String> {
    let mut buf = Vec::new();
    write_covering(cov, &mut buf)?;
    String::from_utf8(buf).map_err(format_err)
}

pub fn read_covering<R: Read>(r: R) -> Result<Covering> {
    let file: CoveringFile = serde_json::from_reader(r).map_err(format_err)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CoverError::Format(format!(
            "unsupported schema version {}",
            file.schema_version
        )));
    }
    let ambient = match file.ambient {
        AmbientWire::PuncturedPlane => AmbientSpec::PuncturedPlane,
        AmbientWire::PolydiscComplement { n, active_axes } => {
            AmbientSpec::PolydiscComplement { n, active_axes }
        }
        AmbientWire::MonomialLevelSet { alpha, c } => AmbientSpec::MonomialLevelSet { alpha, c },
    };
    let target = file.target.map(|t| match t {
        TargetWire::Product { inner } => TargetRegion::Product { inner },
        TargetWire::LevelGraph { inner } => TargetRegion::LevelGraph { inner },
    });
    let level = matches!(ambient, AmbientSpec::MonomialLevelSet { .. });
    let charts = if level {
        let mut v = Vec::with_capacity(file.charts.len());
        for ch in file.charts {
            let ChartWire::LevelBranch {
                b,
                d,
                branch,
                alpha,
                c,
            } = ch
            else {
                return Err(CoverError::Format(
                    "affine chart in a level-set covering".into(),
                ));
            };
            v.push(MonomialLevelChart::new(
                DiagonalAffineChart::new(b, d, file.gamma)?,
                branch,
                alpha,
                c,
            )?);
        }
        Charts::Level(v)
    } else {
        let mut v = Vec::with_capacity(file.charts.len());
        for ch in file.charts {
            let ChartWire::DiagAffine { b, d } = ch else {
                return Err(CoverError::Format(
                    "level chart in an affine covering".into(),
                ));
            };
            v.push(DiagonalAffineChart::new(b, d, file.gamma)?);
        }
        Charts::Affine(v)
    };
    Covering::new(ambient, file.gamma, target, charts)
}

pub fn save_covering(cov: &Covering, path: &Path) -> Result<()> {
    write_covering(cov, BufWriter::new(File::create(path)?))
}

pub fn save_polydisc(cover: &PolydiscCover, path: &Path) -> Result<()> {
    write_polydisc(cover, BufWriter::new(File::create(path)?))
}

pub fn load_covering(path: &Path) -> Result<Covering> {
    read_covering(BufReader::new(File::open(path)?))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AChartWire {
    y: Vec<f64>,
    z0: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AChartSetFile {
    schema_version: u32,
    kind: String,
    mu: Vec<f64>,
    coeff: f64,
    eps: f64,
    c3: f64,
    charts: Vec<AChartWire>,
}

const ACHART_KIND: &str = "achart_set";

pub fn write_achart_set<W: Write>(set: &AChartSet, mut w: W) -> Result<()> {
    let file = AChartSetFile {
        schema_version: SCHEMA_VERSION,
        kind: ACHART_KIND.into(),
        mu: set.data.mu.clone(),
        coeff: set.data.coeff,
        eps: set.eps,
        c3: set.c3,
        charts: set
            .charts
            .iter()
            .map(|c| AChartWire {
                y: c.y.clone(),
                z0: c.z0.clone(),
            })
            .collect(),
    };
    serde_json::to_writer(&mut w, &file).map_err(format_err)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_achart_set<R: Read>(r: R) -> Result<AChartSet> {
    let file: AChartSetFile = serde_json::from_reader(r).map_err(format_err)?;
    if file.schema_version != SCHEMA_VERSION || file.kind != ACHART_KIND {
        return Err(CoverError::Format(
            "not an a-chart set of a supported schema version".into(),
        ));
    }
    let data = MonomialData::new(file.coeff, file.mu)?;
    let charts = file
        .charts
        .into_iter()
        .map(|c| RealAChart::new(c.y, c.z0, file.c3, data.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AChartSet {
        data,
        eps: file.eps,
        c3: file.c3,
        charts,
    })
}

pub fn save_achart_set(set: &AChartSet, path: &Path) -> Result<()> {
    write_achart_set(set, BufWriter::new(File::create(path)?))
}

pub fn load_achart_set(path: &Path) -> Result<AChartSet> {
    read_achart_set(BufReader::new(File::open(path)?))
}

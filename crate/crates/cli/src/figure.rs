//! Figure data as CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bures_core::bures::bures_distance_commuting;
use bures_core::ensemble::{reference_g_bb, EnsembleSpec};
use bures_core::geometry::length_distance_excess;
use rayon::prelude::*;

pub const MIN_GRID: usize = 2;
pub const MAX_GRID: usize = 4096;

/// Qubit count of the distance surface.
pub const SURFACE_N: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// `g_ββ` against `β` for `n = 2, …, 7`.
    Metric,
    /// `d_B(ζ₁₀₀(β₁), ζ₁₀₀(β₂))` over a square grid.
    DistanceSurface,
    /// Excess of integrated length over distance, `n = 2`.
    ExcessTwo,
    /// Excess of integrated length over distance, `n = 3`.
    ExcessThree,
}

impl Figure {
    pub fn from_number(which: u8) -> Result<Self> {
        Ok(match which {
            1 => Figure::Metric,
            2 => Figure::DistanceSurface,
            3 => Figure::ExcessTwo,
            4 => Figure::ExcessThree,
            _ => bail!("no figure {which}; choose 1, 2, 3 or 4"),
        })
    }

    pub fn default_grid(self) -> usize {
        match self {
            Figure::Metric => 400,
            _ => 100,
        }
    }
}

/// A header and rows of numbers, ready to be written as CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if !(MIN_GRID..=MAX_GRID).contains(&grid) {
        bail!("grid resolution {grid} outside [{MIN_GRID}, {MAX_GRID}]");
    }
    Ok(())
}

/// `grid` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect()
}

/// `grid` points `5(i+1)/grid`, covering `(0, 5]` without the singular
/// endpoint.
pub fn surface_axis(grid: usize) -> Vec<f64> {
    (1..=grid).map(|i| 5.0 * i as f64 / grid as f64).collect()
}

pub fn compute(figure: Figure, grid: usize) -> Result<Table> {
    check_grid(grid)?;
    match figure {
        Figure::Metric => {
            let mut header = vec!["beta".to_string()];
            header.extend((2..=7).map(|n| format!("g_n{n}")));
            let rows = linspace(0.05, 10.0, grid)
                .into_par_iter()
                .map(|beta| {
                    let mut row = vec![beta];
                    for n in 2..=7 {
                        row.push(reference_g_bb(n, beta)?);
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Table { header, rows })
        }
        Figure::DistanceSurface => surface(grid, "d_bures", |b1, b2| {
            let d = bures_distance_commuting(
                &EnsembleSpec::new(SURFACE_N, b1)?,
                &EnsembleSpec::new(SURFACE_N, b2)?,
            )?;
            Ok(d.value())
        }),
        Figure::ExcessTwo => surface(grid, "excess", |b1, b2| Ok(length_distance_excess(2, b1, b2)?)),
        Figure::ExcessThree => surface(grid, "excess", |b1, b2| Ok(length_distance_excess(3, b1, b2)?)),
    }
}

/// Row-major `(β₁, β₂, value)` table; rows are filled in parallel but
/// collected in grid order, so output does not depend on scheduling.
fn surface(grid: usize, name: &str, f: impl Fn(f64, f64) -> Result<f64> + Sync) -> Result<Table> {
    let axis = surface_axis(grid);
    let rows = axis
        .par_iter()
        .map(|&b1| {
            axis.iter()
                .map(|&b2| Ok(vec![b1, b2, f(b1, b2)?]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(Table {
        header: vec!["beta1".into(), "beta2".into(), name.into()],
        rows,
    })
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `table` to `path` through a temporary file in the same directory
/// that is renamed into place, so readers never see a partial file.
pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    let tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    write_to(table, tmp.as_file())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn cmd_figure(figure: Figure, out: &Path, grid: Option<usize>) -> Result<Table> {
    let table = compute(figure, grid.unwrap_or(figure.default_grid()))?;
    write_csv(&table, out)?;
    Ok(table)
}

/// Reads back a CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(
            record?
                .iter()
                .map(|f| f.parse::<f64>().with_context(|| format!("bad number {f:?}")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Table { header, rows })
}

/// Writes a table to any sink, for printing to stdout.
pub fn write_to(table: &Table, sink: impl Write) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(&table.header)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|&x| format_value(x)))?;
    }
    writer.flush()?;
    Ok(())
}

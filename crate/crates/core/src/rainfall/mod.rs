//! Daily precipitation stacks: monthly and annual aggregation, monthly
//! climatology, basin masks and zonal means.
//!
//! Every per-cell sum runs over layers in ascending date order, so results
//! are bit-reproducible and match a naive re-summation of the daily files.

mod rasterize;
mod zonal;

pub use rasterize::{point_in_polygon_set, rasterize_polygon};
pub use zonal::zonal_mean;

use std::fs;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::{read_ascii_grid_as, CrsKind, Grid, GridGeo, Units};

/// Daily rainfall grids sharing one geographic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyStack<T> {
    pub geo: GridGeo,
    pub dates: Vec<NaiveDate>,
    pub layers: Vec<Grid<T>>,
    /// Calendar days between the first and last date with no layer.
    pub gaps: Vec<NaiveDate>,
}

impl<T: Scalar> DailyStack<T> {
    /// Builds a stack from dated layers in any order.
    pub fn new(mut layers: Vec<(NaiveDate, Grid<T>)>) -> Result<Self> {
        layers.sort_by_key(|(d, _)| *d);
        let Some((first_date, first)) = layers.first() else {
            return Err(Error::EmptyInput("stack has no layers".into()));
        };
        let geo = first.geo;
        if geo.crs_kind != CrsKind::Geographic {
            return Err(Error::Crs("rainfall grids must be geographic".into()));
        }
        for (d, l) in &layers {
            if l.geo != geo {
                return Err(Error::GridMismatch {
                    first: first_date.to_string(),
                    second: d.to_string(),
                });
            }
        }
        if let Some(w) = layers.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::SeriesOrder {
                row: 0,
                date: w[0].0,
            });
        }
        let dates: Vec<NaiveDate> = layers.iter().map(|(d, _)| *d).collect();
        let gaps = gap_days(&dates);
        Ok(DailyStack {
            geo,
            dates,
            layers: layers.into_iter().map(|(_, l)| l).collect(),
            gaps,
        })
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    fn indices_where(&self, pred: impl Fn(&NaiveDate) -> bool) -> Vec<usize> {
        self.dates
            .iter()
            .enumerate()
            .filter(|(_, d)| pred(d))
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-cell sum over the given layers in their (date) order; nodata if
    /// any contributing layer is nodata at the cell.
    fn sum_layers(&self, idx: &[usize], units: Units) -> Grid<T> {
        let nodata = T::lit(crate::raster::DEFAULT_NODATA);
        let mut acc = vec![T::zero(); self.geo.len()];
        let mut valid = vec![true; self.geo.len()];
        for &i in idx {
            let layer = &self.layers[i];
            for (cell, &v) in layer.values.iter().enumerate() {
                if layer.is_valid(v) {
                    acc[cell] = acc[cell] + v;
                } else {
                    valid[cell] = false;
                }
            }
        }
        for (a, ok) in acc.iter_mut().zip(valid) {
            if !ok {
                *a = nodata;
            }
        }
        Grid {
            geo: self.geo,
            values: acc,
            nodata,
            units,
        }
    }

    pub fn years(&self) -> Vec<i32> {
        let mut y: Vec<i32> = self.dates.iter().map(|d| d.year()).collect();
        y.dedup();
        y
    }
}

fn gap_days(dates: &[NaiveDate]) -> Vec<NaiveDate> {
    dates
        .windows(2)
        .flat_map(|w| w[0].iter_days().skip(1).take_while(move |d| *d < w[1]))
        .collect()
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next = if month == 12 {
        NaiveDate::from_ymd_opt(year + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(year, month + 1, 1)
    }
    .expect("valid month");
    (next - first).num_days() as u32
}

/// Loads every `YYYY-MM-DD.asc` file in `dir` as a geographic mm/day layer.
/// Other files are ignored.
pub fn load_stack<T: Scalar>(dir: impl AsRef<Path>) -> Result<DailyStack<T>> {
    let dir = dir.as_ref();
    let mut files = dated_files(dir, "asc")?;
    if files.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no YYYY-MM-DD.asc files in {}",
            dir.display()
        )));
    }
    files.sort();
    let mut layers = Vec::with_capacity(files.len());
    let mut reference: Option<(GridGeo, String)> = None;
    for (date, path) in files {
        let grid: Grid<T> = read_ascii_grid_as(&path, CrsKind::Geographic, Units::MillimetersPerDay)?;
        match &reference {
            None => reference = Some((grid.geo, path.display().to_string())),
            Some((geo, name)) if *geo != grid.geo => {
                return Err(Error::GridMismatch {
                    first: name.clone(),
                    second: path.display().to_string(),
                })
            }
            Some(_) => {}
        }
        layers.push((date, grid));
    }
    let stack = DailyStack::new(layers)?;
    if !stack.gaps.is_empty() {
        log::warn!(
            "{}: {} missing day(s) between {} and {}",
            dir.display(),
            stack.gaps.len(),
            stack.dates[0],
            stack.dates[stack.len() - 1]
        );
    }
    Ok(stack)
}

/// `(date, path)` for every `YYYY-MM-DD.<ext>` file in `dir`.
pub fn dated_files(dir: &Path, ext: &str) -> Result<Vec<(NaiveDate, std::path::PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(ext) {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        match NaiveDate::parse_from_str(stem, "%Y-%m-%d") {
            Ok(d) => out.push((d, path)),
            Err(_) => log::debug!("skipping {}: not date-named", path.display()),
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyTotal<T> {
    pub raster: Grid<T>,
    pub days_present: u32,
    pub days_in_month: u32,
}

impl<T> MonthlyTotal<T> {
    pub fn coverage(&self) -> f64 {
        self.days_present as f64 / self.days_in_month as f64
    }
}

/// Per-cell rainfall total (mm) for one calendar month over the days present.
pub fn monthly_total<T: Scalar>(
    stack: &DailyStack<T>,
    year: i32,
    month: u32,
) -> Result<MonthlyTotal<T>> {
    if !(1..=12).contains(&month) {
        return Err(Error::Param(format!("month must be 1..=12, got {month}")));
    }
    let idx = stack.indices_where(|d| d.year() == year && d.month() == month);
    if idx.is_empty() {
        return Err(Error::EmptyPeriod(format!("{year}-{month:02}")));
    }
    Ok(MonthlyTotal {
        raster: stack.sum_layers(&idx, Units::Millimeters),
        days_present: idx.len() as u32,
        days_in_month: days_in_month(year, month),
    })
}

/// Per-cell mean over `start..=end` of the annual totals.
pub fn annual_mean<T: Scalar>(stack: &DailyStack<T>, start_year: i32, end_year: i32) -> Result<Grid<T>> {
    check_period(start_year, end_year)?;
    let totals: Vec<Grid<T>> = (start_year..=end_year)
        .filter_map(|y| {
            let idx = stack.indices_where(|d| d.year() == y);
            if idx.is_empty() {
                log::warn!("year {y} has no daily layers; excluded from the annual mean");
                None
            } else {
                Some(stack.sum_layers(&idx, Units::Millimeters))
            }
        })
        .collect();
    if totals.is_empty() {
        return Err(Error::EmptyPeriod(format!("{start_year}-{end_year}")));
    }
    Ok(mean_of(&totals, stack.geo))
}

/// Per-cell mean over grids, skipping grids that are nodata at the cell.
fn mean_of<T: Scalar>(grids: &[Grid<T>], geo: GridGeo) -> Grid<T> {
    let nodata = T::lit(crate::raster::DEFAULT_NODATA);
    let values = (0..geo.len())
        .map(|cell| {
            let mut sum = T::zero();
            let mut n = 0usize;
            for g in grids {
                let v = g.values[cell];
                if g.is_valid(v) {
                    sum = sum + v;
                    n += 1;
                }
            }
            if n == 0 {
                nodata
            } else {
                sum / T::from_count(n)
            }
        })
        .collect();
    Grid {
        geo,
        values,
        nodata,
        units: Units::Millimeters,
    }
}

fn check_period(start_year: i32, end_year: i32) -> Result<()> {
    if start_year > end_year {
        return Err(Error::Param(format!(
            "start year {start_year} is after end year {end_year}"
        )));
    }
    Ok(())
}

/// Per-cell monthly climatology.
#[derive(Debug, Clone, PartialEq)]
pub struct Climatology<T> {
    /// `months[m - 1]` is the mean month-`m` total over the years with data.
    pub months: Vec<Grid<T>>,
    /// Years contributing to each month.
    pub years: Vec<Vec<i32>>,
    /// `(year, month)` pairs inside the period with no daily layers.
    pub excluded: Vec<(i32, u32)>,
    pub period: (i32, i32),
}

pub fn monthly_climatology<T: Scalar>(
    stack: &DailyStack<T>,
    start_year: i32,
    end_year: i32,
) -> Result<Climatology<T>> {
    check_period(start_year, end_year)?;
    let mut months = Vec::with_capacity(12);
    let mut years = Vec::with_capacity(12);
    let mut excluded = Vec::new();
    for m in 1..=12u32 {
        let mut totals = Vec::new();
        let mut used = Vec::new();
        for y in start_year..=end_year {
            match monthly_total(stack, y, m) {
                Ok(t) => {
                    totals.push(t.raster);
                    used.push(y);
                }
                Err(Error::EmptyPeriod(_)) => excluded.push((y, m)),
                Err(e) => return Err(e),
            }
        }
        if totals.is_empty() {
            return Err(Error::EmptyPeriod(format!(
                "month {m:02} has no data in {start_year}-{end_year}"
            )));
        }
        months.push(mean_of(&totals, stack.geo));
        years.push(used);
    }
    excluded.sort();
    Ok(Climatology {
        months,
        years,
        excluded,
        period: (start_year, end_year),
    })
}

/// Region-level climatology: per month, the zonal mean of each year's total
/// and their average.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimatologyTable {
    /// Indexed by month − 1: `(mean mm, per-year (year, mm))`.
    pub months: Vec<(f64, Vec<(i32, f64)>)>,
    pub period: (i32, i32),
}

/// Zonal-mean monthly totals `(year, month, mm)` for every month in the
/// period that has data.
pub fn zonal_monthly_series<T: Scalar>(
    stack: &DailyStack<T>,
    mask: &Grid<T>,
    start_year: i32,
    end_year: i32,
    latitude_weighting: bool,
) -> Result<Vec<(i32, u32, T)>> {
    check_period(start_year, end_year)?;
    let mut out = Vec::new();
    for y in start_year..=end_year {
        for m in 1..=12u32 {
            match monthly_total(stack, y, m) {
                Ok(t) => out.push((y, m, zonal_mean(&t.raster, mask, latitude_weighting)?)),
                Err(Error::EmptyPeriod(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyPeriod(format!("{start_year}-{end_year}")));
    }
    Ok(out)
}

pub fn climatology_table<T: Scalar>(
    stack: &DailyStack<T>,
    mask: &Grid<T>,
    start_year: i32,
    end_year: i32,
    latitude_weighting: bool,
) -> Result<ClimatologyTable> {
    let series = zonal_monthly_series(stack, mask, start_year, end_year, latitude_weighting)?;
    let mut months = Vec::with_capacity(12);
    for m in 1..=12u32 {
        let per_year: Vec<(i32, f64)> = series
            .iter()
            .filter(|e| e.1 == m)
            .map(|e| (e.0, e.2.as_f64()))
            .collect();
        if per_year.is_empty() {
            return Err(Error::EmptyPeriod(format!(
                "month {m:02} has no data in {start_year}-{end_year}"
            )));
        }
        let mean = per_year.iter().map(|e| e.1).sum::<f64>() / per_year.len() as f64;
        months.push((mean, per_year));
    }
    Ok(ClimatologyTable {
        months,
        period: (start_year, end_year),
    })
}

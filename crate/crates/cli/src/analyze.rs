use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use hydrosar::analysis::{box_stats, group_by_month, lag_correlation, render_box_svg, render_series_svg};
use hydrosar::raster::read_series_csv;
use hydrosar::water::WaterExtentRecord;
use hydrosar::Series;

use crate::config::{require, RunConfig};
use crate::exit::{create_dir, write_file, CmdResult, Failure};

pub const BOX_CSV_HEADER: &str = "month,n,min,q1,median,q3,max,n_outliers";
pub const LAG_CSV_HEADER: &str = "lag,r,n,best";

fn bad(path: &Path, row: usize, msg: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{} row {row}: {msg}", path.display()))
}

fn field<T: std::str::FromStr>(path: &Path, row: usize, s: &str, what: &str) -> CmdResult<T> {
    s.trim()
        .parse()
        .map_err(|_| bad(path, row, format!("bad {what} {s:?}")))
}

/// Reads a series from any of the CSV shapes the other commands write:
/// `date,value`, `year,month,value` (dated to the first of the month), or
/// water extent records (area_km2 by date, one reservoir per file).
pub fn read_series(path: &Path, label: &str) -> CmdResult<Series> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or_default().trim();
    let mut entries = Vec::new();
    let units;
    match header {
        "date,value" => {
            let mut s: Series = read_series_csv(path)?;
            s.label = label.to_string();
            return Ok(s);
        }
        "year,month,value" => {
            units = "mm";
            for (i, line) in lines.enumerate() {
                let row = i + 1;
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 3 {
                    return Err(bad(path, row, "expected 3 fields"));
                }
                let year: i32 = field(path, row, f[0], "year")?;
                let month: u32 = field(path, row, f[1], "month")?;
                let date = NaiveDate::from_ymd_opt(year, month, 1)
                    .ok_or_else(|| bad(path, row, format!("no such month {year}-{month}")))?;
                entries.push((date, field(path, row, f[2], "value")?));
            }
        }
        h if h == WaterExtentRecord::CSV_HEADER => {
            units = "km2";
            let mut reservoir: Option<String> = None;
            for (i, line) in lines.enumerate() {
                let row = i + 1;
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 8 {
                    return Err(bad(path, row, "expected 8 fields"));
                }
                match &reservoir {
                    Some(r) if r != f[0] => {
                        return Err(bad(path, row, format!("mixes reservoirs {r:?} and {:?}", f[0])))
                    }
                    Some(_) => {}
                    None => reservoir = Some(f[0].to_string()),
                }
                let date = NaiveDate::parse_from_str(f[1].trim(), "%Y-%m-%d")
                    .map_err(|e| bad(path, row, format!("bad date {:?}: {e}", f[1])))?;
                entries.push((date, field(path, row, f[2], "area")?));
            }
        }
        _ => {
            return Err(Failure::Input(format!(
                "{}: unrecognised header {header:?}",
                path.display()
            )))
        }
    }
    if entries.is_empty() {
        return Err(Failure::Input(format!("{}: no data rows", path.display())));
    }
    Ok(Series::from_unsorted(label, units, entries)?)
}

pub fn box_csv(series: &Series) -> CmdResult<String> {
    let mut csv = format!("{BOX_CSV_HEADER}\n");
    for (m, values) in group_by_month(series).iter().enumerate() {
        if values.is_empty() {
            let _ = writeln!(csv, "{},0,,,,,,0", m + 1);
            continue;
        }
        let b = box_stats(values)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            m + 1,
            b.n,
            b.min,
            b.q1,
            b.median,
            b.q3,
            b.max,
            b.outliers.len()
        );
    }
    Ok(csv)
}

fn write_box(out_dir: &Path, name: &str, series: &Series) -> CmdResult {
    write_file(&out_dir.join(format!("{name}_box.csv")), &box_csv(series)?)?;
    let stats = group_by_month(series)
        .iter()
        .map(|v| if v.is_empty() { Ok(None) } else { box_stats(v).map(Some) })
        .collect::<Result<Vec<_>, _>>()?;
    let title = format!("Monthly {name} ({})", series.units);
    write_file(&out_dir.join(format!("{name}_box.svg")), &render_box_svg(&stats, &title)?)
}

pub fn run(cfg: &RunConfig) -> CmdResult {
    let out_dir = require(&cfg.out_dir, "out-dir")?;
    if cfg.extent_csv.is_none() && cfg.rain_csv.is_none() {
        return Err(Failure::Input("give --extent-csv, --rain-csv or both".into()));
    }
    let extent = cfg.extent_csv.as_deref().map(|p| read_series(p, "extent")).transpose()?;
    let rain = cfg.rain_csv.as_deref().map(|p| read_series(p, "rain")).transpose()?;

    create_dir(&out_dir)?;
    if let Some(s) = &extent {
        write_box(&out_dir, "extent", s)?;
    }
    if let Some(s) = &rain {
        write_box(&out_dir, "rain", s)?;
    }
    let (Some(extent), Some(rain)) = (extent, rain) else {
        eprintln!("only one series given; lag correlation skipped");
        return Ok(());
    };

    let svg = render_series_svg(&extent, &rain, "Water extent and rainfall")?;
    write_file(&out_dir.join("series.svg"), &svg)?;
    let lags = lag_correlation(&rain, &extent, cfg.max_lag)?;
    let mut csv = format!("{LAG_CSV_HEADER}\n");
    for e in &lags.lags {
        let _ = writeln!(csv, "{},{},{},{}", e.lag, e.r, e.n, e.lag == lags.best_lag);
    }
    write_file(&out_dir.join("lag.csv"), &csv)
}

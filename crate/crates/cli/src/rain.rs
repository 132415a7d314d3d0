use std::fmt::Write as _;

use hydrosar::rainfall::{
    annual_mean, climatology_table, load_stack, monthly_climatology, rasterize_polygon,
    zonal_monthly_series,
};
use hydrosar::raster::{read_polygons, write_ascii_grid, Grid};
use hydrosar::Stack;

use crate::config::{require, RainMode, RunConfig};
use crate::exit::{create_dir, write_file, CmdResult};

fn period(cfg: &RunConfig, stack: &Stack) -> (i32, i32) {
    let years = stack.years();
    let first = *years.first().expect("stack is nonempty");
    let last = *years.last().expect("stack is nonempty");
    (cfg.start_year.unwrap_or(first), cfg.end_year.unwrap_or(last))
}

fn basin_mask(cfg: &RunConfig, stack: &Stack) -> CmdResult<Grid<f64>> {
    let poly = read_polygons(require(&cfg.polygon, "polygon")?)?;
    let mask: Grid<f64> = rasterize_polygon(&poly, &stack.geo);
    if mask.values.iter().all(|v| *v != 1.0) {
        log::warn!("polygon {:?} covers no cell centers of the rainfall grid", poly.id);
    }
    Ok(mask)
}

pub fn run(cfg: &RunConfig) -> CmdResult {
    let daily_dir = require(&cfg.daily_dir, "daily-dir")?;
    let mode = require(&cfg.mode, "mode")?;
    let out = require(&cfg.out, "out")?;
    let stack: Stack = load_stack(&daily_dir)?;
    if !stack.gaps.is_empty() {
        log::warn!("{} missing day(s) between {} and {}", stack.gaps.len(), stack.dates[0], stack.dates[stack.len() - 1]);
    }
    let (start, end) = period(cfg, &stack);

    match mode {
        RainMode::AnnualMean => {
            let grid = annual_mean(&stack, start, end)?;
            write_ascii_grid(&grid, &out)?;
        }
        RainMode::MonthlyClimatology => {
            let clim = monthly_climatology(&stack, start, end)?;
            for (y, m) in &clim.excluded {
                log::warn!("{y}-{m:02} has no daily layers; excluded from the climatology");
            }
            create_dir(&out)?;
            for (m, grid) in clim.months.iter().enumerate() {
                write_ascii_grid(grid, out.join(format!("climatology_{:02}.asc", m + 1)))?;
            }
            if cfg.polygon.is_some() {
                let table = climatology_table(&stack, &basin_mask(cfg, &stack)?, start, end, cfg.latitude_weighting)?;
                let mut csv = String::from("month,value\n");
                for (m, (mean, _)) in table.months.iter().enumerate() {
                    let _ = writeln!(csv, "{},{}", m + 1, mean);
                }
                write_file(&out.join("climatology.csv"), &csv)?;
            }
        }
        RainMode::Zonal => {
            let mask = basin_mask(cfg, &stack)?;
            let series = zonal_monthly_series(&stack, &mask, start, end, cfg.latitude_weighting)?;
            let mut csv = String::from("year,month,value\n");
            for (y, m, v) in series {
                let _ = writeln!(csv, "{y},{m},{v}");
            }
            write_file(&out, &csv)?;
        }
    }
    Ok(())
}

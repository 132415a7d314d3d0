//! ESRI ASCII Grid (`.asc`) reading and writing.
//!
//! Header keys are matched case-insensitively. `xllcenter`/`yllcenter` are
//! accepted and converted to corner coordinates. Cells must be square, so
//! `dx`/`dy` headers are rejected. Values are written with Rust's shortest
//! round-trip formatting, which makes write/read/write byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CrsKind, Grid, GridGeo, Units, DEFAULT_NODATA};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Reads a grid as a projected, dimensionless raster.
pub fn read_ascii_grid<T: Scalar>(path: impl AsRef<Path>) -> Result<Grid<T>> {
    read_ascii_grid_as(path, CrsKind::ProjectedMeters, Units::Dimensionless)
}

/// Reads a grid, tagging it with the caller's CRS kind and units (neither is
/// recorded in the file format).
pub fn read_ascii_grid_as<T: Scalar>(
    path: impl AsRef<Path>,
    crs_kind: CrsKind,
    units: Units,
) -> Result<Grid<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ascii_grid(&text, crs_kind, units).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
        other => other,
    })
}

pub fn write_ascii_grid<T: Scalar>(raster: &Grid<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_ascii_grid(raster)).map_err(|e| Error::io(path, e))
}

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    xll: Option<(f64, bool)>,
    yll: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<String>,
}

pub(crate) fn parse_ascii_grid<T: Scalar>(
    text: &str,
    crs_kind: CrsKind,
    units: Units,
) -> Result<Grid<T>> {
    const CTX: &str = "ascii grid";
    let mut header = Header::default();
    let mut lines = text.lines().peekable();

    while let Some(line) = lines.peek() {
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(CTX, format!("header key {key:?} has no value")))?;
        let lower = key.to_ascii_lowercase();
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::parse(CTX, format!("bad value {v:?} for header key {key:?}")))
        };
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::parse(CTX, format!("bad value {v:?} for header key {key:?}")))
        };
        match lower.as_str() {
            "ncols" => header.ncols = Some(count(value)?),
            "nrows" => header.nrows = Some(count(value)?),
            "xllcorner" => header.xll = Some((num(value)?, false)),
            "yllcorner" => header.yll = Some((num(value)?, false)),
            "xllcenter" => header.xll = Some((num(value)?, true)),
            "yllcenter" => header.yll = Some((num(value)?, true)),
            "cellsize" => header.cellsize = Some(num(value)?),
            "nodata_value" => {
                num(value)?;
                header.nodata = Some(value.to_string());
            }
            "dx" | "dy" | "xcellsize" | "ycellsize" => {
                return Err(Error::parse(
                    CTX,
                    format!("header key {key:?}: rectangular cells are not supported"),
                ))
            }
            _ => return Err(Error::parse(CTX, format!("unknown header key {key:?}"))),
        }
        lines.next();
    }

    let missing = |k: &str| Error::parse(CTX, format!("missing header key {k:?}"));
    let ncols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let cellsize = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let (x, x_center) = header.xll.ok_or_else(|| missing("xllcorner"))?;
    let (y, y_center) = header.yll.ok_or_else(|| missing("yllcorner"))?;
    let x_origin = if x_center { x - cellsize / 2.0 } else { x };
    let y_origin = if y_center { y - cellsize / 2.0 } else { y };

    let nodata = match header.nodata {
        Some(s) => s
            .parse::<T>()
            .map_err(|_| Error::parse(CTX, format!("bad value {s:?} for header key \"NODATA_value\"")))?,
        None => T::lit(DEFAULT_NODATA),
    };

    let geo = GridGeo::new(ncols, nrows, x_origin, y_origin, cellsize, crs_kind)?;
    let mut values = Vec::with_capacity(geo.len());
    for line in lines {
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<T>()
                .map_err(|_| Error::parse(CTX, format!("bad cell value {tok:?}")))?;
            values.push(v);
        }
    }
    if values.len() != geo.len() {
        return Err(Error::parse(
            CTX,
            format!(
                "wrong cell count: expected {} ({} rows x {} cols), found {}",
                geo.len(),
                nrows,
                ncols,
                values.len()
            ),
        ));
    }
    Grid::new(geo, values, nodata, units)
}

pub(crate) fn format_ascii_grid<T: Scalar>(raster: &Grid<T>) -> String {
    let geo = &raster.geo;
    let mut out = String::with_capacity(64 + geo.len() * 8);
    let _ = writeln!(out, "ncols {}", geo.ncols);
    let _ = writeln!(out, "nrows {}", geo.nrows);
    let _ = writeln!(out, "xllcorner {}", geo.x_origin);
    let _ = writeln!(out, "yllcorner {}", geo.y_origin);
    let _ = writeln!(out, "cellsize {}", geo.cellsize);
    let _ = writeln!(out, "NODATA_value {}", raster.nodata);
    for row in raster.values.chunks(geo.ncols) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            if v.is_nan() {
                let _ = write!(out, "{}", raster.nodata);
            } else {
                let _ = write!(out, "{v}");
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SMALL: &str = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n1 2\n3 4\n";

    #[test]
    fn reads_two_by_two() {
        let g: Grid<f64> = parse_ascii_grid(SMALL, CrsKind::ProjectedMeters, Units::Dimensionless)
            .unwrap();
        assert_eq!(g.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(g.ncols(), 2);
        assert_eq!(g.geo.cellsize, 10.0);
    }

    #[test]
    fn header_is_case_insensitive_and_centers_convert() {
        let text = "NCOLS 1\nNROWS 1\nXLLCENTER 5\nYLLCENTER 15\nCELLSIZE 10\nnodata_value -1\n7\n";
        let g: Grid<f64> =
            parse_ascii_grid(text, CrsKind::ProjectedMeters, Units::Dimensionless).unwrap();
        assert_eq!((g.geo.x_origin, g.geo.y_origin), (0.0, 10.0));
        assert_eq!(g.nodata, -1.0);
    }

    #[test]
    fn nodata_cell_excluded_from_mean() {
        let text = SMALL.replace("3 4", "-9999 4");
        let g: Grid<f64> =
            parse_ascii_grid(&text, CrsKind::ProjectedMeters, Units::Dimensionless).unwrap();
        assert_eq!(g.valid_mean(), Some(7.0 / 3.0));
    }

    #[test]
    fn malformed_header_names_key() {
        let text = SMALL.replace("cellsize 10", "cellsize ten");
        let err = parse_ascii_grid::<f64>(&text, CrsKind::ProjectedMeters, Units::Dimensionless)
            .unwrap_err();
        assert!(err.to_string().contains("cellsize"), "{err}");

        let text = SMALL.replace("cellsize 10", "dx 10");
        let err = parse_ascii_grid::<f64>(&text, CrsKind::ProjectedMeters, Units::Dimensionless)
            .unwrap_err();
        assert!(err.to_string().contains("dx"), "{err}");
    }

    #[test]
    fn wrong_count_reports_expected_and_actual() {
        let text = SMALL.replace("3 4", "3");
        let err = parse_ascii_grid::<f64>(&text, CrsKind::ProjectedMeters, Units::Dimensionless)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("expected 4") && msg.contains("found 3"), "{msg}");
    }

    #[test]
    fn constant_zero_writes_zero_tokens() {
        let geo = GridGeo::projected(3, 2, 10.0).unwrap();
        let g = Grid::filled(geo, 0.0f64, Units::Dimensionless);
        let text = format_ascii_grid(&g);
        for line in text.lines().skip(6) {
            assert!(line.split(' ').all(|t| t == "0"), "{line}");
        }
    }

    #[test]
    fn nodata_sentinel_written_verbatim() {
        let geo = GridGeo::projected(2, 1, 10.0).unwrap();
        let g = Grid::new(geo, vec![-9999.0f64, 1.5], -9999.0, Units::Dimensionless).unwrap();
        let text = format_ascii_grid(&g);
        assert!(text.ends_with("-9999 1.5\n"), "{text}");
    }

    #[test]
    fn file_round_trip_and_idempotence() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.asc");
        let b = dir.path().join("b.asc");
        std::fs::write(&a, SMALL).unwrap();
        let g: Grid<f64> = read_ascii_grid(&a).unwrap();
        write_ascii_grid(&g, &b).unwrap();
        let g2: Grid<f64> = read_ascii_grid(&b).unwrap();
        assert_eq!(g, g2);
        write_ascii_grid(&g2, &a).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let geo = GridGeo::projected(1, 1, 10.0).unwrap();
        let g = Grid::filled(geo, 1.0f64, Units::Dimensionless);
        let err = write_ascii_grid(&g, "/nonexistent-dir/x/y.asc").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    fn arb_grid() -> impl Strategy<Value = Grid<f64>> {
        (1usize..8, 1usize..8, -1e6f64..1e6, -1e6f64..1e6, 0.01f64..100.0).prop_flat_map(
            |(nc, nr, x, y, cs)| {
                let geo = GridGeo::new(nc, nr, x, y, cs, CrsKind::ProjectedMeters).unwrap();
                prop::collection::vec(
                    prop_oneof![9 => -1e9f64..1e9, 1 => Just(-9999.0)],
                    nc * nr,
                )
                .prop_map(move |v| Grid::new(geo, v, -9999.0, Units::Dimensionless).unwrap())
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        // Shortest round-trip formatting makes this exact, which is stronger
        // than the six significant digits the format promises.
        #[test]
        fn round_trip_preserves_geo_and_values(g in arb_grid()) {
            let text = format_ascii_grid(&g);
            let back: Grid<f64> =
                parse_ascii_grid(&text, CrsKind::ProjectedMeters, Units::Dimensionless).unwrap();
            prop_assert_eq!(back.geo, g.geo);
            for (a, b) in g.values.iter().zip(&back.values) {
                prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-300));
            }
            prop_assert_eq!(format_ascii_grid(&back), text);
        }
    }

    #[test]
    fn f32_grids_round_trip() {
        let g: Grid<f32> = parse_ascii_grid(SMALL, CrsKind::ProjectedMeters, Units::Dimensionless)
            .unwrap();
        let back: Grid<f32> =
            parse_ascii_grid(&format_ascii_grid(&g), CrsKind::ProjectedMeters, Units::Dimensionless)
                .unwrap();
        assert_eq!(g, back);
    }
}

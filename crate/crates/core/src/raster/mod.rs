//! Grid, scene, polygon and series data model plus the file formats they
//! travel in.

mod ascii;
mod convert;
mod geojson;
mod series;

pub use ascii::{read_ascii_grid, read_ascii_grid_as, write_ascii_grid};
pub use convert::{db_to_linear, linear_to_db};
pub use geojson::{read_polygons, Polygon, PolygonSet, Ring};
pub use series::{read_series_csv, write_series_csv, SeriesTable};

use std::fmt;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Default nodata sentinel for grids produced by this crate.
pub const DEFAULT_NODATA: f64 = -9999.0;

const GEO_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrsKind {
    /// Degrees of longitude/latitude.
    Geographic,
    /// Planar coordinates in meters.
    ProjectedMeters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Units {
    LinearPower,
    Decibel,
    MillimetersPerDay,
    Millimeters,
    Dimensionless,
    Label,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Units::LinearPower => "linear power",
            Units::Decibel => "dB",
            Units::MillimetersPerDay => "mm/day",
            Units::Millimeters => "mm",
            Units::Dimensionless => "dimensionless",
            Units::Label => "label",
        };
        f.write_str(s)
    }
}

/// Georeferencing of a square-celled grid. The origin is the lower-left
/// corner of the lower-left cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeo {
    pub ncols: usize,
    pub nrows: usize,
    pub x_origin: f64,
    pub y_origin: f64,
    pub cellsize: f64,
    pub crs_kind: CrsKind,
}

impl GridGeo {
    pub fn new(
        ncols: usize,
        nrows: usize,
        x_origin: f64,
        y_origin: f64,
        cellsize: f64,
        crs_kind: CrsKind,
    ) -> Result<Self> {
        let geo = GridGeo {
            ncols,
            nrows,
            x_origin,
            y_origin,
            cellsize,
            crs_kind,
        };
        geo.validate()?;
        Ok(geo)
    }

    /// Projected grid with origin at (0, 0).
    pub fn projected(ncols: usize, nrows: usize, cellsize: f64) -> Result<Self> {
        Self::new(ncols, nrows, 0.0, 0.0, cellsize, CrsKind::ProjectedMeters)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ncols == 0 || self.nrows == 0 {
            return Err(Error::Param(format!(
                "grid must have at least one row and column, got {}x{}",
                self.nrows, self.ncols
            )));
        }
        if !(self.cellsize > 0.0 && self.cellsize.is_finite()) {
            return Err(Error::Param(format!(
                "cellsize must be positive, got {}",
                self.cellsize
            )));
        }
        if !self.x_origin.is_finite() || !self.y_origin.is_finite() {
            return Err(Error::Param("grid origin must be finite".into()));
        }
        if self.crs_kind == CrsKind::Geographic {
            let top = self.y_origin + self.nrows as f64 * self.cellsize;
            if self.y_origin < -90.0 - GEO_EPS || top > 90.0 + GEO_EPS {
                return Err(Error::Crs(format!(
                    "geographic grid spans latitudes {} to {}, outside [-90, 90]",
                    self.y_origin, top
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index; row 0 is the top row.
    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.ncols + col
    }

    pub fn cell_center_x(&self, col: usize) -> f64 {
        self.x_origin + (col as f64 + 0.5) * self.cellsize
    }

    pub fn cell_center_y(&self, row: usize) -> f64 {
        self.y_origin + ((self.nrows - row) as f64 - 0.5) * self.cellsize
    }

    pub fn cell_area_m2(&self) -> Result<f64> {
        match self.crs_kind {
            CrsKind::ProjectedMeters => Ok(self.cellsize * self.cellsize),
            CrsKind::Geographic => Err(Error::Crs(
                "cell areas are undefined for geographic (degree) cells".into(),
            )),
        }
    }
}

/// A georeferenced 2-D grid of samples, stored row-major with the top row
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub geo: GridGeo,
    pub values: Vec<T>,
    pub nodata: T,
    pub units: Units,
}

impl<T: Scalar> Grid<T> {
    pub fn new(geo: GridGeo, values: Vec<T>, nodata: T, units: Units) -> Result<Self> {
        geo.validate()?;
        if values.len() != geo.len() {
            return Err(Error::Shape(format!(
                "expected {} values for a {}x{} grid, got {}",
                geo.len(),
                geo.nrows,
                geo.ncols,
                values.len()
            )));
        }
        Ok(Grid {
            geo,
            values,
            nodata,
            units,
        })
    }

    pub fn filled(geo: GridGeo, value: T, units: Units) -> Self {
        Grid {
            geo,
            values: vec![value; geo.len()],
            nodata: T::lit(DEFAULT_NODATA),
            units,
        }
    }

    pub fn ncols(&self) -> usize {
        self.geo.ncols
    }

    pub fn nrows(&self) -> usize {
        self.geo.nrows
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[self.geo.index(row, col)]
    }

    /// A sample is valid when it is finite and differs from the sentinel.
    #[inline]
    pub fn is_valid(&self, v: T) -> bool {
        v.is_finite() && v != self.nodata
    }

    #[inline]
    pub fn is_valid_at(&self, idx: usize) -> bool {
        self.is_valid(self.values[idx])
    }

    pub fn valid_values(&self) -> impl Iterator<Item = T> + '_ {
        self.values.iter().copied().filter(move |&v| self.is_valid(v))
    }

    pub fn valid_count(&self) -> usize {
        self.valid_values().count()
    }

    /// Mean of valid samples, `None` when every cell is nodata.
    pub fn valid_mean(&self) -> Option<T> {
        let (sum, n) = self
            .valid_values()
            .fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / T::from_count(n))
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }

    /// Applies `f` to every valid sample; nodata cells are copied through.
    pub fn map_valid(&self, units: Units, mut f: impl FnMut(T) -> T) -> Self {
        let values = self
            .values
            .iter()
            .map(|&v| if self.is_valid(v) { f(v) } else { self.nodata })
            .collect();
        Grid {
            geo: self.geo,
            values,
            nodata: self.nodata,
            units,
        }
    }

    pub fn require_units(&self, expected: Units) -> Result<()> {
        if self.units == expected {
            Ok(())
        } else {
            Err(Error::Units {
                expected: expected.to_string(),
                found: self.units.to_string(),
            })
        }
    }

    pub fn cast<U: Scalar>(&self) -> Grid<U> {
        let nodata = U::lit(self.nodata.as_f64());
        Grid {
            geo: self.geo,
            values: self
                .values
                .iter()
                .map(|&v| if self.is_valid(v) { U::lit(v.as_f64()) } else { nodata })
                .collect(),
            nodata,
            units: self.units,
        }
    }
}

/// Same-date VV and VH backscatter over one reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub vv: Grid<T>,
    pub vh: Grid<T>,
    pub date: NaiveDate,
    pub reservoir_id: String,
}

impl<T: Scalar> Scene<T> {
    pub fn new(
        vv: Grid<T>,
        vh: Grid<T>,
        date: NaiveDate,
        reservoir_id: impl Into<String>,
    ) -> Result<Self> {
        if vv.geo != vh.geo {
            return Err(Error::GridMismatch {
                first: "VV".into(),
                second: "VH".into(),
            });
        }
        if vv.geo.crs_kind != CrsKind::ProjectedMeters {
            return Err(Error::Crs(
                "SAR scenes must be on a projected metric grid".into(),
            ));
        }
        if vv.units != vh.units {
            return Err(Error::Units {
                expected: vv.units.to_string(),
                found: vh.units.to_string(),
            });
        }
        if !matches!(vv.units, Units::Decibel | Units::LinearPower) {
            return Err(Error::Units {
                expected: "dB or linear power".into(),
                found: vv.units.to_string(),
            });
        }
        Ok(Scene {
            vv,
            vh,
            date,
            reservoir_id: reservoir_id.into(),
        })
    }

    pub fn geo(&self) -> &GridGeo {
        &self.vv.geo
    }

    pub fn units(&self) -> Units {
        self.vv.units
    }
}

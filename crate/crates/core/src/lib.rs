//! Reservoir surface-water extent from dual-polarization SAR backscatter and
//! basin rainfall statistics from daily precipitation grids.
//!
//! The water branch runs refined Lee despeckling, per-band Otsu thresholds,
//! VV/VH classification and small-component removal to produce one area per
//! scene. The rainfall branch aggregates daily grids into monthly and annual
//! totals, climatologies and basin means. [`analysis`] relates the two.
//!
//! Every numeric type is generic over [`num::Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod analysis;
pub mod error;
pub mod num;
pub mod rainfall;
pub mod raster;
pub mod speckle;
pub mod synth;
pub mod threshold;
pub mod water;

pub use error::{Error, Result};
pub use num::Scalar;

pub type Raster = raster::Grid<f64>;
pub type Raster32 = raster::Grid<f32>;
pub type SarScene = raster::Scene<f64>;
pub type Series = raster::SeriesTable<f64>;
pub type Stack = rainfall::DailyStack<f64>;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::{CrsKind, Grid};

/// Mean of `r` over cells where `mask == 1`, skipping nodata. With
/// `latitude_weighting` on a geographic grid each cell is weighted by the
/// cosine of its center latitude.
///
/// Accumulates deviations from the first valid sample, so a constant field
/// returns that constant exactly under any weights.
pub fn zonal_mean<T: Scalar>(r: &Grid<T>, mask: &Grid<T>, latitude_weighting: bool) -> Result<T> {
    if r.geo != mask.geo {
        return Err(Error::GridMismatch {
            first: "raster".into(),
            second: "mask".into(),
        });
    }
    let weighted = latitude_weighting && r.geo.crs_kind == CrsKind::Geographic;
    let ncols = r.ncols();
    let mut reference = None;
    let mut wsum = T::zero();
    let mut acc = T::zero();
    for (i, (&v, &m)) in r.values.iter().zip(&mask.values).enumerate() {
        if !(mask.is_valid(m) && m == T::one() && r.is_valid(v)) {
            continue;
        }
        let w = if weighted {
            T::lit(r.geo.cell_center_y(i / ncols).to_radians().cos())
        } else {
            T::one()
        };
        let x0 = *reference.get_or_insert(v);
        wsum = wsum + w;
        acc = acc + w * (v - x0);
    }
    match reference {
        Some(x0) if wsum > T::zero() => Ok(x0 + acc / wsum),
        _ => Err(Error::EmptyMask("no valid cells under the mask".into())),
    }
}

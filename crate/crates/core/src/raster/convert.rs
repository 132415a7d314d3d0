use super::{Grid, Units};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// `10^(x/10)` per valid pixel.
pub fn db_to_linear<T: Scalar>(r: &Grid<T>) -> Result<Grid<T>> {
    r.require_units(Units::Decibel)?;
    let ten = T::lit(10.0);
    Ok(r.map_valid(Units::LinearPower, |v| ten.powf(v / ten)))
}

/// `10·log10(x)` per valid pixel; every valid pixel must be positive.
pub fn linear_to_db<T: Scalar>(r: &Grid<T>) -> Result<Grid<T>> {
    r.require_units(Units::LinearPower)?;
    if let Some(index) = r
        .values
        .iter()
        .position(|&v| r.is_valid(v) && v <= T::zero())
    {
        return Err(Error::Domain {
            index,
            message: format!("non-positive power {} has no dB value", r.values[index]),
        });
    }
    let ten = T::lit(10.0);
    Ok(r.map_valid(Units::Decibel, |v| ten * v.log10()))
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::SeriesTable;

use super::monthly::{month_index, monthly_mean_series};

pub const DEFAULT_MAX_LAG: usize = 3;

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "pearson needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Shape(format!(
            "pearson needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::DegenerateDistribution(
            "pearson of a constant sequence".into(),
        ));
    }
    // sqrt of the product (not the product of sqrts) keeps r(x, x) == 1.
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagEntry<T> {
    /// Months by which extent trails rainfall.
    pub lag: usize,
    pub r: T,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagCorrResult<T> {
    pub lags: Vec<LagEntry<T>>,
    pub best_lag: usize,
}

impl<T: Scalar> LagCorrResult<T> {
    pub fn best(&self) -> &LagEntry<T> {
        self.lags
            .iter()
            .find(|e| e.lag == self.best_lag)
            .expect("best lag is among the reported lags")
    }
}

/// Correlates rainfall in month `t` with extent in month `t + k` for
/// `k = 0..=max_lag`. Inputs are reduced to monthly means first. Lags with
/// fewer than three pairs, or a constant side, are left out of the result.
pub fn lag_correlation<T: Scalar>(
    rain: &SeriesTable<T>,
    extent: &SeriesTable<T>,
    max_lag: usize,
) -> Result<LagCorrResult<T>> {
    let rain = monthly_mean_series(rain);
    let extent: BTreeMap<i64, T> = monthly_mean_series(extent)
        .entries()
        .iter()
        .map(|&(d, v)| (month_index(d), v))
        .collect();

    let overlap = rain
        .entries()
        .iter()
        .filter(|(d, _)| extent.contains_key(&month_index(*d)))
        .count();
    if overlap < max_lag + 3 {
        return Err(Error::EmptyPeriod(format!(
            "rainfall and extent overlap by {overlap} month(s); need at least {}",
            max_lag + 3
        )));
    }

    let mut lags = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let (xs, ys): (Vec<T>, Vec<T>) = rain
            .entries()
            .iter()
            .filter_map(|&(d, r)| extent.get(&(month_index(d) + lag as i64)).map(|&e| (r, e)))
            .unzip();
        if xs.len() < 3 {
            log::warn!("lag {lag}: only {} pair(s), skipped", xs.len());
            continue;
        }
        match pearson(&xs, &ys) {
            Ok(r) => lags.push(LagEntry { lag, r, n: xs.len() }),
            Err(Error::DegenerateDistribution(m)) => log::warn!("lag {lag}: {m}, skipped"),
            Err(e) => return Err(e),
        }
    }
    let best = lags
        .iter()
        .fold(None::<&LagEntry<T>>, |best, e| match best {
            Some(b) if b.r >= e.r => Some(b),
            _ => Some(e),
        })
        .ok_or_else(|| Error::DegenerateDistribution("no lag produced a correlation".into()))?;
    Ok(LagCorrResult {
        best_lag: best.lag,
        lags,
    })
}

use chrono::{Datelike, NaiveDate};

use crate::num::Scalar;
use crate::raster::SeriesTable;

/// Months since year 0, for lag arithmetic.
pub fn month_index(d: NaiveDate) -> i64 {
    d.year() as i64 * 12 + d.month0() as i64
}

/// Values bucketed by calendar month; `buckets[0]` is January.
pub fn group_by_month<T: Scalar>(series: &SeriesTable<T>) -> [Vec<T>; 12] {
    let mut buckets: [Vec<T>; 12] = Default::default();
    for &(d, v) in series.entries() {
        buckets[d.month0() as usize].push(v);
    }
    buckets
}

/// One value per year-month (the mean of that month's entries), dated to
/// the first of the month.
pub fn monthly_mean_series<T: Scalar>(series: &SeriesTable<T>) -> SeriesTable<T> {
    let mut out: Vec<(NaiveDate, T)> = Vec::new();
    let mut run: Option<(i64, NaiveDate, T, usize)> = None;
    let flush = |run: Option<(i64, NaiveDate, T, usize)>, out: &mut Vec<(NaiveDate, T)>| {
        if let Some((_, d, sum, n)) = run {
            out.push((d, sum / T::from_count(n)));
        }
    };
    for &(d, v) in series.entries() {
        let key = month_index(d);
        match &mut run {
            Some((k, _, sum, n)) if *k == key => {
                *sum = *sum + v;
                *n += 1;
            }
            _ => {
                flush(run.take(), &mut out);
                let first = d.with_day(1).expect("day 1 exists");
                run = Some((key, first, v, 1));
            }
        }
    }
    flush(run, &mut out);
    SeriesTable::new(series.label.clone(), series.units.clone(), out)
        .expect("months of an ordered series stay ordered")
}

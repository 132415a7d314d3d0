use crate::error::{Error, Result};
use crate::num::Scalar;

/// Tukey box-and-whisker summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats<T> {
    pub n: usize,
    pub min: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub max: T,
    pub iqr: T,
    pub whisker_lo: T,
    pub whisker_hi: T,
    pub outliers: Vec<T>,
}

/// Quantile `p` of sorted data by linear interpolation at `h = (n−1)·p`.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], p: f64) -> T {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = T::lit(h - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Quartiles use `h = (n−1)·p` interpolation. Whiskers reach the most
/// extreme samples inside the 1.5·IQR fences, but never retreat inside the
/// box: when no sample lies between a fence and its quartile, the whisker
/// sits on the quartile. Outliers are listed in ascending order.
pub fn box_stats<T: Scalar>(values: &[T]) -> Result<BoxStats<T>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("box statistics of no values".into()));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            index,
            message: format!("non-finite value {}", values[index]),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let reach = T::lit(1.5) * iqr;
    let (fence_lo, fence_hi) = (q1 - reach, q3 + reach);

    let inside = sorted.iter().copied().filter(|&v| v >= fence_lo && v <= fence_hi);
    let whisker_lo = inside.clone().next().map_or(q1, |v| v.min(q1));
    let whisker_hi = inside.last().map_or(q3, |v| v.max(q3));
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < fence_lo || v > fence_hi)
        .collect();

    Ok(BoxStats {
        n: sorted.len(),
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        iqr,
        whisker_lo,
        whisker_hi,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_odd() {
        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (2.0, 3.0, 4.0));
        assert_eq!((b.whisker_lo, b.whisker_hi), (1.0, 5.0));
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn degenerate_constant() {
        let b = box_stats(&[1.0; 4]).unwrap();
        assert_eq!(
            [b.min, b.q1, b.median, b.q3, b.max, b.whisker_lo, b.whisker_hi],
            [1.0; 7]
        );
        assert_eq!(b.iqr, 0.0);
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn outlier_detected_and_whisker_clamped() {
        // q1 = 7.5 interpolates between the outlier 0 and 10.
        let b = box_stats(&[0.0, 10.0, 10.0, 10.0]).unwrap();
        assert_eq!(b.q1, 7.5);
        assert_eq!(b.outliers, vec![0.0]);
        assert_eq!(b.whisker_lo, 7.5);
        assert_eq!(b.whisker_hi, 10.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(box_stats::<f64>(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            box_stats(&[1.0, f64::NAN]),
            Err(Error::Domain { index: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn ordering_chain(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let b = box_stats(&values).unwrap();
            prop_assert!(b.min <= b.whisker_lo && b.whisker_lo <= b.q1 && b.q1 <= b.median);
            prop_assert!(b.median <= b.q3 && b.q3 <= b.whisker_hi && b.whisker_hi <= b.max);
            prop_assert_eq!(b.iqr, b.q3 - b.q1);
            for o in &b.outliers {
                prop_assert!(*o < b.q1 - 1.5 * b.iqr || *o > b.q3 + 1.5 * b.iqr);
            }
        }
    }
}

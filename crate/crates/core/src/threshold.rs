//! Grey-level histograms and Otsu's two-class threshold.
//!
//! The threshold minimizes the within-class weighted variance
//! `σ²(t) = P_w(t)·σ_w²(t) + P_nw(t)·σ_nw²(t)` over all interior bin
//! boundaries, where "water" is the class below `t`. Class moments use bin
//! centers. The between-class variance is reported alongside so callers can
//! judge how well separated the two classes are.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::{Grid, Scene, Units};

pub const DEFAULT_BINS: usize = 256;

/// Scenes whose between-class share of the total variance falls below this
/// are flagged low-confidence.
pub const MIN_BETWEEN_FRACTION: f64 = 0.05;

/// Scenes whose class means are closer than this many pooled class standard
/// deviations are flagged low-confidence.
pub const MIN_CLASS_DISTANCE: f64 = 4.0;

/// Relative tolerance, against the total variance, under which two candidate
/// thresholds are considered tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    pub lo: T,
    pub hi: T,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl<T: Scalar> Histogram<T> {
    /// Histogram from raw counts over `[lo, hi]`.
    pub fn from_counts(lo: T, hi: T, counts: Vec<u64>) -> Result<Self> {
        if lo >= hi || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Param(format!("histogram range [{lo}, {hi}] is empty")));
        }
        if counts.len() < 2 {
            return Err(Error::Param("histogram needs at least 2 bins".into()));
        }
        let total = counts.iter().sum();
        Ok(Histogram {
            lo,
            hi,
            counts,
            total,
        })
    }

    pub fn nbins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> T {
        (self.hi - self.lo) / T::from_count(self.nbins())
    }

    pub fn bin_center(&self, i: usize) -> T {
        self.lo + (T::from_count(i) + T::lit(0.5)) * self.bin_width()
    }

    /// Lower edge of bin `i`; `boundary(nbins)` is `hi`.
    pub fn boundary(&self, i: usize) -> T {
        if i == self.nbins() {
            self.hi
        } else {
            self.lo + T::from_count(i) * self.bin_width()
        }
    }

    /// Bin index for `x`, clamping out-of-range values into the end bins.
    pub fn bin_of(&self, x: T) -> usize {
        let n = self.nbins();
        let pos = ((x - self.lo) / self.bin_width()).floor();
        if pos < T::zero() {
            0
        } else {
            pos.to_usize().map_or(n - 1, |i| i.min(n - 1))
        }
    }

    /// Same counts over the remapped domain `a·x + b` (`a > 0`).
    pub fn remapped(&self, a: T, b: T) -> Result<Self> {
        Self::from_counts(a * self.lo + b, a * self.hi + b, self.counts.clone())
    }
}

pub fn build_histogram<T: Scalar>(
    r: &Grid<T>,
    nbins: usize,
    range: Option<(T, T)>,
) -> Result<Histogram<T>> {
    if nbins < 2 {
        return Err(Error::Param(format!("need at least 2 bins, got {nbins}")));
    }
    let mut vmin = T::infinity();
    let mut vmax = T::neg_infinity();
    let mut any = false;
    for v in r.valid_values() {
        vmin = vmin.min(v);
        vmax = vmax.max(v);
        any = true;
    }
    if !any {
        return Err(Error::EmptyInput("raster has no valid pixels".into()));
    }
    if vmin == vmax {
        return Err(Error::DegenerateDistribution(format!(
            "all valid pixels equal {vmin}"
        )));
    }
    let (lo, hi) = range.unwrap_or((vmin, vmax));
    let mut h = Histogram::from_counts(lo, hi, vec![0; nbins])?;
    for v in r.valid_values() {
        let i = h.bin_of(v);
        h.counts[i] += 1;
    }
    h.total = h.counts.iter().sum();
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtsuResult<T> {
    pub threshold: T,
    /// Index of the boundary: water is bins `[0, boundary)`.
    pub boundary: usize,
    /// Minimized within-class variance σ²(t).
    pub sigma_within: T,
    pub sigma_between: T,
    pub sigma_total: T,
    pub p_w: T,
    pub p_nw: T,
    pub sigma_w2: T,
    pub sigma_nw2: T,
    pub mu_w: T,
    pub mu_nw: T,
}

impl<T: Scalar> OtsuResult<T> {
    /// Between-class share of the total variance, Otsu's η.
    pub fn separability(&self) -> T {
        if self.sigma_total > T::zero() {
            self.sigma_between / self.sigma_total
        } else {
            T::zero()
        }
    }

    /// `(μ_nw − μ_w) / sqrt((σ_w² + σ_nw²) / 2)`; infinite when both
    /// classes have zero spread.
    pub fn class_distance(&self) -> T {
        let pooled = ((self.sigma_w2 + self.sigma_nw2) / T::lit(2.0)).sqrt();
        if pooled > T::zero() {
            (self.mu_nw - self.mu_w) / pooled
        } else {
            T::infinity()
        }
    }

    /// η below [`MIN_BETWEEN_FRACTION`] or class distance below
    /// [`MIN_CLASS_DISTANCE`].
    pub fn low_confidence(&self) -> bool {
        self.separability().as_f64() < MIN_BETWEEN_FRACTION
            || self.class_distance().as_f64() < MIN_CLASS_DISTANCE
    }
}

/// Class moments for a split at boundary `j`, from running sums of counts,
/// centered first moments and centered second moments.
#[derive(Debug, Clone, Copy)]
pub struct SplitMoments<T> {
    pub p_w: T,
    pub p_nw: T,
    pub mu_w: T,
    pub mu_nw: T,
    pub var_w: T,
    pub var_nw: T,
    pub within: T,
    pub between: T,
}

/// Moments at every boundary `1..nbins`, computed by prefix sums on values
/// centered at the global mean. Also returns the total variance.
pub fn split_moments<T: Scalar>(h: &Histogram<T>) -> (Vec<SplitMoments<T>>, T) {
    let n = T::from_count(h.total as usize);
    let centers: Vec<T> = (0..h.nbins()).map(|i| h.bin_center(i)).collect();
    let mean = h
        .counts
        .iter()
        .zip(&centers)
        .map(|(&c, &x)| T::from_count(c as usize) * x)
        .sum::<T>()
        / n;

    let mut c0 = vec![T::zero(); h.nbins() + 1];
    let mut c1 = vec![T::zero(); h.nbins() + 1];
    let mut c2 = vec![T::zero(); h.nbins() + 1];
    for i in 0..h.nbins() {
        let w = T::from_count(h.counts[i] as usize);
        let d = centers[i] - mean;
        c0[i + 1] = c0[i] + w;
        c1[i + 1] = c1[i] + w * d;
        c2[i + 1] = c2[i] + w * d * d;
    }
    let last = h.nbins();
    let total_var = c2[last] / n;

    let class = |n0: T, s1: T, s2: T| -> (T, T) {
        if n0 > T::zero() {
            let mu = s1 / n0;
            (mu, (s2 / n0 - mu * mu).max(T::zero()))
        } else {
            (T::zero(), T::zero())
        }
    };

    let splits = (1..h.nbins())
        .map(|j| {
            let (nw, s1w, s2w) = (c0[j], c1[j], c2[j]);
            let (nn, s1n, s2n) = (c0[last] - nw, c1[last] - s1w, c2[last] - s2w);
            let (mu_w, var_w) = class(nw, s1w, s2w);
            let (mu_nw, var_nw) = class(nn, s1n, s2n);
            let p_w = nw / n;
            let p_nw = nn / n;
            let dm = mu_w - mu_nw;
            SplitMoments {
                p_w,
                p_nw,
                mu_w: mu_w + mean,
                mu_nw: mu_nw + mean,
                var_w,
                var_nw,
                within: p_w * var_w + p_nw * var_nw,
                between: p_w * p_nw * dm * dm,
            }
        })
        .collect();
    (splits, total_var)
}

/// Otsu threshold by minimizing the within-class variance. Among boundaries
/// whose σ²(t) is within `1e-12·σ_total²` of the minimum, the smallest `t`
/// wins.
pub fn otsu_threshold<T: Scalar>(h: &Histogram<T>) -> Result<OtsuResult<T>> {
    let nonempty = h.counts.iter().filter(|&&c| c > 0).count();
    if h.total < 2 || nonempty < 2 {
        return Err(Error::DegenerateDistribution(format!(
            "histogram has {nonempty} non-empty bin(s) and {} sample(s)",
            h.total
        )));
    }
    let (splits, total_var) = split_moments(h);
    let min = splits
        .iter()
        .map(|s| s.within)
        .fold(T::infinity(), T::min);
    let tol = T::lit(TIE_TOLERANCE) * total_var;
    let idx = splits
        .iter()
        .position(|s| s.within <= min + tol)
        .expect("at least one candidate boundary");
    let s = splits[idx];
    Ok(OtsuResult {
        threshold: h.boundary(idx + 1),
        boundary: idx + 1,
        sigma_within: s.within,
        sigma_between: s.between,
        sigma_total: total_var,
        p_w: s.p_w,
        p_nw: s.p_nw,
        sigma_w2: s.var_w,
        sigma_nw2: s.var_nw,
        mu_w: s.mu_w,
        mu_nw: s.mu_nw,
    })
}

/// Otsu thresholds for both polarizations of a dB scene.
pub fn scene_thresholds<T: Scalar>(
    s: &Scene<T>,
    nbins: usize,
) -> Result<(OtsuResult<T>, OtsuResult<T>)> {
    let band = |g: &Grid<T>, name: &str| -> Result<OtsuResult<T>> {
        g.require_units(Units::Decibel)?;
        build_histogram(g, nbins, None)
            .and_then(|h| otsu_threshold(&h))
            .map_err(|e| match e {
                Error::DegenerateDistribution(m) => {
                    Error::DegenerateDistribution(format!("{name} band: {m}"))
                }
                Error::EmptyInput(m) => Error::EmptyInput(format!("{name} band: {m}")),
                other => other,
            })
    };
    Ok((band(&s.vv, "VV")?, band(&s.vh, "VH")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GridGeo;
    use proptest::prelude::*;

    fn db(values: Vec<f64>) -> Grid<f64> {
        let geo = GridGeo::projected(values.len(), 1, 10.0).unwrap();
        Grid::new(geo, values, -9999.0, Units::Decibel).unwrap()
    }

    #[test]
    fn equal_split() {
        let h = build_histogram(&db(vec![0.0, 0.0, 10.0, 10.0]), 2, Some((0.0, 10.0))).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
    }

    #[test]
    fn top_value_lands_in_last_bin() {
        let h = build_histogram(&db(vec![1.0, 2.0, 3.0, 4.0]), 4, Some((1.0, 4.0))).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
    }

    #[test]
    fn explicit_range_clamps() {
        let h = build_histogram(&db(vec![-50.0, 1.0, 2.0, 99.0]), 4, Some((0.0, 4.0))).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
        assert_eq!(h.total, 4);
    }

    #[test]
    fn empty_and_constant_inputs() {
        assert!(matches!(
            build_histogram(&db(vec![-9999.0; 3]), 8, None),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            build_histogram(&db(vec![2.0; 3]), 8, None),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn two_spikes_split_evenly() {
        let mut counts = vec![0u64; 256];
        let lo = -30.0;
        let w = 30.0 / 256.0;
        let bin = |x: f64| ((x - lo) / w).floor() as usize;
        counts[bin(-22.0)] = 100;
        counts[bin(-6.0)] = 100;
        let h = Histogram::from_counts(lo, 0.0, counts).unwrap();
        let r = otsu_threshold(&h).unwrap();
        assert!(r.threshold > -22.0 && r.threshold < -6.0, "{}", r.threshold);
        assert_eq!(r.p_w, 0.5);
        assert_eq!(r.p_nw, 0.5);
        assert!(!r.low_confidence());
    }

    #[test]
    fn single_bin_is_degenerate() {
        let h = Histogram::from_counts(0.0, 1.0, vec![0, 7, 0]).unwrap();
        assert!(matches!(
            otsu_threshold(&h),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn scene_bands_identical_gives_identical_thresholds() {
        let vals: Vec<f64> = (0..200).map(|i| if i % 3 == 0 { -20.0 } else { -8.0 } + (i % 7) as f64 * 0.3).collect();
        let geo = GridGeo::projected(20, 10, 10.0).unwrap();
        let g = Grid::new(geo, vals, -9999.0, Units::Decibel).unwrap();
        let s = Scene::new(g.clone(), g, chrono::NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(), "r")
            .unwrap();
        let (vv, vh) = scene_thresholds(&s, 256).unwrap();
        assert_eq!(vv.threshold, vh.threshold);
    }

    #[test]
    fn degenerate_band_is_named() {
        let geo = GridGeo::projected(4, 1, 10.0).unwrap();
        let vv = Grid::new(geo, vec![-20.0, -8.0, -20.0, -8.0], -9999.0, Units::Decibel).unwrap();
        let vh = Grid::new(geo, vec![-20.0; 4], -9999.0, Units::Decibel).unwrap();
        let s = Scene::new(vv, vh, chrono::NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(), "r")
            .unwrap();
        let err = scene_thresholds(&s, 16).unwrap_err();
        assert!(err.to_string().contains("VH"), "{err}");
    }

    #[test]
    fn works_for_f32() {
        let h = Histogram::from_counts(0.0f32, 10.0, vec![5, 5, 0, 0, 0, 0, 0, 0, 5, 5]).unwrap();
        let r = otsu_threshold(&h).unwrap();
        assert!(r.threshold >= 2.0 && r.threshold <= 8.0, "{}", r.threshold);
    }

    #[test]
    fn unimodal_histogram_is_low_confidence() {
        let counts: Vec<u64> = (0..256)
            .map(|i| {
                let z = (i as f64 - 127.5) / 30.0;
                (1e5 * (-0.5 * z * z).exp()).round() as u64
            })
            .collect();
        let r = otsu_threshold(&Histogram::from_counts(-30.0, 0.0, counts).unwrap()).unwrap();
        assert!(r.separability() > MIN_BETWEEN_FRACTION);
        assert!(r.class_distance() < MIN_CLASS_DISTANCE);
        assert!(r.low_confidence());
    }

    proptest! {
        #[test]
        fn affine_remap_moves_threshold(counts in prop::collection::vec(0u64..500, 3..80),
                                        a in 0.1f64..10.0, b in -100.0f64..100.0) {
            prop_assume!(counts.iter().filter(|&&c| c > 0).count() >= 2);
            let h = Histogram::from_counts(-30.0, 0.0, counts).unwrap();
            let g = h.remapped(a, b).unwrap();
            let (rh, rg) = (otsu_threshold(&h).unwrap(), otsu_threshold(&g).unwrap());
            if rh.boundary == rg.boundary {
                prop_assert!((rg.threshold - (a * rh.threshold + b)).abs() <= 1e-9 * (1.0 + b.abs() + a * 30.0));
            } else {
                // Only a numerical near-tie may move the choice.
                let (sh, _) = split_moments(&h);
                let (x, y) = (sh[rh.boundary - 1].within, sh[rg.boundary - 1].within);
                prop_assert!((x - y).abs() <= 1e-9 * rh.sigma_total);
            }
        }

        #[test]
        fn decomposition_identity(counts in prop::collection::vec(0u64..1000, 2..64),
                                  lo in -50.0f64..0.0, span in 0.1f64..60.0) {
            prop_assume!(counts.iter().filter(|&&c| c > 0).count() >= 2);
            let h = Histogram::from_counts(lo, lo + span, counts).unwrap();
            let (splits, total) = split_moments(&h);
            for s in splits {
                let sum = s.within + s.between;
                prop_assert!((sum - total).abs() <= 1e-9 * total);
                prop_assert!((s.p_w + s.p_nw - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn histogram_total_equals_valid_count(values in prop::collection::vec(
                prop_oneof![4 => -40.0f64..5.0, 1 => Just(-9999.0)], 2..300)) {
            let g = db(values);
            match build_histogram(&g, 64, None) {
                Ok(h) => prop_assert_eq!(h.total as usize, g.valid_count()),
                Err(_) => prop_assert!(g.valid_values().all(|v| Some(v) == g.valid_values().next())),
            }
        }
    }
}

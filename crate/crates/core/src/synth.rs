//! Synthetic SAR scenes and rainfall stacks with known answers.
//!
//! Random streams come from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. Stream 0 draws the per-pixel speckle (all VV
//! pixels in row-major order, then all VH pixels) or the per-cell daily
//! rainfall noise (days in date order, cells row-major within a day).
//! Stream 1 places scene noise blobs. Gamma variates use `rand_distr::Gamma`
//! (Marsaglia and Tsang).

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::rainfall::{days_in_month, rasterize_polygon, DailyStack};
use crate::raster::{CrsKind, Grid, GridGeo, Polygon, PolygonSet, Scene, Units, DEFAULT_NODATA};

const SPECKLE_STREAM: u64 = 0;
const BLOB_STREAM: u64 = 1;
/// Chebyshev clearance, in cells, between a blob and any water or other blob.
const BLOB_CLEARANCE: usize = 6;
const BLOB_ATTEMPTS: usize = 10_000;

fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSceneSpec {
    pub geo: GridGeo,
    pub water: PolygonSet,
    pub land_db_vv: f64,
    pub water_db_vv: f64,
    pub land_db_vh: f64,
    pub water_db_vh: f64,
    pub looks: f64,
    /// Number of isolated water-valued islands on land.
    pub noise_blobs: usize,
    /// Inclusive pixel-count range of each blob.
    pub blob_pixels: (usize, usize),
    pub seed: u64,
    pub date: NaiveDate,
}

impl SynthSceneSpec {
    /// A square scene holding one irregular water body of roughly
    /// `area_km2`, filling about a third of the grid, with the default
    /// class means (water -20/-26 dB, land -8/-14 dB on VV/VH) and L = 4.4.
    pub fn with_water_body(area_km2: f64, cellsize: f64, seed: u64) -> Result<Self> {
        if !(area_km2 > 0.0 && area_km2.is_finite()) {
            return Err(Error::Param(format!("water area must be positive, got {area_km2}")));
        }
        let area_m2 = area_km2 * 1e6;
        let mut shape_rng = rng(seed, BLOB_STREAM ^ 0x5eed);
        let unit = star_ring(&mut shape_rng, 1.0);
        let unit_area = ring_area(&unit);
        let scale = (area_m2 / unit_area).sqrt();
        let reach = unit.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max) * scale;
        let side_m = (3.0 * area_m2).sqrt().max(2.0 * reach + 4.0 * BLOB_CLEARANCE as f64 * cellsize);
        let n = (side_m / cellsize).ceil() as usize;
        let geo = GridGeo::projected(n, n, cellsize)?;
        let c = n as f64 * cellsize / 2.0;
        let ring = unit.iter().map(|(x, y)| (c + x * scale, c + y * scale)).collect();
        Ok(SynthSceneSpec {
            geo,
            water: PolygonSet::new("synthetic", vec![Polygon::new(ring, vec![])?]),
            land_db_vv: -8.0,
            water_db_vv: -20.0,
            land_db_vh: -14.0,
            water_db_vh: -26.0,
            looks: 4.4,
            noise_blobs: 0,
            blob_pixels: (12, 24),
            seed,
            date: NaiveDate::from_ymd_opt(2022, 1, 1).expect("valid date"),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.geo.crs_kind != CrsKind::ProjectedMeters {
            return Err(Error::Crs("synthetic scenes need a projected metric grid".into()));
        }
        let means = [self.land_db_vv, self.water_db_vv, self.land_db_vh, self.water_db_vh];
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Param("class means must be finite".into()));
        }
        if !(self.water_db_vv < self.land_db_vv && self.water_db_vh < self.land_db_vh) {
            return Err(Error::Param(format!(
                "water must be darker than land in both bands (VV {} vs {}, VH {} vs {})",
                self.water_db_vv, self.land_db_vv, self.water_db_vh, self.land_db_vh
            )));
        }
        if !(self.looks > 0.0 && self.looks.is_finite()) {
            return Err(Error::Param(format!("looks must be positive, got {}", self.looks)));
        }
        let (lo, hi) = self.blob_pixels;
        if self.noise_blobs > 0 && (lo == 0 || lo > hi) {
            return Err(Error::Param(format!("invalid blob size range {lo}..={hi}")));
        }
        Ok(())
    }
}

/// Irregular star-shaped ring around the origin with mean radius `r`.
fn star_ring(rng: &mut ChaCha20Rng, r: f64) -> Vec<(f64, f64)> {
    const VERTICES: usize = 36;
    let lobes = rng.random_range(2..=5) as f64;
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let amp = rng.random_range(0.1..0.3);
    let mut ring: Vec<(f64, f64)> = (0..VERTICES)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / VERTICES as f64;
            let jitter = rng.random_range(-0.05..0.05);
            let rho = r * (1.0 + amp * (lobes * t + phase).sin() + jitter);
            (rho * t.cos(), rho * t.sin())
        })
        .collect();
    ring.push(ring[0]);
    ring
}

fn ring_area(ring: &[(f64, f64)]) -> f64 {
    ring.windows(2)
        .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
        .sum::<f64>()
        .abs()
        / 2.0
}

#[derive(Debug, Clone)]
pub struct SynthScene<T> {
    /// dB backscatter.
    pub scene: Scene<T>,
    /// Rasterized water pixel count × cellsize² / 10⁶.
    pub true_area_km2: f64,
    /// 1 on water, 0 elsewhere.
    pub true_mask: Grid<T>,
    /// Cell indices of each injected blob.
    pub blobs: Vec<Vec<usize>>,
}

/// Class mean in linear power times unit-mean Gamma(L) speckle, per pixel.
pub fn gen_scene<T: Scalar>(spec: &SynthSceneSpec) -> Result<SynthScene<T>> {
    spec.validate()?;
    let geo = spec.geo;
    let true_mask: Grid<T> = rasterize_polygon(&spec.water, &geo);
    let water: Vec<bool> = true_mask.values.iter().map(|v| *v > T::zero()).collect();
    let water_pixels = water.iter().filter(|w| **w).count();
    let true_area_km2 = water_pixels as f64 * geo.cell_area_m2()? / 1e6;

    let blobs = place_blobs(spec, &water)?;
    let mut blob_cell = vec![false; geo.len()];
    for &i in blobs.iter().flatten() {
        blob_cell[i] = true;
    }

    let gamma = Gamma::new(spec.looks, 1.0 / spec.looks)
        .map_err(|e| Error::Param(format!("speckle distribution: {e}")))?;
    let mut speckle = rng(spec.seed, SPECKLE_STREAM);
    let mut band = |land_db: f64, water_db: f64| -> Result<Grid<T>> {
        let (land, wat) = (db_to_lin(land_db), db_to_lin(water_db));
        let values = (0..geo.len())
            .map(|i| {
                let u: f64 = gamma.sample(&mut speckle);
                let mean = if water[i] || blob_cell[i] { wat } else { land };
                T::lit(10.0 * (mean * u).log10())
            })
            .collect();
        Grid::new(geo, values, T::lit(DEFAULT_NODATA), Units::Decibel)
    };
    let vv = band(spec.land_db_vv, spec.water_db_vv)?;
    let vh = band(spec.land_db_vh, spec.water_db_vh)?;
    Ok(SynthScene {
        scene: Scene::new(vv, vh, spec.date, spec.water.id.clone())?,
        true_area_km2,
        true_mask,
        blobs,
    })
}

/// Compact blobs grown from random land centers, each clear of water and
/// of every other blob by `BLOB_CLEARANCE` cells.
fn place_blobs(spec: &SynthSceneSpec, water: &[bool]) -> Result<Vec<Vec<usize>>> {
    if spec.noise_blobs == 0 {
        return Ok(Vec::new());
    }
    let geo = spec.geo;
    let (nr, nc) = (geo.nrows, geo.ncols);
    let (lo, hi) = spec.blob_pixels;
    // Blobs grow within a square of this radius around their seed cell.
    let radius = (hi as f64).sqrt().ceil() as usize;
    let reach = radius + BLOB_CLEARANCE;
    if nr <= 2 * reach || nc <= 2 * reach {
        return Err(Error::Param("grid too small for noise blobs".into()));
    }
    let mut r = rng(spec.seed, BLOB_STREAM);
    let mut blocked = water.to_vec();
    let mut blobs = Vec::with_capacity(spec.noise_blobs);
    let mut attempts = 0;
    while blobs.len() < spec.noise_blobs {
        attempts += 1;
        if attempts > BLOB_ATTEMPTS {
            return Err(Error::Param(format!(
                "could only place {} of {} noise blobs",
                blobs.len(),
                spec.noise_blobs
            )));
        }
        let size = r.random_range(lo..=hi);
        let row = r.random_range(reach..nr - reach);
        let col = r.random_range(reach..nc - reach);
        let clear = |row: usize, col: usize, blocked: &[bool]| {
            (row - BLOB_CLEARANCE..=row + BLOB_CLEARANCE).all(|rr| {
                (col - BLOB_CLEARANCE..=col + BLOB_CLEARANCE).all(|cc| !blocked[rr * nc + cc])
            })
        };
        let mut cells = vec![(row, col)];
        let mut grown = true;
        while cells.len() < size && grown {
            grown = false;
            for _ in 0..64 {
                let (br, bc) = cells[r.random_range(0..cells.len())];
                let (dr, dc) = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)][r.random_range(0..4)];
                let cand = ((br as i64 + dr) as usize, (bc as i64 + dc) as usize);
                if !cells.contains(&cand) && cand.0.abs_diff(row) <= radius && cand.1.abs_diff(col) <= radius {
                    cells.push(cand);
                    grown = true;
                    break;
                }
            }
        }
        if cells.len() < size || !cells.iter().all(|&(rr, cc)| clear(rr, cc, &blocked)) {
            continue;
        }
        for &(rr, cc) in &cells {
            blocked[rr * nc + cc] = true;
        }
        let mut idx: Vec<usize> = cells.iter().map(|&(rr, cc)| rr * nc + cc).collect();
        idx.sort_unstable();
        blobs.push(idx);
    }
    Ok(blobs)
}

/// Daily rainfall on `geo` for every date in `[start, end]`.
///
/// A cell's value on a day of month m is `pattern[m] / days_in_month`,
/// multiplied by unit-mean Gamma(`noise_shape`) noise when a shape is
/// given, so each monthly total has expectation `pattern[m]`.
pub fn gen_rain_stack<T: Scalar>(
    geo: GridGeo,
    start: NaiveDate,
    end: NaiveDate,
    pattern: &[f64; 12],
    noise_shape: Option<f64>,
    seed: u64,
) -> Result<DailyStack<T>> {
    if let Some((m, p)) = pattern.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::Param(format!(
            "monthly pattern must be non-negative, month {} is {p}",
            m + 1
        )));
    }
    if end < start {
        return Err(Error::Param(format!("end {end} precedes start {start}")));
    }
    let gamma = match noise_shape {
        Some(k) => Some(
            Gamma::new(k, 1.0 / k).map_err(|e| Error::Param(format!("rain noise shape {k}: {e}")))?,
        ),
        None => None,
    };
    let mut r = rng(seed, SPECKLE_STREAM);
    let layers = start
        .iter_days()
        .take_while(|d| *d <= end)
        .map(|d| {
            let mean = pattern[d.month0() as usize] / days_in_month(d.year(), d.month()) as f64;
            let values = (0..geo.len())
                .map(|_| {
                    let v = match &gamma {
                        Some(g) => mean * g.sample(&mut r),
                        None => mean,
                    };
                    T::lit(v)
                })
                .collect();
            Grid::new(geo, values, T::lit(DEFAULT_NODATA), Units::MillimetersPerDay).map(|g| (d, g))
        })
        .collect::<Result<Vec<_>>>()?;
    DailyStack::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainfall::monthly_total;

    fn small_spec(seed: u64) -> SynthSceneSpec {
        SynthSceneSpec::with_water_body(0.25, 10.0, seed).unwrap()
    }

    fn rain_geo(n: usize) -> GridGeo {
        GridGeo::new(n, n, 105.0, 20.0, 0.05, CrsKind::Geographic).unwrap()
    }

    #[test]
    fn repeat_is_bit_identical() {
        let a = gen_scene::<f64>(&small_spec(42)).unwrap();
        let b = gen_scene::<f64>(&small_spec(42)).unwrap();
        assert_eq!(a.scene, b.scene);
        let c = gen_scene::<f64>(&small_spec(43)).unwrap();
        assert_ne!(a.scene.vv.values, c.scene.vv.values);
    }

    #[test]
    fn true_area_is_rasterized_count() {
        let s = gen_scene::<f64>(&small_spec(1)).unwrap();
        let count = s.true_mask.values.iter().filter(|v| **v == 1.0).count();
        assert_eq!(s.true_area_km2, count as f64 * 100.0 / 1e6);
        assert!((s.true_area_km2 - 0.25).abs() < 0.02, "{}", s.true_area_km2);
        let water = s.true_mask.values.iter().filter(|v| **v > 0.0).count() as f64;
        let frac = water / s.true_mask.values.len() as f64;
        assert!(frac > 0.2 && frac < 0.4, "water fraction {frac}");
    }

    #[test]
    fn huge_looks_recovers_mask_at_midpoint() {
        let mut spec = small_spec(5);
        spec.looks = 1e6;
        let s = gen_scene::<f64>(&spec).unwrap();
        let mid = (spec.land_db_vv + spec.water_db_vv) / 2.0;
        for (v, m) in s.scene.vv.values.iter().zip(&s.true_mask.values) {
            assert_eq!(*v < mid, *m == 1.0);
        }
    }

    #[test]
    fn water_sample_mean_matches_class_mean() {
        let s = gen_scene::<f64>(&SynthSceneSpec::with_water_body(2.0, 10.0, 9).unwrap()).unwrap();
        let water: Vec<f64> = s
            .scene
            .vv
            .values
            .iter()
            .zip(&s.true_mask.values)
            .filter(|(_, m)| **m == 1.0)
            .map(|(v, _)| 10f64.powf(v / 10.0))
            .collect();
        assert!(water.len() >= 10_000);
        let mean = water.iter().sum::<f64>() / water.len() as f64;
        let expected = db_to_lin(-20.0);
        assert!((mean / expected - 1.0).abs() < 0.02, "{mean} vs {expected}");
    }

    #[test]
    fn blobs_only_touch_blob_pixels() {
        let base = small_spec(11);
        let mut noisy = base.clone();
        noisy.noise_blobs = 5;
        let a = gen_scene::<f64>(&base).unwrap();
        let b = gen_scene::<f64>(&noisy).unwrap();
        assert_eq!(b.blobs.len(), 5);
        let cells: Vec<usize> = b.blobs.iter().flatten().copied().collect();
        for (i, (x, y)) in a.scene.vv.values.iter().zip(&b.scene.vv.values).enumerate() {
            assert_eq!(x == y, !cells.contains(&i), "cell {i}");
        }
        for blob in &b.blobs {
            assert!((12..=24).contains(&blob.len()));
            assert!(blob.iter().all(|&i| a.true_mask.values[i] == 0.0));
        }
    }

    #[test]
    fn zero_contrast_rejected() {
        let mut spec = small_spec(0);
        spec.water_db_vh = spec.land_db_vh;
        assert!(matches!(gen_scene::<f64>(&spec), Err(Error::Param(_))));
    }

    #[test]
    fn speckle_has_unit_mean() {
        let mut spec = small_spec(3);
        spec.water = PolygonSet::new("none", vec![]);
        let s = gen_scene::<f64>(&spec).unwrap();
        let n = s.scene.vv.values.len() as f64;
        let mean = s.scene.vv.values.iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / n
            / db_to_lin(spec.land_db_vv);
        assert!((mean - 1.0).abs() < 3.0 / (spec.looks * n).sqrt(), "{mean}");
    }

    #[test]
    fn zero_pattern_gives_zero_stack() {
        let d = |m, day| NaiveDate::from_ymd_opt(2020, m, day).unwrap();
        let s = gen_rain_stack::<f64>(rain_geo(3), d(1, 1), d(3, 31), &[0.0; 12], Some(0.7), 1).unwrap();
        assert_eq!(s.len(), 91);
        assert!(s.layers.iter().all(|l| l.values.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn noiseless_constant_pattern() {
        let d = |m, day| NaiveDate::from_ymd_opt(2021, m, day).unwrap();
        let s = gen_rain_stack::<f64>(rain_geo(2), d(1, 1), d(12, 31), &[30.0; 12], None, 0).unwrap();
        for (date, l) in s.dates.iter().zip(&s.layers) {
            let expected = 30.0 / days_in_month(date.year(), date.month()) as f64;
            assert!(l.values.iter().all(|v| *v == expected));
        }
    }

    #[test]
    fn june_totals_converge_to_pattern() {
        let mut pattern = [50.0; 12];
        pattern[5] = 240.0;
        let start = NaiveDate::from_ymd_opt(1981, 6, 1).unwrap();
        let end = NaiveDate::from_ymd_opt(2020, 6, 30).unwrap();
        let geo = rain_geo(4);
        let s = gen_rain_stack::<f64>(geo, start, end, &pattern, Some(0.5), 7).unwrap();
        let mut sum = 0.0;
        for y in 1981..=2020 {
            let t = monthly_total(&s, y, 6).unwrap();
            sum += t.raster.values.iter().sum::<f64>() / geo.len() as f64;
        }
        let mean = sum / 40.0;
        assert!((mean / 240.0 - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn negative_pattern_rejected() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let mut p = [1.0; 12];
        p[3] = -1.0;
        assert!(matches!(
            gen_rain_stack::<f64>(rain_geo(2), d, d, &p, None, 0),
            Err(Error::Param(_))
        ));
    }
}

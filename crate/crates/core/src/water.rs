//! From thresholds to a cleaned water mask and its area.

use std::fmt::Write as _;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::{db_to_linear, linear_to_db, Grid, GridGeo, Scene, Units};
use crate::speckle::{refined_lee, SpeckleParams};
use crate::threshold::{scene_thresholds, OtsuResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combine {
    #[default]
    And,
    Or,
    VvOnly,
    VhOnly,
}

impl Combine {
    fn uses_vv(self) -> bool {
        !matches!(self, Combine::VhOnly)
    }

    fn uses_vh(self) -> bool {
        !matches!(self, Combine::VvOnly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskParams {
    pub combine: Combine,
    /// Components smaller than this many pixels are discarded.
    pub min_pixels: usize,
    pub connectivity: Connectivity,
}

impl Default for MaskParams {
    fn default() -> Self {
        MaskParams {
            combine: Combine::And,
            min_pixels: 25,
            connectivity: Connectivity::Eight,
        }
    }
}

impl MaskParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_pixels == 0 {
            return Err(Error::Param("min_pixels must be at least 1".into()));
        }
        Ok(())
    }
}

/// One pipeline output row.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterExtentRecord {
    pub reservoir_id: String,
    pub date: NaiveDate,
    pub area_km2: f64,
    pub t_vv: f64,
    pub t_vh: f64,
    pub water_pixels: usize,
    pub removed_components: usize,
    pub low_confidence: bool,
}

impl WaterExtentRecord {
    pub const CSV_HEADER: &'static str =
        "reservoir_id,date,area_km2,t_vv,t_vh,water_pixels,removed_components,low_confidence";

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{}",
            self.reservoir_id,
            self.date.format("%Y-%m-%d"),
            self.area_km2,
            self.t_vv,
            self.t_vh,
            self.water_pixels,
            self.removed_components,
            self.low_confidence
        );
        s
    }
}

/// Binary water/land classification: 1 where the combine rule holds
/// (strictly below threshold), 0 otherwise, nodata where a used band is
/// nodata.
pub fn classify_water<T: Scalar>(s: &Scene<T>, t_vv: T, t_vh: T, combine: Combine) -> Grid<T> {
    let nodata = s.vv.nodata;
    let values = s
        .vv
        .values
        .iter()
        .zip(&s.vh.values)
        .map(|(&vv, &vh)| {
            let vv_ok = s.vv.is_valid(vv);
            let vh_ok = s.vh.is_valid(vh);
            if (combine.uses_vv() && !vv_ok) || (combine.uses_vh() && !vh_ok) {
                return nodata;
            }
            let water = match combine {
                Combine::And => vv < t_vv && vh < t_vh,
                Combine::Or => vv < t_vv || vh < t_vh,
                Combine::VvOnly => vv < t_vv,
                Combine::VhOnly => vh < t_vh,
            };
            if water {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    Grid {
        geo: s.vv.geo,
        values,
        nodata,
        units: Units::Label,
    }
}

/// Labeled components of a binary mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Components<T> {
    /// 0 for background, `1..=K` for components, nodata passed through.
    pub labels: Grid<T>,
    /// `sizes[k - 1]` is the pixel count of label `k`.
    pub sizes: Vec<usize>,
}

impl<T> Components<T> {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass union-find labeling. Labels are dense and numbered in row-major
/// order of each component's first pixel.
pub fn connected_components<T: Scalar>(mask: &Grid<T>, connectivity: Connectivity) -> Components<T> {
    const NONE: u32 = u32::MAX;
    let (nrows, ncols) = (mask.nrows(), mask.ncols());
    let fg = |i: usize| mask.is_valid_at(i) && mask.values[i] == T::one();
    let mut provisional = vec![NONE; mask.values.len()];
    let mut uf = UnionFind::new();

    for r in 0..nrows {
        for c in 0..ncols {
            let i = r * ncols + c;
            if !fg(i) {
                continue;
            }
            let mut neighbors = [NONE; 4];
            if c > 0 {
                neighbors[0] = provisional[i - 1];
            }
            if r > 0 {
                neighbors[1] = provisional[i - ncols];
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        neighbors[2] = provisional[i - ncols - 1];
                    }
                    if c + 1 < ncols {
                        neighbors[3] = provisional[i - ncols + 1];
                    }
                }
            }
            let mut label = NONE;
            for &n in neighbors.iter().filter(|&&n| n != NONE) {
                label = if label == NONE { n } else { uf.union(label, n) };
            }
            provisional[i] = if label == NONE { uf.make() } else { label };
        }
    }

    let mut final_of = vec![0u32; uf.parent.len()];
    let mut sizes = Vec::new();
    let values = provisional
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if p == NONE {
                return if mask.is_valid_at(i) { T::zero() } else { mask.nodata };
            }
            let root = uf.find(p) as usize;
            if final_of[root] == 0 {
                sizes.push(0);
                final_of[root] = sizes.len() as u32;
            }
            let k = final_of[root] as usize;
            sizes[k - 1] += 1;
            T::from_count(k)
        })
        .collect();

    Components {
        labels: Grid {
            geo: mask.geo,
            values,
            nodata: mask.nodata,
            units: Units::Label,
        },
        sizes,
    }
}

/// Drops components smaller than `min_pixels`. Returns the cleaned binary
/// mask and the number of components removed.
pub fn filter_small_components<T: Scalar>(
    components: &Components<T>,
    min_pixels: usize,
) -> (Grid<T>, usize) {
    let labels = &components.labels;
    let keep: Vec<bool> = components.sizes.iter().map(|&s| s >= min_pixels).collect();
    let removed = keep.iter().filter(|&&k| !k).count();
    let values = labels
        .values
        .iter()
        .map(|&v| {
            if !labels.is_valid(v) {
                v
            } else if v > T::zero() {
                let k = v.to_usize().expect("label is a positive integer");
                if keep[k - 1] {
                    T::one()
                } else {
                    T::zero()
                }
            } else {
                T::zero()
            }
        })
        .collect();
    (
        Grid {
            geo: labels.geo,
            values,
            nodata: labels.nodata,
            units: Units::Label,
        },
        removed,
    )
}

pub fn count_water<T: Scalar>(mask: &Grid<T>) -> usize {
    mask.valid_values().filter(|&v| v == T::one()).count()
}

/// Water area in km²; refuses geographic grids.
pub fn compute_area<T: Scalar>(mask: &Grid<T>, geo: &GridGeo) -> Result<f64> {
    let cell = geo.cell_area_m2()?;
    Ok(area_from_pixels(count_water(mask), cell))
}

fn area_from_pixels(pixels: usize, cell_area_m2: f64) -> f64 {
    pixels as f64 * cell_area_m2 / 1e6
}

/// A despeckled dB scene with its per-band Otsu results, ready to classify.
#[derive(Debug, Clone)]
pub struct PreparedScene<T> {
    pub filtered: Scene<T>,
    pub vv: OtsuResult<T>,
    pub vh: OtsuResult<T>,
}

impl<T: Scalar> PreparedScene<T> {
    /// Low confidence in any band the combine rule uses.
    pub fn low_confidence(&self, combine: Combine) -> bool {
        (combine.uses_vv() && self.vv.low_confidence())
            || (combine.uses_vh() && self.vh.low_confidence())
    }
}

#[derive(Debug, Clone)]
pub struct SceneOutput<T> {
    pub record: WaterExtentRecord,
    pub mask: Grid<T>,
}

fn annotate<T>(s: &Scene<T>) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::Scene {
        reservoir_id: s.reservoir_id.clone(),
        date: s.date,
        source: Box::new(e),
    }
}

/// Despeckle in linear power, convert to dB and compute both Otsu
/// thresholds.
pub fn prepare_scene<T: Scalar>(
    s: &Scene<T>,
    sp: &SpeckleParams,
    nbins: usize,
) -> Result<PreparedScene<T>> {
    let run = || -> Result<PreparedScene<T>> {
        let (vv, vh) = match s.units() {
            Units::LinearPower => (s.vv.clone(), s.vh.clone()),
            Units::Decibel => (db_to_linear(&s.vv)?, db_to_linear(&s.vh)?),
            other => {
                return Err(Error::Units {
                    expected: "dB or linear power".into(),
                    found: other.to_string(),
                })
            }
        };
        let vv = linear_to_db(&refined_lee(&vv, sp)?)?;
        let vh = linear_to_db(&refined_lee(&vh, sp)?)?;
        let filtered = Scene::new(vv, vh, s.date, s.reservoir_id.clone())?;
        let (tvv, tvh) = scene_thresholds(&filtered, nbins)?;
        Ok(PreparedScene {
            filtered,
            vv: tvv,
            vh: tvh,
        })
    };
    run().map_err(annotate(s))
}

/// Classify with the given thresholds, label, drop small components and
/// measure the area.
pub fn finish_scene<T: Scalar>(
    prepared: &PreparedScene<T>,
    t_vv: T,
    t_vh: T,
    low_confidence: bool,
    mp: &MaskParams,
) -> Result<SceneOutput<T>> {
    let s = &prepared.filtered;
    let run = || -> Result<SceneOutput<T>> {
        mp.validate()?;
        let raw = classify_water(s, t_vv, t_vh, mp.combine);
        let components = connected_components(&raw, mp.connectivity);
        let (mask, removed) = filter_small_components(&components, mp.min_pixels);
        let water_pixels = count_water(&mask);
        let area_km2 = area_from_pixels(water_pixels, s.geo().cell_area_m2()?);
        Ok(SceneOutput {
            record: WaterExtentRecord {
                reservoir_id: s.reservoir_id.clone(),
                date: s.date,
                area_km2,
                t_vv: t_vv.as_f64(),
                t_vh: t_vh.as_f64(),
                water_pixels,
                removed_components: removed,
                low_confidence,
            },
            mask,
        })
    };
    run().map_err(annotate(s))
}

/// The full per-scene chain: despeckle → dB → Otsu per band → classify →
/// label → size filter → area.
pub fn process_scene<T: Scalar>(
    s: &Scene<T>,
    sp: &SpeckleParams,
    mp: &MaskParams,
    nbins: usize,
) -> Result<SceneOutput<T>> {
    let prepared = prepare_scene(s, sp, nbins)?;
    let low = prepared.low_confidence(mp.combine);
    finish_scene(
        &prepared,
        prepared.vv.threshold,
        prepared.vh.threshold,
        low,
        mp,
    )
}

//! Refined Lee speckle filter for intensity (linear power) SAR images.
//!
//! Each pixel's window is split into a 3×3 grid of overlapping sub-blocks.
//! The axis with the largest absolute difference between opposing
//! sub-block means is taken as the edge normal, and of its two directions
//! the one whose sub-block mean is closer to the central sub-block is the
//! side the pixel lies on. Local statistics are then taken over the half of
//! the window on that side (center row, column or diagonal included) and
//! the pixel is replaced by the Lee MMSE estimate `m + k·(x − m)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::{Grid, Units};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleParams {
    /// Odd window side, at least 5.
    pub window: usize,
    /// Equivalent number of looks.
    pub looks: f64,
    /// Minimum valid pixels in the directional window; below this the
    /// pixel is left unfiltered.
    pub min_valid: usize,
}

impl Default for SpeckleParams {
    fn default() -> Self {
        SpeckleParams {
            window: 7,
            looks: 4.4,
            min_valid: 9,
        }
    }
}

impl SpeckleParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 5 || self.window.is_multiple_of(2) {
            return Err(Error::Param(format!(
                "speckle window must be odd and at least 5, got {}",
                self.window
            )));
        }
        if !(self.looks > 0.0 && self.looks.is_finite()) {
            return Err(Error::Param(format!(
                "equivalent number of looks must be positive, got {}",
                self.looks
            )));
        }
        if self.min_valid == 0 {
            return Err(Error::Param("min_valid must be at least 1".into()));
        }
        Ok(())
    }

    /// Side of each of the 3×3 sub-blocks: the odd size `2·⌊(w−1)/4⌋+1`,
    /// i.e. 3 for 5×5 and 7×7 windows, 5 for 9×9 and 11×11.
    pub fn sub_block(&self) -> usize {
        2 * ((self.window - 1) / 4) + 1
    }
}

/// Edge-side directions, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    /// Whether window offset `(dr, dc)` (rows down, columns right) lies in
    /// this direction's half-window.
    #[inline]
    fn contains(self, dr: isize, dc: isize) -> bool {
        match self {
            Direction::N => dr <= 0,
            Direction::S => dr >= 0,
            Direction::E => dc >= 0,
            Direction::W => dc <= 0,
            Direction::NE => dc - dr >= 0,
            Direction::SW => dc - dr <= 0,
            Direction::SE => dr + dc >= 0,
            Direction::NW => dr + dc <= 0,
        }
    }
}

type Block = (usize, usize);

// (direction, its three sub-blocks, opposite direction, its three
// sub-blocks); blocks are (row, col) in the 3×3 sub-block grid.
const AXES: [(Direction, [Block; 3], Direction, [Block; 3]); 4] = [
    (Direction::N, [(0, 0), (0, 1), (0, 2)], Direction::S, [(2, 0), (2, 1), (2, 2)]),
    (Direction::NE, [(0, 1), (0, 2), (1, 2)], Direction::SW, [(1, 0), (2, 0), (2, 1)]),
    (Direction::E, [(0, 2), (1, 2), (2, 2)], Direction::W, [(0, 0), (1, 0), (2, 0)]),
    (Direction::SE, [(1, 2), (2, 2), (2, 1)], Direction::NW, [(0, 0), (0, 1), (1, 0)]),
];

pub fn refined_lee<T: Scalar>(r: &Grid<T>, p: &SpeckleParams) -> Result<Grid<T>> {
    p.validate()?;
    r.require_units(Units::LinearPower)?;
    let ncols = r.ncols();
    let mut out = vec![T::zero(); r.values.len()];
    out.par_chunks_mut(ncols)
        .enumerate()
        .for_each(|(row, dst)| {
            for (col, px) in dst.iter_mut().enumerate() {
                *px = filter_pixel(r, p, row, col);
            }
        });
    Ok(Grid {
        geo: r.geo,
        values: out,
        nodata: r.nodata,
        units: Units::LinearPower,
    })
}

/// Half-window direction for the pixel at `(row, col)`.
///
/// The edge axis maximizes the difference between the summed sub-means on
/// its two sides; the half-window is the side whose sub-means average
/// closer to the center sub-mean. Ties go to the earlier axis and to the
/// side listed first (N, NE, E, SE).
pub fn edge_direction<T: Scalar>(
    r: &Grid<T>,
    p: &SpeckleParams,
    row: usize,
    col: usize,
) -> Direction {
    let means = sub_block_means(r, p, row, col);
    let center = means[1][1].unwrap_or_else(|| r.get(row, col));
    // Blocks outside the raster or without valid pixels stand in as the
    // center mean, so they add no gradient.
    let side_sum = |blocks: &[Block; 3]| -> T {
        blocks.iter().map(|&(i, j)| means[i][j].unwrap_or(center)).sum()
    };
    let side_present = |blocks: &[Block; 3]| blocks.iter().any(|&(i, j)| means[i][j].is_some());

    let mut axis = 0;
    let mut best = T::neg_infinity();
    for (i, (_, a, _, b)) in AXES.iter().enumerate() {
        let g = (side_sum(a) - side_sum(b)).abs();
        if g > best {
            best = g;
            axis = i;
        }
    }
    let (first, a, second, b) = AXES[axis];
    match (side_present(&a), side_present(&b)) {
        (true, false) => first,
        (false, true) => second,
        _ => {
            let three = T::lit(3.0);
            let da = (side_sum(&a) / three - center).abs();
            let db = (side_sum(&b) / three - center).abs();
            if da <= db {
                first
            } else {
                second
            }
        }
    }
}

fn sub_block_means<T: Scalar>(
    r: &Grid<T>,
    p: &SpeckleParams,
    row: usize,
    col: usize,
) -> [[Option<T>; 3]; 3] {
    let half = (p.window / 2) as isize;
    let s = p.sub_block() as isize;
    let starts = [0, (p.window as isize - s) / 2, p.window as isize - s];
    let (nrows, ncols) = (r.nrows() as isize, r.ncols() as isize);
    let mut means = [[None; 3]; 3];
    for (bi, &sr) in starts.iter().enumerate() {
        for (bj, &sc) in starts.iter().enumerate() {
            let mut sum = T::zero();
            let mut n = 0usize;
            for dr in sr..sr + s {
                let rr = row as isize - half + dr;
                if rr < 0 || rr >= nrows {
                    continue;
                }
                for dc in sc..sc + s {
                    let cc = col as isize - half + dc;
                    if cc < 0 || cc >= ncols {
                        continue;
                    }
                    let v = r.values[rr as usize * ncols as usize + cc as usize];
                    if r.is_valid(v) {
                        sum = sum + v;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                means[bi][bj] = Some(sum / T::from_count(n));
            }
        }
    }
    means
}

fn filter_pixel<T: Scalar>(r: &Grid<T>, p: &SpeckleParams, row: usize, col: usize) -> T {
    let x = r.get(row, col);
    if !r.is_valid(x) {
        return x;
    }
    let dir = edge_direction(r, p, row, col);

    let half = (p.window / 2) as isize;
    let (nrows, ncols) = (r.nrows() as isize, r.ncols() as isize);
    let mut sum = T::zero();
    let mut n = 0usize;
    let mut lo = x;
    let mut hi = x;
    let in_window = |f: &mut dyn FnMut(T)| {
        for dr in -half..=half {
            let rr = row as isize + dr;
            if rr < 0 || rr >= nrows {
                continue;
            }
            for dc in -half..=half {
                let cc = col as isize + dc;
                if cc < 0 || cc >= ncols || !dir.contains(dr, dc) {
                    continue;
                }
                let v = r.values[rr as usize * ncols as usize + cc as usize];
                if r.is_valid(v) {
                    f(v);
                }
            }
        }
    };
    in_window(&mut |v| {
        sum = sum + v;
        n += 1;
        lo = lo.min(v);
        hi = hi.max(v);
    });
    if n < p.min_valid {
        return x;
    }
    if lo == hi {
        return x;
    }
    let m = sum / T::from_count(n);
    let mut ss = T::zero();
    in_window(&mut |v| ss = ss + (v - m) * (v - m));
    let var = ss / T::from_count(n);
    if var <= T::zero() {
        return m;
    }

    let noise_var = T::lit(1.0 / p.looks);
    let k = ((var - m * m * noise_var) / (var * (T::one() + noise_var)))
        .max(T::zero())
        .min(T::one());
    (m + k * (x - m)).max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GridGeo;

    fn linear(ncols: usize, nrows: usize, values: Vec<f64>) -> Grid<f64> {
        let geo = GridGeo::projected(ncols, nrows, 10.0).unwrap();
        Grid::new(geo, values, -9999.0, Units::LinearPower).unwrap()
    }

    #[test]
    fn param_validation() {
        let bad = SpeckleParams {
            window: 6,
            ..Default::default()
        };
        let g = linear(3, 3, vec![1.0; 9]);
        assert!(matches!(refined_lee(&g, &bad), Err(Error::Param(_))));
        let bad = SpeckleParams {
            window: 3,
            ..Default::default()
        };
        assert!(matches!(refined_lee(&g, &bad), Err(Error::Param(_))));
        let bad = SpeckleParams {
            looks: 0.0,
            ..Default::default()
        };
        assert!(matches!(refined_lee(&g, &bad), Err(Error::Param(_))));
    }

    #[test]
    fn rejects_decibels() {
        let g = linear(3, 3, vec![1.0; 9]).with_units(Units::Decibel);
        assert!(matches!(
            refined_lee(&g, &SpeckleParams::default()),
            Err(Error::Units { .. })
        ));
    }

    #[test]
    fn constant_field_is_fixed_point() {
        for c in [5.0, 0.1, 1e-7, 3.3333] {
            let g = linear(20, 15, vec![c; 300]);
            let out = refined_lee(&g, &SpeckleParams::default()).unwrap();
            assert!(out.values.iter().all(|&v| v == c));
        }
    }

    #[test]
    fn isolated_pixel_passes_through() {
        let mut values = vec![-9999.0; 81];
        values[40] = 0.37;
        let g = linear(9, 9, values);
        let out = refined_lee(&g, &SpeckleParams::default()).unwrap();
        assert_eq!(out.values, g.values);
    }

    #[test]
    fn sub_block_sizes() {
        let size = |w| {
            SpeckleParams {
                window: w,
                ..Default::default()
            }
            .sub_block()
        };
        assert_eq!((size(5), size(7), size(9), size(11)), (3, 3, 5, 5));
    }

    #[test]
    fn direction_follows_horizontal_edge() {
        // Top rows bright, bottom rows dark; the pixel just above the edge
        // belongs to the north side, the one below to the south side.
        let mut values = vec![1.0; 81];
        for v in &mut values[5 * 9..] {
            *v = 0.01;
        }
        let g = linear(9, 9, values);
        let p = SpeckleParams::default();
        assert_eq!(edge_direction(&g, &p, 4, 4), Direction::N);
        assert_eq!(edge_direction(&g, &p, 5, 4), Direction::S);
    }

    #[test]
    fn direction_follows_vertical_and_diagonal_edges() {
        let p = SpeckleParams::default();
        let mut values = vec![1.0; 81];
        for r in 0..9 {
            for c in 5..9 {
                values[r * 9 + c] = 0.01;
            }
        }
        let g = linear(9, 9, values);
        assert_eq!(edge_direction(&g, &p, 4, 4), Direction::W);
        assert_eq!(edge_direction(&g, &p, 4, 5), Direction::E);

        // Dark below the anti-diagonal r + c > 8.
        let values = (0..81)
            .map(|i| if i / 9 + i % 9 > 8 { 0.01 } else { 1.0 })
            .collect();
        let g = linear(9, 9, values);
        assert_eq!(edge_direction(&g, &p, 4, 4), Direction::NW);
        assert_eq!(edge_direction(&g, &p, 5, 5), Direction::SE);
    }

    #[test]
    fn half_windows_have_equal_size() {
        let all = [
            Direction::N,
            Direction::NE,
            Direction::E,
            Direction::SE,
            Direction::S,
            Direction::SW,
            Direction::W,
            Direction::NW,
        ];
        for d in all {
            let n = (-3..=3isize)
                .flat_map(|dr| (-3..=3isize).map(move |dc| (dr, dc)))
                .filter(|&(dr, dc)| d.contains(dr, dc))
                .count();
            assert_eq!(n, 28, "{d:?}");
        }
    }

    #[test]
    fn edge_is_not_blurred() {
        let mut values = vec![1.0; 400];
        for r in 0..20 {
            for c in 10..20 {
                values[r * 20 + c] = 0.01;
            }
        }
        let g = linear(20, 20, values);
        let out = refined_lee(&g, &SpeckleParams::default()).unwrap();
        assert_eq!(out.values, g.values);
    }

    #[test]
    fn locality_radius() {
        let base: Vec<f64> = (0..625).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 50.0).collect();
        let p = SpeckleParams::default();
        let a = refined_lee(&linear(25, 25, base.clone()), &p).unwrap();
        let mut changed = base;
        changed[12 * 25 + 12] = 40.0;
        let b = refined_lee(&linear(25, 25, changed), &p).unwrap();
        for r in 0..25usize {
            for c in 0..25usize {
                if r.abs_diff(12) > 3 || c.abs_diff(12) > 3 {
                    assert_eq!(a.get(r, c), b.get(r, c), "({r},{c})");
                }
            }
        }
    }

    #[test]
    fn works_for_f32() {
        let geo = GridGeo::projected(10, 10, 10.0).unwrap();
        let g = Grid::new(geo, vec![2.5f32; 100], -9999.0, Units::LinearPower).unwrap();
        let out = refined_lee(&g, &SpeckleParams::default()).unwrap();
        assert!(out.values.iter().all(|&v| v == 2.5));
    }
}

//! Polygon-to-grid masks by scanline, sampling at cell centers.
//!
//! A cell belongs to a polygon when its center is inside under the
//! even-odd rule over the polygon's rings. Edges are half-open: a center
//! exactly on a left or bottom edge is inside, on a right or top edge it is
//! outside, so polygons that share an edge never both claim a cell.

use crate::num::Scalar;
use crate::raster::{Grid, GridGeo, Polygon, PolygonSet, Units};

/// x where the edge crosses the horizontal line `y`, if it does under the
/// half-open rule `min(y0, y1) <= y < max(y0, y1)`.
#[inline]
fn crossing(a: (f64, f64), b: (f64, f64), y: f64) -> Option<f64> {
    if (a.1 > y) != (b.1 > y) {
        Some(a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1))
    } else {
        None
    }
}

fn polygon_crossings(p: &Polygon, y: f64, xs: &mut Vec<f64>) {
    xs.clear();
    for ring in p.rings() {
        xs.extend(ring.windows(2).filter_map(|w| crossing(w[0], w[1], y)));
    }
    xs.sort_by(f64::total_cmp);
}

/// Even-odd test of a single point against every polygon of the set.
pub fn point_in_polygon_set(set: &PolygonSet, x: f64, y: f64) -> bool {
    set.polygons.iter().any(|p| {
        p.rings()
            .flat_map(|r| r.windows(2))
            .filter(|w| crossing(w[0], w[1], y).is_some_and(|xi| x < xi))
            .count()
            % 2
            == 1
    })
}

pub fn rasterize_polygon<T: Scalar>(poly: &PolygonSet, geo: &GridGeo) -> Grid<T> {
    let mut values = vec![T::zero(); geo.len()];
    let mut xs = Vec::new();
    let mut inside = 0usize;
    for row in 0..geo.nrows {
        let y = geo.cell_center_y(row);
        for p in &poly.polygons {
            polygon_crossings(p, y, &mut xs);
            for pair in xs.chunks_exact(2) {
                let (start, end) = (first_col_at_or_after(geo, pair[0]), first_col_at_or_after(geo, pair[1]));
                for col in start..end {
                    let v = &mut values[geo.index(row, col)];
                    if *v == T::zero() {
                        *v = T::one();
                        inside += 1;
                    }
                }
            }
        }
    }
    if inside == 0 {
        log::warn!("polygon {:?} covers no cell centers of the grid", poly.id);
    }
    Grid {
        geo: *geo,
        values,
        nodata: T::lit(crate::raster::DEFAULT_NODATA),
        units: Units::Label,
    }
}

/// Smallest column whose center x is `>= x`, or `ncols`.
fn first_col_at_or_after(geo: &GridGeo, x: f64) -> usize {
    let guess = ((x - geo.x_origin) / geo.cellsize - 0.5).ceil();
    let mut c = if guess <= 0.0 {
        0
    } else {
        (guess as usize).min(geo.ncols)
    };
    while c > 0 && geo.cell_center_x(c - 1) >= x {
        c -= 1;
    }
    while c < geo.ncols && geo.cell_center_x(c) < x {
        c += 1;
    }
    c
}

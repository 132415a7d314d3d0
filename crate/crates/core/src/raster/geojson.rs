//! Basin and region geometry from GeoJSON (Polygon / MultiPolygon, bare or
//! wrapped in a Feature or single-feature FeatureCollection).

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Closed vertex list, first vertex repeated last.
pub type Ring = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub exterior: Ring,
    pub holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(exterior: Ring, holes: Vec<Ring>) -> Result<Self> {
        Ok(Polygon {
            exterior: close_ring(exterior)?,
            holes: holes.into_iter().map(close_ring).collect::<Result<_>>()?,
        })
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(&self.holes)
    }

    /// Shoelace area of the exterior minus the holes.
    pub fn area(&self) -> f64 {
        ring_area(&self.exterior).abs() - self.holes.iter().map(|h| ring_area(h).abs()).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSet {
    pub polygons: Vec<Polygon>,
    pub id: String,
}

impl PolygonSet {
    pub fn new(id: impl Into<String>, polygons: Vec<Polygon>) -> Self {
        PolygonSet {
            polygons,
            id: id.into(),
        }
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    pub fn to_geojson(&self) -> Value {
        let coords = |p: &Polygon| -> Value {
            Value::Array(
                p.rings()
                    .map(|r| Value::Array(r.iter().map(|&(x, y)| json!([x, y])).collect()))
                    .collect(),
            )
        };
        let geometry = if self.polygons.len() == 1 {
            json!({ "type": "Polygon", "coordinates": coords(&self.polygons[0]) })
        } else {
            json!({
                "type": "MultiPolygon",
                "coordinates": self.polygons.iter().map(coords).collect::<Vec<_>>(),
            })
        };
        json!({
            "type": "Feature",
            "id": self.id,
            "properties": {},
            "geometry": geometry,
        })
    }
}

fn ring_area(r: &Ring) -> f64 {
    r.windows(2)
        .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
        .sum::<f64>()
        / 2.0
}

fn close_ring(mut ring: Ring) -> Result<Ring> {
    if let (Some(&first), Some(&last)) = (ring.first(), ring.last()) {
        if first != last {
            log::warn!("closing unclosed ring by repeating its first vertex");
            ring.push(first);
        }
    }
    if ring.len() < 4 {
        return Err(Error::parse(
            "polygon ring",
            format!("ring needs at least 4 vertices once closed, got {}", ring.len()),
        ));
    }
    Ok(ring)
}

pub fn read_polygons(path: impl AsRef<Path>) -> Result<PolygonSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_polygons(&text, &stem)
}

pub(crate) fn parse_polygons(text: &str, default_id: &str) -> Result<PolygonSet> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::parse("geojson", e.to_string()))?;
    let mut id = default_id.to_string();

    let feature_or_geometry = match type_of(&root)? {
        "FeatureCollection" => {
            let features = root
                .get("features")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("geojson", "FeatureCollection without features"))?;
            if features.len() > 1 {
                log::warn!(
                    "FeatureCollection has {} features; only the first is used",
                    features.len()
                );
            }
            features
                .first()
                .ok_or_else(|| Error::parse("geojson", "FeatureCollection is empty"))?
        }
        _ => &root,
    };

    let geometry = if type_of(feature_or_geometry)? == "Feature" {
        if let Some(fid) = feature_id(feature_or_geometry) {
            id = fid;
        }
        feature_or_geometry
            .get("geometry")
            .filter(|g| !g.is_null())
            .ok_or_else(|| Error::UnsupportedGeometry("null".into()))?
    } else {
        feature_or_geometry
    };

    let coords = geometry
        .get("coordinates")
        .ok_or_else(|| Error::parse("geojson", "geometry without coordinates"));
    let polygons = match type_of(geometry)? {
        "Polygon" => vec![polygon_from(coords?)?],
        "MultiPolygon" => coords?
            .as_array()
            .ok_or_else(|| Error::parse("geojson", "MultiPolygon coordinates must be an array"))?
            .iter()
            .map(polygon_from)
            .collect::<Result<_>>()?,
        other => return Err(Error::UnsupportedGeometry(other.to_string())),
    };
    Ok(PolygonSet { polygons, id })
}

fn type_of(v: &Value) -> Result<&str> {
    v.get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("geojson", "object without a \"type\" member"))
}

fn feature_id(feature: &Value) -> Option<String> {
    let as_string = |v: &Value| match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    };
    feature.get("id").and_then(as_string).or_else(|| {
        let props = feature.get("properties")?;
        props
            .get("id")
            .and_then(as_string)
            .or_else(|| props.get("name").and_then(as_string))
    })
}

fn polygon_from(v: &Value) -> Result<Polygon> {
    let rings = v
        .as_array()
        .ok_or_else(|| Error::parse("geojson", "polygon coordinates must be an array of rings"))?;
    let mut parsed = rings.iter().map(ring_from);
    let exterior = parsed
        .next()
        .ok_or_else(|| Error::parse("geojson", "polygon has no rings"))??;
    let holes = parsed.collect::<Result<Vec<_>>>()?;
    Polygon::new(exterior, holes)
}

fn ring_from(v: &Value) -> Result<Ring> {
    v.as_array()
        .ok_or_else(|| Error::parse("geojson", "ring must be an array of positions"))?
        .iter()
        .map(|p| {
            let xy = p.as_array().filter(|a| a.len() >= 2);
            match xy.map(|a| (a[0].as_f64(), a[1].as_f64())) {
                Some((Some(x), Some(y))) => Ok((x, y)),
                _ => Err(Error::parse("geojson", format!("bad position {p}"))),
            }
        })
        .collect()
}

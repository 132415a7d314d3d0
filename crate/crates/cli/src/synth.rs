use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use clap::{Args, ValueEnum};
use hydrosar::raster::{write_ascii_grid, CrsKind, GridGeo, Polygon, PolygonSet};
use hydrosar::synth::{gen_rain_stack, gen_scene, SynthSceneSpec};
use hydrosar::Stack;
use serde_json::json;

use crate::exit::{create_dir, write_file, CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Scene,
    Rain,
}

const DEFAULT_PATTERN: [f64; 12] =
    [20.0, 30.0, 60.0, 120.0, 200.0, 250.0, 280.0, 300.0, 250.0, 150.0, 60.0, 25.0];

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Water body area per scene in km²; one scene per value.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    pub area_km2: Vec<f64>,
    /// Cell size: metres for scenes (default 10), degrees for rain (default 0.05).
    #[arg(long)]
    pub cellsize: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub noise_blobs: usize,
    /// Days between consecutive scenes.
    #[arg(long, default_value_t = 12)]
    pub revisit_days: u64,
    #[arg(long)]
    pub looks: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub land_db_vv: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub water_db_vv: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub land_db_vh: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub water_db_vh: Option<f64>,

    /// First date: the first scene date, or the first rain day.
    #[arg(long, default_value = "2022-01-01")]
    pub start: NaiveDate,
    /// Last rain day.
    #[arg(long, default_value = "2022-12-31")]
    pub end: NaiveDate,
    /// Twelve expected monthly totals in mm, January first.
    #[arg(long, value_delimiter = ',')]
    pub pattern: Option<Vec<f64>>,
    /// Gamma shape of the multiplicative daily noise; omit for none.
    #[arg(long)]
    pub noise_shape: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub ncols: usize,
    #[arg(long, default_value_t = 20)]
    pub nrows: usize,
    #[arg(long, default_value_t = 105.0, allow_hyphen_values = true)]
    pub xll: f64,
    #[arg(long, default_value_t = 21.0, allow_hyphen_values = true)]
    pub yll: f64,
}

pub fn run(args: &SynthArgs) -> CmdResult {
    match args.kind {
        Kind::Scene => scenes(args),
        Kind::Rain => rain(args),
    }
}

fn write_truth(out_dir: &Path, truth: &serde_json::Value) -> CmdResult {
    let text = serde_json::to_string_pretty(truth)
        .map_err(|e| Failure::Internal(format!("truth.json: {e}")))?;
    write_file(&out_dir.join("truth.json"), &(text + "\n"))
}

fn scenes(args: &SynthArgs) -> CmdResult {
    if args.area_km2.is_empty() {
        return Err(Failure::Input("--area-km2 needs at least one value".into()));
    }
    let cellsize = args.cellsize.unwrap_or(10.0);
    let (vv_dir, vh_dir) = (args.out_dir.join("vv"), args.out_dir.join("vh"));
    create_dir(&vv_dir)?;
    create_dir(&vh_dir)?;

    let mut truth = Vec::with_capacity(args.area_km2.len());
    for (i, &area) in args.area_km2.iter().enumerate() {
        let seed = args.seed.wrapping_add(i as u64);
        let mut spec = SynthSceneSpec::with_water_body(area, cellsize, seed)?;
        spec.date = args
            .start
            .checked_add_days(Days::new(args.revisit_days * i as u64))
            .ok_or_else(|| Failure::Input("scene dates overflow the calendar".into()))?;
        spec.noise_blobs = args.noise_blobs;
        spec.looks = args.looks.unwrap_or(spec.looks);
        spec.land_db_vv = args.land_db_vv.unwrap_or(spec.land_db_vv);
        spec.water_db_vv = args.water_db_vv.unwrap_or(spec.water_db_vv);
        spec.land_db_vh = args.land_db_vh.unwrap_or(spec.land_db_vh);
        spec.water_db_vh = args.water_db_vh.unwrap_or(spec.water_db_vh);

        let s = gen_scene::<f64>(&spec)?;
        let name = format!("{}.asc", spec.date);
        write_ascii_grid(&s.scene.vv, vv_dir.join(&name))?;
        write_ascii_grid(&s.scene.vh, vh_dir.join(&name))?;
        truth.push(json!({
            "date": spec.date.to_string(),
            "seed": seed,
            "true_area_km2": s.true_area_km2,
            "water_pixels": s.true_mask.values.iter().filter(|v| **v == 1.0).count(),
            "noise_blobs": s.blobs.len(),
            "cellsize_m": cellsize,
            "ncols": spec.geo.ncols,
            "nrows": spec.geo.nrows,
        }));
    }
    write_truth(&args.out_dir, &json!({ "kind": "scene", "seed": args.seed, "scenes": truth }))
}

fn rain(args: &SynthArgs) -> CmdResult {
    let pattern: [f64; 12] = match &args.pattern {
        None => DEFAULT_PATTERN,
        Some(p) => p.as_slice().try_into().map_err(|_| {
            Failure::Input(format!("--pattern needs 12 values, got {}", p.len()))
        })?,
    };
    let cellsize = args.cellsize.unwrap_or(0.05);
    let geo = GridGeo::new(args.ncols, args.nrows, args.xll, args.yll, cellsize, CrsKind::Geographic)?;
    let stack: Stack = gen_rain_stack(geo, args.start, args.end, &pattern, args.noise_shape, args.seed)?;

    let daily = args.out_dir.join("daily");
    create_dir(&daily)?;
    for (d, layer) in stack.dates.iter().zip(&stack.layers) {
        write_ascii_grid(layer, daily.join(format!("{d}.asc")))?;
    }

    // Basin: the middle half of the grid in each direction.
    let w = geo.ncols as f64 * cellsize;
    let h = geo.nrows as f64 * cellsize;
    let (x0, x1) = (geo.x_origin + w / 4.0, geo.x_origin + 3.0 * w / 4.0);
    let (y0, y1) = (geo.y_origin + h / 4.0, geo.y_origin + 3.0 * h / 4.0);
    let ring = vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)];
    let basin = PolygonSet::new("basin", vec![Polygon::new(ring, vec![])?]);
    let geojson = serde_json::to_string_pretty(&basin.to_geojson())
        .map_err(|e| Failure::Internal(format!("basin.geojson: {e}")))?;
    write_file(&args.out_dir.join("basin.geojson"), &(geojson + "\n"))?;

    write_truth(
        &args.out_dir,
        &json!({
            "kind": "rain",
            "seed": args.seed,
            "start": args.start.to_string(),
            "end": args.end.to_string(),
            "pattern_mm": pattern,
            "noise_shape": args.noise_shape,
        }),
    )
}

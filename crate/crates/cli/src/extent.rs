use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use hydrosar::rainfall::dated_files;
use hydrosar::raster::{read_ascii_grid_as, write_ascii_grid, CrsKind, Scene, Units};
use hydrosar::water::{finish_scene, prepare_scene, PreparedScene, SceneOutput, WaterExtentRecord};
use hydrosar::SarScene;
use rayon::prelude::*;

use crate::config::{require, InputUnits, RunConfig};
use crate::exit::{create_dir, write_file, CmdResult, Failure};

/// VV/VH file pairs by date; dates present in only one band are skipped.
fn pair_scenes(vv_dir: &Path, vh_dir: &Path) -> CmdResult<Vec<(NaiveDate, PathBuf, PathBuf)>> {
    let vv: BTreeMap<NaiveDate, PathBuf> = dated_files(vv_dir, "asc")?.into_iter().collect();
    let vh: BTreeMap<NaiveDate, PathBuf> = dated_files(vh_dir, "asc")?.into_iter().collect();
    if vv.is_empty() && vh.is_empty() {
        return Err(Failure::Input(format!(
            "no YYYY-MM-DD.asc scenes in {} or {}",
            vv_dir.display(),
            vh_dir.display()
        )));
    }
    for d in vv.keys().filter(|d| !vh.contains_key(d)) {
        log::warn!("{d}: VV scene has no VH counterpart, skipped");
    }
    for d in vh.keys().filter(|d| !vv.contains_key(d)) {
        log::warn!("{d}: VH scene has no VV counterpart, skipped");
    }
    let pairs: Vec<_> = vv
        .into_iter()
        .filter_map(|(d, a)| vh.get(&d).map(|b| (d, a, b.clone())))
        .collect();
    if pairs.is_empty() {
        return Err(Failure::Input("no date has both a VV and a VH scene".into()));
    }
    Ok(pairs)
}

fn load_scene(date: NaiveDate, vv: &Path, vh: &Path, units: Units, id: &str) -> hydrosar::Result<SarScene> {
    let read = |p: &Path| read_ascii_grid_as(p, CrsKind::ProjectedMeters, units);
    Scene::new(read(vv)?, read(vh)?, date, id)
}

/// A prepared scene with the thresholds it will be classified with.
struct Planned {
    scene: PreparedScene<f64>,
    t_vv: f64,
    t_vh: f64,
    low_confidence: bool,
}

/// Thresholds per scene in date order: its own when confident, otherwise
/// the most recent earlier confident pair.
fn plan(
    prepared: Vec<(NaiveDate, CmdResult<PreparedScene<f64>>)>,
    cfg: &RunConfig,
) -> Vec<(NaiveDate, CmdResult<Planned>)> {
    let mut last_good: Option<(NaiveDate, f64, f64)> = None;
    prepared
        .into_iter()
        .map(|(date, p)| {
            let planned = p.and_then(|scene| {
                let (t_vv, t_vh) = (scene.vv.threshold, scene.vh.threshold);
                if !scene.low_confidence(cfg.mask.combine) {
                    last_good = Some((date, t_vv, t_vh));
                    return Ok(Planned { scene, t_vv, t_vh, low_confidence: false });
                }
                let (from, t_vv, t_vh) = last_good.ok_or_else(|| {
                    Failure::Input(format!(
                        "{date}: low-confidence thresholds and no earlier confident scene to fall back on"
                    ))
                })?;
                log::warn!("{date}: low-confidence thresholds, reusing those of {from}");
                Ok(Planned { scene, t_vv, t_vh, low_confidence: true })
            });
            (date, planned)
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> CmdResult {
    let vv_dir = require(&cfg.vv_dir, "vv-dir")?;
    let vh_dir = require(&cfg.vh_dir, "vh-dir")?;
    let out_csv = require(&cfg.out_csv, "out-csv")?;
    let reservoir = require(&cfg.reservoir, "reservoir")?;
    cfg.speckle.validate()?;
    cfg.mask.validate()?;
    let units = match cfg.units {
        InputUnits::Decibel => Units::Decibel,
        InputUnits::Linear => Units::LinearPower,
    };

    let pairs = pair_scenes(&vv_dir, &vh_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;

    let prepared: Vec<(NaiveDate, CmdResult<PreparedScene<f64>>)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(date, vv, vh)| {
                let p = load_scene(*date, vv, vh, units, &reservoir)
                    .and_then(|s| prepare_scene(&s, &cfg.speckle, cfg.nbins));
                (*date, p.map_err(Failure::from))
            })
            .collect()
    });
    let outputs: Vec<(NaiveDate, CmdResult<SceneOutput<f64>>)> = pool.install(|| {
        plan(prepared, cfg)
            .into_par_iter()
            .map(|(date, planned)| {
                let out = planned.and_then(|p| {
                    finish_scene(&p.scene, p.t_vv, p.t_vh, p.low_confidence, &cfg.mask)
                        .map_err(Failure::from)
                });
                (date, out)
            })
            .collect()
    });

    if let Some(dir) = &cfg.mask_out_dir {
        create_dir(dir)?;
    }
    let mut csv = String::from(WaterExtentRecord::CSV_HEADER);
    csv.push('\n');
    let (mut failed, mut input_failed) = (0usize, false);
    for (date, out) in outputs {
        match out {
            Ok(o) => {
                if o.record.low_confidence {
                    log::warn!("{date}: area flagged low-confidence");
                }
                csv.push_str(&o.record.csv_row());
                csv.push('\n');
                if let Some(dir) = &cfg.mask_out_dir {
                    write_ascii_grid(&o.mask, dir.join(format!("{date}.asc")))?;
                }
            }
            Err(f) => {
                log::error!("{date}: {f}");
                failed += 1;
                input_failed |= matches!(f, Failure::Input(_));
            }
        }
    }
    write_file(&out_csv, &csv)?;
    let msg = format!("{failed} scene(s) failed");
    match (failed, input_failed) {
        (0, _) => Ok(()),
        (_, true) => Err(Failure::Input(msg)),
        (_, false) => Err(Failure::Internal(msg)),
    }
}

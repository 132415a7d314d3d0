use hydrosar::raster::{read_ascii_grid_as, write_ascii_grid, CrsKind, Scene, Units};
use hydrosar::speckle::SpeckleParams;
use hydrosar::synth::{gen_scene, SynthSceneSpec};
use hydrosar::threshold::{scene_thresholds, DEFAULT_BINS};
use hydrosar::water::{prepare_scene, process_scene, MaskParams};

#[test]
fn one_square_kilometer_through_files() {
    let spec = SynthSceneSpec::with_water_body(1.0, 10.0, 77).unwrap();
    let truth = gen_scene::<f64>(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_ascii_grid(&truth.scene.vv, dir.path().join("vv.asc")).unwrap();
    write_ascii_grid(&truth.scene.vh, dir.path().join("vh.asc")).unwrap();
    let read = |name: &str| {
        read_ascii_grid_as::<f64>(dir.path().join(name), CrsKind::ProjectedMeters, Units::Decibel).unwrap()
    };
    let scene = Scene::new(read("vv.asc"), read("vh.asc"), spec.date, "synthetic").unwrap();
    assert_eq!(scene, truth.scene);

    let out = process_scene(&scene, &SpeckleParams::default(), &MaskParams::default(), DEFAULT_BINS).unwrap();
    let err = out.record.area_km2 / truth.true_area_km2 - 1.0;
    assert!(err.abs() < 0.05, "relative error {err}");
    assert!(!out.record.low_confidence);
    assert!(out.record.t_vv > -20.0 && out.record.t_vv < -8.0);
    assert!(out.record.t_vh > -26.0 && out.record.t_vh < -14.0);
}

#[test]
fn raw_scene_thresholds_bracket_class_means() {
    let spec = SynthSceneSpec::with_water_body(0.5, 10.0, 4).unwrap();
    let s = gen_scene::<f64>(&spec).unwrap();
    let (vv, vh) = scene_thresholds(&s.scene, DEFAULT_BINS).unwrap();
    assert!(vv.threshold > -20.0 && vv.threshold < -8.0, "{}", vv.threshold);
    assert!(vh.threshold > -26.0 && vh.threshold < -14.0, "{}", vh.threshold);
}

#[test]
fn noise_blobs_are_removed() {
    let mut spec = SynthSceneSpec::with_water_body(1.0, 10.0, 8).unwrap();
    let clean = gen_scene::<f64>(&spec).unwrap();
    spec.noise_blobs = 20;
    let noisy = gen_scene::<f64>(&spec).unwrap();
    let p = (SpeckleParams::default(), MaskParams::default());
    let a = process_scene(&clean.scene, &p.0, &p.1, DEFAULT_BINS).unwrap();
    let b = process_scene(&noisy.scene, &p.0, &p.1, DEFAULT_BINS).unwrap();
    assert!(b.record.removed_components >= 15, "{}", b.record.removed_components);
    assert!((b.record.area_km2 / a.record.area_km2 - 1.0).abs() < 0.01);
}

#[test]
fn unimodal_scenes_are_flagged() {
    for all_water in [false, true] {
        let mut spec = SynthSceneSpec::with_water_body(0.5, 10.0, 12).unwrap();
        spec.water.polygons.clear();
        if all_water {
            // Every pixel takes the "land" class, so give it water backscatter.
            (spec.land_db_vv, spec.land_db_vh) = (-20.0, -26.0);
            (spec.water_db_vv, spec.water_db_vh) = (-32.0, -38.0);
        }
        let s = gen_scene::<f64>(&spec).unwrap();
        match prepare_scene(&s.scene, &SpeckleParams::default(), DEFAULT_BINS) {
            Ok(p) => assert!(p.low_confidence(MaskParams::default().combine), "all_water={all_water}"),
            Err(e) => assert!(e.to_string().contains("degenerate"), "{e}"),
        }
    }
}

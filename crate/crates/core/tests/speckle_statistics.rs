use hydrosar::raster::{db_to_linear, GridGeo, Polygon, PolygonSet};
use hydrosar::speckle::{refined_lee, SpeckleParams};
use hydrosar::synth::{gen_scene, SynthSceneSpec};
use hydrosar::Raster;

fn spec(n: usize, water: PolygonSet, seed: u64) -> SynthSceneSpec {
    let mut s = SynthSceneSpec::with_water_body(1.0, 10.0, seed).unwrap();
    s.geo = GridGeo::projected(n, n, 10.0).unwrap();
    s.water = water;
    s.land_db_vv = 0.0;
    s.water_db_vv = -20.0;
    s
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (m, values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn homogeneous_field_variance_halves_and_mean_holds() {
    for seed in 0..4 {
        let s = gen_scene::<f64>(&spec(256, PolygonSet::new("none", vec![]), seed)).unwrap();
        let input: Raster = db_to_linear(&s.scene.vv).unwrap();
        let out = refined_lee(&input, &SpeckleParams::default()).unwrap();
        let (mi, vi) = mean_var(&input.values);
        let (mo, vo) = mean_var(&out.values);
        assert!(vo < 0.5 * vi, "seed {seed}: {vo} vs {vi}");
        assert!((mo - 1.0).abs() < 0.01, "seed {seed}: mean {mo}");
        assert!((mi - 1.0).abs() < 0.01);
    }
}

#[test]
fn step_edge_crossing_moves_at_most_one_column() {
    let n = 64;
    let left = Polygon::new(vec![(0.0, 0.0), (320.0, 0.0), (320.0, 640.0), (0.0, 640.0)], vec![]).unwrap();
    for seed in 0..4 {
        let s = gen_scene::<f64>(&spec(n, PolygonSet::new("edge", vec![left.clone()]), seed)).unwrap();
        let out = refined_lee(&db_to_linear(&s.scene.vv).unwrap(), &SpeckleParams::default()).unwrap();
        let col_mean = |c: usize| (0..n).map(|r| out.values[r * n + c]).sum::<f64>() / n as f64;
        let midpoint = (0.01 + 1.0) / 2.0;
        let crossing = (0..n).find(|&c| col_mean(c) >= midpoint).unwrap();
        assert!(crossing.abs_diff(32) <= 1, "seed {seed}: crossing at {crossing}");
    }
}

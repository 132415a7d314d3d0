use chrono::{Datelike, NaiveDate};
use hydrosar::rainfall::{
    annual_mean, climatology_table, load_stack, monthly_climatology, monthly_total,
    rasterize_polygon, zonal_monthly_series,
};
use hydrosar::raster::{
    read_ascii_grid, write_ascii_grid, CrsKind, Grid, GridGeo, Polygon, PolygonSet, Units,
};
use hydrosar::synth::gen_rain_stack;

fn geo() -> GridGeo {
    GridGeo::new(5, 4, 104.0, 10.0, 0.25, CrsKind::Geographic).unwrap()
}

fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

#[test]
fn monthly_totals_match_resummation_of_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut pattern = [0.0; 12];
    for (m, p) in pattern.iter_mut().enumerate() {
        *p = 20.0 + 30.0 * m as f64;
    }
    let stack = gen_rain_stack::<f64>(geo(), d(2019, 1, 1), d(2020, 12, 31), &pattern, Some(0.6), 3)
        .unwrap();
    for (date, layer) in stack.dates.iter().zip(&stack.layers) {
        write_ascii_grid(layer, dir.path().join(format!("{date}.asc"))).unwrap();
    }
    let loaded = load_stack::<f64>(dir.path()).unwrap();
    assert_eq!(loaded.len(), stack.len());

    for (y, m) in [(2019, 2), (2020, 2), (2020, 6), (2019, 12)] {
        let total = monthly_total(&loaded, y, m).unwrap();
        let mut expected = vec![0.0f64; geo().len()];
        for day in d(y, m, 1).iter_days().take_while(|x| x.month() == m) {
            let g: Grid<f64> = read_ascii_grid(dir.path().join(format!("{day}.asc"))).unwrap();
            for (e, v) in expected.iter_mut().zip(&g.values) {
                *e += v;
            }
        }
        assert_eq!(total.raster.values, expected, "{y}-{m}");
    }

    let annual = annual_mean(&loaded, 2019, 2020).unwrap();
    let mut per_year = [vec![0.0f64; geo().len()], vec![0.0f64; geo().len()]];
    for (date, layer) in loaded.dates.iter().zip(&loaded.layers) {
        let acc = &mut per_year[(date.year() - 2019) as usize];
        for (a, v) in acc.iter_mut().zip(&layer.values) {
            *a += v;
        }
    }
    let expected: Vec<f64> = (0..geo().len()).map(|i| (per_year[0][i] + per_year[1][i]) / 2.0).collect();
    assert_eq!(annual.values, expected);
}

#[test]
fn constant_fields_have_closed_forms() {
    let mut pattern = [0.0; 12];
    for (m, p) in pattern.iter_mut().enumerate() {
        *p = 4.0 * hydrosar::rainfall::days_in_month(2021, m as u32 + 1) as f64;
    }
    let stack = gen_rain_stack::<f64>(geo(), d(2021, 1, 1), d(2021, 12, 31), &pattern, None, 0).unwrap();
    assert!(stack.layers.iter().all(|l| l.values.iter().all(|&v| v == 4.0)));
    let annual = annual_mean(&stack, 2021, 2021).unwrap();
    assert!(annual.values.iter().all(|&v| v == 1460.0));

    let ones = gen_rain_stack::<f64>(geo(), d(2021, 6, 1), d(2021, 6, 30), &[30.0; 12], None, 0).unwrap();
    let june = monthly_total(&ones, 2021, 6).unwrap();
    assert!(june.raster.values.iter().all(|&v| v == 30.0));
    assert_eq!(june.coverage(), 1.0);
}

#[test]
fn climatology_recovers_pattern() {
    let pattern = [10.0, 15.0, 40.0, 90.0, 180.0, 240.0, 260.0, 280.0, 250.0, 200.0, 80.0, 20.0];
    let g = GridGeo::new(6, 6, 104.0, 10.0, 0.25, CrsKind::Geographic).unwrap();
    let stack = gen_rain_stack::<f64>(g, d(1991, 1, 1), d(2020, 12, 31), &pattern, Some(1.0), 17).unwrap();
    let clim = monthly_climatology(&stack, 1991, 2020).unwrap();
    for (m, grid) in clim.months.iter().enumerate() {
        let mean = grid.values.iter().sum::<f64>() / grid.values.len() as f64;
        assert!((mean / pattern[m] - 1.0).abs() < 0.05, "month {}: {mean}", m + 1);
        assert_eq!(clim.years[m].len(), 30);
    }

    let basin = PolygonSet::new(
        "basin",
        vec![Polygon::new(vec![(104.3, 10.3), (105.2, 10.3), (105.2, 11.2), (104.3, 11.2)], vec![]).unwrap()],
    );
    let mask: Grid<f64> = rasterize_polygon(&basin, &g);
    let table = climatology_table(&stack, &mask, 1991, 2020, true).unwrap();
    for (m, (mean, years)) in table.months.iter().enumerate() {
        assert_eq!(years.len(), 30);
        assert!((mean / pattern[m] - 1.0).abs() < 0.1, "month {}: {mean}", m + 1);
    }
}

#[test]
fn zonal_series_over_constant_field_is_constant() {
    let stack = gen_rain_stack::<f64>(geo(), d(2020, 1, 1), d(2020, 12, 31), &[31.0; 12], None, 0).unwrap();
    let mask = Grid::new(geo(), (0..20).map(|i| (i % 3 == 0) as u8 as f64).collect(), -9999.0, Units::Label)
        .unwrap();
    let series = zonal_monthly_series(&stack, &mask, 2020, 2020, true).unwrap();
    assert_eq!(series.len(), 12);
    for (y, m, v) in series {
        let days = hydrosar::rainfall::days_in_month(y, m) as f64;
        let expected = (31.0 / days) * days;
        let total = monthly_total(&stack, y, m).unwrap().raster.values[0];
        assert_eq!(v, total, "{y}-{m}");
        assert!((v - expected).abs() < 1e-12);
    }
}

mod common;

use common::*;
use geostat_core::fields::{
    make_spacetime_design, sample_uniform_locations, spacetime_sites, spatial_sites, split, DatasetKind, Point,
    SplitKind, SplitScheme, Variable,
};
use geostat_core::kernels::{BivariateFlavor, BivariateMaternParams, GneitingParams, MaternParams};
use geostat_core::predict::{exact_kriging, forecast_t10, local_kriging};
use geostat_core::score::rmse;
use geostat_core::simulate::{generate, preset, sample_grf, CovKernel};
use geostat_core::{CovarianceModel, Dataset, Site};

fn matern(nugget: f64) -> CovarianceModel {
    CovarianceModel::StationaryMatern(MaternParams { variance: 1.0, range: 0.1, smoothness: 1.0, nugget })
}

#[test]
fn interpolation_at_two_hundred_points() {
    let sites = spatial_sites(&sample_uniform_locations(200, 9).unwrap());
    let model = matern(0.0);
    let d = sample_grf(&model, &sites, 9).unwrap();
    let p = exact_kriging(&model, &d, &d.sites).unwrap();
    for (q, z) in p.iter().zip(&d.values) {
        assert!((q.mean - z).abs() < 1e-6, "{} vs {z}", q.mean);
    }
}

#[test]
fn exact_kriging_matches_partitioned_normal() {
    for fam in FAMILIES {
        for rep in 0..5u64 {
            let (model, all) = random_instance(fam, 20, 40 + rep);
            let n_train = all.len() * 3 / 4;
            let train = sample_grf(&model, &all[..n_train], rep).unwrap();
            let targets = &all[n_train..];
            let sigma = dense(&model, &all);
            let s11: Dense = sigma[..n_train].iter().map(|r| r[..n_train].to_vec()).collect();
            let inv = inverse(&s11);
            let resid: Vec<f64> =
                train.sites.iter().zip(&train.values).map(|(s, z)| z - model.mean_at(s.point())).collect();
            let w = mat_vec(&inv, &resid);
            let p = exact_kriging(&model, &train, targets).unwrap();
            for (k, q) in p.iter().enumerate() {
                let row = &sigma[n_train + k];
                let c = &row[..n_train];
                let mean = model.mean_at(targets[k].point()) + dotp(c, &w);
                let var = row[n_train + k] - dotp(c, &mat_vec(&inv, c));
                assert!((q.mean - mean).abs() < 1e-9, "{fam}: mean {} vs {mean}", q.mean);
                assert!((q.variance - var).abs() < 1e-9, "{fam}: var {} vs {var}", q.variance);
            }
        }
    }
}

#[test]
fn two_point_textbook_formula() {
    let model = matern(0.1);
    let sites = spatial_sites(&[Point::new(0.2, 0.2), Point::new(0.3, 0.2)]);
    let d = Dataset::new(DatasetKind::Spatial, sites, vec![1.0, -0.5]).unwrap();
    let t = spatial_sites(&[Point::new(0.25, 0.3)]);
    let full = dense(&model, &[d.sites[0], d.sites[1], t[0]]);
    let (a, b, c) = (full[0][0], full[0][1], full[1][1]);
    let det = a * c - b * b;
    let (k1, k2) = (full[2][0], full[2][1]);
    let w1 = (c * k1 - b * k2) / det;
    let w2 = (a * k2 - b * k1) / det;
    let p = exact_kriging(&model, &d, &t).unwrap();
    assert!((p[0].mean - (w1 * 1.0 + w2 * -0.5)).abs() < 1e-12);
    assert!((p[0].variance - (full[2][2] - w1 * k1 - w2 * k2)).abs() < 1e-12);
}

#[test]
fn local_with_every_neighbour_equals_exact() {
    for fam in FAMILIES {
        let (model, all) = random_instance(fam, 60, 3);
        let n_train = all.len() - 10;
        let train = sample_grf(&model, &all[..n_train], 3).unwrap();
        let e = exact_kriging(&model, &train, &all[n_train..]).unwrap();
        let l = local_kriging(&model, &train, &all[n_train..], n_train + 5, None).unwrap();
        for (a, b) in e.iter().zip(&l) {
            assert!((a.mean - b.mean).abs() < 1e-8, "{fam}");
            assert!((a.variance - b.variance).abs() < 1e-8, "{fam}");
        }
    }
}

#[test]
fn variance_bounds() {
    for fam in FAMILIES {
        let (model, all) = random_instance(fam, 64, 8);
        let train = sample_grf(&model, &all[..48], 8).unwrap();
        let k = CovKernel::new(&model).unwrap();
        for p in exact_kriging(&model, &train, &all).unwrap() {
            let prior = k.total_variance(&k.prepare(&p.site).unwrap());
            assert!(p.variance >= 0.0 && p.variance <= prior + 1e-10, "{fam}");
        }
    }
}

#[test]
fn local_kriging_close_to_exact_on_held_out_points() {
    let sites = spatial_sites(&sample_uniform_locations(500, 12).unwrap());
    let model = matern(0.05);
    let d = sample_grf(&model, &sites, 12).unwrap();
    let s = split(&d, SplitScheme::new(SplitKind::Random10), 12).unwrap();
    let score = |p: Vec<geostat_core::Prediction>| {
        rmse(&p.iter().map(|q| q.mean).collect::<Vec<_>>(), &s.test.values).unwrap()
    };
    let exact = score(exact_kriging(&model, &s.train, &s.test.sites).unwrap());
    let local = score(local_kriging(&model, &s.train, &s.test.sites, 100, None).unwrap());
    assert!((local - exact).abs() <= 0.02 * exact, "{local} vs {exact}");
}

#[test]
fn bivariate_coherence() {
    let model = CovarianceModel::BivariateMatern(BivariateMaternParams {
        flavor: BivariateFlavor::Parsimonious,
        variance: [0.9, 0.9],
        beta12: 0.9,
        smoothness: [0.6, 1.4],
        range: [0.03, 0.03],
        tau_bar: 0.0,
    });
    let far = [Point::new(0.1, 0.1), Point::new(0.9, 0.2), Point::new(0.4, 0.8)];
    let s = Point::new(0.5, 0.5);
    let mut sites: Vec<Site> = far.iter().map(|p| Site::Bivariate(*p, Variable::First)).collect();
    let base = Dataset::new(DatasetKind::Bivariate, sites.clone(), vec![0.2, -0.4, 1.0]).unwrap();
    sites.push(Site::Bivariate(s, Variable::Second));
    let more = Dataset::new(DatasetKind::Bivariate, sites, vec![0.2, -0.4, 1.0, 0.7]).unwrap();
    let target = [Site::Bivariate(s, Variable::First)];
    let v0 = exact_kriging(&model, &base, &target).unwrap()[0].variance;
    let v1 = exact_kriging(&model, &more, &target).unwrap()[0].variance;
    assert!(v1 < v0, "{v1} vs {v0}");
}

fn single_location_series(model: &CovarianceModel, slots: usize, seed: u64) -> Dataset {
    let design = make_spacetime_design(&[Point::new(0.5, 0.5)], slots).unwrap();
    sample_grf(model, &spacetime_sites(&design), seed).unwrap()
}

#[test]
fn forecast_shrinks_towards_the_mean() {
    let model = CovarianceModel::Gneiting(GneitingParams {
        variance: 0.9,
        space_range: 0.1,
        time_range: 5.0,
        alpha: 0.6,
        beta: 0.9,
        smoothness: 1.0,
    });
    for seed in 0..10 {
        let d = single_location_series(&model, 20, seed);
        let train = d.select(&(0..10).collect::<Vec<_>>());
        let target = [d.sites[10]];
        let p = forecast_t10(&model, &train, &target, 1, 10).unwrap();
        let last = train.values[9];
        let (lo, hi) = if last < 0.0 { (last, 0.0) } else { (0.0, last) };
        assert!(p[0].mean >= lo && p[0].mean <= hi, "{} outside [{lo}, {hi}]", p[0].mean);
    }
}

#[test]
fn forecast_under_independence_is_the_mean() {
    let model = CovarianceModel::Gneiting(GneitingParams {
        variance: 0.9,
        space_range: 1e-9,
        time_range: 1e15,
        alpha: 0.6,
        beta: 0.9,
        smoothness: 1.0,
    });
    let locs = sample_uniform_locations(10, 1).unwrap();
    let sites = spacetime_sites(&make_spacetime_design(&locs, 20).unwrap());
    let d = sample_grf(&model, &sites, 1).unwrap();
    let s = split(&d, SplitScheme::new(SplitKind::T10), 1).unwrap();
    for p in forecast_t10(&model, &s.train, &s.test.sites, 20, 10).unwrap() {
        assert!(p.mean.abs() < 1e-12, "{}", p.mean);
    }
}

#[test]
fn forecast_error_grows_with_lead_time() {
    let base = preset("ST3", Some(200)).unwrap().with_slots(15).unwrap();
    let CovarianceModel::Gneiting(_) = base.model else { panic!("ST3 is space-time") };
    let d = generate(&base, 31).unwrap();
    let s = split(&d, SplitScheme::new(SplitKind::T10), 31).unwrap();
    let p = forecast_t10(&base.model, &s.train, &s.test.sites, 50, 10).unwrap();
    let at = |slot: f64| {
        let (mut pred, mut truth) = (Vec::new(), Vec::new());
        for (q, (site, z)) in p.iter().zip(s.test.sites.iter().zip(&s.test.values)) {
            if site.time() == Some(slot) {
                pred.push(q.mean);
                truth.push(*z);
            }
        }
        rmse(&pred, &truth).unwrap()
    };
    let first = at(5.0);
    let last = at(14.0);
    assert!(first < last, "{first} vs {last}");
}

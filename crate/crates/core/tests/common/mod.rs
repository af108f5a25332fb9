#![allow(dead_code)]

use geostat_core::fields::{
    bivariate_sites, make_spacetime_design, sample_uniform_locations, spacetime_sites, spatial_sites,
};
use geostat_core::kernels::{
    BivariateFlavor, BivariateMaternParams, GneitingParams, MaternParams, MeanSurface, NonstatMaternModel,
};
use geostat_core::rng::{stream, uniform_open, Stream};
use geostat_core::simulate::{build_covariance_matrix, sample_grf};
use geostat_core::{CovarianceModel, Dataset, Site};

/// Dense matrix as rows.
pub type Dense = Vec<Vec<f64>>;

pub fn dense(model: &CovarianceModel, sites: &[Site]) -> Dense {
    let m = build_covariance_matrix(model, sites).unwrap();
    (0..sites.len()).map(|i| (0..sites.len()).map(|j| m.get(i, j)).collect()).collect()
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `log |det A|` by LU with partial pivoting.
pub fn log_abs_det(a: &Dense) -> f64 {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = 0.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, p);
        acc += m[c][c].abs().ln();
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    acc
}

pub fn mat_vec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Explicit-inverse Gaussian log-likelihood.
pub fn oracle_loglik(model: &CovarianceModel, d: &Dataset) -> f64 {
    let n = d.len() as f64;
    let sigma = dense(model, &d.sites);
    let r: Vec<f64> = d.sites.iter().zip(&d.values).map(|(s, z)| z - model.mean_at(s.point())).collect();
    let q = dotp(&r, &mat_vec(&inverse(&sigma), &r));
    -0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_abs_det(&sigma) - 0.5 * q
}

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform_open(rng)
}

/// The families exercised by the property suites.
pub const FAMILIES: [&str; 5] = ["nugget", "matern", "nonstat", "gneiting", "bivariate"];

/// A random valid model of `family` and a design of roughly `n` rows for it.
pub fn random_instance(family: &str, n: usize, seed: u64) -> (CovarianceModel, Vec<Site>) {
    let mut r = stream(seed, family);
    match family {
        "nugget" => (
            CovarianceModel::MeanPlusNugget { surface: MeanSurface::Mean1a, tau: uniform(&mut r, 0.1, 1.0) },
            spatial_sites(&sample_uniform_locations(n, seed).unwrap()),
        ),
        "matern" => (
            CovarianceModel::StationaryMatern(MaternParams {
                variance: uniform(&mut r, 0.5, 2.0),
                range: uniform(&mut r, 0.03, 0.2),
                smoothness: uniform(&mut r, 0.3, 1.6),
                nugget: uniform(&mut r, 0.01, 0.3),
            }),
            spatial_sites(&sample_uniform_locations(n, seed).unwrap()),
        ),
        "nonstat" => {
            let mut m = NonstatMaternModel::competition_default();
            for s in m.sites.iter_mut() {
                s.sigma *= uniform(&mut r, 0.7, 1.3);
                s.lambda1 *= uniform(&mut r, 0.7, 1.3);
                s.lambda2 *= uniform(&mut r, 0.7, 1.3);
            }
            m.rotation = uniform(&mut r, 0.0, std::f64::consts::FRAC_PI_2);
            m.smoothness = uniform(&mut r, 0.5, 1.2);
            (CovarianceModel::NonstatMatern(m), spatial_sites(&sample_uniform_locations(n, seed).unwrap()))
        }
        "gneiting" => {
            let slots = 4;
            let locs = sample_uniform_locations(n.div_ceil(slots), seed).unwrap();
            (
                CovarianceModel::Gneiting(GneitingParams {
                    variance: uniform(&mut r, 0.5, 1.5),
                    space_range: uniform(&mut r, 0.02, 0.3),
                    time_range: uniform(&mut r, 0.2, 1.0),
                    alpha: uniform(&mut r, 0.1, 1.0),
                    beta: uniform(&mut r, 0.1, 1.0),
                    smoothness: uniform(&mut r, 0.5, 1.5),
                }),
                spacetime_sites(&make_spacetime_design(&locs, slots).unwrap()),
            )
        }
        "bivariate" => {
            let nu = [uniform(&mut r, 0.5, 1.5), uniform(&mut r, 0.5, 1.5)];
            (
                CovarianceModel::BivariateMatern(BivariateMaternParams {
                    flavor: BivariateFlavor::Parsimonious,
                    variance: [uniform(&mut r, 0.5, 1.5), uniform(&mut r, 0.5, 1.5)],
                    beta12: uniform(&mut r, -0.8, 0.8),
                    smoothness: nu,
                    range: [0.1, 0.1],
                    tau_bar: 0.0,
                }),
                bivariate_sites(&sample_uniform_locations(n.div_ceil(2), seed).unwrap()),
            )
        }
        other => panic!("unknown family {other}"),
    }
}

pub fn simulated(family: &str, n: usize, seed: u64) -> (CovarianceModel, Dataset) {
    let (model, sites) = random_instance(family, n, seed);
    let d = sample_grf(&model, &sites, seed).unwrap();
    (model, d)
}

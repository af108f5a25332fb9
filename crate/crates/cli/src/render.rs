//! Nearest-neighbour heat maps written as binary PPM.

use std::path::Path;

use geostat_core::fields::{read_table, spatial_sites, write_atomic, DatasetKind, Point, Table};
use geostat_core::neighbors::KdTree;
use geostat_core::{AxisScale, Error, Result};

use crate::options::Opts;

const DEFAULT_RESOLUTION: usize = 100;
const LOW: [f64; 3] = [20.0, 40.0, 160.0];
const HIGH: [f64; 3] = [250.0, 220.0, 40.0];

/// Points and values to draw: a spatial file, or one time slot of a space-time file.
fn slice(table: &Table, time: Option<f64>) -> Result<(Vec<Point>, Vec<f64>)> {
    let values = table.column("z").or_else(|_| table.column("zhat"))?;
    match table.kind {
        DatasetKind::Spatial => Ok((table.sites.iter().map(|s| s.point()).collect(), values.to_vec())),
        DatasetKind::Bivariate => Err(Error::UnsupportedKind("cannot render a bivariate file".into())),
        DatasetKind::SpaceTime => {
            let t = match time {
                Some(t) => t,
                None => {
                    let mut times: Vec<f64> = table.sites.iter().filter_map(|s| s.time()).collect();
                    times.sort_by(f64::total_cmp);
                    times.dedup();
                    if times.len() != 1 {
                        return Err(Error::UnsupportedKind(format!(
                            "file has {} time slots; pick one with --time",
                            times.len()
                        )));
                    }
                    times[0]
                }
            };
            let (pts, vals): (Vec<Point>, Vec<f64>) = table
                .sites
                .iter()
                .zip(values)
                .filter(|(s, _)| s.time() == Some(t))
                .map(|(s, v)| (s.point(), *v))
                .unzip();
            if pts.is_empty() {
                return Err(Error::InvalidParameter(format!("no rows at time {t}")));
            }
            Ok((pts, vals))
        }
    }
}

/// Binary PPM of `side × side` pixels, top row at y = 1.
pub fn heat_map(points: &[Point], values: &[f64], side: usize) -> Result<Vec<u8>> {
    if points.is_empty() || side == 0 {
        return Err(Error::EmptyInput);
    }
    let tree = KdTree::from_sites(&spatial_sites(points), &AxisScale::default());
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P6\n{side} {side}\n255\n").into_bytes();
    out.reserve(3 * side * side);
    for row in 0..side {
        let y = 1.0 - (row as f64 + 0.5) / side as f64;
        for col in 0..side {
            let x = (col as f64 + 0.5) / side as f64;
            let i = tree.nearest(&[x, y, 0.0], 1, |_| true)[0];
            let f = if span > 0.0 { (values[i] - lo) / span } else { 0.0 };
            for c in 0..3 {
                out.push((LOW[c] + f * (HIGH[c] - LOW[c])).round() as u8);
            }
        }
    }
    Ok(out)
}

pub fn cmd_render(o: &Opts, input: &Path) -> Result<()> {
    let out = o.out()?;
    let table = read_table(input)?;
    let (points, values) = slice(&table, o.time)?;
    let side = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    write_atomic(out, &heat_map(&points, &values, side)?)?;
    println!("{side}x{side} image of {} points -> {}", points.len(), out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixels(img: &[u8]) -> &[u8] {
        let mut newlines = 0;
        let start = img
            .iter()
            .position(|&b| {
                newlines += (b == b'\n') as usize;
                newlines == 3
            })
            .unwrap();
        &img[start + 1..]
    }

    #[test]
    fn constant_field_is_uniform() {
        let pts = [Point::new(0.2, 0.3), Point::new(0.7, 0.8)];
        let img = heat_map(&pts, &[1.5, 1.5], 8).unwrap();
        let px = pixels(&img);
        assert_eq!(px.len(), 3 * 64);
        assert!(px.chunks(3).all(|c| c == &px[..3]));
    }

    #[test]
    fn two_by_two_grid_gives_columns() {
        let pts = [Point::new(0.25, 0.25), Point::new(0.75, 0.25), Point::new(0.25, 0.75), Point::new(0.75, 0.75)];
        let img = heat_map(&pts, &[0.0, 1.0, 0.0, 1.0], 4).unwrap();
        let px = pixels(&img);
        for row in 0..4 {
            for col in 0..4 {
                let c = &px[3 * (4 * row + col)..3 * (4 * row + col) + 3];
                let want = if col < 2 { LOW } else { HIGH };
                assert_eq!(c, want.map(|v| v as u8), "row {row} col {col}");
            }
        }
    }
}

//! Observation sites, datasets, location designs and train/test splitting.

mod io;
mod split;

use std::collections::{BTreeMap, HashSet};

pub use io::{
    fmt_f64, key_columns, read_dataset, read_table, read_table_from, sidecar_path, write_atomic, write_dataset,
    write_table, Table,
};
pub use split::{split, test_count, SplitKind, SplitScheme, TrainTestSplit};

use crate::error::{Error, Result};
use crate::rng;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn in_unit_square(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && (-UNIT_TOL..=1.0 + UNIT_TOL).contains(&self.x)
            && (-UNIT_TOL..=1.0 + UNIT_TOL).contains(&self.y)
    }

    /// Exact identity of the coordinates, usable as a hash key.
    pub fn bits(&self) -> (u64, u64) {
        (self.x.to_bits(), self.y.to_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub point: Point,
    /// Time-slot index, stored as a real.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    First,
    Second,
}

impl Variable {
    /// 1-based index as written in files.
    pub fn index(self) -> usize {
        match self {
            Variable::First => 1,
            Variable::Second => 2,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Variable::First),
            2 => Ok(Variable::Second),
            other => Err(Error::VariableIndexOutOfRange(other)),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Variable::First => Variable::Second,
            Variable::Second => Variable::First,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    Spatial,
    SpaceTime,
    Bivariate,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Spatial => "spatial",
            DatasetKind::SpaceTime => "spacetime",
            DatasetKind::Bivariate => "bivariate",
        }
    }
}

/// One observation row: a location plus its time slot or variable tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Spatial(Point),
    SpaceTime(SpaceTimePoint),
    Bivariate(Point, Variable),
}

impl Site {
    pub fn point(&self) -> Point {
        match *self {
            Site::Spatial(p) | Site::Bivariate(p, _) => p,
            Site::SpaceTime(st) => st.point,
        }
    }

    pub fn time(&self) -> Option<f64> {
        match self {
            Site::SpaceTime(st) => Some(st.t),
            _ => None,
        }
    }

    pub fn variable(&self) -> Option<Variable> {
        match self {
            Site::Bivariate(_, v) => Some(*v),
            _ => None,
        }
    }

    pub fn kind(&self) -> DatasetKind {
        match self {
            Site::Spatial(_) => DatasetKind::Spatial,
            Site::SpaceTime(_) => DatasetKind::SpaceTime,
            Site::Bivariate(..) => DatasetKind::Bivariate,
        }
    }
}

pub type Metadata = BTreeMap<String, String>;

/// Observations `Z` at a list of sites of one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub sites: Vec<Site>,
    pub values: Vec<f64>,
    pub metadata: Metadata,
}

impl Dataset {
    pub fn new(kind: DatasetKind, sites: Vec<Site>, values: Vec<f64>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: sites.len(), got: values.len() });
        }
        check_sites(kind, &sites)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at row {i}")));
        }
        Ok(Self { kind, sites, values, metadata: Metadata::new() })
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Rows at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            kind: self.kind,
            sites: indices.iter().map(|&i| self.sites[i]).collect(),
            values: indices.iter().map(|&i| self.values[i]).collect(),
            metadata: self.metadata.clone(),
        }
    }

    /// Bivariate datasets hold every location exactly twice, once per variable.
    pub fn check_bivariate_pairs(&self) -> Result<()> {
        if self.kind != DatasetKind::Bivariate {
            return Ok(());
        }
        let mut seen: BTreeMap<(u64, u64), [usize; 2]> = BTreeMap::new();
        for s in &self.sites {
            let v = s.variable().map(|v| v.index() - 1).unwrap_or(0);
            seen.entry(s.point().bits()).or_default()[v] += 1;
        }
        match seen.iter().find(|(_, c)| **c != [1, 1]) {
            Some((k, c)) => Err(Error::InvalidParameter(format!(
                "location ({}, {}) has {} first-variable and {} second-variable rows",
                f64::from_bits(k.0),
                f64::from_bits(k.1),
                c[0],
                c[1]
            ))),
            None => Ok(()),
        }
    }
}

pub(crate) fn check_sites(kind: DatasetKind, sites: &[Site]) -> Result<()> {
    for (i, s) in sites.iter().enumerate() {
        if s.kind() != kind {
            return Err(Error::KindMismatch(format!(
                "row {i} is {} in a {} dataset",
                s.kind().name(),
                kind.name()
            )));
        }
        if !s.point().in_unit_square() {
            return Err(Error::InvalidParameter(format!("row {i} lies outside the unit square")));
        }
        if let Some(t) = s.time() {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!("row {i} has invalid time {t}")));
            }
        }
    }
    Ok(())
}

/// `k²` cell centres of a regular grid, x varying fastest.
pub fn make_grid(k: usize) -> Result<Vec<Point>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("grid side {k} must be at least 2")));
    }
    let step = 1.0 / k as f64;
    Ok((0..k)
        .flat_map(|j| (0..k).map(move |i| Point::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step)))
        .collect())
}

/// `n` distinct uniform points in the unit square.
pub fn sample_uniform_locations(n: usize, seed: u64) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one location".into()));
    }
    let mut stream = rng::stream(seed, rng::LOCATIONS);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng::uniform_open(&mut stream), rng::uniform_open(&mut stream));
        if seen.insert(p.bits()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Cross product of locations and time slots `0..m`, time-major.
pub fn make_spacetime_design(spatial: &[Point], m: usize) -> Result<Vec<SpaceTimePoint>> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one time slot".into()));
    }
    Ok((0..m)
        .flat_map(|t| spatial.iter().map(move |&point| SpaceTimePoint { point, t: t as f64 }))
        .collect())
}

pub fn spatial_sites(points: &[Point]) -> Vec<Site> {
    points.iter().map(|&p| Site::Spatial(p)).collect()
}

pub fn spacetime_sites(points: &[SpaceTimePoint]) -> Vec<Site> {
    points.iter().map(|&p| Site::SpaceTime(p)).collect()
}

/// Two rows per location, the pair adjacent: `(p₁,1), (p₁,2), (p₂,1), …`.
pub fn bivariate_sites(points: &[Point]) -> Vec<Site> {
    points
        .iter()
        .flat_map(|&p| [Site::Bivariate(p, Variable::First), Site::Bivariate(p, Variable::Second)])
        .collect()
}

//! The published dataset configurations.

use super::CovarianceModel;
use crate::error::{Error, Result};
use crate::fields::{
    bivariate_sites, make_grid, make_spacetime_design, sample_uniform_locations, spacetime_sites,
    spatial_sites, DatasetKind, Metadata, Site, SplitKind,
};
use crate::kernels::{
    BivariateFlavor, BivariateMaternParams, GneitingParams, MeanSurface, NonstatMaternModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Regular grid of `round(√n)²` cell centres.
    Grid,
    /// Distinct uniform locations drawn from the seed.
    Uniform,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::Grid => "grid",
            Layout::Uniform => "uniform",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "grid" => Some(Layout::Grid),
            "uniform" => Some(Layout::Uniform),
            _ => None,
        }
    }
}

/// How to lay out the sites of a dataset and how it is meant to be split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRecipe {
    pub layout: Layout,
    /// Number of spatial locations.
    pub locations: usize,
    /// Time slots, for space-time designs.
    pub slots: Option<usize>,
    pub scheme: SplitKind,
}

impl DesignRecipe {
    pub fn sites(&self, kind: DatasetKind, seed: u64) -> Result<Vec<Site>> {
        if self.locations == 0 {
            return Err(Error::InvalidParameter("design needs at least one location".into()));
        }
        let points = match self.layout {
            Layout::Grid => make_grid(((self.locations as f64).sqrt().round() as usize).max(2))?,
            Layout::Uniform => sample_uniform_locations(self.locations, seed)?,
        };
        Ok(match kind {
            DatasetKind::Spatial => spatial_sites(&points),
            DatasetKind::Bivariate => bivariate_sites(&points),
            DatasetKind::SpaceTime => {
                let m = self
                    .slots
                    .ok_or_else(|| Error::InvalidParameter("space-time design needs a slot count".into()))?;
                spacetime_sites(&make_spacetime_design(&points, m)?)
            }
        })
    }

    pub fn write_metadata(&self, meta: &mut Metadata) {
        meta.insert("design.layout".into(), self.layout.name().into());
        meta.insert("design.locations".into(), self.locations.to_string());
        if let Some(m) = self.slots {
            meta.insert("design.slots".into(), m.to_string());
        }
        meta.insert("design.scheme".into(), self.scheme.name().into());
    }

    pub fn from_metadata(meta: &Metadata) -> Result<Self> {
        let get = |k: &str| meta.get(k).ok_or_else(|| Error::Parse(format!("metadata lacks `{k}`")));
        let count = |k: &str| -> Result<usize> {
            get(k)?.parse().map_err(|_| Error::Parse(format!("`{k}` is not a count")))
        };
        let layout = Layout::from_name(get("design.layout")?)
            .ok_or_else(|| Error::Parse("unknown design layout".into()))?;
        let scheme = SplitKind::from_name(get("design.scheme")?)
            .ok_or_else(|| Error::Parse("unknown split scheme".into()))?;
        let slots = if meta.contains_key("design.slots") { Some(count("design.slots")?) } else { None };
        Ok(Self { layout, locations: count("design.locations")?, slots, scheme })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub model: CovarianceModel,
    pub design: DesignRecipe,
}

impl Preset {
    /// Changes the number of time slots of a space-time preset.
    pub fn with_slots(mut self, m: usize) -> Result<Self> {
        if self.design.slots.is_none() {
            return Err(Error::InvalidParameter(format!("{} has no time axis", self.name)));
        }
        self.design.slots = Some(m);
        Ok(self)
    }
}

const SPACETIME_SLOTS: usize = 100;

pub fn preset_names() -> Vec<String> {
    let mut v: Vec<String> = ["1a-1", "1b-1", "1a-2", "1b-2"].iter().map(|s| s.to_string()).collect();
    v.extend((1..=18).map(|i| format!("ST{i}")));
    v.extend(["3a-1", "3a-2", "3a-3", "3b-1", "3b-2", "3b-3"].iter().map(|s| s.to_string()));
    v
}

/// Looks up a published configuration. `n` overrides the number of locations
/// (grid presets round it to a square); parameters never change.
pub fn preset(name: &str, n: Option<usize>) -> Result<Preset> {
    let (model, mut design) = lookup(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::InvalidParameter("preset size must be positive".into()));
        }
        design.locations = n;
    }
    Ok(Preset { name: name.to_string(), model, design })
}

fn spatial(layout: Layout, locations: usize) -> DesignRecipe {
    DesignRecipe { layout, locations, slots: None, scheme: SplitKind::Random10 }
}

fn lookup(name: &str) -> Option<(CovarianceModel, DesignRecipe)> {
    let nonstat = || CovarianceModel::NonstatMatern(NonstatMaternModel::competition_default());
    match name {
        "1a-1" => Some((
            CovarianceModel::MeanPlusNugget { surface: MeanSurface::Mean1a, tau: 0.1 },
            spatial(Layout::Grid, 100_000),
        )),
        "1b-1" => Some((
            CovarianceModel::MeanPlusNugget { surface: MeanSurface::Mean1b, tau: 0.3 },
            spatial(Layout::Grid, 1_000_000),
        )),
        "1a-2" => Some((nonstat(), spatial(Layout::Uniform, 100_000))),
        "1b-2" => Some((nonstat(), spatial(Layout::Uniform, 1_000_000))),
        _ => spacetime(name).or_else(|| bivariate(name)),
    }
}

fn spacetime(name: &str) -> Option<(CovarianceModel, DesignRecipe)> {
    let i: usize = name.strip_prefix("ST")?.parse().ok()?;
    if !(1..=18).contains(&i) {
        return None;
    }
    // Rows cycle through three parameter settings, blocks of three through the schemes.
    let (alpha, a_s, a_t) = match (i - 1) % 3 {
        0 => (0.6, 0.02, 1.0),
        1 => (0.6, 0.08, 0.24),
        _ => (0.08, 0.4, 1.0),
    };
    let scheme = match ((i - 1) / 3) % 3 {
        0 => SplitKind::Rs,
        1 => SplitKind::Rst,
        _ => SplitKind::T10,
    };
    let locations = if i <= 9 { 1_000 } else { 10_000 };
    let model = CovarianceModel::Gneiting(GneitingParams {
        variance: 0.9,
        space_range: a_s,
        time_range: a_t,
        alpha,
        beta: 0.9,
        smoothness: 1.0,
    });
    Some((
        model,
        DesignRecipe { layout: Layout::Uniform, locations, slots: Some(SPACETIME_SLOTS), scheme },
    ))
}

fn bivariate(name: &str) -> Option<(CovarianceModel, DesignRecipe)> {
    let (locations, setting) = match name {
        "3a-1" => (25_000, 1),
        "3a-2" => (25_000, 2),
        "3a-3" => (25_000, 3),
        "3b-1" => (250_000, 1),
        "3b-2" => (250_000, 2),
        "3b-3" => (250_000, 3),
        _ => return None,
    };
    let (flavor, smoothness, range) = match setting {
        1 => (BivariateFlavor::Parsimonious, [0.6, 1.4], [0.03, 0.03]),
        2 => (BivariateFlavor::Flexible, [0.9, 0.9], [0.02, 0.3]),
        _ => (BivariateFlavor::Flexible, [0.6, 1.4], [0.03, 0.1]),
    };
    let model = CovarianceModel::BivariateMatern(BivariateMaternParams {
        flavor,
        variance: [0.9, 0.9],
        beta12: 0.9,
        smoothness,
        range,
        tau_bar: 0.0,
    });
    Some((model, spatial(Layout::Uniform, locations)))
}

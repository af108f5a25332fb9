use std::collections::HashMap;

use rand::seq::index;

use super::{Dataset, DatasetKind};
use crate::error::{Error, Result};
use crate::rng;

/// Number of trailing time slots held out by [`SplitKind::T10`].
const T10_SLOTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitKind {
    /// Random rows (spatial) or random locations with both variables (bivariate).
    Random10,
    /// Random spatial locations, all of their time replicates.
    Rs,
    /// Random space-time rows.
    Rst,
    /// Every location on the last ten time slots.
    T10,
}

impl SplitKind {
    pub fn name(self) -> &'static str {
        match self {
            SplitKind::Random10 => "random10",
            SplitKind::Rs => "rs",
            SplitKind::Rst => "rst",
            SplitKind::T10 => "t10",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random10" | "random" => Some(SplitKind::Random10),
            "rs" => Some(SplitKind::Rs),
            "rst" => Some(SplitKind::Rst),
            "t10" => Some(SplitKind::T10),
            _ => None,
        }
    }

    fn accepts(self, kind: DatasetKind) -> bool {
        match self {
            SplitKind::Random10 => matches!(kind, DatasetKind::Spatial | DatasetKind::Bivariate),
            SplitKind::Rs | SplitKind::Rst | SplitKind::T10 => kind == DatasetKind::SpaceTime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitScheme {
    pub kind: SplitKind,
    pub test_fraction: f64,
}

impl SplitScheme {
    pub fn new(kind: SplitKind) -> Self {
        Self { kind, test_fraction: 0.1 }
    }

    pub fn with_fraction(kind: SplitKind, test_fraction: f64) -> Self {
        Self { kind, test_fraction }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTestSplit {
    pub train: Dataset,
    pub test: Dataset,
    pub test_indices: Vec<usize>,
}

/// `round(fraction·count)` rounding halves up, kept within `[1, count − 1]`.
pub fn test_count(fraction: f64, count: usize) -> usize {
    let raw = (fraction * count as f64 + 0.5).floor() as usize;
    raw.clamp(1, count.saturating_sub(1).max(1))
}

pub fn split(d: &Dataset, scheme: SplitScheme, seed: u64) -> Result<TrainTestSplit> {
    if !scheme.kind.accepts(d.kind) {
        return Err(Error::IncompatibleScheme(format!(
            "{} cannot split a {} dataset",
            scheme.kind.name(),
            d.kind.name()
        )));
    }
    if scheme.kind != SplitKind::T10 && !(scheme.test_fraction > 0.0 && scheme.test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction {} outside (0, 1)",
            scheme.test_fraction
        )));
    }
    let mut stream = rng::stream(seed, rng::SPLIT);
    let n = d.len();

    let mut test_indices: Vec<usize> = match scheme.kind {
        SplitKind::Random10 if d.kind == DatasetKind::Bivariate => {
            d.check_bivariate_pairs()?;
            let groups = location_groups(d);
            draw_groups(&groups, scheme.test_fraction, &mut stream)?
        }
        SplitKind::Random10 | SplitKind::Rst => {
            require_two(n)?;
            index::sample(&mut stream, n, test_count(scheme.test_fraction, n)).into_vec()
        }
        SplitKind::Rs => {
            let groups = location_groups(d);
            draw_groups(&groups, scheme.test_fraction, &mut stream)?
        }
        SplitKind::T10 => {
            let mut times: Vec<f64> = d.sites.iter().filter_map(|s| s.time()).collect();
            times.sort_by(f64::total_cmp);
            times.dedup();
            if times.len() <= T10_SLOTS {
                return Err(Error::IncompatibleScheme(format!(
                    "t10 needs more than {T10_SLOTS} time slots, found {}",
                    times.len()
                )));
            }
            let cutoff = times[times.len() - T10_SLOTS];
            (0..n).filter(|&i| d.sites[i].time().is_some_and(|t| t >= cutoff)).collect()
        }
    };
    test_indices.sort_unstable();

    let mut is_test = vec![false; n];
    for &i in &test_indices {
        is_test[i] = true;
    }
    let train_indices: Vec<usize> = (0..n).filter(|&i| !is_test[i]).collect();
    let mut train = d.select(&train_indices);
    let mut test = d.select(&test_indices);
    for (part, name) in [(&mut train, "train"), (&mut test, "test")] {
        part.metadata.insert("split.scheme".into(), scheme.kind.name().into());
        part.metadata.insert("split.fraction".into(), scheme.test_fraction.to_string());
        part.metadata.insert("split.seed".into(), seed.to_string());
        part.metadata.insert("split.part".into(), name.into());
    }
    Ok(TrainTestSplit { train, test, test_indices })
}

fn require_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::IncompatibleScheme(format!("cannot split {n} rows")));
    }
    Ok(())
}

/// Row indices grouped by exact location, groups in order of first appearance.
fn location_groups(d: &Dataset) -> Vec<Vec<usize>> {
    let mut slot: HashMap<(u64, u64), usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, s) in d.sites.iter().enumerate() {
        let g = *slot.entry(s.point().bits()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn draw_groups(groups: &[Vec<usize>], fraction: f64, stream: &mut rng::Stream) -> Result<Vec<usize>> {
    require_two(groups.len())?;
    let picked = index::sample(stream, groups.len(), test_count(fraction, groups.len()));
    Ok(picked.into_iter().flat_map(|g| groups[g].iter().copied()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{
        bivariate_sites, make_grid, make_spacetime_design, spacetime_sites, spatial_sites,
        Point,
    };

    fn spacetime(n_s: usize, m: usize) -> Dataset {
        let pts = crate::fields::sample_uniform_locations(n_s, 1).unwrap();
        let sites = spacetime_sites(&make_spacetime_design(&pts, m).unwrap());
        let values = (0..sites.len()).map(|i| i as f64).collect();
        Dataset::new(DatasetKind::SpaceTime, sites, values).unwrap()
    }

    fn assert_partition(d: &Dataset, s: &TrainTestSplit) {
        assert_eq!(s.train.len() + s.test.len(), d.len());
        assert!(s.test_indices.windows(2).all(|w| w[0] < w[1]));
        // values are the row indices in these fixtures
        let mut all: Vec<usize> =
            s.train.values.iter().chain(&s.test.values).map(|v| *v as usize).collect();
        all.sort_unstable();
        assert_eq!(all, (0..d.len()).collect::<Vec<_>>());
    }

    #[test]
    fn t10_holds_out_last_slots() {
        let d = spacetime(100, 100);
        let s = split(&d, SplitScheme::new(SplitKind::T10), 0).unwrap();
        assert_eq!(s.test.len(), 1000);
        assert!(s.train.sites.iter().all(|x| x.time().unwrap() <= 89.0));
        assert!(s.test.sites.iter().all(|x| x.time().unwrap() >= 90.0));
        assert_partition(&d, &s);
    }

    #[test]
    fn rs_removes_whole_locations() {
        let d = spacetime(50, 12);
        let s = split(&d, SplitScheme::new(SplitKind::Rs), 4).unwrap();
        assert_eq!(s.test.len(), 5 * 12);
        let test_locs: std::collections::HashSet<_> = s.test.sites.iter().map(|x| x.point().bits()).collect();
        assert_eq!(test_locs.len(), 5);
        assert!(s.train.sites.iter().all(|x| !test_locs.contains(&x.point().bits())));
        assert_partition(&d, &s);
    }

    #[test]
    fn rst_draws_rows() {
        let d = spacetime(20, 15);
        let s = split(&d, SplitScheme::new(SplitKind::Rst), 4).unwrap();
        assert_eq!(s.test.len(), 30);
        assert_partition(&d, &s);
    }

    #[test]
    fn bivariate_keeps_pairs() {
        let pts = crate::fields::sample_uniform_locations(250, 3).unwrap();
        let sites = bivariate_sites(&pts);
        let values = (0..sites.len()).map(|i| i as f64).collect();
        let d = Dataset::new(DatasetKind::Bivariate, sites, values).unwrap();
        let s = split(&d, SplitScheme::new(SplitKind::Random10), 8).unwrap();
        assert_eq!(s.test.len(), 50);
        assert!(s.test.check_bivariate_pairs().is_ok());
        assert!(s.train.check_bivariate_pairs().is_ok());
        assert_partition(&d, &s);
    }

    #[test]
    fn rounding_rule() {
        let sites = spatial_sites(&make_grid(4).unwrap()[..10]);
        let values = (0..10).map(|i| i as f64).collect();
        let d = Dataset::new(DatasetKind::Spatial, sites, values).unwrap();
        let s = split(&d, SplitScheme::new(SplitKind::Random10), 1).unwrap();
        assert_eq!(s.test.len(), 1);
        assert_eq!(test_count(0.1, 25), 3);
        assert_eq!(test_count(0.1, 100_000), 10_000);
        assert_eq!(test_count(0.1, 3), 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let d = spacetime(30, 5);
        let a = split(&d, SplitScheme::new(SplitKind::Rst), 11).unwrap();
        let b = split(&d, SplitScheme::new(SplitKind::Rst), 11).unwrap();
        let c = split(&d, SplitScheme::new(SplitKind::Rst), 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.test_indices, c.test_indices);
    }

    #[test]
    fn incompatible_schemes() {
        let d = spacetime(10, 5);
        assert!(matches!(
            split(&d, SplitScheme::new(SplitKind::Random10), 0),
            Err(Error::IncompatibleScheme(_))
        ));
        // only five slots: nothing left to train on
        assert!(matches!(split(&d, SplitScheme::new(SplitKind::T10), 0), Err(Error::IncompatibleScheme(_))));
        let sp = Dataset::new(DatasetKind::Spatial, spatial_sites(&[Point::new(0.5, 0.5)]), vec![1.0]).unwrap();
        assert!(matches!(split(&sp, SplitScheme::new(SplitKind::Rs), 0), Err(Error::IncompatibleScheme(_))));
        assert!(split(&sp, SplitScheme::new(SplitKind::Random10), 0).is_err());
    }
}

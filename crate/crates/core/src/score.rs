//! RMSE, MCRMSE and leaderboards.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::fields::{Site, Table};

pub fn rmse(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: predicted.len() });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    if predicted.iter().chain(truth).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value in rmse input".into()));
    }
    let ss: f64 = predicted.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((ss / truth.len() as f64).sqrt())
}

pub fn mcrmse(rmses: &[f64]) -> Result<f64> {
    if rmses.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(rmses.iter().sum::<f64>() / rmses.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetScore {
    pub name: String,
    pub rmse: f64,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub per_dataset: Vec<DatasetScore>,
    pub mcrmse: f64,
}

impl ScoreReport {
    pub fn new(per_dataset: Vec<DatasetScore>) -> Result<Self> {
        let rmses: Vec<f64> = per_dataset.iter().map(|d| d.rmse).collect();
        let mcrmse = mcrmse(&rmses)?;
        Ok(Self { per_dataset, mcrmse })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("dataset,rmse,n_test\n");
        for d in &self.per_dataset {
            s.push_str(&format!("{},{},{}\n", d.name, d.rmse, d.n_test));
        }
        s.push_str(&format!("MCRMSE,{},{}\n", self.mcrmse, self.per_dataset.iter().map(|d| d.n_test).sum::<usize>()));
        s
    }

    pub fn to_kv(&self) -> std::collections::BTreeMap<String, String> {
        let mut m = std::collections::BTreeMap::new();
        for d in &self.per_dataset {
            m.insert(format!("rmse.{}", d.name), format!("{}", d.rmse));
            m.insert(format!("n_test.{}", d.name), d.n_test.to_string());
        }
        m.insert("mcrmse".into(), format!("{}", self.mcrmse));
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standing {
    pub rank: usize,
    pub name: String,
    pub mcrmse: f64,
}

/// Ascending by score, ties ordered by name and sharing the better rank.
pub fn leaderboard(entries: &[(String, f64)]) -> Result<Vec<Standing>> {
    let mut names = BTreeSet::new();
    for (n, _) in entries {
        if !names.insert(n.as_str()) {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    let mut sorted: Vec<&(String, f64)> = entries.iter().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut out: Vec<Standing> = Vec::with_capacity(sorted.len());
    for (i, (name, score)) in sorted.into_iter().enumerate() {
        let rank = match out.last() {
            Some(prev) if prev.mcrmse == *score => prev.rank,
            _ => i + 1,
        };
        out.push(Standing { rank, name: name.clone(), mcrmse: *score });
    }
    Ok(out)
}

/// Join key of a row: coordinates rounded to 12 decimals, time, variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowKey {
    x: i64,
    y: i64,
    t: Option<i64>,
    var: Option<usize>,
}

fn round12(v: f64) -> i64 {
    (v * 1e12).round() as i64
}

impl RowKey {
    pub fn of(site: &Site) -> Self {
        let p = site.point();
        RowKey {
            x: round12(p.x),
            y: round12(p.y),
            t: site.time().map(round12),
            var: site.variable().map(|v| v.index()),
        }
    }
}

/// Pairs each truth row with the submission row of the same key.
/// Returns `(predicted, truth)` in truth order.
pub fn join_by_key(
    truth_sites: &[Site],
    truth: &[f64],
    sub_sites: &[Site],
    predicted: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lookup: HashMap<RowKey, f64> = HashMap::with_capacity(sub_sites.len());
    for (s, v) in sub_sites.iter().zip(predicted) {
        if lookup.insert(RowKey::of(s), *v).is_some() {
            return Err(Error::KeyMismatch(format!("submission repeats the row at {:?}", s)));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(truth.len());
    for s in truth_sites {
        let k = RowKey::of(s);
        if !seen.insert(k) {
            return Err(Error::KeyMismatch(format!("truth repeats the row at {:?}", s)));
        }
        match lookup.get(&k) {
            Some(v) => out.push(*v),
            None => return Err(Error::KeyMismatch(format!("no prediction for the row at {:?}", s))),
        }
    }
    if lookup.len() != truth_sites.len() {
        return Err(Error::KeyMismatch(format!(
            "submission has {} rows, truth has {}",
            lookup.len(),
            truth_sites.len()
        )));
    }
    Ok((out, truth.to_vec()))
}

/// RMSE of a submission table (`zhat`) against a truth table (`z`).
pub fn score_tables(name: &str, truth: &Table, submission: &Table) -> Result<DatasetScore> {
    if truth.kind != submission.kind {
        return Err(Error::KeyMismatch(format!(
            "truth is {} but the submission is {}",
            truth.kind.name(),
            submission.kind.name()
        )));
    }
    let (p, t) = join_by_key(&truth.sites, truth.column("z")?, &submission.sites, submission.column("zhat")?)?;
    Ok(DatasetScore { name: name.to_string(), rmse: rmse(&p, &t)?, n_test: t.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Point, SpaceTimePoint};

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[2.0; 7], &[1.0; 7]).unwrap(), 1.0);
        assert!((rmse(&[3.0, 4.0], &[0.0, 0.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(rmse(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(rmse(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mcrmse_examples() {
        assert_eq!(mcrmse(&[0.4]).unwrap(), 0.4);
        assert!((mcrmse(&[0.1, 0.3]).unwrap() - 0.2).abs() < 1e-15);
        assert!((mcrmse(&[0.7; 9]).unwrap() - 0.7).abs() < 1e-15);
        assert!(mcrmse(&[]).is_err());
    }

    #[test]
    fn leaderboard_examples() {
        let e = |v: &[(&str, f64)]| v.iter().map(|(n, s)| (n.to_string(), *s)).collect::<Vec<_>>();
        let b = leaderboard(&e(&[("A", 0.2), ("B", 0.1)])).unwrap();
        assert_eq!((b[0].name.as_str(), b[0].rank, b[1].rank), ("B", 1, 2));
        let b = leaderboard(&e(&[("C", 0.2), ("B", 0.1), ("A", 0.1)])).unwrap();
        let ranks: Vec<(&str, usize)> = b.iter().map(|s| (s.name.as_str(), s.rank)).collect();
        assert_eq!(ranks, vec![("A", 1), ("B", 1), ("C", 3)]);
        assert!(matches!(leaderboard(&e(&[("A", 0.1), ("A", 0.2)])), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn join_tolerates_reordering_and_rounding() {
        let s = |x: f64, t: f64| Site::SpaceTime(SpaceTimePoint { point: Point::new(x, 0.5), t });
        let truth = [s(0.1, 0.0), s(0.2, 1.0)];
        let sub = [s(0.2 + 1e-15, 1.0), s(0.1, 0.0)];
        let (p, t) = join_by_key(&truth, &[1.0, 2.0], &sub, &[20.0, 10.0]).unwrap();
        assert_eq!(p, vec![10.0, 20.0]);
        assert_eq!(t, vec![1.0, 2.0]);
        assert!(matches!(join_by_key(&truth, &[1.0, 2.0], &sub[..1], &[20.0]), Err(Error::KeyMismatch(_))));
        assert!(matches!(
            join_by_key(&truth, &[1.0, 2.0], &[s(0.1, 0.0), s(0.1, 0.0)], &[1.0, 1.0]),
            Err(Error::KeyMismatch(_))
        ));
    }
}

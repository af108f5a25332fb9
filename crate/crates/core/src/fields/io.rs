//! CSV tables of sites plus value columns.
//!
//! Key columns are `x,y` followed by `t` (space-time) or `var` (bivariate).
//! Any further columns are numeric: `z` for observations, `zhat,kvar` for
//! predictions. Floats are written in the shortest representation that
//! parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{check_sites, Dataset, DatasetKind, Point, Site, SpaceTimePoint, Variable};
use crate::error::{Error, Result};
use crate::kvtext;

/// A parsed CSV: typed sites plus every other column by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: DatasetKind,
    pub sites: Vec<Site>,
    pub columns: BTreeMap<String, Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    }
}

pub fn key_columns(kind: DatasetKind) -> &'static [&'static str] {
    match kind {
        DatasetKind::Spatial => &["x", "y"],
        DatasetKind::SpaceTime => &["x", "y", "t"],
        DatasetKind::Bivariate => &["x", "y", "var"],
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let file = fs::File::open(path.as_ref())?;
    read_table_from(file)
}

pub fn read_table_from(reader: impl Read) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let pos = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ix), Some(iy)) = (pos("x"), pos("y")) else {
        return Err(Error::Parse("header must contain `x` and `y`".into()));
    };
    let it = pos("t");
    let ivar = pos("var");
    let kind = match (it, ivar) {
        (None, None) => DatasetKind::Spatial,
        (Some(_), None) => DatasetKind::SpaceTime,
        (None, Some(_)) => DatasetKind::Bivariate,
        (Some(_), Some(_)) => return Err(Error::Parse("header has both `t` and `var`".into())),
    };
    let extra: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| ![Some(ix), Some(iy), it, ivar].contains(&Some(*i)))
        .map(|(i, h)| (i, h.clone()))
        .collect();

    let mut sites = Vec::new();
    let mut columns: BTreeMap<String, Vec<f64>> =
        extra.iter().map(|(_, h)| (h.clone(), Vec::new())).collect();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            let raw = rec.get(i).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: `{raw}` is not a number", line + 2)))
        };
        let p = Point::new(field(ix)?, field(iy)?);
        let site = match kind {
            DatasetKind::Spatial => Site::Spatial(p),
            DatasetKind::SpaceTime => Site::SpaceTime(SpaceTimePoint { point: p, t: field(it.unwrap())? }),
            DatasetKind::Bivariate => {
                let v = field(ivar.unwrap())?;
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(Error::Parse(format!("row {}: variable tag {v}", line + 2)));
                }
                Site::Bivariate(p, Variable::from_index(v as usize)?)
            }
        };
        sites.push(site);
        for (i, h) in &extra {
            let v = field(*i)?;
            columns.get_mut(h).expect("column registered").push(v);
        }
    }
    check_sites(kind, &sites)?;
    Ok(Table { kind, sites, columns })
}

/// Reads a dataset CSV (`z` column required) and its `.meta` sidecar if present.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let values = table.column("z")?.to_vec();
    let mut d = Dataset::new(table.kind, table.sites, values)?;
    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        d.metadata = kvtext::read_file(&sidecar)?;
    }
    Ok(d)
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    s.into()
}

/// Writes sites and named value columns as CSV text.
pub fn write_table(out: &mut impl Write, kind: DatasetKind, sites: &[Site], columns: &[(&str, &[f64])]) -> Result<()> {
    for (name, col) in columns {
        if col.len() != sites.len() {
            return Err(Error::DimensionMismatch { expected: sites.len(), got: col.len() });
        }
        if key_columns(kind).contains(name) {
            return Err(Error::InvalidParameter(format!("`{name}` is a key column")));
        }
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let header: Vec<&str> = key_columns(kind).iter().copied().chain(columns.iter().map(|c| c.0)).collect();
    w.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for (row, site) in sites.iter().enumerate() {
        record.clear();
        let p = site.point();
        record.push(fmt_f64(p.x));
        record.push(fmt_f64(p.y));
        match site {
            Site::Spatial(_) => {}
            Site::SpaceTime(st) => record.push(fmt_f64(st.t)),
            Site::Bivariate(_, v) => record.push(v.index().to_string()),
        }
        for (_, col) in columns {
            record.push(fmt_f64(col[row]));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dataset CSV; `with_values = false` drops the `z` column (targets file).
pub fn write_dataset(path: impl AsRef<Path>, d: &Dataset, with_values: bool) -> Result<()> {
    let mut buf = Vec::new();
    if with_values {
        write_table(&mut buf, d.kind, &d.sites, &[("z", &d.values)])?;
    } else {
        write_table(&mut buf, d.kind, &d.sites, &[])?;
    }
    write_atomic(path, &buf)
}

/// Shortest round-trip decimal representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

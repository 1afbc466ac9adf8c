//! CSV ingestion and export.
//!
//! * sites: header `id,x,y`
//! * curves (wide): header `id,t_1,...,t_T` where the header tail holds the
//!   numeric grid times; one row per site id.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, ScanError};
use crate::fdata::FunctionalDataset;
use crate::geometry::{SiteGrid, SiteRecord};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| ScanError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn csv_err(origin: &str) -> impl Fn(csv::Error) -> ScanError + '_ {
    move |source| ScanError::Csv {
        path: origin.to_string(),
        source,
    }
}

fn parse_f64(field: &str, what: impl Fn() -> String) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| ScanError::invalid(format!("cannot parse `{field}` as a number ({})", what())))
}

/// Reads site records; `origin` names the source in error messages.
pub fn read_sites<R: Read>(reader: R, origin: &str) -> Result<Vec<SiteRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err(origin))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != ["id", "x", "y"] {
        return Err(ScanError::invalid(format!(
            "{origin}: sites header must be `id,x,y`, got `{}`",
            names.join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(origin))?;
        let id = rec[0].to_string();
        let where_ = || format!("{origin}, row {}", line + 2);
        out.push(SiteRecord::new(
            id,
            parse_f64(&rec[1], where_)?,
            parse_f64(&rec[2], where_)?,
        ));
    }
    if out.is_empty() {
        return Err(ScanError::invalid(format!("{origin}: no sites")));
    }
    Ok(out)
}

pub fn read_sites_csv(path: &Path) -> Result<Vec<SiteRecord>> {
    read_sites(open(path)?, &path.display().to_string())
}

/// Curves as read from disk, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub ids: Vec<String>,
    pub time_grid: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_curves<R: Read>(reader: R, origin: &str) -> Result<CurveTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err(origin))?.clone();
    if header.get(0) != Some("id") {
        return Err(ScanError::invalid(format!(
            "{origin}: curves header must start with `id`"
        )));
    }
    let time_grid = header
        .iter()
        .skip(1)
        .map(|h| parse_f64(h, || format!("{origin}, header time")))
        .collect::<Result<Vec<f64>>>()?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(origin))?;
        if rec.len() != time_grid.len() + 1 {
            return Err(ScanError::invalid(format!(
                "{origin}, row {}: expected {} values, got {}",
                line + 2,
                time_grid.len(),
                rec.len().saturating_sub(1)
            )));
        }
        ids.push(rec[0].to_string());
        rows.push(
            rec.iter()
                .skip(1)
                .map(|v| parse_f64(v, || format!("{origin}, row {}", line + 2)))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(CurveTable { ids, time_grid, rows })
}

pub fn read_curves_csv(path: &Path) -> Result<CurveTable> {
    read_curves(open(path)?, &path.display().to_string())
}

/// Pairs sites with curves by id; rows are reordered to site order.
pub fn align(records: Vec<SiteRecord>, curves: CurveTable) -> Result<(SiteGrid, FunctionalDataset)> {
    let grid = SiteGrid::new(records)?;
    let mut by_id: HashMap<String, Vec<f64>> = HashMap::with_capacity(curves.ids.len());
    for (id, row) in curves.ids.into_iter().zip(curves.rows) {
        if by_id.contains_key(&id) {
            return Err(ScanError::invalid(format!("curves: duplicate id `{id}`")));
        }
        by_id.insert(id, row);
    }
    let mut rows = Vec::with_capacity(grid.n());
    for id in grid.ids() {
        match by_id.remove(id) {
            Some(row) => rows.push(row),
            None => {
                return Err(ScanError::invalid(format!(
                    "site `{id}` has no curve in the curves file"
                )))
            }
        }
    }
    if let Some(extra) = by_id.keys().min() {
        return Err(ScanError::invalid(format!(
            "curve `{extra}` has no matching site in the sites file"
        )));
    }
    let ds = FunctionalDataset::new(grid.ids().map(String::from).collect(), curves.time_grid, rows)?;
    Ok((grid, ds))
}

pub fn load(sites: &Path, curves: &Path) -> Result<(SiteGrid, FunctionalDataset)> {
    align(read_sites_csv(sites)?, read_curves_csv(curves)?)
}

pub fn write_sites<W: Write>(writer: W, grid: &SiteGrid) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = csv_err("sites output");
    w.write_record(["id", "x", "y"]).map_err(&err)?;
    for s in grid.sites() {
        w.write_record([s.id.clone(), s.x.to_string(), s.y.to_string()])
            .map_err(&err)?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: "sites output".into(),
        source,
    })
}

pub fn write_curves<W: Write>(writer: W, ds: &FunctionalDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = csv_err("curves output");
    let mut header = vec!["id".to_string()];
    header.extend(ds.time_grid().iter().map(|t| t.to_string()));
    w.write_record(&header).map_err(&err)?;
    for (i, id) in ds.site_ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(ds.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(&err)?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: "curves output".into(),
        source,
    })
}

//! `instances.csv` and `group_stats.csv`.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GroupReport;
use crate::error::{Error, Result};

/// One row of `instances.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub experiment: u8,
    pub n: usize,
    pub delta: f64,
    pub sim_index: usize,
    pub seed: u64,
    pub err_base: f64,
    pub err_refined: f64,
    pub outlier: bool,
}

/// One row of `group_stats.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub experiment: u8,
    pub n: usize,
    pub delta: f64,
    pub kept: usize,
    pub outliers: usize,
    pub mean_diff: f64,
    pub std_diff: f64,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedCsv(format!("{other:?}")),
    }
}

pub fn instance_rows(reports: &[GroupReport]) -> Vec<InstanceRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.instances().into_iter().map(move |p| InstanceRow {
                experiment: r.experiment,
                n: r.n,
                delta: r.delta,
                sim_index: p.sim_index,
                seed: p.seed,
                err_base: p.err_base,
                err_refined: p.err_refined,
                outlier: p.outlier,
            })
        })
        .collect()
}

pub fn group_rows(reports: &[GroupReport]) -> Vec<GroupRow> {
    reports
        .iter()
        .map(|r| GroupRow {
            experiment: r.experiment,
            n: r.n,
            delta: r.delta,
            kept: r.kept.len(),
            outliers: r.outliers.len(),
            mean_diff: r.mean_diff,
            std_diff: r.std_diff,
        })
        .collect()
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    if rows.is_empty() {
        w.write_record(header).map_err(csv_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub const INSTANCE_COLUMNS: [&str; 8] = [
    "experiment",
    "n",
    "delta",
    "sim_index",
    "seed",
    "err_base",
    "err_refined",
    "outlier",
];

pub const GROUP_COLUMNS: [&str; 7] = ["experiment", "n", "delta", "kept", "outliers", "mean_diff", "std_diff"];

pub fn write_instances(path: &Path, rows: &[InstanceRow]) -> Result<()> {
    write_rows(path, rows, &INSTANCE_COLUMNS)
}

pub fn write_group_stats(path: &Path, rows: &[GroupRow]) -> Result<()> {
    write_rows(path, rows, &GROUP_COLUMNS)
}

/// Writes `instances.csv` and `group_stats.csv` into `dir`.
pub fn write_reports(dir: &Path, reports: &[GroupReport]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_instances(&dir.join("instances.csv"), &instance_rows(reports))?;
    write_group_stats(&dir.join("group_stats.csv"), &group_rows(reports))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(File::open(path)?);
    let found: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::MalformedCsv(format!("unexpected header {found:?}")));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::MalformedCsv(format!("row {}: {e}", i + 1))))
        .collect()
}

pub fn read_instances(path: &Path) -> Result<Vec<InstanceRow>> {
    read_rows(path, &INSTANCE_COLUMNS)
}

pub fn read_group_stats(path: &Path) -> Result<Vec<GroupRow>> {
    read_rows(path, &GROUP_COLUMNS)
}

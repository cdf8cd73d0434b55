//! Loading crash-rate tables from CSV.
//!
//! ```text
//! dimension,label,lower,upper,crash_rate
//! friction,Dry,0.7,0.9,1.90
//! ...
//! sampling_visibility,Clear,4000,6500,
//! ```
//!
//! `dimension` is one of `friction`, `visibility` or `sampling_visibility`.
//! Rows of a dimension are listed most-benign first. A `sampling_visibility`
//! row may leave `crash_rate` empty to take it from the `visibility` row with
//! the same label.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hazard::{BandCatalog, Dimension, HazardBand};

/// Environment variable naming a crash-rate table when no path is passed.
pub const CONFIG_ENV_VAR: &str = "HAZARD_RISK_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableSource {
    Builtin,
    File(PathBuf),
}

impl fmt::Display for TableSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableSource::Builtin => f.write_str("builtin"),
            TableSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    dimension: String,
    label: String,
    lower: f64,
    upper: f64,
    crash_rate: Option<f64>,
}

/// Parses a crash-rate table. `origin` is only used in error messages.
pub fn parse_catalog<R: Read>(reader: R, origin: &Path) -> Result<BandCatalog> {
    let config_err = |reason: String| Error::Config {
        path: origin.to_path_buf(),
        reason,
    };
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut friction = Vec::new();
    let mut visibility = Vec::new();
    let mut sampling: Vec<(usize, Row)> = Vec::new();

    for (i, row) in csv.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| config_err(format!("line {line}: {e}")))?;
        let band = |row: &Row, rate: Option<f64>| -> Result<HazardBand> {
            let dim = if row.dimension == "friction" {
                Dimension::Friction
            } else {
                Dimension::Visibility
            };
            let rate =
                rate.ok_or_else(|| config_err(format!("line {line}: crash_rate is required")))?;
            HazardBand::new(dim, row.label.clone(), row.lower, row.upper, rate)
                .map_err(|e| config_err(format!("line {line}: {e}")))
        };
        match row.dimension.as_str() {
            "friction" => friction.push(band(&row, row.crash_rate)?),
            "visibility" => visibility.push(band(&row, row.crash_rate)?),
            "sampling_visibility" => sampling.push((line, row)),
            other => {
                return Err(config_err(format!(
                    "line {line}: unknown dimension '{other}' (expected friction, visibility or sampling_visibility)"
                )))
            }
        }
    }

    let sampling_visibility = sampling
        .into_iter()
        .map(|(line, row)| {
            let rate = row.crash_rate.or_else(|| {
                visibility
                    .iter()
                    .find(|b: &&HazardBand| b.label() == row.label)
                    .map(HazardBand::crash_rate)
            });
            let rate = rate.ok_or_else(|| {
                config_err(format!(
                    "line {line}: no crash_rate and no visibility band labelled '{}'",
                    row.label
                ))
            })?;
            HazardBand::new(Dimension::Visibility, row.label, row.lower, row.upper, rate)
                .map_err(|e| config_err(format!("line {line}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    BandCatalog::new(friction, visibility, sampling_visibility)
        .map_err(|e| config_err(e.to_string()))
}

pub fn load_catalog(path: &Path) -> Result<BandCatalog> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_catalog(file, path)
}

/// Picks the table: an explicit path, then `HAZARD_RISK_CONFIG`, then the
/// built-in defaults. A named file that cannot be opened is an error.
pub fn resolve_catalog(explicit: Option<&Path>) -> Result<(BandCatalog, TableSource)> {
    let from_env = std::env::var_os(CONFIG_ENV_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    match explicit.map(Path::to_path_buf).or(from_env) {
        Some(path) => Ok((load_catalog(&path)?, TableSource::File(path))),
        None => Ok((BandCatalog::default(), TableSource::Builtin)),
    }
}

/// Serializes a catalog in the format `parse_catalog` reads.
pub fn catalog_to_csv(catalog: &BandCatalog) -> String {
    let mut out = String::from("dimension,label,lower,upper,crash_rate\n");
    let tables = [
        ("friction", catalog.friction_bands()),
        ("visibility", catalog.visibility_bands()),
        ("sampling_visibility", catalog.sampling_visibility_bands()),
    ];
    for (name, bands) in tables {
        for b in bands {
            out.push_str(&format!(
                "{name},{},{},{},{}\n",
                b.label(),
                b.lower(),
                b.upper(),
                b.crash_rate()
            ));
        }
    }
    out
}

//! Domain files: a JSON manifest `{lo, hi, step, J}` next to a CSV file of
//! the same stem holding one column of grid values per subdomain
//! (`d1, …, dJ`, one row per grid point).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GridFunction, SubdomainSet};
use crate::{Error, Result};

/// Largest pointwise deviation of `Σ_j d_j` from one that is repaired on load.
pub const LOAD_RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainManifest {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    #[serde(rename = "J")]
    pub subdomains: usize,
}

/// Path of the values CSV belonging to a manifest.
pub fn values_path(manifest: &Path) -> PathBuf {
    manifest.with_extension("csv")
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_domain(manifest_path: &Path, dom: &SubdomainSet<f64>) -> Result<()> {
    let manifest = DomainManifest {
        lo: dom.lo(),
        hi: dom.hi(),
        step: dom.step(),
        subdomains: dom.count(),
    };
    fs::write(
        manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    let mut w = csv::Writer::from_path(values_path(manifest_path))?;
    w.write_record((1..=dom.count()).map(|j| format!("d{j}")))?;
    for i in 0..dom.grid_len() {
        w.write_record(dom.functions().iter().map(|f| fmt_real(f.values()[i])))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads and validates a domain. Pointwise sums within
/// [`LOAD_RENORMALIZE_TOL`] of one are renormalized; anything else is an error.
pub fn read_domain(manifest_path: &Path) -> Result<SubdomainSet<f64>> {
    let manifest: DomainManifest = serde_json::from_str(&fs::read_to_string(manifest_path)?)?;
    if manifest.subdomains == 0 {
        return Err(Error::InvalidDomain("manifest declares J = 0".into()));
    }
    let mut reader = csv::Reader::from_path(values_path(manifest_path))?;
    let mut columns = vec![Vec::new(); manifest.subdomains];
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != manifest.subdomains {
            return Err(Error::Format(format!(
                "row {row} has {} columns, manifest declares J = {}",
                rec.len(),
                manifest.subdomains
            )));
        }
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {row}: cannot parse {field:?}")))?;
            col.push(v);
        }
    }
    let functions = columns
        .into_iter()
        .map(|vals| GridFunction::new(manifest.lo, manifest.hi, manifest.step, vals))
        .collect::<Result<Vec<_>>>()?;
    SubdomainSet::renormalized(functions, LOAD_RENORMALIZE_TOL)
}

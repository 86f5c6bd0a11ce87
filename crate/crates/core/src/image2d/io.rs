//! Image files: a headerless CSV matrix (`.csv`), or little-endian `f64`
//! values in row-major order (any other extension) with a JSON header
//! `{rows, cols, pixel_size}` at `<path>.json`.
//!
//! Atlases are JSON manifests `{ratio, maps: [paths]}`; relative map paths
//! resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ProbabilityAtlas, ScalarImage};
use crate::domain::io::fmt_real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PixelSize {
    Square(f64),
    /// `[height, width]`
    Axes([f64; 2]),
}

impl PixelSize {
    pub fn axes(self) -> [f64; 2] {
        match self {
            PixelSize::Square(p) => [p, p],
            PixelSize::Axes(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageHeader {
    pub rows: usize,
    pub cols: usize,
    pub pixel_size: PixelSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasManifest {
    pub ratio: usize,
    pub maps: Vec<PathBuf>,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Header path of a binary image.
pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Reads an image. CSV files carry no geometry, so they get `pixel_size`.
pub fn read_image(path: &Path, pixel_size: [f64; 2]) -> Result<ScalarImage> {
    if is_csv(path) {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        let mut values = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for rec in reader.records() {
            let rec = rec?;
            if *cols.get_or_insert(rec.len()) != rec.len() {
                return Err(Error::Format(format!(
                    "{}: row {rows} has {} columns",
                    path.display(),
                    rec.len()
                )));
            }
            for field in rec.iter() {
                values.push(field.trim().parse::<f64>().map_err(|_| {
                    Error::Format(format!("{}: cannot parse {field:?}", path.display()))
                })?);
            }
            rows += 1;
        }
        ScalarImage::new(rows, cols.unwrap_or(0), pixel_size, values)
    } else {
        let header: ImageHeader = serde_json::from_str(&fs::read_to_string(header_path(path))?)?;
        let bytes = fs::read(path)?;
        if bytes.len() != 8 * header.rows * header.cols {
            return Err(Error::Format(format!(
                "{}: expected {} bytes for {}×{} values, found {}",
                path.display(),
                8 * header.rows * header.cols,
                header.rows,
                header.cols,
                bytes.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        ScalarImage::new(header.rows, header.cols, header.pixel_size.axes(), values)
    }
}

pub fn write_image(path: &Path, img: &ScalarImage) -> Result<()> {
    if is_csv(path) {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        for r in 0..img.rows() {
            w.write_record(img.row(r).iter().map(|&v| fmt_real(v)))?;
        }
        w.flush()?;
    } else {
        let bytes: Vec<u8> = img.values().iter().flat_map(|v| v.to_le_bytes()).collect();
        fs::write(path, bytes)?;
        let header = ImageHeader {
            rows: img.rows(),
            cols: img.cols(),
            pixel_size: PixelSize::Axes(img.pixel_size()),
        };
        fs::write(
            header_path(path),
            serde_json::to_string_pretty(&header)? + "\n",
        )?;
    }
    Ok(())
}

/// Reads an atlas manifest; CSV maps get pixel size `image_pixel_size / ratio`.
pub fn read_atlas(manifest_path: &Path, image_pixel_size: [f64; 2]) -> Result<ProbabilityAtlas> {
    let manifest: AtlasManifest = serde_json::from_str(&fs::read_to_string(manifest_path)?)?;
    if manifest.ratio == 0 {
        return Err(Error::Format("atlas ratio must be positive".into()));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let size = image_pixel_size.map(|p| p / manifest.ratio as f64);
    let maps = manifest
        .maps
        .iter()
        .map(|p| read_image(&base.join(p), size))
        .collect::<Result<Vec<_>>>()?;
    ProbabilityAtlas::new(maps, manifest.ratio)
}

/// Writes each map next to the manifest as `<stem>_d<j>.<ext>`.
pub fn write_atlas(manifest_path: &Path, atlas: &ProbabilityAtlas, ext: &str) -> Result<()> {
    let stem = manifest_path
        .file_stem()
        .ok_or_else(|| Error::invalid("atlas manifest path has no file name"))?
        .to_string_lossy()
        .into_owned();
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut maps = Vec::new();
    for (j, m) in atlas.maps().iter().enumerate() {
        let name = PathBuf::from(format!("{stem}_d{}.{ext}", j + 1));
        write_image(&base.join(&name), m)?;
        maps.push(name);
    }
    let manifest = AtlasManifest {
        ratio: atlas.ratio(),
        maps,
    };
    fs::write(
        manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

//! Separable 2-D upsampling of a scalar image guided by high-resolution
//! subdomain probability maps.
//!
//! Pixel values sit at pixel centers. Along a line of `N` pixels of size `T`
//! the 1-D coordinate is `s = position − T/2`, so pixel `k` is sample `kT`.
//! Upsampling by `F` evaluates the line interpolant at
//! `s_m = (m − ⌊(F−1)/2⌋)·T/F`, `m = 0..F·N`, which includes every original
//! center (at `m = kF + ⌊(F−1)/2⌋`).

pub mod io;

use std::sync::Arc;

use rayon::prelude::*;

use crate::dibasis::{DiBasis, Shaping, DEFAULT_GAMMA};
use crate::domain::{GridFunction, SubdomainSet};
use crate::interp::{interpolate_bsi, interpolate_dibsi, SampleSequence};
use crate::{Error, Result};

/// Domain grid points per atlas pixel along an extracted line.
pub const LINE_OVERSAMPLING: usize = 10;

/// Row-major image; `pixel_size = [height, width]` of one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    rows: usize,
    cols: usize,
    pixel_size: [f64; 2],
    values: Vec<f64>,
}

impl ScalarImage {
    pub fn new(rows: usize, cols: usize, pixel_size: [f64; 2], values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "image must have at least one row and one column",
            ));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}×{cols} image needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if !pixel_size.iter().all(|&p| p > 0.0 && p.is_finite()) {
            return Err(Error::invalid(format!(
                "pixel size must be positive, got {pixel_size:?}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("image values must be finite"));
        }
        Ok(Self {
            rows,
            cols,
            pixel_size,
            values,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        pixel_size: [f64; 2],
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let values = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self::new(rows, cols, pixel_size, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel_size(&self) -> [f64; 2] {
        self.pixel_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Physical `[height, width]`.
    pub fn extent(&self) -> [f64; 2] {
        [
            self.rows as f64 * self.pixel_size[0],
            self.cols as f64 * self.pixel_size[1],
        ]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(
            self.cols,
            self.rows,
            [self.pixel_size[1], self.pixel_size[0]],
            |r, c| self.get(c, r),
        )
        .expect("transpose of a valid image")
    }

    /// Bilinear interpolation at physical `(y, x)` with pixel centers at
    /// `((r + ½)·h, (c + ½)·w)`, clamped at the borders.
    pub fn bilinear(&self, y: f64, x: f64) -> f64 {
        let axis = |p: f64, size: f64, n: usize| {
            let f = (p / size - 0.5).clamp(0.0, (n - 1) as f64);
            let i = f.floor() as usize;
            (i, (i + 1).min(n - 1), f - i as f64)
        };
        let (r0, r1, fy) = axis(y, self.pixel_size[0], self.rows);
        let (c0, c1, fx) = axis(x, self.pixel_size[1], self.cols);
        let line = |r: usize| (1.0 - fx) * self.get(r, c0) + fx * self.get(r, c1);
        (1.0 - fy) * line(r0) + fy * line(r1)
    }
}

/// Subdomain probability maps on a grid `ratio` times finer than the image
/// they guide.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityAtlas {
    ratio: usize,
    maps: Vec<ScalarImage>,
}

impl ProbabilityAtlas {
    /// Validates the maps and normalizes them pointwise: any shortfall of
    /// `Σ_j` below one is credited to the last map, then every point is
    /// divided by its sum.
    pub fn new(maps: Vec<ScalarImage>, ratio: usize) -> Result<Self> {
        if ratio == 0 {
            return Err(Error::invalid("atlas ratio must be positive"));
        }
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidDomain("atlas has no maps".into()))?;
        let (rows, cols, size) = (first.rows, first.cols, first.pixel_size);
        if maps
            .iter()
            .any(|m| m.rows != rows || m.cols != cols || m.pixel_size != size)
        {
            return Err(Error::InvalidDomain(
                "atlas maps differ in shape or pixel size".into(),
            ));
        }
        if maps.iter().any(|m| m.values.iter().any(|&v| v < 0.0)) {
            return Err(Error::InvalidDomain(
                "atlas maps must be nonnegative".into(),
            ));
        }
        let mut maps = maps;
        let last = maps.len() - 1;
        for i in 0..rows * cols {
            let sum: f64 = maps.iter().map(|m| m.values[i]).sum();
            if sum < 1.0 {
                maps[last].values[i] += 1.0 - sum;
            }
            let sum = sum.max(1.0);
            for m in maps.iter_mut() {
                m.values[i] /= sum;
            }
        }
        Ok(Self { ratio, maps })
    }

    pub fn ratio(&self) -> usize {
        self.ratio
    }

    pub fn maps(&self) -> &[ScalarImage] {
        &self.maps
    }

    pub fn count(&self) -> usize {
        self.maps.len()
    }

    pub fn extent(&self) -> [f64; 2] {
        self.maps[0].extent()
    }

    /// Checks that the atlas covers `img` at `ratio` times its resolution.
    pub fn check_aligned(&self, img: &ScalarImage) -> Result<()> {
        let m = &self.maps[0];
        let ok = m.rows == img.rows * self.ratio
            && m.cols == img.cols * self.ratio
            && (0..2).all(|a| {
                (m.pixel_size[a] * self.ratio as f64 - img.pixel_size[a]).abs()
                    <= 1e-9 * img.pixel_size[a]
            });
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!(
                "atlas of {}×{} pixels of size {:?} at ratio {} does not match a {}×{} image of pixel size {:?}",
                m.rows, m.cols, m.pixel_size, self.ratio, img.rows, img.cols, img.pixel_size
            )))
        }
    }
}

/// Direction of a line through the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Along a row (varying column), at fixed `y`.
    Row,
    /// Along a column (varying row), at fixed `x`.
    Column,
}

/// 1-D subdomain functions along the line at perpendicular position `offset`,
/// in line coordinates `s = position − T/2` over the atlas extent, on a grid
/// of spacing `T/(10ρ)`, renormalized to sum to one.
pub fn extract_line_domain(
    atlas: &ProbabilityAtlas,
    axis: Axis,
    offset: f64,
    step: f64,
) -> Result<SubdomainSet<f64>> {
    let [height, width] = atlas.extent();
    let (length, across) = match axis {
        Axis::Row => (width, height),
        Axis::Column => (height, width),
    };
    if !(offset >= 0.0 && offset <= across) {
        return Err(Error::InvalidDomain(format!(
            "line at {offset} lies outside the atlas extent [0, {across}]"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::invalid(format!(
            "sampling step must be positive, got {step}"
        )));
    }
    let lo = -0.5 * step;
    let hi = length - 0.5 * step;
    let grid = step / (LINE_OVERSAMPLING * atlas.ratio) as f64;
    let functions = atlas
        .maps
        .iter()
        .map(|m| {
            GridFunction::sample(lo, hi, grid, |s| match axis {
                Axis::Row => m.bilinear(offset, s + 0.5 * step),
                Axis::Column => m.bilinear(s + 0.5 * step, offset),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SubdomainSet::renormalized(functions, 1e-6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PassOrder {
    #[default]
    RowsFirst,
    ColumnsFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpsampleMethod {
    #[default]
    Dibsi,
    Bsi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpsampleOptions {
    pub factor: usize,
    pub order: usize,
    pub gamma: f64,
    pub pass_order: PassOrder,
    pub method: UpsampleMethod,
}

impl Default for UpsampleOptions {
    fn default() -> Self {
        Self {
            factor: 10,
            order: 3,
            gamma: DEFAULT_GAMMA,
            pass_order: PassOrder::RowsFirst,
            method: UpsampleMethod::Dibsi,
        }
    }
}

/// Output position index `m` in line coordinates for factor `F` and step `T`.
pub fn output_position(m: usize, factor: usize, step: f64) -> f64 {
    (m as f64 - ((factor - 1) / 2) as f64) * step / factor as f64
}

/// Output index of original pixel `k`.
pub fn original_center_index(k: usize, factor: usize) -> usize {
    k * factor + (factor - 1) / 2
}

/// Interpolates one line of samples (step `T`) at the `F·N` output positions.
fn upsample_line(
    values: &[f64],
    step: f64,
    domain: Option<SubdomainSet<f64>>,
    opts: &UpsampleOptions,
) -> Result<Vec<f64>> {
    let samples = SampleSequence::new(values.to_vec(), step, 0)?;
    let xs: Vec<f64> = (0..opts.factor * values.len())
        .map(|m| output_position(m, opts.factor, step))
        .collect();
    match domain {
        Some(dom) => {
            let basis = DiBasis::with_sample_range(
                Arc::new(dom),
                opts.order,
                step,
                Shaping::logistic(opts.gamma)?,
                0,
                values.len() as i64 - 1,
            )?;
            interpolate_dibsi(&samples, Arc::new(basis))?.evaluate_many(&xs)
        }
        None => interpolate_bsi(&samples, opts.order)?.evaluate_many(&xs),
    }
}

/// Upsamples every row of `img`; row `r` lies on the atlas line `along` at
/// perpendicular position `offsets[r]`.
fn pass(
    img: &ScalarImage,
    atlas: &ProbabilityAtlas,
    along: Axis,
    offsets: &[f64],
    opts: &UpsampleOptions,
) -> Result<Vec<Vec<f64>>> {
    let step = img.pixel_size[1];
    (0..img.rows)
        .into_par_iter()
        .map(|r| {
            let domain = match opts.method {
                UpsampleMethod::Dibsi => Some(extract_line_domain(atlas, along, offsets[r], step)?),
                UpsampleMethod::Bsi => None,
            };
            upsample_line(img.row(r), step, domain, opts)
        })
        .collect()
}

/// Separable upsampling by an integer factor `F`: every line along the first
/// axis, then every line of the intermediate result along the second, each
/// with domains extracted from the atlas at the line's position.
pub fn upsample_separable(
    img: &ScalarImage,
    atlas: &ProbabilityAtlas,
    opts: &UpsampleOptions,
) -> Result<ScalarImage> {
    if opts.factor == 0 {
        return Err(Error::invalid("upsampling factor must be positive"));
    }
    atlas.check_aligned(img)?;
    let f = opts.factor;
    let [h, w] = img.pixel_size;
    let center = |k: usize, size: f64| (k as f64 + 0.5) * size;
    let out_center = |m: usize, size: f64| output_position(m, f, size) + 0.5 * size;

    match opts.pass_order {
        PassOrder::RowsFirst => {
            // rows at the original y, then columns at the new x
            let offsets: Vec<f64> = (0..img.rows).map(|r| center(r, h)).collect();
            let rows = pass(img, atlas, Axis::Row, &offsets, opts)?;
            let mid = ScalarImage::new(img.rows, f * img.cols, [h, w / f as f64], rows.concat())?;
            let offsets: Vec<f64> = (0..mid.cols).map(|m| out_center(m, w)).collect();
            let cols = pass(&mid.transpose(), atlas, Axis::Column, &offsets, opts)?;
            Ok(ScalarImage::new(
                mid.cols,
                f * img.rows,
                [w / f as f64, h / f as f64],
                cols.concat(),
            )?
            .transpose())
        }
        PassOrder::ColumnsFirst => {
            let t = img.transpose();
            let offsets: Vec<f64> = (0..img.cols).map(|c| center(c, w)).collect();
            let cols = pass(&t, atlas, Axis::Column, &offsets, opts)?;
            let mid = ScalarImage::new(img.cols, f * img.rows, [w, h / f as f64], cols.concat())?
                .transpose();
            let offsets: Vec<f64> = (0..mid.rows).map(|m| out_center(m, h)).collect();
            let rows = pass(&mid, atlas, Axis::Row, &offsets, opts)?;
            ScalarImage::new(
                mid.rows,
                f * img.cols,
                [h / f as f64, w / f as f64],
                rows.concat(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_image(seed: u64, rows: usize, cols: usize) -> ScalarImage {
        let mut rng = crate::seed::rng(seed);
        ScalarImage::from_fn(rows, cols, [1.0, 1.0], |_, _| rng.gen_range(0.0..1.0)).unwrap()
    }

    fn homogeneous_atlas(rows: usize, cols: usize, ratio: usize) -> ProbabilityAtlas {
        let size = [1.0 / ratio as f64; 2];
        let one = ScalarImage::from_fn(rows * ratio, cols * ratio, size, |_, _| 1.0).unwrap();
        let zero = ScalarImage::from_fn(rows * ratio, cols * ratio, size, |_, _| 0.0).unwrap();
        ProbabilityAtlas::new(vec![one, zero], ratio).unwrap()
    }

    /// Left half subdomain 0, right half subdomain 1, with a soft edge.
    fn split_atlas(rows: usize, cols: usize, ratio: usize) -> ProbabilityAtlas {
        let size = [1.0 / ratio as f64; 2];
        let edge = cols as f64 / 2.0;
        let p = move |c: usize| {
            let x = (c as f64 + 0.5) / ratio as f64;
            (0.5 - (x - edge) / 2.0).clamp(0.0, 1.0)
        };
        let a = ScalarImage::from_fn(rows * ratio, cols * ratio, size, |_, c| p(c)).unwrap();
        let b = ScalarImage::from_fn(rows * ratio, cols * ratio, size, |_, c| 1.0 - p(c)).unwrap();
        ProbabilityAtlas::new(vec![a, b], ratio).unwrap()
    }

    #[test]
    fn image_validation_and_access() {
        assert!(ScalarImage::new(2, 2, [1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(ScalarImage::new(1, 1, [0.0, 1.0], vec![0.0]).is_err());
        let img = ScalarImage::from_fn(2, 3, [1.0, 2.0], |r, c| (10 * r + c) as f64).unwrap();
        assert_eq!(img.row(1), &[10.0, 11.0, 12.0]);
        assert_eq!(img.column(2), vec![2.0, 12.0]);
        assert_eq!(img.transpose().get(2, 1), 12.0);
        assert_eq!(img.extent(), [2.0, 6.0]);
    }

    #[test]
    fn bilinear_hits_centers_and_clamps() {
        let img = ScalarImage::from_fn(3, 4, [1.0, 2.0], |r, c| (r * c) as f64 + r as f64).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                assert_eq!(
                    img.bilinear(r as f64 + 0.5, 2.0 * c as f64 + 1.0),
                    img.get(r, c)
                );
            }
        }
        assert_eq!(img.bilinear(-5.0, -5.0), img.get(0, 0));
        assert_eq!(img.bilinear(10.0, 100.0), img.get(2, 3));
        let mid = img.bilinear(1.0, 2.0);
        let want = (img.get(0, 0) + img.get(0, 1) + img.get(1, 0) + img.get(1, 1)) / 4.0;
        assert!((mid - want).abs() < 1e-15);
    }

    #[test]
    fn atlas_folds_deficit_into_last_map() {
        let a = ScalarImage::new(1, 2, [1.0, 1.0], vec![0.3, 0.9]).unwrap();
        let b = ScalarImage::new(1, 2, [1.0, 1.0], vec![0.2, 0.6]).unwrap();
        let atlas = ProbabilityAtlas::new(vec![a, b], 1).unwrap();
        assert_eq!(atlas.maps()[0].values(), &[0.3, 0.9 / 1.5]);
        assert_eq!(atlas.maps()[1].values(), &[0.7, 0.6 / 1.5]);
        let neg = ScalarImage::new(1, 1, [1.0, 1.0], vec![-0.1]).unwrap();
        assert!(ProbabilityAtlas::new(vec![neg], 1).is_err());
    }

    #[test]
    fn line_domains() {
        let atlas = homogeneous_atlas(4, 6, 2);
        let dom = extract_line_domain(&atlas, Axis::Row, 1.5, 1.0).unwrap();
        assert!(dom.is_homogeneous(dom.lo(), dom.hi(), 1e-12).unwrap() == Some(0));
        assert!(extract_line_domain(&atlas, Axis::Row, 4.5, 1.0).is_err());

        let atlas = split_atlas(4, 6, 3);
        let dom = extract_line_domain(&atlas, Axis::Row, 2.0, 1.0).unwrap();
        assert_eq!((dom.lo(), dom.hi()), (-0.5, 5.5));
        for i in 0..dom.grid_len() {
            let s = dom.lo() + i as f64 * dom.step();
            assert!((dom.eval(0, s) + dom.eval(1, s) - 1.0).abs() < 1e-12);
        }
        // atlas pixel c has center x = (c + ½)/3, i.e. s = x − ½
        let m = &atlas.maps()[0];
        for c in 0..18 {
            let s = (c as f64 + 0.5) / 3.0 - 0.5;
            assert!((dom.eval(0, s) - m.get(5, c)).abs() < 1e-12);
        }
        let col = extract_line_domain(&atlas, Axis::Column, 1.25, 1.0).unwrap();
        assert!(col
            .is_homogeneous(col.lo(), col.hi(), 1e-12)
            .unwrap()
            .is_some());
    }

    #[test]
    fn output_grid_contains_original_centers() {
        for f in 1..=10 {
            for k in 0..5 {
                let m = original_center_index(k, f);
                assert!((output_position(m, f, 0.7) - k as f64 * 0.7).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn consistency_at_original_centers() {
        let img = random_image(1, 8, 10);
        let atlas = split_atlas(8, 10, 4);
        for pass_order in [PassOrder::RowsFirst, PassOrder::ColumnsFirst] {
            for method in [UpsampleMethod::Dibsi, UpsampleMethod::Bsi] {
                let opts = UpsampleOptions {
                    factor: 4,
                    pass_order,
                    method,
                    ..Default::default()
                };
                let out = upsample_separable(&img, &atlas, &opts).unwrap();
                assert_eq!((out.rows(), out.cols()), (32, 40));
                assert_eq!(out.pixel_size(), [0.25, 0.25]);
                for r in 0..8 {
                    for c in 0..10 {
                        let got = out.get(original_center_index(r, 4), original_center_index(c, 4));
                        assert!((got - img.get(r, c)).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn homogeneous_atlas_reduces_to_bsi_and_commutes_with_transpose() {
        let img = random_image(2, 6, 9);
        let atlas = homogeneous_atlas(6, 9, 2);
        let di = upsample_separable(
            &img,
            &atlas,
            &UpsampleOptions {
                factor: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let opts_bsi = UpsampleOptions {
            factor: 3,
            method: UpsampleMethod::Bsi,
            ..Default::default()
        };
        let bsi = upsample_separable(&img, &atlas, &opts_bsi).unwrap();
        for (a, b) in di.values().iter().zip(bsi.values()) {
            assert!((a - b).abs() < 1e-9);
        }
        let t_atlas = homogeneous_atlas(9, 6, 2);
        let tt = upsample_separable(
            &img.transpose(),
            &t_atlas,
            &UpsampleOptions {
                factor: 3,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in tt.transpose().values().iter().zip(di.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_factor_is_identity() {
        let img = random_image(3, 5, 7);
        let out = upsample_separable(
            &img,
            &homogeneous_atlas(5, 7, 3),
            &UpsampleOptions {
                factor: 1,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in out.values().iter().zip(img.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn misaligned_atlas_is_rejected() {
        let img = random_image(4, 5, 7);
        assert!(upsample_separable(
            &img,
            &homogeneous_atlas(5, 6, 3),
            &UpsampleOptions::default()
        )
        .is_err());
    }
}

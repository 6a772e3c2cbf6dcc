//! Pixel grids: equirectangular panoramas, perspective images, coverage masks.
//!
//! All grids are row-major `f32` with interleaved channels
//! (`idx = (i*W + j)*C + ch`). Pixel values for image content are expected in
//! `[0, 1]`; codec latents and intermediate buffers are unbounded floats.
//!
//! Bilinear sampling comes in two flavors used consistently everywhere:
//! panorama sampling wraps horizontally and clamps vertically; perspective
//! sampling clamps on both axes. Sample coordinates within `1e−6` px of a
//! pixel center snap onto it, so resampling chains whose coordinates are
//! integral up to trigonometric round-off (identity rotations, yaw steps of
//! `360/W` degrees) reproduce source pixels bit-exactly.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Distance (px) under which a sample coordinate snaps to the pixel center.
const SNAP_EPS: f64 = 1e-6;

#[inline]
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP_EPS {
        r
    } else {
        x
    }
}

/// Read access shared by panorama and perspective grids; lets shape-agnostic
/// code (the codec, seam metrics) accept either.
pub trait ImagePixels {
    fn height(&self) -> usize;
    fn width(&self) -> usize;
    fn channels(&self) -> usize;
    fn data(&self) -> &[f32];

    #[inline]
    fn at(&self, i: usize, j: usize, ch: usize) -> f32 {
        self.data()[(i * self.width() + j) * self.channels() + ch]
    }
}

fn check_channels(c: usize) -> Result<()> {
    if c != 1 && c != 3 {
        return Err(Error::invalid(format!(
            "channel count must be 1 or 3, got {c}"
        )));
    }
    Ok(())
}

/// Equirectangular panorama: `W = 2H`, `H ≥ 2`, 1 or 3 channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ErpImage {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f32>,
}

impl ErpImage {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<f32>) -> Result<Self> {
        if h < 2 || w != 2 * h {
            return Err(Error::invalid(format!(
                "ERP dimensions must satisfy W = 2H with H >= 2, got {h}x{w}"
            )));
        }
        check_channels(c)?;
        if data.len() != h * w * c {
            return Err(Error::invalid(format!(
                "ERP data length {} does not match {h}x{w}x{c}",
                data.len()
            )));
        }
        Ok(ErpImage { h, w, c, data })
    }

    pub fn zeros(h: usize, c: usize) -> Result<Self> {
        Self::new(h, 2 * h, c, vec![0.0; h * 2 * h * c])
    }

    pub fn constant(h: usize, c: usize, value: f32) -> Result<Self> {
        Self::new(h, 2 * h, c, vec![value; h * 2 * h * c])
    }

    /// Build from a per-pixel closure `(row, col, channel) -> value`.
    pub fn from_fn(h: usize, c: usize, f: impl Fn(usize, usize, usize) -> f32) -> Result<Self> {
        let w = 2 * h;
        let mut data = Vec::with_capacity(h * w * c);
        for i in 0..h {
            for j in 0..w {
                for ch in 0..c {
                    data.push(f(i, j, ch));
                }
            }
        }
        Self::new(h, w, c, data)
    }

    pub fn get(&self, i: usize, j: usize, ch: usize) -> f32 {
        self.data[(i * self.w + j) * self.c + ch]
    }

    pub fn set(&mut self, i: usize, j: usize, ch: usize, v: f32) {
        self.data[(i * self.w + j) * self.c + ch] = v;
    }

    /// Bilinear sample with horizontal wrap and vertical clamp.
    ///
    /// `col_offset` is an exact integer column shift applied to the fetch
    /// indices (not the weights); projection code uses it to apply yaw
    /// rotations that are whole numbers of columns without touching the
    /// fractional sample position.
    pub fn sample_wrapped(&self, i: f64, j: f64, col_offset: i64, ch: usize) -> f32 {
        sample_bilinear(
            &self.data,
            self.h,
            self.w,
            self.c,
            i,
            j,
            col_offset,
            true,
            ch,
        )
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }
}

impl ImagePixels for ErpImage {
    fn height(&self) -> usize {
        self.h
    }
    fn width(&self) -> usize {
        self.w
    }
    fn channels(&self) -> usize {
        self.c
    }
    fn data(&self) -> &[f32] {
        &self.data
    }
}

/// Perspective (pinhole) image: free aspect, both sides ≥ 2, 1 or 3 channels.
#[derive(Debug, Clone, PartialEq)]
pub struct PerspImage {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f32>,
}

impl PerspImage {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<f32>) -> Result<Self> {
        if h < 2 || w < 2 {
            return Err(Error::invalid(format!(
                "perspective dimensions must be at least 2x2, got {h}x{w}"
            )));
        }
        check_channels(c)?;
        if data.len() != h * w * c {
            return Err(Error::invalid(format!(
                "perspective data length {} does not match {h}x{w}x{c}",
                data.len()
            )));
        }
        Ok(PerspImage { h, w, c, data })
    }

    pub fn zeros(h: usize, w: usize, c: usize) -> Result<Self> {
        Self::new(h, w, c, vec![0.0; h * w * c])
    }

    pub fn from_fn(
        h: usize,
        w: usize,
        c: usize,
        f: impl Fn(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(h * w * c);
        for i in 0..h {
            for j in 0..w {
                for ch in 0..c {
                    data.push(f(i, j, ch));
                }
            }
        }
        Self::new(h, w, c, data)
    }

    pub fn get(&self, i: usize, j: usize, ch: usize) -> f32 {
        self.data[(i * self.w + j) * self.c + ch]
    }

    pub fn set(&mut self, i: usize, j: usize, ch: usize, v: f32) {
        self.data[(i * self.w + j) * self.c + ch] = v;
    }

    /// Bilinear sample with clamping on both axes.
    pub fn sample_clamped(&self, i: f64, j: f64, ch: usize) -> f32 {
        sample_bilinear(&self.data, self.h, self.w, self.c, i, j, 0, false, ch)
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }
}

impl ImagePixels for PerspImage {
    fn height(&self) -> usize {
        self.h
    }
    fn width(&self) -> usize {
        self.w
    }
    fn channels(&self) -> usize {
        self.c
    }
    fn data(&self) -> &[f32] {
        &self.data
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn sample_bilinear(
    data: &[f32],
    h: usize,
    w: usize,
    c: usize,
    i: f64,
    j: f64,
    col_offset: i64,
    wrap_cols: bool,
    ch: usize,
) -> f32 {
    let i = snap(i);
    let j = snap(j);
    let r0 = i.floor();
    let c0 = j.floor();
    let fr = i - r0;
    let fc = j - c0;
    let (r0, c0) = (r0 as i64, c0 as i64);

    let clamp_row = |r: i64| -> usize { r.clamp(0, h as i64 - 1) as usize };
    let resolve_col = |col: i64| -> usize {
        let col = col + col_offset;
        if wrap_cols {
            col.rem_euclid(w as i64) as usize
        } else {
            col.clamp(0, w as i64 - 1) as usize
        }
    };

    let (r0i, r1i) = (clamp_row(r0), clamp_row(r0 + 1));
    let (c0i, c1i) = (resolve_col(c0), resolve_col(c0 + 1));

    let v00 = data[(r0i * w + c0i) * c + ch] as f64;
    let v01 = data[(r0i * w + c1i) * c + ch] as f64;
    let v10 = data[(r1i * w + c0i) * c + ch] as f64;
    let v11 = data[(r1i * w + c1i) * c + ch] as f64;

    ((1.0 - fr) * ((1.0 - fc) * v00 + fc * v01) + fr * ((1.0 - fc) * v10 + fc * v11)) as f32
}

/// Area-weighted box downsample (separable, exact fractional bins).
pub(crate) fn box_downsample(
    data: &[f32],
    h: usize,
    w: usize,
    c: usize,
    oh: usize,
    ow: usize,
) -> Vec<f32> {
    // (index, weight) pairs for mapping `n` source cells onto `on` output
    // cells of width n/on source cells each.
    fn bins(n: usize, on: usize) -> Vec<Vec<(usize, f64)>> {
        let scale = n as f64 / on as f64;
        (0..on)
            .map(|o| {
                let lo = o as f64 * scale;
                let hi = (o + 1) as f64 * scale;
                let mut row = Vec::new();
                let mut s = lo.floor() as usize;
                while (s as f64) < hi && s < n {
                    let cell_lo = (s as f64).max(lo);
                    let cell_hi = ((s + 1) as f64).min(hi);
                    if cell_hi > cell_lo {
                        row.push((s, (cell_hi - cell_lo) / scale));
                    }
                    s += 1;
                }
                row
            })
            .collect()
    }

    let row_bins = bins(h, oh);
    let col_bins = bins(w, ow);
    let mut out = vec![0.0f32; oh * ow * c];
    for (oi, rb) in row_bins.iter().enumerate() {
        for (oj, cb) in col_bins.iter().enumerate() {
            for ch in 0..c {
                let mut acc = 0.0f64;
                for &(si, rw) in rb {
                    for &(sj, cw) in cb {
                        acc += rw * cw * data[(si * w + sj) * c + ch] as f64;
                    }
                }
                out[(oi * ow + oj) * c + ch] = acc as f32;
            }
        }
    }
    out
}

/// Binary coverage mask over an ERP grid (`W = 2H`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMask {
    h: usize,
    w: usize,
    data: Vec<bool>,
}

impl CoverageMask {
    pub(crate) fn from_data(h: usize, w: usize, data: Vec<bool>) -> Self {
        debug_assert_eq!(w, 2 * h);
        debug_assert_eq!(data.len(), h * w);
        CoverageMask { h, w, data }
    }

    pub fn height(&self) -> usize {
        self.h
    }
    pub fn width(&self) -> usize {
        self.w
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.w + j]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&b| !b)
    }

    pub fn union(&self, other: &CoverageMask) -> Result<CoverageMask> {
        if self.h != other.h || self.w != other.w {
            return Err(Error::invalid(format!(
                "mask shapes differ: {}x{} vs {}x{}",
                self.h, self.w, other.h, other.w
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a || b)
            .collect();
        Ok(CoverageMask {
            h: self.h,
            w: self.w,
            data,
        })
    }

    /// Fraction of the sphere's solid angle covered, using the exact band
    /// integral per pixel row (`Δλ · (sin φ_top − sin φ_bot)`); the full mask
    /// sums to exactly 1.
    pub fn solid_angle_fraction(&self) -> f64 {
        let mut covered = 0.0f64;
        let h = self.h as f64;
        for i in 0..self.h {
            let phi_top = PI / 2.0 - PI * (i as f64 / h);
            let phi_bot = PI / 2.0 - PI * ((i + 1) as f64 / h);
            // Row band solid angle per pixel, normalized by 4π.
            let per_px = (phi_top.sin() - phi_bot.sin()) / (2.0 * self.w as f64);
            let row_count = self.data[i * self.w..(i + 1) * self.w]
                .iter()
                .filter(|&&b| b)
                .count();
            covered += per_px * row_count as f64;
        }
        covered
    }

    /// Render as a single-channel image (1.0 inside, 0.0 outside).
    pub fn to_image(&self) -> ErpImage {
        let data = self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        ErpImage::new(self.h, self.w, 1, data).expect("mask dims are ERP dims")
    }
}

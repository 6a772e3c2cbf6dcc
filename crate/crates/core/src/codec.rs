//! Deterministic convolutional image codec with two horizontal padding
//! regimes, plus the circular-encoding wrappers and flow-matching helpers.
//!
//! The codec downsamples 8× (three stride-2, kernel-3 convolutions,
//! channels 3→8→16→4, `tanh` after the first two layers) and upsamples back
//! (three stages of nearest-neighbor 2× followed by a kernel-3 convolution,
//! channels 4→16→8→3). Biases are zero and the kernels are filled from a
//! fixed [`SplitMix64`] stream, so every build on every platform produces
//! identical weights; [`CodecWeights::digest_hex`] pins them down.
//!
//! In [`PaddingMode::Zero`], horizontal padding is zero like the vertical
//! padding, and the latent of a wrap-continuous panorama picks up a seam at
//! the image border. [`PaddingMode::Circular`] wraps columns instead (rows
//! stay zero-padded — panoramas are not periodic vertically).
//! [`circular_encode`] and [`circular_decode`] reproduce circular behavior
//! with the zero-padding codec by circularly pre-padding and cropping; with
//! enough padding they match circular mode exactly because the encoder's
//! receptive field half-width is 7 px and the decoder reaches one latent
//! column into each neighbor.

use crate::error::{Error, Result};
use crate::image::{ErpImage, ImagePixels, PerspImage};
use crate::rng::SplitMix64;
use sha2::{Digest, Sha256};
use std::sync::OnceLock;

/// Horizontal boundary behavior of every convolution. Vertical padding is
/// always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaddingMode {
    Zero,
    Circular,
}

/// Latent grid produced by [`encode`]: `H/8 × W/8`, always 4 channels.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentGrid {
    h: usize,
    w: usize,
    data: Vec<f32>,
}

/// Latent channel count, fixed by the encoder's last layer.
pub const LATENT_CHANNELS: usize = 4;

impl LatentGrid {
    pub fn new(h: usize, w: usize, c: usize, data: Vec<f32>) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::invalid(format!(
                "latent dimensions must be positive, got {h}x{w}"
            )));
        }
        if c != LATENT_CHANNELS {
            return Err(Error::invalid(format!(
                "latent channel count must be {LATENT_CHANNELS}, got {c}"
            )));
        }
        if data.len() != h * w * c {
            return Err(Error::invalid(format!(
                "latent data length {} does not match {h}x{w}x{c}",
                data.len()
            )));
        }
        Ok(LatentGrid { h, w, data })
    }

    pub fn zeros(h: usize, w: usize) -> Result<Self> {
        Self::new(h, w, LATENT_CHANNELS, vec![0.0; h * w * LATENT_CHANNELS])
    }

    pub fn get(&self, i: usize, j: usize, ch: usize) -> f32 {
        self.data[(i * self.w + j) * LATENT_CHANNELS + ch]
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }
}

impl ImagePixels for LatentGrid {
    fn height(&self) -> usize {
        self.h
    }
    fn width(&self) -> usize {
        self.w
    }
    fn channels(&self) -> usize {
        LATENT_CHANNELS
    }
    fn data(&self) -> &[f32] {
        &self.data
    }
}

/// `(in_channels, out_channels)` of the six convolution layers, in order:
/// encoder first, then decoder.
const LAYER_CHANNELS: [(usize, usize); 6] = [(3, 8), (8, 16), (16, 4), (4, 16), (16, 8), (8, 3)];

/// Kernel tensors of the codec. Biases are all zero and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecWeights {
    /// One flat tensor per layer, indexed `[out][in][ky][kx]`.
    layers: Vec<Vec<f32>>,
}

impl CodecWeights {
    /// Seed of the weight stream.
    pub const SEED: u64 = 0x360A_11CE;

    /// Fill all kernels from `SplitMix64(SEED)`: layers in order (encoder 1–3
    /// then decoder 1–3), each tensor in `[out][in][ky][kx]` index order,
    /// each draw taking the top 24 bits of `next_u64()` as a uniform number
    /// in `[0, 1)` mapped to `uniform(−a, a)` with `a = (in_channels · 9)^(−1/2)`.
    pub fn generate() -> CodecWeights {
        let mut rng = SplitMix64::new(Self::SEED);
        let layers = LAYER_CHANNELS
            .iter()
            .map(|&(cin, cout)| {
                let a = 1.0 / ((cin * 9) as f64).sqrt();
                (0..cout * cin * 9)
                    .map(|_| {
                        let u = (rng.next_u64() >> 40) as f64 / 16_777_216.0;
                        ((2.0 * u - 1.0) * a) as f32
                    })
                    .collect()
            })
            .collect();
        CodecWeights { layers }
    }

    /// Kernel tensor of layer `idx` (0–2 encoder, 3–5 decoder), flat in
    /// `[out][in][ky][kx]` order.
    pub fn layer(&self, idx: usize) -> &[f32] {
        &self.layers[idx]
    }

    /// SHA-256 of all kernel values as little-endian `f32` bytes, in fill
    /// order. Stable across platforms.
    pub fn digest_hex(&self) -> String {
        let mut hasher = Sha256::new();
        for layer in &self.layers {
            for &v in layer {
                hasher.update(v.to_le_bytes());
            }
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Process-wide cached weights; generation is cheap but this keeps every
/// caller on literally the same tensors.
pub(crate) fn shared_weights() -> &'static CodecWeights {
    static WEIGHTS: OnceLock<CodecWeights> = OnceLock::new();
    WEIGHTS.get_or_init(CodecWeights::generate)
}

#[inline]
fn resolve_col(ix: i64, w: usize, mode: PaddingMode) -> Option<usize> {
    if ix >= 0 && ix < w as i64 {
        return Some(ix as usize);
    }
    match mode {
        PaddingMode::Zero => None,
        PaddingMode::Circular => Some(ix.rem_euclid(w as i64) as usize),
    }
}

/// Kernel-3 convolution, padding 1 per side. Accumulation is `f64` in fixed
/// `[in][ky][kx]` order, rounded to `f32` after the (optional) `tanh`.
#[allow(clippy::too_many_arguments)]
fn conv3(
    input: &[f32],
    h: usize,
    w: usize,
    cin: usize,
    wts: &[f32],
    cout: usize,
    stride: usize,
    mode: PaddingMode,
    act_tanh: bool,
) -> (Vec<f32>, usize, usize) {
    let (oh, ow) = (h / stride, w / stride);
    let mut out = vec![0.0f32; oh * ow * cout];
    for oy in 0..oh {
        for ox in 0..ow {
            for oc in 0..cout {
                let wbase = oc * cin * 9;
                let mut acc = 0.0f64;
                for ic in 0..cin {
                    for ky in 0..3usize {
                        let iy = (stride * oy + ky) as i64 - 1;
                        if iy < 0 || iy >= h as i64 {
                            continue;
                        }
                        let row = iy as usize * w;
                        for kx in 0..3usize {
                            let ix = (stride * ox + kx) as i64 - 1;
                            let Some(ix) = resolve_col(ix, w, mode) else {
                                continue;
                            };
                            acc += input[(row + ix) * cin + ic] as f64
                                * wts[wbase + (ic * 3 + ky) * 3 + kx] as f64;
                        }
                    }
                }
                out[(oy * ow + ox) * cout + oc] = if act_tanh { acc.tanh() as f32 } else { acc as f32 };
            }
        }
    }
    (out, oh, ow)
}

/// Nearest-neighbor 2× upsample.
fn upsample2(input: &[f32], h: usize, w: usize, c: usize) -> (Vec<f32>, usize, usize) {
    let (oh, ow) = (2 * h, 2 * w);
    let mut out = vec![0.0f32; oh * ow * c];
    for oy in 0..oh {
        let iy = oy / 2;
        for ox in 0..ow {
            let ix = ox / 2;
            let src = (iy * w + ix) * c;
            let dst = (oy * ow + ox) * c;
            out[dst..dst + c].copy_from_slice(&input[src..src + c]);
        }
    }
    (out, oh, ow)
}

fn run_encoder(data: &[f32], h: usize, w: usize, mode: PaddingMode) -> (Vec<f32>, usize, usize) {
    let wts = shared_weights();
    let (x, h, w) = conv3(data, h, w, 3, wts.layer(0), 8, 2, mode, true);
    let (x, h, w) = conv3(&x, h, w, 8, wts.layer(1), 16, 2, mode, true);
    conv3(&x, h, w, 16, wts.layer(2), 4, 2, mode, false)
}

fn run_decoder(data: &[f32], h: usize, w: usize, mode: PaddingMode) -> (Vec<f32>, usize, usize) {
    let wts = shared_weights();
    let (x, h, w) = upsample2(data, h, w, 4);
    let (x, h, w) = conv3(&x, h, w, 4, wts.layer(3), 16, 1, mode, true);
    let (x, h, w) = upsample2(&x, h, w, 16);
    let (x, h, w) = conv3(&x, h, w, 16, wts.layer(4), 8, 1, mode, true);
    let (x, h, w) = upsample2(&x, h, w, 8);
    conv3(&x, h, w, 8, wts.layer(5), 3, 1, mode, false)
}

/// Encode a 3-channel image to its `H/8 × W/8 × 4` latent.
///
/// Both dimensions must be divisible by 8.
pub fn encode(img: &impl ImagePixels, mode: PaddingMode) -> Result<LatentGrid> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    if c != 3 {
        return Err(Error::invalid(format!("encoder expects 3 channels, got {c}")));
    }
    if h % 8 != 0 || w % 8 != 0 {
        return Err(Error::invalid(format!(
            "encoder input dimensions must be divisible by 8, got {h}x{w}"
        )));
    }
    let (data, lh, lw) = run_encoder(img.data(), h, w, mode);
    LatentGrid::new(lh, lw, LATENT_CHANNELS, data)
}

/// Decode a latent back to an `8·Hl × 8·Wl × 3` image.
pub fn decode(lat: &LatentGrid, mode: PaddingMode) -> PerspImage {
    let (data, h, w) = run_decoder(lat.data(), lat.height(), lat.width(), mode);
    PerspImage::new(h, w, 3, data).expect("decoder output dims are valid")
}

/// Default pixel padding for [`circular_encode`]: `W/8`.
pub fn default_circular_pad(erp_w: usize) -> usize {
    erp_w / 8
}

/// Circular latent encoding: circularly pad `w_prime` pixel columns per
/// side, encode with zero padding, then drop `w_prime/8` latent columns per
/// side. Output width equals the plain [`encode`] width.
///
/// `w_prime` defaults to `W/8` and must be divisible by 8 (so the default
/// requires `W` divisible by 64). For `w_prime ≥ 8` the result equals
/// `encode(erp, Circular)` exactly.
pub fn circular_encode(erp: &ErpImage, w_prime: Option<usize>) -> Result<LatentGrid> {
    let (h, w, c) = (erp.height(), erp.width(), erp.channels());
    if c != 3 {
        return Err(Error::invalid(format!("encoder expects 3 channels, got {c}")));
    }
    if h % 8 != 0 || w % 8 != 0 {
        return Err(Error::invalid(format!(
            "encoder input dimensions must be divisible by 8, got {h}x{w}"
        )));
    }
    let wp = w_prime.unwrap_or_else(|| default_circular_pad(w));
    if !wp.is_multiple_of(8) {
        return Err(Error::invalid(format!(
            "circular padding must be divisible by 8 pixels, got {wp}"
        )));
    }
    let padded_w = w + 2 * wp;
    let mut padded = vec![0.0f32; h * padded_w * c];
    let src = erp.data();
    for i in 0..h {
        for j in 0..padded_w {
            let sj = (j as i64 - wp as i64).rem_euclid(w as i64) as usize;
            let dst = (i * padded_w + j) * c;
            let s = (i * w + sj) * c;
            padded[dst..dst + c].copy_from_slice(&src[s..s + c]);
        }
    }
    let (lat, lh, lw) = run_encoder(&padded, h, padded_w, PaddingMode::Zero);
    let drop = wp / 8;
    let keep_w = lw - 2 * drop;
    let mut out = vec![0.0f32; lh * keep_w * LATENT_CHANNELS];
    for i in 0..lh {
        let s = (i * lw + drop) * LATENT_CHANNELS;
        let d = i * keep_w * LATENT_CHANNELS;
        out[d..d + keep_w * LATENT_CHANNELS]
            .copy_from_slice(&lat[s..s + keep_w * LATENT_CHANNELS]);
    }
    LatentGrid::new(lh, keep_w, LATENT_CHANNELS, out)
}

/// Circular latent decoding of a panoramic latent (`Wl = 2·Hl`): circularly
/// pad `p` latent columns per side, decode with zero padding, crop `8p`
/// pixel columns per side.
///
/// `p` defaults to 2 and may not exceed `Wl`. For `p ≥ 2` the result equals
/// `decode(lat, Circular)` exactly.
pub fn circular_decode(lat: &LatentGrid, p: Option<usize>) -> Result<ErpImage> {
    let (lh, lw) = (lat.height(), lat.width());
    if lw != 2 * lh {
        return Err(Error::invalid(format!(
            "circular decode needs a panoramic latent (Wl = 2Hl), got {lh}x{lw}"
        )));
    }
    let p = p.unwrap_or(2);
    if p == 0 || p > lw {
        return Err(Error::invalid(format!(
            "latent padding must be in 1..={lw}, got {p}"
        )));
    }
    let padded_w = lw + 2 * p;
    let mut padded = vec![0.0f32; lh * padded_w * LATENT_CHANNELS];
    let src = lat.data();
    for i in 0..lh {
        for j in 0..padded_w {
            let sj = (j as i64 - p as i64).rem_euclid(lw as i64) as usize;
            let dst = (i * padded_w + j) * LATENT_CHANNELS;
            let s = (i * lw + sj) * LATENT_CHANNELS;
            padded[dst..dst + LATENT_CHANNELS].copy_from_slice(&src[s..s + LATENT_CHANNELS]);
        }
    }
    let (px, oh, ow) = run_decoder(&padded, lh, padded_w, PaddingMode::Zero);
    let crop = 8 * p;
    let keep_w = ow - 2 * crop;
    let mut out = vec![0.0f32; oh * keep_w * 3];
    for i in 0..oh {
        let s = (i * ow + crop) * 3;
        let d = i * keep_w * 3;
        out[d..d + keep_w * 3].copy_from_slice(&px[s..s + keep_w * 3]);
    }
    ErpImage::new(oh, keep_w, 3, out)
}

fn check_same_shape(a: &LatentGrid, b: &LatentGrid) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::invalid(format!(
            "latent shapes differ: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Linear noise interpolation `(1−t)·Y + t·ε` for `t ∈ [0, 1]`.
pub fn flow_interpolate(y: &LatentGrid, eps: &LatentGrid, t: f64) -> Result<LatentGrid> {
    check_same_shape(y, eps)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t must be in [0, 1], got {t}")));
    }
    let data = y
        .data()
        .iter()
        .zip(eps.data())
        .map(|(&a, &b)| ((1.0 - t) * a as f64 + t * b as f64) as f32)
        .collect();
    LatentGrid::new(y.height(), y.width(), LATENT_CHANNELS, data)
}

/// Velocity regression target `ε − Y`.
pub fn velocity_target(y: &LatentGrid, eps: &LatentGrid) -> Result<LatentGrid> {
    check_same_shape(y, eps)?;
    let data = y
        .data()
        .iter()
        .zip(eps.data())
        .map(|(&a, &b)| b - a)
        .collect();
    LatentGrid::new(y.height(), y.width(), LATENT_CHANNELS, data)
}

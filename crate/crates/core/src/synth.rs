//! Deterministic synthetic panoramas used by tests, benchmarks, and the CLI
//! examples. Both generators are smooth and wrap-continuous in longitude so
//! seam metrics on them reflect processing artifacts, not content.

use crate::image::ErpImage;
use crate::rng::SplitMix64;
use crate::sphere::UnitVec3;
use std::f64::consts::{PI, TAU};

/// A band-limited random field on the sphere: per channel, a latitude-only
/// wave plus three longitude harmonics (integer frequencies, so columns wrap
/// exactly) with latitude-modulated amplitude. Values stay well inside
/// `[0, 1]`. The same `(h, channels, seed)` always yields the same image.
pub fn sinusoid_erp(h: usize, channels: usize, seed: u64) -> ErpImage {
    let w = 2 * h;
    let mut rng = SplitMix64::new(seed);

    struct Term {
        amp: f64,
        lon_freq: f64,
        lon_phase: f64,
        lat_freq: f64,
        lat_phase: f64,
    }
    struct Channel {
        lat_amp: f64,
        lat_freq: f64,
        lat_phase: f64,
        terms: [Term; 3],
    }

    let channel_specs: Vec<Channel> = (0..channels)
        .map(|_| Channel {
            lat_amp: rng.uniform(0.05, 0.12),
            lat_freq: if rng.uniform(0.0, 1.0) < 0.5 { 1.0 } else { 2.0 },
            lat_phase: rng.uniform(0.0, TAU),
            terms: std::array::from_fn(|k| Term {
                amp: rng.uniform(0.03, 0.09),
                lon_freq: (k + 1) as f64,
                lon_phase: rng.uniform(0.0, TAU),
                lat_freq: if rng.uniform(0.0, 1.0) < 0.5 { 1.0 } else { 2.0 },
                lat_phase: rng.uniform(0.0, TAU),
            }),
        })
        .collect();

    // The field is separable per term, so precompute row and column factors
    // and keep the fill loop free of transcendentals.
    let lats: Vec<f64> = (0..h)
        .map(|i| PI / 2.0 - PI * (i as f64 + 0.5) / h as f64)
        .collect();
    let lons: Vec<f64> = (0..w)
        .map(|j| TAU * (j as f64 + 0.5) / w as f64 - PI)
        .collect();

    let mut data = vec![0.0f64; h * w * channels];
    for (ch, spec) in channel_specs.iter().enumerate() {
        let base: Vec<f64> = lats
            .iter()
            .map(|&lat| 0.5 + spec.lat_amp * (spec.lat_freq * lat + spec.lat_phase).sin())
            .collect();
        for term in &spec.terms {
            let rows: Vec<f64> = lats
                .iter()
                .map(|&lat| term.amp * (term.lat_freq * lat + term.lat_phase).cos())
                .collect();
            let cols: Vec<f64> = lons
                .iter()
                .map(|&lon| (term.lon_freq * lon + term.lon_phase).sin())
                .collect();
            for i in 0..h {
                let row_of = (i * w) * channels;
                let r = rows[i];
                for j in 0..w {
                    data[row_of + j * channels + ch] += r * cols[j];
                }
            }
        }
        for i in 0..h {
            let row_of = (i * w) * channels;
            for j in 0..w {
                data[row_of + j * channels + ch] += base[i];
            }
        }
    }
    ErpImage::from_fn(h, channels, |i, j, ch| data[(i * w + j) * channels + ch] as f32)
        .expect("synthetic panorama shape is valid")
}

/// A single-channel panorama of a sharpened horizon: brightness is a
/// smoothstep of `d · g`, so the half-space toward `g` ("ground") is bright
/// and the opposite half is dark, with a smooth transition band. When `g` is
/// tilted away from straight down, the horizon traces a curve in the ERP
/// image; after gravity alignment it becomes a constant row.
pub fn horizon_erp(h: usize, g: &UnitVec3) -> ErpImage {
    const BAND: f64 = 0.2;
    ErpImage::from_fn(h, 1, |i, j, _| {
        let lat = PI / 2.0 - PI * (i as f64 + 0.5) / h as f64;
        let lon = TAU * (j as f64 + 0.5) / (2 * h) as f64 - PI;
        let d = UnitVec3::new_unchecked(
            lat.cos() * lon.sin(),
            lat.sin(),
            lat.cos() * lon.cos(),
        );
        let s = d.dot(g);
        let t = ((s / BAND + 1.0) / 2.0).clamp(0.0, 1.0);
        (t * t * (3.0 - 2.0 * t)) as f32
    })
    .expect("synthetic panorama shape is valid")
}

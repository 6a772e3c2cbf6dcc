//! Network-free evaluation metrics: the wrap-seam discontinuity score,
//! PSNR over trajectory-covered panorama regions, and the latent
//! shift-equivariance gap between the two codec padding regimes.

use crate::codec::{circular_encode, encode, LatentGrid, PaddingMode};
use crate::error::{Error, Result};
use crate::image::{CoverageMask, ErpImage, ImagePixels};
use crate::project::coverage_mask;
use crate::trajectory::Trajectory;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A named scalar metric with optional auxiliary data.
///
/// Serialization note: infinite values (a perfect PSNR) are emitted as the
/// JSON string `"inf"` rather than `null`, so reports stay lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub metric: String,
    pub value: f64,
    /// Solid-angle fraction of the evaluation mask, when one exists.
    pub coverage_fraction: Option<f64>,
    /// Per-frame values for multi-frame metrics.
    pub per_frame: Option<Vec<f64>>,
}

fn json_number(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    } else {
        serde_json::Value::String(if v > 0.0 { "inf" } else { "-inf" }.to_string())
    }
}

impl Serialize for MetricReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut n = 2;
        if self.coverage_fraction.is_some() {
            n += 1;
        }
        if self.per_frame.is_some() {
            n += 1;
        }
        let mut st = serializer.serialize_struct("MetricReport", n)?;
        st.serialize_field("metric", &self.metric)?;
        st.serialize_field("value", &json_number(self.value))?;
        if let Some(cov) = self.coverage_fraction {
            st.serialize_field("coverage_fraction", &cov)?;
        }
        if let Some(per_frame) = &self.per_frame {
            let vals: Vec<serde_json::Value> = per_frame.iter().map(|&v| json_number(v)).collect();
            st.serialize_field("per_frame", &vals)?;
        }
        st.end()
    }
}

/// Mean absolute horizontal forward difference per column:
/// `g(j) = mean over rows and channels of |Y[·, (j+1) mod W] − Y[·, j]|`.
/// The last entry, `g(W−1)`, is the wrap pair.
pub fn wrap_gradient_profile(img: &impl ImagePixels) -> Vec<f64> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let mut g = vec![0.0f64; w];
    for i in 0..h {
        for j in 0..w {
            let jn = (j + 1) % w;
            let mut acc = 0.0f64;
            for ch in 0..c {
                acc += (img.at(i, jn, ch) as f64 - img.at(i, j, ch) as f64).abs();
            }
            g[j] += acc;
        }
    }
    let norm = (h * c) as f64;
    for v in &mut g {
        *v /= norm;
    }
    g
}

fn median(mut vals: Vec<f64>) -> f64 {
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite gradients"));
    let n = vals.len();
    if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    }
}

/// Discontinuity score: how much the wrap-pair gradient `g(W−1)` sticks out
/// above the interior median, scaled to [0, 100] for [0, 1] images.
///
/// `DS = 100 · max(0, g(W−1) − median{g(j) : j ≤ W−2})`. Zero for constant
/// images and for any image whose seam gradient does not exceed the typical
/// interior gradient.
pub fn discontinuity_score(img: &impl ImagePixels) -> f64 {
    let g = wrap_gradient_profile(img);
    let w = g.len();
    let seam = g[w - 1];
    let interior = median(g[..w - 1].to_vec());
    100.0 * (seam - interior).max(0.0)
}

/// PSNR between two panorama videos over the union of the trajectory's
/// per-frame coverage masks.
///
/// Per-frame masks come from the coverage of a `pers_h × pers_w` camera at
/// each pose; the union mask is shared by all frames, and the MSE pools
/// every union pixel of every frame and channel. Peak is fixed at 1.0, so
/// `PSNR = 10·log10(1/MSE)`, `+∞` when the videos agree exactly on the mask.
/// The report carries the union's solid-angle fraction and per-frame PSNRs.
pub fn masked_psnr(
    gt: &[ErpImage],
    gen: &[ErpImage],
    traj: &Trajectory,
    pers_h: usize,
    pers_w: usize,
) -> Result<MetricReport> {
    if gt.is_empty() {
        return Err(Error::invalid("need at least one frame"));
    }
    if gt.len() != gen.len() || gt.len() != traj.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} gt frames, {} generated frames, {} poses",
            gt.len(),
            gen.len(),
            traj.len()
        )));
    }
    let (h, w, c) = (gt[0].height(), gt[0].width(), gt[0].channels());
    for (k, (a, b)) in gt.iter().zip(gen).enumerate() {
        let same = a.height() == h && a.width() == w && a.channels() == c;
        let matching = b.height() == h && b.width() == w && b.channels() == c;
        if !same || !matching {
            return Err(Error::invalid(format!("frame {k} shape differs from frame 0")));
        }
    }

    let mut union: Option<CoverageMask> = None;
    for cam in traj.frames() {
        let m = coverage_mask(cam, pers_h, pers_w, h)?;
        union = Some(match union {
            None => m,
            Some(u) => u.union(&m)?,
        });
    }
    let union = union.expect("trajectory is non-empty");
    if union.is_empty() {
        return Err(Error::EmptyMask);
    }

    let psnr_of = |se: f64, n: usize| -> f64 {
        let mse = se / n as f64;
        if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (1.0 / mse).log10()
        }
    };

    let mut total_se = 0.0f64;
    let mut total_n = 0usize;
    let mut per_frame = Vec::with_capacity(gt.len());
    for (a, b) in gt.iter().zip(gen) {
        let mut se = 0.0f64;
        let mut n = 0usize;
        for i in 0..h {
            for j in 0..w {
                if union.get(i, j) {
                    for ch in 0..c {
                        let d = a.get(i, j, ch) as f64 - b.get(i, j, ch) as f64;
                        se += d * d;
                        n += 1;
                    }
                }
            }
        }
        per_frame.push(psnr_of(se, n));
        total_se += se;
        total_n += n;
    }

    Ok(MetricReport {
        metric: "masked_psnr".to_string(),
        value: psnr_of(total_se, total_n),
        coverage_fraction: Some(union.solid_angle_fraction()),
        per_frame: Some(per_frame),
    })
}

/// Mean absolute shift-equivariance gap of the encoder under a half-turn.
///
/// With `s = Wl/2` latent columns (`8s` pixels, 180° of longitude), returns
/// `mean |ENC(shift(erp, 8s)) − shift(ENC(erp), s)|` where `ENC` is
/// [`circular_encode`] when `use_cle` holds and zero-padded [`encode`]
/// otherwise. Requires `W` divisible by 64 so the default circular padding
/// stays 8-aligned.
pub fn latent_equivariance_error(erp: &ErpImage, use_cle: bool) -> Result<f64> {
    if !erp.width().is_multiple_of(64) {
        return Err(Error::invalid(format!(
            "width must be divisible by 64, got {}",
            erp.width()
        )));
    }
    let enc = |img: &ErpImage| -> Result<LatentGrid> {
        if use_cle {
            circular_encode(img, None)
        } else {
            encode(img, PaddingMode::Zero)
        }
    };
    let lat = enc(erp)?;
    let s = (lat.width() / 2) as i64;
    let lat_of_shifted = enc(&crate::canon::yaw_shift_augment(erp, 8 * s))?;

    let (lh, lw, lc) = (lat.height(), lat.width(), lat.channels());
    let mut acc = 0.0f64;
    for i in 0..lh {
        for j in 0..lw {
            let js = (j as i64 - s).rem_euclid(lw as i64) as usize;
            for ch in 0..lc {
                acc += (lat_of_shifted.at(i, j, ch) as f64 - lat.at(i, js, ch) as f64).abs();
            }
        }
    }
    Ok(acc / (lh * lw * lc) as f64)
}

//! Video canonicalization: rotational stabilization against frame 0,
//! gravity estimation by outlier-rejecting averaging, gravity alignment,
//! and the horizontal roll augmentation.
//!
//! Stabilization and alignment each resample every frame exactly once with
//! a single composed rotation — rotations are never chained across frames,
//! so interpolation blur does not compound.

use crate::error::{Error, Result};
use crate::image::{ErpImage, ImagePixels};
use crate::project::rotate_erp;
use crate::sphere::{minimal_rotation_between, Rotation3, UnitVec3};

/// Rotate frames `1..T` so every frame shares frame 0's orientation.
///
/// `poses[k]` is the camera-to-world rotation of frame `k`. Output frame `k`
/// is `rotate_erp(frame_k, R_kᵀ·R_0)`; frame 0 is returned unchanged
/// (bit-exact). Stabilizing already-stabilized frames with identity poses is
/// the identity.
pub fn stabilize(frames: &[ErpImage], poses: &[Rotation3]) -> Result<Vec<ErpImage>> {
    if frames.len() != poses.len() {
        return Err(Error::invalid(format!(
            "frame count mismatch: {} frames vs {} poses",
            frames.len(),
            poses.len()
        )));
    }
    let mut out = Vec::with_capacity(frames.len());
    for (k, frame) in frames.iter().enumerate() {
        if k == 0 {
            out.push(frame.clone());
        } else {
            let rot = poses[k].transpose().compose(&poses[0]);
            out.push(rotate_erp(frame, &rot));
        }
    }
    Ok(out)
}

/// Average gravity estimates with one pass of 3-sigma outlier rejection.
///
/// Computes the normalized mean `m0`, measures every estimate's angular
/// deviation from it, discards estimates beyond `mean + 3·std` (population
/// std), and returns the renormalized mean of the survivors. Falls back to
/// `m0` if rejection discards everything (possible only in degenerate
/// symmetric configurations).
pub fn average_gravity(estimates: &[UnitVec3]) -> Result<UnitVec3> {
    if estimates.is_empty() {
        return Err(Error::invalid("need at least one gravity estimate"));
    }
    let mean_dir = |vs: &[&UnitVec3]| -> Option<UnitVec3> {
        let (mut x, mut y, mut z) = (0.0f64, 0.0, 0.0);
        for v in vs {
            x += v.x();
            y += v.y();
            z += v.z();
        }
        UnitVec3::normalize(x, y, z).ok()
    };

    let all: Vec<&UnitVec3> = estimates.iter().collect();
    let m0 = mean_dir(&all).ok_or_else(|| {
        Error::invalid("gravity estimates cancel out; no average direction exists")
    })?;

    let theta: Vec<f64> = estimates.iter().map(|v| v.angle_to(&m0)).collect();
    let n = theta.len() as f64;
    let mean = theta.iter().sum::<f64>() / n;
    let var = theta.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
    let cutoff = mean + 3.0 * var.sqrt();

    let survivors: Vec<&UnitVec3> = estimates
        .iter()
        .zip(&theta)
        .filter(|(_, &t)| t <= cutoff)
        .map(|(v, _)| v)
        .collect();
    if survivors.is_empty() {
        return Ok(m0);
    }
    Ok(mean_dir(&survivors).unwrap_or(m0))
}

/// Rotate frames so the measured gravity direction `g` maps onto the
/// vertical axis (`down = (0,−1,0)`).
///
/// Every frame is resampled through the rotation that carries `down` onto
/// `g`: the output pixel looking at `down` fetches what the input showed at
/// `g`, so ground content ends up at the bottom. When `g` is already `down`
/// the frames pass through bit-exact.
pub fn gravity_align(frames: &[ErpImage], g: &UnitVec3) -> Vec<ErpImage> {
    let sampling = minimal_rotation_between(&UnitVec3::down(), g);
    frames.iter().map(|f| rotate_erp(f, &sampling)).collect()
}

/// Full canonicalization: stabilize against frame 0, average the gravity
/// estimates (expressed in the stabilized frame), then gravity-align.
/// Returns the aligned frames and the averaged gravity.
pub fn canonicalize_video(
    frames: &[ErpImage],
    poses: &[Rotation3],
    gravity_estimates: &[UnitVec3],
) -> Result<(Vec<ErpImage>, UnitVec3)> {
    let stabilized = stabilize(frames, poses)?;
    let g = average_gravity(gravity_estimates)?;
    let aligned = gravity_align(&stabilized, &g);
    Ok((aligned, g))
}

/// Circularly shift panorama columns by `k`: `out[·, j] = in[·, (j−k) mod W]`
/// — content moves `k` columns to the right for positive `k`. Exact pixel
/// permutation, no resampling.
pub fn yaw_shift_augment(erp: &ErpImage, k: i64) -> ErpImage {
    let (h, w, c) = (erp.height(), erp.width(), erp.channels());
    let mut data = Vec::with_capacity(h * w * c);
    let src = erp.data();
    for i in 0..h {
        for j in 0..w {
            let sj = (j as i64 - k).rem_euclid(w as i64) as usize;
            let base = (i * w + sj) * c;
            data.extend_from_slice(&src[base..base + c]);
        }
    }
    ErpImage::new(h, w, c, data).expect("shift preserves shape")
}

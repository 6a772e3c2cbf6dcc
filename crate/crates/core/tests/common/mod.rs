//! Independent reference implementations ("oracles") shared by the
//! integration suites. Everything here deliberately re-derives the math from
//! first principles instead of calling back into the library's internals, so
//! agreement between the two is evidence rather than tautology.

// Each test target compiles its own copy of this module and none uses every
// helper.
#![allow(dead_code)]

use panolift::calibrate::render_residual;
use panolift::{CameraParams, ErpImage, ImagePixels, PerspImage, SplitMix64};

/// Mean absolute difference between two equally-shaped pixel buffers.
pub fn mae(a: &[f32], b: &[f32]) -> f64 {
    assert_eq!(a.len(), b.len());
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 - y as f64).abs())
        .sum();
    sum / a.len() as f64
}

/// Median as the midpoint of the sorted values (average of the two middle
/// elements for even counts).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Monte-Carlo estimate of the fraction of the sphere covered by a pinhole
/// frustum. Directions are drawn uniformly on the sphere; a direction is
/// inside the frustum when, in camera coordinates, it points forward and its
/// image-plane slopes fit the half-angles. All the math here is written out
/// directly so it cannot share bugs with the library's projector.
pub fn mc_solid_angle_fraction(
    cam: &CameraParams,
    pers_h: usize,
    pers_w: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    let (yaw, pitch, roll) = (
        cam.yaw_deg().to_radians(),
        cam.pitch_deg().to_radians(),
        cam.roll_deg().to_radians(),
    );
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sr, cr) = roll.sin_cos();
    // Camera-to-world R = Ry(yaw)·Rx(pitch)·Rz(roll); a world direction maps
    // to camera coordinates through Rᵀ.
    let ry = [[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]];
    let rx = [[1.0, 0.0, 0.0], [0.0, cp, sp], [0.0, -sp, cp]];
    let rz = [[cr, sr, 0.0], [-sr, cr, 0.0], [0.0, 0.0, 1.0]];
    let mul = |a: [[f64; 3]; 3], b: [[f64; 3]; 3]| {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        m
    };
    let r = mul(mul(ry, rx), rz);

    let tan_half = (cam.fov_deg().to_radians() / 2.0).tan();
    let horiz = tan_half;
    let vert = tan_half * pers_h as f64 / pers_w as f64;

    let mut rng = SplitMix64::new(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let y = 2.0 * rng.next_f64() - 1.0;
        let az = std::f64::consts::TAU * rng.next_f64();
        let rad = (1.0 - y * y).max(0.0).sqrt();
        let d = [rad * az.sin(), y, rad * az.cos()];
        // Rᵀ·d
        let cx = r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2];
        let cyv = r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2];
        let cz = r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2];
        if cz > 0.0 && (cx / cz).abs() <= horiz && (cyv / cz).abs() <= vert {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

/// Independent supersampled perspective renderer. For each output pixel it
/// averages `ss × ss` sub-rays, builds the camera rotation and the ERP lookup
/// from scratch, and bilinearly samples with its own wrap handling.
pub fn reference_render(
    erp: &ErpImage,
    cam: &CameraParams,
    out_h: usize,
    out_w: usize,
    ss: usize,
) -> PerspImage {
    let (h, w, c) = (erp.height(), erp.width(), erp.channels());
    let (yaw, pitch, roll) = (
        cam.yaw_deg().to_radians(),
        cam.pitch_deg().to_radians(),
        cam.roll_deg().to_radians(),
    );
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sr, cr) = roll.sin_cos();
    // Entries of Ry·Rx·Rz expanded by hand.
    let r = [
        [
            cy * cr + sy * sp * sr,
            cy * sr - sy * sp * cr,
            sy * cp,
        ],
        [-cp * sr, cp * cr, sp],
        [
            -sy * cr + cy * sp * sr,
            -sy * sr - cy * sp * cr,
            cy * cp,
        ],
    ];
    let f = (out_w as f64 / 2.0) / (cam.fov_deg().to_radians() / 2.0).tan();

    let sample = |ci: f64, cj: f64, ch: usize| -> f64 {
        let i0 = ci.floor();
        let j0 = cj.floor();
        let fi = ci - i0;
        let fj = cj - j0;
        let mut acc = 0.0;
        for (di, wi) in [(0i64, 1.0 - fi), (1, fi)] {
            let row = (i0 as i64 + di).clamp(0, h as i64 - 1) as usize;
            for (dj, wj) in [(0i64, 1.0 - fj), (1, fj)] {
                let col = (j0 as i64 + dj).rem_euclid(w as i64) as usize;
                acc += wi * wj * erp.get(row, col, ch) as f64;
            }
        }
        acc
    };

    let mut data = vec![0.0f32; out_h * out_w * c];
    for v in 0..out_h {
        for u in 0..out_w {
            for ch in 0..c {
                let mut acc = 0.0;
                for a in 0..ss {
                    for b in 0..ss {
                        let du = (b as f64 + 0.5) / ss as f64;
                        let dv = (a as f64 + 0.5) / ss as f64;
                        let px = u as f64 + du - out_w as f64 / 2.0;
                        let py = -(v as f64 + dv - out_h as f64 / 2.0);
                        let norm = (px * px + py * py + f * f).sqrt();
                        let (dx, dy, dz) = (px / norm, py / norm, f / norm);
                        let wx = r[0][0] * dx + r[0][1] * dy + r[0][2] * dz;
                        let wy = r[1][0] * dx + r[1][1] * dy + r[1][2] * dz;
                        let wz = r[2][0] * dx + r[2][1] * dy + r[2][2] * dz;
                        let lon = wx.atan2(wz);
                        let lat = wy.clamp(-1.0, 1.0).asin();
                        let ci = (std::f64::consts::PI / 2.0 - lat) * h as f64
                            / std::f64::consts::PI
                            - 0.5;
                        let cj = (lon + std::f64::consts::PI) * w as f64
                            / std::f64::consts::TAU
                            - 0.5;
                        acc += sample(ci.clamp(-0.5, h as f64 - 0.5), cj, ch);
                    }
                }
                data[(v * out_w + u) * c + ch] = (acc / (ss * ss) as f64) as f32;
            }
        }
    }
    PerspImage::new(out_h, out_w, c, data).unwrap()
}

/// Plain two-stage grid search written as bare loops over
/// [`render_residual`]: no early abort, no precomputation, first strict
/// improvement wins (equivalent to the smallest-(fov, pitch, roll) tie-break
/// when iterating ascending). Returns (fov, pitch, roll, residual).
pub fn reference_two_stage_search(
    pers: &PerspImage,
    erp: &ErpImage,
    fov_grid: (f64, f64, f64),
    pitch_grid: (f64, f64, f64),
    roll_grid: (f64, f64, f64),
    fine_steps: (f64, f64, f64),
    score_res: usize,
) -> (f64, f64, f64, f64) {
    let axis = |(lo, hi, step): (f64, f64, f64)| -> Vec<f64> {
        let mut v = Vec::new();
        let mut k = 0usize;
        loop {
            let x = lo + step * k as f64;
            if x > hi + step * 1e-9 {
                break;
            }
            v.push(x);
            k += 1;
        }
        v
    };
    let score = |fov: f64, pitch: f64, roll: f64| -> f64 {
        let cam = CameraParams::new(fov, 0.0, pitch, roll).unwrap();
        render_residual(pers, erp, &cam, score_res).unwrap()
    };
    let argmin = |fovs: &[f64], pitches: &[f64], rolls: &[f64]| -> (f64, f64, f64, f64) {
        let mut best = (f64::NAN, f64::NAN, f64::NAN, f64::INFINITY);
        for &fv in fovs {
            for &pt in pitches {
                for &rl in rolls {
                    let s = score(fv, pt, rl);
                    if s < best.3 {
                        best = (fv, pt, rl, s);
                    }
                }
            }
        }
        best
    };

    let coarse = argmin(&axis(fov_grid), &axis(pitch_grid), &axis(roll_grid));

    let fine_axis = |center: f64, coarse_step: f64, fine_step: f64, valid: &dyn Fn(f64) -> bool| {
        let n = (coarse_step / fine_step).round() as i64;
        (-n..=n)
            .map(|k| center + k as f64 * fine_step)
            .filter(|&x| valid(x))
            .collect::<Vec<f64>>()
    };
    let fovs = fine_axis(coarse.0, fov_grid.2, fine_steps.0, &|x| {
        x > 0.0 && x < 180.0
    });
    let pitches = fine_axis(coarse.1, pitch_grid.2, fine_steps.1, &|x| {
        (-90.0..=90.0).contains(&x)
    });
    let rolls = fine_axis(coarse.2, roll_grid.2, fine_steps.2, &|_| true);
    argmin(&fovs, &pitches, &rolls)
}

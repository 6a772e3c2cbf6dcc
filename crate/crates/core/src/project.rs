//! Projection between equirectangular panoramas and perspective views, plus
//! panorama rotation and cubemap conversion.
//!
//! All resampling is bilinear with horizontal wrap / vertical clamp on the
//! panorama side and edge clamp on the perspective side. Yaw is applied as an
//! ERP column offset rather than folded into the rotation matrix: a yaw that
//! is a whole number of columns (any multiple of `360/W` degrees) then shifts
//! fetch indices exactly, so such renders are bit-exact column permutations
//! of their yaw-zero counterparts.

use crate::error::{Error, Result};
use crate::image::{CoverageMask, ErpImage, ImagePixels, PerspImage};
use crate::sphere::{pitch_roll_matrix, CameraParams, Rotation3};
use std::f64::consts::{PI, TAU};

/// Result of lifting a perspective image onto the sphere: the partial ERP
/// image and the binary mask of covered panorama pixels. Pixels outside the
/// mask are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedConditioning {
    pub image: ErpImage,
    pub mask: CoverageMask,
}

/// The six cube faces, each a square perspective render with 90° fov.
///
/// Face orientations (yaw, pitch) in degrees: front (0,0) looks along `+Z`,
/// right (90,0) along `+X`, back (180,0) along `−Z`, left (−90,0) along
/// `−X`, up (0,90) along `+Y`, down (0,−90) along `−Y`. Within every face,
/// image right is the camera's `+x` axis after that rotation; in particular
/// the top edge of the up face points along `−Z` (backward) and the top edge
/// of the down face points along `+Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubemapFaces {
    pub front: PerspImage,
    pub right: PerspImage,
    pub back: PerspImage,
    pub left: PerspImage,
    pub up: PerspImage,
    pub down: PerspImage,
}

impl CubemapFaces {
    /// Faces with their conventional names, in fixed order.
    pub fn named(&self) -> [(&'static str, &PerspImage); 6] {
        [
            ("front", &self.front),
            ("right", &self.right),
            ("back", &self.back),
            ("left", &self.left),
            ("up", &self.up),
            ("down", &self.down),
        ]
    }
}

/// Camera poses of the six cube faces, paired with their names.
pub(crate) fn cube_face_cameras() -> [(&'static str, CameraParams); 6] {
    let cam = |yaw: f64, pitch: f64| CameraParams::new(90.0, yaw, pitch, 0.0).expect("valid");
    [
        ("front", cam(0.0, 0.0)),
        ("right", cam(90.0, 0.0)),
        ("back", cam(180.0, 0.0)),
        ("left", cam(-90.0, 0.0)),
        ("up", cam(0.0, 90.0)),
        ("down", cam(0.0, -90.0)),
    ]
}

/// Unit camera-frame rays for every pixel of an `h × w` image with focal
/// `f` px, row-major. Shared by rendering and calibration so that both walk
/// bit-identical numerics.
pub(crate) fn unit_rays(f: f64, h: usize, w: usize) -> Vec<[f64; 3]> {
    let mut rays = Vec::with_capacity(h * w);
    let (hf, wf) = (h as f64, w as f64);
    for v in 0..h {
        let y = -((v as f64 + 0.5) - hf / 2.0);
        for u in 0..w {
            let x = (u as f64 + 0.5) - wf / 2.0;
            let n = (x * x + y * y + f * f).sqrt();
            rays.push([x / n, y / n, f / n]);
        }
    }
    rays
}

/// Continuous ERP coordinates of a unit world direction (no yaw applied).
#[inline]
pub(crate) fn erp_coords_unit(x: f64, y: f64, z: f64, h: usize, w: usize) -> (f64, f64) {
    let lambda = x.atan2(z);
    let phi = y.clamp(-1.0, 1.0).asin();
    let i = (0.5 - phi / PI) * h as f64 - 0.5;
    let j = (lambda / TAU + 0.5) * w as f64 - 0.5;
    (i, j)
}

/// Yaw in degrees as a (possibly fractional) ERP column count, split into an
/// exact integer offset and a fractional remainder.
#[inline]
pub(crate) fn yaw_column_split(yaw_deg: f64, w: usize) -> (i64, f64) {
    let cols = yaw_deg * w as f64 / 360.0;
    if cols == cols.round() && cols.abs() < 4.0 * w as f64 {
        (cols as i64, 0.0)
    } else {
        (0, cols)
    }
}

/// Render a perspective view of the panorama.
///
/// The camera looks along its rotated `+Z` axis with horizontal field of
/// view `cam.fov_deg()`; output pixel rays follow the pinhole convention in
/// [`crate::sphere`]. Sampling is bilinear with wrap/clamp.
pub fn pano2pers(
    erp: &ErpImage,
    cam: &CameraParams,
    out_h: usize,
    out_w: usize,
) -> Result<PerspImage> {
    if out_h < 2 || out_w < 2 {
        return Err(Error::invalid(format!(
            "output size must be at least 2x2, got {out_h}x{out_w}"
        )));
    }
    let f = cam.focal_px(out_w);
    let m = pitch_roll_matrix(cam.pitch_deg(), cam.roll_deg());
    let (col_off, col_frac) = yaw_column_split(cam.yaw_deg(), erp.width());
    let rays = unit_rays(f, out_h, out_w);
    let c = erp.channels();
    let mut data = Vec::with_capacity(out_h * out_w * c);
    for ray in &rays {
        let (dx, dy, dz) = m.apply(ray[0], ray[1], ray[2]);
        let (si, sj) = erp_coords_unit(dx, dy, dz, erp.height(), erp.width());
        let sj = sj + col_frac;
        for ch in 0..c {
            data.push(erp.sample_wrapped(si, sj, col_off, ch));
        }
    }
    PerspImage::new(out_h, out_w, c, data)
}

/// Precomputed geometry for projecting ERP pixels into one camera frustum.
struct PersProjector {
    mt: Rotation3,
    f: f64,
    pers_h: f64,
    pers_w: f64,
    /// (sin λ, cos λ) per ERP column, yaw already folded in.
    col_trig: Vec<(f64, f64)>,
    /// (sin φ, cos φ) per ERP row.
    row_trig: Vec<(f64, f64)>,
}

impl PersProjector {
    fn new(cam: &CameraParams, pers_h: usize, pers_w: usize, erp_h: usize) -> Self {
        let erp_w = 2 * erp_h;
        let wf = erp_w as f64;
        let yaw_cols = cam.yaw_deg() * wf / 360.0;
        let col_trig = (0..erp_w)
            .map(|j| {
                // Same arithmetic as `erp_dir` evaluated at column j − yaw.
                let t = ((j as f64 - yaw_cols) + 0.5).rem_euclid(wf);
                let lambda = TAU * (t / wf) - PI;
                (lambda.sin(), lambda.cos())
            })
            .collect();
        let row_trig = (0..erp_h)
            .map(|i| {
                let phi = PI / 2.0 - PI * ((i as f64 + 0.5) / erp_h as f64);
                (phi.sin(), phi.cos())
            })
            .collect();
        PersProjector {
            mt: pitch_roll_matrix(cam.pitch_deg(), cam.roll_deg()).transpose(),
            f: cam.focal_px(pers_w),
            pers_h: pers_h as f64,
            pers_w: pers_w as f64,
            col_trig,
            row_trig,
        }
    }

    /// Continuous perspective coordinates `(row, col)` for ERP pixel
    /// `(i, j)`, or `None` when the pixel lies outside the frustum. The
    /// frustum is the strictly-forward half-space with inclusive bounds
    /// `[−0.5, size−0.5]` on both axes.
    #[inline]
    fn project(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let (sp, cp) = self.row_trig[i];
        let (sl, cl) = self.col_trig[j];
        let (dx, dy, dz) = (cp * sl, sp, cp * cl);
        let (rx, ry, rz) = self.mt.apply(dx, dy, dz);
        if rz <= 0.0 {
            return None;
        }
        let u = self.f * (rx / rz) + (self.pers_w / 2.0 - 0.5);
        let v = (self.pers_h / 2.0 - 0.5) - self.f * (ry / rz);
        if u >= -0.5 && u <= self.pers_w - 0.5 && v >= -0.5 && v <= self.pers_h - 0.5 {
            Some((v, u))
        } else {
            None
        }
    }
}

/// Lift a perspective image onto an `erp_h × 2·erp_h` panorama.
///
/// Covered pixels carry the bilinearly sampled perspective value; all other
/// pixels are exactly zero with mask 0.
pub fn pers2pano(
    pers: &PerspImage,
    cam: &CameraParams,
    erp_h: usize,
) -> Result<ProjectedConditioning> {
    if erp_h < 2 {
        return Err(Error::invalid(format!("ERP height must be >= 2, got {erp_h}")));
    }
    let erp_w = 2 * erp_h;
    let proj = PersProjector::new(cam, pers.height(), pers.width(), erp_h);
    let c = pers.channels();
    let mut data = vec![0.0f32; erp_h * erp_w * c];
    let mut mask = vec![false; erp_h * erp_w];
    for i in 0..erp_h {
        for j in 0..erp_w {
            if let Some((v, u)) = proj.project(i, j) {
                mask[i * erp_w + j] = true;
                for ch in 0..c {
                    data[(i * erp_w + j) * c + ch] = pers.sample_clamped(v, u, ch);
                }
            }
        }
    }
    Ok(ProjectedConditioning {
        image: ErpImage::new(erp_h, erp_w, c, data)?,
        mask: CoverageMask::from_data(erp_h, erp_w, mask),
    })
}

/// Coverage mask of a `pers_h × pers_w` camera at `cam`, without sampling
/// any pixels. Identical to the mask produced by [`pers2pano`].
pub fn coverage_mask(
    cam: &CameraParams,
    pers_h: usize,
    pers_w: usize,
    erp_h: usize,
) -> Result<CoverageMask> {
    if erp_h < 2 {
        return Err(Error::invalid(format!("ERP height must be >= 2, got {erp_h}")));
    }
    if pers_h < 2 || pers_w < 2 {
        return Err(Error::invalid(format!(
            "perspective size must be at least 2x2, got {pers_h}x{pers_w}"
        )));
    }
    let erp_w = 2 * erp_h;
    let proj = PersProjector::new(cam, pers_h, pers_w, erp_h);
    let mut mask = vec![false; erp_h * erp_w];
    for i in 0..erp_h {
        for j in 0..erp_w {
            if proj.project(i, j).is_some() {
                mask[i * erp_w + j] = true;
            }
        }
    }
    Ok(CoverageMask::from_data(erp_h, erp_w, mask))
}

/// Rotate a panorama: output pixel with direction `d` takes the input value
/// at direction `R·d`.
pub fn rotate_erp(erp: &ErpImage, rot: &Rotation3) -> ErpImage {
    let (h, w, c) = (erp.height(), erp.width(), erp.channels());
    let (hf, wf) = (h as f64, w as f64);
    let col_trig: Vec<(f64, f64)> = (0..w)
        .map(|j| {
            let lambda = TAU * ((j as f64 + 0.5) / wf) - PI;
            (lambda.sin(), lambda.cos())
        })
        .collect();
    let row_trig: Vec<(f64, f64)> = (0..h)
        .map(|i| {
            let phi = PI / 2.0 - PI * ((i as f64 + 0.5) / hf);
            (phi.sin(), phi.cos())
        })
        .collect();
    let mut data = Vec::with_capacity(h * w * c);
    for i in 0..h {
        let (sp, cp) = row_trig[i];
        for j in 0..w {
            let (sl, cl) = col_trig[j];
            let (dx, dy, dz) = (cp * sl, sp, cp * cl);
            let (sx, sy, sz) = rot.apply(dx, dy, dz);
            let (si, sj) = erp_coords_unit(sx, sy, sz, h, w);
            for ch in 0..c {
                data.push(erp.sample_wrapped(si, sj, 0, ch));
            }
        }
    }
    ErpImage::new(h, w, c, data).expect("rotation preserves shape")
}

/// Render the panorama onto the six cube faces (`face_size²` each, fov 90°).
pub fn erp_to_cubemap(erp: &ErpImage, face_size: usize) -> Result<CubemapFaces> {
    if face_size < 2 {
        return Err(Error::invalid(format!(
            "cube face size must be >= 2, got {face_size}"
        )));
    }
    let cams = cube_face_cameras();
    let render = |idx: usize| pano2pers(erp, &cams[idx].1, face_size, face_size);
    Ok(CubemapFaces {
        front: render(0)?,
        right: render(1)?,
        back: render(2)?,
        left: render(3)?,
        up: render(4)?,
        down: render(5)?,
    })
}

/// Reassemble a panorama from cube faces.
///
/// Every ERP pixel direction is assigned to the face of its largest absolute
/// axis component; exact ties prefer the `±Z` pair, then `±X`, then `±Y`.
/// Face sampling is bilinear with edge clamp, so seams between faces reuse
/// edge pixels from both sides.
pub fn cubemap_to_erp(faces: &CubemapFaces, erp_h: usize) -> Result<ErpImage> {
    if erp_h < 2 {
        return Err(Error::invalid(format!("ERP height must be >= 2, got {erp_h}")));
    }
    let named = faces.named();
    let s = named[0].1.height();
    let c = named[0].1.channels();
    for (name, face) in &named {
        if face.height() != s || face.width() != s {
            return Err(Error::invalid(format!(
                "cube faces must be equal squares; face '{name}' is {}x{}, expected {s}x{s}",
                face.height(),
                face.width()
            )));
        }
        if face.channels() != c {
            return Err(Error::invalid(format!(
                "cube faces must share a channel count; face '{name}' has {}",
                face.channels()
            )));
        }
    }
    // World-to-camera matrices, paired with the face index in `named`.
    let cams = cube_face_cameras();
    let inv: Vec<Rotation3> = cams.iter().map(|(_, cam)| cam.rotation().transpose()).collect();
    let f = CameraParams::new(90.0, 0.0, 0.0, 0.0)
        .expect("valid")
        .focal_px(s);
    let (w, hf, wf) = (2 * erp_h, erp_h as f64, 2.0 * erp_h as f64);
    let mut data = Vec::with_capacity(erp_h * w * c);
    for i in 0..erp_h {
        let phi = PI / 2.0 - PI * ((i as f64 + 0.5) / hf);
        let (sp, cp) = (phi.sin(), phi.cos());
        for j in 0..w {
            let lambda = TAU * ((j as f64 + 0.5) / wf) - PI;
            let (dx, dy, dz) = (cp * lambda.sin(), sp, cp * lambda.cos());
            let (ax, ay, az) = (dx.abs(), dy.abs(), dz.abs());
            let face_idx = if az >= ax && az >= ay {
                if dz >= 0.0 {
                    0
                } else {
                    2
                }
            } else if ax >= ay {
                if dx >= 0.0 {
                    1
                } else {
                    3
                }
            } else if dy >= 0.0 {
                4
            } else {
                5
            };
            let (rx, ry, rz) = inv[face_idx].apply(dx, dy, dz);
            let u = f * (rx / rz) + (s as f64 / 2.0 - 0.5);
            let v = (s as f64 / 2.0 - 0.5) - f * (ry / rz);
            let face = named[face_idx].1;
            for ch in 0..c {
                data.push(face.sample_clamped(v, u, ch));
            }
        }
    }
    ErpImage::new(erp_h, w, c, data)
}

//! Zero-shot camera calibration: recover (fov, pitch, roll) — optionally
//! yaw — of a perspective crop against the panorama it was taken from, by
//! exhaustive search over a coarse grid followed by a fine grid around the
//! coarse winner.
//!
//! Scoring renders the panorama at a small square resolution with exactly
//! the machinery of [`pano2pers`](crate::project::pano2pers) and compares
//! against the box-downsampled crop. Candidates are ranked by the
//! full-precision sum of squared differences; the reported residual is the
//! mean squared error recomputed at the crop's own resolution. Evaluation
//! order is fixed (ascending fov, pitch, roll, yaw), ties keep the earliest
//! — i.e. lexicographically smallest — candidate, and a candidate whose
//! partial sum already exceeds the incumbent is abandoned early, which
//! cannot change the argmin because partial sums only grow.

use crate::error::{Error, Result};
use crate::image::{box_downsample, ErpImage, ImagePixels, PerspImage};
use crate::project::{erp_coords_unit, unit_rays, yaw_column_split};
use crate::sphere::{pitch_roll_matrix, CameraParams};
use serde::Serialize;

/// Grid layout of the two search stages.
///
/// Stage 1 is the Cartesian product of the coarse ranges. Stage 2 spans
/// `± coarse step` around the stage-1 winner at the fine steps (the winner
/// itself is always on the fine grid). Yaw is fixed at 0 unless
/// `search_yaw` is set, in which case stage 1 walks a full ring at
/// `yaw_step` and stage 2 refines at `fine_yaw_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub fov_range: (f64, f64),
    pub fov_step: f64,
    pub pitch_range: (f64, f64),
    pub pitch_step: f64,
    pub roll_range: (f64, f64),
    pub roll_step: f64,
    pub fine_fov_step: f64,
    pub fine_pitch_step: f64,
    pub fine_roll_step: f64,
    /// Square rendering resolution used for scoring.
    pub score_res: usize,
    pub search_yaw: bool,
    pub yaw_step: f64,
    pub fine_yaw_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            fov_range: (30.0, 120.0),
            fov_step: 5.0,
            pitch_range: (-60.0, 60.0),
            pitch_step: 5.0,
            roll_range: (-15.0, 15.0),
            roll_step: 2.5,
            fine_fov_step: 0.5,
            fine_pitch_step: 0.5,
            fine_roll_step: 0.25,
            score_res: 64,
            search_yaw: false,
            yaw_step: 10.0,
            fine_yaw_step: 1.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let axis = |name: &str, (lo, hi): (f64, f64), step: f64, fine: f64| -> Result<()> {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::invalid(format!(
                    "{name} range [{lo}, {hi}] is empty or not finite"
                )));
            }
            if !(step > 0.0 && step.is_finite()) || !(fine > 0.0 && fine.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} steps must be positive, got coarse {step} fine {fine}"
                )));
            }
            if fine > step {
                return Err(Error::invalid(format!(
                    "{name} fine step {fine} exceeds coarse step {step}"
                )));
            }
            Ok(())
        };
        axis("fov", self.fov_range, self.fov_step, self.fine_fov_step)?;
        axis("pitch", self.pitch_range, self.pitch_step, self.fine_pitch_step)?;
        axis("roll", self.roll_range, self.roll_step, self.fine_roll_step)?;
        if self.fov_range.0 <= 0.0 || self.fov_range.1 >= 180.0 {
            return Err(Error::invalid(format!(
                "fov range [{}, {}] must stay inside (0, 180)",
                self.fov_range.0, self.fov_range.1
            )));
        }
        if self.score_res < 2 {
            return Err(Error::invalid(format!(
                "scoring resolution must be at least 2, got {}",
                self.score_res
            )));
        }
        if self.search_yaw {
            if !(self.yaw_step > 0.0 && self.yaw_step.is_finite())
                || !(self.fine_yaw_step > 0.0 && self.fine_yaw_step.is_finite())
            {
                return Err(Error::invalid("yaw steps must be positive"));
            }
            if self.fine_yaw_step > self.yaw_step {
                return Err(Error::invalid(format!(
                    "fine yaw step {} exceeds coarse yaw step {}",
                    self.fine_yaw_step, self.yaw_step
                )));
            }
        }
        Ok(())
    }
}

/// Calibration outcome: recovered camera, full-resolution mean squared
/// residual, and how many grid candidates the two stages evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct CalibResult {
    #[serde(flatten)]
    params: CameraParams,
    residual: f64,
    evaluations: usize,
}

impl CalibResult {
    pub fn params(&self) -> &CameraParams {
        &self.params
    }
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

/// Sum of squared differences between `ds` (a `res×res×c` reference) and the
/// panorama rendered at the candidate pose, walking pixels row-major and
/// channels innermost. Returns `None` as soon as the partial sum exceeds
/// `abort_above`.
#[allow(clippy::too_many_arguments)]
fn ssd_against(
    ds: &[f32],
    c: usize,
    rays: &[[f64; 3]],
    erp: &ErpImage,
    pitch: f64,
    roll: f64,
    yaw: f64,
    abort_above: f64,
) -> Option<f64> {
    let m = pitch_roll_matrix(pitch, roll);
    let (col_off, col_frac) = yaw_column_split(yaw, erp.width());
    let (h, w) = (erp.height(), erp.width());
    let mut ssd = 0.0f64;
    for (p, ray) in rays.iter().enumerate() {
        let (dx, dy, dz) = m.apply(ray[0], ray[1], ray[2]);
        let (si, sj) = erp_coords_unit(dx, dy, dz, h, w);
        let sj = sj + col_frac;
        for ch in 0..c {
            let v = erp.sample_wrapped(si, sj, col_off, ch);
            let d = v as f64 - ds[p * c + ch] as f64;
            ssd += d * d;
        }
        if ssd > abort_above {
            return None;
        }
    }
    Some(ssd)
}

/// Mean squared error between the crop (box-downsampled to `res×res`) and
/// the panorama rendered at `cam` with the same resolution.
pub fn render_residual(
    pers: &PerspImage,
    erp: &ErpImage,
    cam: &CameraParams,
    res: usize,
) -> Result<f64> {
    if res < 2 {
        return Err(Error::invalid(format!("residual resolution must be >= 2, got {res}")));
    }
    let c = pers.channels();
    if c != erp.channels() {
        return Err(Error::invalid(format!(
            "channel mismatch: perspective has {c}, panorama has {}",
            erp.channels()
        )));
    }
    let ds = box_downsample(pers.data(), pers.height(), pers.width(), c, res, res);
    let rays = unit_rays(cam.focal_px(res), res, res);
    let ssd = ssd_against(
        &ds,
        c,
        &rays,
        erp,
        cam.pitch_deg(),
        cam.roll_deg(),
        cam.yaw_deg(),
        f64::INFINITY,
    )
    .expect("no abort threshold");
    Ok(ssd / (res * res * c) as f64)
}

/// `lo, lo+step, …` up to `hi` (inclusive within a 1e−9·step tolerance).
fn grid_values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut vals = Vec::new();
    let tol = step * 1e-9;
    let mut k = 0u32;
    loop {
        let v = lo + k as f64 * step;
        if v > hi + tol {
            break;
        }
        vals.push(v);
        k += 1;
    }
    vals
}

/// `center ± n·fine` with `n = round(coarse/fine)`, ascending; always
/// contains the center exactly.
fn fine_values(center: f64, coarse_step: f64, fine_step: f64) -> Vec<f64> {
    let n = (coarse_step / fine_step).round() as i64;
    (-n..=n).map(|k| center + k as f64 * fine_step).collect()
}

struct Candidate {
    fov: f64,
    pitch: f64,
    roll: f64,
    yaw: f64,
}

/// Argmin of `ssd_against` over candidates ordered ascending by
/// (fov, pitch, roll, yaw). Returns the winner and how many candidates the
/// grid contained. `fovs` must be non-empty, as must the inner axes.
#[allow(clippy::too_many_arguments)]
fn search_stage(
    ds: &[f32],
    c: usize,
    res: usize,
    erp: &ErpImage,
    fovs: &[f64],
    pitches: &[f64],
    rolls: &[f64],
    yaws: &[f64],
) -> (Candidate, f64, usize) {
    let mut best: Option<(Candidate, f64)> = None;
    let mut count = 0usize;
    for &fov in fovs {
        let f = (res as f64 / 2.0) / (fov.to_radians() / 2.0).tan();
        let rays = unit_rays(f, res, res);
        for &pitch in pitches {
            for &roll in rolls {
                for &yaw in yaws {
                    count += 1;
                    let abort = best.as_ref().map_or(f64::INFINITY, |(_, s)| *s);
                    if let Some(ssd) = ssd_against(ds, c, &rays, erp, pitch, roll, yaw, abort) {
                        let better = match &best {
                            None => true,
                            Some((_, s)) => ssd < *s,
                        };
                        if better {
                            best = Some((Candidate { fov, pitch, roll, yaw }, ssd));
                        }
                    }
                }
            }
        }
    }
    let (cand, ssd) = best.expect("grids are validated non-empty");
    (cand, ssd, count)
}

/// Recover camera parameters by two-stage exhaustive search.
///
/// Stage 1 scans the full coarse grid; stage 2 re-scans `± coarse step`
/// around the winner at the fine steps. Both stages score against the same
/// downsampled crop, rank by exact SSD, and break ties toward the
/// lexicographically smallest (fov, pitch, roll, yaw). Fine-stage
/// candidates may step slightly outside the coarse ranges; candidates that
/// are not representable cameras (pitch beyond ±90°, fov outside (0, 180))
/// are dropped from the grid before counting. The reported residual is
/// recomputed at the crop's native (square) resolution.
pub fn calibrate(pers: &PerspImage, erp: &ErpImage, cfg: &SearchConfig) -> Result<CalibResult> {
    cfg.validate()?;
    let c = pers.channels();
    if c != erp.channels() {
        return Err(Error::invalid(format!(
            "channel mismatch: perspective has {c}, panorama has {}",
            erp.channels()
        )));
    }
    let res = cfg.score_res;
    let ds = box_downsample(pers.data(), pers.height(), pers.width(), c, res, res);

    let valid_fov = |v: &f64| *v > 0.0 && *v < 180.0;
    let valid_pitch = |v: &f64| *v >= -90.0 && *v <= 90.0;

    let fovs = grid_values(cfg.fov_range.0, cfg.fov_range.1, cfg.fov_step);
    let pitches = grid_values(cfg.pitch_range.0, cfg.pitch_range.1, cfg.pitch_step);
    let rolls = grid_values(cfg.roll_range.0, cfg.roll_range.1, cfg.roll_step);
    let yaws = if cfg.search_yaw {
        grid_values(0.0, 360.0 - cfg.yaw_step, cfg.yaw_step)
    } else {
        vec![0.0]
    };
    for (name, g) in [("fov", &fovs), ("pitch", &pitches), ("roll", &rolls), ("yaw", &yaws)] {
        if g.is_empty() {
            return Err(Error::invalid(format!("{name} grid is empty")));
        }
    }

    let (coarse, _, coarse_count) =
        search_stage(&ds, c, res, erp, &fovs, &pitches, &rolls, &yaws);

    let fine_fovs: Vec<f64> = fine_values(coarse.fov, cfg.fov_step, cfg.fine_fov_step)
        .into_iter()
        .filter(valid_fov)
        .collect();
    let fine_pitches: Vec<f64> = fine_values(coarse.pitch, cfg.pitch_step, cfg.fine_pitch_step)
        .into_iter()
        .filter(valid_pitch)
        .collect();
    let fine_rolls = fine_values(coarse.roll, cfg.roll_step, cfg.fine_roll_step);
    let fine_yaws = if cfg.search_yaw {
        fine_values(coarse.yaw, cfg.yaw_step, cfg.fine_yaw_step)
    } else {
        vec![0.0]
    };

    let (fine, _, fine_count) = search_stage(
        &ds,
        c,
        res,
        erp,
        &fine_fovs,
        &fine_pitches,
        &fine_rolls,
        &fine_yaws,
    );

    let params = CameraParams::new(fine.fov, fine.yaw, fine.pitch, fine.roll)?;
    let full_res = pers.height().min(pers.width());
    let residual = render_residual(pers, erp, &params, full_res)?;
    Ok(CalibResult {
        params,
        residual,
        evaluations: coarse_count + fine_count,
    })
}

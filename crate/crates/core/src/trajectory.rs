//! Camera trajectories: deterministic simulation of smooth rotational
//! motion, JSON ingestion of real trajectories, and panorama-video cropping.
//!
//! Simulated motion is linear-plus-noise: every axis gets one constant
//! angular velocity drawn uniformly within its rate limit, and frames `k ≥ 1`
//! add Gaussian jitter on top of `base + k·velocity`. Field of view stays
//! fixed for a whole simulated clip. Yaw wraps; pitch and roll clamp to
//! their configured ranges.

use crate::error::{Error, Result};
use crate::image::{ErpImage, PerspImage};
use crate::io::atomic_write_bytes;
use crate::project::pano2pers;
use crate::rng::SplitMix64;
use crate::sphere::{sample_camera, wrap_deg, AugmentationRanges, CameraParams};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Provenance of a trajectory. Simulated clips keep fov constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectorySource {
    Simulated,
    Real,
}

/// An ordered list of per-frame camera poses.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: Vec<CameraParams>,
    source: TrajectorySource,
}

impl Trajectory {
    pub fn new(frames: Vec<CameraParams>, source: TrajectorySource) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("trajectory must contain at least one frame"));
        }
        if source == TrajectorySource::Simulated {
            let fov = frames[0].fov_deg();
            if frames.iter().any(|f| f.fov_deg() != fov) {
                return Err(Error::invalid(
                    "simulated trajectories must keep fov constant across frames",
                ));
            }
        }
        Ok(Trajectory { frames, source })
    }

    pub fn frames(&self) -> &[CameraParams] {
        &self.frames
    }

    pub fn source(&self) -> TrajectorySource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Trajectory simulation parameters, all angles in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Clip length T.
    pub frames: usize,
    /// Pose ranges for the base sample and the pitch/roll clamps.
    pub ranges: AugmentationRanges,
    /// Max angular velocity per axis, deg/frame.
    pub max_rate_yaw: f64,
    pub max_rate_pitch: f64,
    pub max_rate_roll: f64,
    /// Std of the per-frame Gaussian jitter, deg.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            frames: 16,
            ranges: AugmentationRanges::default(),
            max_rate_yaw: 0.5,
            max_rate_pitch: 0.25,
            max_rate_roll: 0.1,
            noise_std: 0.05,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("frame count must be at least 1"));
        }
        for (name, rate) in [
            ("yaw", self.max_rate_yaw),
            ("pitch", self.max_rate_pitch),
            ("roll", self.max_rate_roll),
        ] {
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::invalid(format!(
                    "max {name} rate must be finite and >= 0, got {rate}"
                )));
            }
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(Error::invalid(format!(
                "noise std must be finite and >= 0, got {}",
                self.noise_std
            )));
        }
        self.ranges.validate()
    }
}

/// Simulate a rotational camera trajectory, bitwise reproducible in the seed.
///
/// The generator stream is consumed in a fixed order: the base pose via
/// [`sample_camera`] (fov, pitch, roll, yaw), then the three axis velocities
/// (yaw, pitch, roll) uniform within `±max_rate`, then per frame `k ≥ 1` one
/// Gaussian per axis in (yaw, pitch, roll) order. Zero rates and zero noise
/// still consume their draws, so trimming a rate does not reshuffle the rest
/// of the stream.
pub fn simulate_trajectory(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let base = sample_camera(&mut rng, &cfg.ranges)?;
    let v_yaw = rng.uniform(-cfg.max_rate_yaw, cfg.max_rate_yaw);
    let v_pitch = rng.uniform(-cfg.max_rate_pitch, cfg.max_rate_pitch);
    let v_roll = rng.uniform(-cfg.max_rate_roll, cfg.max_rate_roll);

    let mut frames = Vec::with_capacity(cfg.frames);
    frames.push(base);
    for k in 1..cfg.frames {
        let n_yaw = rng.normal() * cfg.noise_std;
        let n_pitch = rng.normal() * cfg.noise_std;
        let n_roll = rng.normal() * cfg.noise_std;
        let kf = k as f64;
        let yaw = wrap_deg(base.yaw_deg() + kf * v_yaw + n_yaw);
        let pitch =
            (base.pitch_deg() + kf * v_pitch + n_pitch).clamp(cfg.ranges.pitch.0, cfg.ranges.pitch.1);
        let roll =
            (base.roll_deg() + kf * v_roll + n_roll).clamp(cfg.ranges.roll.0, cfg.ranges.roll.1);
        frames.push(CameraParams::new(base.fov_deg(), yaw, pitch, roll)?);
    }
    Trajectory::new(frames, TrajectorySource::Simulated)
}

/// Serialized pose record; plain numbers so files stay hand-editable.
#[derive(Serialize, Deserialize)]
struct PoseRecord {
    fov_deg: f64,
    yaw_deg: f64,
    pitch_deg: f64,
    roll_deg: f64,
}

/// On-disk trajectory: either a tagged object or a bare pose array (treated
/// as a real trajectory).
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TrajectoryRepr {
    Tagged {
        source: TrajectorySource,
        frames: Vec<PoseRecord>,
    },
    Bare(Vec<PoseRecord>),
}

fn build_trajectory(
    path: &Path,
    records: Vec<PoseRecord>,
    source: TrajectorySource,
) -> Result<Trajectory> {
    let mut frames = Vec::with_capacity(records.len());
    for (idx, r) in records.into_iter().enumerate() {
        let cam = CameraParams::new(r.fov_deg, r.yaw_deg, r.pitch_deg, r.roll_deg)
            .map_err(|e| Error::format(Some(path), format!("frame {idx}: {e}")))?;
        frames.push(cam);
    }
    Trajectory::new(frames, source).map_err(|e| Error::format(Some(path), e.to_string()))
}

/// Load a trajectory from JSON.
///
/// Accepts either `{"source": "simulated"|"real", "frames": [...]}` or a
/// bare array of poses; bare arrays are tagged real. Invalid poses (and a
/// varying fov under a `simulated` tag) are format errors.
pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let repr: TrajectoryRepr = serde_json::from_str(&text)
        .map_err(|e| Error::format(Some(path), format!("trajectory JSON: {e}")))?;
    match repr {
        TrajectoryRepr::Tagged { source, frames } => build_trajectory(path, frames, source),
        TrajectoryRepr::Bare(frames) => build_trajectory(path, frames, TrajectorySource::Real),
    }
}

/// Write a trajectory as tagged, pretty-printed JSON (atomically).
pub fn save_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    let records: Vec<PoseRecord> = traj
        .frames
        .iter()
        .map(|f| PoseRecord {
            fov_deg: f.fov_deg(),
            yaw_deg: f.yaw_deg(),
            pitch_deg: f.pitch_deg(),
            roll_deg: f.roll_deg(),
        })
        .collect();
    let repr = TrajectoryRepr::Tagged {
        source: traj.source,
        frames: records,
    };
    let mut text = serde_json::to_string_pretty(&repr).expect("pose records serialize");
    text.push('\n');
    atomic_write_bytes(path.as_ref(), text.as_bytes())
}

/// Crop a panorama video into a perspective conditioning video:
/// frame `k` is `pano2pers(erp[k], traj[k], h, w)`.
pub fn crop_video(
    erp_frames: &[ErpImage],
    traj: &Trajectory,
    h: usize,
    w: usize,
) -> Result<Vec<PerspImage>> {
    if erp_frames.len() != traj.len() {
        return Err(Error::invalid(format!(
            "frame count mismatch: {} panorama frames vs {} trajectory poses",
            erp_frames.len(),
            traj.len()
        )));
    }
    erp_frames
        .iter()
        .zip(traj.frames())
        .map(|(erp, cam)| pano2pers(erp, cam, h, w))
        .collect()
}

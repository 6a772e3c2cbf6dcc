//! Geometry and analysis toolkit for lifting perspective images and videos to
//! 360° equirectangular panoramas (ERP).
//!
//! The crate covers the non-learned machinery of a perspective-to-panorama
//! pipeline:
//!
//! * [`sphere`] — directions, rotations, camera parameters and the normative
//!   ERP pixel ↔ sphere conventions everything else is built on;
//! * [`project`] — ERP ↔ perspective resampling, panorama rotation, cubemaps;
//! * [`codec`] — a small deterministic convolutional codec standing in for a
//!   learned autoencoder, with zero vs. circular horizontal padding and the
//!   circular latent encoding (CLE) that removes wrap-seam artifacts;
//! * [`canon`] — video canonicalization: stabilization, gravity averaging and
//!   alignment, yaw-shift augmentation;
//! * [`trajectory`] — simulated camera trajectories and video cropping;
//! * [`calibrate`] — two-stage exhaustive search recovering fov/pitch/roll of
//!   a perspective crop against a panorama;
//! * [`metrics`] — wrap-seam discontinuity score, masked PSNR, latent
//!   shift-equivariance error;
//! * [`io`] — the raw tensor and pose/gravity file formats, atomic writes;
//! * [`rng`] — the artifact-wide SplitMix64 generator;
//! * [`synth`] — deterministic synthetic panoramas used by tests and benches.
//!
//! Everything is deterministic: identical inputs and seeds produce
//! byte-identical outputs, and all randomness flows through [`rng::SplitMix64`].

pub mod calibrate;
pub mod canon;
pub mod codec;
pub mod error;
pub mod image;
pub mod io;
pub mod metrics;
pub mod project;
pub mod rng;
pub mod sphere;
pub mod synth;
pub mod trajectory;

pub use calibrate::{calibrate, render_residual, CalibResult, SearchConfig};
pub use canon::{average_gravity, canonicalize_video, gravity_align, stabilize, yaw_shift_augment};
pub use codec::{
    circular_decode, circular_encode, decode, encode, flow_interpolate, velocity_target,
    CodecWeights, LatentGrid, PaddingMode,
};
pub use error::{Error, Result};
pub use image::{CoverageMask, ErpImage, ImagePixels, PerspImage};
pub use metrics::{
    discontinuity_score, latent_equivariance_error, masked_psnr, wrap_gradient_profile,
    MetricReport,
};
pub use project::{
    cubemap_to_erp, erp_to_cubemap, pano2pers, pers2pano, rotate_erp, CubemapFaces,
    ProjectedConditioning,
};
pub use rng::SplitMix64;
pub use sphere::{
    dir_to_erp, erp_dir, minimal_rotation_between, rotation_from_ypr, sample_camera,
    AugmentationRanges, CameraParams, Rotation3, UnitVec3,
};
pub use trajectory::{
    crop_video, load_trajectory, save_trajectory, simulate_trajectory, SimConfig, Trajectory,
    TrajectorySource,
};

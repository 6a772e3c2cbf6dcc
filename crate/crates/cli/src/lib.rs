//! `panolift` — one binary tying the library into runnable pipelines.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or flag values),
//! 2 for data errors (missing, corrupt, or structurally invalid files).
//! Every subcommand is deterministic: the same flags, inputs, and `--seed`
//! produce byte-identical outputs.

pub mod imgio;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use panolift::calibrate::{calibrate, SearchConfig};
use panolift::codec::{circular_decode, circular_encode, decode, encode, LatentGrid, PaddingMode};
use panolift::io::{atomic_write_bytes, PoseGravityFile, RawTensorFile};
use panolift::metrics::{discontinuity_score, latent_equivariance_error, masked_psnr};
use panolift::project::{cubemap_to_erp, erp_to_cubemap, CubemapFaces};
use panolift::trajectory::{
    crop_video, load_trajectory, save_trajectory, simulate_trajectory, SimConfig,
};
use panolift::{
    canonicalize_video, pano2pers, pers2pano, rotate_erp, rotation_from_ypr, CameraParams,
    ImagePixels, PerspImage, Rotation3, SplitMix64, UnitVec3,
};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "panolift",
    version,
    about = "Projection, canonicalization, codec, and metric pipelines for 360-degree panoramas"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// `WIDTHxHEIGHT`, e.g. `512x512`.
#[derive(Clone, Copy)]
struct Size {
    w: usize,
    h: usize,
}

impl FromStr for Size {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WIDTHxHEIGHT, got '{s}'"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad dimension '{v}' in '{s}'"))
        };
        Ok(Size {
            w: parse(w)?,
            h: parse(h)?,
        })
    }
}

#[derive(Args)]
struct CameraFlags {
    /// Horizontal field of view in degrees (0, 180).
    #[arg(long)]
    fov: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    yaw: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pitch: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    roll: f64,
}

impl CameraFlags {
    fn camera(&self) -> Result<CameraParams, CliError> {
        CameraParams::new(self.fov, self.yaw, self.pitch, self.roll)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    /// Zero-pad horizontally (seam artifacts at the wrap columns).
    Zero,
    /// Circular horizontal padding.
    Circular,
    /// Circular latent encoding: pixel-space circular padding, zero-pad
    /// convolutions, padded latent columns dropped (encode) or cropped
    /// (decode).
    Cle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render a perspective crop from an ERP panorama (pano2pers).
    Project {
        #[arg(long)]
        erp: PathBuf,
        #[command(flatten)]
        cam: CameraFlags,
        /// Output size as WIDTHxHEIGHT.
        #[arg(long)]
        size: Size,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lift a perspective image onto an ERP canvas (pers2pano); pixels
    /// outside the camera frustum are zero and reported in the mask.
    Unproject {
        #[arg(long)]
        pers: PathBuf,
        #[command(flatten)]
        cam: CameraFlags,
        /// Height of the output panorama (width is twice this).
        #[arg(long)]
        erp_height: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional coverage-mask output (white = covered).
        #[arg(long)]
        mask_out: Option<PathBuf>,
    },
    /// Resample an ERP panorama under a rotation given as yaw/pitch/roll or
    /// an explicit row-major matrix. Output direction d shows the input at
    /// R·d.
    Rotate {
        #[arg(long)]
        erp: PathBuf,
        #[arg(long, default_value_t = 0.0, conflicts_with = "matrix", allow_negative_numbers = true)]
        yaw: f64,
        #[arg(long, default_value_t = 0.0, conflicts_with = "matrix", allow_negative_numbers = true)]
        pitch: f64,
        #[arg(long, default_value_t = 0.0, conflicts_with = "matrix", allow_negative_numbers = true)]
        roll: f64,
        /// Nine comma-separated row-major entries of a rotation matrix.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between an ERP panorama and six cube faces. Give --erp with
    /// --out-dir for ERP→faces, or --faces-dir with --out for faces→ERP.
    Cube {
        #[arg(long, requires = "out_dir", conflicts_with_all = ["faces_dir", "out"])]
        erp: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Square face edge in pixels (default: half the ERP height).
        #[arg(long)]
        face_size: Option<usize>,
        #[arg(long, requires = "out")]
        faces_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output panorama height (default: twice the face edge).
        #[arg(long)]
        erp_height: Option<usize>,
    },
    /// Stabilize a clip against frame 0, average its gravity estimates, and
    /// align gravity to the image bottom. Prints the fused gravity as JSON.
    Canonicalize {
        /// Directory of ERP frames (frame_0000.png, ...).
        #[arg(long)]
        frames_dir: PathBuf,
        /// JSON file with per-frame poses and optional gravity estimates.
        #[arg(long)]
        poses: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Recover (fov, pitch, roll) of a perspective crop by two-stage
    /// exhaustive search against the panorama it came from.
    Calibrate {
        #[arg(long)]
        pers: PathBuf,
        #[arg(long)]
        erp: PathBuf,
        /// Also search a coarse yaw ring instead of assuming yaw 0.
        #[arg(long)]
        search_yaw: bool,
        /// Write the result JSON here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the wrap-seam discontinuity score of an image.
    SeamScore {
        #[arg(long)]
        erp: PathBuf,
    },
    /// Encode an image to a latent tensor (.pten, H/8 × W/8 × 4).
    Encode {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// CLE circular padding width in pixels (multiple of 8; default W/8).
        #[arg(long)]
        wprime: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a latent tensor back to an image.
    Decode {
        #[arg(long)]
        latent: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// CLE circular padding width in pixels (multiple of 8; default 16).
        #[arg(long)]
        wprime: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a camera trajectory (or draw one from a pool of real
    /// trajectories with probability --real-prob).
    SimulateTraj {
        /// Clip length T.
        #[arg(long, default_value_t = 16)]
        frames: usize,
        /// Seed for all randomness of this command.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Std of the per-frame pose jitter, degrees.
        #[arg(long, default_value_t = 0.05)]
        noise_std: f64,
        /// Max angular velocity per axis, degrees/frame.
        #[arg(long, default_value_t = 0.5)]
        max_rate_yaw: f64,
        #[arg(long, default_value_t = 0.25)]
        max_rate_pitch: f64,
        #[arg(long, default_value_t = 0.1)]
        max_rate_roll: f64,
        /// Directory of real trajectory JSON files to mix in.
        #[arg(long)]
        real_pool: Option<PathBuf>,
        /// Probability of drawing from --real-pool instead of simulating.
        #[arg(long, default_value_t = 0.2, requires = "real_pool")]
        real_prob: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Crop an ERP clip into perspective conditioning frames along a
    /// trajectory.
    Crop {
        #[arg(long)]
        frames_dir: PathBuf,
        #[arg(long)]
        traj: PathBuf,
        /// Crop size as WIDTHxHEIGHT.
        #[arg(long)]
        size: Size,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// PSNR between two ERP clips over the union of trajectory coverage.
    MaskPsnr {
        #[arg(long)]
        gt_dir: PathBuf,
        #[arg(long)]
        gen_dir: PathBuf,
        #[arg(long)]
        traj: PathBuf,
        /// Conditioning crop size as WIDTHxHEIGHT (defines the masks).
        #[arg(long)]
        size: Size,
        /// Write the report JSON here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the latent shift-equivariance error of a panorama.
    Equivariance {
        #[arg(long)]
        erp: PathBuf,
        /// Use the circular latent encoding instead of zero padding.
        #[arg(long)]
        cle: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(panolift::Error),
}

impl From<panolift::Error> for CliError {
    fn from(e: panolift::Error) -> Self {
        CliError::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match exec(cli.cmd) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn write_json(out: Option<&Path>, json: &str) -> Result<(), CliError> {
    match out {
        Some(path) => atomic_write_bytes(path, format!("{json}\n").as_bytes())?,
        None => println!("{json}"),
    }
    Ok(())
}

fn parse_matrix(text: &str) -> Result<Rotation3, CliError> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--matrix must be 9 comma-separated numbers, got '{text}'")))?;
    if vals.len() != 9 {
        return Err(usage(format!(
            "--matrix needs 9 entries (row-major), got {}",
            vals.len()
        )));
    }
    let rows = [
        [vals[0], vals[1], vals[2]],
        [vals[3], vals[4], vals[5]],
        [vals[6], vals[7], vals[8]],
    ];
    Rotation3::from_rows(rows).map_err(|e| usage(format!("--matrix: {e}")))
}

/// `--wprime` is pixel-denominated everywhere; the decoder works in latent
/// columns, one per 8 pixels.
fn wprime_to_latent_cols(wprime: Option<usize>) -> Result<Option<usize>, CliError> {
    match wprime {
        None => Ok(None),
        Some(w) if w > 0 && w % 8 == 0 => Ok(Some(w / 8)),
        Some(w) => Err(usage(format!(
            "--wprime must be a positive multiple of 8, got {w}"
        ))),
    }
}

fn exec(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Project {
            erp,
            cam,
            size,
            out,
        } => {
            let cam = cam.camera()?;
            if size.w < 2 || size.h < 2 {
                return Err(usage(format!("--size must be at least 2x2, got {}x{}", size.w, size.h)));
            }
            let pano = imgio::read_erp(&erp)?;
            let pers = pano2pers(&pano, &cam, size.h, size.w)?;
            imgio::write_pixels(&out, size.h, size.w, pers.channels(), pers.data())?;
            Ok(())
        }
        Cmd::Unproject {
            pers,
            cam,
            erp_height,
            out,
            mask_out,
        } => {
            let cam = cam.camera()?;
            if erp_height < 2 {
                return Err(usage(format!("--erp-height must be at least 2, got {erp_height}")));
            }
            let img = imgio::read_pers(&pers)?;
            let cond = pers2pano(&img, &cam, erp_height)?;
            imgio::write_pixels(
                &out,
                cond.image.height(),
                cond.image.width(),
                cond.image.channels(),
                cond.image.data(),
            )?;
            if let Some(mask_path) = mask_out {
                let mask = cond.mask.to_image();
                imgio::write_pixels(
                    &mask_path,
                    mask.height(),
                    mask.width(),
                    1,
                    mask.data(),
                )?;
            }
            Ok(())
        }
        Cmd::Rotate {
            erp,
            yaw,
            pitch,
            roll,
            matrix,
            out,
        } => {
            let rot = match matrix {
                Some(text) => parse_matrix(&text)?,
                None => rotation_from_ypr(yaw, pitch, roll),
            };
            let pano = imgio::read_erp(&erp)?;
            let rotated = rotate_erp(&pano, &rot);
            imgio::write_pixels(
                &out,
                rotated.height(),
                rotated.width(),
                rotated.channels(),
                rotated.data(),
            )?;
            Ok(())
        }
        Cmd::Cube {
            erp,
            out_dir,
            face_size,
            faces_dir,
            out,
            erp_height,
        } => run_cube(erp, out_dir, face_size, faces_dir, out, erp_height),
        Cmd::Canonicalize {
            frames_dir,
            poses,
            out_dir,
        } => {
            let frames = imgio::read_erp_frames(&frames_dir)?;
            let pg = PoseGravityFile::load(&poses)?;
            if pg.poses.len() != frames.len() {
                return Err(CliError::Data(panolift::Error::format(
                    Some(&poses),
                    format!(
                        "{} poses for {} frames",
                        pg.poses.len(),
                        frames.len()
                    ),
                )));
            }
            // Without gravity estimates the clip is stabilized but left in
            // frame-0 orientation (aligning to straight-down is the
            // identity).
            let gravity = if pg.gravity.is_empty() {
                vec![UnitVec3::down()]
            } else {
                pg.gravity
            };
            let (out_frames, g) = canonicalize_video(&frames, &pg.poses, &gravity)?;
            imgio::write_frames(
                &out_dir,
                out_frames
                    .iter()
                    .map(|f| (f.height(), f.width(), f.channels(), f.data())),
            )?;
            println!(
                "{}",
                serde_json::json!({ "gravity": [g.x(), g.y(), g.z()] })
            );
            Ok(())
        }
        Cmd::Calibrate {
            pers,
            erp,
            search_yaw,
            json,
        } => {
            let cfg = SearchConfig {
                search_yaw,
                ..SearchConfig::default()
            };
            let pers = imgio::read_pers(&pers)?;
            let pano = imgio::read_erp(&erp)?;
            let result = calibrate(&pers, &pano, &cfg)?;
            let text = serde_json::to_string_pretty(&result).expect("result serializes");
            write_json(json.as_deref(), &text)
        }
        Cmd::SeamScore { erp } => {
            let p = imgio::read_pixels(&erp)?;
            let img = PerspImage::new(p.h, p.w, p.c, p.data)
                .map_err(|e| panolift::Error::format(Some(&erp), e.to_string()))?;
            println!("{}", discontinuity_score(&img));
            Ok(())
        }
        Cmd::Encode {
            image,
            mode,
            wprime,
            out,
        } => {
            if wprime.is_some() && mode != Mode::Cle {
                return Err(usage("--wprime only applies to --mode cle"));
            }
            let latent = match mode {
                Mode::Cle => {
                    wprime_to_latent_cols(wprime)?; // validate multiple-of-8 early
                    let pano = imgio::read_erp(&image)?;
                    circular_encode(&pano, wprime)?
                }
                Mode::Zero | Mode::Circular => {
                    let p = imgio::read_pixels(&image)?;
                    let img = PerspImage::new(p.h, p.w, p.c, p.data)
                        .map_err(|e| panolift::Error::format(Some(&image), e.to_string()))?;
                    let pad = if mode == Mode::Zero {
                        PaddingMode::Zero
                    } else {
                        PaddingMode::Circular
                    };
                    encode(&img, pad)?
                }
            };
            let (h, w, c) = (latent.height(), latent.width(), latent.channels());
            RawTensorFile::new(vec![h, w, c], latent.into_data())?.write(&out)?;
            Ok(())
        }
        Cmd::Decode {
            latent,
            mode,
            wprime,
            out,
        } => {
            if wprime.is_some() && mode != Mode::Cle {
                return Err(usage("--wprime only applies to --mode cle"));
            }
            let pad_cols = wprime_to_latent_cols(wprime)?;
            let t = RawTensorFile::read(&latent)?;
            let grid = match t.dims.as_slice() {
                [h, w, 4] => LatentGrid::new(*h, *w, 4, t.data)
                    .map_err(|e| panolift::Error::format(Some(&latent), e.to_string()))?,
                dims => {
                    return Err(CliError::Data(panolift::Error::format(
                        Some(&latent),
                        format!("expected an H x W x 4 latent tensor, got dims {dims:?}"),
                    )))
                }
            };
            match mode {
                Mode::Cle => {
                    let img = circular_decode(&grid, pad_cols)?;
                    imgio::write_pixels(&out, img.height(), img.width(), img.channels(), img.data())?;
                }
                Mode::Zero | Mode::Circular => {
                    let pad = if mode == Mode::Zero {
                        PaddingMode::Zero
                    } else {
                        PaddingMode::Circular
                    };
                    let img = decode(&grid, pad);
                    imgio::write_pixels(&out, img.height(), img.width(), img.channels(), img.data())?;
                }
            }
            Ok(())
        }
        Cmd::SimulateTraj {
            frames,
            seed,
            noise_std,
            max_rate_yaw,
            max_rate_pitch,
            max_rate_roll,
            real_pool,
            real_prob,
            out,
        } => {
            if !(0.0..=1.0).contains(&real_prob) {
                return Err(usage(format!(
                    "--real-prob must lie in [0, 1], got {real_prob}"
                )));
            }
            let mut cfg = SimConfig {
                frames,
                noise_std,
                max_rate_yaw,
                max_rate_pitch,
                max_rate_roll,
                seed,
                ..SimConfig::default()
            };
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let traj = match real_pool {
                None => simulate_trajectory(&cfg)?,
                Some(pool_dir) => {
                    // Draw order: one uniform for the real-vs-simulated coin,
                    // then one draw for the pool index or the simulation
                    // seed.
                    let mut rng = SplitMix64::new(seed);
                    let mut pool: Vec<PathBuf> = std::fs::read_dir(&pool_dir)
                        .map_err(panolift::Error::from)?
                        .filter_map(|e| e.ok())
                        .map(|e| e.path())
                        .filter(|p| {
                            p.extension().and_then(|e| e.to_str()) == Some("json")
                        })
                        .collect();
                    pool.sort();
                    if pool.is_empty() {
                        return Err(CliError::Data(panolift::Error::format(
                            Some(&pool_dir),
                            "no .json trajectories in --real-pool",
                        )));
                    }
                    if rng.next_f64() < real_prob {
                        let idx = (rng.next_u64() % pool.len() as u64) as usize;
                        load_trajectory(&pool[idx])?
                    } else {
                        cfg.seed = rng.next_u64();
                        simulate_trajectory(&cfg)?
                    }
                }
            };
            save_trajectory(&traj, &out)?;
            Ok(())
        }
        Cmd::Crop {
            frames_dir,
            traj,
            size,
            out_dir,
        } => {
            if size.w < 2 || size.h < 2 {
                return Err(usage(format!("--size must be at least 2x2, got {}x{}", size.w, size.h)));
            }
            let frames = imgio::read_erp_frames(&frames_dir)?;
            let trajectory = load_trajectory(&traj)?;
            let crops = crop_video(&frames, &trajectory, size.h, size.w)?;
            imgio::write_frames(
                &out_dir,
                crops
                    .iter()
                    .map(|f| (f.height(), f.width(), f.channels(), f.data())),
            )?;
            Ok(())
        }
        Cmd::MaskPsnr {
            gt_dir,
            gen_dir,
            traj,
            size,
            json,
        } => {
            let gt = imgio::read_erp_frames(&gt_dir)?;
            let gen = imgio::read_erp_frames(&gen_dir)?;
            let trajectory = load_trajectory(&traj)?;
            let report = masked_psnr(&gt, &gen, &trajectory, size.h, size.w)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            write_json(json.as_deref(), &text)
        }
        Cmd::Equivariance { erp, cle } => {
            let pano = imgio::read_erp(&erp)?;
            println!("{}", latent_equivariance_error(&pano, cle)?);
            Ok(())
        }
    }
}

fn run_cube(
    erp: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    face_size: Option<usize>,
    faces_dir: Option<PathBuf>,
    out: Option<PathBuf>,
    erp_height: Option<usize>,
) -> Result<(), CliError> {
    match (erp, out_dir, faces_dir, out) {
        (Some(erp), Some(out_dir), None, None) => {
            if erp_height.is_some() {
                return Err(usage("--erp-height only applies to faces→ERP"));
            }
            let pano = imgio::read_erp(&erp)?;
            let size = face_size.unwrap_or(pano.height() / 2);
            let faces = erp_to_cubemap(&pano, size)?;
            std::fs::create_dir_all(&out_dir).map_err(panolift::Error::from)?;
            for (name, face) in faces.named() {
                imgio::write_pixels(
                    &out_dir.join(format!("{name}.png")),
                    face.height(),
                    face.width(),
                    face.channels(),
                    face.data(),
                )?;
            }
            Ok(())
        }
        (None, None, Some(dir), Some(out)) => {
            if face_size.is_some() {
                return Err(usage("--face-size only applies to ERP→faces"));
            }
            let read_face = |name: &str| -> Result<PerspImage, CliError> {
                let png = dir.join(format!("{name}.png"));
                let pten = dir.join(format!("{name}.pten"));
                let path = if png.exists() { png } else { pten };
                Ok(imgio::read_pers(&path)?)
            };
            let faces = CubemapFaces {
                front: read_face("front")?,
                right: read_face("right")?,
                back: read_face("back")?,
                left: read_face("left")?,
                up: read_face("up")?,
                down: read_face("down")?,
            };
            let h = erp_height.unwrap_or(2 * faces.front.height());
            let pano = cubemap_to_erp(&faces, h)?;
            imgio::write_pixels(&out, pano.height(), pano.width(), pano.channels(), pano.data())?;
            Ok(())
        }
        _ => Err(usage(
            "cube needs either --erp with --out-dir (ERP→faces) or --faces-dir with --out (faces→ERP)",
        )),
    }
}

//! End-to-end subcommand tests: each one spawns the real binary against
//! small fixtures in a scratch directory.

use panolift::synth::sinusoid_erp;
use panolift::trajectory::load_trajectory;
use panolift::{pano2pers, CameraParams, ErpImage, ImagePixels};
use panolift_cli::imgio;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("panolift-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn panolift(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panolift"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_erp(path: &Path, h: usize, seed: u64) -> ErpImage {
    let erp = sinusoid_erp(h, 3, seed);
    imgio::write_pixels(path, erp.height(), erp.width(), erp.channels(), erp.data()).unwrap();
    erp
}

#[test]
fn project_matches_library_on_quantized_input() {
    let dir = scratch("project");
    write_erp(&dir.join("erp.png"), 64, 1);
    let out = panolift(
        &dir,
        &[
            "project", "--erp", "erp.png", "--fov", "80", "--yaw", "30", "--pitch", "-10",
            "--roll", "4", "--size", "48x32", "--out", "crop.png",
        ],
    );
    assert_ok(&out);

    // The CLI saw the PNG-quantized panorama, so compare against projecting
    // exactly that.
    let quantized = imgio::read_erp(&dir.join("erp.png")).unwrap();
    let cam = CameraParams::new(80.0, 30.0, -10.0, 4.0).unwrap();
    let expect = pano2pers(&quantized, &cam, 32, 48).unwrap();
    let expect_path = dir.join("expect.png");
    imgio::write_pixels(&expect_path, 32, 48, 3, expect.data()).unwrap();
    assert_eq!(
        std::fs::read(dir.join("crop.png")).unwrap(),
        std::fs::read(expect_path).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unproject_writes_image_and_mask() {
    let dir = scratch("unproject");
    write_erp(&dir.join("erp.png"), 64, 2);
    assert_ok(&panolift(
        &dir,
        &[
            "project", "--erp", "erp.png", "--fov", "90", "--size", "32x32", "--out", "crop.png",
        ],
    ));
    assert_ok(&panolift(
        &dir,
        &[
            "unproject", "--pers", "crop.png", "--fov", "90", "--erp-height", "64", "--out",
            "lifted.png", "--mask-out", "mask.png",
        ],
    ));
    let lifted = imgio::read_erp(&dir.join("lifted.png")).unwrap();
    let mask = imgio::read_pixels(&dir.join("mask.png")).unwrap();
    assert_eq!((mask.h, mask.w, mask.c), (64, 128, 1));
    let covered = mask.data.iter().filter(|&&v| v > 0.5).count();
    assert!(covered > 0 && covered < 64 * 128);
    // Outside the mask the lifted image is black.
    for i in 0..64 {
        for j in 0..128 {
            if mask.data[i * 128 + j] < 0.5 {
                for ch in 0..3 {
                    assert_eq!(lifted.get(i, j, ch), 0.0);
                }
            }
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rotate_matrix_and_angles_agree() {
    let dir = scratch("rotate");
    write_erp(&dir.join("erp.png"), 32, 3);
    assert_ok(&panolift(
        &dir,
        &["rotate", "--erp", "erp.png", "--yaw", "33.5", "--out", "a.png"],
    ));
    let m = panolift::rotation_from_ypr(33.5, 0.0, 0.0).rows();
    let flat: Vec<String> = m.iter().flatten().map(|v| format!("{v}")).collect();
    assert_ok(&panolift(
        &dir,
        &["rotate", "--erp", "erp.png", "--matrix", &flat.join(","), "--out", "b.png"],
    ));
    assert_eq!(
        std::fs::read(dir.join("a.png")).unwrap(),
        std::fs::read(dir.join("b.png")).unwrap()
    );
    // Mixing both ways of giving the rotation is a usage error.
    let out = panolift(
        &dir,
        &[
            "rotate", "--erp", "erp.png", "--yaw", "10", "--matrix", "1,0,0,0,1,0,0,0,1",
            "--out", "c.png",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cube_round_trip_reconstructs_the_panorama() {
    let dir = scratch("cube");
    let erp = write_erp(&dir.join("erp.png"), 64, 4);
    assert_ok(&panolift(
        &dir,
        &["cube", "--erp", "erp.png", "--out-dir", "faces"],
    ));
    for name in ["front", "right", "back", "left", "up", "down"] {
        assert!(dir.join("faces").join(format!("{name}.png")).exists());
    }
    assert_ok(&panolift(
        &dir,
        &["cube", "--faces-dir", "faces", "--out", "back.png"],
    ));
    let back = imgio::read_erp(&dir.join("back.png")).unwrap();
    assert_eq!((back.height(), back.width()), (64, 128));
    let err: f64 = back
        .data()
        .iter()
        .zip(erp.data())
        .map(|(&a, &b)| (a as f64 - b as f64).abs())
        .sum::<f64>()
        / back.data().len() as f64;
    assert!(err < 0.05, "round-trip mae {err}");
    // Needs one full direction of flags.
    let out = panolift(&dir, &["cube", "--erp", "erp.png"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seam_score_prints_the_injected_step() {
    let dir = scratch("seam");
    // Left half 0.4, right half 0.6: quantizes exactly to 102 and 153, so
    // the wrap step stays exactly 51/255 and DS lands on 20.
    let h = 32usize;
    let img = ErpImage::from_fn(h, 1, |_, j, _| if j < h { 0.4 } else { 0.6 }).unwrap();
    imgio::write_pixels(&dir.join("step.png"), h, 2 * h, 1, img.data()).unwrap();
    let out = panolift(&dir, &["seam-score", "--erp", "step.png"]);
    assert_ok(&out);
    let ds: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((ds - 20.0).abs() < 0.01, "ds {ds}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn encode_decode_cle_round_trip() {
    let dir = scratch("codec");
    write_erp(&dir.join("erp.png"), 64, 5);
    assert_ok(&panolift(
        &dir,
        &["encode", "--image", "erp.png", "--mode", "cle", "--out", "lat.pten"],
    ));
    let lat = panolift::io::RawTensorFile::read(dir.join("lat.pten")).unwrap();
    assert_eq!(lat.dims, vec![8, 16, 4]);
    assert_ok(&panolift(
        &dir,
        &["decode", "--latent", "lat.pten", "--mode", "cle", "--out", "rec.png"],
    ));
    let rec = imgio::read_erp(&dir.join("rec.png")).unwrap();
    assert_eq!((rec.height(), rec.width()), (64, 128));
    // --wprime outside CLE is refused before any file is touched.
    let out = panolift(
        &dir,
        &["encode", "--image", "erp.png", "--mode", "zero", "--wprime", "16", "--out", "x.pten"],
    );
    assert_eq!(out.status.code(), Some(1));
    let out = panolift(
        &dir,
        &["encode", "--image", "erp.png", "--mode", "cle", "--wprime", "12", "--out", "x.pten"],
    );
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decode_rejects_non_latent_tensors() {
    let dir = scratch("badlat");
    panolift::io::RawTensorFile::new(vec![4, 4, 3], vec![0.0; 48])
        .unwrap()
        .write(dir.join("bad.pten"))
        .unwrap();
    let out = panolift(
        &dir,
        &["decode", "--latent", "bad.pten", "--mode", "zero", "--out", "o.png"],
    );
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_traj_and_pool_mixing() {
    let dir = scratch("traj");
    assert_ok(&panolift(
        &dir,
        &["simulate-traj", "--frames", "4", "--seed", "9", "--out", "sim.json"],
    ));
    let traj = load_trajectory(dir.join("sim.json")).unwrap();
    assert_eq!(traj.len(), 4);
    let text = std::fs::read_to_string(dir.join("sim.json")).unwrap();
    assert!(text.contains("\"simulated\""));

    // A pool with one entry and --real-prob 1 must reproduce that entry's
    // poses. Bare pose arrays load as real trajectories, so strip the tag.
    std::fs::create_dir_all(dir.join("pool")).unwrap();
    let sim: serde_json::Value = serde_json::from_str(&text).unwrap();
    std::fs::write(
        dir.join("pool/a.json"),
        serde_json::to_string(&sim["frames"]).unwrap(),
    )
    .unwrap();
    assert_ok(&panolift(
        &dir,
        &[
            "simulate-traj", "--frames", "4", "--seed", "1", "--real-pool", "pool",
            "--real-prob", "1.0", "--out", "mixed.json",
        ],
    ));
    let mixed = load_trajectory(dir.join("mixed.json")).unwrap();
    assert!(std::fs::read_to_string(dir.join("mixed.json"))
        .unwrap()
        .contains("\"real\""));
    for (a, b) in mixed.frames().iter().zip(traj.frames()) {
        assert_eq!(a.yaw_deg(), b.yaw_deg());
        assert_eq!(a.fov_deg(), b.fov_deg());
    }
    // --real-prob without a pool is a usage error.
    let out = panolift(
        &dir,
        &["simulate-traj", "--real-prob", "0.5", "--out", "x.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn crop_and_mask_psnr_pipeline() {
    let dir = scratch("pipeline");
    std::fs::create_dir_all(dir.join("clip")).unwrap();
    for k in 0..3u64 {
        write_erp(&dir.join(format!("clip/frame_{k:04}.png")), 64, 10 + k);
    }
    assert_ok(&panolift(
        &dir,
        &["simulate-traj", "--frames", "3", "--seed", "2", "--out", "t.json"],
    ));
    assert_ok(&panolift(
        &dir,
        &["crop", "--frames-dir", "clip", "--traj", "t.json", "--size", "40x24", "--out-dir", "crops"],
    ));
    let crop0 = imgio::read_pixels(&dir.join("crops/frame_0000.png")).unwrap();
    assert_eq!((crop0.h, crop0.w, crop0.c), (24, 40, 3));
    assert!(dir.join("crops/frame_0002.png").exists());

    let out = panolift(
        &dir,
        &[
            "mask-psnr", "--gt-dir", "clip", "--gen-dir", "clip", "--traj", "t.json",
            "--size", "40x24",
        ],
    );
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"value\": \"inf\""), "stdout: {text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn canonicalize_identity_is_a_byte_copy() {
    let dir = scratch("canon");
    std::fs::create_dir_all(dir.join("clip")).unwrap();
    for k in 0..2u64 {
        write_erp(&dir.join(format!("clip/frame_{k:04}.png")), 32, 20 + k);
    }
    std::fs::write(
        dir.join("poses.json"),
        r#"{"poses": [[1,0,0,0,1,0,0,0,1],[1,0,0,0,1,0,0,0,1]], "gravity": [[0,-1,0]]}"#,
    )
    .unwrap();
    let out = panolift(
        &dir,
        &[
            "canonicalize", "--frames-dir", "clip", "--poses", "poses.json", "--out-dir", "canon",
        ],
    );
    assert_ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"gravity\""));
    for k in 0..2 {
        let name = format!("frame_{k:04}.png");
        assert_eq!(
            std::fs::read(dir.join("clip").join(&name)).unwrap(),
            std::fs::read(dir.join("canon").join(&name)).unwrap(),
            "{name}"
        );
    }
    // Pose count must match the clip length.
    std::fs::write(dir.join("short.json"), r#"{"poses": [[1,0,0,0,1,0,0,0,1]]}"#).unwrap();
    let out = panolift(
        &dir,
        &[
            "canonicalize", "--frames-dir", "clip", "--poses", "short.json", "--out-dir", "x",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn calibrate_emits_result_json() {
    let dir = scratch("calib");
    write_erp(&dir.join("erp.png"), 128, 30);
    assert_ok(&panolift(
        &dir,
        &[
            "project", "--erp", "erp.png", "--fov", "65", "--pitch", "10", "--roll", "-5",
            "--size", "96x96", "--out", "crop.png",
        ],
    ));
    assert_ok(&panolift(
        &dir,
        &[
            "calibrate", "--pers", "crop.png", "--erp", "erp.png", "--json", "result.json",
        ],
    ));
    let text = std::fs::read_to_string(dir.join("result.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["fov_deg"].as_f64().unwrap() - 65.0).abs() <= 1.0, "{v}");
    assert!((v["pitch_deg"].as_f64().unwrap() - 10.0).abs() <= 1.0, "{v}");
    assert!((v["roll_deg"].as_f64().unwrap() + 5.0).abs() <= 0.5, "{v}");
    assert!(v["evaluations"].as_u64().unwrap() > 0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn equivariance_reports_zero_only_for_cle() {
    let dir = scratch("equiv");
    write_erp(&dir.join("erp.png"), 64, 6);
    let with_cle = panolift(&dir, &["equivariance", "--erp", "erp.png", "--cle"]);
    assert_ok(&with_cle);
    let e_cle: f64 = String::from_utf8_lossy(&with_cle.stdout).trim().parse().unwrap();
    let without = panolift(&dir, &["equivariance", "--erp", "erp.png"]);
    assert_ok(&without);
    let e_zero: f64 = String::from_utf8_lossy(&without.stdout).trim().parse().unwrap();
    assert!(e_cle <= 1e-6, "cle {e_cle}");
    assert!(e_zero > 10.0 * e_cle.max(1e-12), "zero {e_zero}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn data_errors_exit_two_usage_errors_exit_one() {
    let dir = scratch("errors");
    // Missing file.
    let out = panolift(&dir, &["seam-score", "--erp", "absent.png"]);
    assert_eq!(out.status.code(), Some(2));
    // Corrupt PNG.
    std::fs::write(dir.join("junk.png"), b"not a png at all").unwrap();
    let out = panolift(&dir, &["seam-score", "--erp", "junk.png"]);
    assert_eq!(out.status.code(), Some(2));
    // 16-bit PNG is declared unsupported.
    let deep = image::DynamicImage::ImageLuma16(
        image::ImageBuffer::from_pixel(8, 4, image::Luma([1000u16])),
    );
    deep.save(dir.join("deep.png")).unwrap();
    let out = panolift(&dir, &["seam-score", "--erp", "deep.png"]);
    assert_eq!(out.status.code(), Some(2));
    // Unsupported extension.
    std::fs::write(dir.join("erp.bmp"), b"whatever").unwrap();
    let out = panolift(&dir, &["seam-score", "--erp", "erp.bmp"]);
    assert_eq!(out.status.code(), Some(2));
    // Bad flag value: fov outside (0, 180).
    write_erp(&dir.join("erp.png"), 32, 1);
    let out = panolift(
        &dir,
        &["project", "--erp", "erp.png", "--fov", "200", "--size", "16x16", "--out", "o.png"],
    );
    assert_eq!(out.status.code(), Some(1));
    // Unknown subcommand.
    let out = panolift(&dir, &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

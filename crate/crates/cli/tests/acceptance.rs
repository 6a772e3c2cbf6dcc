//! Acceptance check for the command-line tool: rerunning every subcommand
//! with the same inputs and seeds must reproduce every output file and every
//! line of stdout byte for byte, and the generated codec weights must match
//! their frozen digest.
//!
//! Run with `--nocapture` to see the verdict line.

use panolift::synth::sinusoid_erp;
use panolift::{CodecWeights, ImagePixels};
use panolift_cli::imgio;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

const WEIGHTS_DIGEST: &str = "d53980d480168254aaaa831173a685d931185e92d73166d699ec9c68d34ad7ab";

fn report(id: &str, ok: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id} {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{id}: {detail}");
}

/// Run one subcommand in `root`, require exit 0, return its stdout.
fn run(root: &Path, args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_panolift"))
        .current_dir(root)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "`panolift {}` exited {:?}: {}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is utf-8")
}

fn write_fixtures(root: &Path) {
    let erp = sinusoid_erp(64, 3, 77);
    imgio::write_pixels(&root.join("erp.png"), 64, 128, 3, erp.data()).unwrap();
    let big = sinusoid_erp(128, 3, 78);
    imgio::write_pixels(&root.join("big.png"), 128, 256, 3, big.data()).unwrap();
    std::fs::create_dir_all(root.join("clip")).unwrap();
    std::fs::create_dir_all(root.join("clip2")).unwrap();
    for k in 0..3u64 {
        let f = sinusoid_erp(64, 3, 100 + k);
        imgio::write_pixels(
            &root.join(format!("clip/frame_{k:04}.png")),
            64,
            128,
            3,
            f.data(),
        )
        .unwrap();
        let g = sinusoid_erp(64, 3, 200 + k);
        imgio::write_pixels(
            &root.join(format!("clip2/frame_{k:04}.png")),
            64,
            128,
            3,
            g.data(),
        )
        .unwrap();
    }
    std::fs::write(
        root.join("poses.json"),
        r#"{"poses": [[1,0,0,0,1,0,0,0,1],
                      [[0.9998476951563913,0,0.01745240643728351],[0,1,0],[-0.01745240643728351,0,0.9998476951563913]],
                      [[0.9993908270190958,0,0.03489949670250097],[0,1,0],[-0.03489949670250097,0,0.9993908270190958]]],
            "gravity": [[0.02,-0.999,0.01]]}"#,
    )
    .unwrap();
    std::fs::create_dir_all(root.join("pool")).unwrap();
    std::fs::write(
        root.join("pool/walk.json"),
        r#"[{"fov_deg":70,"yaw_deg":0,"pitch_deg":5,"roll_deg":0},
            {"fov_deg":70,"yaw_deg":4,"pitch_deg":4,"roll_deg":1},
            {"fov_deg":70,"yaw_deg":8,"pitch_deg":3,"roll_deg":2}]"#,
    )
    .unwrap();
}

/// Every subcommand once, chained so later steps consume earlier outputs.
/// Returns the stdout transcript.
fn run_all(root: &Path) -> Vec<(String, String)> {
    let steps: Vec<Vec<&str>> = vec![
        vec![
            "project", "--erp", "big.png", "--fov", "65", "--yaw", "20", "--pitch", "8",
            "--roll", "-3", "--size", "64x64", "--out", "crop.png",
        ],
        vec![
            "unproject", "--pers", "crop.png", "--fov", "65", "--yaw", "20", "--pitch", "8",
            "--roll", "-3", "--erp-height", "128", "--out", "lifted.png", "--mask-out", "mask.png",
        ],
        vec!["rotate", "--erp", "erp.png", "--yaw", "30", "--pitch", "-12", "--out", "rot.png"],
        vec![
            "rotate", "--erp", "erp.png", "--matrix", "0,0,1,0,1,0,-1,0,0", "--out", "rotm.png",
        ],
        vec!["cube", "--erp", "erp.png", "--out-dir", "faces"],
        vec!["cube", "--faces-dir", "faces", "--out", "fromcube.png"],
        vec![
            "canonicalize", "--frames-dir", "clip", "--poses", "poses.json", "--out-dir", "canon",
        ],
        vec![
            "calibrate", "--pers", "crop.png", "--erp", "big.png", "--json", "calib.json",
        ],
        vec!["seam-score", "--erp", "erp.png"],
        vec!["encode", "--image", "crop.png", "--mode", "zero", "--out", "lat_zero.pten"],
        vec!["encode", "--image", "erp.png", "--mode", "circular", "--out", "lat_circ.pten"],
        vec![
            "encode", "--image", "erp.png", "--mode", "cle", "--wprime", "16", "--out",
            "lat_cle.pten",
        ],
        vec!["decode", "--latent", "lat_zero.pten", "--mode", "zero", "--out", "dec_zero.png"],
        vec![
            "decode", "--latent", "lat_circ.pten", "--mode", "circular", "--out", "dec_circ.png",
        ],
        vec![
            "decode", "--latent", "lat_cle.pten", "--mode", "cle", "--wprime", "16", "--out",
            "dec_cle.png",
        ],
        vec!["simulate-traj", "--frames", "3", "--seed", "11", "--out", "traj.json"],
        vec![
            "simulate-traj", "--frames", "3", "--seed", "12", "--real-pool", "pool",
            "--real-prob", "0.5", "--out", "mixed.json",
        ],
        vec![
            "crop", "--frames-dir", "clip", "--traj", "traj.json", "--size", "48x32",
            "--out-dir", "crops",
        ],
        vec![
            "mask-psnr", "--gt-dir", "clip", "--gen-dir", "clip2", "--traj", "traj.json",
            "--size", "48x32", "--json", "psnr.json",
        ],
        vec!["equivariance", "--erp", "erp.png"],
        vec!["equivariance", "--erp", "erp.png", "--cle"],
    ];
    steps
        .into_iter()
        .map(|args| (args.join(" "), run(root, &args)))
        .collect()
}

fn collect_tree(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_tree(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            out.insert(rel, std::fs::read(&path).unwrap());
        }
    }
}

#[test]
fn c10_cli_determinism_and_frozen_weights() {
    let digest = CodecWeights::generate().digest_hex();
    let base = std::env::temp_dir().join(format!("panolift-c10-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let mut trees: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
    let mut transcripts: Vec<Vec<(String, String)>> = Vec::new();
    let mut n_cmds = 0;
    for run_idx in 0..2 {
        let root: PathBuf = base.join(format!("run{run_idx}"));
        std::fs::create_dir_all(&root).unwrap();
        write_fixtures(&root);
        let transcript = run_all(&root);
        n_cmds = transcript.len();
        transcripts.push(transcript);
        let mut tree = BTreeMap::new();
        collect_tree(&root, &root, &mut tree);
        trees.push(tree);
    }

    let mut mismatch = String::new();
    for ((cmd_a, out_a), (_, out_b)) in transcripts[0].iter().zip(&transcripts[1]) {
        if out_a != out_b {
            mismatch = format!("stdout differs for `{cmd_a}`");
            break;
        }
    }
    if mismatch.is_empty() {
        let (a, b) = (&trees[0], &trees[1]);
        if a.keys().ne(b.keys()) {
            mismatch = "runs produced different file sets".into();
        } else if let Some(name) = a.keys().find(|k| a[*k] != b[*k]) {
            mismatch = format!("file {name} differs between runs");
        }
    }
    if mismatch.is_empty() && digest != WEIGHTS_DIGEST {
        mismatch = format!("weights digest {digest}");
    }
    let n_files = trees[0].len();
    report(
        "C10",
        mismatch.is_empty(),
        &if mismatch.is_empty() {
            format!(
                "{n_cmds} commands reproduced {n_files} files and all stdout byte-for-byte; \
                 weights digest {}…",
                &digest[..16]
            )
        } else {
            mismatch
        },
    );
    std::fs::remove_dir_all(&base).ok();
}

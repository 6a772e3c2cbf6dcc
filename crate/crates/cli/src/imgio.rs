//! Image and frame-sequence file handling for the CLI.
//!
//! Two interchange formats, routed by extension: `.png` for 8-bit viewing
//! copies (values divided by 255 on read; clamped to `[0, 1]` and rounded
//! half-to-even on write) and `.pten` raw tensors for lossless floats.
//! Video clips are directories of `frame_0000.png`-style files.

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder};
use panolift::io::{atomic_write_bytes, RawTensorFile};
use panolift::{Error, ErpImage, PerspImage, Result};
use std::path::Path;

/// A decoded image of any shape: rows × cols × channels, values nominally in
/// `[0, 1]` for PNG sources and unrestricted for tensors.
pub struct Pixels {
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub data: Vec<f32>,
}

enum Format {
    Png,
    Tensor,
}

fn format_of(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("png") => Ok(Format::Png),
        Some(e) if e.eq_ignore_ascii_case("pten") => Ok(Format::Tensor),
        _ => Err(Error::format(
            Some(path),
            "unsupported extension (expected .png or .pten)",
        )),
    }
}

pub fn read_pixels(path: &Path) -> Result<Pixels> {
    match format_of(path)? {
        Format::Png => read_png(path),
        Format::Tensor => {
            let t = RawTensorFile::read(path)?;
            let (h, w, c) = match t.dims.as_slice() {
                [h, w] => (*h, *w, 1),
                [h, w, c] => (*h, *w, *c),
                dims => {
                    return Err(Error::format(
                        Some(path),
                        format!("expected a rank-2 or rank-3 image tensor, got dims {dims:?}"),
                    ))
                }
            };
            Ok(Pixels {
                h,
                w,
                c,
                data: t.data,
            })
        }
    }
}

fn read_png(path: &Path) -> Result<Pixels> {
    let img = image::ImageReader::open(path)?
        .decode()
        .map_err(|e| Error::format(Some(path), format!("png decode: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (c, bytes) = match img {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => {
            return Err(Error::format(
                Some(path),
                "16-bit PNG is not supported (use a .pten tensor for high precision)",
            ))
        }
        other => {
            return Err(Error::format(
                Some(path),
                format!(
                    "unsupported PNG layout {:?} (expected 8-bit grayscale or RGB)",
                    other.color()
                ),
            ))
        }
    };
    let data = bytes.iter().map(|&b| b as f32 / 255.0).collect();
    Ok(Pixels { h, w, c, data })
}

pub fn write_pixels(path: &Path, h: usize, w: usize, c: usize, data: &[f32]) -> Result<()> {
    match format_of(path)? {
        Format::Png => write_png(path, h, w, c, data),
        Format::Tensor => RawTensorFile::new(vec![h, w, c], data.to_vec())?.write(path),
    }
}

fn write_png(path: &Path, h: usize, w: usize, c: usize, data: &[f32]) -> Result<()> {
    let color = match c {
        1 => ExtendedColorType::L8,
        3 => ExtendedColorType::Rgb8,
        _ => {
            return Err(Error::invalid(format!(
                "PNG output supports 1 or 3 channels, got {c}"
            )))
        }
    };
    let bytes: Vec<u8> = data
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round_ties_even() as u8)
        .collect();
    let mut buf = Vec::new();
    PngEncoder::new(&mut buf)
        .write_image(&bytes, w as u32, h as u32, color)
        .map_err(|e| Error::format(Some(path), format!("png encode: {e}")))?;
    atomic_write_bytes(path, &buf)
}

pub fn read_erp(path: &Path) -> Result<ErpImage> {
    let p = read_pixels(path)?;
    ErpImage::new(p.h, p.w, p.c, p.data)
        .map_err(|e| Error::format(Some(path), format!("not a valid ERP panorama: {e}")))
}

pub fn read_pers(path: &Path) -> Result<PerspImage> {
    let p = read_pixels(path)?;
    PerspImage::new(p.h, p.w, p.c, p.data)
        .map_err(|e| Error::format(Some(path), format!("not a valid perspective image: {e}")))
}

fn frame_path(dir: &Path, k: usize, ext: &str) -> std::path::PathBuf {
    dir.join(format!("frame_{k:04}.{ext}"))
}

/// Read `frame_0000.png`, `frame_0001.png`, … (or `.pten`, detected from
/// frame 0) until the numbering stops.
pub fn read_frames(dir: &Path) -> Result<Vec<Pixels>> {
    let ext = if frame_path(dir, 0, "png").exists() {
        "png"
    } else if frame_path(dir, 0, "pten").exists() {
        "pten"
    } else {
        return Err(Error::format(
            Some(dir),
            "no frame_0000.png (or .pten) in directory",
        ));
    };
    let mut frames = Vec::new();
    loop {
        let path = frame_path(dir, frames.len(), ext);
        if !path.exists() {
            break;
        }
        frames.push(read_pixels(&path)?);
    }
    Ok(frames)
}

pub fn read_erp_frames(dir: &Path) -> Result<Vec<ErpImage>> {
    read_frames(dir)?
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            ErpImage::new(p.h, p.w, p.c, p.data)
                .map_err(|e| Error::format(Some(dir), format!("frame {k}: not a valid ERP: {e}")))
        })
        .collect()
}

/// Write a frame sequence as PNGs into `dir` (created if needed).
pub fn write_frames<'a, I>(dir: &Path, frames: I) -> Result<()>
where
    I: IntoIterator<Item = (usize, usize, usize, &'a [f32])>,
{
    std::fs::create_dir_all(dir)?;
    for (k, (h, w, c, data)) in frames.into_iter().enumerate() {
        write_png(&frame_path(dir, k, "png"), h, w, c, data)?;
    }
    Ok(())
}

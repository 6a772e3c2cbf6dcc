//! Directions, rotations, cameras, and the ERP pixel ↔ sphere conventions.
//!
//! These conventions are normative for the whole toolkit:
//!
//! * World frame: right-handed, `+X` right, `+Y` up, `+Z` forward.
//! * ERP grid: `W = 2H`; row `i` runs top→bottom, column `j` left→right.
//!   Pixel centers map to angles as `λ = 2π(j+0.5)/W − π` (longitude) and
//!   `φ = π/2 − π(i+0.5)/H` (latitude), so the image center looks along
//!   `+Z`, the top edge is the `+Y` pole and the left edge is `λ = −π`.
//! * Direction from angles: `d = (cos φ sin λ, sin φ, cos φ cos λ)`.
//! * Camera-to-world rotation `R = R_y(yaw) · R_x(pitch) · R_z(roll)`,
//!   angles in degrees end to end. `R_y(90°)` maps the camera forward axis
//!   `(0,0,1)` to world `(1,0,0)`; positive pitch looks up; positive roll
//!   rotates image content counter-clockwise.
//! * Pinhole camera: horizontal field of view `fov`, focal
//!   `f = (w/2) / tan(fov/2)`; pixel `(row v, col u)` has camera-frame ray
//!   `normalize((u+0.5−w/2, −(v+0.5−h/2), f))`.
//!
//! Trigonometry of angles that are exact multiples of 90° is evaluated
//! exactly (`sin 180° = 0`, not `1.2e−16`), which is what makes quarter- and
//! half-turn rotations exact column permutations downstream.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90°.
pub(crate) fn sincos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else if r == 180.0 {
        (0.0, -1.0)
    } else if r == 270.0 {
        (-1.0, 0.0)
    } else {
        let rad = deg.to_radians();
        (rad.sin(), rad.cos())
    }
}

/// Wrap an angle in degrees into `(−180, 180]`.
pub(crate) fn wrap_deg(x: f64) -> f64 {
    let y = (x + 180.0).rem_euclid(360.0) - 180.0;
    if y == -180.0 {
        180.0
    } else {
        y
    }
}

/// Unit direction in the world frame (norm 1 within 1e−6 by construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    /// Build from components that must already be unit length (1e−6).
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "UnitVec3 components have norm {n}, expected 1"
            )));
        }
        Ok(UnitVec3 { x, y, z })
    }

    /// Normalize arbitrary components; the zero vector is rejected.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-12 {
            return Err(Error::invalid("cannot normalize a zero-length vector"));
        }
        Ok(UnitVec3 {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        UnitVec3 { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, o: &UnitVec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &UnitVec3) -> (f64, f64, f64) {
        (
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Angle to another unit vector in radians, stable over the full range.
    pub fn angle_to(&self, o: &UnitVec3) -> f64 {
        let (cx, cy, cz) = self.cross(o);
        let s = (cx * cx + cy * cy + cz * cz).sqrt();
        s.atan2(self.dot(o))
    }

    /// World "down", the gravity reference direction.
    pub fn down() -> Self {
        UnitVec3 {
            x: 0.0,
            y: -1.0,
            z: 0.0,
        }
    }
}

/// Proper rotation matrix (row-major 3×3, orthonormal, det +1 within 1e−6).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3 {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Validate and wrap a row-major matrix: `RᵀR = I` and `det R = 1`,
    /// both within 1e−6 per entry.
    pub fn from_rows(m: [[f64; 3]; 3]) -> Result<Self> {
        for r in 0..3 {
            for c in 0..3 {
                let mut dot = 0.0;
                for k in 0..3 {
                    dot += m[k][r] * m[k][c];
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-6 {
                    return Err(Error::invalid(format!(
                        "matrix is not orthonormal: column dot ({r},{c}) = {dot}"
                    )));
                }
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "matrix determinant is {det}, expected +1 (improper or scaled)"
            )));
        }
        Ok(Rotation3 { m })
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        Rotation3 {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Rotation3) -> Self {
        let a = &self.m;
        let b = &other.m;
        let mut out = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
            }
        }
        Rotation3 { m: out }
    }

    pub fn apply(&self, x: f64, y: f64, z: f64) -> (f64, f64, f64) {
        let m = &self.m;
        (
            m[0][0] * x + m[0][1] * y + m[0][2] * z,
            m[1][0] * x + m[1][1] * y + m[1][2] * z,
            m[2][0] * x + m[2][1] * y + m[2][2] * z,
        )
    }

    pub fn apply_unit(&self, v: &UnitVec3) -> UnitVec3 {
        let (x, y, z) = self.apply(v.x(), v.y(), v.z());
        UnitVec3::new_unchecked(x, y, z)
    }
}

/// Rotation about `+Y`; `roty(90°)` maps `(0,0,1)` to `(1,0,0)`.
pub(crate) fn roty(deg: f64) -> Rotation3 {
    let (s, c) = sincos_deg(deg);
    Rotation3 {
        m: [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
    }
}

/// Pitch rotation about `+X`; positive angles tilt the view up.
pub(crate) fn rotx(deg: f64) -> Rotation3 {
    let (s, c) = sincos_deg(deg);
    Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]],
    }
}

/// Roll rotation about `+Z`; positive angles turn image content
/// counter-clockwise on screen.
pub(crate) fn rotz(deg: f64) -> Rotation3 {
    let (s, c) = sincos_deg(deg);
    Rotation3 {
        m: [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]],
    }
}

/// Camera-to-world rotation `R_y(yaw) · R_x(pitch) · R_z(roll)`, degrees.
pub fn rotation_from_ypr(yaw_deg: f64, pitch_deg: f64, roll_deg: f64) -> Rotation3 {
    roty(yaw_deg).compose(&rotx(pitch_deg).compose(&rotz(roll_deg)))
}

/// The pitch·roll part of the camera rotation. Projection code applies yaw
/// separately as an exact ERP column offset, which is what keeps quarter-
/// and half-turn yaws bit-exact.
pub(crate) fn pitch_roll_matrix(pitch_deg: f64, roll_deg: f64) -> Rotation3 {
    rotx(pitch_deg).compose(&rotz(roll_deg))
}

/// Pinhole camera pose and intrinsics, angles in degrees.
///
/// Invariants: `0 < fov < 180`, `pitch ∈ [−90, 90]`, yaw and roll stored
/// wrapped into `(−180, 180]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CameraParams {
    fov_deg: f64,
    yaw_deg: f64,
    pitch_deg: f64,
    roll_deg: f64,
}

impl CameraParams {
    pub fn new(fov_deg: f64, yaw_deg: f64, pitch_deg: f64, roll_deg: f64) -> Result<Self> {
        if !fov_deg.is_finite() || fov_deg <= 0.0 || fov_deg >= 180.0 {
            return Err(Error::invalid(format!(
                "fov must lie in (0, 180) degrees, got {fov_deg}"
            )));
        }
        if !pitch_deg.is_finite() || !(-90.0..=90.0).contains(&pitch_deg) {
            return Err(Error::invalid(format!(
                "pitch must lie in [-90, 90] degrees, got {pitch_deg}"
            )));
        }
        if !yaw_deg.is_finite() || !roll_deg.is_finite() {
            return Err(Error::invalid("yaw and roll must be finite"));
        }
        Ok(CameraParams {
            fov_deg,
            yaw_deg: wrap_deg(yaw_deg),
            pitch_deg,
            roll_deg: wrap_deg(roll_deg),
        })
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }
    pub fn yaw_deg(&self) -> f64 {
        self.yaw_deg
    }
    pub fn pitch_deg(&self) -> f64 {
        self.pitch_deg
    }
    pub fn roll_deg(&self) -> f64 {
        self.roll_deg
    }

    /// Camera-to-world rotation for this pose.
    pub fn rotation(&self) -> Rotation3 {
        rotation_from_ypr(self.yaw_deg, self.pitch_deg, self.roll_deg)
    }

    /// Focal length in pixels for an image of width `w`.
    pub fn focal_px(&self, w: usize) -> f64 {
        (w as f64 / 2.0) / (self.fov_deg.to_radians() / 2.0).tan()
    }
}

/// Map continuous ERP pixel coordinates to a unit world direction.
///
/// `i` is clamped to `[−0.5, H−0.5]` (vertical clamp at the poles); `j` may
/// be any real and wraps modulo `W`.
pub fn erp_dir(i: f64, j: f64, h: usize, w: usize) -> Result<UnitVec3> {
    if h == 0 || w == 0 {
        return Err(Error::invalid("ERP dimensions must be positive"));
    }
    let hf = h as f64;
    let wf = w as f64;
    let i = i.clamp(-0.5, hf - 0.5);
    let jw = (j + 0.5).rem_euclid(wf) - 0.5;
    let lambda = TAU * ((jw + 0.5) / wf) - PI;
    let phi = PI / 2.0 - PI * ((i + 0.5) / hf);
    let (sl, cl) = (lambda.sin(), lambda.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    Ok(UnitVec3::new_unchecked(cp * sl, sp, cp * cl))
}

/// Map a world direction to continuous ERP pixel coordinates `(i, j)`.
///
/// The input need not be exactly unit length (it is normalized first); the
/// zero vector is rejected. Output satisfies `i ∈ [−0.5, H−0.5]` and
/// `j ∈ [−0.5, W−0.5)`.
pub fn dir_to_erp(x: f64, y: f64, z: f64, h: usize, w: usize) -> Result<(f64, f64)> {
    if h == 0 || w == 0 {
        return Err(Error::invalid("ERP dimensions must be positive"));
    }
    let n = (x * x + y * y + z * z).sqrt();
    if n < 1e-12 {
        return Err(Error::invalid(
            "cannot map a zero-length direction to ERP coordinates",
        ));
    }
    let lambda = x.atan2(z);
    let phi = (y / n).clamp(-1.0, 1.0).asin();
    let hf = h as f64;
    let wf = w as f64;
    let i = (0.5 - phi / PI) * hf - 0.5;
    let j = (lambda / TAU + 0.5) * wf - 0.5;
    let j = (j + 0.5).rem_euclid(wf) - 0.5;
    Ok((i.clamp(-0.5, hf - 0.5), j))
}

/// Minimal-angle rotation with `R·a = b`.
///
/// Uses the atan2 form of Rodrigues' formula, which stays well conditioned
/// down to nearly antiparallel inputs. Exactly (or almost exactly)
/// antiparallel pairs fall back to a half-turn about a deterministic axis:
/// `normalize((0,0,1) × a)`, or `(1,0,0)` when that cross product vanishes.
/// `a == b` returns the exact identity.
pub fn minimal_rotation_between(a: &UnitVec3, b: &UnitVec3) -> Rotation3 {
    let (vx, vy, vz) = a.cross(b);
    let s = (vx * vx + vy * vy + vz * vz).sqrt();
    let c = a.dot(b);
    if s > 1e-9 {
        let (kx, ky, kz) = (vx / s, vy / s, vz / s);
        let theta = s.atan2(c);
        return axis_angle(kx, ky, kz, theta);
    }
    if c > 0.0 {
        return Rotation3::identity();
    }
    // Antiparallel: half turn about an axis perpendicular to `a`.
    let (ax, ay, az) = {
        let (cx, cy, cz) = (-a.y(), a.x(), 0.0); // (0,0,1) × a
        let n = (cx * cx + cy * cy + cz * cz).sqrt();
        if n < 1e-6 {
            (1.0, 0.0, 0.0)
        } else {
            (cx / n, cy / n, cz / n)
        }
    };
    Rotation3 {
        m: [
            [
                2.0 * ax * ax - 1.0,
                2.0 * ax * ay,
                2.0 * ax * az,
            ],
            [
                2.0 * ay * ax,
                2.0 * ay * ay - 1.0,
                2.0 * ay * az,
            ],
            [
                2.0 * az * ax,
                2.0 * az * ay,
                2.0 * az * az - 1.0,
            ],
        ],
    }
}

fn axis_angle(kx: f64, ky: f64, kz: f64, theta: f64) -> Rotation3 {
    let (s, c) = (theta.sin(), theta.cos());
    let v = 1.0 - c;
    Rotation3 {
        m: [
            [
                c + kx * kx * v,
                kx * ky * v - kz * s,
                kx * kz * v + ky * s,
            ],
            [
                ky * kx * v + kz * s,
                c + ky * ky * v,
                ky * kz * v - kx * s,
            ],
            [
                kz * kx * v - ky * s,
                kz * ky * v + kx * s,
                c + kz * kz * v,
            ],
        ],
    }
}

/// Per-axis sampling ranges for camera augmentation, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentationRanges {
    pub fov: (f64, f64),
    pub pitch: (f64, f64),
    pub roll: (f64, f64),
    pub yaw: (f64, f64),
}

impl Default for AugmentationRanges {
    fn default() -> Self {
        AugmentationRanges {
            fov: (30.0, 120.0),
            pitch: (-60.0, 60.0),
            roll: (-15.0, 15.0),
            yaw: (-180.0, 180.0),
        }
    }
}

impl AugmentationRanges {
    pub fn validate(&self) -> Result<()> {
        let ordered = |name: &str, (lo, hi): (f64, f64)| -> Result<()> {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::invalid(format!(
                    "{name} range [{lo}, {hi}] is not a valid interval"
                )));
            }
            Ok(())
        };
        ordered("fov", self.fov)?;
        ordered("pitch", self.pitch)?;
        ordered("roll", self.roll)?;
        ordered("yaw", self.yaw)?;
        if self.fov.0 <= 0.0 || self.fov.1 >= 180.0 {
            return Err(Error::invalid(format!(
                "fov range [{}, {}] must stay inside (0, 180)",
                self.fov.0, self.fov.1
            )));
        }
        if self.pitch.0 < -90.0 || self.pitch.1 > 90.0 {
            return Err(Error::invalid(format!(
                "pitch range [{}, {}] must stay inside [-90, 90]",
                self.pitch.0, self.pitch.1
            )));
        }
        Ok(())
    }
}

/// Draw a camera uniformly from `ranges`.
///
/// Draw order is fixed — fov, pitch, roll, yaw, one uniform each — so
/// streams are reproducible across callers. Degenerate ranges return their
/// endpoint exactly and still consume a draw.
pub fn sample_camera(rng: &mut SplitMix64, ranges: &AugmentationRanges) -> Result<CameraParams> {
    ranges.validate()?;
    let fov = rng.uniform(ranges.fov.0, ranges.fov.1);
    let pitch = rng.uniform(ranges.pitch.0, ranges.pitch.1);
    let roll = rng.uniform(ranges.roll.0, ranges.roll.1);
    let yaw = rng.uniform(ranges.yaw.0, ranges.yaw.1);
    CameraParams::new(fov, yaw, pitch, roll)
}

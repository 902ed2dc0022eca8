//! Minimal fixed-size vector helpers used by the floating-point paths.
//!
//! Points in dimension 2 are padded with a trailing zero so that one storage
//! type serves both ambient dimensions.

/// A point or direction in ambient space, padded to three coordinates.
pub type Vec3 = [f64; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Returns `a / |a|`, or `None` when `|a| == 0`.
pub fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    if n == 0.0 {
        None
    } else {
        Some(scale(1.0 / n, a))
    }
}

/// Pads a 2- or 3-coordinate slice to a `Vec3`.
pub fn pad(x: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    v[..x.len()].copy_from_slice(x);
    v
}

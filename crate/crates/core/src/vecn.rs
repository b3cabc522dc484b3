//! Small fixed-size velocity-vector helpers.
//!
//! Velocities are stored as `[f64; 3]` with components beyond the active
//! dimension `d` kept at zero, so the same arithmetic works for d = 1, 2, 3.

pub type Vec3 = [f64; 3];

pub const ZERO: Vec3 = [0.0; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm2(a: &Vec3) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    norm2(a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// a + s·b
#[inline]
pub fn add_scaled(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Convex/affine combination c1·a + c2·b.
#[inline]
pub fn combine(c1: f64, a: &Vec3, c2: f64, b: &Vec3) -> Vec3 {
    [
        c1 * a[0] + c2 * b[0],
        c1 * a[1] + c2 * b[1],
        c1 * a[2] + c2 * b[2],
    ]
}

/// Embeds the first `d` components, zeroing the rest.
#[inline]
pub fn embed(components: &[f64]) -> Vec3 {
    let mut v = ZERO;
    for (i, &c) in components.iter().take(3).enumerate() {
        v[i] = c;
    }
    v
}

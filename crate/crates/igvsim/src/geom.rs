//! Planar and 3D ray intersection kernels.
//!
//! The LIDAR model casts 2D rays in its scan plane; the camera casts 3D rays
//! against the ground plane and extruded obstacles. Everything here is a pure
//! function, so the kernels are safe to call from any number of threads.
//!
//! Conventions: world frame is ENU-style with +X east, +Y north, z up, and
//! headings measured counter-clockwise from +X in radians.

use std::f64::consts::PI;

/// Rays tangent to a surface within this discriminant tolerance count as
/// misses; the grazing case is numerically unstable either way.
const TANGENT_EPS: f64 = 1e-12;

/// 2D vector / point, meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Rotate counter-clockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn from_angle(angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c, s)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// 3D vector / point, meters, z up.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// Planar pose: position in meters, heading in radians CCW from +X (east).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose { x, y, heading }
    }

    pub fn position(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Unit vector along the heading.
    pub fn forward(self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// 2D ray with unit direction.
#[derive(Clone, Copy, Debug)]
pub struct Ray2 {
    pub origin: Vec2,
    pub dir: Vec2,
}

impl Ray2 {
    /// Build a ray, normalizing `dir`.
    pub fn new(origin: Vec2, dir: Vec2) -> Self {
        Ray2 { origin, dir: dir.normalized() }
    }

    pub fn from_angle(origin: Vec2, angle: f64) -> Self {
        Ray2 { origin, dir: Vec2::from_angle(angle) }
    }

    pub fn at(self, t: f64) -> Vec2 {
        self.origin + self.dir * t
    }
}

/// 3D ray with unit direction.
#[derive(Clone, Copy, Debug)]
pub struct Ray3 {
    pub origin: Vec3,
    pub dir: Vec3,
}

impl Ray3 {
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        Ray3 { origin, dir: dir.normalized() }
    }

    pub fn at(self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// What a ray hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitKind {
    Ground,
    Barrel,
    Box,
}

/// Nearest intersection along a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    /// Distance along the ray, meters, >= 0.
    pub t: f64,
    pub kind: HitKind,
    /// Index into the scene's barrel or box list, when applicable.
    pub index: Option<usize>,
}

/// Distance along `ray` to a circle, or `None` on a miss.
///
/// An origin inside the circle yields the exit distance.
pub fn ray_circle_2d(ray: Ray2, center: Vec2, radius: f64) -> Option<f64> {
    let oc = ray.origin - center;
    let b = 2.0 * ray.dir.dot(oc);
    let c = oc.norm_sq() - radius * radius;
    let disc = b * b - 4.0 * c;
    if disc < TANGENT_EPS {
        return None;
    }
    let sqrt_disc = disc.sqrt();
    let t0 = (-b - sqrt_disc) / 2.0;
    let t1 = (-b + sqrt_disc) / 2.0;
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(t1)
    } else {
        None
    }
}

/// Distance along `ray` to an oriented rectangle boundary (slab test in the
/// box frame). An origin inside the box yields the exit distance.
pub fn ray_box_2d(ray: Ray2, center: Vec2, half_extents: Vec2, yaw: f64) -> Option<f64> {
    // Transform into the box frame: box axis-aligned at the origin.
    let origin = (ray.origin - center).rotated(-yaw);
    let dir = ray.dir.rotated(-yaw);

    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for (o, d, h) in [
        (origin.x, dir.x, half_extents.x),
        (origin.y, dir.y, half_extents.y),
    ] {
        if d.abs() < 1e-15 {
            if o.abs() > h {
                return None;
            }
        } else {
            let (mut lo, mut hi) = ((-h - o) / d, (h - o) / d);
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            t_enter = t_enter.max(lo);
            t_exit = t_exit.min(hi);
        }
    }
    if t_enter > t_exit || t_exit < 0.0 {
        return None;
    }
    Some(if t_enter >= 0.0 { t_enter } else { t_exit })
}

/// Intersection of a 3D ray with the ground plane z = 0, strictly in front of
/// the origin. Rays at or below the plane, or pointing level/up, miss.
pub fn ray_ground(ray: Ray3) -> Option<Vec3> {
    if ray.dir.z >= 0.0 || ray.origin.z <= 0.0 {
        return None;
    }
    let t = -ray.origin.z / ray.dir.z;
    Some(ray.at(t))
}

/// Distance along a 3D ray to a vertical cylinder spanning z in [0, height]:
/// nearest lateral-surface hit within the height band, or the top cap.
pub fn ray_cylinder(ray: Ray3, center: Vec2, radius: f64, height: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t >= 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };

    // Lateral surface: quadratic in the horizontal components.
    let oc = ray.origin.xy() - center;
    let d = ray.dir.xy();
    let a = d.norm_sq();
    if a > 1e-15 {
        let b = 2.0 * d.dot(oc);
        let c = oc.norm_sq() - radius * radius;
        let disc = b * b - 4.0 * a * c;
        if disc >= TANGENT_EPS {
            let sqrt_disc = disc.sqrt();
            for t in [(-b - sqrt_disc) / (2.0 * a), (-b + sqrt_disc) / (2.0 * a)] {
                let z = ray.origin.z + t * ray.dir.z;
                if (0.0..=height).contains(&z) {
                    consider(t);
                }
            }
        }
    }

    // Top cap at z = height.
    if ray.dir.z.abs() > 1e-15 {
        let t = (height - ray.origin.z) / ray.dir.z;
        if t >= 0.0 {
            let p = ray.at(t).xy() - center;
            if p.norm_sq() <= radius * radius {
                consider(t);
            }
        }
    }

    best
}

/// Distance along a 3D ray to an extruded oriented box (footprint rectangle
/// swept over z in [0, height]), slab test in the box frame.
pub fn ray_prism(
    ray: Ray3,
    center: Vec2,
    half_extents: Vec2,
    yaw: f64,
    height: f64,
) -> Option<f64> {
    let o2 = (ray.origin.xy() - center).rotated(-yaw);
    let d2 = ray.dir.xy().rotated(-yaw);

    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for (o, d, lo, hi) in [
        (o2.x, d2.x, -half_extents.x, half_extents.x),
        (o2.y, d2.y, -half_extents.y, half_extents.y),
        (ray.origin.z, ray.dir.z, 0.0, height),
    ] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let (mut a, mut b) = ((lo - o) / d, (hi - o) / d);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t_enter = t_enter.max(a);
            t_exit = t_exit.min(b);
        }
    }
    if t_enter > t_exit || t_exit < 0.0 {
        return None;
    }
    Some(if t_enter >= 0.0 { t_enter } else { t_exit })
}

/// Distance from a point to a segment (capsule caps at the endpoints, not an
/// infinite line).
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from a point to a polyline (minimum over its segments).
///
/// A point lies inside a painted line band of width `w` iff this distance to
/// the band's centerline is at most `w / 2`.
pub fn polyline_distance(p: Vec2, points: &[Vec2]) -> f64 {
    assert!(points.len() >= 2, "polyline needs at least two points");
    points
        .windows(2)
        .map(|seg| point_segment_distance(p, seg[0], seg[1]))
        .fold(f64::INFINITY, f64::min)
}

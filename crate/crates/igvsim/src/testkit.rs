//! Independent reference implementations used as test oracles.
//!
//! Nothing here is called by the simulator. Each function re-derives a
//! quantity by a method unrelated to the production path (ray marching
//! instead of closed-form intersection, RK4 instead of exact arcs, spherical
//! trigonometry instead of the tangent plane) so the two can be compared.

use crate::geom::{Pose, Ray2, Ray3, Vec2};
use crate::scene::Scene;

/// Marching step, meters.
pub const MARCH_STEP: f64 = 1e-3;

/// Whether a 2D point is inside any obstacle footprint tall enough to block
/// a scan plane at `plane_height`.
fn inside_any_2d(p: Vec2, scene: &Scene, plane_height: f64) -> bool {
    scene
        .barrels
        .iter()
        .any(|b| b.height > plane_height && (p - b.center).norm() <= b.radius)
        || scene.boxes.iter().any(|b| {
            if b.height <= plane_height {
                return false;
            }
            let local = (p - b.center).rotated(-b.yaw);
            local.x.abs() <= b.half_extents.x && local.y.abs() <= b.half_extents.y
        })
}

/// 1 mm ray-marching range finder over a scene cross-section: walks the ray
/// until it enters any blocking footprint, up to `max_range`.
pub fn march_scene_2d(ray: Ray2, scene: &Scene, plane_height: f64, max_range: f64) -> Option<f64> {
    let steps = (max_range / MARCH_STEP).ceil() as usize;
    for i in 0..=steps {
        let t = i as f64 * MARCH_STEP;
        if inside_any_2d(ray.at(t), scene, plane_height) {
            return Some(t);
        }
    }
    None
}

/// Whether a 3D point is inside any obstacle volume (barrel cylinder or box
/// prism) or below the ground plane.
fn inside_any_3d(p: crate::geom::Vec3, scene: &Scene) -> bool {
    if p.z <= 0.0 {
        return true;
    }
    scene
        .barrels
        .iter()
        .any(|b| p.z <= b.height && (p.xy() - b.center).norm() <= b.radius)
        || scene.boxes.iter().any(|b| {
            if p.z > b.height {
                return false;
            }
            let local = (p.xy() - b.center).rotated(-b.yaw);
            local.x.abs() <= b.half_extents.x && local.y.abs() <= b.half_extents.y
        })
}

/// What a marched 3D ray ran into.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarchHit3 {
    /// Entered an obstacle volume at this distance.
    Obstacle(f64),
    /// Crossed the ground plane at this distance.
    Ground(f64),
    /// Nothing within the range limit.
    Sky,
}

/// 1 mm ray-marching classifier for camera rays.
pub fn march_scene_3d(ray: Ray3, scene: &Scene, max_range: f64) -> MarchHit3 {
    let steps = (max_range / MARCH_STEP).ceil() as usize;
    for i in 1..=steps {
        let t = i as f64 * MARCH_STEP;
        let p = ray.at(t);
        if p.z <= 0.0 {
            return MarchHit3::Ground(t);
        }
        if inside_any_3d(p, scene) {
            return MarchHit3::Obstacle(t);
        }
    }
    MarchHit3::Sky
}

/// RK4 integration of the unicycle ODE with constant inputs, for checking the
/// closed-form arc solution.
pub fn rk4_unicycle(start: Pose, v: f64, w: f64, duration: f64, dt: f64) -> Pose {
    let deriv = |theta: f64| (v * theta.cos(), v * theta.sin(), w);
    let mut x = start.x;
    let mut y = start.y;
    let mut theta = start.heading;
    let steps = (duration / dt).round() as usize;
    for _ in 0..steps {
        let (k1x, k1y, k1t) = deriv(theta);
        let (k2x, k2y, k2t) = deriv(theta + 0.5 * dt * k1t);
        let (k3x, k3y, k3t) = deriv(theta + 0.5 * dt * k2t);
        let (k4x, k4y, k4t) = deriv(theta + dt * k3t);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        theta += dt / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
    }
    Pose::new(x, y, crate::geom::wrap_angle(theta))
}

/// Destination latitude/longitude after moving `distance` meters along a
/// compass `bearing` (degrees clockwise from north) on a sphere of WGS-84
/// equatorial radius. Independent spherical-trig check of the tangent-plane
/// mapping; the two agree well under 0.1% at course scale.
pub fn spherical_destination(lat_deg: f64, lon_deg: f64, bearing_deg: f64, distance: f64) -> (f64, f64) {
    const R: f64 = 6_378_137.0;
    let lat1 = lat_deg.to_radians();
    let lon1 = lon_deg.to_radians();
    let bearing = bearing_deg.to_radians();
    let angular = distance / R;
    let lat2 = (lat1.sin() * angular.cos() + lat1.cos() * angular.sin() * bearing.cos()).asin();
    let lon2 = lon1
        + (bearing.sin() * angular.sin() * lat1.cos())
            .atan2(angular.cos() - lat1.sin() * lat2.sin());
    (lat2.to_degrees(), lon2.to_degrees())
}

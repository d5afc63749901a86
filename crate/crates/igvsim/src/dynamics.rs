//! Motion model of the skid-steer robot.
//!
//! The drive controller is modeled as a symmetric acceleration-limited ramp:
//! actual forward and angular speeds approach the commanded values at bounded
//! rates, saturating at the platform limits. Pose integration uses the exact
//! unicycle arc solution, so integration error never contaminates tests.
//! Contact with obstacles is resolve-and-slide: the footprint circle is
//! projected out of penetration, with no impulse physics.

use crate::geom::{wrap_angle, Pose, Vec2};
use crate::scene::Scene;

/// Desired speeds as sent to the motor controller.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotorCommand {
    /// Forward speed, m/s, positive forward.
    pub linear_mps: f64,
    /// Angular speed, deg/s, positive counter-clockwise.
    pub angular_degps: f64,
}

impl MotorCommand {
    pub const fn new(linear_mps: f64, angular_degps: f64) -> Self {
        MotorCommand { linear_mps, angular_degps }
    }
}

/// Drive limits and footprint of the platform.
///
/// The chassis vendor does not publish acceleration limits; these defaults
/// are configurable placeholders, not measurements.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveParams {
    /// Max forward speed, m/s.
    pub v_max: f64,
    /// Max angular speed, deg/s.
    pub w_max_degps: f64,
    /// Linear acceleration limit, m/s^2.
    pub a_max: f64,
    /// Angular acceleration limit, deg/s^2.
    pub alpha_max_degps2: f64,
    /// Collision silhouette radius, m.
    pub footprint_radius: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        DriveParams {
            v_max: 1.0,
            w_max_degps: 90.0,
            a_max: 2.0,
            alpha_max_degps2: 180.0,
            footprint_radius: 0.5,
        }
    }
}

/// Full robot state advanced by [`step_world`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub pose: Pose,
    /// Actual forward speed, m/s.
    pub v: f64,
    /// Actual angular speed, rad/s.
    pub w: f64,
    /// Last commanded speeds (held until replaced).
    pub commanded: MotorCommand,
    /// Whether contact resolution moved the robot this tick.
    pub collided: bool,
}

impl RobotState {
    /// At rest at the scene's spawn pose.
    pub fn at_spawn(scene: &Scene) -> Self {
        RobotState {
            pose: scene.spawn,
            v: 0.0,
            w: 0.0,
            commanded: MotorCommand::default(),
            collided: false,
        }
    }
}

fn move_toward(current: f64, target: f64, max_step: f64) -> f64 {
    let delta = target - current;
    if delta.abs() <= max_step {
        target
    } else {
        current + max_step * delta.signum()
    }
}

/// Advance actual speeds one step toward the commanded values.
///
/// The command is first clamped to the platform limits, then each speed moves
/// toward its target by at most the acceleration limit times `dt`, landing
/// exactly on the target when within one step. Returns `(v, w)` with `w` in
/// rad/s.
pub fn apply_motor_response(
    state: &RobotState,
    cmd: &MotorCommand,
    params: &DriveParams,
    dt: f64,
) -> (f64, f64) {
    let target_v = cmd.linear_mps.clamp(-params.v_max, params.v_max);
    let target_w = cmd
        .angular_degps
        .clamp(-params.w_max_degps, params.w_max_degps)
        .to_radians();
    let v = move_toward(state.v, target_v, params.a_max * dt);
    let w = move_toward(state.w, target_w, params.alpha_max_degps2.to_radians() * dt);
    (v, w)
}

/// Exact unicycle pose update over `dt` with constant speeds.
///
/// For |w| above 1e-6 rad/s the closed-form arc is used; below that the
/// straight-line limit, which agrees to machine precision at the threshold.
pub fn integrate_unicycle(pose: Pose, v: f64, w: f64, dt: f64) -> Pose {
    let theta = pose.heading;
    let (x, y) = if w.abs() > 1e-6 {
        let theta1 = theta + w * dt;
        (
            pose.x + (v / w) * (theta1.sin() - theta.sin()),
            pose.y - (v / w) * (theta1.cos() - theta.cos()),
        )
    } else {
        (pose.x + v * dt * theta.cos(), pose.y + v * dt * theta.sin())
    };
    Pose::new(x, y, wrap_angle(theta + w * dt))
}

/// Deepest penetrating contact of the footprint circle at `p`, if any:
/// `(depth, push_direction)`.
fn deepest_contact(p: Vec2, scene: &Scene, footprint_radius: f64) -> Option<(f64, Vec2)> {
    let mut best: Option<(f64, Vec2)> = None;
    let mut consider = |depth: f64, dir: Vec2| {
        if depth > 0.0 && best.is_none_or(|(d, _)| depth > d) {
            best = Some((depth, dir));
        }
    };

    for b in &scene.barrels {
        let delta = p - b.center;
        let dist = delta.norm();
        let depth = footprint_radius + b.radius - dist;
        if depth > 0.0 {
            // Concentric circles have no defined direction; pick +X.
            let dir = if dist > 1e-12 { delta * (1.0 / dist) } else { Vec2::new(1.0, 0.0) };
            consider(depth, dir);
        }
    }

    for b in &scene.boxes {
        let local = (p - b.center).rotated(-b.yaw);
        let inside = local.x.abs() < b.half_extents.x && local.y.abs() < b.half_extents.y;
        if inside {
            // Push out through the nearest face.
            let dx = b.half_extents.x - local.x.abs();
            let dy = b.half_extents.y - local.y.abs();
            let dir_local = if dx <= dy {
                Vec2::new(if local.x >= 0.0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                Vec2::new(0.0, if local.y >= 0.0 { 1.0 } else { -1.0 })
            };
            let depth = footprint_radius + dx.min(dy);
            consider(depth, dir_local.rotated(b.yaw));
        } else {
            let clamped = Vec2::new(
                local.x.clamp(-b.half_extents.x, b.half_extents.x),
                local.y.clamp(-b.half_extents.y, b.half_extents.y),
            );
            let delta = local - clamped;
            let dist = delta.norm();
            let depth = footprint_radius - dist;
            if depth > 0.0 && dist > 1e-12 {
                consider(depth, (delta * (1.0 / dist)).rotated(b.yaw));
            }
        }
    }

    best
}

/// Project a candidate position out of any obstacle overlap.
///
/// Up to four push-out passes handle multi-contact, then the result is pulled
/// back along the segment to the original position so the robot is not moved
/// farther than the contact requires. Heading is untouched. Returns the
/// resolved pose and whether any contact occurred.
pub fn resolve_collision(
    pose_candidate: Pose,
    scene: &Scene,
    footprint_radius: f64,
) -> (Pose, bool) {
    let p0 = pose_candidate.position();
    let mut p = p0;
    let mut collided = false;

    for _ in 0..4 {
        match deepest_contact(p, scene, footprint_radius) {
            None => break,
            Some((depth, dir)) => {
                p = p + dir * (depth + 1e-9);
                collided = true;
            }
        }
    }

    if collided && deepest_contact(p, scene, footprint_radius).is_none() {
        // Earliest contact-free point on [p0, p].
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let q = Vec2::new(p0.x + (p.x - p0.x) * mid, p0.y + (p.y - p0.y) * mid);
            if deepest_contact(q, scene, footprint_radius).is_none() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        p = Vec2::new(p0.x + (p.x - p0.x) * hi, p0.y + (p.y - p0.y) * hi);
    }

    (Pose::new(p.x, p.y, pose_candidate.heading), collided)
}

/// One simulation tick: motor response, exact arc integration, contact
/// resolution. Pure; identical inputs give bit-identical output.
pub fn step_world(state: &RobotState, scene: &Scene, params: &DriveParams, dt: f64) -> RobotState {
    let (v, w) = apply_motor_response(state, &state.commanded, params, dt);
    let pose = integrate_unicycle(state.pose, v, w, dt);
    let (pose, collided) = resolve_collision(pose, scene, params.footprint_radius);
    RobotState { pose, v, w, commanded: state.commanded, collided }
}

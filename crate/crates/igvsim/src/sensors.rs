//! Sensor measurement models: planar LIDAR, tangent-plane GPS, compass, and
//! the per-sensor freshness clock that schedules when fresh data exists to
//! send. The camera model lives in [`crate::camera`].
//!
//! All measurement functions are pure given (scene, state, config, rng seed).
//! Noise is off by default everywhere; the knobs exist so inaccuracies of the
//! physical sensors can be layered in later.

use rand::Rng;

use crate::dynamics::RobotState;
use crate::geom::{ray_box_2d, ray_circle_2d, Pose, Ray2, Vec2};
use crate::scene::{GeoOrigin, Scene};

/// Meters per degree of latitude: pi/180 times the WGS-84 equatorial radius.
pub const METERS_PER_DEG_LAT: f64 = 111_319.4908;

/// Scanning range sensor configuration. Defaults mirror the URG-04LX-UG01
/// class of device: 240 degree fan, 683 beams, 0.02..5.6 m, 10 Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LidarConfig {
    /// Total fan width, degrees.
    pub fov_deg: f64,
    /// Number of beams across the fan (at least 2).
    pub beams: usize,
    pub max_range: f64,
    pub min_range: f64,
    /// Height of the scan plane above ground, m. Obstacles at or below this
    /// height do not block beams.
    pub mount_height: f64,
    /// Sensor position ahead of the robot reference point, m.
    pub mount_forward_offset: f64,
    pub rate_hz: f64,
    /// Gaussian range noise sigma, m. Zero disables noise entirely.
    pub noise_std: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        LidarConfig {
            fov_deg: 240.0,
            beams: 683,
            max_range: 5.6,
            min_range: 0.02,
            mount_height: 0.3,
            mount_forward_offset: 0.0,
            rate_hz: 10.0,
            noise_std: 0.0,
        }
    }
}

/// One LIDAR sweep. Beam 0 is the most clockwise beam (-fov/2 relative to
/// the robot heading); ranges are meters with no-return encoded as exactly
/// `max_range`. Stored as f32, matching the wire format.
#[derive(Clone, Debug, PartialEq)]
pub struct LidarScan {
    pub ranges: Vec<f32>,
}

/// GPS fix in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpsFix {
    pub lat: f64,
    pub lon: f64,
}

/// Compass heading: degrees in [0, 360), clockwise from true north.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeadingReading {
    pub heading_deg: f64,
}

/// GPS channel configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpsConfig {
    pub rate_hz: f64,
    /// Position noise sigma in meters, applied in the tangent plane before
    /// conversion. Zero disables noise.
    pub noise_std_m: f64,
}

impl Default for GpsConfig {
    fn default() -> Self {
        GpsConfig { rate_hz: 10.0, noise_std_m: 0.0 }
    }
}

/// Compass channel configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompassConfig {
    pub rate_hz: f64,
    /// Heading noise sigma in degrees. Zero disables noise.
    pub noise_std_deg: f64,
}

impl Default for CompassConfig {
    fn default() -> Self {
        CompassConfig { rate_hz: 25.0, noise_std_deg: 0.0 }
    }
}

/// Camera placement and imaging parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraMount {
    /// Offset from the robot reference point in the robot frame:
    /// (forward, left, up), meters.
    pub offset: [f64; 3],
    /// Downward tilt from horizontal, degrees.
    pub pitch_deg: f64,
    /// Horizontal field of view, degrees, in (0, 180). The vertical FOV
    /// follows from the aspect ratio.
    pub hfov_deg: f64,
    pub width: u16,
    pub height: u16,
    pub rate_hz: f64,
}

impl Default for CameraMount {
    fn default() -> Self {
        CameraMount {
            offset: [0.2, 0.0, 1.0],
            pitch_deg: 20.0,
            hfov_deg: 60.0,
            width: 160,
            height: 120,
            rate_hz: 10.0,
        }
    }
}

/// Uncompressed RGB8 image, row-major, top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraFrame {
    pub width: u16,
    pub height: u16,
    pub pixels: Vec<u8>,
}

/// Tracks when a sensor's cadence has produced a new measurement. Firing
/// times are computed as fire_count / rate rather than accumulated, so the
/// cadence never drifts.
#[derive(Clone, Copy, Debug)]
pub struct FreshnessClock {
    rate_hz: f64,
    fired: u64,
}

impl FreshnessClock {
    pub fn new(rate_hz: f64) -> Self {
        FreshnessClock { rate_hz, fired: 0 }
    }

    /// Next simulated time at which the sensor updates.
    pub fn next_due(&self) -> f64 {
        self.fired as f64 / self.rate_hz
    }

    /// True when a new measurement is due at `sim_time`; advances the
    /// schedule by one period on firing. A rate of zero never fires.
    /// `sim_time` must be monotone non-decreasing across calls.
    pub fn poll_due(&mut self, sim_time: f64) -> bool {
        if self.rate_hz <= 0.0 {
            return false;
        }
        if sim_time >= self.next_due() {
            self.fired += 1;
            true
        } else {
            false
        }
    }
}

/// One standard normal draw (Box-Muller).
pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Cast the LIDAR fan against every obstacle tall enough to cross the scan
/// plane. Ranges clamp to [min_range, max_range]; no hit reads `max_range`.
/// With `noise_std` zero the rng is never touched.
pub fn scan_lidar<R: Rng>(
    scene: &Scene,
    state: &RobotState,
    cfg: &LidarConfig,
    rng: &mut R,
) -> LidarScan {
    assert!(cfg.beams >= 2, "lidar needs at least 2 beams");
    let origin = state.pose.position() + state.pose.forward() * cfg.mount_forward_offset;

    // Obstacles that cannot be reached by any beam are skipped up front.
    let barrels: Vec<&crate::scene::Barrel> = scene
        .barrels
        .iter()
        .filter(|b| {
            b.height > cfg.mount_height && (b.center - origin).norm() - b.radius <= cfg.max_range
        })
        .collect();
    let boxes: Vec<&crate::scene::BoxObstacle> = scene
        .boxes
        .iter()
        .filter(|b| {
            b.height > cfg.mount_height
                && (b.center - origin).norm() - b.half_extents.norm() <= cfg.max_range
        })
        .collect();

    let fov = cfg.fov_deg.to_radians();
    let step = fov / (cfg.beams - 1) as f64;
    let mut ranges = Vec::with_capacity(cfg.beams);
    for i in 0..cfg.beams {
        let angle = state.pose.heading - fov / 2.0 + i as f64 * step;
        let ray = Ray2::from_angle(origin, angle);
        let mut nearest = f64::INFINITY;
        for b in &barrels {
            if let Some(t) = ray_circle_2d(ray, b.center, b.radius) {
                nearest = nearest.min(t);
            }
        }
        for b in &boxes {
            if let Some(t) = ray_box_2d(ray, b.center, b.half_extents, b.yaw) {
                nearest = nearest.min(t);
            }
        }
        let mut range = if nearest.is_finite() {
            nearest.clamp(cfg.min_range, cfg.max_range)
        } else {
            cfg.max_range
        };
        if cfg.noise_std > 0.0 {
            range = (range + cfg.noise_std * gaussian(rng)).clamp(cfg.min_range, cfg.max_range);
        }
        ranges.push(range as f32);
    }
    LidarScan { ranges }
}

/// Map a local pose to latitude/longitude: an equirectangular tangent plane
/// anchored at the scene origin. Millimeter-accurate at course scale, and
/// the meters-per-degree constant is pinned so a scaling regression cannot
/// slip in silently.
pub fn gps_from_pose(pose: &Pose, geo: &GeoOrigin) -> GpsFix {
    GpsFix {
        lat: geo.lat0 + pose.y / METERS_PER_DEG_LAT,
        lon: geo.lon0 + pose.x / (METERS_PER_DEG_LAT * geo.lat0.to_radians().cos()),
    }
}

/// Inverse of [`gps_from_pose`]: local east/north meters of a fix.
pub fn local_from_geodetic(fix: &GpsFix, geo: &GeoOrigin) -> Vec2 {
    Vec2::new(
        (fix.lon - geo.lon0) * METERS_PER_DEG_LAT * geo.lat0.to_radians().cos(),
        (fix.lat - geo.lat0) * METERS_PER_DEG_LAT,
    )
}

/// GPS measurement with optional tangent-plane Gaussian noise.
pub fn gps_measurement<R: Rng>(
    pose: &Pose,
    geo: &GeoOrigin,
    cfg: &GpsConfig,
    rng: &mut R,
) -> GpsFix {
    if cfg.noise_std_m > 0.0 {
        let noisy = Pose::new(
            pose.x + cfg.noise_std_m * gaussian(rng),
            pose.y + cfg.noise_std_m * gaussian(rng),
            pose.heading,
        );
        gps_from_pose(&noisy, geo)
    } else {
        gps_from_pose(pose, geo)
    }
}

/// Convert the internal CCW-from-east heading to a compass reading
/// (degrees clockwise from true north, in [0, 360)).
pub fn compass_from_pose(pose: &Pose) -> HeadingReading {
    HeadingReading {
        heading_deg: (90.0 - pose.heading.to_degrees()).rem_euclid(360.0),
    }
}

/// Compass measurement with optional Gaussian heading noise.
pub fn compass_measurement<R: Rng>(pose: &Pose, cfg: &CompassConfig, rng: &mut R) -> HeadingReading {
    let base = compass_from_pose(pose);
    if cfg.noise_std_deg > 0.0 {
        HeadingReading {
            heading_deg: (base.heading_deg + cfg.noise_std_deg * gaussian(rng)).rem_euclid(360.0),
        }
    } else {
        base
    }
}

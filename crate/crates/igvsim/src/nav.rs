//! Demo reactive navigator: widest-gap following on the LIDAR fan plus a
//! camera bias that steers away from painted lines.
//!
//! The policy is deliberately simple and fully deterministic - a pure
//! function of its inputs - so closed-loop runs can be replayed and compared
//! bit for bit. The control loop underneath touches only the [`Sensor`] and
//! [`MotorController`] traits; wiring it to simulation channels or to stubs
//! is the caller's choice and changes nothing here.

use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use crate::client::{Latest, MotorController, Sensor};
use crate::dynamics::MotorCommand;
use crate::sensors::{CameraFrame, GpsFix, HeadingReading, LidarScan};

/// Tuning of the demo policy. Angles are degrees, distances meters.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NavParams {
    /// Cruise speed, m/s.
    pub v_nom: f64,
    /// Ranges beyond this are free space.
    pub d_safe: f64,
    /// Stop when the front range reaches this.
    pub d_stop: f64,
    /// Steering gain toward the gap center, per second.
    pub k_heading: f64,
    /// Angular command cap, deg/s.
    pub w_cap_degps: f64,
    /// A pixel counts as painted line when all channels exceed this.
    pub line_white_threshold: u8,
    /// Steering away from the whiter image half, deg/s per unit asymmetry.
    pub line_bias_gain: f64,
    /// Fan width of the attached LIDAR, needed to map beam index to angle.
    pub lidar_fov_deg: f64,
}

impl Default for NavParams {
    fn default() -> Self {
        NavParams {
            v_nom: 0.8,
            d_safe: 1.2,
            d_stop: 0.5,
            k_heading: 1.5,
            w_cap_degps: 60.0,
            line_white_threshold: 200,
            line_bias_gain: 30.0,
            lidar_fov_deg: 240.0,
        }
    }
}

/// Minimum range within +-15 degrees of straight ahead.
pub fn front_min_range(scan: &LidarScan, fov_deg: f64) -> f64 {
    let n = scan.ranges.len();
    let fov = fov_deg.to_radians();
    let half_sector = 15.0_f64.to_radians();
    let mut min = f64::INFINITY;
    for (i, &r) in scan.ranges.iter().enumerate() {
        let angle = -fov / 2.0 + i as f64 * fov / (n - 1) as f64;
        if angle.abs() <= half_sector {
            min = min.min(f64::from(r));
        }
    }
    min
}

/// One reactive decision. Pure: identical inputs give identical commands.
///
/// Free beams are those reading beyond `d_safe`; the widest contiguous free
/// gap wins (ties prefer the gap centered closest to straight ahead, then
/// the more clockwise one) and steering turns toward its center. Forward
/// speed scales with the front clearance between `d_stop` and `d_safe`.
/// When a camera frame is present, white pixels in the bottom third bias
/// steering toward the less white side. A fully blocked scan rotates in
/// place toward the longest single beam.
pub fn navigate_step(
    scan: &LidarScan,
    frame: Option<&CameraFrame>,
    _fix: Option<&GpsFix>,
    params: &NavParams,
) -> MotorCommand {
    let n = scan.ranges.len();
    assert!(n >= 2, "scan needs at least two beams");
    let fov = params.lidar_fov_deg.to_radians();
    let angle_of = |i: usize| -fov / 2.0 + i as f64 * fov / (n - 1) as f64;

    // Contiguous runs of free beams.
    let mut gaps: Vec<(usize, usize)> = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..n {
        let free = f64::from(scan.ranges[i]) > params.d_safe;
        match (free, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                gaps.push((s, i - 1));
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        gaps.push((s, n - 1));
    }

    if gaps.is_empty() {
        // Fully blocked: rotate in place toward the longest single beam
        // (ties prefer the one closest to straight ahead, then clockwise).
        let longest = (0..n)
            .max_by(|&a, &b| {
                scan.ranges[a]
                    .partial_cmp(&scan.ranges[b])
                    .unwrap()
                    .then(angle_of(b).abs().partial_cmp(&angle_of(a).abs()).unwrap())
                    .then(angle_of(b).partial_cmp(&angle_of(a)).unwrap())
            })
            .unwrap();
        let sign = if angle_of(longest) < 0.0 { -1.0 } else { 1.0 };
        return MotorCommand::new(0.0, sign * params.w_cap_degps);
    }

    let center_of = |gap: &(usize, usize)| (angle_of(gap.0) + angle_of(gap.1)) / 2.0;
    let best = gaps
        .iter()
        .max_by(|a, b| {
            let width_a = a.1 - a.0;
            let width_b = b.1 - b.0;
            width_a
                .cmp(&width_b)
                .then(center_of(b).abs().partial_cmp(&center_of(a).abs()).unwrap())
                .then(center_of(b).partial_cmp(&center_of(a)).unwrap())
        })
        .unwrap();
    let phi = center_of(best);

    let mut angular = (params.k_heading * phi.to_degrees())
        .clamp(-params.w_cap_degps, params.w_cap_degps);

    let front = front_min_range(scan, params.lidar_fov_deg);
    let linear = params.v_nom
        * ((front - params.d_stop) / (params.d_safe - params.d_stop)).clamp(0.0, 1.0);

    if let Some(frame) = frame {
        let (w, h) = (usize::from(frame.width), usize::from(frame.height));
        let mut left = 0i64;
        let mut right = 0i64;
        let threshold = params.line_white_threshold;
        for v in (h - h / 3)..h {
            for u in 0..w {
                let at = (v * w + u) * 3;
                let px = &frame.pixels[at..at + 3];
                if px[0] > threshold && px[1] > threshold && px[2] > threshold {
                    if u < w / 2 {
                        left += 1;
                    } else {
                        right += 1;
                    }
                }
            }
        }
        // Steer toward the less white side.
        angular -= params.line_bias_gain * (left - right) as f64 / (left + right + 1) as f64;
    }

    MotorCommand::new(linear, angular)
}

/// Outcome of a control loop run.
#[derive(Clone, Debug, Default)]
pub struct NavReport {
    pub cycles: u64,
    pub commands_sent: u64,
    /// Sequence number of the last scan acted on.
    pub last_lidar_seq: u64,
    /// True when the loop exited because the lidar channel closed.
    pub channel_closed: bool,
}

pub const NAV_LOG_HEADER: &str =
    "cycle,wall_time,lidar_seq,min_front_range_m,cmd_linear_mps,cmd_angular_degps";

/// The navigation loop: wait for a fresh scan (or the control period),
/// read the latest of every sensor, decide, command. Exits cleanly when the
/// lidar channel closes or `stop` is raised.
///
/// Generic over the sensor/motor traits only - no simulation types - so the
/// same loop runs against live simulation channels, stubs, or hardware
/// implementations.
pub fn run_control_loop<LS, CAM, GPS, COMP, M>(
    lidar: &LS,
    camera: &CAM,
    gps: &GPS,
    compass: &COMP,
    motor: &M,
    params: &NavParams,
    control_rate_hz: f64,
    mut log: Option<&mut dyn Write>,
    stop: Option<&AtomicBool>,
) -> NavReport
where
    LS: Sensor<LidarScan>,
    CAM: Sensor<CameraFrame>,
    GPS: Sensor<GpsFix>,
    COMP: Sensor<HeadingReading>,
    M: MotorController,
{
    let period = Duration::from_secs_f64(1.0 / control_rate_hz);
    let started = Instant::now();
    let mut report = NavReport::default();
    let mut last_seq = 0u64;

    if let Some(out) = log.as_deref_mut() {
        let _ = writeln!(out, "{NAV_LOG_HEADER}");
    }

    loop {
        if stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            break;
        }
        let reading = lidar.wait_fresh(last_seq, period);
        let (scan, seq) = match reading {
            Latest::Closed { .. } => {
                report.channel_closed = true;
                break;
            }
            Latest::Pending => continue,
            Latest::Fresh { value, seq } => (value, seq),
        };
        last_seq = seq;

        let camera_reading = camera.latest();
        let gps_reading = gps.latest();
        // The demo policy ignores the compass, but the loop still drains it
        // so recordings carry the full sensor picture.
        let _ = compass.latest();

        let cmd = navigate_step(
            &scan,
            camera_reading.value(),
            gps_reading.value(),
            params,
        );
        motor.set_speeds(cmd.linear_mps, cmd.angular_degps);
        report.cycles += 1;
        report.commands_sent += 1;
        report.last_lidar_seq = seq;

        if let Some(out) = log.as_deref_mut() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                report.cycles,
                started.elapsed().as_secs_f64(),
                seq,
                front_min_range(&scan, params.lidar_fov_deg),
                cmd.linear_mps,
                cmd.angular_degps,
            );
        }
    }
    report
}

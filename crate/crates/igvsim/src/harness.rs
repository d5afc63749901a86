//! Deterministic in-process closed loop.
//!
//! Runs the simulator core and the demo navigator in one thread, exchanging
//! the same encoded wire payloads they would exchange over TCP, with a fixed
//! one-tick command latency in place of socket transport. Every piece of the
//! production path is exercised - world stepping, sensor models, payload
//! codecs, latest-value cells, the navigation policy - but scheduling is
//! synchronous, so a run is a pure function of (scene, config, seed):
//! trajectories are byte-identical across runs and machines.
//!
//! Over real sockets the same pairing behaves statistically identically but
//! OS scheduling shifts command arrival by a tick now and then; this harness
//! exists so tests and demos can assert byte-level reproducibility.

use std::sync::Arc;

use crate::client::LatestCell;
use crate::dynamics::MotorCommand;
use crate::nav::{navigate_step, NavParams};
use crate::scene::Scene;
use crate::sensors::FreshnessClock;
use crate::sim::{SimConfig, TrajectoryWriter};
use crate::wire::{decode_camera, decode_compass, decode_gps, decode_lidar, decode_motor, encode_motor};

#[derive(Clone, Debug)]
pub struct ClosedLoopConfig {
    /// Physics, sensor and drive configuration. Channels and dump paths are
    /// ignored; transport is in-process.
    pub sim: SimConfig,
    pub nav: NavParams,
    /// Navigator decision rate, Hz (in simulated time).
    pub control_rate_hz: f64,
    /// Hard stop, simulated seconds.
    pub max_sim_time: f64,
}

impl Default for ClosedLoopConfig {
    fn default() -> Self {
        ClosedLoopConfig {
            sim: SimConfig::default(),
            nav: NavParams::default(),
            control_rate_hz: 20.0,
            max_sim_time: 180.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosedLoopResult {
    pub ticks: u64,
    pub sim_time: f64,
    pub collision_ticks: u64,
    /// Simulated time at which the goal region was entered, if it was.
    pub goal_time: Option<f64>,
    /// Full trajectory dump, identical in format to `igvsim
    /// --dump-trajectory`.
    pub trajectory_csv: Vec<u8>,
    /// Every motor command the navigator issued, with the tick it was
    /// applied on.
    pub commands: Vec<(u64, MotorCommand)>,
    /// Final pose (x, y, heading).
    pub final_pose: (f64, f64, f64),
}

/// Run simulator and navigator to completion: goal entry, `max_sim_time`,
/// whichever first.
pub fn run_closed_loop(scene: Arc<Scene>, cfg: &ClosedLoopConfig) -> ClosedLoopResult {
    let mut world = crate::sim::WorldCore::new(Arc::clone(&scene), &cfg.sim);

    // Navigator-side state, exactly as the client SDK keeps it.
    let lidar_cell = LatestCell::new();
    let gps_cell = LatestCell::new();
    let compass_cell = LatestCell::new();
    let camera_cell = LatestCell::new();
    let mut control_clock = FreshnessClock::new(cfg.control_rate_hz);

    // Motor frame in flight: issued this tick, applied next tick.
    let mut in_flight: Option<Vec<u8>> = None;

    let mut trajectory = TrajectoryWriter::new(Vec::new()).expect("vec io");
    let mut commands = Vec::new();
    let mut collision_ticks = 0u64;
    let mut goal_time = None;
    let mut tick: u64 = 0;

    let wants = crate::sim::SensorWants { lidar: true, gps: true, compass: true, camera: true };

    loop {
        let sim_time = tick as f64 / cfg.sim.tick_rate;
        if sim_time >= cfg.max_sim_time {
            break;
        }

        // Motor frames that arrived since the last tick.
        if let Some(bytes) = in_flight.take() {
            if let Ok(cmd) = decode_motor(&bytes) {
                world.apply_commands(&[cmd]);
                commands.push((tick, cmd));
            }
        }

        world.step();
        if world.state.collided {
            collision_ticks += 1;
        }

        // Sensor emissions cross the codec boundary into the client cells.
        let emissions = world.poll_sensors(sim_time, wants);
        if let Some(bytes) = emissions.lidar {
            lidar_cell.publish(decode_lidar(&bytes).expect("self-encoded scan"));
        }
        if let Some(bytes) = emissions.gps {
            gps_cell.publish(decode_gps(&bytes).expect("self-encoded fix"));
        }
        if let Some(bytes) = emissions.compass {
            compass_cell.publish(decode_compass(&bytes).expect("self-encoded heading"));
        }
        if let Some((_, bytes)) = emissions.camera {
            camera_cell.publish(decode_camera(&bytes).expect("self-encoded frame"));
        }

        // Navigator decision at its own cadence, on the newest data.
        if control_clock.poll_due(sim_time) {
            if let crate::client::Latest::Fresh { value: scan, seq: _ } = lidar_cell.read() {
                let frame = camera_cell.read();
                let fix = gps_cell.read();
                let cmd = navigate_step(&scan, frame.value(), fix.value(), &cfg.nav);
                in_flight = Some(encode_motor(&cmd));
            }
        }

        trajectory.write_row(tick, sim_time, &world.state).expect("vec io");
        tick += 1;

        if world.in_goal() {
            goal_time = Some(tick as f64 / cfg.sim.tick_rate);
            break;
        }
    }

    ClosedLoopResult {
        ticks: tick,
        sim_time: tick as f64 / cfg.sim.tick_rate,
        collision_ticks,
        goal_time,
        trajectory_csv: trajectory.finish().expect("vec io"),
        commands,
        final_pose: (world.state.pose.x, world.state.pose.y, world.state.pose.heading),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Pose, Vec2};
    use crate::scene::{Barrel, GeoOrigin, Goal, TerrainStyle};

    fn straight_lane() -> Scene {
        Scene {
            geo: GeoOrigin { lat0: 42.678, lon0: -83.195 },
            terrain: TerrainStyle { noise_amplitude: 0.0, ..TerrainStyle::default() },
            lines: vec![],
            barrels: vec![
                Barrel { center: Vec2::new(5.0, 2.0), radius: 0.28, height: 1.0 },
                Barrel { center: Vec2::new(5.0, -2.0), radius: 0.28, height: 1.0 },
            ],
            boxes: vec![],
            spawn: Pose::new(0.0, 0.0, 0.0),
            goal: Some(Goal { center: Vec2::new(10.0, 0.0), radius: 1.5 }),
        }
    }

    #[test]
    fn reaches_straight_goal_without_contact() {
        let cfg = ClosedLoopConfig { max_sim_time: 60.0, ..ClosedLoopConfig::default() };
        let result = run_closed_loop(Arc::new(straight_lane()), &cfg);
        assert!(result.goal_time.is_some(), "never reached goal: {result:?}");
        assert_eq!(result.collision_ticks, 0);
    }

    #[test]
    fn runs_are_byte_identical() {
        let cfg = ClosedLoopConfig { max_sim_time: 30.0, ..ClosedLoopConfig::default() };
        let scene = Arc::new(straight_lane());
        let a = run_closed_loop(Arc::clone(&scene), &cfg);
        let b = run_closed_loop(scene, &cfg);
        assert_eq!(a.trajectory_csv, b.trajectory_csv);
        assert_eq!(a.commands, b.commands);
    }
}

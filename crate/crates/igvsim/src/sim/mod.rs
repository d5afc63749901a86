//! Simulator runtime: owns the world, runs the fixed-timestep loop, streams
//! fresh sensor data out and drains motor commands in.
//!
//! Exactly one thread owns the robot state and executes ticks. Channel I/O
//! runs on dedicated connection threads, and everything crossing that
//! boundary goes through queues: inbound motor commands into a tick-drained
//! inbox, outbound frames into bounded drop-oldest queues. Physics starts
//! only after every configured channel is connected.

mod dump;
mod net;
mod queue;

pub use dump::{frame_filename, write_ppm, TrajectoryWriter, TRAJECTORY_HEADER};
pub use net::{connect_channels, Connections};
pub use queue::BoundedQueue;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::camera::CameraRenderer;
use crate::dynamics::{step_world, DriveParams, MotorCommand, RobotState};
use crate::scene::{parse_scene, validate_scene, Scene};
use crate::sensors::{
    compass_measurement, gps_measurement, scan_lidar, CameraFrame, CameraMount, CompassConfig,
    FreshnessClock, GpsConfig, LidarConfig,
};
use crate::wire::{
    encode_camera, encode_compass, encode_gps, encode_lidar, ChannelKind,
};

/// Endpoint of one sensor or motor channel on the robot side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub host: String,
    pub port: u16,
}

/// Wall-clock pacing of the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pacing {
    /// Sleep each tick to hold the tick rate at one second per second.
    Realtime,
    /// Never sleep; run as fast as the machine allows.
    Fast,
}

/// Everything a simulation run needs.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub scene_path: PathBuf,
    pub channels: Vec<ChannelConfig>,
    /// Physics rate, Hz. The timestep is fixed at 1/tick_rate.
    pub tick_rate: f64,
    pub pacing: Pacing,
    /// Simulated seconds to run; `None` runs until the goal or a signal.
    pub duration: Option<f64>,
    pub seed: u64,
    pub drive: DriveParams,
    pub lidar: LidarConfig,
    pub camera: CameraMount,
    pub gps: GpsConfig,
    pub compass: CompassConfig,
    pub dump_trajectory: Option<PathBuf>,
    pub dump_frames: Option<PathBuf>,
    /// Retry refused connections until the timeout (off = one attempt each).
    pub reconnect: bool,
    pub connect_timeout: f64,
    /// Zero the commanded speeds after this many seconds of motor silence.
    pub cmd_timeout: Option<f64>,
    /// External stop request (e.g. a signal handler).
    pub stop: Option<Arc<AtomicBool>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scene_path: PathBuf::new(),
            channels: Vec::new(),
            tick_rate: 50.0,
            pacing: Pacing::Realtime,
            duration: None,
            seed: 0,
            drive: DriveParams::default(),
            lidar: LidarConfig::default(),
            camera: CameraMount::default(),
            gps: GpsConfig::default(),
            compass: CompassConfig::default(),
            dump_trajectory: None,
            dump_frames: None,
            reconnect: true,
            connect_timeout: 10.0,
            cmd_timeout: None,
            stop: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("scene: {0}")]
    Scene(String),
    #[error("connection failure: {}", .failed.iter().map(|(k, e)| format!("{k} ({e})")).collect::<Vec<_>>().join(", "))]
    Connect { failed: Vec<(ChannelKind, String)> },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code contract: 2 scene error, 3 connection failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Scene(_) => 2,
            SimError::Connect { .. } => 3,
            SimError::Io(_) => 1,
        }
    }
}

/// Counters for one streamed channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChannelStats {
    /// Messages enqueued for sending.
    pub enqueued: u64,
    /// Messages discarded because the consumer lagged.
    pub dropped: u64,
    /// Whether the connection died mid-run.
    pub closed_mid_run: bool,
}

/// What happened during a run.
#[derive(Clone, Debug, Default)]
pub struct SimReport {
    pub ticks: u64,
    pub sim_time: f64,
    pub wall_time: f64,
    pub channels: HashMap<ChannelKind, ChannelStats>,
    /// Valid motor commands drained by ticks.
    pub commands_received: u64,
    /// Malformed motor frames skipped.
    pub decode_errors: u64,
    pub collision_ticks: u64,
    /// Simulated time at which the goal region was entered, if it was.
    pub goal_reached: Option<f64>,
}

impl std::fmt::Display for SimReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "ticks: {} ({} s simulated in {:.3} s wall, {:.1}x real time)",
            self.ticks,
            self.sim_time,
            self.wall_time,
            if self.wall_time > 0.0 { self.sim_time / self.wall_time } else { f64::INFINITY },
        )?;
        for kind in ChannelKind::ALL {
            if let Some(stats) = self.channels.get(&kind) {
                writeln!(
                    f,
                    "{kind}: {} enqueued, {} dropped{}",
                    stats.enqueued,
                    stats.dropped,
                    if stats.closed_mid_run { ", closed mid-run" } else { "" },
                )?;
            }
        }
        writeln!(
            f,
            "motor: {} commands, {} malformed frames skipped",
            self.commands_received, self.decode_errors
        )?;
        writeln!(f, "collision ticks: {}", self.collision_ticks)?;
        match self.goal_reached {
            Some(t) => writeln!(f, "goal reached at {t} s"),
            None => writeln!(f, "goal not reached"),
        }
    }
}

/// The mutable simulation state advanced each tick, independent of any
/// transport. The deterministic in-process harness drives the same core.
pub(crate) struct WorldCore {
    pub scene: Arc<Scene>,
    pub state: RobotState,
    pub renderer: CameraRenderer,
    pub rng: ChaCha8Rng,
    pub lidar_clock: FreshnessClock,
    pub gps_clock: FreshnessClock,
    pub compass_clock: FreshnessClock,
    pub camera_clock: FreshnessClock,
    drive: DriveParams,
    lidar: LidarConfig,
    camera: CameraMount,
    gps: GpsConfig,
    compass: CompassConfig,
    dt: f64,
}

/// Sensor data produced by one tick, already encoded for the wire. The
/// camera frame rides along for dump writers.
#[derive(Default)]
pub(crate) struct TickEmissions {
    pub lidar: Option<Vec<u8>>,
    pub gps: Option<Vec<u8>>,
    pub compass: Option<Vec<u8>>,
    pub camera: Option<(CameraFrame, Vec<u8>)>,
}

/// Which sensors to actually compute this tick; clocks advance regardless.
#[derive(Clone, Copy)]
pub(crate) struct SensorWants {
    pub lidar: bool,
    pub gps: bool,
    pub compass: bool,
    pub camera: bool,
}

impl WorldCore {
    pub fn new(scene: Arc<Scene>, cfg: &SimConfig) -> WorldCore {
        WorldCore {
            renderer: CameraRenderer::new(Arc::clone(&scene)),
            state: RobotState::at_spawn(&scene),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            lidar_clock: FreshnessClock::new(cfg.lidar.rate_hz),
            gps_clock: FreshnessClock::new(cfg.gps.rate_hz),
            compass_clock: FreshnessClock::new(cfg.compass.rate_hz),
            camera_clock: FreshnessClock::new(cfg.camera.rate_hz),
            drive: cfg.drive,
            lidar: cfg.lidar,
            camera: cfg.camera,
            gps: cfg.gps,
            compass: cfg.compass,
            dt: 1.0 / cfg.tick_rate,
            scene,
        }
    }

    /// Latest valid command wins; earlier ones in the same tick are ignored.
    pub fn apply_commands(&mut self, drained: &[MotorCommand]) {
        if let Some(last) = drained.last() {
            self.state.commanded = *last;
        }
    }

    pub fn step(&mut self) {
        self.state = step_world(&self.state, &self.scene, &self.drive, self.dt);
    }

    /// Poll every sensor clock at the tick timestamp and compute the wanted
    /// measurements from the post-step state.
    pub fn poll_sensors(&mut self, sim_time: f64, wants: SensorWants) -> TickEmissions {
        let mut out = TickEmissions::default();
        if self.lidar_clock.poll_due(sim_time) && wants.lidar {
            let scan = scan_lidar(&self.scene, &self.state, &self.lidar, &mut self.rng);
            out.lidar = Some(encode_lidar(&scan).expect("lidar config fits the wire format"));
        }
        if self.gps_clock.poll_due(sim_time) && wants.gps {
            let fix = gps_measurement(&self.state.pose, &self.scene.geo, &self.gps, &mut self.rng);
            out.gps = Some(encode_gps(&fix));
        }
        if self.compass_clock.poll_due(sim_time) && wants.compass {
            let reading = compass_measurement(&self.state.pose, &self.compass, &mut self.rng);
            out.compass = Some(encode_compass(&reading));
        }
        if self.camera_clock.poll_due(sim_time) && wants.camera {
            let frame = self.renderer.render(&self.state, &self.camera);
            let bytes = encode_camera(&frame).expect("camera config fits the wire format");
            out.camera = Some((frame, bytes));
        }
        out
    }

    /// Whether the post-step pose is inside the goal region.
    pub fn in_goal(&self) -> bool {
        match &self.scene.goal {
            Some(goal) => (self.state.pose.position() - goal.center).norm() <= goal.radius,
            None => false,
        }
    }
}

/// Load, validate and run a scene per the config. See [`run_with_scene`].
pub fn run_simulation(cfg: &SimConfig) -> Result<SimReport, SimError> {
    let text = std::fs::read_to_string(&cfg.scene_path)
        .map_err(|e| SimError::Scene(format!("{}: {e}", cfg.scene_path.display())))?;
    let scene = parse_scene(&text).map_err(|e| SimError::Scene(e.to_string()))?;
    let violations = validate_scene(&scene);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(SimError::Scene(list.join("; ")));
    }
    run_with_scene(cfg, Arc::new(scene))
}

/// Connect all channels, then run the fixed-timestep loop until the duration
/// elapses, the goal region is entered, or a stop is requested. With a fixed
/// seed and a scripted command source the trajectory dump is byte-identical
/// across runs.
pub fn run_with_scene(cfg: &SimConfig, scene: Arc<Scene>) -> Result<SimReport, SimError> {
    let conns = connect_channels(&cfg.channels, cfg.connect_timeout, cfg.reconnect)?;
    run_connected(cfg, scene, conns)
}

/// Run the loop over an already-established connection set, for callers that
/// need to interleave work between connection and the first tick.
pub fn run_connected(
    cfg: &SimConfig,
    scene: Arc<Scene>,
    conns: Connections,
) -> Result<SimReport, SimError> {
    let mut world = WorldCore::new(scene, cfg);
    let dt = 1.0 / cfg.tick_rate;

    let mut trajectory = match &cfg.dump_trajectory {
        Some(path) => Some(TrajectoryWriter::new(std::io::BufWriter::new(
            std::fs::File::create(path)?,
        ))?),
        None => None,
    };
    if let Some(dir) = &cfg.dump_frames {
        std::fs::create_dir_all(dir)?;
    }

    let mut report = SimReport::default();
    for ch in &cfg.channels {
        if !ch.kind.is_client_to_sim() {
            report.channels.insert(ch.kind, ChannelStats::default());
        }
    }

    let wall_start = Instant::now();
    let mut tick_index: u64 = 0;
    let mut frames_dumped: u64 = 0;
    let mut last_cmd_time = 0.0_f64;

    loop {
        let sim_time = tick_index as f64 / cfg.tick_rate;
        if let Some(duration) = cfg.duration {
            if sim_time >= duration {
                break;
            }
        }
        if cfg.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed)) {
            break;
        }

        // 1. Motor commands: drain everything pending, newest wins, hold the
        //    previous command on silence.
        if let Some(motor) = &conns.motor {
            let drained = motor.drain();
            if !drained.is_empty() {
                report.commands_received += drained.len() as u64;
                last_cmd_time = sim_time;
            }
            world.apply_commands(&drained);
        }
        if let Some(timeout) = cfg.cmd_timeout {
            if sim_time - last_cmd_time >= timeout {
                world.state.commanded = MotorCommand::default();
            }
        }

        // 2. Physics.
        world.step();
        if world.state.collided {
            report.collision_ticks += 1;
        }

        // 3. Fresh sensor data, computed from the post-step state and
        //    enqueued without blocking.
        let channel_open = |kind: ChannelKind| {
            conns.channel(kind).map(|ch| !ch.is_closed())
        };
        let wants = SensorWants {
            lidar: channel_open(ChannelKind::Lidar) == Some(true),
            gps: channel_open(ChannelKind::Gps) == Some(true),
            compass: channel_open(ChannelKind::Compass) == Some(true),
            camera: channel_open(ChannelKind::Camera) == Some(true) || cfg.dump_frames.is_some(),
        };
        let emissions = world.poll_sensors(sim_time, wants);
        let mut enqueue = |kind: ChannelKind, bytes: Vec<u8>| {
            if let Some(ch) = conns.channel(kind) {
                if ch.send(bytes) {
                    report.channels.get_mut(&kind).unwrap().enqueued += 1;
                }
            }
        };
        if let Some(bytes) = emissions.lidar {
            enqueue(ChannelKind::Lidar, bytes);
        }
        if let Some(bytes) = emissions.gps {
            enqueue(ChannelKind::Gps, bytes);
        }
        if let Some(bytes) = emissions.compass {
            enqueue(ChannelKind::Compass, bytes);
        }
        if let Some((frame, bytes)) = emissions.camera {
            enqueue(ChannelKind::Camera, bytes);
            if let Some(dir) = &cfg.dump_frames {
                write_ppm(&dir.join(frame_filename(frames_dumped)), &frame)?;
                frames_dumped += 1;
            }
        }

        // 4. Dumps.
        if let Some(w) = &mut trajectory {
            w.write_row(tick_index, sim_time, &world.state)?;
        }

        tick_index += 1;

        if world.in_goal() {
            report.goal_reached = Some(tick_index as f64 / cfg.tick_rate);
            break;
        }

        if cfg.pacing == Pacing::Realtime {
            let target = wall_start + Duration::from_secs_f64(tick_index as f64 * dt);
            let now = Instant::now();
            if target > now {
                std::thread::sleep(target - now);
            }
        }
    }

    report.ticks = tick_index;
    report.sim_time = tick_index as f64 / cfg.tick_rate;
    report.wall_time = wall_start.elapsed().as_secs_f64();
    for (kind, ch) in &conns.outbound {
        let stats = report.channels.get_mut(kind).unwrap();
        stats.dropped = ch.dropped();
        stats.closed_mid_run = ch.is_closed();
    }
    if let Some(motor) = &conns.motor {
        report.decode_errors = motor.invalid_frames();
    }
    if let Some(w) = trajectory {
        w.finish()?;
    }
    Ok(report)
}

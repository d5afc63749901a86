//! Simulator CLI: loads a course, connects out to the listening robot
//! software, and runs the fixed-timestep loop.
//!
//! Exit codes: 0 clean, 2 scene error, 3 connection failure.

use std::path::PathBuf;

use clap::Parser;

use igvsim::sim::{run_simulation, ChannelConfig, Pacing, SimConfig};
use igvsim::wire::ChannelKind;

#[derive(Parser)]
#[command(
    name = "igvsim",
    about = "Headless ground-vehicle simulator streaming sensors over per-channel TCP",
    after_help = "The robot software must be listening on the given ports before the \
                  simulator starts (see igvnav). Sensor channels stream simulator -> robot; \
                  the motor channel carries commands back."
)]
struct Args {
    /// Course file (JSON).
    #[arg(long, value_name = "FILE")]
    scene: PathBuf,

    /// Host the robot software listens on.
    #[arg(long, value_name = "HOST", default_value = "127.0.0.1")]
    host: String,

    #[arg(long, value_name = "N")]
    gps_port: Option<u16>,

    #[arg(long, value_name = "N")]
    compass_port: Option<u16>,

    #[arg(long, value_name = "N")]
    lidar_port: Option<u16>,

    #[arg(long, value_name = "N")]
    camera_port: Option<u16>,

    /// Motor command channel port (always required).
    #[arg(long, value_name = "N")]
    motor_port: u16,

    /// Physics tick rate, Hz.
    #[arg(long, value_name = "HZ", default_value_t = 50.0)]
    rate: f64,

    /// Pace the loop at one simulated second per wall second (default).
    #[arg(long, conflicts_with = "fast")]
    realtime: bool,

    /// Run as fast as possible.
    #[arg(long)]
    fast: bool,

    /// Stop after this much simulated time, seconds.
    #[arg(long, value_name = "S")]
    duration: Option<f64>,

    /// Seed for sensor noise draws.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Write one CSV row per tick.
    #[arg(long, value_name = "FILE")]
    dump_trajectory: Option<PathBuf>,

    /// Write each camera emission as PPM into this directory.
    #[arg(long, value_name = "DIR")]
    dump_frames: Option<PathBuf>,

    /// Zero the commanded speeds after this many seconds without a motor
    /// frame.
    #[arg(long, value_name = "S")]
    cmd_timeout: Option<f64>,

    /// Give up connecting after this many seconds.
    #[arg(long, value_name = "S", default_value_t = 10.0)]
    connect_timeout: f64,

    /// Drive limits file (JSON), overriding the built-in defaults.
    #[arg(long, value_name = "FILE")]
    drive_params: Option<PathBuf>,

    #[arg(long)]
    no_camera: bool,

    #[arg(long)]
    no_lidar: bool,

    #[arg(long)]
    no_gps: bool,

    #[arg(long)]
    no_compass: bool,
}

fn main() {
    let args = Args::parse();
    std::process::exit(run(args));
}

fn run(args: Args) -> i32 {
    let drive = match &args.drive_params {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("igvsim: {}: {e}", path.display());
                    return 1;
                }
            };
            match serde_json::from_str(&text) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("igvsim: {}: {e}", path.display());
                    return 1;
                }
            }
        }
        None => igvsim::dynamics::DriveParams::default(),
    };

    let mut channels = Vec::new();
    let mut add = |enabled: bool, kind: ChannelKind, port: Option<u16>| -> Result<(), String> {
        if !enabled {
            return Ok(());
        }
        match port {
            Some(port) => {
                channels.push(ChannelConfig { kind, host: args.host.clone(), port });
                Ok(())
            }
            None => Err(format!("--{0}-port is required unless --no-{0} is given", kind.name())),
        }
    };
    let wiring = add(!args.no_gps, ChannelKind::Gps, args.gps_port)
        .and_then(|()| add(!args.no_compass, ChannelKind::Compass, args.compass_port))
        .and_then(|()| add(!args.no_lidar, ChannelKind::Lidar, args.lidar_port))
        .and_then(|()| add(!args.no_camera, ChannelKind::Camera, args.camera_port));
    if let Err(msg) = wiring {
        eprintln!("igvsim: {msg}");
        return 1;
    }
    channels.push(ChannelConfig {
        kind: ChannelKind::Motor,
        host: args.host.clone(),
        port: args.motor_port,
    });

    let cfg = SimConfig {
        scene_path: args.scene,
        channels,
        tick_rate: args.rate,
        pacing: if args.fast { Pacing::Fast } else { Pacing::Realtime },
        duration: args.duration,
        seed: args.seed,
        drive,
        dump_trajectory: args.dump_trajectory,
        dump_frames: args.dump_frames,
        connect_timeout: args.connect_timeout,
        cmd_timeout: args.cmd_timeout,
        ..SimConfig::default()
    };

    match run_simulation(&cfg) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("igvsim: {e}");
            e.exit_code()
        }
    }
}

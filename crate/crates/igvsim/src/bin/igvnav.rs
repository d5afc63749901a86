//! Demo navigator CLI: listens for the simulator's TCP connections, then
//! runs the reactive control loop (widest-gap following plus camera line
//! bias) until the simulator disconnects.

use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;

use igvsim::client::{serve_and_accept, NavPorts};
use igvsim::nav::{run_control_loop, NavParams};

#[derive(Parser)]
#[command(
    name = "igvnav",
    about = "Demo reactive navigator for the ground-vehicle simulator",
    after_help = "Start igvnav first; it listens on all five ports until the simulator \
                  connects. The process exits cleanly when the simulator goes away."
)]
struct Args {
    #[arg(long, value_name = "N")]
    gps_port: u16,

    #[arg(long, value_name = "N")]
    compass_port: u16,

    #[arg(long, value_name = "N")]
    lidar_port: u16,

    #[arg(long, value_name = "N")]
    camera_port: u16,

    #[arg(long, value_name = "N")]
    motor_port: u16,

    /// Control loop rate, Hz.
    #[arg(long, value_name = "HZ", default_value_t = 20.0)]
    control_rate: f64,

    /// Navigation tuning file (JSON), overriding the built-in defaults.
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Per-cycle CSV log.
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,

    /// Interface to listen on.
    #[arg(long, value_name = "HOST", default_value = "0.0.0.0")]
    bind: String,

    /// Give up waiting for the simulator after this many seconds.
    #[arg(long, value_name = "S", default_value_t = 60.0)]
    accept_timeout: f64,
}

fn main() {
    let args = Args::parse();
    std::process::exit(run(args));
}

fn run(args: Args) -> i32 {
    let params: NavParams = match &args.params {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("igvnav: {}: {e}", path.display());
                    return 1;
                }
            };
            match serde_json::from_str(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("igvnav: {}: {e}", path.display());
                    return 1;
                }
            }
        }
        None => NavParams::default(),
    };

    let ports = NavPorts {
        gps: args.gps_port,
        compass: args.compass_port,
        lidar: args.lidar_port,
        camera: args.camera_port,
        motor: args.motor_port,
    };

    eprintln!("igvnav: listening for the simulator on {} ...", args.bind);
    let channels = match serve_and_accept(
        &args.bind,
        &ports,
        Duration::from_secs_f64(args.accept_timeout),
    ) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("igvnav: {e}");
            return 1;
        }
    };
    eprintln!("igvnav: all channels connected, navigating");

    let mut log_file = match &args.log {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Some(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("igvnav: {}: {e}", path.display());
                return 1;
            }
        },
        None => None,
    };

    let report = run_control_loop(
        &channels.lidar,
        &channels.camera,
        &channels.gps,
        &channels.compass,
        &channels.motor,
        &params,
        args.control_rate,
        log_file.as_mut().map(|f| f as &mut dyn std::io::Write),
        None,
    );
    channels.close_all();

    eprintln!(
        "igvnav: {} cycles, {} commands, last scan #{}{}",
        report.cycles,
        report.commands_sent,
        report.last_lidar_seq,
        if report.channel_closed { ", simulator disconnected" } else { "" },
    );
    0
}

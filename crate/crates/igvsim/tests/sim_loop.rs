//! Simulator loop behavior over real sockets: command draining, isolation
//! from slow consumers, dump determinism, termination conditions.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::time::Duration;

use igvsim::dynamics::MotorCommand;
use igvsim::geom::{Pose, Vec2};
use igvsim::scene::{Barrel, GeoOrigin, Goal, LinePath, Scene, TerrainStyle};
use igvsim::sim::{
    connect_channels, run_connected, run_with_scene, ChannelConfig, Connections, Pacing, SimConfig,
};
use igvsim::wire::{encode_motor, frame_write, ChannelKind};

fn test_scene() -> Scene {
    Scene {
        geo: GeoOrigin { lat0: 42.678, lon0: -83.195 },
        terrain: TerrainStyle { noise_amplitude: 0.0, ..TerrainStyle::default() },
        lines: vec![LinePath {
            points: vec![Vec2::new(0.0, -2.0), Vec2::new(30.0, -2.0)],
            width: 0.1,
            intensity: 1.0,
        }],
        barrels: vec![Barrel { center: Vec2::new(6.0, 1.5), radius: 0.28, height: 1.0 }],
        boxes: vec![],
        spawn: Pose::new(0.0, 0.0, 0.0),
        goal: None,
    }
}

/// Accept one connection and discard bytes forever.
fn sink(listener: TcpListener) {
    std::thread::spawn(move || {
        if let Ok((mut s, _)) = listener.accept() {
            let mut buf = [0u8; 65536];
            while matches!(s.read(&mut buf), Ok(n) if n > 0) {}
        }
    });
}

/// Sensor sinks plus a motor endpoint. Returns the configs, the established
/// simulator-side connections, and the robot-side motor stream for the test
/// to write command frames into before (or during) the run.
fn connected_endpoints() -> (SimConfig, Connections, TcpStream) {
    let mut channels = Vec::new();
    for kind in [ChannelKind::Gps, ChannelKind::Compass, ChannelKind::Lidar, ChannelKind::Camera] {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        channels.push(ChannelConfig {
            kind,
            host: "127.0.0.1".into(),
            port: listener.local_addr().unwrap().port(),
        });
        sink(listener);
    }
    let motor = TcpListener::bind("127.0.0.1:0").unwrap();
    channels.push(ChannelConfig {
        kind: ChannelKind::Motor,
        host: "127.0.0.1".into(),
        port: motor.local_addr().unwrap().port(),
    });
    let accept = std::thread::spawn(move || motor.accept().unwrap().0);
    let conns = connect_channels(&channels, 5.0, true).unwrap();
    let motor_stream = accept.join().unwrap();
    let cfg = SimConfig { channels, pacing: Pacing::Fast, ..SimConfig::default() };
    (cfg, conns, motor_stream)
}

/// Write command frames and give the reader thread time to decode them, so
/// they are drained on the very first tick.
fn preload_commands(stream: &mut TcpStream, cmds: &[MotorCommand]) {
    for cmd in cmds {
        stream.write_all(&frame_write(&encode_motor(cmd)).unwrap()).unwrap();
    }
    std::thread::sleep(Duration::from_millis(120));
}

#[test]
fn duration_gives_exact_tick_count() {
    let (cfg, conns, _motor) = connected_endpoints();
    let cfg = SimConfig { duration: Some(2.0), ..cfg };
    let report = run_connected(&cfg, Arc::new(test_scene()), conns).unwrap();
    assert_eq!(report.ticks, 100);
    assert_eq!(report.sim_time, 2.0);
}

#[test]
fn goal_entry_stops_the_run() {
    let (cfg, conns, mut motor) = connected_endpoints();
    let mut scene = test_scene();
    scene.barrels.clear();
    scene.goal = Some(Goal { center: Vec2::new(1.0, 0.0), radius: 0.5 });
    preload_commands(&mut motor, &[MotorCommand::new(1.0, 0.0)]);
    let cfg = SimConfig { duration: Some(60.0), ..cfg };
    let report = run_connected(&cfg, Arc::new(scene), conns).unwrap();
    let goal_time = report.goal_reached.expect("goal never reached");
    // 0.5 m at ramped speed toward 1 m/s: somewhere around a second.
    assert!(goal_time > 0.3 && goal_time < 3.0, "goal at {goal_time}");
    assert_eq!(report.sim_time, goal_time);
}

#[test]
fn latest_command_in_a_tick_wins_and_is_held() {
    let (cfg, conns, mut motor) = connected_endpoints();
    // Three commands pending before the first tick: only the last may shape
    // the trajectory. Then silence: the command must hold.
    preload_commands(
        &mut motor,
        &[
            MotorCommand::new(1.0, 45.0),
            MotorCommand::new(0.2, -45.0),
            MotorCommand::new(0.5, 0.0),
        ],
    );
    let dump = std::env::temp_dir().join(format!("igvsim_latest_wins_{}.csv", std::process::id()));
    let cfg = SimConfig { duration: Some(1.0), dump_trajectory: Some(dump.clone()), ..cfg };
    let report = run_connected(&cfg, Arc::new(test_scene()), conns).unwrap();
    assert_eq!(report.commands_received, 3);

    let text = std::fs::read_to_string(&dump).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    // cmd_linear_mps holds the last command through the end of the run.
    assert_eq!(cols[7], "0.5");
    assert_eq!(cols[8], "0");
    // Straight line at 0.5 m/s for ~1 s minus the ramp; no turning.
    let x: f64 = cols[2].parse().unwrap();
    let y: f64 = cols[3].parse().unwrap();
    assert!(x > 0.3 && x < 0.5, "x = {x}");
    assert_eq!(y, 0.0);
    std::fs::remove_file(&dump).ok();
}

#[test]
fn command_timeout_zeroes_speeds() {
    let (cfg, conns, mut motor) = connected_endpoints();
    preload_commands(&mut motor, &[MotorCommand::new(1.0, 0.0)]);
    let dump = std::env::temp_dir().join(format!("igvsim_cmd_timeout_{}.csv", std::process::id()));
    let cfg = SimConfig {
        duration: Some(4.0),
        cmd_timeout: Some(1.0),
        dump_trajectory: Some(dump.clone()),
        ..cfg
    };
    run_connected(&cfg, Arc::new(test_scene()), conns).unwrap();

    let text = std::fs::read_to_string(&dump).unwrap();
    let cols: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    // By the end of 4 simulated seconds the watchdog has zeroed the command
    // and the ramp has braked to a stop.
    assert_eq!(cols[7], "0");
    assert_eq!(cols[5], "0");
    std::fs::remove_file(&dump).ok();
}

#[test]
fn malformed_motor_frames_are_skipped_not_fatal() {
    let (cfg, conns, mut motor) = connected_endpoints();
    // NaN linear speed, wrong-size payload, then one valid command.
    let mut nan_payload = f32::NAN.to_le_bytes().to_vec();
    nan_payload.extend_from_slice(&0.0f32.to_le_bytes());
    motor.write_all(&frame_write(&nan_payload).unwrap()).unwrap();
    motor.write_all(&frame_write(&[1, 2, 3]).unwrap()).unwrap();
    motor
        .write_all(&frame_write(&encode_motor(&MotorCommand::new(0.3, 0.0))).unwrap())
        .unwrap();
    std::thread::sleep(Duration::from_millis(120));
    let cfg = SimConfig { duration: Some(1.0), ..cfg };
    let report = run_connected(&cfg, Arc::new(test_scene()), conns).unwrap();
    assert_eq!(report.decode_errors, 2);
    assert_eq!(report.commands_received, 1);
}

#[test]
fn stalled_camera_reader_never_delays_physics() {
    // Camera consumer accepts and then never reads; with drop-oldest queues
    // the loop must still complete every tick at full speed.
    let mut channels = Vec::new();
    for kind in [ChannelKind::Gps, ChannelKind::Compass, ChannelKind::Lidar] {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        channels.push(ChannelConfig {
            kind,
            host: "127.0.0.1".into(),
            port: listener.local_addr().unwrap().port(),
        });
        sink(listener);
    }
    let camera = TcpListener::bind("127.0.0.1:0").unwrap();
    channels.push(ChannelConfig {
        kind: ChannelKind::Camera,
        host: "127.0.0.1".into(),
        port: camera.local_addr().unwrap().port(),
    });
    let stalled = std::thread::spawn(move || {
        let (stream, _) = camera.accept().unwrap();
        std::thread::sleep(Duration::from_secs(20));
        drop(stream);
    });
    let motor = TcpListener::bind("127.0.0.1:0").unwrap();
    channels.push(ChannelConfig {
        kind: ChannelKind::Motor,
        host: "127.0.0.1".into(),
        port: motor.local_addr().unwrap().port(),
    });
    std::thread::spawn(move || {
        let (_stream, _) = motor.accept().unwrap();
        std::thread::sleep(Duration::from_secs(20));
    });

    let cfg = SimConfig {
        channels,
        pacing: Pacing::Fast,
        duration: Some(10.0),
        ..SimConfig::default()
    };
    let started = std::time::Instant::now();
    let report = run_with_scene(&cfg, Arc::new(test_scene())).unwrap();
    assert_eq!(report.ticks, 500);
    // All 100 camera frames were enqueued; once the socket buffers filled,
    // the stalled reader cost drops, not time.
    let camera_stats = report.channels[&ChannelKind::Camera];
    assert_eq!(camera_stats.enqueued, 100);
    assert!(camera_stats.dropped > 0, "dropped {}", camera_stats.dropped);
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "fast mode took {:?}",
        started.elapsed()
    );
    drop(stalled);
}

#[test]
fn dead_camera_channel_keeps_others_streaming() {
    let mut channels = Vec::new();
    for kind in [ChannelKind::Gps, ChannelKind::Compass, ChannelKind::Lidar] {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        channels.push(ChannelConfig {
            kind,
            host: "127.0.0.1".into(),
            port: listener.local_addr().unwrap().port(),
        });
        sink(listener);
    }
    // Camera consumer drops the connection almost immediately.
    let camera = TcpListener::bind("127.0.0.1:0").unwrap();
    channels.push(ChannelConfig {
        kind: ChannelKind::Camera,
        host: "127.0.0.1".into(),
        port: camera.local_addr().unwrap().port(),
    });
    std::thread::spawn(move || {
        let (stream, _) = camera.accept().unwrap();
        std::thread::sleep(Duration::from_millis(50));
        drop(stream);
    });
    let motor = TcpListener::bind("127.0.0.1:0").unwrap();
    channels.push(ChannelConfig {
        kind: ChannelKind::Motor,
        host: "127.0.0.1".into(),
        port: motor.local_addr().unwrap().port(),
    });
    std::thread::spawn(move || {
        let (_stream, _) = motor.accept().unwrap();
        std::thread::sleep(Duration::from_secs(20));
    });

    let cfg = SimConfig {
        channels,
        pacing: Pacing::Realtime,
        duration: Some(2.0),
        ..SimConfig::default()
    };
    let report = run_with_scene(&cfg, Arc::new(test_scene())).unwrap();
    assert_eq!(report.ticks, 100);
    assert!(report.channels[&ChannelKind::Camera].closed_mid_run);
    assert!(!report.channels[&ChannelKind::Lidar].closed_mid_run);
    assert_eq!(report.channels[&ChannelKind::Lidar].enqueued, 20);
    assert_eq!(report.channels[&ChannelKind::Compass].enqueued, 50);
}

#[test]
fn scripted_commands_give_identical_trajectory_files() {
    let run_once = |tag: &str| {
        let (cfg, conns, mut motor) = connected_endpoints();
        preload_commands(&mut motor, &[MotorCommand::new(0.7, 20.0)]);
        let dump =
            std::env::temp_dir().join(format!("igvsim_det_{}_{tag}.csv", std::process::id()));
        let cfg = SimConfig {
            duration: Some(3.0),
            seed: 9,
            dump_trajectory: Some(dump.clone()),
            lidar: igvsim::sensors::LidarConfig {
                noise_std: 0.01,
                ..igvsim::sensors::LidarConfig::default()
            },
            ..cfg
        };
        run_connected(&cfg, Arc::new(test_scene()), conns).unwrap();
        let bytes = std::fs::read(&dump).unwrap();
        std::fs::remove_file(&dump).ok();
        bytes
    };
    assert_eq!(run_once("a"), run_once("b"));
}

#[test]
fn connect_failure_names_the_channel() {
    // Nothing listens on this port (bound and dropped).
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    let dead_port = l.local_addr().unwrap().port();
    drop(l);

    let lidar = TcpListener::bind("127.0.0.1:0").unwrap();
    let channels = vec![
        ChannelConfig {
            kind: ChannelKind::Lidar,
            host: "127.0.0.1".into(),
            port: lidar.local_addr().unwrap().port(),
        },
        ChannelConfig { kind: ChannelKind::Motor, host: "127.0.0.1".into(), port: dead_port },
    ];
    sink(lidar);
    let err = match connect_channels(&channels, 0.3, true) {
        Ok(_) => panic!("connection to a dead port succeeded"),
        Err(e) => e,
    };
    let msg = err.to_string();
    assert!(msg.contains("motor"), "error was: {msg}");
    assert!(!msg.contains("lidar ("), "error was: {msg}");
    assert_eq!(err.exit_code(), 3);
}

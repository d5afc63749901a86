//! Acceptance suite: one criterion per section, run sequentially, one
//! PASS/FAIL line each. Exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p igvsim --test acceptance`.

use std::io::Read;
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use igvsim::client::stub::{NullMotor, RecordingMotor, RecordingSensor, ScriptedSensor};
use igvsim::client::{serve_and_accept, NavPorts};
use igvsim::dynamics::{integrate_unicycle, MotorCommand, RobotState};
use igvsim::geom::{Pose, Ray2, Ray3, Vec2, Vec3};
use igvsim::harness::{run_closed_loop, ClosedLoopConfig};
use igvsim::nav::{run_control_loop, NavParams};
use igvsim::scene::{ground_color_at, load_scene, Barrel, GeoOrigin, Scene, TerrainStyle};
use igvsim::sensors::{
    gps_from_pose, local_from_geodetic, scan_lidar, CameraMount, GpsFix, HeadingReading,
    LidarConfig, LidarScan, METERS_PER_DEG_LAT,
};
use igvsim::sim::{run_with_scene, ChannelConfig, Pacing, SimConfig};
use igvsim::testkit::{march_scene_2d, march_scene_3d, rk4_unicycle, MarchHit3};
use igvsim::wire::{
    decode_camera, decode_compass, decode_gps, decode_lidar, decode_motor, encode_camera,
    encode_compass, encode_gps, encode_lidar, encode_motor, ChannelKind,
};

type Outcome = Result<String, String>;

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("kinematics exactness (quarter arc, 1 vs 1000 steps vs RK4)", c1_kinematics),
        ("raycast oracle equivalence (1000 beams vs 1 mm marching)", c2_raycast_oracle),
        ("wire golden fixtures and round-trip fuzz", c3_wire),
        ("gps scale correctness and inverse mapping", c4_gps_scale),
        ("closed-loop course run (goal, zero contact, byte-identical)", c5_closed_loop),
        ("freshness cadence (exact message counts over 10 s)", c6_freshness),
        ("performance (>= 50x real time, 100 barrels)", c7_performance),
        ("mode-switch seal and replay equivalence", c8_mode_switch),
        ("camera ground truth vs projection oracle", c9_camera_truth),
        ("disconnect tolerance (20 chaos runs)", c10_disconnect),
    ];

    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run)
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  #{:<2} {name} [{elapsed:.2}s] {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL  #{:<2} {name} [{elapsed:.2}s] {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_owned()
    }
}

fn check(cond: bool, why: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.to_owned())
    }
}

fn sample_course_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../courses/sample_course.json")
}

// --- 1 ---------------------------------------------------------------------

fn c1_kinematics() -> Outcome {
    let started = Instant::now();
    let start = Pose::new(0.0, 0.0, 0.0);
    let (v, w) = (1.0, 90.0_f64.to_radians());
    let expected = (2.0 / std::f64::consts::PI, 2.0 / std::f64::consts::PI);

    let single = integrate_unicycle(start, v, w, 1.0);
    let mut stepped = start;
    for _ in 0..1000 {
        stepped = integrate_unicycle(stepped, v, w, 1e-3);
    }
    let rk4 = rk4_unicycle(start, v, w, 1.0, 1e-5);

    for (label, pose) in [("1 step", single), ("1000 steps", stepped), ("rk4", rk4)] {
        check(
            (pose.x - expected.0).abs() < 1e-6 && (pose.y - expected.1).abs() < 1e-6,
            &format!("{label} landed at ({}, {})", pose.x, pose.y),
        )?;
        check(
            (pose.heading - std::f64::consts::FRAC_PI_2).abs() < 1e-6,
            &format!("{label} heading {}", pose.heading),
        )?;
    }
    let elapsed = started.elapsed().as_secs_f64();
    check(elapsed < 1.0, &format!("took {elapsed:.2}s, budget 1s"))?;
    Ok(format!(
        "single vs stepped delta {:.1e} m",
        ((single.x - stepped.x).powi(2) + (single.y - stepped.y).powi(2)).sqrt()
    ))
}

// --- 2 ---------------------------------------------------------------------

fn random_scene(rng: &mut ChaCha8Rng) -> Scene {
    let mut scene = Scene {
        geo: GeoOrigin { lat0: 42.678, lon0: -83.195 },
        terrain: TerrainStyle::default(),
        lines: vec![],
        barrels: vec![],
        boxes: vec![],
        spawn: Pose::new(0.0, 0.0, 0.0),
        goal: None,
    };
    for _ in 0..rng.random_range(0..=20) {
        scene.barrels.push(Barrel {
            center: Vec2::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)),
            radius: rng.random_range(0.1..0.6),
            height: rng.random_range(0.2..1.5),
        });
    }
    for _ in 0..rng.random_range(0..=5) {
        scene.boxes.push(igvsim::scene::BoxObstacle {
            center: Vec2::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)),
            half_extents: Vec2::new(rng.random_range(0.1..1.0), rng.random_range(0.1..1.0)),
            yaw: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            height: rng.random_range(0.2..1.5),
        });
    }
    scene
}

fn c2_raycast_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(422);
    let cfg = LidarConfig { beams: 50, ..LidarConfig::default() };
    let mut beams_checked = 0u32;
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let scene = random_scene(&mut rng);
        let pose = Pose::new(
            rng.random_range(-6.0..6.0),
            rng.random_range(-6.0..6.0),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let state = RobotState { pose, ..RobotState::at_spawn(&scene) };
        let mut noise_rng = ChaCha8Rng::seed_from_u64(0);
        let scan = scan_lidar(&scene, &state, &cfg, &mut noise_rng);

        let origin = pose.position() + pose.forward() * cfg.mount_forward_offset;
        let fov = cfg.fov_deg.to_radians();
        for (i, &range) in scan.ranges.iter().enumerate() {
            let angle = pose.heading - fov / 2.0 + i as f64 * fov / (cfg.beams - 1) as f64;
            let ray = Ray2::from_angle(origin, angle);
            let marched = march_scene_2d(ray, &scene, cfg.mount_height, cfg.max_range)
                .map(|t| t.clamp(cfg.min_range, cfg.max_range))
                .unwrap_or(cfg.max_range);
            let delta = (f64::from(range) - marched).abs();
            worst = worst.max(delta);
            check(
                delta <= 2e-3,
                &format!("beam {i} at {pose:?}: scan {range} vs oracle {marched}"),
            )?;
            beams_checked += 1;
        }
    }
    check(beams_checked == 1000, &format!("checked {beams_checked} beams, wanted 1000"))?;
    let elapsed = started.elapsed().as_secs_f64();
    check(elapsed < 10.0, &format!("took {elapsed:.2}s, budget 10s"))?;
    Ok(format!("1000 beams, worst deviation {:.2} mm", worst * 1e3))
}

// --- 3 ---------------------------------------------------------------------

fn c3_wire() -> Outcome {
    let golden = encode_gps(&GpsFix { lat: 1.0, lon: 2.0 });
    check(
        golden == [0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40],
        &format!("gps golden bytes were {golden:02X?}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(3_000);
    let finite_f32 = |rng: &mut ChaCha8Rng| loop {
        let v = f32::from_bits(rng.random::<u32>());
        if v.is_finite() {
            return f64::from(v);
        }
    };
    for _ in 0..10_000 {
        let gps = GpsFix { lat: finite_f32(&mut rng), lon: finite_f32(&mut rng) };
        check(decode_gps(&encode_gps(&gps)).ok() == Some(gps), "gps round trip")?;

        let compass = HeadingReading { heading_deg: finite_f32(&mut rng) };
        check(
            decode_compass(&encode_compass(&compass)).ok() == Some(compass),
            "compass round trip",
        )?;

        let motor = MotorCommand::new(finite_f32(&mut rng), finite_f32(&mut rng));
        check(decode_motor(&encode_motor(&motor)).ok() == Some(motor), "motor round trip")?;

        let scan = LidarScan {
            ranges: (0..rng.random_range(0..24)).map(|_| rng.random::<f32>()).collect(),
        };
        check(
            decode_lidar(&encode_lidar(&scan).unwrap()).ok().as_ref() == Some(&scan),
            "lidar round trip",
        )?;

        let (w, h) = (rng.random_range(1..6u16), rng.random_range(1..6u16));
        let frame = igvsim::sensors::CameraFrame {
            width: w,
            height: h,
            pixels: (0..usize::from(w) * usize::from(h) * 3).map(|_| rng.random()).collect(),
        };
        check(
            decode_camera(&encode_camera(&frame).unwrap()).ok().as_ref() == Some(&frame),
            "camera round trip",
        )?;
    }
    Ok("golden layout pinned; 10000 fuzz cases per channel kind".into())
}

// --- 4 ---------------------------------------------------------------------

fn c4_gps_scale() -> Outcome {
    let geo = GeoOrigin { lat0: 42.678, lon0: -83.195 };

    let north = gps_from_pose(&Pose::new(0.0, 100.0, 0.0), &geo);
    let want_dlat = 100.0 / METERS_PER_DEG_LAT;
    check(
        (north.lat - geo.lat0 - want_dlat).abs() < 1e-9,
        &format!("dlat {} vs {want_dlat}", north.lat - geo.lat0),
    )?;
    check(north.lon == geo.lon0, "northward motion changed longitude")?;

    let east = gps_from_pose(&Pose::new(100.0, 0.0, 0.0), &geo);
    let want_dlon = 100.0 / (METERS_PER_DEG_LAT * geo.lat0.to_radians().cos());
    check(
        (east.lon - geo.lon0 - want_dlon).abs() < 1e-9,
        &format!("dlon {} vs {want_dlon}", east.lon - geo.lon0),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let p = Vec2::new(rng.random_range(-400.0..400.0), rng.random_range(-400.0..400.0));
        let fix = gps_from_pose(&Pose::new(p.x, p.y, 0.0), &geo);
        let back = local_from_geodetic(&fix, &geo);
        worst = worst.max((back - p).norm());
    }
    check(worst < 1e-6, &format!("inverse mapping error {worst:.2e} m"))?;
    Ok(format!("meters-per-degree pinned at {METERS_PER_DEG_LAT}; inverse error {worst:.1e} m"))
}

// --- 5 ---------------------------------------------------------------------

fn c5_closed_loop() -> Outcome {
    let started = Instant::now();
    let scene = load_scene(&sample_course_path()).map_err(|e| e.to_string())?;
    check(scene.barrels.len() >= 12, &format!("course has {} barrels", scene.barrels.len()))?;
    check(scene.lines.len() == 2, &format!("course has {} lines", scene.lines.len()))?;
    let scene = Arc::new(scene);

    let cfg = ClosedLoopConfig {
        sim: SimConfig { seed: 42, pacing: Pacing::Fast, ..SimConfig::default() },
        max_sim_time: 180.0,
        ..ClosedLoopConfig::default()
    };
    let first = run_closed_loop(Arc::clone(&scene), &cfg);
    let second = run_closed_loop(scene, &cfg);

    let goal = first
        .goal_time
        .ok_or_else(|| format!("goal not reached in {} simulated seconds", first.sim_time))?;
    check(goal <= 180.0, &format!("goal at {goal}s, limit 180s"))?;
    check(first.collision_ticks == 0, &format!("{} collision ticks", first.collision_ticks))?;
    check(
        first.trajectory_csv == second.trajectory_csv,
        "consecutive runs differ byte-for-byte",
    )?;
    let elapsed = started.elapsed().as_secs_f64();
    check(elapsed < 60.0, &format!("took {elapsed:.1}s, budget 60s"))?;
    Ok(format!(
        "goal at {goal} s, 0 contacts, {} identical trajectory bytes",
        first.trajectory_csv.len()
    ))
}

// --- shared TCP helpers ------------------------------------------------------

/// Accept one connection and discard everything it sends.
fn sink(listener: TcpListener) -> std::thread::JoinHandle<()> {
    std::thread::spawn(move || {
        if let Ok((mut s, _)) = listener.accept() {
            let mut buf = [0u8; 65536];
            while matches!(s.read(&mut buf), Ok(n) if n > 0) {}
        }
    })
}

/// Channel configs pointing at fresh localhost sinks for every sensor plus a
/// quiet motor endpoint.
fn sink_channels() -> (Vec<ChannelConfig>, Vec<std::thread::JoinHandle<()>>) {
    let mut channels = Vec::new();
    let mut joins = Vec::new();
    for kind in [ChannelKind::Gps, ChannelKind::Compass, ChannelKind::Lidar, ChannelKind::Camera] {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        joins.push(sink(listener));
        channels.push(ChannelConfig { kind, host: "127.0.0.1".into(), port });
    }
    let motor = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = motor.local_addr().unwrap().port();
    joins.push(std::thread::spawn(move || {
        // Hold the accepted motor socket open without sending.
        if let Ok((_stream, _)) = motor.accept() {
            std::thread::sleep(Duration::from_secs(120));
        }
    }));
    channels.push(ChannelConfig { kind: ChannelKind::Motor, host: "127.0.0.1".into(), port });
    (channels, joins)
}

fn open_field_scene(barrels: usize) -> Scene {
    let mut scene = Scene {
        geo: GeoOrigin { lat0: 42.678, lon0: -83.195 },
        terrain: TerrainStyle::default(),
        lines: vec![igvsim::scene::LinePath {
            points: vec![Vec2::new(0.0, -2.0), Vec2::new(40.0, -2.0)],
            width: 0.1,
            intensity: 1.0,
        }],
        barrels: vec![],
        boxes: vec![],
        spawn: Pose::new(0.0, 0.0, 0.0),
        goal: None,
    };
    for i in 0..barrels {
        let x = 2.0 + (i % 10) as f64 * 4.0 + (i as f64 * 0.37).sin();
        let y = -18.0 + (i / 10) as f64 * 4.0 + (i as f64 * 0.73).cos();
        scene.barrels.push(Barrel { center: Vec2::new(x, y), radius: 0.28, height: 1.0 });
    }
    scene
}

// --- 6 ---------------------------------------------------------------------

fn c6_freshness() -> Outcome {
    let (channels, _joins) = sink_channels();
    let cfg = SimConfig {
        channels,
        pacing: Pacing::Fast,
        duration: Some(10.0),
        ..SimConfig::default()
    };
    let report = run_with_scene(&cfg, Arc::new(open_field_scene(3))).map_err(|e| e.to_string())?;
    let count = |kind: ChannelKind| report.channels[&kind].enqueued;
    for (kind, want) in [
        (ChannelKind::Lidar, 100),
        (ChannelKind::Gps, 100),
        (ChannelKind::Compass, 250),
        (ChannelKind::Camera, 100),
    ] {
        check(
            count(kind) == want,
            &format!("{kind}: {} messages enqueued, wanted exactly {want}", count(kind)),
        )?;
    }
    Ok("lidar 100, gps 100, compass 250, camera 100 over 10 s".into())
}

// --- 7 ---------------------------------------------------------------------

fn c7_performance() -> Outcome {
    let (channels, _joins) = sink_channels();
    let cfg = SimConfig {
        channels,
        pacing: Pacing::Fast,
        duration: Some(10.0),
        ..SimConfig::default()
    };
    let report =
        run_with_scene(&cfg, Arc::new(open_field_scene(100))).map_err(|e| e.to_string())?;
    let factor = report.sim_time / report.wall_time;
    check(factor >= 50.0, &format!("real-time factor {factor:.1}x below the 50x threshold"))?;
    Ok(format!(
        "real-time factor {factor:.1}x (100 barrels, 683-beam lidar @10 Hz, 160x120 camera @10 Hz, physics 50 Hz)"
    ))
}

// --- 8 ---------------------------------------------------------------------

fn c8_mode_switch() -> Outcome {
    let grab = || {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        let p = l.local_addr().unwrap().port();
        drop(l);
        p
    };
    let ports =
        NavPorts { gps: grab(), compass: grab(), lidar: grab(), camera: grab(), motor: grab() };

    // Robot side listens; the simulator dials in and runs a short fast course.
    let accept =
        std::thread::spawn(move || serve_and_accept("127.0.0.1", &ports, Duration::from_secs(20)));
    let sim = std::thread::spawn(move || {
        let cfg = SimConfig {
            channels: [
                (ChannelKind::Gps, ports.gps),
                (ChannelKind::Compass, ports.compass),
                (ChannelKind::Lidar, ports.lidar),
                (ChannelKind::Camera, ports.camera),
                (ChannelKind::Motor, ports.motor),
            ]
            .into_iter()
            .map(|(kind, port)| ChannelConfig { kind, host: "127.0.0.1".into(), port })
            .collect(),
            pacing: Pacing::Fast,
            duration: Some(6.0),
            seed: 42,
            ..SimConfig::default()
        };
        run_with_scene(&cfg, Arc::new(open_field_scene(6)))
    });
    let channels = accept.join().unwrap().map_err(|e| e.to_string())?;

    // (a) Live run through the simulation channels, recording everything the
    // loop consumed and every command it issued.
    let lidar = RecordingSensor::new(&channels.lidar);
    let camera = RecordingSensor::new(&channels.camera);
    let gps = RecordingSensor::new(&channels.gps);
    let compass = RecordingSensor::new(&channels.compass);
    let motor = RecordingMotor::new(&channels.motor);
    let params = NavParams::default();
    let live_report =
        run_control_loop(&lidar, &camera, &gps, &compass, &motor, &params, 20.0, None, None);
    sim.join().unwrap().map_err(|e| e.to_string())?;
    channels.close_all();

    check(live_report.cycles > 10, &format!("only {} live cycles", live_report.cycles))?;
    let live_commands = motor.into_log();

    // (b) The same loop, wired to stubs replaying the recorded stream.
    let lidar_stub = ScriptedSensor::new(lidar.into_log());
    let camera_stub = ScriptedSensor::new(camera.into_log());
    let gps_stub = ScriptedSensor::new(gps.into_log());
    let compass_stub = ScriptedSensor::new(compass.into_log());
    let null = NullMotor;
    let motor_stub = RecordingMotor::new(&null);
    let replay_report = run_control_loop(
        &lidar_stub,
        &camera_stub,
        &gps_stub,
        &compass_stub,
        &motor_stub,
        &params,
        20.0,
        None,
        None,
    );
    let replay_commands = motor_stub.into_log();

    check(
        replay_report.cycles == live_report.cycles,
        &format!("cycles {} live vs {} replay", live_report.cycles, replay_report.cycles),
    )?;
    check(live_commands == replay_commands, "replayed command log differs from the live run")?;
    Ok(format!("{} commands identical across live and replayed runs", live_commands.len()))
}

// --- 9 ---------------------------------------------------------------------

fn c9_camera_truth() -> Outcome {
    let mut scene = open_field_scene(0);
    scene.lines.clear();
    scene.barrels.push(Barrel { center: Vec2::new(3.0, 0.0), radius: 0.28, height: 1.0 });
    let mount = CameraMount {
        offset: [0.0, 0.0, 1.0],
        pitch_deg: 20.0,
        hfov_deg: 60.0,
        width: 160,
        height: 120,
        rate_hz: 10.0,
    };
    let state = RobotState::at_spawn(&scene);
    let frame = igvsim::camera::render_camera(&scene, &state, &mount);

    // Projection oracle: rebuild each center-column ray from first
    // principles and march it at 1 mm.
    let (w, h) = (160.0_f64, 120.0_f64);
    let f_px = (w / 2.0) / (mount.hfov_deg.to_radians() / 2.0).tan();
    let (sp, cp) = mount.pitch_deg.to_radians().sin_cos();
    let u = 80usize;
    let ray_for_row = |v: usize| {
        let x_img = (u as f64 + 0.5) - w / 2.0;
        let y_img = h / 2.0 - (v as f64 + 0.5);
        let dir = Vec3::new(cp, 0.0, -sp) * f_px
            + Vec3::new(0.0, -1.0, 0.0) * x_img
            + Vec3::new(sp, 0.0, cp) * y_img;
        Ray3::new(Vec3::new(0.0, 0.0, 1.0), dir.normalized())
    };
    let mut oracle_rows = Vec::new();
    for v in 0..120 {
        if let MarchHit3::Obstacle(_) = march_scene_3d(ray_for_row(v), &scene, 8.0) {
            oracle_rows.push(v);
        }
    }
    check(!oracle_rows.is_empty(), "oracle predicts no barrel rows at all")?;
    let (first_o, last_o) = (oracle_rows[0], *oracle_rows.last().unwrap());
    check(oracle_rows.len() == last_o - first_o + 1, "oracle rows not contiguous")?;

    let is_barrel = |v: usize| {
        let px = igvsim::camera::pixel(&frame, u, v);
        px == igvsim::camera::BARREL_ORANGE || px == igvsim::camera::BARREL_BAND_WHITE
    };
    let rendered: Vec<usize> = (0..120).filter(|&v| is_barrel(v)).collect();
    check(!rendered.is_empty(), "no barrel pixels rendered in the center column")?;
    let (first_r, last_r) = (rendered[0], *rendered.last().unwrap());
    check(rendered.len() == last_r - first_r + 1, "rendered barrel block not contiguous")?;
    check(
        first_r.abs_diff(first_o) <= 1 && last_r.abs_diff(last_o) <= 1,
        &format!("rendered rows {first_r}..{last_r} vs oracle {first_o}..{last_o}"),
    )?;

    // Within the block, rows whose marched hit height sits clear of the band
    // edges must be exactly barrel orange.
    let mut orange_rows = 0;
    for v in first_r..=last_r {
        if let MarchHit3::Obstacle(t) = march_scene_3d(ray_for_row(v), &scene, 8.0) {
            let rel = ray_for_row(v).at(t).z / 1.0;
            let near_band = [(0.30, 0.45), (0.60, 0.75)]
                .iter()
                .any(|&(lo, hi)| rel > lo - 0.02 && rel < hi + 0.02);
            if !near_band {
                check(
                    igvsim::camera::pixel(&frame, u, v) == igvsim::camera::BARREL_ORANGE,
                    &format!("row {v} (rel height {rel:.2}) not barrel orange"),
                )?;
                orange_rows += 1;
            }
        }
    }
    check(orange_rows > 10, &format!("only {orange_rows} clear orange rows"))?;

    // Remove the barrel: the same pixels must equal ground_color_at exactly
    // (or sky where the ray clears the horizon).
    let mut empty = scene.clone();
    empty.barrels.clear();
    let bare = igvsim::camera::render_camera(&empty, &state, &mount);
    for v in first_r..=last_r {
        let px = igvsim::camera::pixel(&bare, u, v);
        match igvsim::geom::ray_ground(ray_for_row(v)) {
            Some(p) => check(
                px == ground_color_at(&empty, p.xy()),
                &format!("row {v}: ground pixel differs from ground_color_at"),
            )?,
            None => check(px == igvsim::camera::SKY_BLUE, &format!("row {v}: expected sky"))?,
        }
    }

    Ok(format!(
        "barrel rows {first_r}..{last_r} match oracle {first_o}..{last_o}; ground delegation exact"
    ))
}

// --- 10 --------------------------------------------------------------------

fn c10_disconnect() -> Outcome {
    let igvsim_bin = env!("CARGO_BIN_EXE_igvsim");
    let igvnav_bin = env!("CARGO_BIN_EXE_igvnav");
    let course = sample_course_path();

    let grab = || {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        let p = l.local_addr().unwrap().port();
        drop(l);
        p
    };

    for round in 0..20 {
        let kill_sim = round % 2 == 0;
        let (gps, compass, lidar, camera, motor) = (grab(), grab(), grab(), grab(), grab());
        let mut nav = std::process::Command::new(igvnav_bin)
            .args([
                "--gps-port", &gps.to_string(),
                "--compass-port", &compass.to_string(),
                "--lidar-port", &lidar.to_string(),
                "--camera-port", &camera.to_string(),
                "--motor-port", &motor.to_string(),
                "--bind", "127.0.0.1",
            ])
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .spawn()
            .map_err(|e| format!("spawn igvnav: {e}"))?;
        let mut sim = std::process::Command::new(igvsim_bin)
            .args([
                "--scene", course.to_str().unwrap(),
                "--host", "127.0.0.1",
                "--gps-port", &gps.to_string(),
                "--compass-port", &compass.to_string(),
                "--lidar-port", &lidar.to_string(),
                "--camera-port", &camera.to_string(),
                "--motor-port", &motor.to_string(),
                "--fast",
                "--duration", "45",
                "--seed", "42",
            ])
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .spawn()
            .map_err(|e| format!("spawn igvsim: {e}"))?;

        std::thread::sleep(Duration::from_millis(300 + (round as u64) * 20));
        let (victim, survivor, survivor_name) = if kill_sim {
            (&mut sim, &mut nav, "igvnav")
        } else {
            (&mut nav, &mut sim, "igvsim")
        };
        let _ = victim.kill();
        let _ = victim.wait();

        // The survivor must exit cleanly on its own: igvnav when its channels
        // close, igvsim when its run completes.
        let deadline = Instant::now() + Duration::from_secs(40);
        let status = loop {
            if let Some(status) = survivor.try_wait().map_err(|e| e.to_string())? {
                break status;
            }
            if Instant::now() > deadline {
                let _ = survivor.kill();
                return Err(format!("round {round}: {survivor_name} hung after peer death"));
            }
            std::thread::sleep(Duration::from_millis(20));
        };
        check(status.success(), &format!("round {round}: {survivor_name} exited with {status}"))?;
    }
    Ok("20 chaos rounds, zero crashes, clean survivor exits".into())
}

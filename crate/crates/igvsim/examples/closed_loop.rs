//! Full closed loop in one process: the simulator core drives the demo
//! navigator through the bundled course, deterministically. The same pairing
//! runs over TCP via the igvsim and igvnav binaries; this harness exists for
//! reproducible experiments (identical trajectory bytes on every run).
//!
//! ```text
//! cargo run --example closed_loop [-- path/to/course.json]
//! ```

use std::sync::Arc;

use igvsim::harness::{run_closed_loop, ClosedLoopConfig};
use igvsim::scene::load_scene;
use igvsim::sim::SimConfig;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        format!("{}/../../courses/sample_course.json", env!("CARGO_MANIFEST_DIR"))
    });
    let scene = load_scene(std::path::Path::new(&path)).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });

    let cfg = ClosedLoopConfig {
        sim: SimConfig { seed: 42, ..SimConfig::default() },
        max_sim_time: 180.0,
        ..ClosedLoopConfig::default()
    };
    let result = run_closed_loop(Arc::new(scene), &cfg);

    // Print the trajectory at one-second intervals.
    let text = String::from_utf8(result.trajectory_csv.clone()).unwrap();
    println!("{:>6} {:>9} {:>9} {:>9} {:>7}", "t [s]", "x [m]", "y [m]", "heading", "v [m/s]");
    for line in text.lines().skip(1).step_by(50) {
        let c: Vec<&str> = line.split(',').collect();
        println!(
            "{:>6.1} {:>9.3} {:>9.3} {:>9.3} {:>7.3}",
            c[1].parse::<f64>().unwrap(),
            c[2].parse::<f64>().unwrap(),
            c[3].parse::<f64>().unwrap(),
            c[4].parse::<f64>().unwrap(),
            c[5].parse::<f64>().unwrap(),
        );
    }

    println!();
    match result.goal_time {
        Some(t) => println!("goal reached at {t} simulated seconds"),
        None => println!("goal not reached within {} simulated seconds", result.sim_time),
    }
    println!(
        "{} ticks, {} collision ticks, {} navigator commands, final pose ({:.2}, {:.2})",
        result.ticks,
        result.collision_ticks,
        result.commands.len(),
        result.final_pose.0,
        result.final_pose.1
    );
}

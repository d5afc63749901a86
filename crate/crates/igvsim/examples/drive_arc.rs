//! The motion model in isolation: command a quarter-circle arc and compare
//! the stepped trajectory against the closed-form endpoint.
//!
//! ```text
//! cargo run --example drive_arc
//! ```

use igvsim::dynamics::{integrate_unicycle, step_world, DriveParams, MotorCommand, RobotState};
use igvsim::geom::Pose;
use igvsim::scene::parse_scene;

fn main() {
    // 1 m/s with 90 deg/s turns a quarter circle per second of travel.
    let (v, w_degps) = (1.0_f64, 90.0_f64);

    let exact = integrate_unicycle(Pose::new(0.0, 0.0, 0.0), v, w_degps.to_radians(), 1.0);
    println!("closed-form endpoint after 1 s: ({:.6}, {:.6}) heading {:.6} rad", exact.x, exact.y, exact.heading);
    println!("analytic (2/pi, 2/pi, pi/2):    ({:.6}, {:.6}) heading {:.6} rad\n",
        2.0 / std::f64::consts::PI, 2.0 / std::f64::consts::PI, std::f64::consts::FRAC_PI_2);

    // The same maneuver through the full tick pipeline, with the ramp
    // starting from rest.
    let scene = parse_scene(
        r#"{"geo": {"lat0": 42.678, "lon0": -83.195},
            "spawn": {"x": 0.0, "y": 0.0, "heading_deg": 0.0}}"#,
    )
    .unwrap();
    let params = DriveParams::default();
    let mut state = RobotState::at_spawn(&scene);
    state.commanded = MotorCommand::new(v, w_degps);

    println!("tick pipeline at 50 Hz (velocity ramp included):");
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "t [s]", "x [m]", "y [m]", "heading", "v [m/s]");
    for tick in 1..=100 {
        state = step_world(&state, &scene, &params, 0.02);
        if tick % 20 == 0 {
            println!(
                "{:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>8.3}",
                tick as f64 * 0.02,
                state.pose.x,
                state.pose.y,
                state.pose.heading,
                state.v
            );
        }
    }
}

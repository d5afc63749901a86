//! The tangent-plane geodetic mapping: local meters to latitude/longitude
//! and back.
//!
//! ```text
//! cargo run --example gps_mapping
//! ```

use igvsim::geom::Pose;
use igvsim::scene::GeoOrigin;
use igvsim::sensors::{
    compass_from_pose, gps_from_pose, local_from_geodetic, METERS_PER_DEG_LAT,
};

fn main() {
    let geo = GeoOrigin { lat0: 42.678, lon0: -83.195 };
    println!("anchor: lat {} lon {}", geo.lat0, geo.lon0);
    println!("meters per degree of latitude: {METERS_PER_DEG_LAT}\n");

    println!(
        "{:>8} {:>8} | {:>16} {:>16} | {:>12}",
        "x [m]", "y [m]", "lat [deg]", "lon [deg]", "inverse err"
    );
    for (x, y) in [(0.0, 0.0), (0.0, 10.0), (10.0, 0.0), (100.0, 100.0), (-250.0, 40.0)] {
        let fix = gps_from_pose(&Pose::new(x, y, 0.0), &geo);
        let back = local_from_geodetic(&fix, &geo);
        println!(
            "{x:>8.1} {y:>8.1} | {:>16.9} {:>16.9} | {:>10.2e} m",
            fix.lat,
            fix.lon,
            ((back.x - x).powi(2) + (back.y - y).powi(2)).sqrt()
        );
    }

    println!("\ncompass convention (degrees clockwise from true north):");
    for (name, heading) in [
        ("east", 0.0_f64),
        ("north", 90.0),
        ("west", 180.0),
        ("south", -90.0),
    ] {
        let reading = compass_from_pose(&Pose::new(0.0, 0.0, heading.to_radians()));
        println!("  facing {name:<5} (internal {heading:>6.1} deg) -> compass {:>5.1} deg", reading.heading_deg);
    }
}

//! One LIDAR sweep from the spawn pose, rendered as an ASCII polar plot.
//!
//! ```text
//! cargo run --example lidar_scan [-- path/to/course.json]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use igvsim::dynamics::RobotState;
use igvsim::scene::load_scene;
use igvsim::sensors::{scan_lidar, LidarConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        format!("{}/../../courses/sample_course.json", env!("CARGO_MANIFEST_DIR"))
    });
    let scene = load_scene(std::path::Path::new(&path)).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });

    let cfg = LidarConfig::default();
    let state = RobotState::at_spawn(&scene);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let scan = scan_lidar(&scene, &state, &cfg, &mut rng);

    // Top-down occupancy view: robot at the center, one cell per 0.4 m.
    let (cells_x, cells_y) = (29i32, 29i32);
    let cell = 0.4;
    let mut grid = vec![vec![' '; cells_x as usize]; cells_y as usize];
    let fov = cfg.fov_deg.to_radians();
    for (i, &r) in scan.ranges.iter().enumerate() {
        if f64::from(r) >= cfg.max_range {
            continue;
        }
        let angle = state.pose.heading - fov / 2.0 + i as f64 * fov / (cfg.beams - 1) as f64;
        let x = f64::from(r) * angle.cos();
        let y = f64::from(r) * angle.sin();
        let cx = (x / cell).round() as i32 + cells_x / 2;
        let cy = cells_y / 2 - (y / cell).round() as i32;
        if (0..cells_x).contains(&cx) && (0..cells_y).contains(&cy) {
            grid[cy as usize][cx as usize] = '#';
        }
    }
    grid[(cells_y / 2) as usize][(cells_x / 2) as usize] = '>';

    println!(
        "{} beams over {} deg, range {}..{} m, robot '>' facing {:.1} deg (east = 0)",
        cfg.beams,
        cfg.fov_deg,
        cfg.min_range,
        cfg.max_range,
        state.pose.heading.to_degrees()
    );
    for row in grid {
        println!("{}", row.into_iter().collect::<String>());
    }

    let hits = scan.ranges.iter().filter(|&&r| f64::from(r) < cfg.max_range).count();
    let nearest = scan.ranges.iter().cloned().fold(f32::INFINITY, f32::min);
    println!("{hits} beams returned; nearest obstacle at {nearest:.2} m");
}

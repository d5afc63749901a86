//! Parse a course file, validate it, and sample some ground colors.
//!
//! ```text
//! cargo run --example scene_tour [-- path/to/course.json]
//! ```

use igvsim::geom::Vec2;
use igvsim::scene::{ground_color_at, load_scene, serialize_scene, validate_scene};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        format!("{}/../../courses/sample_course.json", env!("CARGO_MANIFEST_DIR"))
    });
    let scene = match load_scene(std::path::Path::new(&path)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };

    let violations = validate_scene(&scene);
    println!("course: {path}");
    println!(
        "anchor: lat {} lon {} | spawn ({}, {}) heading {:.1} deg",
        scene.geo.lat0,
        scene.geo.lon0,
        scene.spawn.x,
        scene.spawn.y,
        scene.spawn.heading.to_degrees()
    );
    println!(
        "{} lines, {} barrels, {} boxes, goal: {:?}",
        scene.lines.len(),
        scene.barrels.len(),
        scene.boxes.len(),
        scene.goal
    );
    if violations.is_empty() {
        println!("validation: ok");
    } else {
        println!("validation found {} problem(s):", violations.len());
        for v in &violations {
            println!("  - {v}");
        }
    }

    // Ground colors across the spawn area: paint shows up as bright pixels.
    println!("\nground colors on a 1 m grid around the spawn (R,G,B):");
    for dy in (-3..=3).rev() {
        let mut row = String::new();
        for dx in 0..=6 {
            let p = Vec2::new(scene.spawn.x + f64::from(dx), scene.spawn.y + f64::from(dy));
            let c = ground_color_at(&scene, p);
            row.push_str(&format!("({:>3},{:>3},{:>3}) ", c[0], c[1], c[2]));
        }
        println!("{row}");
    }

    // Round-trip check: serializing and re-parsing reproduces the scene.
    let round = igvsim::scene::parse_scene(&serialize_scene(&scene)).unwrap();
    println!("\nserialize/parse round-trip identical: {}", round == scene);
}

//! Render the robot's camera view from the spawn pose and write it as a
//! binary PPM (viewable with most image tools).
//!
//! ```text
//! cargo run --example camera_snapshot [-- path/to/course.json [out.ppm]]
//! ```

use igvsim::camera::render_camera;
use igvsim::dynamics::RobotState;
use igvsim::scene::load_scene;
use igvsim::sensors::CameraMount;
use igvsim::sim::write_ppm;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| {
        format!("{}/../../courses/sample_course.json", env!("CARGO_MANIFEST_DIR"))
    });
    let out = args.next().unwrap_or_else(|| "camera_snapshot.ppm".into());

    let scene = load_scene(std::path::Path::new(&path)).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    let state = RobotState::at_spawn(&scene);
    let mount = CameraMount::default();
    let frame = render_camera(&scene, &state, &mount);
    write_ppm(std::path::Path::new(&out), &frame).unwrap();

    println!(
        "{}x{} frame from ({:.1}, {:.1}, {:.1}) pitched {} deg down, hfov {} deg -> {out}",
        frame.width, frame.height, mount.offset[0], mount.offset[1], mount.offset[2],
        mount.pitch_deg, mount.hfov_deg
    );

    // Quick look without an image viewer: downsample to ASCII luminance.
    let (w, h) = (usize::from(frame.width), usize::from(frame.height));
    let ramp = [' ', '.', ':', '+', '*', '#', '@'];
    for v in (0..h).step_by(h / 24) {
        let mut row = String::new();
        for u in (0..w).step_by(w / 64) {
            let at = (v * w + u) * 3;
            let lum = (u32::from(frame.pixels[at])
                + u32::from(frame.pixels[at + 1])
                + u32::from(frame.pixels[at + 2]))
                / 3;
            row.push(ramp[(lum as usize * (ramp.len() - 1)) / 255]);
        }
        println!("{row}");
    }
}

//! Hex dumps of the wire protocol, matching the fixtures in PROTOCOL.md.
//!
//! ```text
//! cargo run --example wire_frames
//! ```

use igvsim::dynamics::MotorCommand;
use igvsim::sensors::{CameraFrame, GpsFix, HeadingReading, LidarScan};
use igvsim::wire::{
    encode_camera, encode_compass, encode_gps, encode_lidar, encode_motor, frame_write,
};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02X}")).collect::<Vec<_>>().join(" ")
}

fn show(name: &str, payload: Vec<u8>) {
    let framed = frame_write(&payload).unwrap();
    println!("{name}");
    println!("  payload ({:>3} bytes): {}", payload.len(), hex(&payload));
    println!("  framed  ({:>3} bytes): {}", framed.len(), hex(&framed[..framed.len().min(40)]));
    println!();
}

fn main() {
    println!("all integers and floats little-endian; frames are a u32 length prefix\n");

    show("gps fix (lat 1.0, lon 2.0) - f32 lat at offset 0, f32 lon at offset 4",
        encode_gps(&GpsFix { lat: 1.0, lon: 2.0 }));
    show("compass heading 90 deg - one f32",
        encode_compass(&HeadingReading { heading_deg: 90.0 }));
    show("lidar scan, 2 beams [1.0, 5.6] m - u32 count then f32 ranges",
        encode_lidar(&LidarScan { ranges: vec![1.0, 5.6] }).unwrap());
    show("motor command (0.5 m/s, -15 deg/s) - f32 linear, f32 angular",
        encode_motor(&MotorCommand::new(0.5, -15.0)));

    let frame = CameraFrame { width: 2, height: 2, pixels: vec![
        214, 80, 20,  235, 235, 225,
        70, 110, 58,  170, 200, 235,
    ]};
    show("camera frame 2x2 - u16 width, u16 height, then RGB8 rows top-first",
        encode_camera(&frame).unwrap());
}

//! Trajectory CSV and camera frame dumps.

use std::io::{self, Write};
use std::path::Path;

use crate::dynamics::RobotState;
use crate::sensors::CameraFrame;

pub const TRAJECTORY_HEADER: &str =
    "tick,sim_time_s,x_m,y_m,heading_rad,v_mps,w_radps,cmd_linear_mps,cmd_angular_degps,collided";

/// Writes one CSV row per tick. Float fields use shortest-roundtrip
/// formatting, so the file is a pure function of the simulated states.
pub struct TrajectoryWriter<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        Ok(TrajectoryWriter { out })
    }

    pub fn write_row(&mut self, tick: u64, sim_time: f64, state: &RobotState) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{},{}",
            tick,
            sim_time,
            state.pose.x,
            state.pose.y,
            state.pose.heading,
            state.v,
            state.w,
            state.commanded.linear_mps,
            state.commanded.angular_degps,
            u8::from(state.collided),
        )
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Write a camera frame as binary PPM (P6).
pub fn write_ppm(path: &Path, frame: &CameraFrame) -> io::Result<()> {
    let mut out = io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "P6\n{} {}\n255\n", frame.width, frame.height)?;
    out.write_all(&frame.pixels)?;
    out.flush()
}

/// Frame dump filename for the n-th camera emission.
pub fn frame_filename(index: u64) -> String {
    format!("frame_{index:06}.ppm")
}

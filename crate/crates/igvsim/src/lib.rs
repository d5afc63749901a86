//! Headless, deterministic simulator for an IGVC-style ground vehicle.
//!
//! The simulator owns a geo-referenced obstacle course and a skid-steer
//! robot, runs a fixed-timestep loop, and streams simulated sensor data
//! (LIDAR, GPS, compass, camera) over one TCP connection per channel to an
//! external navigation process, which sends motor commands back. A client
//! SDK mirrors the robot-side abstractions so the same navigation loop runs
//! against simulated or stub sensors without modification.
//!
//! # Layout
//!
//! - [`scene`] - course data model, JSON file format, ground paint/grass colors
//! - [`geom`] - ray/primitive intersection kernels used by LIDAR and camera
//! - [`dynamics`] - velocity ramp, exact unicycle arcs, contact resolution
//! - [`sensors`] - sensor measurement models and update scheduling
//! - [`camera`] - software-rasterized pinhole camera
//! - [`wire`] - length-prefixed framing and bit-exact payload codecs (see
//!   `PROTOCOL.md` at the repository root)
//! - [`sim`] - simulator runtime: connection manager, tick loop, dumps
//! - [`client`] - navigation-side SDK: sensor/motor abstractions, TCP
//!   channel servers, stubs
//! - [`nav`] - demo reactive navigator (gap following plus camera line bias)
//! - [`harness`] - deterministic in-process closed loop for tests and demos
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example scene_tour        # parse + validate a course file
//! cargo run --example drive_arc         # kinematics of the motion model
//! cargo run --example lidar_scan        # one lidar sweep, ASCII rendering
//! cargo run --example camera_snapshot   # render the camera view to PPM
//! cargo run --example gps_mapping       # tangent-plane geodetic mapping
//! cargo run --example wire_frames       # hex dumps of the wire protocol
//! cargo run --example closed_loop       # full sensor->navigate->motor loop
//! ```
//!
//! The `igvsim` binary runs the simulator against a listening robot process;
//! `igvnav` is the demo navigator. See the README for the two-terminal
//! walkthrough.

pub mod dynamics;
pub mod client;
pub mod geom;
pub mod harness;
pub mod camera;
pub mod noise;
pub mod scene;
pub mod wire;
pub mod nav;
pub mod sensors;
pub mod sim;

#[cfg(feature = "testkit")]
pub mod testkit;

//! Bit-exact wire protocol: length-prefixed framing plus per-channel payload
//! codecs. The byte layouts are normative and documented with golden
//! fixtures in `PROTOCOL.md` at the repository root.
//!
//! Everything is little-endian. A frame is a 4-byte unsigned payload length
//! followed by the payload; payloads are fixed layouts of IEEE-754 singles
//! and unsigned integers. Decoders fail soft: malformed bytes produce an
//! error value, never a crash or a partial value.

use std::io::Read;

use crate::dynamics::MotorCommand;
use crate::sensors::{CameraFrame, GpsFix, HeadingReading, LidarScan};

/// Upper bound on a frame payload, bytes.
pub const MAX_PAYLOAD: usize = 16 * 1024 * 1024;

/// The five per-sensor TCP channels. Motor is the only client-to-simulator
/// channel; the rest stream simulator-to-client.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Gps,
    Compass,
    Lidar,
    Camera,
    Motor,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Gps,
        ChannelKind::Compass,
        ChannelKind::Lidar,
        ChannelKind::Camera,
        ChannelKind::Motor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Gps => "gps",
            ChannelKind::Compass => "compass",
            ChannelKind::Lidar => "lidar",
            ChannelKind::Camera => "camera",
            ChannelKind::Motor => "motor",
        }
    }

    /// True for the one channel that flows from the robot software to the
    /// simulator.
    pub fn is_client_to_sim(self) -> bool {
        self == ChannelKind::Motor
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("payload of {0} bytes exceeds the {MAX_PAYLOAD} byte frame limit")]
    Oversize(usize),
    #[error("frame declares illegal length {0}")]
    BadLength(u32),
    #[error("stream ended mid-frame")]
    Truncated,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{kind} payload of {got} bytes, expected {expected}")]
    WrongSize { kind: ChannelKind, expected: usize, got: usize },
    #[error("motor command contains a non-finite float")]
    NonFinite,
    #[error("camera payload header disagrees with pixel buffer size")]
    CameraSizeMismatch,
    #[error("lidar beam count does not fit the wire format")]
    LidarTooLong,
}

/// Prefix `payload` with its 4-byte little-endian length.
pub fn frame_write(payload: &[u8]) -> Result<Vec<u8>, WireError> {
    if payload.is_empty() || payload.len() > MAX_PAYLOAD {
        return Err(WireError::Oversize(payload.len()));
    }
    let mut out = Vec::with_capacity(4 + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(payload);
    Ok(out)
}

/// Read exactly one frame payload from a byte stream, however the bytes are
/// chunked. Blocks until the frame is complete. End-of-stream before the
/// first length byte reports `Truncated` as well, so callers distinguish a
/// clean shutdown by having stopped calling.
pub fn frame_read<R: Read>(stream: &mut R) -> Result<Vec<u8>, WireError> {
    let mut len_buf = [0u8; 4];
    read_exact_or_truncated(stream, &mut len_buf)?;
    let len = u32::from_le_bytes(len_buf);
    if len == 0 || len as usize > MAX_PAYLOAD {
        return Err(WireError::BadLength(len));
    }
    let mut payload = vec![0u8; len as usize];
    read_exact_or_truncated(stream, &mut payload)?;
    Ok(payload)
}

fn read_exact_or_truncated<R: Read>(stream: &mut R, buf: &mut [u8]) -> Result<(), WireError> {
    match stream.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(WireError::Truncated),
        Err(e) => Err(WireError::Io(e)),
    }
}

/// A decoded payload of any channel.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Gps(GpsFix),
    Compass(HeadingReading),
    Lidar(LidarScan),
    Camera(CameraFrame),
    Motor(MotorCommand),
}

// Per-channel layouts. GPS deliberately matches the client listing that
// reads a float at offset 0 (lat) and offset 4 (lon).

pub fn encode_gps(fix: &GpsFix) -> Vec<u8> {
    let mut out = Vec::with_capacity(8);
    out.extend_from_slice(&(fix.lat as f32).to_le_bytes());
    out.extend_from_slice(&(fix.lon as f32).to_le_bytes());
    out
}

pub fn decode_gps(bytes: &[u8]) -> Result<GpsFix, WireError> {
    let b: &[u8; 8] = bytes
        .try_into()
        .map_err(|_| WireError::WrongSize { kind: ChannelKind::Gps, expected: 8, got: bytes.len() })?;
    Ok(GpsFix {
        lat: f64::from(f32::from_le_bytes(b[0..4].try_into().unwrap())),
        lon: f64::from(f32::from_le_bytes(b[4..8].try_into().unwrap())),
    })
}

pub fn encode_compass(reading: &HeadingReading) -> Vec<u8> {
    (reading.heading_deg as f32).to_le_bytes().to_vec()
}

pub fn decode_compass(bytes: &[u8]) -> Result<HeadingReading, WireError> {
    let b: &[u8; 4] = bytes.try_into().map_err(|_| WireError::WrongSize {
        kind: ChannelKind::Compass,
        expected: 4,
        got: bytes.len(),
    })?;
    Ok(HeadingReading { heading_deg: f64::from(f32::from_le_bytes(*b)) })
}

pub fn encode_lidar(scan: &LidarScan) -> Result<Vec<u8>, WireError> {
    let n: u32 = scan.ranges.len().try_into().map_err(|_| WireError::LidarTooLong)?;
    if 4 + scan.ranges.len() * 4 > MAX_PAYLOAD {
        return Err(WireError::LidarTooLong);
    }
    let mut out = Vec::with_capacity(4 + scan.ranges.len() * 4);
    out.extend_from_slice(&n.to_le_bytes());
    for r in &scan.ranges {
        out.extend_from_slice(&r.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_lidar(bytes: &[u8]) -> Result<LidarScan, WireError> {
    if bytes.len() < 4 {
        return Err(WireError::WrongSize { kind: ChannelKind::Lidar, expected: 4, got: bytes.len() });
    }
    let n = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let expected = 4 + n * 4;
    if bytes.len() != expected {
        return Err(WireError::WrongSize { kind: ChannelKind::Lidar, expected, got: bytes.len() });
    }
    let ranges = bytes[4..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(LidarScan { ranges })
}

pub fn encode_camera(frame: &CameraFrame) -> Result<Vec<u8>, WireError> {
    let expected = usize::from(frame.width) * usize::from(frame.height) * 3;
    if frame.pixels.len() != expected {
        return Err(WireError::CameraSizeMismatch);
    }
    if 4 + expected > MAX_PAYLOAD {
        return Err(WireError::Oversize(4 + expected));
    }
    let mut out = Vec::with_capacity(4 + expected);
    out.extend_from_slice(&frame.width.to_le_bytes());
    out.extend_from_slice(&frame.height.to_le_bytes());
    out.extend_from_slice(&frame.pixels);
    Ok(out)
}

pub fn decode_camera(bytes: &[u8]) -> Result<CameraFrame, WireError> {
    if bytes.len() < 4 {
        return Err(WireError::WrongSize { kind: ChannelKind::Camera, expected: 4, got: bytes.len() });
    }
    let width = u16::from_le_bytes(bytes[0..2].try_into().unwrap());
    let height = u16::from_le_bytes(bytes[2..4].try_into().unwrap());
    let expected = 4 + usize::from(width) * usize::from(height) * 3;
    if bytes.len() != expected {
        return Err(WireError::WrongSize { kind: ChannelKind::Camera, expected, got: bytes.len() });
    }
    Ok(CameraFrame { width, height, pixels: bytes[4..].to_vec() })
}

pub fn encode_motor(cmd: &MotorCommand) -> Vec<u8> {
    let mut out = Vec::with_capacity(8);
    out.extend_from_slice(&(cmd.linear_mps as f32).to_le_bytes());
    out.extend_from_slice(&(cmd.angular_degps as f32).to_le_bytes());
    out
}

/// Motor commands carry actuator authority, so non-finite floats are decode
/// errors: the simulator keeps the previous command instead.
pub fn decode_motor(bytes: &[u8]) -> Result<MotorCommand, WireError> {
    let b: &[u8; 8] = bytes.try_into().map_err(|_| WireError::WrongSize {
        kind: ChannelKind::Motor,
        expected: 8,
        got: bytes.len(),
    })?;
    let linear = f32::from_le_bytes(b[0..4].try_into().unwrap());
    let angular = f32::from_le_bytes(b[4..8].try_into().unwrap());
    if !linear.is_finite() || !angular.is_finite() {
        return Err(WireError::NonFinite);
    }
    Ok(MotorCommand { linear_mps: f64::from(linear), angular_degps: f64::from(angular) })
}

/// Encode any payload for its channel.
pub fn encode_payload(payload: &Payload) -> Result<Vec<u8>, WireError> {
    Ok(match payload {
        Payload::Gps(v) => encode_gps(v),
        Payload::Compass(v) => encode_compass(v),
        Payload::Lidar(v) => encode_lidar(v)?,
        Payload::Camera(v) => encode_camera(v)?,
        Payload::Motor(v) => encode_motor(v),
    })
}

/// Decode a payload of a known channel kind.
pub fn decode_payload(kind: ChannelKind, bytes: &[u8]) -> Result<Payload, WireError> {
    Ok(match kind {
        ChannelKind::Gps => Payload::Gps(decode_gps(bytes)?),
        ChannelKind::Compass => Payload::Compass(decode_compass(bytes)?),
        ChannelKind::Lidar => Payload::Lidar(decode_lidar(bytes)?),
        ChannelKind::Camera => Payload::Camera(decode_camera(bytes)?),
        ChannelKind::Motor => Payload::Motor(decode_motor(bytes)?),
    })
}

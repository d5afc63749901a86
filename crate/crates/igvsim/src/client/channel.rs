//! Simulation-backed sensor and motor channels.
//!
//! The robot side opens one TCP listener per channel and waits for the
//! simulator to dial in. Each sensor connection then runs a frame-read loop
//! that hands every complete payload - exactly one hook call per wire frame -
//! to a decoder feeding a latest-value cell. Malformed payloads are counted,
//! logged once, and skipped; they can never poison the cell or kill the
//! process. A sudden simulator disconnect marks the channel closed and the
//! robot code keeps running.

use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use super::{Latest, LatestCell, MotorController, Sensor};
use crate::dynamics::MotorCommand;
use crate::sensors::{CameraFrame, GpsFix, HeadingReading, LidarScan};
use crate::wire::{
    decode_camera, decode_compass, decode_gps, decode_lidar, encode_motor, frame_read,
    frame_write, ChannelKind, WireError,
};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("{kind} port {port}: {source}")]
    Bind { kind: ChannelKind, port: u16, source: std::io::Error },
    #[error("simulator never connected to: {}", .0.iter().map(|k| k.name()).collect::<Vec<_>>().join(", "))]
    AcceptTimeout(Vec<ChannelKind>),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One accepted simulator connection with its frame-read loop. The message
/// hook is invoked once per complete frame payload, never with partial or
/// concatenated bytes; building a new sensor type is just a new hook.
pub struct SimulationChannel {
    stream: TcpStream,
    reader: Option<JoinHandle<()>>,
}

impl SimulationChannel {
    pub fn spawn<F, C>(stream: TcpStream, mut on_message: F, on_close: C) -> SimulationChannel
    where
        F: FnMut(&[u8]) + Send + 'static,
        C: FnOnce() + Send + 'static,
    {
        let mut read_half = stream.try_clone().expect("clone tcp stream");
        let reader = std::thread::Builder::new()
            .name("igvnav-channel-reader".into())
            .spawn(move || {
                loop {
                    match frame_read(&mut read_half) {
                        Ok(payload) => on_message(&payload),
                        Err(_) => break,
                    }
                }
                on_close();
            })
            .expect("spawn channel reader");
        SimulationChannel { stream, reader: Some(reader) }
    }

    fn shutdown(&mut self) {
        let _ = self.stream.shutdown(std::net::Shutdown::Both);
        if let Some(reader) = self.reader.take() {
            let _ = reader.join();
        }
    }
}

impl Drop for SimulationChannel {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// A sensor fed by one simulation channel: decoded values land in a
/// latest-value cell with replace semantics.
pub struct SimulationSensor<T: Clone> {
    kind: ChannelKind,
    cell: Arc<LatestCell<T>>,
    channel: std::sync::Mutex<Option<SimulationChannel>>,
    malformed: Arc<AtomicU64>,
}

impl<T: Clone + Send + Sync + 'static> SimulationSensor<T> {
    pub fn spawn(
        kind: ChannelKind,
        stream: TcpStream,
        decode: fn(&[u8]) -> Result<T, WireError>,
    ) -> SimulationSensor<T> {
        let cell = Arc::new(LatestCell::new());
        let malformed = Arc::new(AtomicU64::new(0));
        let channel = {
            let cell = Arc::clone(&cell);
            let close_cell = Arc::clone(&cell);
            let malformed = Arc::clone(&malformed);
            SimulationChannel::spawn(
                stream,
                move |payload| match decode(payload) {
                    Ok(value) => cell.publish(value),
                    Err(e) => {
                        if malformed.fetch_add(1, Ordering::Relaxed) == 0 {
                            eprintln!("[{kind}] malformed payload skipped: {e}");
                        }
                    }
                },
                move || close_cell.mark_closed(),
            )
        };
        SimulationSensor {
            kind,
            cell,
            channel: std::sync::Mutex::new(Some(channel)),
            malformed,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Malformed payloads seen so far.
    pub fn malformed_count(&self) -> u64 {
        self.malformed.load(Ordering::Relaxed)
    }
}

impl<T: Clone + Send + Sync + 'static> Sensor<T> for SimulationSensor<T> {
    fn latest(&self) -> Latest<T> {
        self.cell.read()
    }

    fn wait_fresh(&self, last_seq: u64, timeout: Duration) -> Latest<T> {
        self.cell.wait_fresh(last_seq, timeout)
    }

    fn close(&self) {
        if let Some(mut channel) = self.channel.lock().unwrap().take() {
            channel.shutdown();
        }
        self.cell.mark_closed();
    }
}

impl<T: Clone> Drop for SimulationSensor<T> {
    fn drop(&mut self) {
        self.cell.mark_closed();
    }
}

/// Motor command channel back to the simulator.
pub struct SimulationMotor {
    stream: std::sync::Mutex<Option<TcpStream>>,
    closed: AtomicBool,
}

impl SimulationMotor {
    fn new(stream: TcpStream) -> SimulationMotor {
        SimulationMotor { stream: std::sync::Mutex::new(Some(stream)), closed: AtomicBool::new(false) }
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::Acquire)
    }
}

impl MotorController for SimulationMotor {
    fn set_speeds(&self, linear_mps: f64, angular_degps: f64) {
        if self.closed.load(Ordering::Acquire) {
            return;
        }
        let cmd = MotorCommand::new(linear_mps, angular_degps);
        let framed = frame_write(&encode_motor(&cmd)).expect("motor frame is tiny");
        let mut guard = self.stream.lock().unwrap();
        if let Some(stream) = guard.as_mut() {
            if stream.write_all(&framed).is_err() {
                eprintln!("[motor] connection lost; commands now dropped");
                self.closed.store(true, Ordering::Release);
                *guard = None;
            }
        }
    }

    fn close(&self) {
        if let Some(stream) = self.stream.lock().unwrap().take() {
            let _ = stream.shutdown(std::net::Shutdown::Both);
        }
        self.closed.store(true, Ordering::Release);
    }
}

/// TCP ports the robot software listens on, one per channel.
#[derive(Clone, Copy, Debug)]
pub struct NavPorts {
    pub gps: u16,
    pub compass: u16,
    pub lidar: u16,
    pub camera: u16,
    pub motor: u16,
}

impl NavPorts {
    fn entries(&self) -> [(ChannelKind, u16); 5] {
        [
            (ChannelKind::Gps, self.gps),
            (ChannelKind::Compass, self.compass),
            (ChannelKind::Lidar, self.lidar),
            (ChannelKind::Camera, self.camera),
            (ChannelKind::Motor, self.motor),
        ]
    }
}

/// All five live channels after the simulator has connected.
pub struct NavChannels {
    pub gps: SimulationSensor<GpsFix>,
    pub compass: SimulationSensor<HeadingReading>,
    pub lidar: SimulationSensor<LidarScan>,
    pub camera: SimulationSensor<CameraFrame>,
    pub motor: SimulationMotor,
}

impl NavChannels {
    /// Whether every sensor channel has reported closed.
    pub fn all_closed(&self) -> bool {
        self.gps.latest().is_closed()
            && self.compass.latest().is_closed()
            && self.lidar.latest().is_closed()
            && self.camera.latest().is_closed()
    }

    pub fn close_all(&self) {
        self.gps.close();
        self.compass.close();
        self.lidar.close();
        self.camera.close();
        self.motor.close();
    }
}

/// Open listeners on every configured port, then wait for the simulator to
/// connect to each. Returns once all five channels are live, or an error
/// naming the port that could not be bound / the channels that never
/// connected within the timeout.
pub fn serve_and_accept(
    bind_host: &str,
    ports: &NavPorts,
    accept_timeout: Duration,
) -> Result<NavChannels, ClientError> {
    let mut listeners = Vec::new();
    for (kind, port) in ports.entries() {
        let listener = TcpListener::bind((bind_host, port))
            .map_err(|source| ClientError::Bind { kind, port, source })?;
        listener.set_nonblocking(true)?;
        listeners.push((kind, listener));
    }

    let deadline = Instant::now() + accept_timeout;
    let mut accepted: Vec<(ChannelKind, TcpStream)> = Vec::new();
    while accepted.len() < listeners.len() {
        let mut progress = false;
        for (kind, listener) in &listeners {
            if accepted.iter().any(|(k, _)| k == kind) {
                continue;
            }
            match listener.accept() {
                Ok((stream, _)) => {
                    stream.set_nonblocking(false)?;
                    stream.set_nodelay(true).ok();
                    accepted.push((*kind, stream));
                    progress = true;
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {}
                Err(e) => return Err(ClientError::Io(e)),
            }
        }
        if accepted.len() == listeners.len() {
            break;
        }
        if Instant::now() >= deadline {
            let missing = listeners
                .iter()
                .map(|(k, _)| *k)
                .filter(|k| !accepted.iter().any(|(a, _)| a == k))
                .collect();
            return Err(ClientError::AcceptTimeout(missing));
        }
        if !progress {
            std::thread::sleep(Duration::from_millis(2));
        }
    }

    let mut take = |kind: ChannelKind| {
        let at = accepted.iter().position(|(k, _)| *k == kind).unwrap();
        accepted.swap_remove(at).1
    };
    Ok(NavChannels {
        gps: SimulationSensor::spawn(ChannelKind::Gps, take(ChannelKind::Gps), decode_gps),
        compass: SimulationSensor::spawn(
            ChannelKind::Compass,
            take(ChannelKind::Compass),
            decode_compass,
        ),
        lidar: SimulationSensor::spawn(ChannelKind::Lidar, take(ChannelKind::Lidar), decode_lidar),
        camera: SimulationSensor::spawn(
            ChannelKind::Camera,
            take(ChannelKind::Camera),
            decode_camera,
        ),
        motor: SimulationMotor::new(take(ChannelKind::Motor)),
    })
}

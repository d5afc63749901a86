//! Simulator-side connection management: one outbound TCP connection per
//! sensor channel plus the inbound motor channel.
//!
//! The robot software listens; the simulator dials out. Sensor channels each
//! get a writer thread fed from a bounded drop-oldest queue, so a slow or
//! stalled reader can never hold up the tick loop. The motor channel gets a
//! reader thread that decodes frames as they arrive and parks valid commands
//! for the next tick to drain; malformed frames are counted and skipped. A
//! channel that dies mid-run is marked closed and the simulation continues.

use std::collections::HashMap;
use std::io::Write;
use std::net::TcpStream;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use super::queue::BoundedQueue;
use super::{ChannelConfig, SimError};
use crate::dynamics::MotorCommand;
use crate::wire::{decode_motor, frame_read, frame_write, ChannelKind};

/// Queue depth per channel: camera frames are big and stale ones worthless,
/// everything else gets a little more slack.
fn queue_depth(kind: ChannelKind) -> usize {
    match kind {
        ChannelKind::Camera => 2,
        _ => 16,
    }
}

pub struct OutboundChannel {
    pub kind: ChannelKind,
    queue: Arc<BoundedQueue<Vec<u8>>>,
    closed: Arc<AtomicBool>,
    writer: Option<JoinHandle<()>>,
    stream: TcpStream,
}

impl OutboundChannel {
    fn spawn(kind: ChannelKind, stream: TcpStream) -> OutboundChannel {
        let queue = Arc::new(BoundedQueue::<Vec<u8>>::new(queue_depth(kind)));
        let closed = Arc::new(AtomicBool::new(false));
        let writer = {
            let queue = Arc::clone(&queue);
            let closed = Arc::clone(&closed);
            let mut stream = stream.try_clone().expect("clone tcp stream");
            std::thread::Builder::new()
                .name(format!("igvsim-{kind}-writer"))
                .spawn(move || {
                    while let Some(payload) = queue.pop_blocking() {
                        let framed = match frame_write(&payload) {
                            Ok(f) => f,
                            Err(_) => continue,
                        };
                        if stream.write_all(&framed).is_err() {
                            closed.store(true, Ordering::Release);
                            queue.close();
                            break;
                        }
                    }
                })
                .expect("spawn writer thread")
        };
        OutboundChannel { kind, queue, closed, writer: Some(writer), stream }
    }

    /// Enqueue an encoded payload; returns false if the channel has died.
    pub fn send(&self, payload: Vec<u8>) -> bool {
        if self.closed.load(Ordering::Acquire) {
            return false;
        }
        self.queue.push_drop_oldest(payload)
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::Acquire)
    }

    pub fn dropped(&self) -> u64 {
        self.queue.dropped()
    }

    fn shutdown(&mut self) {
        // Socket first: a writer blocked on a stalled peer must see the
        // shutdown error, or the join below would wait on it.
        let _ = self.stream.shutdown(std::net::Shutdown::Both);
        self.queue.close();
        if let Some(writer) = self.writer.take() {
            let _ = writer.join();
        }
    }
}

impl Drop for OutboundChannel {
    fn drop(&mut self) {
        self.shutdown();
    }
}

pub struct MotorChannel {
    inbox: Arc<Mutex<Vec<MotorCommand>>>,
    closed: Arc<AtomicBool>,
    invalid: Arc<AtomicU64>,
    reader: Option<JoinHandle<()>>,
    stream: TcpStream,
}

impl MotorChannel {
    fn spawn(stream: TcpStream) -> MotorChannel {
        let inbox = Arc::new(Mutex::new(Vec::new()));
        let closed = Arc::new(AtomicBool::new(false));
        let invalid = Arc::new(AtomicU64::new(0));
        let reader = {
            let inbox = Arc::clone(&inbox);
            let closed = Arc::clone(&closed);
            let invalid = Arc::clone(&invalid);
            let mut stream = stream.try_clone().expect("clone tcp stream");
            std::thread::Builder::new()
                .name("igvsim-motor-reader".into())
                .spawn(move || loop {
                    match frame_read(&mut stream) {
                        Ok(payload) => match decode_motor(&payload) {
                            Ok(cmd) => inbox.lock().unwrap().push(cmd),
                            Err(_) => {
                                invalid.fetch_add(1, Ordering::Relaxed);
                            }
                        },
                        Err(_) => {
                            closed.store(true, Ordering::Release);
                            break;
                        }
                    }
                })
                .expect("spawn motor reader")
        };
        MotorChannel { inbox, closed, invalid, reader: Some(reader), stream }
    }

    /// Take every command that arrived since the last drain, in order.
    pub fn drain(&self) -> Vec<MotorCommand> {
        std::mem::take(&mut self.inbox.lock().unwrap())
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::Acquire)
    }

    pub fn invalid_frames(&self) -> u64 {
        self.invalid.load(Ordering::Relaxed)
    }

    fn shutdown(&mut self) {
        let _ = self.stream.shutdown(std::net::Shutdown::Both);
        if let Some(reader) = self.reader.take() {
            let _ = reader.join();
        }
    }
}

impl Drop for MotorChannel {
    fn drop(&mut self) {
        self.shutdown();
    }
}

/// Live connection set, one entry per configured channel.
pub struct Connections {
    pub outbound: HashMap<ChannelKind, OutboundChannel>,
    pub motor: Option<MotorChannel>,
}

impl Connections {
    /// No channels at all; the loop then simulates without streaming.
    pub fn disconnected() -> Connections {
        Connections { outbound: HashMap::new(), motor: None }
    }

    pub fn channel(&self, kind: ChannelKind) -> Option<&OutboundChannel> {
        self.outbound.get(&kind)
    }
}

/// Dial every configured channel. The robot side must already be listening;
/// connection attempts are retried until `connect_timeout` elapses (a single
/// attempt per channel when `reconnect` is off). Returns only when every
/// channel is connected, otherwise an error naming each channel that failed.
pub fn connect_channels(
    channels: &[ChannelConfig],
    connect_timeout: f64,
    reconnect: bool,
) -> Result<Connections, SimError> {
    let deadline = Instant::now() + Duration::from_secs_f64(connect_timeout.max(0.0));
    let mut conns = Connections::disconnected();
    let mut failed = Vec::new();

    for ch in channels {
        let addr = format!("{}:{}", ch.host, ch.port);
        let mut last_err = String::new();
        let stream = loop {
            match TcpStream::connect(&addr) {
                Ok(s) => break Some(s),
                Err(e) => {
                    last_err = e.to_string();
                    if !reconnect || Instant::now() >= deadline {
                        break None;
                    }
                    std::thread::sleep(Duration::from_millis(50));
                }
            }
        };
        match stream {
            Some(stream) => {
                stream.set_nodelay(true).ok();
                if ch.kind.is_client_to_sim() {
                    conns.motor = Some(MotorChannel::spawn(stream));
                } else {
                    conns.outbound.insert(ch.kind, OutboundChannel::spawn(ch.kind, stream));
                }
            }
            None => failed.push((ch.kind, format!("{addr}: {last_err}"))),
        }
    }

    if failed.is_empty() {
        Ok(conns)
    } else {
        Err(SimError::Connect { failed })
    }
}

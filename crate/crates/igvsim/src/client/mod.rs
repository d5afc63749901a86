//! Navigation-side SDK.
//!
//! Navigation code talks to two small capability traits, [`Sensor`] and
//! [`MotorController`], never to a concrete transport. The simulation-backed
//! implementations in [`channel`] listen for the simulator's TCP connections
//! and decode frames into latest-value cells; the stand-ins in [`stub`]
//! replay recorded streams. Swapping one for the other requires no change to
//! the control loop, which is what lets the same navigation logic run in
//! simulation or on hardware.

pub mod channel;
pub mod stub;

pub use channel::{serve_and_accept, NavChannels, NavPorts, SimulationChannel, SimulationMotor, SimulationSensor};

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

/// The newest reading available on a channel, without waiting.
#[derive(Clone, Debug, PartialEq)]
pub enum Latest<T> {
    /// Nothing received yet.
    Pending,
    /// Most recent decoded value; `seq` strictly increases per message.
    Fresh { value: T, seq: u64 },
    /// Channel closed; the final reading, if any, remains available.
    Closed { last: Option<(T, u64)> },
}

impl<T> Latest<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Latest::Fresh { value, .. } => Some(value),
            Latest::Closed { last: Some((value, _)) } => Some(value),
            _ => None,
        }
    }

    pub fn seq(&self) -> Option<u64> {
        match self {
            Latest::Fresh { seq, .. } => Some(*seq),
            Latest::Closed { last: Some((_, seq)) } => Some(*seq),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Latest::Closed { .. })
    }
}

/// Read side of a sensor channel. `latest` never blocks; intermediate
/// readings are deliberately droppable, navigation wants the freshest state.
pub trait Sensor<T: Clone> {
    fn latest(&self) -> Latest<T>;

    /// Wait until a reading newer than `last_seq` arrives, the channel
    /// closes, or the timeout elapses; then report the current latest.
    fn wait_fresh(&self, last_seq: u64, timeout: Duration) -> Latest<T> {
        let deadline = Instant::now() + timeout;
        loop {
            let current = self.latest();
            match &current {
                Latest::Closed { .. } => return current,
                Latest::Fresh { seq, .. } if *seq > last_seq => return current,
                _ => {}
            }
            if Instant::now() >= deadline {
                return current;
            }
            std::thread::sleep(Duration::from_millis(1));
        }
    }

    /// Release the channel. Idempotent.
    fn close(&self);
}

/// Command side of the robot: desired speeds, callable at any rate, last
/// call wins.
pub trait MotorController {
    fn set_speeds(&self, linear_mps: f64, angular_degps: f64);

    /// Release the channel. Idempotent.
    fn close(&self);
}

struct CellState<T> {
    value: Option<(T, u64)>,
    next_seq: u64,
    closed: bool,
}

/// Single-slot latest-value cell with replace semantics: one writer
/// publishes, any reader snapshots without blocking.
pub struct LatestCell<T> {
    state: Mutex<CellState<T>>,
    fresh: Condvar,
}

impl<T: Clone> LatestCell<T> {
    pub fn new() -> Self {
        LatestCell {
            state: Mutex::new(CellState { value: None, next_seq: 1, closed: false }),
            fresh: Condvar::new(),
        }
    }

    pub fn publish(&self, value: T) {
        let mut state = self.state.lock().unwrap();
        let seq = state.next_seq;
        state.next_seq += 1;
        state.value = Some((value, seq));
        drop(state);
        self.fresh.notify_all();
    }

    pub fn mark_closed(&self) {
        self.state.lock().unwrap().closed = true;
        self.fresh.notify_all();
    }

    pub fn read(&self) -> Latest<T> {
        let state = self.state.lock().unwrap();
        match (&state.value, state.closed) {
            (_, true) => Latest::Closed { last: state.value.clone() },
            (Some((value, seq)), false) => Latest::Fresh { value: value.clone(), seq: *seq },
            (None, false) => Latest::Pending,
        }
    }

    pub fn wait_fresh(&self, last_seq: u64, timeout: Duration) -> Latest<T> {
        let deadline = Instant::now() + timeout;
        let mut state = self.state.lock().unwrap();
        loop {
            if state.closed {
                return Latest::Closed { last: state.value.clone() };
            }
            if let Some((value, seq)) = &state.value {
                if *seq > last_seq {
                    return Latest::Fresh { value: value.clone(), seq: *seq };
                }
            }
            let now = Instant::now();
            if now >= deadline {
                return match &state.value {
                    Some((value, seq)) => Latest::Fresh { value: value.clone(), seq: *seq },
                    None => Latest::Pending,
                };
            }
            let (guard, _) = self.fresh.wait_timeout(state, deadline - now).unwrap();
            state = guard;
        }
    }
}

impl<T: Clone> Default for LatestCell<T> {
    fn default() -> Self {
        LatestCell::new()
    }
}

//! Stand-in sensor and motor implementations.
//!
//! These fill the "physical hardware" slot of the class hierarchy for tests
//! and replay: a control loop wired to them compiles and runs with zero
//! changes, which is the point of the abstraction. `ScriptedSensor` replays
//! a recorded stream of readings; the recording wrappers capture exactly
//! what a live loop consumed so the stream can be replayed later.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use super::{Latest, MotorController, Sensor};
use crate::dynamics::MotorCommand;

/// Replays a prerecorded sequence of readings: every `latest` or
/// `wait_fresh` call consumes the next entry, and an exhausted script reads
/// as a closed channel.
pub struct ScriptedSensor<T: Clone> {
    script: Mutex<VecDeque<Latest<T>>>,
}

impl<T: Clone> ScriptedSensor<T> {
    pub fn new(script: Vec<Latest<T>>) -> ScriptedSensor<T> {
        ScriptedSensor { script: Mutex::new(script.into()) }
    }

    fn next(&self) -> Latest<T> {
        self.script
            .lock()
            .unwrap()
            .pop_front()
            .unwrap_or(Latest::Closed { last: None })
    }
}

impl<T: Clone> Sensor<T> for ScriptedSensor<T> {
    fn latest(&self) -> Latest<T> {
        self.next()
    }

    fn wait_fresh(&self, _last_seq: u64, _timeout: Duration) -> Latest<T> {
        self.next()
    }

    fn close(&self) {}
}

/// Forwards to an inner sensor while logging every reading handed out.
pub struct RecordingSensor<'a, T: Clone, S: Sensor<T>> {
    inner: &'a S,
    log: Mutex<Vec<Latest<T>>>,
}

impl<'a, T: Clone, S: Sensor<T>> RecordingSensor<'a, T, S> {
    pub fn new(inner: &'a S) -> Self {
        RecordingSensor { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn into_log(self) -> Vec<Latest<T>> {
        self.log.into_inner().unwrap()
    }
}

impl<T: Clone, S: Sensor<T>> Sensor<T> for RecordingSensor<'_, T, S> {
    fn latest(&self) -> Latest<T> {
        let reading = self.inner.latest();
        self.log.lock().unwrap().push(reading.clone());
        reading
    }

    fn wait_fresh(&self, last_seq: u64, timeout: Duration) -> Latest<T> {
        let reading = self.inner.wait_fresh(last_seq, timeout);
        self.log.lock().unwrap().push(reading.clone());
        reading
    }

    fn close(&self) {
        self.inner.close();
    }
}

/// Discards commands; the replay-side motor.
#[derive(Default)]
pub struct NullMotor;

impl MotorController for NullMotor {
    fn set_speeds(&self, _linear_mps: f64, _angular_degps: f64) {}
    fn close(&self) {}
}

/// Forwards to an inner motor controller while logging every command.
pub struct RecordingMotor<'a, M: MotorController> {
    inner: &'a M,
    log: Mutex<Vec<MotorCommand>>,
}

impl<'a, M: MotorController> RecordingMotor<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        RecordingMotor { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn into_log(self) -> Vec<MotorCommand> {
        self.log.into_inner().unwrap()
    }
}

impl<M: MotorController> MotorController for RecordingMotor<'_, M> {
    fn set_speeds(&self, linear_mps: f64, angular_degps: f64) {
        self.log.lock().unwrap().push(MotorCommand::new(linear_mps, angular_degps));
        self.inner.set_speeds(linear_mps, angular_degps);
    }

    fn close(&self) {
        self.inner.close();
    }
}

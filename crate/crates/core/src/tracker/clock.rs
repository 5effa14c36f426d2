//! Monotonic time sources. Production uses [`SystemClock`]; tests inject
//! [`ManualClock`] or [`StepClock`] to make durations and flush schedules
//! deterministic.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

/// Cooperative stop flag a waiting thread can block on.
#[derive(Default)]
pub struct StopSignal {
    stopped: Mutex<bool>,
    cv: Condvar,
}

impl StopSignal {
    pub fn stop(&self) {
        *self.stopped.lock() = true;
        self.cv.notify_all();
    }

    pub fn is_stopped(&self) -> bool {
        *self.stopped.lock()
    }

    /// Blocks for at most `timeout`; returns true if stopped.
    pub fn wait_timeout(&self, timeout: Duration) -> bool {
        let mut stopped = self.stopped.lock();
        if !*stopped {
            self.cv.wait_for(&mut stopped, timeout);
        }
        *stopped
    }
}

pub trait Clock: Send + Sync {
    /// Microseconds since an arbitrary fixed origin.
    fn now_us(&self) -> u64;

    /// Blocks until the clock reads at least `deadline_us`. Returns false if
    /// `stop` fired first.
    fn wait_until(&self, deadline_us: u64, stop: &StopSignal) -> bool;
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now_us(&self) -> u64 {
        self.origin.elapsed().as_micros() as u64
    }

    fn wait_until(&self, deadline_us: u64, stop: &StopSignal) -> bool {
        loop {
            let now = self.now_us();
            if now >= deadline_us {
                return !stop.is_stopped();
            }
            if stop.wait_timeout(Duration::from_micros(deadline_us - now)) {
                return false;
            }
        }
    }
}

const POLL: Duration = Duration::from_millis(2);

fn poll_until(read: impl Fn() -> u64, deadline_us: u64, stop: &StopSignal) -> bool {
    loop {
        if stop.is_stopped() {
            return false;
        }
        if read() >= deadline_us {
            return true;
        }
        if stop.wait_timeout(POLL) {
            return false;
        }
    }
}

/// A clock that only moves when told to.
#[derive(Default)]
pub struct ManualClock {
    now: AtomicU64,
}

impl ManualClock {
    pub fn new(start_us: u64) -> Self {
        ManualClock { now: AtomicU64::new(start_us) }
    }

    pub fn advance(&self, by: Duration) {
        self.now.fetch_add(by.as_micros() as u64, Ordering::SeqCst);
    }

    pub fn set(&self, us: u64) {
        self.now.store(us, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now_us(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }

    fn wait_until(&self, deadline_us: u64, stop: &StopSignal) -> bool {
        poll_until(|| self.now_us(), deadline_us, stop)
    }
}

/// Every reading advances the clock by the next delta of a repeating
/// schedule, so reading `k` (0-based) returns `start + deltas[0] + ... + deltas[k]`.
pub struct StepClock {
    start: u64,
    deltas: Vec<u64>,
    reads: AtomicUsize,
    now: Mutex<u64>,
}

impl StepClock {
    pub fn new(start_us: u64, deltas: Vec<u64>) -> Self {
        assert!(!deltas.is_empty(), "step schedule must not be empty");
        StepClock {
            start: start_us,
            deltas,
            reads: AtomicUsize::new(0),
            now: Mutex::new(start_us),
        }
    }

    pub fn reads(&self) -> usize {
        self.reads.load(Ordering::SeqCst)
    }

    pub fn start(&self) -> u64 {
        self.start
    }
}

impl Clock for StepClock {
    fn now_us(&self) -> u64 {
        let mut now = self.now.lock();
        let k = self.reads.fetch_add(1, Ordering::SeqCst);
        *now += self.deltas[k % self.deltas.len()];
        *now
    }

    fn wait_until(&self, deadline_us: u64, stop: &StopSignal) -> bool {
        poll_until(|| *self.now.lock(), deadline_us, stop)
    }
}

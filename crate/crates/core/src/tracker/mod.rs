//! Provenance capture runtime.

pub mod clock;
pub mod config;
mod session;

pub use clock::{Clock, ManualClock, StepClock, StopSignal, SystemClock};
pub use config::{FlushPolicy, TrackingConfig, CONFIG_ENV};
pub use session::{AgentContext, IoEvent, Session, UNTRACKED};

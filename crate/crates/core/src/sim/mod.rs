//! Deterministic discrete-event simulation of a connected master/slave pair
//! and of a single-radio receiver listening to it.
//!
//! Time is an integer count of microseconds. There is no clock drift: the
//! victim and the receiver share one timebase.

mod connection;
mod radio;

pub use connection::{
    ConnectionEventRecord, LossModel, MapGenerator, MapUpdateSchedule, VictimConnection,
};
pub use radio::{PacketObservation, Radio, Role, SimRadio};

use thiserror::Error;

use crate::afh::AfhError;

/// Inter-frame spacing between the master packet and the slave reply.
pub const T_IFS_US: u64 = 150;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid connection: {0}")]
    Params(#[source] AfhError),
    #[error("map update schedule: {0}")]
    Schedule(String),
    #[error("loss probability {0} for channel {1} outside [0, 1]")]
    LossProbability(f64, u8),
    #[error("cannot tune to channel {0}: {1}")]
    Tune(u8, #[source] AfhError),
    #[error("retune latency {latency_us} us exceeds half the connection interval ({limit_us} us)")]
    RetuneLatency { latency_us: u64, limit_us: u64 },
}

/// Monotone simulation clock in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimClock {
    now: u64,
}

impl SimClock {
    pub fn now(self) -> u64 {
        self.now
    }

    /// Moves forward to `t`; earlier instants are ignored.
    pub fn advance_to(&mut self, t: u64) {
        self.now = self.now.max(t);
    }
}

/// Line-oriented event log: `anchor_us,channel,master_lost,slave_lost`.
pub fn format_event_log(records: &[ConnectionEventRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.anchor_us, r.channel, r.master_lost as u8, r.slave_lost as u8
        ));
    }
    out
}

/// Line-oriented observation log: `time_us,channel,aa_hex,role`.
pub fn format_observation_log(observations: &[PacketObservation]) -> String {
    let mut out = String::new();
    for o in observations {
        out.push_str(&format!(
            "{},{},{:08x},{}\n",
            o.time_us, o.channel, o.access_address, o.role
        ));
    }
    out
}

//! Simulation of BLE long-lived connections and a single-radio sniffer that
//! recovers their adaptive-frequency-hopping parameters from the air.
//!
//! - [`afh`]: channel selection arithmetic shared by victim and sniffer.
//! - [`sim`]: deterministic victim connection and receiver front end.
//! - [`sniffer`]: interval, increment and map recovery, then follow mode.
//! - [`harness`]: scenarios, seeded trials, the follow-mode comparator and reports.

pub mod afh;
pub mod harness;
pub mod sim;
pub mod sniffer;

use std::collections::HashSet;

use rayon::prelude::*;

use super::{HarnessError, Scenario, TrialSetup};
use crate::afh::{remap, select_next_channel, ChannelMap, HopState};
use crate::sim::{Radio, Role, SimRadio, VictimConnection};
use crate::sniffer::{Sniffer, SnifferError, Stage};

/// Derived value of one parameter against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamOutcome<T> {
    pub truth: T,
    pub derived: Option<T>,
    /// Connection events spent deriving it; `None` if never derived.
    pub hops: Option<u64>,
}

impl<T: PartialEq> ParamOutcome<T> {
    pub fn correct(&self) -> bool {
        self.derived.as_ref() == Some(&self.truth)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u32,
    pub c_int: ParamOutcome<u64>,
    pub h_inc: ParamOutcome<u8>,
    /// Truth is the map in force when the map derivation completed.
    pub c_map: ParamOutcome<ChannelMap>,
    pub packets_expected: u32,
    pub packets_captured: u32,
    pub resync_count: u32,
    /// Time the sniffer first reached follow mode.
    pub lock_us: Option<u64>,
    pub data_start_us: u64,
    pub failure: Option<String>,
}

impl TrialResult {
    pub fn capture_pct(&self) -> f64 {
        if self.packets_expected == 0 {
            0.0
        } else {
            100.0 * self.packets_captured as f64 / self.packets_expected as f64
        }
    }

    /// Events from the start of sniffing until all three parameters were known.
    pub fn total_hops(&self) -> Option<u64> {
        Some(self.c_int.hops? + self.h_inc.hops? + self.c_map.hops?)
    }
}

fn build_radio(s: &Scenario, setup: &TrialSetup) -> Result<SimRadio, HarnessError> {
    let conn = VictimConnection::new(
        setup.params.clone(),
        setup.schedule.clone(),
        setup.loss.clone(),
        setup.sim_seed,
    )?
    .with_first_anchor(setup.first_anchor_us);
    Ok(SimRadio::new(conn).with_retune_latency(s.retune_latency_us)?)
}

struct Acquisition {
    sniffer: Sniffer,
    radio: SimRadio,
    error: Option<SnifferError>,
    deadline_us: u64,
}

fn acquire(s: &Scenario, setup: &TrialSetup) -> Result<Acquisition, HarnessError> {
    let mut radio = build_radio(s, setup)?;
    let mut sniffer = Sniffer::new(s.sniffer.clone(), setup.params.access_address)?;
    let deadline_us = radio.now() + s.hop_budget * setup.params.c_int_us as u64;
    let error = sniffer.acquire(&mut radio, deadline_us).err();
    Ok(Acquisition {
        sniffer,
        radio,
        error,
        deadline_us,
    })
}

fn data_start(s: &Scenario, acq: &Acquisition) -> u64 {
    s.data_start_us
        .or_else(|| acq.sniffer.entered(Stage::Following))
        .unwrap_or(acq.deadline_us)
}

/// Event indices carrying the data burst that starts at `start_us`.
fn data_events(s: &Scenario, conn: &VictimConnection, start_us: u64) -> Vec<u64> {
    (0..s.packet_count as u64)
        .map(|i| conn.event_at_or_after(start_us + i * s.send_period_us))
        .collect()
}

fn count_captured(radio: &SimRadio, events: &[u64]) -> u32 {
    let heard: HashSet<u64> = radio
        .log()
        .iter()
        .filter(|o| o.role == Role::Master)
        .map(|o| o.time_us)
        .collect();
    let conn = radio.connection();
    events
        .iter()
        .filter(|&&i| heard.contains(&conn.anchor_of(i)))
        .count() as u32
}

/// Full pipeline against a fresh simulation: interval, increment, map, then
/// follow mode across the data burst.
pub fn run_trial(s: &Scenario, trial: u32) -> Result<TrialResult, HarnessError> {
    let setup = s.setup(trial)?;
    let mut acq = acquire(s, &setup)?;
    let c_true = setup.params.c_int_us as u64;
    let start = acq.sniffer.entered(Stage::Interval).unwrap_or(0);
    let t_int = acq.sniffer.entered(Stage::Increment);
    let t_inc = acq.sniffer.entered(Stage::Map);
    let t_map = acq.sniffer.entered(Stage::Following);
    let hops = |from: Option<u64>, to: Option<u64>| Some((to? - from?) / c_true);
    let est = acq.sniffer.estimate().clone();

    let c_int = ParamOutcome {
        truth: c_true,
        derived: t_int.and(est.c_int_us),
        hops: hops(Some(start), t_int),
    };
    let h_inc = ParamOutcome {
        truth: setup.params.h_inc,
        derived: t_inc.and(est.h_inc),
        hops: hops(t_int, t_inc),
    };
    let c_map = ParamOutcome {
        truth: acq
            .radio
            .connection()
            .map_at(t_map.unwrap_or(acq.radio.now())),
        derived: t_map.and(est.c_map),
        hops: hops(t_inc, t_map),
    };

    let data_start_us = data_start(s, &acq);
    let events = data_events(s, acq.radio.connection(), data_start_us);
    let mut failure = acq.error.as_ref().map(ToString::to_string);
    if t_map.is_some() {
        let last = events
            .last()
            .map_or(0, |&i| acq.radio.connection().anchor_of(i));
        if let Err(e) = acq.sniffer.follow_until(&mut acq.radio, last) {
            failure = Some(e.to_string());
        }
    }
    Ok(TrialResult {
        trial,
        c_int,
        h_inc,
        c_map,
        packets_expected: s.packet_count,
        packets_captured: count_captured(&acq.radio, &events),
        resync_count: acq.sniffer.resync_count(),
        lock_us: t_map,
        data_start_us,
        failure,
    })
}

/// Follow-mode idealization: knows the connection parameters from the start
/// and learns map changes only from update announcements it actually hears.
#[derive(Debug, Clone)]
pub struct BenchmarkComparator {
    h_inc: u8,
    c_int_us: u64,
    hop: HopState,
    next_index: u64,
    believed: ChannelMap,
    pending: Option<(u64, ChannelMap)>,
    forced_misses_left: u32,
    updates_heard: u32,
}

impl BenchmarkComparator {
    /// Starts from the parameters a connection request would have revealed.
    pub fn new(conn: &VictimConnection, forced_misses: u32) -> Self {
        let p = conn.params();
        BenchmarkComparator {
            h_inc: p.h_inc,
            c_int_us: p.c_int_us as u64,
            hop: HopState::new(p.luc).expect("validated luc"),
            next_index: 0,
            believed: p.c_map,
            pending: None,
            forced_misses_left: forced_misses,
            updates_heard: 0,
        }
    }

    pub fn believed_map(&self) -> ChannelMap {
        self.believed
    }

    pub fn updates_heard(&self) -> u32 {
        self.updates_heard
    }

    /// Follows every event anchored at or before `until_us`.
    pub fn run_until(&mut self, radio: &mut SimRadio, until_us: u64) -> Result<(), HarnessError> {
        let lead = self.c_int_us / 2;
        loop {
            let anchor = radio.connection().anchor_of(self.next_index);
            if anchor > until_us {
                return Ok(());
            }
            if let Some((from, map)) = self.pending {
                if from <= self.next_index {
                    self.believed = map;
                    self.pending = None;
                }
            }
            let (_, hop) =
                select_next_channel(self.hop, self.h_inc, self.believed).map_err(|e| {
                    HarnessError::Invalid {
                        key: "map".into(),
                        msg: e.to_string(),
                    }
                })?;
            self.hop = hop;
            let channel = remap(hop.luc, self.believed).expect("believed map is valid");
            radio.observe_until(anchor.saturating_sub(lead));
            radio.tune(channel.get())?;
            let heard = radio.observe_until(anchor + self.c_int_us / 2);
            let announcement = heard
                .iter()
                .find(|o| o.role == Role::Master && o.time_us == anchor)
                .and_then(|o| radio.control_payload(o));
            if let Some(map) = announcement {
                if self.forced_misses_left > 0 {
                    self.forced_misses_left -= 1;
                } else {
                    self.updates_heard += 1;
                    self.pending = Some((self.next_index + 1, map));
                }
            }
            self.next_index += 1;
        }
    }
}

/// Same scenario and seed as [`run_trial`], driven by the follow-mode
/// comparator instead of the cracker. The data burst starts where the
/// cracker's would, so both face the same packets.
pub fn run_benchmark(s: &Scenario, trial: u32) -> Result<TrialResult, HarnessError> {
    let setup = s.setup(trial)?;
    let data_start_us = match s.data_start_us {
        Some(t) => t,
        None => data_start(s, &acquire(s, &setup)?),
    };
    let mut radio = build_radio(s, &setup)?;
    let mut comparator = BenchmarkComparator::new(radio.connection(), s.forced_update_misses);
    let events = data_events(s, radio.connection(), data_start_us);
    let last = events
        .last()
        .map_or(0, |&i| radio.connection().anchor_of(i));
    comparator.run_until(&mut radio, last)?;
    let known = |truth| ParamOutcome {
        truth,
        derived: Some(truth),
        hops: Some(0),
    };
    Ok(TrialResult {
        trial,
        c_int: known(setup.params.c_int_us as u64),
        h_inc: ParamOutcome {
            truth: setup.params.h_inc,
            derived: Some(setup.params.h_inc),
            hops: Some(0),
        },
        c_map: ParamOutcome {
            truth: setup.params.c_map,
            derived: Some(setup.params.c_map),
            hops: Some(0),
        },
        packets_expected: s.packet_count,
        packets_captured: count_captured(&radio, &events),
        resync_count: comparator.updates_heard(),
        lock_us: Some(0),
        data_start_us,
        failure: None,
    })
}

/// Runs every trial of the scenario in parallel; results are in trial order.
pub fn run_trials(s: &Scenario) -> Result<Vec<TrialResult>, HarnessError> {
    (0..s.trials)
        .into_par_iter()
        .map(|t| run_trial(s, t))
        .collect()
}

pub fn run_benchmarks(s: &Scenario) -> Result<Vec<TrialResult>, HarnessError> {
    (0..s.trials)
        .into_par_iter()
        .map(|t| run_benchmark(s, t))
        .collect()
}

//! Single-radio recovery of a live connection's hopping parameters.
//!
//! The pipeline runs in four stages:
//!
//! 1. **Interval**: park on one channel, wait for the inter-arrival pattern to
//!    repeat, divide its span by 37.
//! 2. **Increment**: observe two more channels for one span each and solve the
//!    hop congruence for every pair of receptions (see [`derive_hop_increment`]).
//! 3. **Map**: hop ahead of the victim from a truly mapped reception and note
//!    where the target shows up (see [`derive_channel_map`]).
//! 4. **Following**: hop in lockstep, tracking misses in a sliding window; a
//!    full window of misses means the map changed and stage 3 runs again.
//!
//! The sniffer touches the air only through [`Radio`].

mod follow;
mod increment;
mod interval;
mod map;

pub use follow::{MissWindow, SlotStreaks};
pub use increment::{
    candidate_increments, chained_triples, derive_hop_increment, hops_between,
    reference_consistent, reference_violations, AppearanceSet, Candidate, Evidence,
    IncrementSolution, TrueChannel,
};
pub use interval::{derive_connection_interval, detect_period, DeltaSeries};
pub use map::{derive_channel_map, HopOutcome, HopPredictor, MapScan, ScanConfig};

use std::fmt;

use thiserror::Error;

use crate::afh::{remap, unmapped_after, ChannelIndex, ChannelMap, NUM_DATA_CHANNELS};
use crate::sim::{Radio, SimError};

const POLL_US: u64 = 5_000;
/// Consecutive failed map scans before the reference is re-derived.
const MAX_SCAN_FAILURES: u32 = 3;
/// Most recent appearance sets a candidate reference is checked against.
const CONSISTENCY_SETS: usize = 6;
/// Appearances in a row one unmapped slot may miss before a resync.
const SLOT_MISS_LIMIT: u8 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnifferError {
    #[error("no repeating inter-arrival pattern found")]
    NoPeriodFound,
    #[error("period {0} us is not 37 times a legal connection interval")]
    IntervalOutOfRange(u64),
    #[error("gap {t1}..{t2} us is not a whole number of {c_int_us} us intervals")]
    NotOnGrid { t1: u64, t2: u64, c_int_us: u64 },
    #[error("no hop increment holds a majority among {candidates} candidates")]
    Ambiguous { candidates: usize },
    #[error("channel scan lost sync ({used} channels heard, {misses} misses)")]
    DesyncSuspected { used: u32, misses: usize },
    #[error("hop budget exhausted during the {0} stage")]
    BudgetExhausted(Stage),
    #[error("sniffer not ready: {0}")]
    NotReady(&'static str),
    #[error("bad sniffer configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Radio(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Interval,
    Increment,
    Map,
    Following,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Interval => "interval",
            Stage::Increment => "increment",
            Stage::Map => "map",
            Stage::Following => "following",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnifferConfig {
    /// Pattern repetitions required before a period is accepted.
    pub n_repeats: usize,
    pub window_size: usize,
    pub threshold: usize,
    /// Retune this long before each predicted anchor; `None` means `c_int / 2`.
    pub lead_margin_us: Option<u64>,
    /// Slack for [`hops_between`]; `None` means `c_int / 4`.
    pub hop_tolerance_us: Option<u64>,
    /// Misses tolerated in the confirming map pass; `None` means `threshold - 1`.
    pub confirm_max_misses: Option<usize>,
    pub start_channel: u8,
    /// Give up on a channel after this long without hearing the target.
    pub silence_timeout_us: u64,
    /// Wait after retuning before an observation window starts.
    pub settle_us: u64,
}

impl Default for SnifferConfig {
    fn default() -> Self {
        SnifferConfig {
            n_repeats: 3,
            window_size: 10,
            threshold: 5,
            lead_margin_us: None,
            hop_tolerance_us: None,
            confirm_max_misses: None,
            start_channel: 0,
            silence_timeout_us: 5_000_000,
            settle_us: 0,
        }
    }
}

impl SnifferConfig {
    pub fn validate(&self) -> Result<(), SnifferError> {
        if self.n_repeats < 2 {
            return Err(SnifferError::Config(format!(
                "n_repeats={} must be at least 2",
                self.n_repeats
            )));
        }
        MissWindow::new(self.window_size, self.threshold)?;
        ChannelIndex::new(self.start_channel)
            .map_err(|e| SnifferError::Config(format!("start_channel: {e}")))?;
        if self.silence_timeout_us == 0 {
            return Err(SnifferError::Config(
                "silence_timeout_us must be positive".into(),
            ));
        }
        Ok(())
    }

    fn lead_margin(&self, c_int_us: u64) -> u64 {
        self.lead_margin_us
            .unwrap_or(c_int_us / 2)
            .clamp(1, c_int_us.saturating_sub(1).max(1))
    }

    fn tolerance(&self, c_int_us: u64) -> u64 {
        self.hop_tolerance_us.unwrap_or(c_int_us / 4)
    }

    fn confirm_max_misses(&self) -> usize {
        self.confirm_max_misses.unwrap_or(self.threshold - 1)
    }
}

/// The sniffer's current belief about the connection.
#[derive(Debug, Clone, PartialEq)]
pub struct SnifferEstimate {
    pub stage: Stage,
    pub c_int_us: Option<u64>,
    pub period_us: Option<u64>,
    pub h_inc: Option<u8>,
    pub c_map: Option<ChannelMap>,
    pub true_channels: Vec<TrueChannel>,
    /// Connection events elapsed since sniffing began, by the estimated interval.
    pub hops_consumed: u64,
}

impl SnifferEstimate {
    fn new() -> Self {
        SnifferEstimate {
            stage: Stage::Interval,
            c_int_us: None,
            period_us: None,
            h_inc: None,
            c_map: None,
            true_channels: Vec::new(),
            hops_consumed: 0,
        }
    }

    /// `stage,c_int_us,h_inc,map_hex,hops_consumed`; unknown fields are `-`.
    pub fn dump_line(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map_or_else(|| "-".to_string(), |v| v.to_string())
        }
        format!(
            "{},{},{},{},{}",
            self.stage,
            opt(self.c_int_us),
            opt(self.h_inc),
            opt(self.c_map.map(ChannelMap::to_hex)),
            self.hops_consumed
        )
    }
}

/// Snapshot taken at a stage transition.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateDump {
    pub time_us: u64,
    pub estimate: SnifferEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FollowEvent {
    Hop(HopOutcome),
    Resync { time_us: u64, misses: usize },
    ScanFailed { time_us: u64, error: SnifferError },
    MapRecovered { time_us: u64, map: ChannelMap },
}

pub struct Sniffer {
    config: SnifferConfig,
    target: u32,
    started_us: Option<u64>,
    estimate: SnifferEstimate,
    predictor: Option<HopPredictor>,
    miss: MissWindow,
    streaks: SlotStreaks,
    dumps: Vec<EstimateDump>,
    resyncs: u32,
    reanchors: u32,
    /// Hops of the latest failed scan, if the one after it has not succeeded.
    evidence: Vec<HopOutcome>,
}

impl Sniffer {
    pub fn new(config: SnifferConfig, target_access_address: u32) -> Result<Self, SnifferError> {
        config.validate()?;
        let miss = MissWindow::new(config.window_size, config.threshold)?;
        Ok(Sniffer {
            config,
            target: target_access_address,
            started_us: None,
            estimate: SnifferEstimate::new(),
            predictor: None,
            miss,
            streaks: SlotStreaks::new(SLOT_MISS_LIMIT),
            dumps: Vec::new(),
            resyncs: 0,
            reanchors: 0,
            evidence: Vec::new(),
        })
    }

    /// A sniffer that already holds a full estimate and starts in follow mode
    /// at `now_us`.
    pub fn following(
        config: SnifferConfig,
        target_access_address: u32,
        predictor: HopPredictor,
        map: ChannelMap,
        now_us: u64,
    ) -> Result<Self, SnifferError> {
        if map.popcount() < 2 {
            return Err(SnifferError::Config(format!(
                "map {} uses fewer than two channels",
                map.to_hex()
            )));
        }
        let mut s = Sniffer::new(config, target_access_address)?;
        s.started_us = Some(now_us);
        s.estimate.c_int_us = Some(predictor.c_int_us);
        s.estimate.period_us = Some(predictor.c_int_us * NUM_DATA_CHANNELS as u64);
        s.estimate.h_inc = Some(predictor.h_inc);
        s.estimate.c_map = Some(map);
        s.estimate.true_channels = vec![predictor.reference];
        s.predictor = Some(predictor);
        s.transition(Stage::Following, now_us);
        Ok(s)
    }

    pub fn config(&self) -> &SnifferConfig {
        &self.config
    }

    pub fn estimate(&self) -> &SnifferEstimate {
        &self.estimate
    }

    pub fn predictor(&self) -> Option<&HopPredictor> {
        self.predictor.as_ref()
    }

    /// Estimate snapshots at every stage transition, oldest first.
    pub fn dumps(&self) -> &[EstimateDump] {
        &self.dumps
    }

    pub fn resync_count(&self) -> u32 {
        self.resyncs
    }

    /// Times the hop increment was re-derived after repeated scan failures.
    pub fn reanchor_count(&self) -> u32 {
        self.reanchors
    }

    /// Time at which `stage` was first entered.
    pub fn entered(&self, stage: Stage) -> Option<u64> {
        self.dumps
            .iter()
            .find(|d| d.estimate.stage == stage)
            .map(|d| d.time_us)
    }

    fn transition(&mut self, stage: Stage, now: u64) {
        self.estimate.stage = stage;
        if let (Some(start), Some(c_int)) = (self.started_us, self.estimate.c_int_us) {
            self.estimate.hops_consumed = (now - start) / c_int;
        }
        self.dumps.push(EstimateDump {
            time_us: now,
            estimate: self.estimate.clone(),
        });
    }

    /// Runs stages 1 to 3. Returns once the sniffer is following, or fails
    /// when `deadline_us` passes first.
    pub fn acquire<R: Radio>(
        &mut self,
        radio: &mut R,
        deadline_us: u64,
    ) -> Result<(), SnifferError> {
        if self.started_us.is_none() {
            self.started_us = Some(radio.now());
            self.transition(Stage::Interval, radio.now());
        }
        if self.estimate.stage == Stage::Interval {
            let p = self.interval_stage(radio, deadline_us)?;
            self.transition(Stage::Increment, radio.now());
            let solution = self.increment_stage(radio, p, deadline_us)?;
            self.adopt(&solution);
            self.transition(Stage::Map, radio.now());
        }
        if self.estimate.stage == Stage::Map {
            let scan = self.map_stage(radio, deadline_us, &mut Vec::new())?;
            self.estimate.c_map = Some(scan.map);
            self.miss.clear();
            self.streaks.clear();
            self.transition(Stage::Following, radio.now());
        }
        Ok(())
    }

    fn interval_stage<R: Radio>(
        &mut self,
        radio: &mut R,
        deadline_us: u64,
    ) -> Result<AppearanceSet, SnifferError> {
        let mut channel = ChannelIndex::new(self.config.start_channel).expect("validated");
        radio.tune(channel.get())?;
        let mut times: Vec<u64> = Vec::new();
        let mut last_activity = radio.now();
        loop {
            if radio.now() >= deadline_us {
                return Err(SnifferError::BudgetExhausted(Stage::Interval));
            }
            let mut fresh = false;
            for o in radio.observe(POLL_US) {
                if o.access_address == self.target && o.channel == channel {
                    let t = o.anchor_us();
                    if times.last() != Some(&t) {
                        times.push(t);
                        fresh = true;
                    }
                    last_activity = radio.now();
                }
            }
            if fresh && times.len() > self.config.n_repeats {
                let series = DeltaSeries::from_times(channel, &times);
                if let Ok(period) = detect_period(&series, self.config.n_repeats) {
                    if let Ok(c_int) = derive_connection_interval(period) {
                        self.estimate.c_int_us = Some(c_int);
                        self.estimate.period_us = Some(period);
                        let last = *times.last().expect("nonempty");
                        return Ok(AppearanceSet::from_times(
                            channel,
                            last + 1 - period,
                            period,
                            times.iter().copied(),
                        ));
                    }
                }
            }
            if radio.now() - last_activity >= self.config.silence_timeout_us {
                channel = next_channel(channel, &[]);
                radio.tune(channel.get())?;
                times.clear();
                last_activity = radio.now();
            }
        }
    }

    /// Observes `channel` for one full period.
    fn observe_period<R: Radio>(
        &self,
        radio: &mut R,
        channel: ChannelIndex,
        period_us: u64,
    ) -> Result<AppearanceSet, SnifferError> {
        radio.tune(channel.get())?;
        radio.observe(self.config.settle_us);
        let start = radio.now() + 1;
        let heard: Vec<u64> = radio
            .observe(period_us)
            .iter()
            .filter(|o| o.access_address == self.target && o.channel == channel)
            .map(|o| o.anchor_us())
            .collect();
        Ok(AppearanceSet::from_times(channel, start, period_us, heard))
    }

    fn increment_stage<R: Radio>(
        &mut self,
        radio: &mut R,
        p: AppearanceSet,
        deadline_us: u64,
    ) -> Result<IncrementSolution, SnifferError> {
        let c_int = self.estimate.c_int_us.expect("interval known");
        let period = self.estimate.period_us.expect("period known");
        let tol = self.config.tolerance(c_int);
        let mut sets = vec![p];
        let mut cursor = sets[0].channel;
        loop {
            if radio.now() >= deadline_us {
                return Err(SnifferError::BudgetExhausted(Stage::Increment));
            }
            let last = sets.last().map(|s| s.channel);
            cursor = next_channel(cursor, last.as_slice());
            let set = self.observe_period(radio, cursor, period)?;
            if set.is_empty() {
                continue;
            }
            sets.push(set);
            if let [.., p, q, r] = sets.as_slice() {
                let recent = &sets[sets.len().saturating_sub(CONSISTENCY_SETS)..];
                let evidence = Evidence {
                    sets: recent,
                    period_us: period,
                    hops: &self.evidence,
                };
                let max_lost = recent.len() / 3;
                let violations = |h_inc: u8, triple: &[TrueChannel; 3]| -> usize {
                    triple
                        .iter()
                        .map(|&t| reference_violations(t, h_inc, c_int, tol, &evidence, max_lost))
                        .sum()
                };
                let verified =
                    |h_inc: u8, triple: &[TrueChannel; 3]| violations(h_inc, triple) == 0;
                match derive_hop_increment(p, q, r, c_int, tol) {
                    Ok(mut solution) => {
                        let h = solution.h_inc;
                        let scored = solution.triples.iter().map(|t| (violations(h, t), *t));
                        // a map update inside the evidence can taint every
                        // triple; after enough sets take the least tainted
                        if let Some((score, triple)) = scored.min_by_key(|&(v, _)| v) {
                            if score == 0 || recent.len() >= CONSISTENCY_SETS {
                                solution.true_channels = triple;
                                return Ok(solution);
                            }
                        }
                    }
                    Err(SnifferError::Ambiguous { .. }) => {}
                    Err(e) => return Err(e),
                }
                if recent.len() >= CONSISTENCY_SETS {
                    if let Some(solution) = unique_consistent(p, q, r, c_int, tol, &verified) {
                        return Ok(solution);
                    }
                }
            }
        }
    }

    fn adopt(&mut self, solution: &IncrementSolution) {
        let c_int = self.estimate.c_int_us.expect("interval known");
        self.estimate.h_inc = Some(solution.h_inc);
        self.estimate.true_channels = solution.true_channels.to_vec();
        self.predictor = Some(HopPredictor {
            reference: solution.true_channels[2],
            c_int_us: c_int,
            h_inc: solution.h_inc,
        });
    }

    /// Re-derives the hop increment and a fresh truly mapped reference. Used
    /// when map scans keep failing, which means the reference was a remap
    /// target or the increment is wrong.
    fn reanchor<R: Radio>(&mut self, radio: &mut R, deadline_us: u64) -> Result<(), SnifferError> {
        self.reanchors += 1;
        self.transition(Stage::Increment, radio.now());
        let period = self.estimate.period_us.expect("period known");
        let last = self.estimate.true_channels.last().map_or(
            ChannelIndex::new(self.config.start_channel).expect("validated"),
            |t| t.channel,
        );
        let mut channel = last;
        let p = loop {
            if radio.now() >= deadline_us {
                return Err(SnifferError::BudgetExhausted(Stage::Increment));
            }
            channel = next_channel(channel, &[]);
            let set = self.observe_period(radio, channel, period)?;
            if !set.is_empty() {
                break set;
            }
        };
        let solution = self.increment_stage(radio, p, deadline_us)?;
        self.adopt(&solution);
        self.transition(Stage::Map, radio.now());
        Ok(())
    }

    fn scan_config(&self) -> ScanConfig {
        let c_int = self.estimate.c_int_us.expect("interval known");
        ScanConfig {
            target: self.target,
            lead_margin_us: self.config.lead_margin(c_int),
            confirm_max_misses: self.config.confirm_max_misses(),
            carried: ChannelMap::EMPTY,
        }
    }

    fn map_stage<R: Radio>(
        &mut self,
        radio: &mut R,
        deadline_us: u64,
        log: &mut Vec<FollowEvent>,
    ) -> Result<MapScan, SnifferError> {
        let mut cfg = self.scan_config();
        let mut failures = 0;
        loop {
            if radio.now() >= deadline_us {
                return Err(SnifferError::BudgetExhausted(Stage::Map));
            }
            if failures >= MAX_SCAN_FAILURES {
                self.reanchor(radio, deadline_us)?;
                failures = 0;
            }
            let predictor = self
                .predictor
                .ok_or(SnifferError::NotReady("no hop predictor"))?;
            let mut hops = Vec::with_capacity(74);
            let result = derive_channel_map(&predictor, radio, &cfg, &mut hops);
            log.extend(hops.iter().copied().map(FollowEvent::Hop));
            match result {
                Ok(scan) => {
                    self.evidence.clear();
                    log.push(FollowEvent::MapRecovered {
                        time_us: radio.now(),
                        map: scan.map,
                    });
                    return Ok(scan);
                }
                Err(error @ SnifferError::DesyncSuspected { .. }) => {
                    failures += 1;
                    // One failure is usually an update crossing the scan, which a
                    // plain rescan fixes. Repeated failures look like loss, so
                    // channels heard last time stay marked used.
                    cfg.carried = if failures >= 2 {
                        ChannelMap::from_channels(hops.iter().filter(|h| h.heard).map(|h| h.tuned))
                    } else {
                        ChannelMap::EMPTY
                    };
                    self.evidence = hops;
                    log.push(FollowEvent::ScanFailed {
                        time_us: radio.now(),
                        error,
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Hops in lockstep with the predicted sequence until the first event
    /// anchored after `until_us`, re-deriving the map whenever the miss window
    /// trips.
    pub fn follow_until<R: Radio>(
        &mut self,
        radio: &mut R,
        until_us: u64,
    ) -> Result<Vec<FollowEvent>, SnifferError> {
        let c_int = self
            .estimate
            .c_int_us
            .ok_or(SnifferError::NotReady("no connection interval"))?;
        let lead = self.config.lead_margin(c_int);
        let mut log = Vec::new();
        loop {
            if self.estimate.stage == Stage::Map {
                match self.map_stage(radio, until_us, &mut log) {
                    Ok(scan) => {
                        self.estimate.c_map = Some(scan.map);
                        self.miss.clear();
                        self.streaks.clear();
                        self.transition(Stage::Following, radio.now());
                    }
                    Err(SnifferError::BudgetExhausted(_)) => return Ok(log),
                    Err(e) => return Err(e),
                }
            }
            let predictor = self
                .predictor
                .ok_or(SnifferError::NotReady("no hop predictor"))?;
            let map = self
                .estimate
                .c_map
                .ok_or(SnifferError::NotReady("no channel map"))?;
            let (anchor, unmapped) = predictor.next_event(radio.now() + lead);
            if anchor > until_us {
                radio.observe_until(until_us);
                return Ok(log);
            }
            let tuned = remap(unmapped, map).expect("derived maps use two or more channels");
            radio.observe_until(anchor - lead);
            let heard = map::listen_for_event(radio, tuned, anchor, c_int, self.target)?;
            log.push(FollowEvent::Hop(HopOutcome {
                anchor_us: anchor,
                unmapped,
                tuned,
                heard,
            }));
            let window_tripped = self.miss.record(heard);
            if self.streaks.record(unmapped, heard) | window_tripped {
                log.push(FollowEvent::Resync {
                    time_us: radio.now(),
                    misses: self.miss.misses(),
                });
                self.resyncs += 1;
                self.miss.clear();
                self.streaks.clear();
                self.transition(Stage::Map, radio.now());
            }
        }
    }
}

/// Fallback when the vote is split: the chained triples that survive the
/// consistency check, accepted only if they all describe one hop sequence
/// (same increment, same phase).
fn unique_consistent(
    p: &AppearanceSet,
    q: &AppearanceSet,
    r: &AppearanceSet,
    c_int: u64,
    tol: u64,
    verified: &dyn Fn(u8, &[TrueChannel; 3]) -> bool,
) -> Option<IncrementSolution> {
    let survivors: Vec<(u8, [TrueChannel; 3])> = chained_triples(p, q, r, c_int, tol)
        .into_iter()
        .filter(|(h, t)| verified(*h, t))
        .collect();
    let (h_inc, first) = *survivors.first()?;
    // unmapped channel of the first triple's anchor on P under each hypothesis
    let phase = |h: u8, t: &[TrueChannel; 3]| {
        let hops = (first[0].time_us as i64 - t[0].time_us as i64).div_euclid(c_int as i64);
        (h, unmapped_after(t[0].channel.get(), h, hops))
    };
    let key = phase(h_inc, &first);
    if survivors.iter().any(|(h, t)| phase(*h, t) != key) {
        return None;
    }
    Some(IncrementSolution {
        h_inc,
        true_channels: first,
        votes: survivors.iter().map(|&(h, _)| h).collect(),
        triples: survivors.into_iter().map(|(_, t)| t).collect(),
    })
}

/// Next channel after `from`, skipping `avoid`.
fn next_channel(from: ChannelIndex, avoid: &[ChannelIndex]) -> ChannelIndex {
    let mut c = from.get();
    loop {
        c = (c + 1) % NUM_DATA_CHANNELS;
        let ch = ChannelIndex::new(c).expect("reduced mod 37");
        if !avoid.contains(&ch) {
            return ch;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SnifferConfig::default().validate().is_ok());
        let bad = SnifferConfig {
            n_repeats: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SnifferConfig {
            threshold: 11,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SnifferConfig {
            start_channel: 39,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn lead_margin_defaults_to_half_interval() {
        let cfg = SnifferConfig::default();
        assert_eq!(cfg.lead_margin(100_000), 50_000);
        let cfg = SnifferConfig {
            lead_margin_us: Some(0),
            ..Default::default()
        };
        assert_eq!(cfg.lead_margin(100_000), 1);
        assert_eq!(cfg.confirm_max_misses(), 4);
    }

    #[test]
    fn dump_line_format() {
        let mut e = SnifferEstimate::new();
        assert_eq!(e.dump_line(), "interval,-,-,-,0");
        e.stage = Stage::Following;
        e.c_int_us = Some(100_000);
        e.h_inc = Some(7);
        e.c_map = Some(ChannelMap::FULL);
        e.hops_consumed = 300;
        assert_eq!(e.dump_line(), "following,100000,7,1fffffffff,300");
    }

    #[test]
    fn next_channel_wraps_and_skips() {
        let c = |v| ChannelIndex::new(v).unwrap();
        assert_eq!(next_channel(c(36), &[]), c(0));
        assert_eq!(next_channel(c(3), &[c(4), c(5)]), c(6));
    }
}

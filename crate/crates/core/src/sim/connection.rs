use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SimClock, SimError};
use crate::afh::{
    select_next_channel, validate_params, ChannelIndex, ChannelMap, ConnectionParams, HopState,
    NUM_DATA_CHANNELS,
};

// Independent streams carved out of the connection seed.
const LOSS_STREAM: u64 = 0x6c6f_7373;
const MAP_STREAM: u64 = 0x6d61_7073;

/// Rule producing successive channel maps.
#[derive(Debug, Clone, PartialEq)]
pub enum MapGenerator {
    /// Each update first restores the channels removed by the previous update,
    /// then removes between 1 and `max_remove` currently used channels, never
    /// going below `min_used`.
    RemoveRestore { max_remove: u32, min_used: u32 },
    /// Cycles through the given maps.
    Sequence(Vec<ChannelMap>),
}

/// When and how the master changes the channel map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapUpdateSchedule {
    /// `None` disables updates.
    pub period_us: Option<u64>,
    /// Delay of the first update after the first anchor. Later updates follow
    /// every `period_us`.
    pub first_offset_us: u64,
    pub generator: MapGenerator,
}

impl MapUpdateSchedule {
    pub fn none() -> Self {
        MapUpdateSchedule {
            period_us: None,
            first_offset_us: 0,
            generator: MapGenerator::Sequence(Vec::new()),
        }
    }

    /// Updates every `period_us`, the first one a full period after the first anchor.
    pub fn periodic(period_us: u64, generator: MapGenerator) -> Self {
        MapUpdateSchedule {
            period_us: Some(period_us),
            first_offset_us: period_us,
            generator,
        }
    }

    pub fn with_first_offset(mut self, offset_us: u64) -> Self {
        self.first_offset_us = offset_us;
        self
    }
}

/// Independent per-packet loss at the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LossModel {
    p_loss: [f64; NUM_DATA_CHANNELS as usize],
}

impl LossModel {
    pub fn lossless() -> Self {
        LossModel::uniform(0.0).expect("zero is a probability")
    }

    pub fn uniform(p: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::LossProbability(p, 0));
        }
        Ok(LossModel {
            p_loss: [p; NUM_DATA_CHANNELS as usize],
        })
    }

    pub fn with_channel(mut self, channel: ChannelIndex, p: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::LossProbability(p, channel.get()));
        }
        self.p_loss[channel.get() as usize] = p;
        Ok(self)
    }

    pub fn p_loss(&self, channel: ChannelIndex) -> f64 {
        self.p_loss[channel.get() as usize]
    }
}

/// One materialized connection event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionEventRecord {
    pub index: u64,
    pub anchor_us: u64,
    pub channel: ChannelIndex,
    /// Unmapped channel of this event.
    pub unmapped: u8,
    /// Lost to the receiver; the victims themselves never lose packets.
    pub master_lost: bool,
    pub slave_lost: bool,
    /// Map announced in this event's master packet, in force from the next event on.
    pub map_update: Option<ChannelMap>,
}

/// A connected pair hopping on a schedule of channel maps.
#[derive(Debug, Clone)]
pub struct VictimConnection {
    params: ConnectionParams,
    schedule: MapUpdateSchedule,
    loss: LossModel,
    first_anchor_us: u64,
    clock: SimClock,
    hop: HopState,
    map: ChannelMap,
    removed_last: Vec<ChannelIndex>,
    sequence_pos: usize,
    next_update_event: Option<u64>,
    updates_done: u64,
    pending_map: Option<ChannelMap>,
    next_index: u64,
    records: Vec<ConnectionEventRecord>,
    /// (first event index, map) in chronological order.
    map_history: Vec<(u64, ChannelMap)>,
    loss_rng: ChaCha8Rng,
    map_rng: ChaCha8Rng,
}

impl VictimConnection {
    pub fn new(
        params: ConnectionParams,
        schedule: MapUpdateSchedule,
        loss: LossModel,
        seed: u64,
    ) -> Result<Self, SimError> {
        validate_params(&params).map_err(SimError::Params)?;
        if let Some(period) = schedule.period_us {
            if period < params.c_int_us as u64 {
                return Err(SimError::Schedule(format!(
                    "update period {period} us shorter than the connection interval"
                )));
            }
            if schedule.first_offset_us == 0 {
                return Err(SimError::Schedule(
                    "first update offset must be positive".into(),
                ));
            }
        }
        match &schedule.generator {
            MapGenerator::Sequence(maps) => {
                for m in maps {
                    m.check()
                        .map_err(|e| SimError::Schedule(format!("map {m}: {e}")))?;
                }
                if schedule.period_us.is_some() && maps.is_empty() {
                    return Err(SimError::Schedule("empty map sequence".into()));
                }
            }
            MapGenerator::RemoveRestore { min_used, .. } => {
                if *min_used < 2 {
                    return Err(SimError::Schedule("min_used must be at least 2".into()));
                }
            }
        }
        let c_int = params.c_int_us as u64;
        let mut conn = VictimConnection {
            hop: HopState::new(params.luc).map_err(SimError::Params)?,
            map: params.c_map,
            first_anchor_us: c_int,
            clock: SimClock::default(),
            removed_last: Vec::new(),
            sequence_pos: 0,
            next_update_event: None,
            updates_done: 0,
            pending_map: None,
            next_index: 0,
            records: Vec::new(),
            map_history: vec![(0, params.c_map)],
            loss_rng: ChaCha8Rng::seed_from_u64(seed ^ LOSS_STREAM),
            map_rng: ChaCha8Rng::seed_from_u64(seed ^ MAP_STREAM),
            params,
            schedule,
            loss,
        };
        conn.next_update_event = conn.update_event(0);
        Ok(conn)
    }

    /// Places the first anchor at `t_us` (default: one connection interval).
    /// Only allowed before anything has been materialized.
    pub fn with_first_anchor(mut self, t_us: u64) -> Self {
        assert!(self.records.is_empty(), "connection already running");
        assert!(t_us > 0, "first anchor must follow the clock origin");
        self.first_anchor_us = t_us;
        self.next_update_event = self.update_event(0);
        self
    }

    pub fn params(&self) -> &ConnectionParams {
        &self.params
    }

    pub fn c_int_us(&self) -> u64 {
        self.params.c_int_us as u64
    }

    pub fn now(&self) -> u64 {
        self.clock.now()
    }

    pub fn first_anchor_us(&self) -> u64 {
        self.first_anchor_us
    }

    pub fn anchor_of(&self, index: u64) -> u64 {
        self.first_anchor_us + index * self.c_int_us()
    }

    /// Index of the first event anchored at or after `t_us`.
    pub fn event_at_or_after(&self, t_us: u64) -> u64 {
        if t_us <= self.first_anchor_us {
            0
        } else {
            (t_us - self.first_anchor_us).div_ceil(self.c_int_us())
        }
    }

    /// Event index at which update number `n` takes effect.
    fn update_event(&self, n: u64) -> Option<u64> {
        let period = self.schedule.period_us?;
        let t = self.first_anchor_us + self.schedule.first_offset_us + n * period;
        Some(self.event_at_or_after(t).max(1))
    }

    /// Materializes every event anchored in `(now, until]` and moves the clock to `until`.
    pub fn advance(&mut self, until: u64) -> Vec<ConnectionEventRecord> {
        let start = self.records.len();
        while self.anchor_of(self.next_index) <= until {
            self.step();
        }
        self.clock.advance_to(until);
        self.records[start..].to_vec()
    }

    fn step(&mut self) {
        let index = self.next_index;
        if let Some(map) = self.pending_map.take() {
            self.map = map;
            self.map_history.push((index, map));
        }
        let (channel, hop) =
            select_next_channel(self.hop, self.params.h_inc, self.map).expect("validated state");
        self.hop = hop;
        let p = self.loss.p_loss(channel);
        let master_lost = self.loss_rng.gen_bool(p);
        let slave_lost = self.loss_rng.gen_bool(p);

        let mut map_update = None;
        if self.next_update_event == Some(index + 1) {
            let next = self.generate_map();
            self.pending_map = Some(next);
            map_update = Some(next);
            self.updates_done += 1;
            self.next_update_event = self.update_event(self.updates_done);
        }
        self.records.push(ConnectionEventRecord {
            index,
            anchor_us: self.anchor_of(index),
            channel,
            unmapped: hop.luc,
            master_lost,
            slave_lost,
            map_update,
        });
        self.next_index += 1;
    }

    fn generate_map(&mut self) -> ChannelMap {
        match &self.schedule.generator {
            MapGenerator::Sequence(maps) => {
                let m = maps[self.sequence_pos % maps.len()];
                self.sequence_pos += 1;
                m
            }
            &MapGenerator::RemoveRestore {
                max_remove,
                min_used,
            } => {
                let mut map = self.map;
                for c in self.removed_last.drain(..) {
                    map.set_used(c, true);
                }
                let room = map.popcount().saturating_sub(min_used);
                let k = self.map_rng.gen_range(1..=max_remove.max(1)).min(room);
                let mut used = map.used_list();
                for _ in 0..k {
                    let c = used.swap_remove(self.map_rng.gen_range(0..used.len()));
                    map.set_used(c, false);
                    self.removed_last.push(c);
                }
                self.removed_last.sort();
                map
            }
        }
    }

    /// Every event materialized so far.
    pub fn records(&self) -> &[ConnectionEventRecord] {
        &self.records
    }

    pub fn record(&self, index: u64) -> Option<&ConnectionEventRecord> {
        self.records.get(index as usize)
    }

    /// Map used by the most recent event anchored at or before `t_us`
    /// (the initial map before the first event).
    pub fn map_at(&self, t_us: u64) -> ChannelMap {
        if t_us < self.first_anchor_us {
            return self.map_history[0].1;
        }
        let index = (t_us - self.first_anchor_us) / self.c_int_us();
        self.map_for_event(index)
    }

    pub fn map_for_event(&self, index: u64) -> ChannelMap {
        let pos = self
            .map_history
            .partition_point(|&(first, _)| first <= index);
        self.map_history[pos.saturating_sub(1)].1
    }

    /// Event indices at which a new map took effect.
    pub fn update_events(&self) -> impl Iterator<Item = u64> + '_ {
        self.map_history.iter().skip(1).map(|&(i, _)| i)
    }

    pub fn current_map(&self) -> ChannelMap {
        self.map
    }
}

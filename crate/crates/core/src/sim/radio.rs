use std::fmt;

use super::{ConnectionEventRecord, SimError, VictimConnection, T_IFS_US};
use crate::afh::{ChannelIndex, ChannelMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Master,
    Slave,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Master => "master",
            Role::Slave => "slave",
        })
    }
}

/// A packet of the target connection heard on the tuned channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PacketObservation {
    pub time_us: u64,
    pub channel: ChannelIndex,
    pub access_address: u32,
    pub role: Role,
}

impl PacketObservation {
    /// Anchor of the connection event this packet belongs to.
    pub fn anchor_us(&self) -> u64 {
        match self.role {
            Role::Master => self.time_us,
            Role::Slave => self.time_us - T_IFS_US,
        }
    }
}

/// What a single-radio receiver can do: tune to one data channel and listen.
pub trait Radio {
    fn now(&self) -> u64;

    /// Retunes; the new channel is heard after the radio's retune latency.
    fn tune(&mut self, channel: u8) -> Result<(), SimError>;

    /// Listens for `window_us` and returns what was heard, oldest first.
    fn observe(&mut self, window_us: u64) -> Vec<PacketObservation>;

    /// Listens until `t_us` (no-op if already past it).
    fn observe_until(&mut self, t_us: u64) -> Vec<PacketObservation> {
        let now = self.now();
        self.observe(t_us.saturating_sub(now))
    }
}

/// Receiver attached to a simulated victim connection.
///
/// Each connection event yields at most one observation: the master packet if
/// it survived the loss model, otherwise the slave reply.
#[derive(Debug, Clone)]
pub struct SimRadio {
    conn: VictimConnection,
    tuned: Option<ChannelIndex>,
    listen_from_us: u64,
    retune_latency_us: u64,
    log: Vec<PacketObservation>,
}

impl SimRadio {
    pub fn new(conn: VictimConnection) -> Self {
        SimRadio {
            conn,
            tuned: None,
            listen_from_us: 0,
            retune_latency_us: 0,
            log: Vec::new(),
        }
    }

    pub fn with_retune_latency(mut self, latency_us: u64) -> Result<Self, SimError> {
        let limit_us = self.conn.c_int_us() / 2;
        if latency_us > limit_us {
            return Err(SimError::RetuneLatency {
                latency_us,
                limit_us,
            });
        }
        self.retune_latency_us = latency_us;
        Ok(self)
    }

    pub fn connection(&self) -> &VictimConnection {
        &self.conn
    }

    pub fn tuned(&self) -> Option<ChannelIndex> {
        self.tuned
    }

    /// Every observation returned so far.
    pub fn log(&self) -> &[PacketObservation] {
        &self.log
    }

    /// Control payload carried by the master packet of an observed event.
    ///
    /// Only the follow-mode comparator reads this; the cracker treats payloads
    /// as opaque.
    pub fn control_payload(&self, obs: &PacketObservation) -> Option<ChannelMap> {
        if obs.role != Role::Master {
            return None;
        }
        let index = self.conn.event_at_or_after(obs.time_us);
        self.conn
            .record(index)
            .filter(|r| r.anchor_us == obs.time_us)
            .and_then(|r| r.map_update)
    }

    fn heard(&self, r: &ConnectionEventRecord) -> Option<PacketObservation> {
        let tuned = self.tuned?;
        if r.channel != tuned {
            return None;
        }
        let aa = self.conn.params().access_address;
        let packet = |time_us, role| PacketObservation {
            time_us,
            channel: tuned,
            access_address: aa,
            role,
        };
        if !r.master_lost && r.anchor_us >= self.listen_from_us {
            Some(packet(r.anchor_us, Role::Master))
        } else if !r.slave_lost && r.anchor_us + T_IFS_US >= self.listen_from_us {
            Some(packet(r.anchor_us + T_IFS_US, Role::Slave))
        } else {
            None
        }
    }
}

impl Radio for SimRadio {
    fn now(&self) -> u64 {
        self.conn.now()
    }

    fn tune(&mut self, channel: u8) -> Result<(), SimError> {
        let c = ChannelIndex::new(channel).map_err(|e| SimError::Tune(channel, e))?;
        self.tuned = Some(c);
        self.listen_from_us = self.conn.now() + self.retune_latency_us;
        Ok(())
    }

    fn observe(&mut self, window_us: u64) -> Vec<PacketObservation> {
        let until = self.conn.now() + window_us;
        let records = self.conn.advance(until);
        let heard: Vec<_> = records.iter().filter_map(|r| self.heard(r)).collect();
        self.log.extend_from_slice(&heard);
        heard
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afh::{hop_sequence, ConnectionParams};
    use crate::sim::{LossModel, MapUpdateSchedule};

    const AA: u32 = 0xaf9a_9c2e;

    fn radio(h_inc: u8, map: ChannelMap, loss: LossModel) -> SimRadio {
        let p = ConnectionParams {
            access_address: AA,
            c_int_us: 100_000,
            h_inc,
            c_map: map,
            luc: 0,
        };
        SimRadio::new(VictimConnection::new(p, MapUpdateSchedule::none(), loss, 9).unwrap())
    }

    #[test]
    fn tune_rejects_advertising_channels() {
        let mut r = radio(7, ChannelMap::FULL, LossModel::lossless());
        assert!(r.tune(0).is_ok());
        assert!(matches!(r.tune(38), Err(SimError::Tune(38, _))));
        assert!(r.tune(37).is_err());
        assert_eq!(r.tuned().unwrap().get(), 0);
    }

    #[test]
    fn hears_only_tuned_channel() {
        // full map, h_inc = 7, luc = 0: event 0 on channel 7
        let mut r = radio(7, ChannelMap::FULL, LossModel::lossless());
        r.tune(7).unwrap();
        let obs = r.observe(100_000);
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].role, Role::Master);
        assert_eq!(obs[0].access_address, AA);
        assert_eq!(obs[0].time_us, 100_000);

        r.tune(0).unwrap();
        // event 1 is on channel 14
        assert!(r.observe(100_000).is_empty());
    }

    #[test]
    fn one_observation_per_period_on_full_map() {
        let mut r = radio(7, ChannelMap::FULL, LossModel::lossless());
        r.tune(21).unwrap();
        let obs = r.observe(37 * 100_000);
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].channel.get(), 21);
    }

    #[test]
    fn appearances_match_hop_sequence_on_sparse_map() {
        let map = ChannelMap::from_channels((0..=8).map(|c| ChannelIndex::new(c).unwrap()));
        let p = ConnectionParams {
            access_address: AA,
            c_int_us: 100_000,
            h_inc: 7,
            c_map: map,
            luc: 0,
        };
        let seq = hop_sequence(&p, 37).unwrap();
        for c in 0..=8u8 {
            let expected = seq.iter().filter(|(_, ch)| ch.get() == c).count();
            let mut r = radio(7, map, LossModel::lossless());
            r.tune(c).unwrap();
            assert_eq!(r.observe(37 * 100_000).len(), expected, "channel {c}");
        }
        // channel 0 hosts 5 of the 37 hops with this map
        assert_eq!(seq.iter().filter(|(_, ch)| ch.get() == 0).count(), 5);
    }

    #[test]
    fn total_loss_hears_nothing() {
        let mut r = radio(9, ChannelMap::FULL, LossModel::uniform(1.0).unwrap());
        for c in 0..37 {
            r.tune(c).unwrap();
            assert!(r.observe(10 * 100_000).is_empty());
        }
    }

    #[test]
    fn retune_latency_masks_early_packets() {
        let mut r = radio(7, ChannelMap::FULL, LossModel::lossless())
            .with_retune_latency(40_000)
            .unwrap();
        r.observe(70_000);
        r.tune(7).unwrap();
        // event 0 at 100 ms, radio live from 110 ms
        assert!(r.observe(100_000).is_empty());
        r.observe(60_000);
        r.tune(21).unwrap();
        // event 2 at 300 ms, radio live from 270 ms
        assert_eq!(r.observe(100_000).len(), 1);
        assert!(radio(7, ChannelMap::FULL, LossModel::lossless())
            .with_retune_latency(50_001)
            .is_err());
    }

    #[test]
    fn slave_packet_stands_in_for_lost_master() {
        let mut r = radio(7, ChannelMap::FULL, LossModel::uniform(0.5).unwrap());
        let mut saw_slave = false;
        for c in 0..37 {
            r.tune(c).unwrap();
            for o in r.observe(37 * 100_000) {
                assert_eq!((o.anchor_us() - 100_000) % 100_000, 0);
                saw_slave |= o.role == Role::Slave;
            }
        }
        assert!(saw_slave);
    }
}

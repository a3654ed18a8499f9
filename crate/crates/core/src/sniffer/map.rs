//! Channel-map discovery by hopping ahead of the victim.

use super::{SnifferError, TrueChannel};
use crate::afh::{remap, unmapped_after, ChannelIndex, ChannelMap};
use crate::sim::Radio;

/// Predicts the unmapped channel of every future event from one truly mapped
/// reception, the interval and the increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopPredictor {
    pub reference: TrueChannel,
    pub c_int_us: u64,
    pub h_inc: u8,
}

impl HopPredictor {
    /// First event anchored at or after `t_us`, as (anchor, unmapped channel).
    pub fn next_event(&self, t_us: u64) -> (u64, u8) {
        let r = self.reference.time_us;
        let hops: i64 = if t_us <= r {
            -(((r - t_us) / self.c_int_us) as i64)
        } else {
            (t_us - r).div_ceil(self.c_int_us) as i64
        };
        let anchor = (r as i64 + hops * self.c_int_us as i64) as u64;
        (
            anchor,
            unmapped_after(self.reference.channel.get(), self.h_inc, hops),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub target: u32,
    /// How long before the anchor the radio moves to the next channel.
    pub lead_margin_us: u64,
    /// Largest number of missed hops tolerated in the confirming pass.
    pub confirm_max_misses: usize,
    /// Channels heard during an earlier scan, counted as used from the start.
    pub carried: ChannelMap,
}

/// Outcome of one hop of a scan or of follow mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopOutcome {
    pub anchor_us: u64,
    pub unmapped: u8,
    pub tuned: ChannelIndex,
    pub heard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapScan {
    pub map: ChannelMap,
    pub completed_us: u64,
}

/// Tunes `lead_margin_us` before `anchor_us` and listens one interval.
pub(crate) fn listen_for_event<R: Radio>(
    radio: &mut R,
    channel: ChannelIndex,
    anchor_us: u64,
    c_int_us: u64,
    target: u32,
) -> Result<bool, SnifferError> {
    radio.tune(channel.get())?;
    let until = anchor_us + c_int_us / 2;
    let heard = radio
        .observe_until(until.max(radio.now()))
        .iter()
        .any(|o| o.access_address == target && o.channel == channel && o.anchor_us() == anchor_us);
    Ok(heard)
}

/// Two passes of 37 predicted hops each.
///
/// The first pass tunes to the raw unmapped channel of every hop and marks a
/// channel used when the target is heard there, on top of `carried`. Every
/// unmapped value occurs exactly once in 37 hops, so the pass visits every
/// channel once. The second
/// pass follows the connection with that map, remapping as the victim does,
/// and rejects the map when more than `confirm_max_misses` hops go unheard.
///
/// Every hop is appended to `hops`, whether or not the scan succeeds.
pub fn derive_channel_map<R: Radio>(
    predictor: &HopPredictor,
    radio: &mut R,
    cfg: &ScanConfig,
    hops: &mut Vec<HopOutcome>,
) -> Result<MapScan, SnifferError> {
    let c_int = predictor.c_int_us;
    let mut map = cfg.carried;

    let (mut anchor, _) = predictor.next_event(radio.now() + cfg.lead_margin_us);
    for _ in 0..37 {
        let (_, unmapped) = predictor.next_event(anchor);
        let tuned = ChannelIndex::new(unmapped).expect("unmapped channel below 37");
        radio.observe_until(anchor - cfg.lead_margin_us);
        let heard = listen_for_event(radio, tuned, anchor, c_int, cfg.target)?;
        if heard {
            map.set_used(tuned, true);
        }
        hops.push(HopOutcome {
            anchor_us: anchor,
            unmapped,
            tuned,
            heard,
        });
        anchor += c_int;
    }
    if map.popcount() < 2 {
        return Err(SnifferError::DesyncSuspected {
            used: map.popcount(),
            misses: 37 - map.popcount() as usize,
        });
    }

    let mut misses = 0;
    for _ in 0..37 {
        let (_, unmapped) = predictor.next_event(anchor);
        let tuned = remap(unmapped, map).expect("map has two used channels");
        radio.observe_until(anchor - cfg.lead_margin_us);
        let heard = listen_for_event(radio, tuned, anchor, c_int, cfg.target)?;
        misses += usize::from(!heard);
        hops.push(HopOutcome {
            anchor_us: anchor,
            unmapped,
            tuned,
            heard,
        });
        anchor += c_int;
    }
    if misses > cfg.confirm_max_misses {
        return Err(SnifferError::DesyncSuspected {
            used: map.popcount(),
            misses,
        });
    }
    Ok(MapScan {
        map,
        completed_us: radio.now(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_walks_both_directions() {
        let p = HopPredictor {
            reference: TrueChannel {
                channel: ChannelIndex::new(4).unwrap(),
                time_us: 1_000_000,
            },
            c_int_us: 50_000,
            h_inc: 11,
        };
        assert_eq!(p.next_event(1_000_000), (1_000_000, 4));
        assert_eq!(p.next_event(1_000_001), (1_050_000, 15));
        assert_eq!(p.next_event(1_100_000), (1_100_000, 26));
        assert_eq!(p.next_event(999_999), (1_000_000, 4));
        assert_eq!(p.next_event(950_000), (950_000, 30));
        assert_eq!(
            p.next_event(1_000_000 + 37 * 50_000),
            (1_000_000 + 37 * 50_000, 4)
        );
    }
}

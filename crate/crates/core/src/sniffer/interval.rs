//! Connection-interval recovery from inter-arrival times on one channel.
//!
//! For a fixed channel map the hop pattern repeats every 37 events, so the
//! gaps between successive receptions on a single channel form a repeating
//! pattern whose sum is `37 * c_int`.

use super::SnifferError;
use crate::afh::{is_legal_interval, ChannelIndex, NUM_DATA_CHANNELS};

/// Gaps between adjacent receptions on one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSeries {
    pub channel: ChannelIndex,
    pub deltas: Vec<u64>,
}

impl DeltaSeries {
    /// Builds the series from ascending reception times. Repeated times are
    /// dropped.
    pub fn from_times(channel: ChannelIndex, times: &[u64]) -> Self {
        let deltas = times
            .windows(2)
            .filter_map(|w| w[1].checked_sub(w[0]).filter(|&d| d > 0))
            .collect();
        DeltaSeries { channel, deltas }
    }
}

/// Finds the repetition span `T` of the most recent deltas.
///
/// A span of `k` deltas qualifies when the last `n_repeats * k` deltas repeat
/// with index period `k` and their per-pattern sum is 37 times a legal
/// connection interval. The smallest qualifying span wins.
pub fn detect_period(series: &DeltaSeries, n_repeats: usize) -> Result<u64, SnifferError> {
    let n_repeats = n_repeats.max(2);
    let d = &series.deltas;
    for k in 1..=d.len() / n_repeats {
        let tail = &d[d.len() - n_repeats * k..];
        if (k..tail.len()).any(|i| tail[i] != tail[i - k]) {
            continue;
        }
        let period: u64 = tail[tail.len() - k..].iter().sum();
        if period.is_multiple_of(NUM_DATA_CHANNELS as u64)
            && is_legal_interval(period / NUM_DATA_CHANNELS as u64)
        {
            return Ok(period);
        }
    }
    Err(SnifferError::NoPeriodFound)
}

/// `c_int = T / 37`, rejected unless it is a legal interval.
pub fn derive_connection_interval(period_us: u64) -> Result<u64, SnifferError> {
    let n = NUM_DATA_CHANNELS as u64;
    if !period_us.is_multiple_of(n) || !is_legal_interval(period_us / n) {
        return Err(SnifferError::IntervalOutOfRange(period_us));
    }
    Ok(period_us / n)
}

use std::collections::VecDeque;

use super::SnifferError;
use crate::afh::NUM_DATA_CHANNELS;

/// Sliding record of hits and misses over the most recent expected events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissWindow {
    window_size: usize,
    threshold: usize,
    misses: VecDeque<bool>,
    miss_count: usize,
}

impl MissWindow {
    pub fn new(window_size: usize, threshold: usize) -> Result<Self, SnifferError> {
        if threshold == 0 || threshold > window_size {
            return Err(SnifferError::Config(format!(
                "miss threshold {threshold} must be in 1..={window_size}"
            )));
        }
        Ok(MissWindow {
            window_size,
            threshold,
            misses: VecDeque::with_capacity(window_size),
            miss_count: 0,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Records one expected event; returns true once the misses in the window
    /// reach the threshold.
    pub fn record(&mut self, heard: bool) -> bool {
        if self.misses.len() == self.window_size && self.misses.pop_front() == Some(true) {
            self.miss_count -= 1;
        }
        self.misses.push_back(!heard);
        self.miss_count += usize::from(!heard);
        self.tripped()
    }

    pub fn misses(&self) -> usize {
        self.miss_count
    }

    pub fn tripped(&self) -> bool {
        self.miss_count >= self.threshold
    }

    pub fn clear(&mut self) {
        self.misses.clear();
        self.miss_count = 0;
    }
}

/// Consecutive misses per unmapped channel. Random loss rarely repeats on
/// one slot period after period; a stale map does, even when it misses too
/// few events overall to trip a [`MissWindow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotStreaks {
    limit: u8,
    streaks: [u8; NUM_DATA_CHANNELS as usize],
}

impl SlotStreaks {
    pub fn new(limit: u8) -> Self {
        assert!(limit > 0, "streak limit must be positive");
        SlotStreaks {
            limit,
            streaks: [0; NUM_DATA_CHANNELS as usize],
        }
    }

    /// Records the event on `unmapped`; returns true once that slot has
    /// missed `limit` appearances in a row.
    pub fn record(&mut self, unmapped: u8, heard: bool) -> bool {
        let s = &mut self.streaks[usize::from(unmapped)];
        *s = if heard { 0 } else { s.saturating_add(1) };
        *s >= self.limit
    }

    pub fn clear(&mut self) {
        self.streaks = [0; NUM_DATA_CHANNELS as usize];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_threshold() {
        assert!(MissWindow::new(10, 0).is_err());
        assert!(MissWindow::new(10, 11).is_err());
        assert!(MissWindow::new(10, 10).is_ok());
    }

    #[test]
    fn trips_at_threshold_and_slides() {
        let mut w = MissWindow::new(4, 2).unwrap();
        assert!(!w.record(false));
        assert!(!w.record(true));
        assert!(!w.record(true));
        assert!(w.record(false));
        assert_eq!(w.misses(), 2);
        // the first miss slides out
        assert!(!w.record(true));
        assert_eq!(w.misses(), 1);
        w.clear();
        assert_eq!(w.misses(), 0);
        assert!(!w.tripped());
    }

    #[test]
    fn streaks_are_per_slot() {
        let mut s = SlotStreaks::new(3);
        assert!(!s.record(4, false));
        assert!(!s.record(9, false));
        assert!(!s.record(4, false));
        assert!(!s.record(9, true));
        assert!(s.record(4, false));
        s.clear();
        assert!(!s.record(4, false));
    }
}

//! Hop-increment recovery from appearances on three channels.
//!
//! If channel `a` is truly mapped at `t1` and channel `b` truly mapped at `t2`,
//! `h = (t2 - t1) / c_int` hops separate them and `b - a = h * h_inc (mod 37)`.
//! Solving for `h_inc` gives one candidate per pair of appearances; remapped
//! appearances produce noise that is filtered by range, by agreement across
//! a third channel and finally by majority.

use std::collections::BTreeMap;

use super::{HopOutcome, SnifferError};
use crate::afh::{
    mod_inverse, unmapped_after, ChannelIndex, MAX_HOP_INCREMENT, MIN_HOP_INCREMENT,
    NUM_DATA_CHANNELS,
};

/// Receptions on one channel during one observation window of length `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppearanceSet {
    pub channel: ChannelIndex,
    /// Absolute start of the window, in microseconds.
    pub window_start_us: u64,
    /// Offsets into the window, each below `T`, ascending.
    pub offsets: Vec<u64>,
}

impl AppearanceSet {
    /// Collects receptions `times` (absolute anchors) made in the window
    /// `[window_start_us, window_start_us + period_us)`. Times outside the
    /// window are dropped.
    pub fn from_times(
        channel: ChannelIndex,
        window_start_us: u64,
        period_us: u64,
        times: impl IntoIterator<Item = u64>,
    ) -> Self {
        let mut offsets: Vec<u64> = times
            .into_iter()
            .filter(|&t| t >= window_start_us && t - window_start_us < period_us)
            .map(|t| t - window_start_us)
            .collect();
        offsets.sort_unstable();
        offsets.dedup();
        AppearanceSet {
            channel,
            window_start_us,
            offsets,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = u64> + '_ {
        self.offsets.iter().map(move |o| self.window_start_us + o)
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// A reception believed to be truly mapped: its unmapped channel equals the
/// channel it was heard on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrueChannel {
    pub channel: ChannelIndex,
    pub time_us: u64,
}

/// Number of connection events between two anchors, rounded to the nearest
/// integer. Fails when the gap is further than `tolerance_us` from the grid.
pub fn hops_between(
    t1: u64,
    t2: u64,
    c_int_us: u64,
    tolerance_us: u64,
) -> Result<u64, SnifferError> {
    if t2 <= t1 || c_int_us == 0 {
        return Err(SnifferError::NotOnGrid { t1, t2, c_int_us });
    }
    let gap = t2 - t1;
    let hops = (gap + c_int_us / 2) / c_int_us;
    let residual = gap.abs_diff(hops * c_int_us);
    if residual > tolerance_us {
        return Err(SnifferError::NotOnGrid { t1, t2, c_int_us });
    }
    Ok(hops)
}

/// Candidate hop increment for the pair (`a` at `t1`, `b` at `t2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub h_inc: u8,
    pub from_us: u64,
    pub to_us: u64,
}

/// Solves `h * h_inc = b - a (mod 37)` for every pair of appearances and
/// keeps solutions in `5..=16`. Off-grid pairs and pairs 37k hops apart
/// contribute nothing.
pub fn candidate_increments(
    a: &AppearanceSet,
    b: &AppearanceSet,
    c_int_us: u64,
    tolerance_us: u64,
) -> Vec<Candidate> {
    let n = NUM_DATA_CHANNELS as i64;
    let diff = b.channel.get() as i64 - a.channel.get() as i64;
    let mut out = Vec::new();
    for t1 in a.times() {
        for t2 in b.times() {
            let Ok(h) = hops_between(t1, t2, c_int_us, tolerance_us) else {
                continue;
            };
            let Ok(inv) = mod_inverse(h as i64) else {
                continue;
            };
            let h_inc = (diff * inv as i64).rem_euclid(n) as u8;
            if (MIN_HOP_INCREMENT..=MAX_HOP_INCREMENT).contains(&h_inc) {
                out.push(Candidate {
                    h_inc,
                    from_us: t1,
                    to_us: t2,
                });
            }
        }
    }
    out
}

/// Result of intersecting the candidates of three channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementSolution {
    pub h_inc: u8,
    /// The appearances on the three channels that agree on `h_inc`.
    pub true_channels: [TrueChannel; 3],
    /// Every surviving value with multiplicity, in discovery order.
    pub votes: Vec<u8>,
    /// Every triple that voted for the winner; `true_channels` is the first.
    pub triples: Vec<[TrueChannel; 3]>,
}

/// Every appearance triple on (P, Q, R) whose two pairs agree on a hop
/// increment, chained through the shared appearance on Q.
pub fn chained_triples(
    p: &AppearanceSet,
    q: &AppearanceSet,
    r: &AppearanceSet,
    c_int_us: u64,
    tolerance_us: u64,
) -> Vec<(u8, [TrueChannel; 3])> {
    let pq = candidate_increments(p, q, c_int_us, tolerance_us);
    let qr = candidate_increments(q, r, c_int_us, tolerance_us);
    let mut out = Vec::new();
    for first in &pq {
        for second in qr.iter().filter(|c| c.from_us == first.to_us) {
            if first.h_inc == second.h_inc {
                out.push((
                    first.h_inc,
                    [
                        TrueChannel {
                            channel: p.channel,
                            time_us: first.from_us,
                        },
                        TrueChannel {
                            channel: q.channel,
                            time_us: first.to_us,
                        },
                        TrueChannel {
                            channel: r.channel,
                            time_us: second.to_us,
                        },
                    ],
                ));
            }
        }
    }
    out
}

/// Intersects the candidates of (P, Q) with those of (Q, R), chaining through
/// the shared appearance on Q, and returns the majority value.
pub fn derive_hop_increment(
    p: &AppearanceSet,
    q: &AppearanceSet,
    r: &AppearanceSet,
    c_int_us: u64,
    tolerance_us: u64,
) -> Result<IncrementSolution, SnifferError> {
    let triples = chained_triples(p, q, r, c_int_us, tolerance_us);
    let votes: Vec<u8> = triples.iter().map(|&(v, _)| v).collect();

    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &v in &votes {
        *counts.entry(v).or_default() += 1;
    }
    let winner = counts
        .iter()
        .find(|&(_, &c)| 2 * c > votes.len())
        .map(|(&v, _)| v)
        .ok_or(SnifferError::Ambiguous {
            candidates: votes.len(),
        })?;

    let triples: Vec<[TrueChannel; 3]> = triples
        .into_iter()
        .filter(|&(v, _)| v == winner)
        .map(|(_, t)| t)
        .collect();
    Ok(IncrementSolution {
        h_inc: winner,
        true_channels: triples[0],
        votes,
        triples,
    })
}

/// Earlier listening, for [`reference_consistent`].
#[derive(Debug, Clone, Copy)]
pub struct Evidence<'a> {
    /// Full-period windows, `period_us` long, on one channel each.
    pub sets: &'a [AppearanceSet],
    pub period_us: u64,
    /// Single events listened to on a known channel.
    pub hops: &'a [HopOutcome],
}

/// Checks a supposed truly mapped reception against earlier listening.
///
/// Hops are typically those of a failed map scan. A channel counts as used
/// once the target was heard on it. Under the hypothesis that `reference` is truly mapped, every listened event has a
/// known unmapped channel `u`, and:
///
/// - if `u` is the listened channel and that channel is used, the target must
///   have been heard, except for at most half of these checks plus
///   `max_lost`, for packet loss;
/// - if the target was heard on another channel, `u` must be unused, so it
///   cannot be a channel the target was ever heard on;
/// - all such `u` landing on one channel share a remainder modulo the number
///   of used channels, which is at least the count of channels heard so far.
///
/// On a static map the true reference passes unless more than that share of
/// its truly mapped events was lost. A remap target taken for a truly mapped reception shifts the
/// whole unmapped sequence and almost always breaks one of the rules.
pub fn reference_consistent(
    reference: TrueChannel,
    h_inc: u8,
    c_int_us: u64,
    tolerance_us: u64,
    evidence: &Evidence<'_>,
    max_lost: usize,
) -> bool {
    reference_violations(reference, h_inc, c_int_us, tolerance_us, evidence, max_lost) == 0
}

/// Number of broken rules behind [`reference_consistent`]: one per heard
/// event contradicting the second rule, one per loss beyond the allowance,
/// and one if the remainder rule fails. Evidence spanning a map update can
/// break a few rules even for the true reference.
pub fn reference_violations(
    reference: TrueChannel,
    h_inc: u8,
    c_int_us: u64,
    tolerance_us: u64,
    evidence: &Evidence<'_>,
    max_lost: usize,
) -> usize {
    let Evidence {
        sets,
        period_us,
        hops,
    } = *evidence;
    let mut known_used: Vec<u8> = sets
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.channel.get())
        .chain(hops.iter().filter(|h| h.heard).map(|h| h.tuned.get()))
        .collect();
    known_used.sort_unstable();
    known_used.dedup();

    let c = c_int_us as i64;
    let r = reference.time_us as i64;
    let unmapped_at = |anchor: i64| -> Option<u8> {
        let hops = (anchor - r + c / 2).div_euclid(c);
        ((anchor - r - hops * c).unsigned_abs() <= tolerance_us)
            .then(|| unmapped_after(reference.channel.get(), h_inc, hops))
    };

    let mut listened: Vec<(u8, i64, bool)> = Vec::new();
    for set in sets {
        let start = set.window_start_us as i64;
        let first = (start - r).div_euclid(c) + i64::from((start - r).rem_euclid(c) != 0);
        for k in first..first + NUM_DATA_CHANNELS as i64 {
            let anchor = r + k * c;
            if anchor >= start + period_us as i64 {
                break;
            }
            let heard = set
                .times()
                .any(|t| (t as i64).abs_diff(anchor) <= tolerance_us);
            listened.push((set.channel.get(), anchor, heard));
        }
    }
    listened.extend(
        hops.iter()
            .map(|h| (h.tuned.get(), h.anchor_us as i64, h.heard)),
    );

    let mut checks = 0;
    let mut lost = 0;
    let mut violations = 0;
    let mut remainders: BTreeMap<u8, u8> = BTreeMap::new();
    let mut g = 0u64;
    for (channel, anchor, heard) in listened {
        let Some(u) = unmapped_at(anchor) else {
            violations += 1;
            continue;
        };
        if u == channel {
            if known_used.binary_search(&channel).is_ok() {
                checks += 1;
                lost += usize::from(!heard);
            }
        } else if heard {
            if known_used.binary_search(&u).is_ok() {
                violations += 1;
            }
            let first_u = *remainders.entry(channel).or_insert(u);
            g = gcd(g, first_u.abs_diff(u) as u64);
        }
    }
    violations += lost.saturating_sub(max_lost + checks / 2);
    let floor = known_used.len().max(2) as u64;
    if g != 0 && !(floor..=NUM_DATA_CHANNELS as u64).any(|n| g.is_multiple_of(n)) {
        violations += 1;
    }
    violations
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C_INT: u64 = 100_000;
    const T: u64 = 37 * C_INT;

    fn set(channel: u8, start: u64, times: &[u64]) -> AppearanceSet {
        AppearanceSet::from_times(
            ChannelIndex::new(channel).unwrap(),
            start,
            T,
            times.iter().copied(),
        )
    }

    #[test]
    fn hops_between_examples() {
        assert_eq!(hops_between(0, 500_000, C_INT, C_INT / 4), Ok(5));
        assert_eq!(hops_between(0, 501_000, C_INT, 25_000), Ok(5));
        assert_eq!(hops_between(0, 476_000, C_INT, 25_000), Ok(5));
        assert!(matches!(
            hops_between(0, 550_000, C_INT, C_INT / 4),
            Err(SnifferError::NotOnGrid { .. })
        ));
        assert!(hops_between(500, 500, C_INT, 1).is_err());
        assert!(hops_between(0, 125_000, C_INT, 25_000).is_ok());
        assert!(hops_between(0, 126_000, C_INT, 25_000).is_err());
    }

    #[test]
    fn full_map_pair() {
        // h_inc = 7: channel 0 then channel 14 two hops later
        let a = set(0, 0, &[0]);
        let b = set(14, 1, &[2 * C_INT]);
        let cands = candidate_increments(&a, &b, C_INT, C_INT / 4);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].h_inc, 7);
    }

    #[test]
    fn degenerate_pair_yields_nothing() {
        let a = set(0, 0, &[0]);
        let b = set(0, T, &[T]);
        assert!(candidate_increments(&a, &b, C_INT, C_INT / 4).is_empty());
    }

    #[test]
    fn majority_needs_strictly_more_than_half() {
        // With the full map and h_inc = 9 starting from unmapped 0 at t = 0:
        // channel 9 at hop 1, channel 18 at hop 2.
        let p = set(0, 0, &[0]);
        let q = set(9, C_INT, &[C_INT]);
        let r = set(18, 2 * C_INT, &[2 * C_INT]);
        let sol = derive_hop_increment(&p, &q, &r, C_INT, C_INT / 4).unwrap();
        assert_eq!(sol.h_inc, 9);
        assert_eq!(sol.votes, vec![9]);
        assert_eq!(sol.true_channels[1].time_us, C_INT);
    }

    #[test]
    fn corrupted_offset_is_ambiguous() {
        let p = set(0, 0, &[0]);
        let q = set(9, C_INT, &[C_INT]);
        // channel 18 seen one hop too late: 0->9 says 9, 9->18 over 2 hops says 23
        let r = set(18, 2 * C_INT, &[3 * C_INT]);
        assert_eq!(
            derive_hop_increment(&p, &q, &r, C_INT, C_INT / 4),
            Err(SnifferError::Ambiguous { candidates: 0 })
        );
    }

    #[test]
    fn remap_target_fails_consistency() {
        // map 0..=8, h_inc = 7, event k (k >= 0) anchored at (k + 1) * C_INT
        // with unmapped 7 * (k + 1) mod 37
        let channel = |u: u8| if u < 9 { u } else { u % 9 };
        let unmapped = |k: u64| crate::afh::unmapped_after(0, 7, k as i64 + 1);
        let window = |ch: u8, from: u64| {
            let times = (0..200u64)
                .filter(|&k| channel(unmapped(k)) == ch)
                .map(|k| (k + 1) * C_INT);
            AppearanceSet::from_times(ChannelIndex::new(ch).unwrap(), from, T, times)
        };
        let sets = [
            window(0, C_INT),
            window(1, C_INT + T),
            window(2, C_INT + 2 * T),
        ];
        let ev = Evidence {
            sets: &sets,
            period_us: T,
            hops: &[],
        };
        let truly = TrueChannel {
            channel: ChannelIndex::new(7).unwrap(),
            time_us: C_INT,
        };
        assert!(reference_consistent(truly, 7, C_INT, C_INT / 4, &ev, 0));
        // event 1 has unmapped 14 and lands on channel 5
        let remapped = TrueChannel {
            channel: ChannelIndex::new(5).unwrap(),
            time_us: 2 * C_INT,
        };
        assert_eq!(channel(unmapped(1)), 5);
        assert!(!reference_consistent(remapped, 7, C_INT, C_INT / 4, &ev, 0));
        // wrong increment
        assert!(!reference_consistent(truly, 8, C_INT, C_INT / 4, &ev, 0));
    }

    #[test]
    fn from_times_clips_to_window() {
        let s = set(3, 1_000, &[999, 1_000, 5_000, 1_000 + T]);
        assert_eq!(s.offsets, vec![0, 4_000]);
        assert_eq!(s.times().collect::<Vec<_>>(), vec![1_000, 5_000]);
    }
}

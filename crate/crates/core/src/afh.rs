//! BLE data-channel arithmetic: channel selection algorithm #1 with remapping.
//!
//! The unmapped channel walks `(luc + h_inc) mod 37`. When the unmapped channel
//! is marked unused in the channel map it is replaced by
//! `used_list[unmapped mod popcount]`, where `used_list` holds the used channels
//! in ascending order.
//!
//! Everything here is a pure function over small value types. The same code
//! drives the simulated victim and the sniffer's predictions.

use std::fmt;

use thiserror::Error;

/// Number of BLE data channels.
pub const NUM_DATA_CHANNELS: u8 = 37;

/// Smallest legal connection interval in microseconds.
pub const MIN_CONN_INTERVAL_US: u32 = 7_500;
/// Largest legal connection interval in microseconds.
pub const MAX_CONN_INTERVAL_US: u32 = 4_000_000;
/// Connection intervals are multiples of this step.
pub const CONN_INTERVAL_STEP_US: u32 = 1_250;

pub const MIN_HOP_INCREMENT: u8 = 5;
pub const MAX_HOP_INCREMENT: u8 = 16;

/// Minimum number of used channels in a valid map.
pub const MIN_USED_CHANNELS: u32 = 2;

const ALL_DATA_CHANNELS: u64 = (1u64 << NUM_DATA_CHANNELS) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AfhError {
    #[error("channel {0} is not a data channel (expected 0..=36)")]
    NotADataChannel(u8),
    #[error("hop increment {0} outside 5..=16")]
    HopIncrementOutOfRange(u8),
    #[error("{0} has no inverse modulo 37")]
    NoInverse(i64),
    #[error("channel map uses {0} channels, at least 2 required")]
    SparseMap(u32),
    #[error("channel map bits beyond channel 36: {0:#x}")]
    MapOutOfRange(u64),
    #[error("invalid connection parameters: {}", join_violations(.0))]
    InvalidParams(Vec<ParamViolation>),
}

fn join_violations(v: &[ParamViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A BLE data channel, `0..=36`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelIndex(u8);

impl ChannelIndex {
    pub fn new(value: u8) -> Result<Self, AfhError> {
        if value < NUM_DATA_CHANNELS {
            Ok(ChannelIndex(value))
        } else {
            Err(AfhError::NotADataChannel(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Iterates all 37 data channels in ascending order.
    pub fn all() -> impl Iterator<Item = ChannelIndex> {
        (0..NUM_DATA_CHANNELS).map(ChannelIndex)
    }
}

impl fmt::Display for ChannelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for ChannelIndex {
    type Error = AfhError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        ChannelIndex::new(value)
    }
}

/// Used/unused classification of the 37 data channels.
///
/// The bit mask may describe fewer than two used channels; such a map is
/// representable (so that it can be reported) but rejected by every operation
/// that hops on it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ChannelMap(u64);

impl ChannelMap {
    /// All 37 data channels used.
    pub const FULL: ChannelMap = ChannelMap(ALL_DATA_CHANNELS);

    /// Map with no channel used. Invalid for hopping; the starting point of a scan.
    pub const EMPTY: ChannelMap = ChannelMap(0);

    pub fn from_bits(bits: u64) -> Result<Self, AfhError> {
        if bits & !ALL_DATA_CHANNELS != 0 {
            return Err(AfhError::MapOutOfRange(bits));
        }
        Ok(ChannelMap(bits))
    }

    pub fn from_channels<I>(channels: I) -> Self
    where
        I: IntoIterator<Item = ChannelIndex>,
    {
        ChannelMap(channels.into_iter().fold(0, |acc, c| acc | (1u64 << c.0)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_used(self, channel: ChannelIndex) -> bool {
        self.0 & (1u64 << channel.0) != 0
    }

    pub fn set_used(&mut self, channel: ChannelIndex, used: bool) {
        if used {
            self.0 |= 1u64 << channel.0;
        } else {
            self.0 &= !(1u64 << channel.0);
        }
    }

    pub fn popcount(self) -> u32 {
        self.0.count_ones()
    }

    /// Used channels in ascending order.
    pub fn used_list(self) -> Vec<ChannelIndex> {
        self.used_iter().collect()
    }

    pub fn used_iter(self) -> impl Iterator<Item = ChannelIndex> {
        ChannelIndex::all().filter(move |&c| self.is_used(c))
    }

    pub fn unused_iter(self) -> impl Iterator<Item = ChannelIndex> {
        ChannelIndex::all().filter(move |&c| !self.is_used(c))
    }

    /// Fails unless at least two channels are used.
    pub fn check(self) -> Result<Self, AfhError> {
        if self.popcount() < MIN_USED_CHANNELS {
            Err(AfhError::SparseMap(self.popcount()))
        } else {
            Ok(self)
        }
    }

    /// Ten lowercase hex digits, channel 0 in the least significant bit.
    pub fn to_hex(self) -> String {
        format!("{:010x}", self.0)
    }

    pub fn parse_hex(s: &str) -> Result<Self, AfhError> {
        let digits = s.trim_start_matches("0x").trim_start_matches("0X");
        let bits =
            u64::from_str_radix(digits, 16).map_err(|_| AfhError::MapOutOfRange(u64::MAX))?;
        ChannelMap::from_bits(bits)
    }
}

impl fmt::Debug for ChannelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChannelMap({:#012x}, {} used)", self.0, self.popcount())
    }
}

impl fmt::Display for ChannelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Ground-truth hopping state of a connection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionParams {
    pub access_address: u32,
    pub c_int_us: u32,
    pub h_inc: u8,
    pub c_map: ChannelMap,
    /// Last unmapped channel; the first event hops from here.
    pub luc: u8,
}

/// One broken invariant of a [`ConnectionParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamViolation {
    IntervalOutOfRange(u32),
    IntervalNotOnGrid(u32),
    HopIncrementOutOfRange(u8),
    TooFewChannels(u32),
    LucOutOfRange(u8),
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamViolation::IntervalOutOfRange(v) => {
                write!(f, "c_int_us={v} outside [7500, 4000000]")
            }
            ParamViolation::IntervalNotOnGrid(v) => {
                write!(f, "c_int_us={v} is not a multiple of 1250")
            }
            ParamViolation::HopIncrementOutOfRange(v) => write!(f, "h_inc={v} outside [5, 16]"),
            ParamViolation::TooFewChannels(n) => {
                write!(f, "map uses {n} channels, at least 2 required")
            }
            ParamViolation::LucOutOfRange(v) => write!(f, "luc={v} outside [0, 36]"),
        }
    }
}

/// Returns every violated invariant of `p`; empty means valid.
pub fn param_violations(p: &ConnectionParams) -> Vec<ParamViolation> {
    let mut out = Vec::new();
    if !(MIN_CONN_INTERVAL_US..=MAX_CONN_INTERVAL_US).contains(&p.c_int_us) {
        out.push(ParamViolation::IntervalOutOfRange(p.c_int_us));
    }
    if !p.c_int_us.is_multiple_of(CONN_INTERVAL_STEP_US) {
        out.push(ParamViolation::IntervalNotOnGrid(p.c_int_us));
    }
    if !(MIN_HOP_INCREMENT..=MAX_HOP_INCREMENT).contains(&p.h_inc) {
        out.push(ParamViolation::HopIncrementOutOfRange(p.h_inc));
    }
    if p.c_map.popcount() < MIN_USED_CHANNELS {
        out.push(ParamViolation::TooFewChannels(p.c_map.popcount()));
    }
    if p.luc >= NUM_DATA_CHANNELS {
        out.push(ParamViolation::LucOutOfRange(p.luc));
    }
    out
}

pub fn validate_params(p: &ConnectionParams) -> Result<(), AfhError> {
    let v = param_violations(p);
    if v.is_empty() {
        Ok(())
    } else {
        Err(AfhError::InvalidParams(v))
    }
}

/// True when `c_int_us` is a legal connection interval.
pub fn is_legal_interval(c_int_us: u64) -> bool {
    (MIN_CONN_INTERVAL_US as u64..=MAX_CONN_INTERVAL_US as u64).contains(&c_int_us)
        && c_int_us.is_multiple_of(CONN_INTERVAL_STEP_US as u64)
}

/// Position in the unmapped hop sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HopState {
    pub luc: u8,
    /// Events selected so far. Diagnostic only; channel selection ignores it.
    pub event_counter: u64,
}

impl HopState {
    pub fn new(luc: u8) -> Result<Self, AfhError> {
        if luc >= NUM_DATA_CHANNELS {
            return Err(AfhError::NotADataChannel(luc));
        }
        Ok(HopState {
            luc,
            event_counter: 0,
        })
    }
}

fn check_hop_increment(h_inc: u8) -> Result<(), AfhError> {
    if (MIN_HOP_INCREMENT..=MAX_HOP_INCREMENT).contains(&h_inc) {
        Ok(())
    } else {
        Err(AfhError::HopIncrementOutOfRange(h_inc))
    }
}

/// `(luc + h_inc) mod 37`.
pub fn unmapped_next(state: HopState, h_inc: u8) -> Result<u8, AfhError> {
    check_hop_increment(h_inc)?;
    if state.luc >= NUM_DATA_CHANNELS {
        return Err(AfhError::NotADataChannel(state.luc));
    }
    Ok((state.luc + h_inc) % NUM_DATA_CHANNELS)
}

/// Maps an unmapped channel onto a used channel of `c_map`.
pub fn remap(unmapped: u8, c_map: ChannelMap) -> Result<ChannelIndex, AfhError> {
    let unmapped = ChannelIndex::new(unmapped)?;
    c_map.check()?;
    if c_map.is_used(unmapped) {
        return Ok(unmapped);
    }
    let index = unmapped.0 as usize % c_map.popcount() as usize;
    Ok(c_map
        .used_iter()
        .nth(index)
        .expect("remapping index below popcount"))
}

/// One hop: returns the mapped channel and the advanced state. The new `luc`
/// is the unmapped value, not the remapped one.
pub fn select_next_channel(
    state: HopState,
    h_inc: u8,
    c_map: ChannelMap,
) -> Result<(ChannelIndex, HopState), AfhError> {
    let unmapped = unmapped_next(state, h_inc)?;
    let channel = remap(unmapped, c_map)?;
    Ok((
        channel,
        HopState {
            luc: unmapped,
            event_counter: state.event_counter + 1,
        },
    ))
}

/// First `n` (event index, mapped channel) pairs of the connection,
/// starting from `p.luc`.
pub fn hop_sequence(p: &ConnectionParams, n: usize) -> Result<Vec<(u64, ChannelIndex)>, AfhError> {
    validate_params(p)?;
    let mut state = HopState::new(p.luc)?;
    let mut out = Vec::with_capacity(n);
    for event in 0..n as u64 {
        let (channel, next) = select_next_channel(state, p.h_inc, p.c_map)?;
        out.push((event, channel));
        state = next;
    }
    Ok(out)
}

/// Unmapped channel `hops` events after an event whose unmapped channel was
/// `from`. `hops` may be negative.
pub fn unmapped_after(from: u8, h_inc: u8, hops: i64) -> u8 {
    let n = NUM_DATA_CHANNELS as i64;
    (from as i64 + (h_inc as i64 % n) * hops.rem_euclid(n)).rem_euclid(n) as u8
}

/// Multiplicative inverse modulo 37, in `1..=36`.
pub fn mod_inverse(x: i64) -> Result<u8, AfhError> {
    let m = NUM_DATA_CHANNELS as i64;
    let a = x.rem_euclid(m);
    if a == 0 {
        return Err(AfhError::NoInverse(x));
    }
    // extended Euclid on (a, m)
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    Ok(old_s.rem_euclid(m) as u8)
}

/// Writes `event_index,channel` lines.
pub fn format_hop_fixture(seq: &[(u64, ChannelIndex)]) -> String {
    let mut out = String::new();
    for (event, channel) in seq {
        out.push_str(&format!("{event},{channel}\n"));
    }
    out
}

/// Parses `event_index,channel` lines. Blank lines and `#` comments are skipped.
pub fn parse_hop_fixture(text: &str) -> Result<Vec<(u64, ChannelIndex)>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (event, channel) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `event_index,channel`", lineno + 1))?;
        let event: u64 = event
            .trim()
            .parse()
            .map_err(|e| format!("line {}: event index: {e}", lineno + 1))?;
        let channel: u8 = channel
            .trim()
            .parse()
            .map_err(|e| format!("line {}: channel: {e}", lineno + 1))?;
        let channel =
            ChannelIndex::new(channel).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        out.push((event, channel));
    }
    Ok(out)
}

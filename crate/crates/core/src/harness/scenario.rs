use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::afh::{
    param_violations, ChannelIndex, ChannelMap, ConnectionParams, MAX_HOP_INCREMENT,
    MIN_HOP_INCREMENT, NUM_DATA_CHANNELS,
};
use crate::sim::{LossModel, MapGenerator, MapUpdateSchedule};
use crate::sniffer::SnifferConfig;

/// Environment variable overriding the scenario seed.
pub const SEED_ENV: &str = "HOPCRACK_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopIncrementSpec {
    Fixed(u8),
    /// Drawn per trial from `5..=16`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapSpec {
    Fixed(ChannelMap),
    /// A fresh map with this many used channels per trial.
    Random(u32),
}

/// Everything needed to run a batch of seeded trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub c_int_us: u32,
    pub h_inc: HopIncrementSpec,
    pub map: MapSpec,
    /// `None` draws a starting unmapped channel per trial.
    pub luc: Option<u8>,
    pub access_address: u32,
    pub update_period_us: Option<u64>,
    pub max_remove: u32,
    pub min_used: u32,
    pub p_loss: f64,
    pub packet_count: u32,
    pub send_period_us: u64,
    /// Fixed start of the data burst; `None` starts it when the cracker locks on.
    pub data_start_us: Option<u64>,
    pub seed: u64,
    pub trials: u32,
    pub sniffer: SnifferConfig,
    pub retune_latency_us: u64,
    /// Acquisition budget in connection events.
    pub hop_budget: u64,
    /// Update announcements the comparator is forced to miss.
    pub forced_update_misses: u32,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "default".into(),
            c_int_us: 100_000,
            h_inc: HopIncrementSpec::Random,
            map: MapSpec::Random(20),
            luc: None,
            access_address: 0x50654c1a,
            update_period_us: None,
            max_remove: 5,
            min_used: 10,
            p_loss: 0.0,
            packet_count: 100,
            send_period_us: 100_000,
            data_start_us: None,
            seed: 1,
            trials: 25,
            sniffer: SnifferConfig::default(),
            retune_latency_us: 0,
            hop_budget: 50 * 37,
            forced_update_misses: 0,
        }
    }
}

/// Per-trial concrete setup drawn from a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub params: ConnectionParams,
    pub schedule: MapUpdateSchedule,
    pub loss: LossModel,
    pub first_anchor_us: u64,
    pub sim_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: &str, msg: String| {
            Err(HarnessError::Invalid {
                key: key.into(),
                msg,
            })
        };
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if let HopIncrementSpec::Fixed(h) = self.h_inc {
            if !(MIN_HOP_INCREMENT..=MAX_HOP_INCREMENT).contains(&h) {
                return bad("h_inc", format!("{h} outside [5, 16]"));
            }
        }
        match self.map {
            MapSpec::Fixed(m) if m.popcount() < 2 => {
                return bad(
                    "map",
                    format!("{} used channels, at least 2 required", m.popcount()),
                )
            }
            MapSpec::Random(n) if !(2..=NUM_DATA_CHANNELS as u32).contains(&n) => {
                return bad("map", format!("random map size {n} outside [2, 37]"))
            }
            _ => {}
        }
        let probe = ConnectionParams {
            access_address: self.access_address,
            c_int_us: self.c_int_us,
            h_inc: MIN_HOP_INCREMENT,
            c_map: ChannelMap::FULL,
            luc: self.luc.unwrap_or(0),
        };
        if let Some(v) = param_violations(&probe).first() {
            let key = if self.luc.is_some_and(|l| l >= NUM_DATA_CHANNELS) {
                "luc"
            } else {
                "c_int_us"
            };
            return bad(key, v.to_string());
        }
        if let Some(p) = self.update_period_us {
            if p < self.c_int_us as u64 {
                return bad(
                    "update_period_s",
                    "shorter than the connection interval".into(),
                );
            }
        }
        if self.min_used < 2 {
            return bad("min_used", "must be at least 2".into());
        }
        if !(0.0..=1.0).contains(&self.p_loss) {
            return bad("p_loss", format!("{} outside [0, 1]", self.p_loss));
        }
        if self.send_period_us == 0 {
            return bad("send_period_ms", "must be positive".into());
        }
        if self.retune_latency_us > self.c_int_us as u64 / 2 {
            return bad(
                "retune_latency_us",
                "exceeds half the connection interval".into(),
            );
        }
        if self.hop_budget == 0 {
            return bad("hop_budget", "must be positive".into());
        }
        self.sniffer.validate().map_err(|e| HarnessError::Invalid {
            key: "sniffer".into(),
            msg: e.to_string(),
        })
    }

    /// Concrete connection for `trial`; a pure function of `(seed, trial)`.
    pub fn setup(&self, trial: u32) -> Result<TrialSetup, HarnessError> {
        let mut rng = trial_rng(self.seed, trial);
        let h_inc = match self.h_inc {
            HopIncrementSpec::Fixed(h) => h,
            HopIncrementSpec::Random => rng.gen_range(MIN_HOP_INCREMENT..=MAX_HOP_INCREMENT),
        };
        let c_map = match self.map {
            MapSpec::Fixed(m) => m,
            MapSpec::Random(n) => random_map(&mut rng, n),
        };
        let luc = match self.luc {
            Some(l) => l,
            None => rng.gen_range(0..NUM_DATA_CHANNELS),
        };
        let c_int = self.c_int_us as u64;
        let first_anchor_us = rng.gen_range(1..=c_int);
        let schedule = match self.update_period_us {
            None => MapUpdateSchedule::none(),
            Some(period) => MapUpdateSchedule::periodic(
                period,
                MapGenerator::RemoveRestore {
                    max_remove: self.max_remove,
                    min_used: self.min_used,
                },
            )
            .with_first_offset(rng.gen_range(1..=period)),
        };
        let loss = LossModel::uniform(self.p_loss).map_err(|e| HarnessError::Invalid {
            key: "p_loss".into(),
            msg: e.to_string(),
        })?;
        Ok(TrialSetup {
            params: ConnectionParams {
                access_address: self.access_address,
                c_int_us: self.c_int_us,
                h_inc,
                c_map,
                luc,
            },
            schedule,
            loss,
            first_anchor_us,
            sim_seed: rng.gen(),
        })
    }

    /// Parses flat `key = value` text. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut s = Scenario::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Syntax {
                line: lineno + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            s.set(key.trim(), value.trim())?;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut s = Scenario::parse(&text)?;
        if s.name == "default" {
            if let Some(stem) = path.file_stem() {
                s.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(s)
    }

    /// Applies `HOPCRACK_SEED` when set.
    pub fn apply_env(&mut self) -> Result<(), HarnessError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = parse_num(SEED_ENV, &v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "name" => self.name = value.to_string(),
            "c_int_us" => self.c_int_us = parse_num(key, value)?,
            "h_inc" => {
                self.h_inc = if value == "random" {
                    HopIncrementSpec::Random
                } else {
                    HopIncrementSpec::Fixed(parse_num(key, value)?)
                }
            }
            "map" => self.map = parse_map(value)?,
            "luc" => {
                self.luc = if value == "random" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "access_address" => {
                let digits = value.trim_start_matches("0x");
                self.access_address =
                    u32::from_str_radix(digits, 16).map_err(|e| invalid(key, e))?;
            }
            "update_period_s" => {
                let secs: f64 = parse_num(key, value)?;
                if !(secs >= 0.0 && secs.is_finite()) {
                    return Err(invalid(key, "must be a non-negative number of seconds"));
                }
                self.update_period_us = (secs > 0.0).then(|| (secs * 1e6).round() as u64);
            }
            "max_remove" => self.max_remove = parse_num(key, value)?,
            "min_used" => self.min_used = parse_num(key, value)?,
            "p_loss" => self.p_loss = parse_num(key, value)?,
            "send_period_ms" => {
                let ms: f64 = parse_num(key, value)?;
                if !(ms > 0.0 && ms.is_finite()) {
                    return Err(invalid(key, "must be positive"));
                }
                self.send_period_us = (ms * 1e3).round() as u64;
            }
            "packet_count" => self.packet_count = parse_num(key, value)?,
            "data_start_s" => {
                let secs: f64 = parse_num(key, value)?;
                if !(secs >= 0.0 && secs.is_finite()) {
                    return Err(invalid(key, "must be a non-negative number of seconds"));
                }
                self.data_start_us = Some((secs * 1e6).round() as u64);
            }
            "seed" => self.seed = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "n_repeats" => self.sniffer.n_repeats = parse_num(key, value)?,
            "window" => self.sniffer.window_size = parse_num(key, value)?,
            "threshold" => self.sniffer.threshold = parse_num(key, value)?,
            "lead_margin_us" => self.sniffer.lead_margin_us = Some(parse_num(key, value)?),
            "start_channel" => self.sniffer.start_channel = parse_num(key, value)?,
            "silence_timeout_us" => self.sniffer.silence_timeout_us = parse_num(key, value)?,
            "retune_latency_us" => self.retune_latency_us = parse_num(key, value)?,
            "hop_budget" => self.hop_budget = parse_num(key, value)?,
            "forced_update_misses" => self.forced_update_misses = parse_num(key, value)?,
            _ => {
                return Err(HarnessError::Invalid {
                    key: key.into(),
                    msg: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    /// Flat `key = value` rendering accepted by [`Scenario::parse`].
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("name = {}", self.name),
            format!("c_int_us = {}", self.c_int_us),
            format!("h_inc = {}", self.h_inc),
            format!("map = {}", self.map),
            format!(
                "luc = {}",
                self.luc.map_or("random".to_string(), |l| l.to_string())
            ),
            format!("access_address = {:08x}", self.access_address),
            format!(
                "update_period_s = {}",
                self.update_period_us.map_or(0.0, |p| p as f64 / 1e6)
            ),
            format!("max_remove = {}", self.max_remove),
            format!("min_used = {}", self.min_used),
            format!("p_loss = {}", self.p_loss),
            format!("send_period_ms = {}", self.send_period_us as f64 / 1e3),
            format!("packet_count = {}", self.packet_count),
        ];
        if let Some(t) = self.data_start_us {
            lines.push(format!("data_start_s = {}", t as f64 / 1e6));
        }
        lines.extend([
            format!("seed = {}", self.seed),
            format!("trials = {}", self.trials),
            format!("n_repeats = {}", self.sniffer.n_repeats),
            format!("window = {}", self.sniffer.window_size),
            format!("threshold = {}", self.sniffer.threshold),
        ]);
        if let Some(l) = self.sniffer.lead_margin_us {
            lines.push(format!("lead_margin_us = {l}"));
        }
        lines.extend([
            format!("start_channel = {}", self.sniffer.start_channel),
            format!("silence_timeout_us = {}", self.sniffer.silence_timeout_us),
            format!("retune_latency_us = {}", self.retune_latency_us),
            format!("hop_budget = {}", self.hop_budget),
            format!("forced_update_misses = {}", self.forced_update_misses),
        ]);
        lines.join("\n") + "\n"
    }
}

impl fmt::Display for HopIncrementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopIncrementSpec::Fixed(h) => write!(f, "{h}"),
            HopIncrementSpec::Random => f.write_str("random"),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Fixed(m) if *m == ChannelMap::FULL => f.write_str("full"),
            MapSpec::Fixed(m) => write!(f, "0x{}", m.to_hex()),
            MapSpec::Random(n) => write!(f, "random:{n}"),
        }
    }
}

fn invalid(key: &str, msg: impl fmt::Display) -> HarnessError {
    HarnessError::Invalid {
        key: key.into(),
        msg: msg.to_string(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| invalid(key, format!("`{value}`: {e}")))
}

/// `full`, `random:N`, `0x<hex>`, or channel lists such as `0-8,12,20-22`.
pub fn parse_map(value: &str) -> Result<MapSpec, HarnessError> {
    if value == "full" {
        return Ok(MapSpec::Fixed(ChannelMap::FULL));
    }
    if let Some(n) = value.strip_prefix("random:") {
        return Ok(MapSpec::Random(parse_num("map", n)?));
    }
    if value.starts_with("0x") {
        return ChannelMap::parse_hex(value)
            .map(MapSpec::Fixed)
            .map_err(|e| invalid("map", e));
    }
    let mut map = ChannelMap::EMPTY;
    for part in value.split(',') {
        let part = part.trim();
        let (lo, hi) = match part.split_once('-') {
            Some((lo, hi)) => (
                parse_num::<u8>("map", lo.trim())?,
                parse_num::<u8>("map", hi.trim())?,
            ),
            None => {
                let c = parse_num::<u8>("map", part)?;
                (c, c)
            }
        };
        if lo > hi {
            return Err(invalid("map", format!("empty range `{part}`")));
        }
        for c in lo..=hi {
            map.set_used(ChannelIndex::new(c).map_err(|e| invalid("map", e))?, true);
        }
    }
    Ok(MapSpec::Fixed(map))
}

pub(crate) fn trial_rng(seed: u64, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn random_map(rng: &mut ChaCha8Rng, used: u32) -> ChannelMap {
    ChannelMap::from_channels(
        sample(rng, NUM_DATA_CHANNELS as usize, used as usize)
            .into_iter()
            .map(|c| ChannelIndex::new(c as u8).expect("sampled below 37")),
    )
}

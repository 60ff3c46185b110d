//! States, actions, rewards and the tabular Q-function.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jamming::{JammingAction, Scheme};

pub const NUM_ROUTES: usize = 2;
pub const NUM_MCS: usize = 4;
pub const NUM_STATES: usize = NUM_ROUTES * NUM_MCS;
pub const ENERGY_LEVELS: usize = 20;
/// Pilot-length classes the jammer can choose from.
pub const PILOT_LENGTHS: [usize; 4] = [4, 16, 128, 512];
pub const NUM_ACTIONS: usize = ENERGY_LEVELS * (2 + PILOT_LENGTHS.len());

/// Route in `1..=2`, MCS in `1..=4` (BPSK .. 64QAM).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MdpState {
    pub route: u8,
    pub mcs: u8,
}

impl MdpState {
    pub fn new(route: u8, mcs: u8) -> Result<Self> {
        if !(1..=NUM_ROUTES as u8).contains(&route) || !(1..=NUM_MCS as u8).contains(&mcs) {
            return Err(Error::InvalidConfig(format!(
                "state (route {route}, mcs {mcs}) is out of range"
            )));
        }
        Ok(Self { route, mcs })
    }

    /// Zero-based index: route 1 occupies 0..4, route 2 occupies 4..8.
    pub fn index(self) -> usize {
        (self.route as usize - 1) * NUM_MCS + (self.mcs as usize - 1)
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < NUM_STATES, "state index {i} out of range");
        Self {
            route: (i / NUM_MCS) as u8 + 1,
            mcs: (i % NUM_MCS) as u8 + 1,
        }
    }

    /// One-based label as used in the state table.
    pub fn label(self) -> usize {
        self.index() + 1
    }
}

impl fmt::Display for MdpState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}M{}", self.route, self.mcs)
    }
}

/// Zero-based action index in `0..120`: 20 barrage levels, four blocks of 20
/// pilot levels (T_p = 4, 16, 128, 512), then 20 ACK levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MdpAction(pub usize);

/// Scheme, energy level in `1..=20` and pilot length of an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodedAction {
    pub scheme: Scheme,
    pub level: usize,
    pub pilot_len: Option<usize>,
}

impl MdpAction {
    pub fn new(index: usize) -> Result<Self> {
        if index >= NUM_ACTIONS {
            return Err(Error::InvalidConfig(format!(
                "action index {index} is out of range"
            )));
        }
        Ok(Self(index))
    }

    pub fn barrage(level: usize) -> Self {
        assert!((1..=ENERGY_LEVELS).contains(&level));
        Self(level - 1)
    }

    /// `class` indexes [`PILOT_LENGTHS`].
    pub fn pilot(class: usize, level: usize) -> Self {
        assert!(class < PILOT_LENGTHS.len() && (1..=ENERGY_LEVELS).contains(&level));
        Self(ENERGY_LEVELS * (1 + class) + level - 1)
    }

    pub fn ack(level: usize) -> Self {
        assert!((1..=ENERGY_LEVELS).contains(&level));
        Self(ENERGY_LEVELS * (1 + PILOT_LENGTHS.len()) + level - 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    pub fn decode(self) -> DecodedAction {
        let block = self.0 / ENERGY_LEVELS;
        let level = self.0 % ENERGY_LEVELS + 1;
        match block {
            0 => DecodedAction {
                scheme: Scheme::Barrage,
                level,
                pilot_len: None,
            },
            b if b <= PILOT_LENGTHS.len() => DecodedAction {
                scheme: Scheme::Pilot,
                level,
                pilot_len: Some(PILOT_LENGTHS[b - 1]),
            },
            _ => DecodedAction {
                scheme: Scheme::Ack,
                level,
                pilot_len: None,
            },
        }
    }

    pub fn energy(self, energy_step: f64) -> f64 {
        self.decode().level as f64 * energy_step
    }

    pub fn to_jamming_action(self, energy_step: f64) -> JammingAction {
        let d = self.decode();
        let e = d.level as f64 * energy_step;
        match d.scheme {
            Scheme::Pilot => JammingAction::pilot(e, d.pilot_len.unwrap_or(1)),
            Scheme::Ack => JammingAction::ack(e),
            _ => JammingAction::barrage(e),
        }
    }
}

impl fmt::Display for MdpAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.decode();
        match d.pilot_len {
            Some(tp) => write!(f, "pilot{tp}@{}", d.level),
            None => write!(f, "{}@{}", d.scheme, d.level),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    /// Price per unit of jamming energy.
    pub price: f64,
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.price >= 0.0) || !self.price.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "energy price must be non-negative, got {}",
                self.price
            )));
        }
        Ok(())
    }
}

/// `n_e - p * E`.
pub fn reward(lost_packets: u64, energy: f64, cfg: &RewardConfig) -> f64 {
    lost_packets as f64 - cfg.price * energy
}

/// Tabular Q-function with per-pair visit counts.
///
/// The step size for a pair visited `n` times is `max(alpha_min, 1/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    states: usize,
    actions: usize,
    values: Vec<f64>,
    visits: Vec<u64>,
    state_visits: Vec<u64>,
    pub alpha_min: f64,
    pub beta: f64,
}

impl QTable {
    pub fn new(states: usize, actions: usize, alpha_min: f64, beta: f64) -> Result<Self> {
        if states == 0 || actions == 0 {
            return Err(Error::EmptyDimension {
                rows: states,
                cols: actions,
            });
        }
        if !(0.0..=1.0).contains(&alpha_min) || !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidConfig(format!(
                "need alpha_min in [0, 1] and beta in [0, 1), got {alpha_min} and {beta}"
            )));
        }
        Ok(Self {
            states,
            actions,
            values: vec![0.0; states * actions],
            visits: vec![0; states * actions],
            state_visits: vec![0; states],
            alpha_min,
            beta,
        })
    }

    pub fn for_mdp(alpha_min: f64, beta: f64) -> Result<Self> {
        Self::new(NUM_STATES, NUM_ACTIONS, alpha_min, beta)
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.actions + a] = v;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.actions..(s + 1) * self.actions]
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.visits[s * self.actions + a]
    }

    pub fn state_visits(&self, s: usize) -> u64 {
        self.state_visits[s]
    }

    /// Records a visit to `s` (used by the exploration gate).
    pub fn visit_state(&mut self, s: usize) {
        self.state_visits[s] += 1;
    }

    /// Greedy action; ties go to the lowest index.
    pub fn greedy(&self, s: usize) -> usize {
        let row = self.row(s);
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn max_value(&self, s: usize) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + beta max Q(s', .))`.
    pub fn update(&mut self, s: usize, a: usize, r: f64, s_next: usize) {
        let i = s * self.actions + a;
        self.visits[i] += 1;
        let alpha = (1.0 / self.visits[i] as f64).max(self.alpha_min);
        self.update_with_alpha(s, a, r, s_next, alpha);
    }

    pub fn update_with_alpha(&mut self, s: usize, a: usize, r: f64, s_next: usize, alpha: f64) {
        let target = r + self.beta * self.max_value(s_next);
        let i = s * self.actions + a;
        self.values[i] = (1.0 - alpha) * self.values[i] + alpha * target;
    }
}

/// Functional form of [`QTable::update`].
pub fn q_update(mut qt: QTable, s: usize, a: usize, r: f64, s_next: usize) -> QTable {
    qt.update(s, a, r, s_next);
    qt
}

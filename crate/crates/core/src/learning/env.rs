//! Adaptive transmitter seen by the learning jammer.
//!
//! Each step is one frame of `packets` data packets. Packet losses are drawn
//! from the analytic PER model at the expected SINRs of the active route, so
//! no channel matrices are sampled here.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::jamming::Scheme;
use crate::linkmetrics::{expected_ack_sinr, expected_data_sinr, per_model, JamEnergies};
use crate::phy::Mcs;
use crate::rng::{stream_rng, SimRng};
use crate::theorems::ScenarioParams;

use super::mdp::{reward, MdpAction, MdpState, RewardConfig, NUM_MCS, NUM_ROUTES};

/// Jammer geometry of one route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteGeometry {
    pub theta_g: f64,
    pub theta_f: f64,
}

/// When the transmitter changes state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adaptation {
    /// Route switch and MCS step only at multiples of the transition period.
    Scheduled,
    /// As `Scheduled`, plus MCS steps whenever a full PER window closes.
    Continuous,
    /// The state never changes.
    Frozen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Antennas, `theta_h`, `es` and `n0`; the path losses to the jammer come
    /// from `routes`.
    pub link: LinkConfig,
    pub routes: [RouteGeometry; NUM_ROUTES],
    /// MCS 1..=4 in increasing rate.
    pub mcs: [Mcs; NUM_MCS],
    /// ACK MCS.
    pub ack_mcs: Mcs,
    /// True pilot length, hidden from the jammer.
    pub hidden_k: usize,
    pub ack_len: usize,
    pub packets: usize,
    pub packet_bits: usize,
    /// Energy of level 1; level `i` spends `i * energy_step`.
    pub energy_step: f64,
    pub lambda_max_mean: f64,
    pub reward: RewardConfig,
    pub transition_period: usize,
    pub adaptation: Adaptation,
    /// Steps in the PER window.
    pub per_window: usize,
    /// Step the MCS down when the windowed PER exceeds this.
    pub per_down: f64,
    /// Step the MCS up when the windowed PER is below this.
    pub per_up: f64,
    pub initial_state: MdpState,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            link: LinkConfig {
                m: 2,
                n: 2,
                l: 2,
                theta_h: 1.0,
                theta_g: 1.0,
                theta_f: 1.0,
                es: 1.0,
                n0: 0.005,
            },
            routes: [
                RouteGeometry {
                    theta_g: 2.0,
                    theta_f: 0.2,
                },
                RouteGeometry {
                    theta_g: 0.5,
                    theta_f: 5.0,
                },
            ],
            mcs: Mcs::standard_set(),
            ack_mcs: Mcs::bpsk(),
            hidden_k: 128,
            ack_len: 64,
            packets: 240,
            packet_bits: 1024,
            energy_step: 10.0,
            lambda_max_mean: 3.5,
            reward: RewardConfig { price: 0.5 },
            transition_period: 1000,
            adaptation: Adaptation::Scheduled,
            per_window: 100,
            per_down: 0.1,
            per_up: 0.01,
            initial_state: MdpState { route: 1, mcs: 4 },
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        for r in &self.routes {
            self.route_link_of(r).validate()?;
        }
        for m in self.mcs.iter().chain(std::iter::once(&self.ack_mcs)) {
            m.validate()?;
        }
        if self.hidden_k < self.link.m || self.ack_len == 0 {
            return invalid(format!(
                "hidden pilot length {} must be at least M = {} and ack_len positive",
                self.hidden_k, self.link.m
            ));
        }
        if self.packets == 0 || self.packet_bits == 0 {
            return invalid("packets and packet_bits must be positive".into());
        }
        for m in &self.mcs {
            let bits_per_vector = self.link.m * m.bits_per_symbol as usize;
            if self.data_bits() % bits_per_vector != 0 {
                return invalid(format!(
                    "{} data bits do not fill whole symbol vectors of MCS {}",
                    self.data_bits(),
                    m.id
                ));
            }
        }
        if !(self.energy_step > 0.0) || !self.energy_step.is_finite() {
            return invalid(format!("energy_step must be positive, got {}", self.energy_step));
        }
        if !(self.lambda_max_mean > 0.0) {
            return invalid("lambda_max_mean must be positive".into());
        }
        self.reward.validate()?;
        if self.adaptation != Adaptation::Frozen && self.transition_period == 0 {
            return invalid("transition_period must be positive".into());
        }
        if self.per_window == 0 {
            return invalid("per_window must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.per_up)
            || !(0.0..=1.0).contains(&self.per_down)
            || self.per_up > self.per_down
        {
            return invalid(format!(
                "PER thresholds must satisfy 0 <= per_up ({}) <= per_down ({}) <= 1",
                self.per_up, self.per_down
            ));
        }
        MdpState::new(self.initial_state.route, self.initial_state.mcs)?;
        Ok(())
    }

    fn route_link_of(&self, r: &RouteGeometry) -> LinkConfig {
        LinkConfig {
            theta_g: r.theta_g,
            theta_f: r.theta_f,
            ..self.link
        }
    }

    /// Link parameters while `state` is active.
    pub fn route_link(&self, state: MdpState) -> LinkConfig {
        self.route_link_of(&self.routes[state.route as usize - 1])
    }

    pub fn mcs_of(&self, state: MdpState) -> &Mcs {
        &self.mcs[state.mcs as usize - 1]
    }

    pub fn data_bits(&self) -> usize {
        self.packets * self.packet_bits
    }

    /// Data symbol vectors per frame under `mcs`.
    pub fn data_len(&self, mcs: &Mcs) -> usize {
        self.data_bits() / (self.link.m * mcs.bits_per_symbol as usize)
    }

    /// Longest data block over all MCS.
    pub fn d_max(&self) -> usize {
        self.mcs.iter().map(|m| self.data_len(m)).max().unwrap_or(0)
    }

    /// Per-symbol jamming energies on each target.
    ///
    /// A pilot jam of length `T_p` over the true `K` pilots lands with
    /// efficiency `min(T_p, K) / max(T_p, K)`: a short burst leaves part of
    /// the training clean, and a long one wastes `(T_p - K) / T_p` of its
    /// energy on the data block, where it acts as barrage.
    pub fn energies(&self, state: MdpState, action: MdpAction) -> JamEnergies {
        let d = action.decode();
        let e = action.energy(self.energy_step);
        let l = self.link.l as f64;
        let k = self.hidden_k as f64;
        let dl = self.data_len(self.mcs_of(state)) as f64;
        match d.scheme {
            Scheme::Barrage => JamEnergies {
                barrage: e / (l * dl),
                ..Default::default()
            },
            Scheme::Pilot => {
                let tp = d.pilot_len.unwrap_or(self.hidden_k) as f64;
                let spill = if tp > k { e * (tp - k) / tp } else { 0.0 };
                JamEnergies {
                    barrage: spill / (l * dl),
                    pilot: e * tp.min(k) / tp.max(k) / (l * k),
                    ack: 0.0,
                }
            }
            Scheme::Ack => JamEnergies {
                ack: e / (l * self.ack_len as f64),
                ..Default::default()
            },
            Scheme::None => JamEnergies::default(),
        }
    }

    /// Probability that a packet is lost, either directly or through a
    /// corrupted ACK that forces a retransmission.
    pub fn loss_probability(&self, state: MdpState, action: MdpAction) -> f64 {
        let link = self.route_link(state);
        let e = self.energies(state, action);
        let gd = expected_data_sinr(&link, self.hidden_k, &e);
        let ga = expected_ack_sinr(&link, self.hidden_k, &e, self.lambda_max_mean);
        let pd = per_model(gd, self.mcs_of(state));
        let pa = per_model(ga, &self.ack_mcs);
        1.0 - (1.0 - pd) * (1.0 - pa)
    }

    pub fn expected_reward(&self, state: MdpState, action: MdpAction) -> f64 {
        self.packets as f64 * self.loss_probability(state, action)
            - self.reward.price * action.energy(self.energy_step)
    }

    /// Parameters the jammer plugs into the theorem predicates in `state`,
    /// with `k` as the assumed pilot length.
    pub fn scenario_params(&self, state: MdpState, k: usize) -> ScenarioParams {
        let link = self.route_link(state);
        let mcs = self.mcs_of(state);
        ScenarioParams {
            k: k as f64,
            d: self.data_len(mcs) as f64,
            a: self.ack_len as f64,
            m: link.m as f64,
            n: link.n as f64,
            l: link.l as f64,
            theta_g: link.theta_g,
            theta_f: link.theta_f,
            gamma_th_d: mcs.gamma_th,
            gamma_th_a: self.ack_mcs.gamma_th,
            lambda_max_mean: self.lambda_max_mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: MdpState,
    pub action: MdpAction,
    pub lost: u64,
    pub energy: f64,
    pub reward: f64,
    pub next_state: MdpState,
}

/// Environment instance with its own random stream.
#[derive(Debug, Clone)]
pub struct Env {
    cfg: EnvConfig,
    state: MdpState,
    steps: usize,
    window: VecDeque<u64>,
    rng: SimRng,
}

impl Env {
    pub fn new(cfg: EnvConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            state: cfg.initial_state,
            steps: 0,
            window: VecDeque::with_capacity(cfg.per_window),
            rng: stream_rng(seed, 0, 0),
            cfg,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> MdpState {
        self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Lost fraction over the current window, zero when empty.
    pub fn windowed_per(&self) -> f64 {
        if self.window.is_empty() {
            return 0.0;
        }
        let lost: u64 = self.window.iter().sum();
        lost as f64 / (self.window.len() * self.cfg.packets) as f64
    }

    pub fn step(&mut self, action: MdpAction) -> StepOutcome {
        let state = self.state;
        let p = self.cfg.loss_probability(state, action);
        let lost = sample_losses(self.cfg.packets, p, &mut self.rng);
        let energy = action.energy(self.cfg.energy_step);
        let r = reward(lost, energy, &self.cfg.reward);

        if self.window.len() == self.cfg.per_window {
            self.window.pop_front();
        }
        self.window.push_back(lost);
        self.steps += 1;
        self.adapt();

        StepOutcome {
            state,
            action,
            lost,
            energy,
            reward: r,
            next_state: self.state,
        }
    }

    fn adapt(&mut self) {
        let per = self.windowed_per();
        match self.cfg.adaptation {
            Adaptation::Frozen => {}
            _ if self.steps % self.cfg.transition_period == 0 => {
                let route = if self.state.route == 1 { 2 } else { 1 };
                self.state = MdpState {
                    route,
                    mcs: self.next_mcs(per),
                };
                self.window.clear();
            }
            Adaptation::Continuous if self.window.len() == self.cfg.per_window => {
                self.state.mcs = self.next_mcs(per);
                self.window.clear();
            }
            _ => {}
        }
    }

    fn next_mcs(&self, per: f64) -> u8 {
        let m = self.state.mcs;
        if per > self.cfg.per_down {
            m.saturating_sub(1).max(1)
        } else if per < self.cfg.per_up {
            (m + 1).min(NUM_MCS as u8)
        } else {
            m
        }
    }
}

fn sample_losses(n: usize, p: f64, rng: &mut SimRng) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        n as u64
    } else {
        // n and p are validated above, so construction cannot fail.
        Binomial::new(n as u64, p)
            .map(|b| b.sample(rng))
            .unwrap_or_else(|_| (0..n).filter(|_| rng.random::<f64>() < p).count() as u64)
    }
}

/// One environment step from a fresh state, for callers that keep no `Env`.
pub fn env_step(
    cfg: &EnvConfig,
    state: MdpState,
    action: MdpAction,
    rng: &mut SimRng,
) -> (u64, f64) {
    let p = cfg.loss_probability(state, action);
    (
        sample_losses(cfg.packets, p, rng),
        action.energy(cfg.energy_step),
    )
}

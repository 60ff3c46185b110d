//! Q-learning jammer with semi-uniform or theorem-guided exploration.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jamming::Scheme;
use crate::rng::{stream_rng, SimRng};
use crate::theorems::{cond_ack_over_pilot_combined, thm3_ack_beats_barrage, ScenarioParams};

use super::belief::{exploration_split, BeliefOverD, BeliefOverK, LengthBelief};
use super::env::{Env, EnvConfig};
use super::mdp::{
    MdpAction, MdpState, QTable, ENERGY_LEVELS, NUM_ACTIONS, NUM_STATES, PILOT_LENGTHS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    SemiUniform,
    Enhanced,
}

impl Exploration {
    pub fn name(self) -> &'static str {
        match self {
            Self::SemiUniform => "semi_uniform",
            Self::Enhanced => "enhanced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub exploration: Exploration,
    pub alpha_min: f64,
    pub beta: f64,
    /// Probability of diverting an explored action to ACK jamming when the
    /// theorems favour it.
    pub epsilon: f64,
    /// Exploration gate scale: a state visited `n` times explores with
    /// probability `1 / (1 + n / tau)`.
    pub tau: f64,
    /// Belief reweighting strength.
    pub eta: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            exploration: Exploration::Enhanced,
            alpha_min: 0.1,
            beta: 0.9,
            epsilon: 0.3,
            tau: 300.0,
            eta: 0.1,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::InvalidConfig(format!("eta must lie in [0, 1), got {}", self.eta)));
        }
        QTable::new(1, 1, self.alpha_min, self.beta).map(|_| ())
    }

    pub fn with_exploration(self, exploration: Exploration) -> Self {
        Self { exploration, ..self }
    }

    /// Probability of exploring in a state already visited `visits` times.
    pub fn gate(&self, visits: u64) -> f64 {
        1.0 / (1.0 + visits as f64 / self.tau)
    }
}

/// Greedy with probability `1 - epsilon`, otherwise uniform over all actions.
pub fn explore_semi_uniform<R: Rng + ?Sized>(
    qt: &QTable,
    s: MdpState,
    epsilon: f64,
    rng: &mut R,
) -> MdpAction {
    if rng.random::<f64>() < epsilon {
        MdpAction(rng.random_range(0..qt.num_actions()))
    } else {
        MdpAction(qt.greedy(s.index()))
    }
}

/// What the jammer knows when proposing an action.
#[derive(Debug, Clone, Copy)]
pub struct EnhancedContext<'a> {
    pub k_belief: &'a BeliefOverK,
    pub d_belief: &'a BeliefOverD,
    /// Predicate inputs for the current state; `k` is overwritten by each
    /// candidate pilot length.
    pub params: &'a ScenarioParams,
    pub m: usize,
    /// Longest data block the transmitter can use, bounding legal pilot jams.
    pub d_max: usize,
    /// ACK diversion probability.
    pub epsilon: f64,
}

/// Draws one exploratory action from the theorem-guided proposal.
pub fn propose_enhanced<R: Rng + ?Sized>(ctx: &EnhancedContext<'_>, rng: &mut R) -> Result<MdpAction> {
    ctx.k_belief.validate()?;
    ctx.d_belief.validate()?;
    let (pb, pilots) = exploration_split(ctx.k_belief, ctx.d_belief, ctx.m, ctx.d_max);
    let level = rng.random_range(1..=ENERGY_LEVELS);

    let u: f64 = rng.random();
    let pilot_len = if u < pb {
        None
    } else {
        let mut acc = pb;
        let mut pick = None;
        for (k, p) in ctx.k_belief.support().iter().zip(&pilots) {
            if *p > 0.0 {
                pick = Some(*k);
                acc += p;
                if u < acc {
                    break;
                }
            }
        }
        pick
    };

    let divert = rng.random::<f64>() < ctx.epsilon;
    let action = match pilot_len {
        None => {
            if divert && thm3_ack_beats_barrage(ctx.params) {
                MdpAction::ack(level)
            } else {
                MdpAction::barrage(level)
            }
        }
        Some(k) => {
            let params = ScenarioParams {
                k: k as f64,
                ..*ctx.params
            };
            if divert && cond_ack_over_pilot_combined(&params) {
                MdpAction::ack(level)
            } else {
                let class = PILOT_LENGTHS.iter().position(|&t| t == k).ok_or_else(|| {
                    Error::InvalidConfig(format!("pilot length {k} is not an action class"))
                })?;
                MdpAction::pilot(class, level)
            }
        }
    };
    Ok(action)
}

/// Greedy with probability `1 - explore_prob`, otherwise a draw from
/// [`propose_enhanced`].
pub fn explore_enhanced<R: Rng + ?Sized>(
    qt: &QTable,
    s: MdpState,
    explore_prob: f64,
    ctx: &EnhancedContext<'_>,
    rng: &mut R,
) -> Result<MdpAction> {
    if rng.random::<f64>() < explore_prob {
        propose_enhanced(ctx, rng)
    } else {
        Ok(MdpAction(qt.greedy(s.index())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub state: MdpState,
    pub action: MdpAction,
    pub explored: bool,
    pub lost: u64,
    pub reward: f64,
    pub cum_reward: f64,
    /// Greedy action of `state` after the update.
    pub best_action: MdpAction,
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub exploration: Exploration,
    pub seed: u64,
    pub trace: Vec<StepRecord>,
    pub q: QTable,
    pub k_belief: BeliefOverK,
}

impl Episode {
    pub fn cumulative_reward(&self) -> f64 {
        self.trace.last().map_or(0.0, |r| r.cum_reward)
    }

    /// Cumulative reward after `steps` steps.
    pub fn reward_at(&self, steps: usize) -> f64 {
        match steps {
            0 => 0.0,
            n => self.trace[n.min(self.trace.len()) - 1].cum_reward,
        }
    }

    /// Number of steps before `limit` whose best action differs from the
    /// previous step's.
    pub fn best_action_changes(&self, limit: usize) -> usize {
        self.trace[..limit.min(self.trace.len())]
            .windows(2)
            .filter(|w| w[0].best_action != w[1].best_action)
            .count()
    }
}

/// Runs `steps` interactions of one jammer against a fresh environment.
///
/// The environment draws from stream 0 and the jammer from stream 1 of
/// `seed`, so two jammers run with the same seed face identical channel
/// luck whenever they take the same action.
pub fn run_episode(env_cfg: &EnvConfig, agent: &AgentConfig, steps: usize, seed: u64) -> Result<Episode> {
    if steps == 0 {
        return Err(Error::InvalidConfig("an episode needs at least one step".into()));
    }
    agent.validate()?;
    let mut env = Env::new(env_cfg.clone(), seed)?;
    let mut rng: SimRng = stream_rng(seed, 0, 1);
    let mut q = QTable::new(NUM_STATES, NUM_ACTIONS, agent.alpha_min, agent.beta)?;
    let mut k_belief = LengthBelief::uniform(&PILOT_LENGTHS);
    // Running mean of losses under pilot jamming per (state, level).
    let mut baseline: HashMap<(usize, usize), (f64, u64)> = HashMap::new();
    let m = env_cfg.link.m;
    let d_max = env_cfg.d_max();

    let mut trace = Vec::with_capacity(steps);
    let mut cum = 0.0;
    for step in 0..steps {
        let s = env.state();
        let si = s.index();
        let gate = agent.gate(q.state_visits(si));
        q.visit_state(si);

        let explored = rng.random::<f64>() < gate;
        let action = if !explored {
            MdpAction(q.greedy(si))
        } else {
            match agent.exploration {
                Exploration::SemiUniform => MdpAction(rng.random_range(0..NUM_ACTIONS)),
                Exploration::Enhanced => {
                    let d_belief = LengthBelief::point(&[], env_cfg.data_len(env_cfg.mcs_of(s)));
                    let params = env_cfg.scenario_params(s, env_cfg.hidden_k);
                    let ctx = EnhancedContext {
                        k_belief: &k_belief,
                        d_belief: &d_belief,
                        params: &params,
                        m,
                        d_max,
                        epsilon: agent.epsilon,
                    };
                    propose_enhanced(&ctx, &mut rng)?
                }
            }
        };

        let out = env.step(action);
        q.update(si, action.index(), out.reward, out.next_state.index());
        cum += out.reward;

        let decoded = action.decode();
        if agent.exploration == Exploration::Enhanced && decoded.scheme == Scheme::Pilot {
            let key = (si, decoded.level);
            let lost = out.lost as f64;
            let entry = baseline.entry(key).or_insert((0.0, 0));
            if entry.1 > 0 {
                k_belief.update(decoded.pilot_len.unwrap_or(0), lost, entry.0, agent.eta);
            }
            entry.1 += 1;
            entry.0 += (lost - entry.0) / entry.1 as f64;
        }

        trace.push(StepRecord {
            step,
            state: s,
            action,
            explored,
            lost: out.lost,
            reward: out.reward,
            cum_reward: cum,
            best_action: MdpAction(q.greedy(si)),
        });
    }

    Ok(Episode {
        exploration: agent.exploration,
        seed,
        trace,
        q,
        k_belief,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::env::Adaptation;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn rng(seed: u64) -> SimRng {
        stream_rng(seed, 7, 9)
    }

    fn point_ctx_inputs(k: usize, d: usize) -> (BeliefOverK, BeliefOverD) {
        (LengthBelief::point(&PILOT_LENGTHS, k), LengthBelief::point(&[], d))
    }

    #[test]
    fn semi_uniform_extremes() {
        let mut q = QTable::for_mdp(0.1, 0.9).unwrap();
        let s = MdpState::new(1, 4).unwrap();
        q.set(s.index(), 3, 1.0);
        q.set(s.index(), 7, 1.0);
        let mut r = rng(1);
        for _ in 0..100 {
            assert_eq!(explore_semi_uniform(&q, s, 0.0, &mut r), MdpAction(3));
        }
    }

    #[test]
    fn semi_uniform_is_uniform_when_always_exploring() {
        let q = QTable::for_mdp(0.1, 0.9).unwrap();
        let s = MdpState::new(2, 1).unwrap();
        let mut r = rng(2);
        let n = 100_000;
        let mut counts = [0u64; NUM_ACTIONS];
        for _ in 0..n {
            counts[explore_semi_uniform(&q, s, 1.0, &mut r).index()] += 1;
        }
        let e = n as f64 / NUM_ACTIONS as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let crit = ChiSquared::new((NUM_ACTIONS - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    }

    #[test]
    fn concentrated_beliefs_pick_the_expected_branch() {
        let env = EnvConfig::default();
        let s = MdpState::new(1, 1).unwrap();
        let params = env.scenario_params(s, 128);
        let mut r = rng(3);
        for (k, want) in [(4, Scheme::Pilot), (512, Scheme::Barrage)] {
            let (kb, db) = point_ctx_inputs(k, 122_880);
            let ctx = EnhancedContext {
                k_belief: &kb,
                d_belief: &db,
                params: &params,
                m: 2,
                d_max: 122_880,
                epsilon: 0.0,
            };
            for _ in 0..200 {
                let a = propose_enhanced(&ctx, &mut r).unwrap().decode();
                assert_eq!(a.scheme, want);
                if want == Scheme::Pilot {
                    assert_eq!(a.pilot_len, Some(4));
                }
            }
        }
    }

    #[test]
    fn ack_diversion_frequency_matches_epsilon() {
        let env = EnvConfig::default();
        let s = MdpState::new(2, 3).unwrap();
        let params = env.scenario_params(s, 128);
        assert!(cond_ack_over_pilot_combined(&params));
        let (kb, db) = point_ctx_inputs(128, env.data_len(env.mcs_of(s)));
        let ctx = EnhancedContext {
            k_belief: &kb,
            d_belief: &db,
            params: &params,
            m: 2,
            d_max: env.d_max(),
            epsilon: 0.5,
        };
        let mut r = rng(4);
        let n = 10_000;
        let acks = (0..n)
            .filter(|_| propose_enhanced(&ctx, &mut r).unwrap().decode().scheme == Scheme::Ack)
            .count();
        let f = acks as f64 / n as f64;
        assert!((f - 0.5).abs() <= 0.02, "{f}");
    }

    #[test]
    fn proposals_never_exceed_the_legal_pilot_length() {
        let env = EnvConfig::default();
        let mut r = rng(5);
        let limit = ((env.d_max() * 2) as f64).sqrt();
        for si in 0..NUM_STATES {
            let s = MdpState::from_index(si);
            let params = env.scenario_params(s, 128);
            let kb = LengthBelief::uniform(&PILOT_LENGTHS);
            let db = LengthBelief::point(&[], env.data_len(env.mcs_of(s)));
            let ctx = EnhancedContext {
                k_belief: &kb,
                d_belief: &db,
                params: &params,
                m: 2,
                d_max: env.d_max(),
                epsilon: 0.3,
            };
            for _ in 0..500 {
                if let Some(tp) = propose_enhanced(&ctx, &mut r).unwrap().decode().pilot_len {
                    assert!(tp as f64 <= limit);
                }
            }
        }
    }

    #[test]
    fn unnormalized_belief_is_rejected() {
        let env = EnvConfig::default();
        let params = env.scenario_params(MdpState::new(1, 1).unwrap(), 128);
        let kb = LengthBelief::from_raw(vec![4, 16, 128, 512], vec![0.5; 4]);
        let db = LengthBelief::point(&[], 122_880);
        let ctx = EnhancedContext {
            k_belief: &kb,
            d_belief: &db,
            params: &params,
            m: 2,
            d_max: 122_880,
            epsilon: 0.3,
        };
        assert!(matches!(
            propose_enhanced(&ctx, &mut rng(6)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn episodes_are_deterministic() {
        let env = EnvConfig {
            transition_period: 50,
            ..EnvConfig::default()
        };
        for exploration in [Exploration::Enhanced, Exploration::SemiUniform] {
            let agent = AgentConfig::default().with_exploration(exploration);
            let a = run_episode(&env, &agent, 200, 11).unwrap();
            let b = run_episode(&env, &agent, 200, 11).unwrap();
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.q, b.q);
            let c = run_episode(&env, &agent, 200, 12).unwrap();
            assert_ne!(a.trace, c.trace);
        }
        assert!(run_episode(&env, &AgentConfig::default(), 0, 1).is_err());
    }

    #[test]
    fn greedy_policy_matches_brute_force_on_frozen_env() {
        let agent = AgentConfig {
            exploration: Exploration::SemiUniform,
            tau: 1e9,
            ..AgentConfig::default()
        };
        for si in [3, 6] {
            let s = MdpState::from_index(si);
            let env = EnvConfig {
                adaptation: Adaptation::Frozen,
                initial_state: s,
                ..EnvConfig::default()
            };
            let ep = run_episode(&env, &agent, 20_000, 21).unwrap();
            let learned = ep.q.greedy(si);
            let exact = |a: usize| env.expected_reward(s, MdpAction(a));
            let best = (0..NUM_ACTIONS).map(exact).fold(f64::NEG_INFINITY, f64::max);
            // Each pair gets ~167 samples with step size >= 0.1, so allow a
            // few binomial standard deviations of slack.
            assert!(
                best - exact(learned) < 15.0,
                "state {s}: learned {} ({}) vs best {best}",
                MdpAction(learned),
                exact(learned)
            );
        }
    }
}

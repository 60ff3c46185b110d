//! Learning jammer: MDP, adaptive environment, beliefs and Q-learning.

pub mod agent;
pub mod belief;
pub mod env;
pub mod mdp;

pub use agent::{
    explore_enhanced, explore_semi_uniform, propose_enhanced, run_episode, AgentConfig,
    EnhancedContext, Episode, Exploration, StepRecord,
};
pub use belief::{
    exploration_split, prob_barrage, update_belief_k, BeliefOverD, BeliefOverK, LengthBelief,
};
pub use env::{env_step, Adaptation, Env, EnvConfig, RouteGeometry, StepOutcome};
pub use mdp::{
    q_update, reward, DecodedAction, MdpAction, MdpState, QTable, RewardConfig, ENERGY_LEVELS,
    NUM_ACTIONS, NUM_MCS, NUM_ROUTES, NUM_STATES, PILOT_LENGTHS,
};

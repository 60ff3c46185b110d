//! Link-level simulation of pilot, data and ACK jamming on a two-link MIMO
//! system, with closed-form efficiency predicates and a Q-learning jammer.

pub mod channel;
pub mod error;
pub mod jamming;
pub mod learning;
pub mod linkmetrics;
pub mod numerics;
pub mod phy;
pub mod rng;
pub mod theorems;

pub use channel::{draw_channels, estimate_expected_lambda_max, ChannelRealization, LinkConfig};
pub use error::{Error, Result};
pub use jamming::{allocate_energy, EnergyAllocation, JammingAction, Scheme};
pub use learning::{AgentConfig, EnvConfig, Episode, Exploration, MdpAction, MdpState};
pub use linkmetrics::{estimate_ber, BerEstimate, BerReport};
pub use numerics::{CMatrix, C64};
pub use phy::{FramePlan, Mcs};
pub use theorems::ScenarioParams;

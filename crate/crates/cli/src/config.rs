use std::path::Path;

use anyhow::{bail, Context, Result};
use mimojam_core::learning::{AgentConfig, EnvConfig};
use mimojam_core::{FramePlan, LinkConfig, Mcs, Scheme};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    BerSweep,
    TheoremCheck,
    Learning,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::BerSweep => "ber_sweep",
            Mode::TheoremCheck => "theorem_check",
            Mode::Learning => "learning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorems: Option<TheoremConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning: Option<LearningConfig>,
}

/// Frame layout shared by the sweep and the theorem check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub packets: usize,
    pub packet_bits: usize,
    pub ack_len: usize,
    pub data_mcs: String,
    pub ack_mcs: String,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            packets: 240,
            packet_bits: 1024,
            ack_len: 512,
            data_mcs: "bpsk".into(),
            ack_mcs: "bpsk".into(),
        }
    }
}

impl FrameConfig {
    pub fn mcs(&self) -> Result<(Mcs, Mcs)> {
        let get = |name: &str| {
            Mcs::by_name(name).with_context(|| format!("unknown MCS name {name:?}"))
        };
        Ok((get(&self.data_mcs)?, get(&self.ack_mcs)?))
    }

    pub fn plan(&self, link: &LinkConfig, k: usize) -> Result<FramePlan> {
        let (data, ack) = self.mcs()?;
        let plan = FramePlan::new(
            link.m,
            k,
            self.ack_len,
            data,
            ack,
            self.packets,
            self.packet_bits,
        )?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schemes: Vec<Scheme>,
    pub energies: Vec<f64>,
    pub pilot_lengths: Vec<usize>,
    /// Pilot jamming burst length; the true pilot length when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_jam_len: Option<usize>,
    pub frames: u64,
    #[serde(default)]
    pub frame: FrameConfig,
    /// Reuse one random stream for every grid point.
    #[serde(default)]
    pub common_random_numbers: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremConfig {
    pub pilot_lengths: Vec<usize>,
    #[serde(default)]
    pub frame: FrameConfig,
    /// Mean largest eigenvalue of the ACK Gram matrix; estimated by Monte
    /// Carlo when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max_mean: Option<f64>,
    #[serde(default = "default_lambda_trials")]
    pub lambda_trials: usize,
    /// Frames per simulated ordering check; zero skips the simulation.
    #[serde(default)]
    pub check_frames: u64,
    #[serde(default = "default_check_energy")]
    pub check_energy: f64,
}

fn default_lambda_trials() -> usize {
    100_000
}

fn default_check_energy() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningConfig {
    pub steps: usize,
    /// Number of paired seeds, starting at the master seed.
    pub seeds: u64,
    /// Best-action changes are counted over the first this many steps.
    #[serde(default = "default_fluctuation_window")]
    pub fluctuation_window: usize,
    #[serde(default)]
    pub env: EnvConfig,
    /// The exploration field is ignored: both methods always run.
    #[serde(default)]
    pub agent: AgentConfig,
}

fn default_fluctuation_window() -> usize {
    2000
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!(
                "unsupported config schema {} (expected {SCHEMA_VERSION})",
                self.schema
            );
        }
        self.link.validate()?;
        match self.mode {
            Mode::BerSweep => {
                let s = self.sweep.as_ref().context("mode ber_sweep needs a [sweep] table")?;
                if s.energies.is_empty() || s.schemes.is_empty() || s.pilot_lengths.is_empty() {
                    bail!("sweep grid must have at least one scheme, energy and pilot length");
                }
                if s.energies.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
                    bail!("sweep energies must be finite and non-negative");
                }
                if s.frames == 0 {
                    bail!("sweep needs at least one frame per point");
                }
                for &k in &s.pilot_lengths {
                    s.frame.plan(&self.link, k)?;
                }
                if s.pilot_jam_len == Some(0) {
                    bail!("pilot_jam_len must be positive");
                }
            }
            Mode::TheoremCheck => {
                let t = self
                    .theorems
                    .as_ref()
                    .context("mode theorem_check needs a [theorems] table")?;
                if t.pilot_lengths.is_empty() {
                    bail!("theorem check needs at least one pilot length");
                }
                for &k in &t.pilot_lengths {
                    t.frame.plan(&self.link, k)?;
                }
                if let Some(l) = t.lambda_max_mean {
                    if !(l > 0.0) {
                        bail!("lambda_max_mean must be positive");
                    }
                } else if t.lambda_trials == 0 {
                    bail!("lambda_trials must be positive when lambda_max_mean is absent");
                }
            }
            Mode::Learning => {
                let l = self
                    .learning
                    .as_ref()
                    .context("mode learning needs a [learning] table")?;
                if l.steps == 0 || l.seeds == 0 {
                    bail!("learning needs at least one step and one seed");
                }
                l.env.validate()?;
                l.agent.validate()?;
            }
        }
        Ok(())
    }

    /// Canonical TOML text of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of [`Self::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

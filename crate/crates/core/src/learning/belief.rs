//! The jammer's belief over the hidden pilot length and the data length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Discrete distribution over a fixed support of lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBelief {
    support: Vec<usize>,
    probs: Vec<f64>,
}

pub type BeliefOverK = LengthBelief;
pub type BeliefOverD = LengthBelief;

impl LengthBelief {
    pub fn new(support: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidConfig(format!(
                "belief needs matching non-empty support and probabilities ({} vs {})",
                support.len(),
                probs.len()
            )));
        }
        let b = Self { support, probs };
        b.validate()?;
        Ok(b)
    }

    /// Wraps the inputs without checking them; see [`Self::validate`].
    pub fn from_raw(support: Vec<usize>, probs: Vec<f64>) -> Self {
        Self { support, probs }
    }

    pub fn uniform(support: &[usize]) -> Self {
        let p = 1.0 / support.len() as f64;
        Self {
            support: support.to_vec(),
            probs: vec![p; support.len()],
        }
    }

    /// All mass on `value`, which is added to the support if missing.
    pub fn point(support: &[usize], value: usize) -> Self {
        let mut support = support.to_vec();
        if !support.contains(&value) {
            support.push(value);
        }
        let probs = support
            .iter()
            .map(|&s| if s == value { 1.0 } else { 0.0 })
            .collect();
        Self { support, probs }
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidConfig(
                "belief probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(())
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, value: usize) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .filter(|(s, _)| **s == value)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// Reweights after jamming with an assumed pilot length `t_p`.
    ///
    /// `f(t_p, k) = min/max` measures how well `t_p` matches hypothesis `k`.
    /// An outcome above `baseline` scales each hypothesis by
    /// `1 + eta (2 f - 1)`, one below it by `1 - eta (2 f - 1)`, and the
    /// result is renormalized. An outcome equal to the baseline changes
    /// nothing.
    pub fn update(&mut self, t_p: usize, observed: f64, baseline: f64, eta: f64) {
        debug_assert!((0.0..1.0).contains(&eta));
        let sign = if observed > baseline {
            1.0
        } else if observed < baseline {
            -1.0
        } else {
            return;
        };
        for (k, p) in self.support.iter().zip(self.probs.iter_mut()) {
            let f = t_p.min(*k) as f64 / t_p.max(*k) as f64;
            *p *= 1.0 + sign * eta * (2.0 * f - 1.0);
        }
        let sum: f64 = self.probs.iter().sum();
        for p in &mut self.probs {
            *p /= sum;
        }
    }
}

/// Functional form of [`LengthBelief::update`].
pub fn update_belief_k(
    mut belief: BeliefOverK,
    t_p: usize,
    observed: f64,
    baseline: f64,
    eta: f64,
) -> BeliefOverK {
    belief.update(t_p, observed, baseline, eta);
    belief
}

/// `P_b = sum_d P(D=d) sum_k P(K=k) 1[k > sqrt(d M)]`: the probability that
/// barrage is the more efficient data-packet attack.
pub fn prob_barrage(k_belief: &BeliefOverK, d_belief: &BeliefOverD, m: usize) -> f64 {
    let mut pb = 0.0;
    for (d, pd) in d_belief.iter() {
        let crossover = ((d * m) as f64).sqrt();
        for (k, pk) in k_belief.iter() {
            if k as f64 > crossover {
                pb += pd * pk;
            }
        }
    }
    pb
}

/// Probability of each candidate pilot length under the exploration rule:
/// `(1 - P_b) P(K = k)` renormalized over the lengths not exceeding
/// `sqrt(D_max M)`. Illegal lengths get zero. Returns the pair
/// `(P_b, per-length probabilities)`, which always sums to one.
pub fn exploration_split(
    k_belief: &BeliefOverK,
    d_belief: &BeliefOverD,
    m: usize,
    d_max: usize,
) -> (f64, Vec<f64>) {
    let limit = ((d_max * m) as f64).sqrt();
    let legal: Vec<bool> = k_belief.support().iter().map(|&k| k as f64 <= limit).collect();
    let legal_mass: f64 = k_belief
        .probs()
        .iter()
        .zip(&legal)
        .filter(|(_, l)| **l)
        .map(|(p, _)| p)
        .sum();
    let mut pb = prob_barrage(k_belief, d_belief, m);
    if legal_mass <= 0.0 {
        pb = 1.0;
    }
    let pilots = k_belief
        .probs()
        .iter()
        .zip(&legal)
        .map(|(p, l)| {
            if *l && legal_mass > 0.0 {
                (1.0 - pb) * p / legal_mass
            } else {
                0.0
            }
        })
        .collect();
    (pb, pilots)
}

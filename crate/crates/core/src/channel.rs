//! Static link scenario and per-frame Rayleigh channel draws.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{max_eigenpair, sample_complex_gaussian, CMatrix};

/// Antenna counts, path-loss variances, symbol energy and noise density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    /// Transmitter antennas.
    pub m: usize,
    /// Receiver antennas.
    pub n: usize,
    /// Jammer antennas.
    pub l: usize,
    /// Transmitter to receiver path loss.
    pub theta_h: f64,
    /// Jammer to receiver path loss.
    pub theta_g: f64,
    /// Jammer to transmitter path loss.
    pub theta_f: f64,
    /// Average transmitted symbol energy.
    pub es: f64,
    /// Noise spectral density.
    pub n0: f64,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.l == 0 {
            return Err(Error::InvalidConfig(
                "antenna counts must be at least 1".into(),
            ));
        }
        if self.n < self.m {
            return Err(Error::InvalidConfig(format!(
                "receiver antennas ({}) must be at least the transmitter antennas ({})",
                self.n, self.m
            )));
        }
        for (name, v) in [
            ("theta_h", self.theta_h),
            ("theta_g", self.theta_g),
            ("theta_f", self.theta_f),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(self.es > 0.0) || !self.es.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "es must be positive, got {}",
                self.es
            )));
        }
        if !(self.n0 >= 0.0) || !self.n0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "n0 must be non-negative, got {}",
                self.n0
            )));
        }
        Ok(())
    }
}

impl Default for LinkConfig {
    /// 2x2 link with a 2-antenna jammer, unit path losses and 10 dB SNR.
    fn default() -> Self {
        Self {
            m: 2,
            n: 2,
            l: 2,
            theta_h: 1.0,
            theta_g: 1.0,
            theta_f: 1.0,
            es: 1.0,
            n0: 0.1,
        }
    }
}

/// One block-fading realization: `h` is N x M, `g` is N x L, `f` is M x L.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub g: CMatrix,
    pub f: CMatrix,
}

/// Draws H, G and F with entries CN(0, theta_*) in that order.
///
/// Zero path losses are accepted here (they yield zero matrices) even though
/// a scenario normally has all of them positive.
pub fn draw_channels<R: Rng + ?Sized>(cfg: &LinkConfig, rng: &mut R) -> Result<ChannelRealization> {
    cfg.validate()?;
    Ok(ChannelRealization {
        h: sample_complex_gaussian(cfg.n, cfg.m, cfg.theta_h, rng)?,
        g: sample_complex_gaussian(cfg.n, cfg.l, cfg.theta_g, rng)?,
        f: sample_complex_gaussian(cfg.m, cfg.l, cfg.theta_f, rng)?,
    })
}

/// `(H^T)^H H^T`, the Gram matrix whose dominant eigenvector steers the ACK.
pub fn ack_gram(h: &CMatrix) -> CMatrix {
    &h.conj() * &h.transpose()
}

/// Monte Carlo mean of the largest eigenvalue of `(H^T)^H H^T` over fresh
/// channel draws, with the estimate taken equal to the true channel.
pub fn estimate_expected_lambda_max<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut acc = 0.0;
    for _ in 0..trials {
        let h = sample_complex_gaussian(cfg.n, cfg.m, cfg.theta_h, rng)?;
        let (lambda, _) = max_eigenpair(&ack_gram(&h))?;
        acc += lambda;
    }
    Ok(acc / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn cfg(m: usize, n: usize, l: usize) -> LinkConfig {
        LinkConfig {
            m,
            n,
            l,
            ..LinkConfig::default()
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(2, 2, 2).validate().is_ok());
        assert!(cfg(3, 2, 2).validate().is_err());
        assert!(cfg(0, 2, 2).validate().is_err());
        assert!(cfg(2, 2, 0).validate().is_err());
        let mut bad = cfg(2, 2, 2);
        bad.es = 0.0;
        assert!(bad.validate().is_err());
        bad.es = 1.0;
        bad.n0 = -1.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_path_loss_gives_zero_channel() {
        let mut c = cfg(2, 2, 2);
        c.theta_h = 0.0;
        let ch = draw_channels(&c, &mut rng(1)).unwrap();
        assert_eq!(ch.h, CMatrix::zeros(2, 2));
        assert!(ch.g.norm_sqr() > 0.0);
    }

    #[test]
    fn shapes_follow_config() {
        let ch = draw_channels(&cfg(2, 4, 3), &mut rng(2)).unwrap();
        assert_eq!(ch.h.shape(), (4, 2));
        assert_eq!(ch.g.shape(), (4, 3));
        assert_eq!(ch.f.shape(), (2, 3));
    }

    #[test]
    fn h_variance_matches_path_loss() {
        let c = cfg(2, 2, 2);
        let mut r = rng(3);
        let frames = 100_000;
        let mean = (0..frames)
            .map(|_| draw_channels(&c, &mut r).unwrap().h.norm_sqr() / 4.0)
            .sum::<f64>()
            / frames as f64;
        assert!((0.99..=1.01).contains(&mean), "mean {mean}");
    }

    #[test]
    fn h_and_g_are_uncorrelated() {
        let c = cfg(2, 2, 2);
        let mut r = rng(4);
        let frames = 100_000;
        let mut cross = [[C64::new(0.0, 0.0); 4]; 4];
        for _ in 0..frames {
            let ch = draw_channels(&c, &mut r).unwrap();
            let (h, g) = (ch.h.as_slice(), ch.g.as_slice());
            for i in 0..4 {
                for j in 0..4 {
                    cross[i][j] += h[i] * g[j].conj();
                }
            }
        }
        for row in cross {
            for v in row {
                let c_hat = v / frames as f64;
                assert!(c_hat.norm() < 0.02, "cross-covariance {c_hat}");
            }
        }
    }

    #[test]
    fn scaling_path_loss_scales_draws() {
        let base = cfg(2, 2, 2);
        let mut scaled = base;
        scaled.theta_h = 4.0;
        scaled.theta_g = 4.0;
        scaled.theta_f = 4.0;
        let a = draw_channels(&base, &mut rng(5)).unwrap();
        let b = draw_channels(&scaled, &mut rng(5)).unwrap();
        assert!((&a.h.scale(2.0) - &b.h).frobenius_norm() < 1e-12);
        assert!((&a.g.scale(2.0) - &b.g).frobenius_norm() < 1e-12);
        assert!((&a.f.scale(2.0) - &b.f).frobenius_norm() < 1e-12);
    }

    #[test]
    fn lambda_max_scalar_case() {
        let est = estimate_expected_lambda_max(&cfg(1, 1, 1), 100_000, &mut rng(6)).unwrap();
        assert!((est - 1.0).abs() < 0.02, "estimate {est}");
    }

    #[test]
    fn lambda_max_2x2_regression() {
        // Oracle: the top eigenvalue of a 2x2 complex Wishart matrix with unit
        // variance has mean 3.5 (the smallest is Exp with mean 1/2 and the
        // eigenvalues sum to a mean of 4). Frozen Monte Carlo value agrees.
        let est = estimate_expected_lambda_max(&cfg(2, 2, 2), 100_000, &mut rng(7)).unwrap();
        assert!((est - 3.5).abs() < 0.07, "estimate {est}");
    }

    #[test]
    fn lambda_max_scales_with_path_loss() {
        let mut c4 = cfg(2, 2, 2);
        c4.theta_h = 4.0;
        let a = estimate_expected_lambda_max(&cfg(2, 2, 2), 1000, &mut rng(8)).unwrap();
        let b = estimate_expected_lambda_max(&c4, 1000, &mut rng(8)).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-9 * b);
    }

    #[test]
    fn lambda_max_rejects_zero_trials() {
        assert!(estimate_expected_lambda_max(&cfg(2, 2, 2), 0, &mut rng(9)).is_err());
    }
}

//! Unit-energy comparisons between jamming targets, as predicates over
//! scenario parameters. Nothing here samples; `lambda_max_mean` is an input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub k: f64,
    pub d: f64,
    pub a: f64,
    pub m: f64,
    pub n: f64,
    pub l: f64,
    pub theta_g: f64,
    pub theta_f: f64,
    pub gamma_th_d: f64,
    pub gamma_th_a: f64,
    pub lambda_max_mean: f64,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k", self.k),
            ("d", self.d),
            ("a", self.a),
            ("m", self.m),
            ("n", self.n),
            ("l", self.l),
            ("theta_f", self.theta_f),
            ("gamma_th_d", self.gamma_th_d),
            ("gamma_th_a", self.gamma_th_a),
            ("lambda_max_mean", self.lambda_max_mean),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.theta_g >= 0.0) || !self.theta_g.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "theta_g must be non-negative and finite, got {}",
                self.theta_g
            )));
        }
        Ok(())
    }

    /// `A theta_G / (K theta_F)`, the left side shared by the ACK-vs-pilot
    /// conditions.
    pub fn ack_pilot_ratio(&self) -> f64 {
        self.a * self.theta_g / (self.k * self.theta_f)
    }

    /// `K L / N^2`.
    pub fn thm2_rhs(&self) -> f64 {
        self.k * self.l / (self.n * self.n)
    }

    /// `K L gamma_a / (lambda M N gamma_d)`.
    pub fn thm3_pilot_rhs(&self) -> f64 {
        self.k * self.l * self.gamma_th_a
            / (self.lambda_max_mean * self.m * self.n * self.gamma_th_d)
    }
}

/// Pilot jamming lowers the data SINR more than barrage jamming per unit
/// energy iff `K < sqrt(D M)`.
pub fn thm1_pilot_beats_barrage(k: f64, d: f64, m: f64) -> bool {
    k < thm1_crossover(d, m)
}

/// `sqrt(D M)`.
pub fn thm1_crossover(d: f64, m: f64) -> f64 {
    (d * m).sqrt()
}

/// Pilot jamming gives the following ACK a PER lower bound at least as high
/// as jamming the ACK itself iff `A theta_G / (K theta_F) >= K L / N^2`.
pub fn thm2_pilot_beats_ack_on_ack(a: f64, k: f64, theta_g: f64, theta_f: f64, l: f64, n: f64) -> bool {
    a * theta_g / (k * theta_f) >= k * l / (n * n)
}

/// Pilot length at which the two sides of the pilot-vs-ACK condition meet,
/// `sqrt(A theta_G N^2 / (L theta_F))`.
pub fn thm2_boundary(a: f64, theta_g: f64, theta_f: f64, l: f64, n: f64) -> f64 {
    (a * theta_g * n * n / (l * theta_f)).sqrt()
}

/// ACK jamming beats barrage jamming on the PER lower bound (noise
/// negligible): `A theta_G / (D theta_F) < L gamma_a / (lambda N gamma_d)`.
pub fn thm3_ack_beats_barrage(p: &ScenarioParams) -> bool {
    p.a * p.theta_g / (p.d * p.theta_f)
        < p.l * p.gamma_th_a / (p.lambda_max_mean * p.n * p.gamma_th_d)
}

/// ACK jamming beats pilot jamming on the PER lower bound:
/// `A theta_G / (K theta_F) < K L gamma_a / (lambda M N gamma_d)`.
pub fn thm3_ack_beats_pilot(p: &ScenarioParams) -> bool {
    p.ack_pilot_ratio() < p.thm3_pilot_rhs()
}

/// ACK jamming is preferable to pilot jamming only when it wins both on the
/// data packet and against the pilot's own damage to the ACK.
pub fn cond_ack_over_pilot_combined(p: &ScenarioParams) -> bool {
    p.ack_pilot_ratio() < p.thm2_rhs().min(p.thm3_pilot_rhs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base() -> ScenarioParams {
        ScenarioParams {
            k: 4.0,
            d: 122_880.0,
            a: 512.0,
            m: 2.0,
            n: 2.0,
            l: 2.0,
            theta_g: 1.0,
            theta_f: 1.0,
            gamma_th_d: 1.0,
            gamma_th_a: 1.0,
            lambda_max_mean: 3.5,
        }
    }

    #[test]
    fn thm1_examples() {
        assert!(thm1_pilot_beats_barrage(4.0, 122_880.0, 2.0));
        assert!(!thm1_pilot_beats_barrage(512.0, 122_880.0, 2.0));
        assert!(thm1_pilot_beats_barrage(495.0, 122_880.0, 2.0));
        assert!(!thm1_pilot_beats_barrage(496.0, 122_880.0, 2.0));
        assert!((thm1_crossover(122_880.0, 2.0) - 495.74).abs() < 0.01);
        // Strict: K exactly at the crossover is not a win.
        assert!(!thm1_pilot_beats_barrage(4.0, 8.0, 2.0));
    }

    #[test]
    fn thm2_examples() {
        assert!(thm2_pilot_beats_ack_on_ack(512.0, 4.0, 1.0, 1.0, 2.0, 2.0));
        assert!(thm2_pilot_beats_ack_on_ack(512.0, 32.0, 1.0, 1.0, 2.0, 2.0));
        assert!(!thm2_pilot_beats_ack_on_ack(512.0, 33.0, 1.0, 1.0, 2.0, 2.0));
        assert!(!thm2_pilot_beats_ack_on_ack(512.0, 128.0, 1.0, 1.0, 2.0, 2.0));
        assert_eq!(thm2_boundary(512.0, 1.0, 1.0, 2.0, 2.0), 32.0);
    }

    #[test]
    fn thm3_limits() {
        let mut p = base();
        p.theta_g = 1e30;
        assert!(!thm3_ack_beats_barrage(&p));
        let mut p = base();
        p.theta_f = 1e30;
        assert!(thm3_ack_beats_barrage(&p));
        let mut p = base();
        p.k = 1e12;
        assert!(thm3_ack_beats_pilot(&p));
        let mut p = base();
        p.a = 1e30;
        assert!(!thm3_ack_beats_pilot(&p));
    }

    #[test]
    fn thm3_barrage_on_reference_scenario() {
        // 512/122880 = 0.0042 against 2/(3.5*2) = 0.286.
        assert!(thm3_ack_beats_barrage(&base()));
    }

    #[test]
    fn combined_limits() {
        let mut p = base();
        p.theta_g = 0.0;
        assert!(cond_ack_over_pilot_combined(&p));
        let mut p = base();
        p.n = 1e9;
        assert!(!cond_ack_over_pilot_combined(&p));
    }

    #[test]
    fn combined_equals_not_thm2_and_thm3_on_grid() {
        // 10^4 points: 10 values for each of K, A, theta_G/theta_F and
        // gamma_a/gamma_d.
        let ks = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];
        let as_ = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0];
        let ratios = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0];
        let gammas = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
        let mut count = 0;
        for &k in &ks {
            for &a in &as_ {
                for &r in &ratios {
                    for &g in &gammas {
                        let p = ScenarioParams {
                            k,
                            a,
                            theta_g: r,
                            theta_f: 1.0,
                            gamma_th_a: g,
                            ..base()
                        };
                        let thm2 = thm2_pilot_beats_ack_on_ack(p.a, p.k, p.theta_g, p.theta_f, p.l, p.n);
                        assert_eq!(
                            cond_ack_over_pilot_combined(&p),
                            !thm2 && thm3_ack_beats_pilot(&p),
                            "{p:?}"
                        );
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 10_000);
    }

    #[test]
    fn validation() {
        assert!(base().validate().is_ok());
        let mut p = base();
        p.k = 0.0;
        assert!(p.validate().is_err());
        let mut p = base();
        p.theta_g = 0.0;
        assert!(p.validate().is_ok());
    }

    proptest! {
        #[test]
        fn predicates_are_scale_invariant(
            k in 1.0f64..1024.0,
            a in 1.0f64..4096.0,
            tg in 0.001f64..100.0,
            tf in 0.001f64..100.0,
            c in 0.001f64..1000.0,
        ) {
            let p = ScenarioParams { k, a, theta_g: tg, theta_f: tf, ..base() };
            let q = ScenarioParams { theta_g: c * tg, theta_f: c * tf, ..p };
            // Skip points that sit on a boundary up to rounding.
            let near = |x: f64, y: f64| ((x - y) / y).abs() < 1e-9;
            prop_assume!(!near(p.ack_pilot_ratio(), p.thm2_rhs()));
            prop_assume!(!near(p.ack_pilot_ratio(), p.thm3_pilot_rhs()));
            let lhs_b = p.a * p.theta_g / (p.d * p.theta_f);
            let rhs_b = p.l * p.gamma_th_a / (p.lambda_max_mean * p.n * p.gamma_th_d);
            prop_assume!(!near(lhs_b, rhs_b));
            prop_assert_eq!(
                thm2_pilot_beats_ack_on_ack(p.a, p.k, p.theta_g, p.theta_f, p.l, p.n),
                thm2_pilot_beats_ack_on_ack(q.a, q.k, q.theta_g, q.theta_f, q.l, q.n)
            );
            prop_assert_eq!(thm3_ack_beats_barrage(&p), thm3_ack_beats_barrage(&q));
            prop_assert_eq!(thm3_ack_beats_pilot(&p), thm3_ack_beats_pilot(&q));
            prop_assert_eq!(cond_ack_over_pilot_combined(&p), cond_ack_over_pilot_combined(&q));
        }

        #[test]
        fn thm1_agrees_with_noise_free_expected_sinr(
            k in 1usize..2048,
            d in 1usize..200_000,
            m in 1usize..8,
        ) {
            use crate::channel::LinkConfig;
            use crate::jamming::Scheme;
            use crate::linkmetrics::{expected_sinr, JamEnergies};
            use crate::phy::{FramePlan, Mcs};
            let cfg = LinkConfig { m, n: m, l: 2, n0: 0.0, ..LinkConfig::default() };
            let plan = FramePlan { k, d, a: 1, data_mcs: Mcs::bpsk(), ack_mcs: Mcs::bpsk(), packets_per_frame: 1, packet_bits: 1 };
            let l = cfg.l as f64;
            let b = expected_sinr(Scheme::Barrage, &cfg, &plan,
                &JamEnergies { barrage: 1.0 / (l * d as f64), ..Default::default() }, 1.0);
            let p = expected_sinr(Scheme::Pilot, &cfg, &plan,
                &JamEnergies { pilot: 1.0 / (l * k as f64), ..Default::default() }, 1.0);
            let crossover = ((d * m) as f64).sqrt();
            prop_assume!((k as f64 - crossover).abs() > 1e-9 * crossover);
            prop_assert_eq!(p < b, thm1_pilot_beats_barrage(k as f64, d as f64, m as f64));
        }
    }
}

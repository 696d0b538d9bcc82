//! Power and noise bookkeeping plus the per-pair achievable rate expressions
//! (DCO-OFDM capacity lower bound with SIC at the strong user).

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::allocation::AllocationMatrix;
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::pairing::{PairId, PairSet};
use crate::power_split::PowerSplit;

/// `e / 2π`, the constant of the capacity lower bound.
pub const CAPACITY_BOUND_FACTOR: f64 = E / (2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub electrical_power_dbm: f64,
    /// ι = P_o / √P_e.
    pub electrical_to_optical_ratio: f64,
    /// κ, A/W.
    pub oe_efficiency: f64,
}

impl PowerConfig {
    pub fn electrical_watts(&self) -> f64 {
        dbm_to_watts(self.electrical_power_dbm)
    }

    /// Optical transmit power P_o = ι √P_e.
    pub fn optical_power(&self) -> f64 {
        self.electrical_to_optical_ratio * self.electrical_watts().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.electrical_power_dbm.is_finite() {
            return Err(Error::Config("electrical power must be finite".into()));
        }
        if !(self.electrical_to_optical_ratio > 0.0 && self.oe_efficiency > 0.0) {
            return Err(Error::Config("ι and κ must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Z_o, A²/Hz.
    pub psd: f64,
    /// B_L, Hz.
    pub bandwidth: f64,
    /// K, total subcarriers including DC and the Hermitian mirror.
    pub subcarrier_count: usize,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.subcarrier_count;
        if k < 4 || !k.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "subcarrier count {k} must be even and >= 4"
            )));
        }
        if !(self.psd > 0.0 && self.bandwidth > 0.0) {
            return Err(Error::Config(
                "noise PSD and bandwidth must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Data-bearing subcarriers and the optical power each one carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcarrierPlan {
    pub total_subcarriers: usize,
    pub data_subcarriers: usize,
    pub per_subcarrier_optical_power: f64,
}

impl SubcarrierPlan {
    pub fn new(total_subcarriers: usize, optical_power: f64) -> Self {
        Self {
            total_subcarriers,
            data_subcarriers: total_subcarriers / 2 - 1,
            per_subcarrier_optical_power: optical_power / (total_subcarriers - 2) as f64,
        }
    }
}

pub fn dbm_to_watts(p: f64) -> f64 {
    10f64.powf((p - 30.0) / 10.0)
}

/// σ_k² = Z_o B_L / K.
pub fn noise_variance(cfg: &NoiseConfig) -> f64 {
    cfg.psd * cfg.bandwidth / cfg.subcarrier_count as f64
}

/// Everything the rate expressions need, with derived constants cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub power: PowerConfig,
    pub noise: NoiseConfig,
    pub plan: SubcarrierPlan,
    /// κ² P_{o,k}², multiplies every squared channel gain.
    signal_scale: f64,
    /// ι² σ_k².
    noise_term: f64,
    /// B_L / K.
    subcarrier_bandwidth: f64,
}

impl LinkBudget {
    pub fn new(power: PowerConfig, noise: NoiseConfig) -> Result<Self> {
        power.validate()?;
        noise.validate()?;
        let plan = SubcarrierPlan::new(noise.subcarrier_count, power.optical_power());
        let kappa = power.oe_efficiency;
        let p = plan.per_subcarrier_optical_power;
        let iota = power.electrical_to_optical_ratio;
        Ok(Self {
            power,
            noise,
            plan,
            signal_scale: kappa * kappa * p * p,
            noise_term: iota * iota * noise_variance(&noise),
            subcarrier_bandwidth: noise.bandwidth / noise.subcarrier_count as f64,
        })
    }

    pub fn data_subcarriers(&self) -> usize {
        self.plan.data_subcarriers
    }

    pub fn signal_scale(&self) -> f64 {
        self.signal_scale
    }

    pub fn noise_term(&self) -> f64 {
        self.noise_term
    }

    pub fn subcarrier_bandwidth(&self) -> f64 {
        self.subcarrier_bandwidth
    }

    /// Inter-LED interference seen by `user` (served by `home`) on subcarrier `k`.
    pub fn inter_led_interference(
        &self,
        user: usize,
        home: usize,
        k: usize,
        x: &AllocationMatrix,
        h: &ChannelMatrix,
    ) -> f64 {
        let mut acc = 0.0;
        for (i, g) in h.row(user).iter().enumerate() {
            if i != home && x.is_occupied(i, k) {
                acc += g * g;
            }
        }
        acc * self.signal_scale
    }
}

/// Per-subcarrier received terms of one pair for a fixed allocation. The
/// rate functions of the pair only need these, so bisection reuses them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLink {
    /// h_s² κ² P_{o,k}².
    pub strong_signal: f64,
    /// h_w² κ² P_{o,k}²; zero for singletons.
    pub weak_signal: f64,
    /// Inter-LED interference plus noise at the strong user, per occupied subcarrier.
    pub strong_floor: Vec<f64>,
    /// Same for the weak user; empty for singletons.
    pub weak_floor: Vec<f64>,
    pub subcarrier_bandwidth: f64,
    /// The pair has no weak member.
    pub singleton: bool,
}

impl PairLink {
    pub fn new(
        pairs: &PairSet,
        id: PairId,
        x: &AllocationMatrix,
        h: &ChannelMatrix,
        link: &LinkBudget,
    ) -> Result<Self> {
        let pair = pairs.get(id)?;
        let c = link.signal_scale();
        let hs = h.gain(pair.strong, id.led);
        let hw = pair.weak.map_or(0.0, |w| h.gain(w, id.led));
        let mut strong_floor = Vec::new();
        let mut weak_floor = Vec::new();
        for k in x.subcarriers_of(id.led, id.index) {
            strong_floor.push(
                link.inter_led_interference(pair.strong, id.led, k, x, h) + link.noise_term(),
            );
            if let Some(w) = pair.weak {
                weak_floor
                    .push(link.inter_led_interference(w, id.led, k, x, h) + link.noise_term());
            }
        }
        Ok(Self {
            strong_signal: hs * hs * c,
            weak_signal: hw * hw * c,
            strong_floor,
            weak_floor,
            subcarrier_bandwidth: link.subcarrier_bandwidth(),
            singleton: pair.weak.is_none(),
        })
    }

    pub fn subcarrier_count(&self) -> usize {
        self.strong_floor.len()
    }

    pub fn strong_sinr(&self, a_strong: f64, slot: usize) -> f64 {
        CAPACITY_BOUND_FACTOR * self.strong_signal * a_strong / self.strong_floor[slot]
    }

    pub fn weak_sinr(&self, a_strong: f64, a_weak: f64, slot: usize) -> f64 {
        CAPACITY_BOUND_FACTOR * self.weak_signal * a_weak
            / (self.weak_floor[slot] + self.strong_signal * a_strong)
    }

    /// Strong-user rate, bit/s. SIC removes the weak user's signal entirely.
    pub fn strong_rate(&self, a_strong: f64) -> f64 {
        let sum: f64 = (0..self.strong_floor.len())
            .map(|s| (1.0 + self.strong_sinr(a_strong, s)).log2())
            .sum();
        self.subcarrier_bandwidth * sum
    }

    /// Weak-user rate, bit/s, with the strong user's share as residual interference.
    pub fn weak_rate(&self, a_strong: f64, a_weak: f64) -> f64 {
        let sum: f64 = (0..self.weak_floor.len())
            .map(|s| (1.0 + self.weak_sinr(a_strong, a_weak, s)).log2())
            .sum();
        self.subcarrier_bandwidth * sum
    }
}

/// Achievable rates `(R_s, R_w)` of a two-user pair under `split`.
pub fn pair_rates(
    pairs: &PairSet,
    id: PairId,
    split: PowerSplit,
    x: &AllocationMatrix,
    h: &ChannelMatrix,
    link: &LinkBudget,
) -> Result<(f64, f64)> {
    split.validate()?;
    let pl = PairLink::new(pairs, id, x, h, link)?;
    Ok((
        pl.strong_rate(split.a_strong),
        pl.weak_rate(split.a_strong, split.a_weak),
    ))
}

/// Rate of a lone user holding its subcarriers with full power.
pub fn singleton_rate(
    pairs: &PairSet,
    id: PairId,
    x: &AllocationMatrix,
    h: &ChannelMatrix,
    link: &LinkBudget,
) -> Result<f64> {
    if pairs.get(id)?.weak.is_some() {
        return Err(Error::NotSingleton);
    }
    Ok(PairLink::new(pairs, id, x, h, link)?.strong_rate(1.0))
}

/// One row of the per-subcarrier SINR diagnostic dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinrRecord {
    pub led: usize,
    pub subcarrier: usize,
    pub pair: usize,
    pub user: usize,
    pub role: &'static str,
    pub sinr: f64,
}

/// Per-subcarrier SINR of every served user, given each pair's split
/// (`splits[led][pair]`).
pub fn sinr_table(
    pairs: &PairSet,
    splits: &[Vec<PowerSplit>],
    x: &AllocationMatrix,
    h: &ChannelMatrix,
    link: &LinkBudget,
) -> Result<Vec<SinrRecord>> {
    let mut out = Vec::new();
    for id in pairs.ids() {
        let pair = pairs.get(id)?;
        let split = splits
            .get(id.led)
            .and_then(|row| row.get(id.index))
            .copied()
            .ok_or(Error::PairOutOfRange {
                led: id.led,
                pair: id.index,
            })?;
        let pl = PairLink::new(pairs, id, x, h, link)?;
        for (slot, k) in x.subcarriers_of(id.led, id.index).enumerate() {
            out.push(SinrRecord {
                led: id.led,
                subcarrier: k,
                pair: id.index,
                user: pair.strong,
                role: if pair.weak.is_some() {
                    "strong"
                } else {
                    "single"
                },
                sinr: pl.strong_sinr(split.a_strong, slot),
            });
            if let Some(w) = pair.weak {
                out.push(SinrRecord {
                    led: id.led,
                    subcarrier: k,
                    pair: id.index,
                    user: w,
                    role: "weak",
                    sinr: pl.weak_sinr(split.a_strong, split.a_weak, slot),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{Pair, Scheme};

    fn link(k: usize) -> LinkBudget {
        LinkBudget::new(
            PowerConfig {
                electrical_power_dbm: 35.0,
                electrical_to_optical_ratio: 3.2,
                oe_efficiency: 0.53,
            },
            NoiseConfig {
                psd: 1e-19,
                bandwidth: 20e6,
                subcarrier_count: k,
            },
        )
        .unwrap()
    }

    #[test]
    fn dbm_conversion() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(35.0) - 3.1622776601683795).abs() < 1e-12);
        assert!((dbm_to_watts(0.0) - 0.001).abs() < 1e-18);
    }

    #[test]
    fn noise_variance_values() {
        let mut cfg = NoiseConfig {
            psd: 1e-19,
            bandwidth: 2e7,
            subcarrier_count: 16,
        };
        assert!((noise_variance(&cfg) - 1.25e-13).abs() < 1e-27);
        cfg.subcarrier_count = 32;
        assert!((noise_variance(&cfg) - 6.25e-14).abs() < 1e-27);
    }

    #[test]
    fn subcarrier_plan() {
        let l = link(16);
        assert_eq!(l.plan.data_subcarriers, 7);
        let po = l.power.optical_power();
        assert!((l.plan.per_subcarrier_optical_power * 14.0 - po).abs() < 1e-12);
        assert!(LinkBudget::new(
            l.power,
            NoiseConfig {
                subcarrier_count: 15,
                ..l.noise
            }
        )
        .is_err());
        assert!(LinkBudget::new(
            l.power,
            NoiseConfig {
                subcarrier_count: 2,
                ..l.noise
            }
        )
        .is_err());
    }

    fn single_led(pairs: Vec<Pair>) -> PairSet {
        PairSet::from_parts(Scheme::NotImposed, vec![pairs])
    }

    #[test]
    fn empty_allocation_gives_zero() {
        let h = ChannelMatrix::from_rows(&[vec![1e-5], vec![5e-6]]).unwrap();
        let pairs = single_led(vec![Pair {
            strong: 0,
            weak: Some(1),
        }]);
        let x = AllocationMatrix::unassigned(1, 7);
        let id = PairId { led: 0, index: 0 };
        let r = pair_rates(
            &pairs,
            id,
            PowerSplit::new(0.3, 0.7).unwrap(),
            &x,
            &h,
            &link(16),
        )
        .unwrap();
        assert_eq!(r, (0.0, 0.0));
    }

    #[test]
    fn interference_free_sinr() {
        let l = link(16);
        let h = ChannelMatrix::from_rows(&[vec![1.2e-5], vec![4e-6]]).unwrap();
        let pairs = single_led(vec![Pair {
            strong: 0,
            weak: Some(1),
        }]);
        let mut x = AllocationMatrix::unassigned(1, 7);
        x.set(0, 2, Some(0));
        let pl = PairLink::new(&pairs, PairId { led: 0, index: 0 }, &x, &h, &l).unwrap();
        let po = l.plan.per_subcarrier_optical_power;
        let expect = E / (2.0 * PI) * 1.2e-5f64.powi(2) * 0.53f64.powi(2) * 0.25 * po * po
            / (3.2f64.powi(2) * 1.25e-13);
        assert!((pl.strong_sinr(0.25, 0) - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn two_led_shared_subcarrier_oracle() {
        // Hand-evaluated rates: LED 0 serves pair (0, 1), LED 1 serves pair (2, 3),
        // both on data subcarrier 1. Constants computed independently below.
        let l = link(16);
        let h = ChannelMatrix::from_rows(&[
            vec![1.5e-5, 2.0e-6],
            vec![6.0e-6, 3.0e-6],
            vec![1.0e-6, 1.1e-5],
            vec![2.5e-6, 5.0e-6],
        ])
        .unwrap();
        let pairs = PairSet::from_parts(
            Scheme::Imposed,
            vec![
                vec![Pair {
                    strong: 0,
                    weak: Some(1),
                }],
                vec![Pair {
                    strong: 2,
                    weak: Some(3),
                }],
            ],
        );
        let mut x = AllocationMatrix::unassigned(2, 7);
        x.set(0, 1, Some(0));
        x.set(1, 1, Some(0));
        let (rs, rw) = pair_rates(
            &pairs,
            PairId { led: 0, index: 0 },
            PowerSplit::new(0.2, 0.8).unwrap(),
            &x,
            &h,
            &l,
        )
        .unwrap();
        // Oracle: straight transcription with explicit constants.
        let po = 3.2 * 10f64.powf(0.5).sqrt() / 14.0;
        let c = 0.53f64 * 0.53 * po * po;
        let noise = 3.2f64 * 3.2 * 1e-19 * 20e6 / 16.0;
        let f = std::f64::consts::E / (2.0 * std::f64::consts::PI);
        let sinr_s = f * (1.5e-5f64).powi(2) * c * 0.2 / ((2.0e-6f64).powi(2) * c + noise);
        let sinr_w = f * (6.0e-6f64).powi(2) * c * 0.8
            / ((3.0e-6f64).powi(2) * c + (1.5e-5f64).powi(2) * c * 0.2 + noise);
        let bw = 20e6 / 16.0;
        assert!((rs - bw * (1.0 + sinr_s).log2()).abs() / rs < 1e-12);
        assert!((rw - bw * (1.0 + sinr_w).log2()).abs() / rw < 1e-12);

        // Removing the interferer can only help.
        x.set(1, 1, None);
        let (rs2, rw2) = pair_rates(
            &pairs,
            PairId { led: 0, index: 0 },
            PowerSplit::new(0.2, 0.8).unwrap(),
            &x,
            &h,
            &l,
        )
        .unwrap();
        assert!(rs2 > rs && rw2 > rw);
    }

    #[test]
    fn singleton_matches_full_power_strong_user() {
        let l = link(16);
        let h = ChannelMatrix::from_rows(&[vec![9e-6, 1e-6], vec![7e-6, 2e-6], vec![1e-6, 8e-6]])
            .unwrap();
        let paired = PairSet::from_parts(
            Scheme::NotImposed,
            vec![
                vec![Pair {
                    strong: 0,
                    weak: Some(1),
                }],
                vec![Pair {
                    strong: 2,
                    weak: None,
                }],
            ],
        );
        let alone = PairSet::from_parts(
            Scheme::NotImposed,
            vec![
                vec![Pair {
                    strong: 0,
                    weak: None,
                }],
                vec![Pair {
                    strong: 2,
                    weak: None,
                }],
            ],
        );
        let mut x = AllocationMatrix::unassigned(2, 7);
        x.set(0, 0, Some(0));
        x.set(0, 3, Some(0));
        x.set(1, 3, Some(0));
        let id = PairId { led: 0, index: 0 };
        let (rs, _) =
            pair_rates(&paired, id, PowerSplit::new(1.0, 0.0).unwrap(), &x, &h, &l).unwrap();
        assert_eq!(singleton_rate(&alone, id, &x, &h, &l).unwrap(), rs);
        assert_eq!(
            singleton_rate(&paired, id, &x, &h, &l),
            Err(Error::NotSingleton)
        );

        // One subcarrier, no interference: closed form.
        let id2 = PairId { led: 1, index: 0 };
        let mut x2 = AllocationMatrix::unassigned(2, 7);
        assert_eq!(singleton_rate(&alone, id2, &x2, &h, &l).unwrap(), 0.0);
        x2.set(1, 4, Some(0));
        let po = l.plan.per_subcarrier_optical_power;
        let sinr = CAPACITY_BOUND_FACTOR * 64e-12 * 0.2809 * po * po / (10.24 * 1.25e-13);
        let expect = 1.25e6 * (1.0 + sinr).log2();
        let got = singleton_rate(&alone, id2, &x2, &h, &l).unwrap();
        assert!((got - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn errors() {
        let l = link(16);
        let h = ChannelMatrix::from_rows(&[vec![1e-5], vec![5e-6]]).unwrap();
        let pairs = single_led(vec![Pair {
            strong: 0,
            weak: Some(1),
        }]);
        let x = AllocationMatrix::unassigned(1, 7);
        let bad = PairId { led: 0, index: 3 };
        assert!(matches!(
            pair_rates(&pairs, bad, PowerSplit::new(0.5, 0.5).unwrap(), &x, &h, &l),
            Err(Error::PairOutOfRange { .. })
        ));
        assert!(PowerSplit::new(0.7, 0.7).is_err());
    }
}

//! Invariant checks shared by the property suite and the acceptance run.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vlc_noma::allocation::{random_solution, Score};
use vlc_noma::geometry::channel_gain;
use vlc_noma::phy::{pair_rates, PairLink};
use vlc_noma::{
    d_nlupa, Binding, ChannelMatrix, Led, LinkBudget, NoiseConfig, PairId, PairSet, PenaltyParams,
    Point3, PowerConfig, PowerSplit, ReceiverSpec, Scheme,
};

pub fn receiver(fov: f64) -> ReceiverSpec {
    ReceiverSpec {
        fov_semi_angle: fov,
        pd_area: 1e-4,
        optical_filter_gain: 1.0,
        refractive_index: 1.5,
    }
}

pub fn link(k: usize) -> LinkBudget {
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

/// Two LEDs, two pairs each, gains drawn from `g`.
pub fn two_led_instance(g: &[f64]) -> (ChannelMatrix, PairSet) {
    let rows: Vec<Vec<f64>> = g.chunks(2).map(|c| c.to_vec()).collect();
    let h = ChannelMatrix::from_rows(&rows).unwrap();
    let binding = Binding::from_assignment(vec![0, 0, 0, 0, 1, 1, 1, 1], 2);
    let pairs = d_nlupa(&binding, &h, Scheme::Imposed).unwrap();
    (h, pairs)
}

pub fn gains() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-7..1e-5f64, 16)
}

pub fn pair_link() -> impl Strategy<Value = PairLink> {
    (
        1e-4..1e2f64,
        0.0..1.0f64,
        prop::collection::vec(1e-3..1e1f64, 1..6),
    )
        .prop_map(|(strong, ratio, floors)| PairLink {
            strong_signal: strong,
            weak_signal: strong * ratio,
            weak_floor: floors.iter().map(|f| f * 1.5).collect(),
            strong_floor: floors,
            subcarrier_bandwidth: 1.25e6,
            singleton: false,
        })
}

pub fn fov_args() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (
        10.0..80.0f64,
        0.5..9.0f64,
        0.0..std::f64::consts::TAU,
        0.5..3.0f64,
    )
}

pub fn fov_cutoff((fov, extra, bearing, drop): (f64, f64, f64, f64)) -> Result<(), TestCaseError> {
    let led = Led::new(Point3::new(0.0, 0.0, drop), 60.0).unwrap();
    let incidence = (fov + extra).min(89.0).to_radians();
    let r = drop * incidence.tan();
    let user = receiver(fov).at(Point3::new(r * bearing.cos(), r * bearing.sin(), 0.0));
    prop_assert_eq!(channel_gain(&led, &user).unwrap(), 0.0);

    let inside = (fov * 0.9).to_radians();
    let r = drop * inside.tan();
    let user = receiver(fov).at(Point3::new(r * bearing.cos(), r * bearing.sin(), 0.0));
    prop_assert!(channel_gain(&led, &user).unwrap() > 0.0);
    Ok(())
}

pub fn rate_monotone((pl, a, b): (PairLink, f64, f64)) -> Result<(), TestCaseError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    prop_assert!(pl.strong_rate(lo) <= pl.strong_rate(hi));
    prop_assert!(pl.weak_rate(lo, 1.0 - lo) >= pl.weak_rate(hi, 1.0 - hi));
    Ok(())
}

pub fn interference_monotone((g, seed, k): (Vec<f64>, u64, usize)) -> Result<(), TestCaseError> {
    let (h, pairs) = two_led_instance(&g);
    let link = link(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_solution(&pairs, link.data_subcarriers(), &mut rng);
    x.set(1, k, None);
    let mut busy = x.clone();
    busy.set(1, k, Some(0));
    for user in 0..4 {
        let before = link.inter_led_interference(user, 0, k, &x, &h);
        let after = link.inter_led_interference(user, 0, k, &busy, &h);
        prop_assert!(after >= before);
    }
    let split = PowerSplit::new(0.3, 0.7).unwrap();
    for index in 0..2 {
        let id = PairId { led: 0, index };
        let (rs0, rw0) = pair_rates(&pairs, id, split, &x, &h, &link).unwrap();
        let (rs1, rw1) = pair_rates(&pairs, id, split, &busy, &h, &link).unwrap();
        prop_assert!(rs1 <= rs0 && rw1 <= rw0);
    }
    Ok(())
}

pub fn rates() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (
        prop::collection::vec(prop_oneof![Just(0.0), 0.0..5e6f64], 1..30),
        0.0..1.0f64,
    )
}

pub fn penalty_bound((rates, spread): (Vec<f64>, f64)) -> Result<(), TestCaseError> {
    let p = PenaltyParams {
        spread_limit: spread,
        ..PenaltyParams::default()
    };
    let s = Score::from_rates(rates.iter().copied(), &p);
    prop_assert!(s.penalized <= s.objective);
    let inactive = s.f_cons == 0.0 && s.f_diff <= 0.0;
    prop_assert_eq!(s.penalized == s.objective, inactive);
    prop_assert_eq!(s.objective, s.min_rate / p.rate_unit);
    Ok(())
}

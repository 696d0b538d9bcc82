use std::f64::consts::{E, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vlc_noma::*;

const GAINS: [f64; 4] = [1e-5, 8e-6, 4e-6, 2e-6];

fn link() -> LinkBudget {
    LinkBudget::new(
        PowerConfig {
            electrical_power_dbm: 35.0,
            electrical_to_optical_ratio: 3.2,
            oe_efficiency: 0.53,
        },
        NoiseConfig {
            psd: 1e-19,
            bandwidth: 20e6,
            subcarrier_count: 8,
        },
    )
    .unwrap()
}

fn instance() -> (ChannelMatrix, PairSet) {
    let h = ChannelMatrix::from_rows(&GAINS.map(|g| vec![g])).unwrap();
    let binding = bind_max_gain(&h).unwrap();
    let pairs = d_nlupa(&binding, &h, Scheme::Imposed).unwrap();
    (h, pairs)
}

/// Rates of the four users computed from scratch. Pair `p` is (user p,
/// user p + 2) after sorting by gain; `counts[p]` subcarriers each.
fn oracle_rates(counts: [usize; 2]) -> [f64; 4] {
    let pe = 10f64.powf((35.0 - 30.0) / 10.0);
    let po = 3.2 * pe.sqrt();
    let p = po / (8.0 - 2.0);
    let noise = 3.2 * 3.2 * 1e-19 * 20e6 / 8.0;
    let band = 20e6 / 8.0;
    let sig = |h: f64| (0.53 * p * h).powi(2);
    let bound = E / (2.0 * PI);
    let mut rates = [0.0; 4];
    for pair in 0..2 {
        let n = counts[pair] as f64;
        if n == 0.0 {
            continue;
        }
        let (ss, sw) = (sig(GAINS[pair]), sig(GAINS[pair + 2]));
        let rs = |a: f64| band * n * (1.0 + bound * ss * a / noise).log2();
        let rw = |a: f64| band * n * (1.0 + bound * sw * (1.0 - a) / (noise + ss * a)).log2();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rs(mid) < rw(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rates[pair] = rs(lo);
        rates[pair + 2] = rw(lo);
    }
    rates
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn objective_matches_independent_derivation() {
    let (h, pairs) = instance();
    assert_eq!(
        pairs.pairs_of(0),
        &[
            Pair {
                strong: 0,
                weak: Some(2)
            },
            Pair {
                strong: 1,
                weak: Some(3)
            },
        ]
    );
    let link = link();
    let penalty = PenaltyParams::default();
    for (cells, counts) in [
        ([Some(0), Some(1), Some(0)], [2, 1]),
        ([Some(1), Some(1), Some(0)], [1, 2]),
        ([Some(1), Some(1), Some(1)], [0, 3]),
        ([None, Some(0), None], [1, 0]),
    ] {
        let x = AllocationMatrix::from_rows(&[cells.to_vec()]).unwrap();
        let report = evaluate(&x, &pairs, &h, &link, &penalty).unwrap();
        let want = oracle_rates(counts);
        assert_eq!(report.user_rates.len(), 4);
        for (u, (got, want)) in report.user_rates.iter().zip(want).enumerate() {
            assert!(close(*got, want, 1e-6), "user {u}: {got} vs {want}");
        }
        let min = want.iter().copied().fold(f64::INFINITY, f64::min);
        let max = want.iter().copied().fold(0.0, f64::max);
        let zeros = want.iter().filter(|r| **r == 0.0).count() as f64 / 4.0;
        let diff = (max - min) / max - 0.2;
        let o = min / 1e6;
        let o_pen = o - 1e5 * zeros - 10.0 * diff.max(0.0);
        assert_eq!(report.f_cons, zeros);
        assert!((report.f_diff - diff).abs() < 1e-6);
        assert!(close(report.objective, o, 1e-6) || (o == 0.0 && report.objective == 0.0));
        assert!(
            close(report.penalized, o_pen, 1e-6),
            "{} vs {o_pen}",
            report.penalized
        );
    }
}

fn exhaustive_best(problem: &Problem<'_>) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for code in 0..27usize {
        let cells: Vec<Option<usize>> = (0..3)
            .map(|k| match code / 3usize.pow(k) % 3 {
                2 => None,
                v => Some(v),
            })
            .collect();
        let x = AllocationMatrix::from_rows(&[cells]).unwrap();
        best = best.max(problem.evaluate(&x).unwrap().penalized);
    }
    best
}

#[test]
fn both_optimizers_reach_the_enumerated_optimum() {
    let (h, pairs) = instance();
    let link = link();
    let problem = Problem::new(&pairs, &h, &link, PenaltyParams::default());
    let best = exhaustive_best(&problem);
    let sa = SaParams {
        outer_iters: 40,
        ..SaParams::default()
    };
    let ts = TsParams {
        max_iterations: 500,
        ..TsParams::default()
    };
    for seed in 0..5 {
        let a = simulated_annealing(&problem, &sa, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(close(a.report.penalized, best, 1e-12));
        let t = tabu_search(&problem, &ts, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(close(t.report.penalized, best, 1e-12));
    }
}

#[test]
fn tabu_never_revisits_without_aspiration() {
    let h = ChannelMatrix::from_rows(&[
        vec![9e-6, 1e-6],
        vec![7e-6, 2e-6],
        vec![3e-6, 1e-6],
        vec![2e-6, 1.5e-6],
        vec![1e-6, 8e-6],
        vec![2e-6, 6e-6],
    ])
    .unwrap();
    let binding = bind_max_gain(&h).unwrap();
    let pairs = d_nlupa(&binding, &h, Scheme::Imposed).unwrap();
    let link = link();
    let problem = Problem::new(&pairs, &h, &link, PenaltyParams::default());
    let params = TsParams {
        max_iterations: 3000,
        ..TsParams::default()
    };
    for seed in 0..3 {
        let out = tabu_search(&problem, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(out.evaluations, 3000 * params.candidate_list_len);
        let mut visited = vec![out.start_fingerprint];
        for step in &out.steps {
            let recent = &visited[visited.len().saturating_sub(params.tabu_list_len)..];
            if recent.contains(&step.fingerprint) {
                assert!(step.aspiration);
            }
            visited.push(step.fingerprint);
        }
        // Consecutive solutions always differ by one move.
        assert!(out
            .steps
            .windows(2)
            .all(|w| w[0].fingerprint != w[1].fingerprint));
    }
}

#[test]
fn zero_temperature_annealing_is_monotone() {
    let (h, pairs) = instance();
    let link = link();
    let problem = Problem::new(&pairs, &h, &link, PenaltyParams::default());
    let params = SaParams {
        t0: 1e-300,
        outer_iters: 20,
        m0: 10.0,
        record_trace: true,
        ..SaParams::default()
    };
    let out = simulated_annealing(&problem, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    for w in out.trace.windows(2) {
        assert!(w[1].current >= w[0].current);
    }
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vlc_noma::allocation::{neighbor, random_solution};
use vlc_noma::{PairId, PenaltyParams, Problem, SaParams};
use vlc_noma_bench::network;

fn full_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for users in [10, 20, 40] {
        let net = network(users, 16, 7);
        let problem = Problem::new(
            &net.pairs,
            &net.channel,
            &net.link,
            PenaltyParams::default(),
        );
        let x = random_solution(
            &net.pairs,
            net.link.data_subcarriers(),
            &mut ChaCha8Rng::seed_from_u64(1),
        );
        group.bench_with_input(BenchmarkId::from_parameter(users), &x, |b, x| {
            b.iter(|| problem.evaluate(black_box(x)).unwrap().penalized)
        });
    }
    group.finish();
}

fn pair_bisection(c: &mut Criterion) {
    let net = network(20, 32, 3);
    let problem = Problem::new(
        &net.pairs,
        &net.channel,
        &net.link,
        PenaltyParams::default(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_solution(&net.pairs, net.link.data_subcarriers(), &mut rng);
    let id = PairId { led: 0, index: 0 };
    c.bench_function("solve_pair", |b| {
        b.iter(|| problem.solve_pair(black_box(&x), id))
    });
    c.bench_function("neighbor", |b| {
        b.iter(|| neighbor(black_box(&x), &net.pairs, &mut rng).unwrap())
    });
}

fn short_anneal(c: &mut Criterion) {
    let net = network(20, 16, 5);
    let problem = Problem::new(
        &net.pairs,
        &net.channel,
        &net.link,
        PenaltyParams::default(),
    );
    let params = SaParams {
        outer_iters: 20,
        ..SaParams::default()
    };
    let mut group = c.benchmark_group("anneal");
    group.sample_size(10);
    group.bench_function("20x50", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            vlc_noma::simulated_annealing(&problem, &params, &mut rng)
                .unwrap()
                .report
                .min_rate
        })
    });
    group.finish();
}

criterion_group!(benches, full_evaluation, pair_bisection, short_anneal);
criterion_main!(benches);

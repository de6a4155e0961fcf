use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use equilibra_bench::{lottery_ladder, two_player_ring, weighted_ring};
use equilibra_core::lp::{Lp, Rel};
use equilibra_core::nego::nego_iterate;
use equilibra_core::num::{q, qf};
use equilibra_core::{corpus, graph, risk, ssg, zs, Game};

fn parity(c: &mut Criterion) {
    let mut group = c.benchmark_group("zielonka");
    for n in [16, 64, 256] {
        let (g, colors) = two_player_ring(n);
        let alive = vec![true; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| zs::zielonka(black_box(&g), &alive, &colors))
        });
    }
    group.finish();
}

fn karp(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_mean_cycle");
    for n in [16, 64, 256] {
        let adj = weighted_ring(n);
        let alive = vec![true; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| graph::min_mean_cycle(black_box(&adj), &alive))
        });
    }
    group.finish();
}

fn simplex(c: &mut Criterion) {
    // Dense covering LP: minimize sum x subject to x_i + x_{i+1} >= 1 + i/k.
    let k = 12;
    let mut lp = Lp::new(k).minimize(vec![q(1); k]);
    for i in 0..k {
        let mut row = vec![q(0); k];
        row[i] = q(1);
        row[(i + 1) % k] = q(1);
        lp.push(row, Rel::Ge, q(1) + qf(i as i64, k as i64));
    }
    c.bench_function("simplex_cover_12", |b| b.iter(|| black_box(&lp).solve()));
}

fn negotiation(c: &mut Criterion) {
    let sans = corpus::game("sans_spe");
    c.bench_function("nego_iterate_sans_spe", |b| b.iter(|| nego_iterate(black_box(&sans), 8).unwrap()));
    let ns = corpus::game("not_stationary");
    c.bench_function("nego_iterate_not_stationary_8", |b| b.iter(|| nego_iterate(black_box(&ns), 8).unwrap()));
}

fn stochastic(c: &mut Criterion) {
    let mut group = c.benchmark_group("absorption");
    for k in [4, 16, 48] {
        let g = Game::parse(&lottery_ladder(k)).unwrap();
        let f = vec![true; g.arena.m()];
        let m = risk::stationary_profile(&g, &f).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| ssg::induced_chain(black_box(&g), &m).unwrap().absorption())
        });
    }
    group.finish();

    let g = corpus::game("ex_extreme1");
    let all = vec![true; g.p()];
    c.bench_function("xrse_exists_ex_extreme1", |b| b.iter(|| risk::xrse_exists(black_box(&g), &all).unwrap()));
    let lottery = corpus::game("lottery");
    let m = risk::stationary_profile(&lottery, &vec![true; lottery.arena.m()]).unwrap();
    c.bench_function("entropic_lottery_128", |b| {
        b.iter(|| risk::entropic_measure(black_box(&lottery), None, &q(1), &m, 0, 128).unwrap())
    });
}

criterion_group!(benches, parity, karp, simplex, negotiation, stochastic);
criterion_main!(benches);

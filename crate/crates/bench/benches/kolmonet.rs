// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use kolmonet::games::{run_game, GameSpec, GreedyAdversary, RandomAdversary, RandomPolicy, Theorem};
use kolmonet::networks::{Instance, Topology};
use kolmonet::proxy::{Corpus, DeflateCompressor, Proxy};
use kolmonet::search::{enumerate_feasible, SearchBudget};
use kolmonet::{bits, BitString, ComplexityOracle};

fn oracle(c: &mut Criterion) {
    let o = ComplexityOracle::table_free();
    let strings: Vec<BitString> = BitString::all_up_to(6).collect();
    c.bench_function("oracle/all_pairs_len6", |b| {
        b.iter(|| {
            let mut total = 0i64;
            for u in &strings {
                for v in &strings {
                    total += o.complexity(u, v).value().unwrap_or(0);
                }
            }
            black_box(total)
        })
    });
    let u = bits("0110100110010110");
    c.bench_function("oracle/profile3", |b| {
        b.iter(|| black_box(o.profile(&[u.clone(), bits("0110"), bits("1001")])))
    });
}

fn search(c: &mut Criterion) {
    let o = ComplexityOracle::table_free();
    let inst = Instance::new("0", "10", "01", "1");
    let mut g = c.benchmark_group("search/enumerate_feasible");
    for len in [4usize, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, &len| {
            b.iter(|| enumerate_feasible(Topology::F, &inst, 6, &o, &SearchBudget::programs(len)).unwrap())
        });
    }
    g.finish();
}

fn games(c: &mut Criterion) {
    let mut g = c.benchmark_group("games");
    g.sample_size(10);
    for t in Theorem::ALL {
        let spec = GameSpec::standard(t, 1, 0).with_horizon(1000);
        g.bench_function(BenchmarkId::new("random_1000", t.tag()), |b| {
            b.iter(|| {
                let mut adv = RandomAdversary::new(7, RandomPolicy::default());
                run_game(spec, 7, &mut adv).unwrap().1
            })
        });
    }
    let spec = GameSpec::standard(Theorem::GapCpqF, 1, 0).with_horizon(2000);
    g.bench_function("greedy_2000/GAP_CPQ_F", |b| {
        b.iter(|| run_game(spec, 0, &mut GreedyAdversary::new()).unwrap().1)
    });
    g.finish();
}

fn proxy(c: &mut Criterion) {
    let corpus = Corpus::bundled().unwrap();
    let d = DeflateCompressor;
    let p = Proxy::new(&d);
    let files = corpus.files();
    c.bench_function("proxy/ncd_pair", |b| {
        b.iter(|| p.ncd(&files[0].bytes, &files[1].bytes).unwrap())
    });
}

criterion_group!(benches, oracle, search, games, proxy);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fpp_lab::batch::Mode;
use fpp_lab::witness::{self, SimplexPoint};
use fpp_lab::{fixtures, sample};

fn pairs(count: usize) -> Vec<(SimplexPoint, SimplexPoint)> {
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    (0..count)
        .map(|_| (sample::simplex_point(&mut rng, 6, false), sample::simplex_point(&mut rng, 6, false)))
        .collect()
}

fn nonexpansive(c: &mut Criterion) {
    let dict = witness::build_witness(&fixtures::example22(), None, sample::DEFAULT_SEED).unwrap();
    let mut group = c.benchmark_group("shift_nonexpansive");
    group.sample_size(10);
    for count in [64, 256] {
        let ps = pairs(count);
        for (name, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, count), &ps, |b, ps| {
                b.iter(|| witness::verify_nonexpansive(&dict, ps, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn support_sets(c: &mut Criterion) {
    let fam = fixtures::mixed_family(24);
    let w = fpp_lab::WfSpace::new(fam.predual.clone().unwrap()).unwrap();
    let g = fpp_lab::extraction::grind(&fam, None).unwrap();
    let n = fpp_lab::extraction::greedy_norming(&w, &g, 16).unwrap();
    let mut group = c.benchmark_group("support_sets");
    group.sample_size(10);
    for (name, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
        group.bench_function(name, |b| b.iter(|| fpp_lab::extraction::support_sets(&g, &n, 16, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, nonexpansive, support_sets);
criterion_main!(benches);

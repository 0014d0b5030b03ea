use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;
use simonq::par::{count_trials, count_trials_seq};
use simonq::simon::{encrypt, key_schedule, Block, Variant};

fn trials(c: &mut Criterion) {
    let p = Variant::Simon32_64.params();
    let keys = key_schedule(&p, 0x1918_1110_0908_0100).unwrap();
    // Low bit of a 16-round encryption of a random block.
    let trial = |rng: &mut rand_chacha::ChaCha8Rng| {
        let b = Block::new(rng.gen::<u64>() & 0xffff, rng.gen::<u64>() & 0xffff);
        encrypt(&p, &keys, b, 16).unwrap().right & 1 == 1
    };
    let mut g = c.benchmark_group("count_trials");
    g.sample_size(10);
    for total in [1u64 << 14, 1 << 18] {
        g.bench_with_input(BenchmarkId::new("parallel", total), &total, |b, &n| {
            b.iter(|| count_trials(n, 1, trial))
        });
        g.bench_with_input(BenchmarkId::new("sequential", total), &total, |b, &n| {
            b.iter(|| count_trials_seq(n, 1, trial))
        });
    }
    g.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linrec::seqterm::{self, nth_term_factored, nth_term_fiduccia};
use linrec::{poly, BigIndex, DensePoly, FieldCtx, Fp, Recurrence};

const MERSENNE61: u64 = (1 << 61) - 1;

fn repeated_factor(ctx: &FieldCtx, m: usize) -> Recurrence<'_> {
    let q = DensePoly::from_u64s(ctx, &[3, 1, 1]);
    let p = poly::pow_expand(ctx, &q, m);
    let init = (0..2 * m).map(|i| ctx.elem(i as u64 + 1)).collect();
    Recurrence::from_charpoly(ctx, &p, init).unwrap()
}

fn single_term(c: &mut Criterion) {
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let index = BigIndex::pow2(62);
    let mut group = c.benchmark_group("single_term");
    group.sample_size(10);
    for m in [16, 64, 256] {
        let rec = repeated_factor(&ctx, m);
        group.bench_with_input(BenchmarkId::new("fiduccia", 2 * m), &rec, |b, rec| {
            b.iter(|| nth_term_fiduccia(rec, &index).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("factored", 2 * m), &rec, |b, rec| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            b.iter(|| nth_term_factored(rec, &index, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let coeffs: Vec<Fp> = (1..=24).map(|i| ctx.elem(i)).collect();
    let init: Vec<Fp> = (0..24).map(|i| ctx.elem(i * i + 1)).collect();
    let rec = Recurrence::new(&ctx, coeffs, init).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let indices: Vec<BigIndex> = (0..64).map(|_| BigIndex::random_bits(&mut rng, 120)).collect();
    let mut group = c.benchmark_group("batch_64_terms");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| seqterm::nth_terms_sequential(&rec, &indices, 7).unwrap())
    });
    group.bench_function("parallel", |b| {
        b.iter(|| seqterm::nth_terms(&rec, &indices, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, single_term, batch);
criterion_main!(benches);

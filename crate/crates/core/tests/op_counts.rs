use linrec::seqterm::{nth_term_factored, nth_term_fiduccia};
use linrec::{poly, BigIndex, DensePoly, FieldCtx, Fp, OpCounts, Recurrence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MERSENNE61: u64 = (1 << 61) - 1;

fn repeated_factor_recurrence(ctx: &FieldCtx, f: usize, m: usize) -> Recurrence<'_> {
    // Q = y^f + y + 3 is squarefree with nonzero constant term for f = 2
    let mut q = vec![Fp::ZERO; f + 1];
    q[0] = ctx.elem(3);
    q[1] = ctx.elem(1);
    q[f] = Fp::ONE;
    let p = poly::pow_expand(ctx, &DensePoly::new(q), m);
    let init = (0..f * m).map(|i| ctx.elem(i as u64 + 1)).collect();
    Recurrence::from_charpoly(ctx, &p, init).unwrap()
}

fn counts(f: usize, m: usize, bits: u32) -> (OpCounts, OpCounts) {
    let ctx = FieldCtx::with_counters(MERSENNE61).unwrap();
    let rec = repeated_factor_recurrence(&ctx, f, m);
    let d = BigIndex::pow2(bits);
    ctx.reset_counters();
    let a = nth_term_fiduccia(&rec, &d).unwrap();
    let fid = ctx.counts();
    ctx.reset_counters();
    let b = nth_term_factored(&rec, &d, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let fac = ctx.counts();
    assert_eq!(a, b);
    (fid, fac)
}

#[test]
fn factored_needs_fewer_multiplications_for_high_multiplicity() {
    let (fid, fac) = counts(2, 64, 62);
    eprintln!("f=2 m=64: fiduccia {fid:?} factored {fac:?}");
    assert!(fac.mults < fid.mults);
}

#[test]
fn counts_scale_with_index_bits() {
    let (fid31, fac31) = counts(2, 32, 31);
    let (fid62, fac62) = counts(2, 32, 62);
    eprintln!("fiduccia {} -> {}, factored {} -> {}", fid31.mults, fid62.mults, fac31.mults, fac62.mults);
    assert!(fid62.mults as f64 >= 1.8 * fid31.mults as f64);
    assert!((fac62.mults as f64) < 1.5 * fac31.mults as f64);
}


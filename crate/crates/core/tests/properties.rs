use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linrec::bivar::{BivarRing, DEFAULT_MAX_RETRIES};
use linrec::seqterm::{
    choose_algo, nth_term_factored, nth_term_fiduccia, nth_term_naive, nth_terms, AlgoTag,
};
use linrec::{poly, BigIndex, DensePoly, FieldCtx, Fp, Recurrence};

const PRIMES: [u64; 4] = [101, 65537, 2013265921, (1 << 61) - 1];

fn elems(ctx: &FieldCtx, raw: &[u64]) -> Vec<Fp> {
    raw.iter().map(|&v| ctx.elem(v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_algorithms_agree(
        p in prop::sample::select(PRIMES.to_vec()),
        coeffs in prop::collection::vec(any::<u64>(), 1..=6),
        init_seed in any::<u64>(),
        index in 0u64..3000,
        seed in any::<u64>(),
    ) {
        let ctx = FieldCtx::new(p).unwrap();
        let d = coeffs.len();
        let init: Vec<u64> = (0..d as u64).map(|i| init_seed.wrapping_mul(i + 7)).collect();
        let rec = Recurrence::new(&ctx, elems(&ctx, &coeffs), elems(&ctx, &init)).unwrap();
        let index = BigIndex::from(index);
        let naive = nth_term_naive(&rec, &index).unwrap();
        prop_assert_eq!(nth_term_fiduccia(&rec, &index).unwrap(), naive);
        if rec.factored_path_check(&index).is_ok() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            prop_assert_eq!(nth_term_factored(&rec, &index, &mut rng).unwrap(), naive);
        }
    }

    #[test]
    fn shifted_terms_obey_the_recurrence(
        coeffs in prop::collection::vec(1u64..65537, 1..=5),
        mult in 1usize..=3,
        bits in 64u32..200,
        seed in any::<u64>(),
    ) {
        let ctx = FieldCtx::new(65537).unwrap();
        // raise the characteristic polynomial to a power to force repeated factors
        let base = Recurrence::new(&ctx, elems(&ctx, &coeffs), vec![Fp::ZERO; coeffs.len()]).unwrap();
        let charpoly = poly::pow_expand(&ctx, base.charpoly(), mult);
        let d = charpoly.len() - 1;
        let init = (0..d as u64).map(|i| ctx.elem(i * i + seed % 1000)).collect();
        let rec = Recurrence::from_charpoly(&ctx, &charpoly, init).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = BigIndex::random_bits(&mut rng, bits);
        let indices: Vec<BigIndex> = (0..=d as u64).map(|j| start.add_small(j)).collect();
        let terms = nth_terms(&rec, &indices, seed).unwrap();
        let next = (0..d).fold(Fp::ZERO, |acc, j| ctx.mul_add(acc, rec.coeffs()[j], terms[j]));
        prop_assert_eq!(next, terms[d]);
    }

    #[test]
    fn dispatch_respects_preconditions(
        p in prop::sample::select(vec![3u64, 5, 7, 101]),
        coeffs in prop::collection::vec(0u64..8, 1..=8),
        index in 0u64..100,
    ) {
        let ctx = FieldCtx::new(p).unwrap();
        let d = coeffs.len();
        let rec = Recurrence::new(&ctx, elems(&ctx, &coeffs), vec![Fp::ONE; d]).unwrap();
        let index = BigIndex::from(index);
        if choose_algo(&rec, &index) == AlgoTag::Factored {
            prop_assert!(!rec.coeffs()[0].is_zero());
            prop_assert!(p > d as u64);
            prop_assert!(!index.lt_small(2 * d as u64));
        }
    }

    #[test]
    fn tangle_inverts_untangle(
        q_low in prop::collection::vec(any::<u64>(), 1..=4),
        m in 1usize..=12,
        c_seed in any::<u64>(),
    ) {
        let ctx = FieldCtx::new((1 << 61) - 1).unwrap();
        let mut q = elems(&ctx, &q_low);
        q.push(Fp::ONE);
        let q = DensePoly::new(q);
        prop_assume!(poly::gcd(&ctx, &q, &q.derivative(&ctx)).unwrap().is_one());
        let ring = BivarRing::new(&ctx, &q, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(c_seed);
        let c = DensePoly::new((0..ring.n()).map(|_| ctx.random(&mut rng)).collect());
        let delta = ring.untangle(&c).unwrap();
        prop_assert_eq!(ring.tangle(&delta, &mut rng, DEFAULT_MAX_RETRIES).unwrap(), c);
    }
}

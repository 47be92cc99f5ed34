//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::fmt::Write as _;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linrec::bivar::{BivarRing, LinearForm, DEFAULT_MAX_RETRIES};
use linrec::dense::Matrix;
use linrec::factor::{crt_combine, yun_squarefree};
use linrec::seqterm::{
    binomial_remainder, delta_for_factor, nth_term_factored, nth_term_fiduccia, nth_term_naive,
};
use linrec::{poly, BigIndex, DensePoly, FieldCtx, Fp, Recurrence};

const MERSENNE61: u64 = (1 << 61) - 1;
const SMALL_PRIMES: [u64; 4] = [101, 65537, 2013265921, MERSENNE61];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha8Rng, len: usize) -> DensePoly {
    DensePoly::new((0..len).map(|_| ctx.random(rng)).collect())
}

fn random_monic(ctx: &FieldCtx, rng: &mut ChaCha8Rng, deg: usize) -> DensePoly {
    let mut c: Vec<Fp> = (0..deg).map(|_| ctx.random(rng)).collect();
    c.push(Fp::ONE);
    DensePoly::new(c)
}

fn is_squarefree(ctx: &FieldCtx, q: &DensePoly) -> bool {
    poly::gcd(ctx, q, &q.derivative(ctx)).unwrap().is_one()
}

fn coprime(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> bool {
    poly::gcd(ctx, a, b).unwrap().is_one()
}

/// Monic squarefree factors of the given degrees, pairwise coprime, all with
/// nonzero constant term.
fn random_parts(ctx: &FieldCtx, rng: &mut ChaCha8Rng, degs: &[usize]) -> Vec<DensePoly> {
    let mut out: Vec<DensePoly> = Vec::new();
    for &deg in degs {
        loop {
            let q = random_monic(ctx, rng, deg);
            if !q.coeff(0).is_zero()
                && is_squarefree(ctx, &q)
                && out.iter().all(|o| coprime(ctx, o, &q))
            {
                out.push(q);
                break;
            }
        }
    }
    out
}

fn random_squarefree(ctx: &FieldCtx, rng: &mut ChaCha8Rng, deg: usize) -> DensePoly {
    random_parts(ctx, rng, &[deg]).pop().unwrap()
}

fn product_of_powers(ctx: &FieldCtx, parts: &[DensePoly], mults: &[usize]) -> DensePoly {
    parts.iter().zip(mults).fold(DensePoly::one(), |acc, (q, &m)| {
        poly::mul(ctx, &acc, &poly::pow_expand(ctx, q, m))
    })
}

fn random_init(ctx: &FieldCtx, rng: &mut ChaCha8Rng, d: usize) -> Vec<Fp> {
    (0..d).map(|_| ctx.random(rng)).collect()
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut cases, mut factored_runs, mut mismatches) = (0, 0, 0);
    for p in SMALL_PRIMES {
        let ctx = FieldCtx::new(p).unwrap();
        for k in 0..500 {
            let d = rng.random_range(1..=6usize);
            let rec = if k % 2 == 0 {
                let coeffs = random_init(&ctx, &mut rng, d);
                Recurrence::new(&ctx, coeffs, random_init(&ctx, &mut rng, d)).unwrap()
            } else {
                // repeated factors: Q_1^{m_1} Q_2^{m_2} with total degree d
                let f1 = rng.random_range(1..=d);
                let m1 = rng.random_range(1..=d / f1);
                let rest = d - f1 * m1;
                let (degs, mults) = if rest == 0 {
                    (vec![f1], vec![m1])
                } else {
                    (vec![f1, rest], vec![m1, 1])
                };
                let parts = random_parts(&ctx, &mut rng, &degs);
                let charpoly = product_of_powers(&ctx, &parts, &mults);
                Recurrence::from_charpoly(&ctx, &charpoly, random_init(&ctx, &mut rng, d)).unwrap()
            };
            let index = BigIndex::from(rng.random_range(0..=5000u64));
            let naive = nth_term_naive(&rec, &index).unwrap();
            let fid = nth_term_fiduccia(&rec, &index).unwrap();
            cases += 1;
            let mut ok = naive == fid;
            if rec.factored_path_check(&index).is_ok() {
                factored_runs += 1;
                ok &= nth_term_factored(&rec, &index, &mut rng) == Ok(naive);
            }
            mismatches += usize::from(!ok);
        }
    }
    verdict(
        mismatches == 0,
        format!("{cases} recurrences, factored ran on {factored_runs}, {mismatches} mismatches"),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let primes = [65537, 2013265921, MERSENNE61];
    let (mut mismatches, mut max_d) = (0, 0);
    for k in 0..50 {
        let ctx = FieldCtx::new(primes[k % 3]).unwrap();
        let s = rng.random_range(1..=4usize);
        let degs: Vec<usize> = (0..s).map(|_| rng.random_range(1..=6)).collect();
        let mults: Vec<usize> = (0..s).map(|_| rng.random_range(1..=8)).collect();
        let parts = random_parts(&ctx, &mut rng, &degs);
        let charpoly = product_of_powers(&ctx, &parts, &mults);
        let d = charpoly.len() - 1;
        max_d = max_d.max(d);
        let rec = Recurrence::from_charpoly(&ctx, &charpoly, random_init(&ctx, &mut rng, d)).unwrap();
        let index = BigIndex::from(rng.random_range(2 * d as u64..1 << 63));
        let fid = nth_term_fiduccia(&rec, &index).unwrap();
        if nth_term_factored(&rec, &index, &mut rng) != Ok(fid) {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0 && max_d <= 128,
        format!("50 cases, d up to {max_d}, {mismatches} mismatches"),
    )
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let mut detail = String::new();
    let mut failures = 0;
    for (f, m) in [(1, 8), (2, 4), (3, 5), (2, 256), (8, 64)] {
        let q = random_squarefree(&ctx, &mut rng, f);
        let ring = BivarRing::new(&ctx, &q, m).unwrap();
        let mut shape_failures = 0;
        for _ in 0..200 {
            let c = random_poly(&ctx, &mut rng, ring.n());
            let back = ring
                .untangle(&c)
                .and_then(|el| ring.tangle(&el, &mut rng, DEFAULT_MAX_RETRIES));
            shape_failures += usize::from(back.as_ref() != Ok(&c));
        }
        failures += shape_failures;
        let _ = write!(detail, "({f},{m}):{shape_failures} ");
    }
    verdict(failures == 0, format!("200 per shape, failures {}", detail.trim_end()))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let (mut untangle_bad, mut mul_bad) = (0, 0);
    for _ in 0..100 {
        let f = rng.random_range(1..=6usize);
        let m = rng.random_range(1..=32 / f);
        let q = random_squarefree(&ctx, &mut rng, f);
        let ring = BivarRing::new(&ctx, &q, m).unwrap();
        let n = ring.n();

        let mu = ring.random_form(&mut rng);
        let pi = ring.untangle_matrix().unwrap();
        let want = pi.mul_vec_transposed(&ctx, &mu.values);
        untangle_bad += usize::from(ring.transposed_untangle(&mu).unwrap() != want);

        // columns of multiplication by delta in the flattened basis
        let delta = ring.random_element(&mut rng);
        let columns: Vec<Vec<Fp>> = (0..n)
            .map(|j| {
                let mut e = vec![Fp::ZERO; n];
                e[j] = Fp::ONE;
                let basis = ring.element_from_flat(&e).unwrap();
                ring.bv_mul(&delta, &basis).unwrap().flatten(f)
            })
            .collect();
        let mul_matrix = Matrix::from_columns(n, &columns);
        let lambda = ring.random_form(&mut rng);
        let want = mul_matrix.mul_vec_transposed(&ctx, &lambda.values);
        let got: LinearForm = ring.transposed_bv_mul(&lambda, &delta).unwrap();
        mul_bad += usize::from(got.values != want);
    }
    verdict(
        untangle_bad == 0 && mul_bad == 0,
        format!("100 inputs each, n <= 32: untangle {untangle_bad} bad, multiplication {mul_bad} bad"),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let xm1 = DensePoly::from_i64s(&ctx, &[-1, 1]);
    let bad = (0..100)
        .filter(|_| {
            let m = rng.random_range(1..=64);
            let index = BigIndex::from(rng.random_range(0..1u64 << 40));
            let modulus = poly::pow_expand(&ctx, &xm1, m);
            binomial_remainder(&ctx, &index, m).unwrap() != poly::powmod_x(&ctx, &index, &modulus).unwrap()
        })
        .count();
    verdict(bad == 0, format!("100 pairs, {bad} mismatches"))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let bad = (0..100)
        .filter(|_| {
            let f = rng.random_range(1..=8);
            let m = rng.random_range(1..=32);
            let q = random_squarefree(&ctx, &mut rng, f);
            let ring = BivarRing::new(&ctx, &q, m).unwrap();
            let index = BigIndex::from(rng.random_range(0..=1u64 << 20));
            let want = ring
                .untangle(&poly::powmod_x(&ctx, &index, ring.q_power()).unwrap())
                .unwrap();
            delta_for_factor(&ring, &index).unwrap() != want
        })
        .count();
    verdict(bad == 0, format!("100 shapes, {bad} mismatches"))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let ctx = FieldCtx::with_counters(MERSENNE61).unwrap();
    let q = random_squarefree(&ctx, &mut rng, 2);
    let charpoly = poly::pow_expand(&ctx, &q, 256);
    let rec = Recurrence::from_charpoly(&ctx, &charpoly, random_init(&ctx, &mut rng, 512)).unwrap();
    let mut measure = |bits: u32| {
        let index = BigIndex::pow2(bits);
        ctx.reset_counters();
        let fid = nth_term_fiduccia(&rec, &index).unwrap();
        let fid_mults = ctx.counts().mults;
        ctx.reset_counters();
        let fac = nth_term_factored(&rec, &index, &mut rng).unwrap();
        let fac_mults = ctx.counts().mults;
        (fid_mults, fac_mults, fid == fac)
    };
    let (fid31, fac31, agree31) = measure(31);
    let (fid62, fac62, agree62) = measure(62);
    let ratio = fac62 as f64 / fid62 as f64;
    let fid_scale = fid62 as f64 / fid31 as f64;
    let fac_scale = fac62 as f64 / fac31 as f64;
    verdict(
        agree31 && agree62 && ratio <= 0.5 && fid_scale >= 1.8 && fac_scale <= 1.2,
        format!(
            "D=2^62 mults fiduccia {fid62} factored {fac62} (ratio {ratio:.3} <= 0.5); \
             2^31->2^62 scaling fiduccia x{fid_scale:.2} (>= 1.8) factored x{fac_scale:.2} (<= 1.2)"
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let shapes = [(1, 16), (2, 8), (4, 4), (2, 64), (4, 32), (8, 32), (2, 128), (16, 16)];
    let (mut calls, mut first_try, mut wrong, mut fallbacks) = (0usize, 0usize, 0usize, 0usize);
    for &(f, m) in shapes.iter().cycle().take(1000) {
        let q = random_squarefree(&ctx, &mut rng, f);
        let ring = BivarRing::new(&ctx, &q, m).unwrap();
        let c = random_poly(&ctx, &mut rng, ring.n());
        let delta = ring.untangle(&c).unwrap();
        calls += 1;
        match ring.tangle_with_stats(&delta, &mut rng, DEFAULT_MAX_RETRIES) {
            Ok((back, stats)) => {
                first_try += usize::from(stats.attempts == 1 && !stats.used_fallback);
                fallbacks += usize::from(stats.used_fallback);
                wrong += usize::from(back != c);
            }
            Err(_) => wrong += 1,
        }
    }
    let rate = first_try as f64 / calls as f64;
    verdict(
        rate >= 0.99 && wrong == 0 && fallbacks == 0,
        format!(
            "{calls} calls, n <= 256: first-projection success {:.1}% (>= 99%), {wrong} incorrect, {fallbacks} fallbacks",
            100.0 * rate
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let ctx = FieldCtx::new(65537).unwrap();
    let mut yun_bad = 0;
    for _ in 0..200 {
        let s = rng.random_range(1..=4usize);
        let degs: Vec<usize> = (0..s).map(|_| rng.random_range(1..=5)).collect();
        let mults: Vec<usize> = (0..s).map(|_| rng.random_range(1..=6)).collect();
        let parts = random_parts(&ctx, &mut rng, &degs);
        let input = product_of_powers(&ctx, &parts, &mults);
        let ok = yun_squarefree(&ctx, &input).is_ok_and(|sf| {
            sf.expand(&ctx) == input
                && sf.parts.windows(2).all(|w| w[0].multiplicity < w[1].multiplicity)
                && sf.parts.iter().all(|pt| pt.q.is_monic() && is_squarefree(&ctx, &pt.q))
        });
        yun_bad += usize::from(!ok);
    }
    let mut crt_bad = 0;
    for _ in 0..200 {
        let s = rng.random_range(1..=4usize);
        let degs: Vec<usize> = (0..s).map(|_| rng.random_range(1..=4)).collect();
        let parts = random_parts(&ctx, &mut rng, &degs);
        let moduli: Vec<DensePoly> = parts
            .iter()
            .map(|q| poly::pow_expand(&ctx, q, rng.random_range(1..=3)))
            .collect();
        let total: usize = moduli.iter().map(|m| m.len() - 1).sum();
        let r = random_poly(&ctx, &mut rng, total);
        let residues: Vec<DensePoly> = moduli.iter().map(|m| poly::rem(&ctx, &r, m).unwrap()).collect();
        crt_bad += usize::from(crt_combine(&ctx, &residues, &moduli) != Ok(r));
    }
    verdict(
        yun_bad == 0 && crt_bad == 0,
        format!("200 each: Yun {yun_bad} bad, CRT {crt_bad} bad"),
    )
}

fn linrec(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_linrec"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn criterion_10() -> Verdict {
    let mut notes = Vec::new();
    let fib = linrec(&["nth", "--modulus", "101", "--coeffs", "1,1", "--init", "0,1", "--index", "10"]);
    let ex1 = fib == (0, "55\n".to_owned());
    let init = linrec(&["nth", "--modulus", "101", "--coeffs", "2", "--init", "1", "--index", "0"]);
    let ex2 = init == (0, "1\n".to_owned());
    // (x^2 + x + 3)^3 over 2^61 - 1, so the factored path has work to do
    let ctx = FieldCtx::new(MERSENNE61).unwrap();
    let charpoly = poly::pow_expand(&ctx, &DensePoly::from_u64s(&ctx, &[3, 1, 1]), 3);
    let coeffs = (0..6)
        .map(|j| ctx.neg(charpoly.coeff(j)).to_string())
        .collect::<Vec<_>>()
        .join(",");
    let modulus = MERSENNE61.to_string();
    let job = [
        "nth", "--modulus", &modulus, "--coeffs", &coeffs,
        "--init", "1,2,3,4,5,6", "--index", "123456789012345678901234567890",
    ];
    let with = |algo: &str| {
        let mut args = job.to_vec();
        args.extend(["--algo", algo]);
        linrec(&args)
    };
    let (fac, fid) = (with("factored"), with("fiduccia"));
    let ex3 = fac.0 == 0 && fac == fid && !fac.1.trim().is_empty();
    if !ex1 {
        notes.push(format!("fibonacci gave {fib:?}"));
    }
    if !ex2 {
        notes.push(format!("initial value gave {init:?}"));
    }
    if !ex3 {
        notes.push(format!("factored {fac:?} vs fiduccia {fid:?}"));
    }

    let dir = tempfile::tempdir().expect("temp dir");
    let csv_path = dir.path().join("bench.csv");
    let csv_arg = csv_path.to_str().unwrap();
    let (code, _) = linrec(&[
        "bench", "--prime", "2305843009213693951", "--f", "2", "--m", "256", "--index-bits", "62",
        "--algos", "fiduccia,factored", "--csv", csv_arg,
    ]);
    let text = std::fs::read_to_string(&csv_path).unwrap_or_default();
    let lines: Vec<&str> = text.split('\n').collect();
    let header_ok = lines.first() == Some(&"algo,p,d,f,m,index_bits,field_mults,field_invs,wall_ns,result");
    let rows: Vec<Vec<&str>> = lines[1..].iter().filter(|l| !l.is_empty()).map(|l| l.split(',').collect()).collect();
    let bench_ok = code == 0
        && header_ok
        && !text.contains('\r')
        && rows.len() == 2
        && rows[0][0] == "fiduccia"
        && rows[1][0] == "factored"
        && rows[0][9] == rows[1][9];
    if !bench_ok {
        notes.push(format!("bench exit {code}, csv {text:?}"));
    }
    let detail = if notes.is_empty() {
        format!(
            "3 nth examples exact; bench rows fiduccia/factored share result {}",
            rows[0][9]
        )
    } else {
        notes.join("; ")
    };
    verdict(ex1 && ex2 && ex3 && bench_ok, detail)
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "oracle equivalence (small)", Duration::from_secs(60), criterion_1),
        (2, "cross-algorithm (large)", Duration::from_secs(60), criterion_2),
        (3, "tangle round trip", Duration::from_secs(120), criterion_3),
        (4, "transpose oracle", Duration::from_secs(30), criterion_4),
        (5, "binomial remainder identity", Duration::from_secs(30), criterion_5),
        (6, "delta identity", Duration::from_secs(60), criterion_6),
        (7, "complexity regression", Duration::from_secs(60), criterion_7),
        (8, "Las Vegas health", Duration::from_secs(120), criterion_8),
        (9, "factorization and CRT", Duration::from_secs(30), criterion_9),
        (10, "CLI end to end", Duration::from_secs(120), criterion_10),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let ok = v.passed && elapsed <= budget;
        failed += usize::from(!ok);
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}

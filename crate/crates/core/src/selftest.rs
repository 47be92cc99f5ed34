//! Property suites at reduced sizes, for a quick release gate.
//!
//! Each suite draws its instances from a ChaCha stream keyed by the run seed
//! and the suite index, so two runs with one seed print the same report.
//! Wherever possible the reference side avoids [`FieldCtx::mul`], so a
//! faulty multiplier cannot agree with itself.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bivar::{BivarRing, DEFAULT_MAX_RETRIES};
use crate::factor;
use crate::field::{BigIndex, FieldCtx, Fp};
use crate::poly::{self, DensePoly};
use crate::seqterm::{self, Recurrence};

const PRIMES: [u64; 3] = [65537, 2013265921, (1 << 61) - 1];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// The suite aborted with a panic before finishing.
    pub panicked: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && !self.panicked
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.panicked {
            write!(f, "{:<22} FAILED panicked", self.name)
        } else if self.passed() {
            write!(f, "{:<22} ok     {} cases", self.name, self.cases)
        } else {
            write!(
                f,
                "{:<22} FAILED {}/{} cases",
                self.name, self.failures, self.cases
            )
        }
    }
}

type Suite = fn(&mut ChaCha8Rng) -> Vec<bool>;

const SUITES: [(&str, Suite); 8] = [
    ("field-arithmetic", field_arithmetic),
    ("poly-multiplication", poly_multiplication),
    ("poly-division", poly_division),
    ("squarefree-crt", squarefree_crt),
    ("binomial-remainder", binomial_remainder),
    ("untangle-transpose", untangle_transpose),
    ("tangle-round-trip", tangle_round_trip),
    ("term-agreement", term_agreement),
];

pub fn run(seed: u64) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .enumerate()
        .map(|(k, &(name, suite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64 + 1) << 56));
            match panic::catch_unwind(AssertUnwindSafe(|| suite(&mut rng))) {
                Ok(outcomes) => SuiteReport {
                    name,
                    cases: outcomes.len(),
                    failures: outcomes.iter().filter(|ok| !**ok).count(),
                    panicked: false,
                },
                Err(_) => SuiteReport {
                    name,
                    cases: 0,
                    failures: 0,
                    panicked: true,
                },
            }
        })
        .collect()
}

fn mulmod_ref(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn random_poly(ctx: &FieldCtx, rng: &mut ChaCha8Rng, len: usize) -> DensePoly {
    DensePoly::new((0..len).map(|_| ctx.random(rng)).collect())
}

fn random_monic(ctx: &FieldCtx, rng: &mut ChaCha8Rng, deg: usize) -> DensePoly {
    let mut c: Vec<Fp> = (0..deg).map(|_| ctx.random(rng)).collect();
    c.push(Fp::ONE);
    DensePoly::new(c)
}

fn field_arithmetic(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut out = Vec::new();
    for p in PRIMES {
        let f = FieldCtx::new(p).unwrap();
        for _ in 0..200 {
            let (a, b) = (f.random(rng), f.random(rng));
            let prod_ok = f.mul(a, b).value() == mulmod_ref(p, a.value(), b.value());
            let inv_ok = b.is_zero()
                || f.inv(b).is_ok_and(|i| mulmod_ref(p, i.value(), b.value()) == 1);
            let sum_ok = f.add(a, b).value() == ((a.value() as u128 + b.value() as u128) % p as u128) as u64;
            out.push(prod_ok && inv_ok && sum_ok);
        }
    }
    out
}

fn schoolbook_ref(p: u64, a: &[Fp], b: &[Fp]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x.value() as u128 * y.value() as u128) % p as u128;
        }
    }
    let mut v: Vec<u64> = acc.into_iter().map(|c| c as u64).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_multiplication(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut out = Vec::new();
    for p in PRIMES {
        let f = FieldCtx::new(p).unwrap();
        for _ in 0..30 {
            let (la, lb) = (rng.random_range(0..150), rng.random_range(0..150));
            let a = random_poly(&f, rng, la);
            let b = random_poly(&f, rng, lb);
            let got: Vec<u64> = poly::mul(&f, &a, &b).coeffs().iter().map(|c| c.value()).collect();
            out.push(got == schoolbook_ref(p, a.coeffs(), b.coeffs()));
        }
    }
    out
}

fn poly_division(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut out = Vec::new();
    for p in PRIMES {
        let f = FieldCtx::new(p).unwrap();
        for _ in 0..30 {
            let b_deg = rng.random_range(1..80);
            let a_len = rng.random_range(0..200);
            let a = random_poly(&f, rng, a_len);
            let b = random_monic(&f, rng, b_deg);
            let ok = poly::divrem(&f, &a, &b).is_ok_and(|(q, r)| {
                // a = q b + r, checked against the reference product
                let qb = schoolbook_ref(p, q.coeffs(), b.coeffs());
                let len = qb.len().max(r.len());
                let sum: Vec<u64> = (0..len)
                    .map(|i| {
                        let x = qb.get(i).copied().unwrap_or(0) as u128;
                        ((x + r.coeff(i).value() as u128) % p as u128) as u64
                    })
                    .collect();
                let mut want: Vec<u64> = a.coeffs().iter().map(|c| c.value()).collect();
                want.resize(len, 0);
                r.len() < b.len() && sum == want
            });
            out.push(ok);
        }
    }
    out
}

fn squarefree_crt(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let f = FieldCtx::new(65537).unwrap();
    let mut out = Vec::new();
    for _ in 0..40 {
        let s = rng.random_range(1..=3);
        let mut qs: Vec<DensePoly> = Vec::new();
        while qs.len() < s {
            let deg = rng.random_range(1..=4);
            let q = random_monic(&f, rng, deg);
            let sqfree = poly::gcd(&f, &q, &q.derivative(&f)).is_ok_and(|g| g.is_one());
            let coprime = qs.iter().all(|o| poly::gcd(&f, o, &q).is_ok_and(|g| g.is_one()));
            if sqfree && coprime {
                qs.push(q);
            }
        }
        let mults: Vec<usize> = (0..s).map(|i| i + 1 + rng.random_range(0..2) * s).collect();
        let powers: Vec<DensePoly> = qs
            .iter()
            .zip(&mults)
            .map(|(q, &m)| poly::pow_expand(&f, q, m))
            .collect();
        let input = powers.iter().fold(DensePoly::one(), |acc, q| poly::mul(&f, &acc, q));
        let yun_ok = factor::yun_squarefree(&f, &input).is_ok_and(|sf| sf.expand(&f) == input);

        let total: usize = powers.iter().map(|q| q.len() - 1).sum();
        let r = random_poly(&f, rng, total);
        let residues: Vec<DensePoly> = powers.iter().map(|m| poly::rem(&f, &r, m).unwrap()).collect();
        let crt_ok = factor::crt_combine(&f, &residues, &powers).is_ok_and(|c| c == r);
        out.push(yun_ok && crt_ok);
    }
    out
}

fn binomial_remainder(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let f = FieldCtx::new((1 << 61) - 1).unwrap();
    let xm1 = DensePoly::from_i64s(&f, &[-1, 1]);
    (0..30)
        .map(|_| {
            let m = rng.random_range(1..=40);
            let d = BigIndex::random_bits(rng, 40);
            let modulus = poly::pow_expand(&f, &xm1, m);
            seqterm::binomial_remainder(&f, &d, m).ok() == poly::powmod_x(&f, &d, &modulus).ok()
        })
        .collect()
}

fn untangle_transpose(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let f = FieldCtx::new(65537).unwrap();
    (0..30)
        .map(|_| {
            let fd = rng.random_range(1..=4);
            let m = rng.random_range(1..=6);
            let q = random_monic(&f, rng, fd);
            let Ok(ring) = BivarRing::new(&f, &q, m) else {
                return false;
            };
            let mu = ring.random_form(rng);
            let Ok(matrix) = ring.untangle_matrix() else {
                return false;
            };
            ring.transposed_untangle(&mu)
                .is_ok_and(|got| got == matrix.mul_vec_transposed(&f, &mu.values))
        })
        .collect()
}

fn tangle_round_trip(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let f = FieldCtx::new((1 << 61) - 1).unwrap();
    let shapes = [(1, 8), (2, 4), (3, 5), (2, 32), (4, 16)];
    let mut out = Vec::new();
    for (fd, m) in shapes {
        let q = random_monic(&f, rng, fd);
        let ring = BivarRing::new(&f, &q, m).unwrap();
        for _ in 0..6 {
            let c = random_poly(&f, rng, ring.n());
            let ok = ring
                .untangle(&c)
                .and_then(|el| ring.tangle(&el, rng, DEFAULT_MAX_RETRIES))
                .is_ok_and(|back| back == c);
            out.push(ok);
        }
    }
    out
}

// The iteration oracle below shares the multiplier with the fast paths, so
// this suite checks agreement; absolute values come from the suites above.
fn term_agreement(rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut out = Vec::new();
    for p in PRIMES {
        let f = FieldCtx::new(p).unwrap();
        for _ in 0..15 {
            let d = rng.random_range(1..=6);
            let coeffs: Vec<Fp> = (0..d).map(|_| f.random_nonzero(rng)).collect();
            let init: Vec<Fp> = (0..d).map(|_| f.random(rng)).collect();
            let rec = Recurrence::new(&f, coeffs, init).unwrap();
            let index = BigIndex::from(rng.random_range(2 * d as u64..3000));
            let naive = seqterm::nth_term_naive(&rec, &index).ok();
            let fid = seqterm::nth_term_fiduccia(&rec, &index).ok();
            let fac = seqterm::nth_term_factored(&rec, &index, rng).ok();
            out.push(naive.is_some() && naive == fid && fid == fac);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(run(7), run(7));
    }

    #[cfg(not(feature = "fault-injection"))]
    #[test]
    fn clean_build_passes() {
        let reports = run(1);
        assert!(reports.iter().all(SuiteReport::passed), "{reports:?}");
    }

    #[cfg(feature = "fault-injection")]
    #[test]
    fn faulty_multiplier_is_caught() {
        assert!(!run(1).iter().all(SuiteReport::passed));
    }
}

//! Arithmetic in `Z/p` for word-sized primes.
//!
//! A [`FieldCtx`] owns the modulus and, optionally, tallies of the field
//! operations performed through it. Those tallies are the cost metric used by
//! the benchmark harness, so every polynomial kernel in this crate routes its
//! scalar arithmetic through the context.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MODULUS_BOUND: u64 = 1 << 62;

/// A canonical residue in `[0, p)`.
///
/// Elements do not carry their modulus; they are only meaningful together
/// with the [`FieldCtx`] that produced them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Snapshot of the operation tallies of a context.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub mults: u64,
    pub adds: u64,
    pub invs: u64,
}

#[derive(Debug, Default)]
struct Counters {
    mults: AtomicU64,
    adds: AtomicU64,
    invs: AtomicU64,
}

/// Prime field context.
///
/// Products are reduced with two Montgomery reductions against `R = 2^64`,
/// which keeps elements in ordinary (non-Montgomery) form while avoiding a
/// 128-bit division in the hot path.
///
/// With counting disabled the context is read-only and can be shared freely.
/// With counting enabled the tallies are exact under any sharing, but the
/// benchmark harness assumes one run per context at a time.
#[derive(Debug)]
pub struct FieldCtx {
    p: u64,
    // -p^{-1} mod 2^64
    p_neg_inv: u64,
    // 2^128 mod p
    r2: u64,
    // largest k with 2^k | p - 1, and a generator of the 2^k-torsion
    two_adicity: u32,
    two_adic_root: u64,
    counting: bool,
    counters: Counters,
}

impl Clone for FieldCtx {
    fn clone(&self) -> Self {
        FieldCtx {
            counters: Counters::default(),
            ..*self
        }
    }
}

impl FieldCtx {
    /// Builds a context for the prime `p`, with counters disabled.
    pub fn new(p: u64) -> Result<Self> {
        Self::build(p, false)
    }

    /// Builds a context whose field operations are tallied.
    pub fn with_counters(p: u64) -> Result<Self> {
        Self::build(p, true)
    }

    fn build(p: u64, counting: bool) -> Result<Self> {
        if p <= 2 || p >= MODULUS_BOUND {
            return Err(Error::OutOfRange(p as u128));
        }
        if !is_prime_u64(p) {
            return Err(Error::NonPrime(p));
        }
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r2 = ((u128::MAX % p as u128 + 1) % p as u128) as u64;
        let two_adicity = (p - 1).trailing_zeros();
        let odd = (p - 1) >> two_adicity;
        let mut ctx = FieldCtx {
            p,
            p_neg_inv: inv.wrapping_neg(),
            r2,
            two_adicity,
            two_adic_root: 1,
            counting: false,
            counters: Counters::default(),
        };
        // Any quadratic non-residue raised to the odd part of p - 1 generates
        // the Sylow 2-subgroup.
        let half = (p - 1) / 2;
        let mut g = 2u64;
        while ctx.pow_raw(g, half) == 1 {
            g += 1;
        }
        ctx.two_adic_root = ctx.pow_raw(g, odd);
        ctx.counting = counting;
        Ok(ctx)
    }

    /// Parses a decimal modulus; values that do not fit 64 bits are out of range.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let big: BigUint = s
            .trim()
            .parse()
            .map_err(|_| Error::OutOfRange(u128::MAX))?;
        match big.to_u64() {
            Some(p) => Self::new(p),
            None => Err(Error::OutOfRange(big.to_u128().unwrap_or(u128::MAX))),
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn is_counting(&self) -> bool {
        self.counting
    }

    pub fn counts(&self) -> OpCounts {
        OpCounts {
            mults: self.counters.mults.load(Ordering::Relaxed),
            adds: self.counters.adds.load(Ordering::Relaxed),
            invs: self.counters.invs.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counters(&self) {
        self.counters.mults.store(0, Ordering::Relaxed);
        self.counters.adds.store(0, Ordering::Relaxed);
        self.counters.invs.store(0, Ordering::Relaxed);
    }

    /// Largest `k` such that `2^k` divides `p - 1`.
    pub fn two_adicity(&self) -> u32 {
        self.two_adicity
    }

    /// A primitive `2^k`-th root of unity, if `k <= two_adicity()`.
    pub fn root_of_unity(&self, k: u32) -> Option<Fp> {
        if k > self.two_adicity {
            return None;
        }
        let mut w = self.two_adic_root;
        for _ in k..self.two_adicity {
            w = self.mul_raw(w, w);
        }
        Some(Fp(w))
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    pub fn elem_signed(&self, v: i64) -> Fp {
        let r = v.rem_euclid(self.p as i64);
        Fp(r as u64)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp(rng.random_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp(rng.random_range(1..self.p))
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let t = self.redc(a as u128 * b as u128);
        self.redc(t as u128 * self.r2 as u128)
    }

    fn pow_raw(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    fn tally(&self, counter: &AtomicU64, k: u64) {
        if self.counting {
            counter.fetch_add(k, Ordering::Relaxed);
        }
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        self.tally(&self.counters.adds, 1);
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        self.tally(&self.counters.adds, 1);
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        self.tally(&self.counters.mults, 1);
        let r = self.mul_raw(a.0, b.0);
        #[cfg(feature = "fault-injection")]
        let r = if a.0 > 1 && b.0 > 1 && (a.0 ^ b.0) & 0x1ff == 0x0a5 {
            (r + 1) % self.p
        } else {
            r
        };
        Fp(r)
    }

    /// `acc + a * b`
    #[inline]
    pub fn mul_add(&self, acc: Fp, a: Fp, b: Fp) -> Fp {
        let prod = self.mul(a, b);
        self.add(acc, prod)
    }

    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        self.tally(&self.counters.invs, 1);
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fp(s0.rem_euclid(self.p as i128) as u64))
    }

    pub fn div(&self, a: Fp, b: Fp) -> Result<Fp> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, base: Fp, mut e: u64) -> Fp {
        let mut acc = Fp::ONE;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(b, b);
            }
        }
        acc
    }

    /// `D mod p`.
    pub fn from_big(&self, d: &BigIndex) -> Fp {
        Fp((&d.0 % self.p).to_u64().expect("residue fits u64"))
    }
}

/// Deterministic Miller–Rabin; the first twelve primes are a complete witness
/// set for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Nonnegative arbitrary-precision index.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigIndex(BigUint);

impl BigIndex {
    pub fn zero() -> Self {
        BigIndex(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `2^k`
    pub fn pow2(k: u32) -> Self {
        BigIndex(BigUint::one() << k)
    }

    /// Number of significant bits; zero for `D = 0`.
    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn bit(&self, i: u64) -> bool {
        self.0.bit(i)
    }

    /// Bits from the most significant one down to bit 0.
    pub fn bits_msb_first(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bits()).rev().map(move |i| self.0.bit(i))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn checked_sub_small(&self, k: u64) -> Option<BigIndex> {
        let k = BigUint::from(k);
        (self.0 >= k).then(|| BigIndex(&self.0 - k))
    }

    pub fn add_small(&self, k: u64) -> BigIndex {
        BigIndex(&self.0 + k)
    }

    pub fn lt_small(&self, k: u64) -> bool {
        self.0 < BigUint::from(k)
    }

    /// Uniform index in `[0, 2^bits)`.
    pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> Self {
        let words = bits.div_ceil(32) as usize;
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        let excess = words as u32 * 32 - bits;
        if let Some(top) = digits.last_mut() {
            if excess > 0 {
                *top >>= excess;
            }
        }
        BigIndex(BigUint::new(digits))
    }
}

impl From<u64> for BigIndex {
    fn from(v: u64) -> Self {
        BigIndex(BigUint::from(v))
    }
}

impl FromStr for BigIndex {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BigUint::from_str(s.trim()).map(BigIndex)
    }
}

impl fmt::Display for BigIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

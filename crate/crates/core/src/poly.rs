//! Dense univariate polynomials over a prime field.

use crate::error::{Error, Result};
use crate::field::{BigIndex, FieldCtx, Fp};

/// Below this operand length products are computed by schoolbook.
pub const KARATSUBA_THRESHOLD: usize = 32;
/// Minimum operand length for the number-theoretic transform path.
pub const NTT_THRESHOLD: usize = 64;
/// Modulus degree from which remainders use a precomputed reversed inverse.
const NEWTON_REDUCTION_THRESHOLD: usize = 48;

/// Polynomial with coefficients in ascending degree; the zero polynomial is
/// the empty vector and the leading coefficient of anything else is nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DensePoly {
    coeffs: Vec<Fp>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<Fp>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Fp::ONE)
    }

    pub fn constant(c: Fp) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Fp::ZERO; k + 1];
        coeffs[k] = Fp::ONE;
        DensePoly { coeffs }
    }

    /// `x - c`
    pub fn linear(ctx: &FieldCtx, c: Fp) -> Self {
        Self::new(vec![ctx.neg(c), Fp::ONE])
    }

    pub fn from_u64s(ctx: &FieldCtx, vals: &[u64]) -> Self {
        Self::new(vals.iter().map(|&v| ctx.elem(v)).collect())
    }

    pub fn from_i64s(ctx: &FieldCtx, vals: &[i64]) -> Self {
        Self::new(vals.iter().map(|&v| ctx.elem_signed(v)).collect())
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fp> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Fp {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of stored coefficients, `degree + 1`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fp::ONE]
    }

    pub fn leading(&self) -> Option<Fp> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Fp::ONE)
    }

    pub fn eval(&self, ctx: &FieldCtx, t: Fp) -> Fp {
        self.coeffs
            .iter()
            .rev()
            .fold(Fp::ZERO, |acc, &c| ctx.add(ctx.mul(acc, t), c))
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.mul(c, ctx.elem(i as u64)))
                .collect(),
        )
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fp) -> Self {
        Self::new(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        if lead == Fp::ONE {
            return Ok(self.clone());
        }
        Ok(self.scale(ctx, ctx.inv(lead)?))
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Self) -> Self {
        Self::new(add_slices(ctx, &self.coeffs, &other.coeffs))
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self::new(
            (0..n)
                .map(|i| ctx.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Self) -> Self {
        mul(ctx, self, other)
    }

    /// `self * x^k`
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Fp::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        DensePoly { coeffs }
    }

    /// `self mod x^k`
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs[..k.min(self.len())].to_vec())
    }
}

pub(crate) fn add_slices(ctx: &FieldCtx, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = ctx.add(*o, s);
    }
    out
}

fn add_into(ctx: &FieldCtx, acc: &mut [Fp], src: &[Fp]) {
    for (o, &s) in acc.iter_mut().zip(src) {
        *o = ctx.add(*o, s);
    }
}

fn sub_into(ctx: &FieldCtx, acc: &mut [Fp], src: &[Fp]) {
    for (o, &s) in acc.iter_mut().zip(src) {
        *o = ctx.sub(*o, s);
    }
}

/// Product of two polynomials.
pub fn mul(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> DensePoly {
    DensePoly::new(mul_slices(ctx, &a.coeffs, &b.coeffs))
}

/// Product of two coefficient slices; the result has length
/// `a.len() + b.len() - 1` (or zero if either is empty) and is not normalized.
pub fn mul_slices(ctx: &FieldCtx, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.len() < KARATSUBA_THRESHOLD {
        return schoolbook(ctx, short, long);
    }
    if short.len() >= NTT_THRESHOLD && ntt_log_size(ctx, a.len() + b.len() - 1).is_some() {
        return ntt_mul(ctx, a, b);
    }
    if long.len() > 2 * short.len() {
        // cut the long operand into pieces of the short one's length
        let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
        for (i, chunk) in long.chunks(short.len()).enumerate() {
            let prod = mul_slices(ctx, short, chunk);
            add_into(ctx, &mut out[i * short.len()..], &prod);
        }
        return out;
    }
    karatsuba(ctx, a, b)
}

fn schoolbook(ctx: &FieldCtx, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (o, &bj) in out[i..].iter_mut().zip(b) {
            *o = ctx.mul_add(*o, ai, bj);
        }
    }
    out
}

fn karatsuba(ctx: &FieldCtx, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let half = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
    let z0 = mul_slices(ctx, a0, b0);
    let z2 = mul_slices(ctx, a1, b1);
    let mut z1 = mul_slices(ctx, &add_slices(ctx, a0, a1), &add_slices(ctx, b0, b1));
    sub_into(ctx, &mut z1, &z0);
    sub_into(ctx, &mut z1, &z2);
    add_into(ctx, &mut out, &z0);
    add_into(ctx, &mut out[half..], &z1);
    if !z2.is_empty() {
        add_into(ctx, &mut out[2 * half..], &z2);
    }
    out
}

fn ntt_log_size(ctx: &FieldCtx, len: usize) -> Option<u32> {
    let log = len.next_power_of_two().trailing_zeros();
    (log <= ctx.two_adicity()).then_some(log)
}

fn ntt(ctx: &FieldCtx, data: &mut [Fp], root: Fp) {
    let n = data.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let step = ctx.pow(root, (n / len) as u64);
        let mut twiddles = Vec::with_capacity(len / 2);
        let mut w = Fp::ONE;
        for _ in 0..len / 2 {
            twiddles.push(w);
            w = ctx.mul(w, step);
        }
        for block in data.chunks_mut(len) {
            let (lo, hi) = block.split_at_mut(len / 2);
            for ((u, v), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = ctx.mul(*v, w);
                *v = ctx.sub(*u, t);
                *u = ctx.add(*u, t);
            }
        }
        len <<= 1;
    }
}

fn ntt_mul(ctx: &FieldCtx, a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let out_len = a.len() + b.len() - 1;
    let log = ntt_log_size(ctx, out_len).expect("transform size supported");
    let size = 1usize << log;
    let root = ctx.root_of_unity(log).expect("root exists");
    let mut fa = a.to_vec();
    fa.resize(size, Fp::ZERO);
    let mut fb = b.to_vec();
    fb.resize(size, Fp::ZERO);
    ntt(ctx, &mut fa, root);
    ntt(ctx, &mut fb, root);
    for (x, &y) in fa.iter_mut().zip(&fb) {
        *x = ctx.mul(*x, y);
    }
    let inv_root = ctx.inv(root).expect("root is a unit");
    ntt(ctx, &mut fa, inv_root);
    let scale = ctx.inv(ctx.elem(size as u64)).expect("size is a unit");
    fa.truncate(out_len);
    for x in fa.iter_mut() {
        *x = ctx.mul(*x, scale);
    }
    fa
}

/// Quotient and remainder of `a` by `b`.
pub fn divrem(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> Result<(DensePoly, DensePoly)> {
    let lead = b.leading().ok_or(Error::DivisionByZero)?;
    if a.len() < b.len() {
        return Ok((DensePoly::zero(), a.clone()));
    }
    let lead_inv = if lead == Fp::ONE { Fp::ONE } else { ctx.inv(lead)? };
    let db = b.len() - 1;
    let mut rem = a.coeffs.clone();
    let mut quot = vec![Fp::ZERO; a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = rem[k + db];
        if top.is_zero() {
            continue;
        }
        let q = if lead == Fp::ONE { top } else { ctx.mul(top, lead_inv) };
        quot[k] = q;
        for (r, &bc) in rem[k..k + db].iter_mut().zip(&b.coeffs[..db]) {
            *r = ctx.sub(*r, ctx.mul(q, bc));
        }
        rem[k + db] = Fp::ZERO;
    }
    rem.truncate(db);
    Ok((DensePoly::new(quot), DensePoly::new(rem)))
}

pub fn rem(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
    divrem(ctx, a, b).map(|(_, r)| r)
}

/// Exact division; the caller guarantees `b | a`.
pub fn div_exact(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
    let (q, r) = divrem(ctx, a, b)?;
    debug_assert!(r.is_zero(), "inexact division");
    Ok(q)
}

/// Monic greatest common divisor.
pub fn gcd(ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    while !r1.is_zero() {
        let r = rem(ctx, &r0, &r1)?;
        r0 = std::mem::replace(&mut r1, r);
    }
    r0.monic(ctx)
}

/// Inverse of `a` modulo `m`.
pub fn invmod(ctx: &FieldCtx, a: &DensePoly, m: &DensePoly) -> Result<DensePoly> {
    if m.degree().is_none_or(|d| d == 0) {
        return Err(Error::DegreeViolation { degree: 0, bound: 1 });
    }
    let (mut r0, mut r1) = (m.clone(), rem(ctx, a, m)?);
    let (mut s0, mut s1) = (DensePoly::zero(), DensePoly::one());
    while !r1.is_zero() {
        let (q, r) = divrem(ctx, &r0, &r1)?;
        let s = s0.sub(ctx, &rem(ctx, &mul(ctx, &q, &s1), m)?);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 = gcd up to a unit, s0 * a = r0 (mod m)
    if r0.degree() != Some(0) {
        return Err(Error::NotCoprime);
    }
    Ok(s0.scale(ctx, ctx.inv(r0.coeffs[0])?))
}

/// `1 / f mod x^n`, requiring `f(0) != 0`.
pub fn series_inverse(ctx: &FieldCtx, f: &[Fp], n: usize) -> Result<Vec<Fp>> {
    let f0 = f.first().copied().unwrap_or(Fp::ZERO);
    let mut g = vec![ctx.inv(f0)?];
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        // g <- g (2 - f g) mod x^prec
        let fg = mul_slices(ctx, &f[..prec.min(f.len())], &g);
        let mut corr: Vec<Fp> = fg.iter().take(prec).map(|&c| ctx.neg(c)).collect();
        corr.resize(prec, Fp::ZERO);
        corr[0] = ctx.add(corr[0], ctx.elem(2));
        let mut next = mul_slices(ctx, &g, &corr);
        next.truncate(prec);
        g = next;
    }
    g.truncate(n);
    Ok(g)
}

/// Remainder computation against a fixed monic modulus.
///
/// For large moduli the quotient is obtained from a precomputed inverse of
/// the reversed modulus, costing two products per reduction.
#[derive(Clone, Debug)]
pub struct Reducer {
    modulus: DensePoly,
    rev_inv: Option<Vec<Fp>>,
}

impl Reducer {
    pub fn new(ctx: &FieldCtx, modulus: &DensePoly) -> Result<Self> {
        if !modulus.is_monic() {
            return Err(Error::NotMonic);
        }
        let d = modulus.len() - 1;
        let rev_inv = if d >= NEWTON_REDUCTION_THRESHOLD {
            let rev: Vec<Fp> = modulus.coeffs.iter().rev().copied().collect();
            Some(series_inverse(ctx, &rev, d)?)
        } else {
            None
        };
        Ok(Reducer {
            modulus: modulus.clone(),
            rev_inv,
        })
    }

    pub fn modulus(&self) -> &DensePoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, ctx: &FieldCtx, a: &DensePoly) -> DensePoly {
        let d = self.degree();
        if a.len() <= d {
            return a.clone();
        }
        match &self.rev_inv {
            Some(rev_inv) if a.len() < 2 * d => {
                let k = a.len() - d;
                let rev_a: Vec<Fp> = a.coeffs.iter().rev().take(k).copied().collect();
                let mut q_rev = mul_slices(ctx, &rev_a, &rev_inv[..k]);
                q_rev.truncate(k);
                q_rev.reverse();
                let qm = mul_slices(ctx, &q_rev, &self.modulus.coeffs[..d]);
                DensePoly::new(
                    (0..d)
                        .map(|i| ctx.sub(a.coeffs[i], qm.get(i).copied().unwrap_or(Fp::ZERO)))
                        .collect(),
                )
            }
            _ => rem(ctx, a, &self.modulus).expect("monic modulus"),
        }
    }

    pub fn mulmod(&self, ctx: &FieldCtx, a: &DensePoly, b: &DensePoly) -> DensePoly {
        self.reduce(ctx, &mul(ctx, a, b))
    }

    /// `x * a mod modulus` for `deg a < deg modulus`, in linear time.
    pub fn mul_x(&self, ctx: &FieldCtx, a: &DensePoly) -> DensePoly {
        let d = self.degree();
        let shifted = a.shift_up(1);
        if shifted.len() <= d {
            return shifted;
        }
        let top = shifted.coeffs[d];
        DensePoly::new(
            (0..d)
                .map(|i| ctx.sub(shifted.coeffs[i], ctx.mul(top, self.modulus.coeffs[i])))
                .collect(),
        )
    }
}

/// `x^D mod M` by left-to-right square-and-multiply, where each set bit costs
/// a multiplication by `x` rather than a full product.
pub fn powmod_x(ctx: &FieldCtx, exp: &BigIndex, modulus: &DensePoly) -> Result<DensePoly> {
    let red = Reducer::new(ctx, modulus)?;
    if red.degree() == 0 {
        return Ok(DensePoly::zero());
    }
    Ok(powmod_x_with(ctx, exp, &red))
}

pub fn powmod_x_with(ctx: &FieldCtx, exp: &BigIndex, red: &Reducer) -> DensePoly {
    let mut acc = DensePoly::one();
    for bit in exp.bits_msb_first() {
        acc = red.mulmod(ctx, &acc, &acc);
        if bit {
            acc = red.mul_x(ctx, &acc);
        }
    }
    acc
}

/// `base^E mod M`.
pub fn powmod(
    ctx: &FieldCtx,
    base: &DensePoly,
    exp: &BigIndex,
    modulus: &DensePoly,
) -> Result<DensePoly> {
    let modulus = modulus.monic(ctx)?;
    if modulus.degree() == Some(0) {
        return Ok(DensePoly::zero());
    }
    let red = Reducer::new(ctx, &modulus)?;
    let b = red.reduce(ctx, &rem(ctx, base, &modulus)?);
    let mut acc = DensePoly::one();
    for bit in exp.bits_msb_first() {
        acc = red.mulmod(ctx, &acc, &acc);
        if bit {
            acc = red.mulmod(ctx, &acc, &b);
        }
    }
    Ok(acc)
}

/// `Q^m` by binary powering.
pub fn pow_expand(ctx: &FieldCtx, q: &DensePoly, m: usize) -> DensePoly {
    let mut acc = DensePoly::one();
    let mut base = q.clone();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(ctx, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(ctx, &base, &base);
        }
    }
    acc
}

/// `a(x + c)`, by splitting the coefficient vector in halves and recombining
/// with binary powers of `x + c`. No restriction on the characteristic.
pub fn taylor_shift(ctx: &FieldCtx, a: &DensePoly, c: Fp) -> DensePoly {
    if c.is_zero() || a.len() <= 1 {
        return a.clone();
    }
    let mut power = DensePoly::new(vec![c, Fp::ONE]);
    let mut blocks: Vec<Vec<Fp>> = a.coeffs.iter().map(|&v| vec![v]).collect();
    while blocks.len() > 1 {
        let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
        let mut it = blocks.into_iter();
        while let Some(lo) = it.next() {
            match it.next() {
                Some(hi) => {
                    let prod = mul_slices(ctx, &power.coeffs, &hi);
                    next.push(add_slices(ctx, &lo, &prod));
                }
                None => next.push(lo),
            }
        }
        blocks = next;
        if blocks.len() > 1 {
            power = mul(ctx, &power, &power);
        }
    }
    DensePoly::new(blocks.pop().unwrap_or_default())
}

/// `a(x + c)` via one convolution against factorial-scaled powers of `c`;
/// needs `p > deg a`.
pub fn taylor_shift_convolution(ctx: &FieldCtx, a: &DensePoly, c: Fp) -> Result<DensePoly> {
    let Some(deg) = a.degree() else {
        return Ok(DensePoly::zero());
    };
    if ctx.modulus() <= deg as u64 {
        return Err(Error::CharacteristicTooSmall {
            modulus: ctx.modulus(),
            needed: deg as u64,
        });
    }
    let n = deg + 1;
    let mut fact = vec![Fp::ONE; n];
    for i in 1..n {
        fact[i] = ctx.mul(fact[i - 1], ctx.elem(i as u64));
    }
    let mut inv_fact = vec![Fp::ONE; n];
    inv_fact[n - 1] = ctx.inv(fact[n - 1])?;
    for i in (1..n).rev() {
        inv_fact[i - 1] = ctx.mul(inv_fact[i], ctx.elem(i as u64));
    }
    // b_k k! = sum_i (a_i i!) c^{i-k} / (i-k)!
    let scaled: Vec<Fp> = (0..n).map(|i| ctx.mul(a.coeffs[n - 1 - i], fact[n - 1 - i])).collect();
    let mut pw = Fp::ONE;
    let kernel: Vec<Fp> = (0..n)
        .map(|j| {
            let v = ctx.mul(pw, inv_fact[j]);
            pw = ctx.mul(pw, c);
            v
        })
        .collect();
    let conv = mul_slices(ctx, &scaled, &kernel);
    Ok(DensePoly::new(
        (0..n)
            .map(|k| ctx.mul(conv[n - 1 - k], inv_fact[k]))
            .collect(),
    ))
}

/// Transpose of `w -> (a * w) mod x^{v.len()}` restricted to inputs of length
/// `out_len`: returns `u` with `u_i = sum_k a_k v_{i+k}`.
pub fn mul_transposed(ctx: &FieldCtx, a: &DensePoly, v: &[Fp], out_len: usize) -> Vec<Fp> {
    if a.is_zero() || v.is_empty() {
        return vec![Fp::ZERO; out_len];
    }
    let la = a.len();
    // terms with i + k >= v.len() vanish, so only a_k with k < v.len() matter
    let rev: Vec<Fp> = a.coeffs[..la.min(v.len())].iter().rev().copied().collect();
    let shift = rev.len() - 1;
    let prod = mul_slices(ctx, &rev, v);
    (0..out_len)
        .map(|i| prod.get(shift + i).copied().unwrap_or(Fp::ZERO))
        .collect()
}

//! The `D`-th term of `a_{i+d} = sum_j c_j a_{i+j}`.
//!
//! All three algorithms rest on the same fact: the linear form
//! `x^i -> a_i` on `K[x]/P` recovers the sequence, so
//! `a_D = sum_i r_i a_i` where `R = x^D mod P = sum_i r_i x^i`.
//!
//! The factored algorithm computes `R` piecewise. For each squarefree part
//! `Q^m` of `P`, the image of `x^D` in `K[y,x]/<Q(y), (x-y)^m>` has the closed
//! form `sum_j e_j y^{D-j} x^j`, where `sum_j e_j x^j = x^D mod (x-1)^m` has
//! binomial coefficients in the basis `x - 1`. Only the powers of `y` depend
//! on `log D`, and they live modulo `Q`, of degree `f` rather than `f m`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bivar::{BivarElement, BivarRing, DEFAULT_MAX_RETRIES};
use crate::error::{Error, FastPathReason, Result};
use crate::factor::{self, SquarefreeFactorization};
use crate::field::{BigIndex, FieldCtx, Fp};
use crate::par;
use crate::poly::{self, DensePoly};

/// Largest index accepted by [`nth_term_naive`].
pub const NAIVE_INDEX_CAP: u64 = 100_000_000;

/// Which algorithm produced a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgoTag {
    Naive,
    Fiduccia,
    Factored,
}

impl AlgoTag {
    pub const ALL: [AlgoTag; 3] = [AlgoTag::Naive, AlgoTag::Fiduccia, AlgoTag::Factored];

    pub fn name(self) -> &'static str {
        match self {
            AlgoTag::Naive => "naive",
            AlgoTag::Fiduccia => "fiduccia",
            AlgoTag::Factored => "factored",
        }
    }
}

impl fmt::Display for AlgoTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgoTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "naive" => Ok(AlgoTag::Naive),
            "fiduccia" => Ok(AlgoTag::Fiduccia),
            "factored" => Ok(AlgoTag::Factored),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// A recurrence of order `d` with its initial values.
#[derive(Clone, Debug)]
pub struct Recurrence<'a> {
    ctx: &'a FieldCtx,
    coeffs: Vec<Fp>,
    init: Vec<Fp>,
    charpoly: DensePoly,
}

impl<'a> Recurrence<'a> {
    /// `coeffs = (c_0, …, c_{d-1})`, `init = (a_0, …, a_{d-1})`.
    pub fn new(ctx: &'a FieldCtx, coeffs: Vec<Fp>, init: Vec<Fp>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidRecurrence("order must be at least 1"));
        }
        if coeffs.len() != init.len() {
            return Err(Error::InvalidRecurrence(
                "coefficient and initial-value counts differ",
            ));
        }
        let mut cp: Vec<Fp> = coeffs.iter().map(|&c| ctx.neg(c)).collect();
        cp.push(Fp::ONE);
        Ok(Recurrence {
            ctx,
            coeffs,
            init,
            charpoly: DensePoly::new(cp),
        })
    }

    /// The recurrence whose characteristic polynomial is the monic `p`.
    pub fn from_charpoly(ctx: &'a FieldCtx, p: &DensePoly, init: Vec<Fp>) -> Result<Self> {
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        let d = p.len() - 1;
        let coeffs = (0..d).map(|j| ctx.neg(p.coeff(j))).collect();
        Self::new(ctx, coeffs, init)
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn init(&self) -> &[Fp] {
        &self.init
    }

    /// `x^d - sum_j c_j x^j`
    pub fn charpoly(&self) -> &DensePoly {
        &self.charpoly
    }

    /// Checks the preconditions of [`nth_term_factored`].
    pub fn factored_path_check(&self, index: &BigIndex) -> std::result::Result<(), FastPathReason> {
        let d = self.order() as u64;
        if self.coeffs[0].is_zero() {
            return Err(FastPathReason::ZeroConstantCoefficient);
        }
        if self.ctx.modulus() <= d {
            return Err(FastPathReason::CharacteristicTooSmall);
        }
        if index.lt_small(2 * d) {
            return Err(FastPathReason::IndexTooSmall);
        }
        Ok(())
    }

    fn dot_init(&self, r: &DensePoly) -> Fp {
        r.coeffs()
            .iter()
            .zip(&self.init)
            .fold(Fp::ZERO, |acc, (&ri, &ai)| self.ctx.mul_add(acc, ri, ai))
    }
}

/// Iterates the recurrence up to `D`.
pub fn nth_term_naive(rec: &Recurrence<'_>, index: &BigIndex) -> Result<Fp> {
    let target = index
        .to_u64()
        .filter(|&d| d <= NAIVE_INDEX_CAP)
        .ok_or(Error::IndexTooLarge {
            cap: NAIVE_INDEX_CAP,
        })?;
    let ctx = rec.ctx;
    let d = rec.order();
    if (target as usize) < d {
        return Ok(rec.init[target as usize]);
    }
    // window[(start + j) % d] = a_{i+j}
    let mut window = rec.init.clone();
    let mut start = 0;
    for _ in d as u64..=target {
        let next = (0..d).fold(Fp::ZERO, |acc, j| {
            ctx.mul_add(acc, rec.coeffs[j], window[(start + j) % d])
        });
        window[start] = next;
        start = (start + 1) % d;
    }
    Ok(window[(start + d - 1) % d])
}

/// `a_D` from `x^D mod P` by square-and-multiply.
pub fn nth_term_fiduccia(rec: &Recurrence<'_>, index: &BigIndex) -> Result<Fp> {
    let r = poly::powmod_x(rec.ctx, index, &rec.charpoly)?;
    Ok(rec.dot_init(&r))
}

/// `x^D mod (x - 1)^m`, from the binomial expansion of `(1 + (x - 1))^D`.
/// Needs `p > m - 1` so that `1, …, m - 1` are invertible.
pub fn binomial_remainder(ctx: &FieldCtx, index: &BigIndex, m: usize) -> Result<DensePoly> {
    if m == 0 {
        return Ok(DensePoly::zero());
    }
    if ctx.modulus() <= (m - 1) as u64 {
        return Err(Error::CharacteristicTooSmall {
            modulus: ctx.modulus(),
            needed: (m - 1) as u64,
        });
    }
    let d_mod_p = ctx.from_big(index);
    let mut binom = Vec::with_capacity(m);
    binom.push(Fp::ONE);
    for j in 1..m {
        // C(D, j) = C(D, j-1) (D - j + 1) / j
        let top = ctx.sub(d_mod_p, ctx.elem((j - 1) as u64));
        let step = ctx.div(top, ctx.elem(j as u64))?;
        binom.push(ctx.mul(binom[j - 1], step));
    }
    let in_u = DensePoly::new(binom);
    Ok(poly::taylor_shift(ctx, &in_u, ctx.neg(Fp::ONE)))
}

/// The image `δ = sum_j e_j y^{D-j} x^j` of `x^D` in the bivariate algebra.
pub fn delta_for_factor(ring: &BivarRing<'_>, index: &BigIndex) -> Result<BivarElement> {
    let ctx = ring.ctx();
    let m = ring.m();
    let Some(low_exp) = index.checked_sub_small((m - 1) as u64) else {
        // D < m - 1: x^D is already reduced
        let d = index.to_u64().expect("small index") as usize;
        return ring.untangle(&DensePoly::monomial(d));
    };
    let e = binomial_remainder(ctx, index, m)?;
    let base = ring.base();
    let y = DensePoly::monomial(1);
    // y^{D-(m-1)}, then one multiplication by y per lower x-power
    let mut w = poly::powmod(ctx, &y, &low_exp, base.modulus())?;
    let mut xcoeffs = vec![DensePoly::zero(); m];
    for j in (0..m).rev() {
        xcoeffs[j] = w.scale(ctx, e.coeff(j));
        if j > 0 {
            w = base.mul_y(&w);
        }
    }
    Ok(BivarElement::from_xcoeffs(xcoeffs))
}

/// `x^D mod Q^m` for one squarefree part, through the bivariate algebra.
pub fn power_mod_part<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    q: &DensePoly,
    m: usize,
    index: &BigIndex,
    rng: &mut R,
) -> Result<(DensePoly, DensePoly)> {
    let ring = BivarRing::new(ctx, q, m)?;
    let delta = delta_for_factor(&ring, index)?;
    let c = ring.tangle(&delta, rng, DEFAULT_MAX_RETRIES)?;
    Ok((c, ring.q_power().clone()))
}

/// Squarefree splitting, per-part bivariate powering, and Chinese
/// remaindering. Requires `c_0 != 0`, `p > d` and `D >= 2d`.
pub fn nth_term_factored<R: Rng + ?Sized>(
    rec: &Recurrence<'_>,
    index: &BigIndex,
    rng: &mut R,
) -> Result<Fp> {
    rec.factored_path_check(index)
        .map_err(Error::FastPathUnavailable)?;
    let ctx = rec.ctx;
    let sf = factor::yun_monic(ctx, &rec.charpoly)?;
    let r = power_mod_factored(ctx, &sf, index, rng)?;
    Ok(rec.dot_init(&r))
}

/// `x^D mod P` from a squarefree factorization of `P`.
pub fn power_mod_factored<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    sf: &SquarefreeFactorization,
    index: &BigIndex,
    rng: &mut R,
) -> Result<DensePoly> {
    // one seed per part keeps the result independent of scheduling
    let jobs: Vec<(usize, u64)> = sf
        .parts
        .iter()
        .enumerate()
        .map(|(i, _)| (i, rng.random()))
        .collect();
    let results = par::map(&jobs, |&(i, seed)| {
        let part = &sf.parts[i];
        let mut part_rng = ChaCha8Rng::seed_from_u64(seed);
        power_mod_part(ctx, &part.q, part.multiplicity, index, &mut part_rng)
    });
    let (residues, moduli): (Vec<_>, Vec<_>) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    factor::crt_combine(ctx, &residues, &moduli)
}

/// Picks a runnable algorithm: direct iteration for `D < 2d`, Fiduccia when
/// the factored path's preconditions fail, the factored path otherwise.
pub fn choose_algo(rec: &Recurrence<'_>, index: &BigIndex) -> AlgoTag {
    match rec.factored_path_check(index) {
        Ok(()) => AlgoTag::Factored,
        Err(FastPathReason::IndexTooSmall) => AlgoTag::Naive,
        Err(_) => AlgoTag::Fiduccia,
    }
}

pub fn nth_term_auto<R: Rng + ?Sized>(
    rec: &Recurrence<'_>,
    index: &BigIndex,
    rng: &mut R,
) -> Result<(Fp, AlgoTag)> {
    let algo = choose_algo(rec, index);
    nth_term_with(rec, index, algo, rng).map(|v| (v, algo))
}

pub fn nth_term_with<R: Rng + ?Sized>(
    rec: &Recurrence<'_>,
    index: &BigIndex,
    algo: AlgoTag,
    rng: &mut R,
) -> Result<Fp> {
    match algo {
        AlgoTag::Naive => nth_term_naive(rec, index),
        AlgoTag::Fiduccia => nth_term_fiduccia(rec, index),
        AlgoTag::Factored => nth_term_factored(rec, index, rng),
    }
}

/// Many terms of one recurrence, via [`nth_term_auto`]; index `k` uses an
/// rng seeded from `seed + k`, so the output does not depend on threading.
pub fn nth_terms(rec: &Recurrence<'_>, indices: &[BigIndex], seed: u64) -> Result<Vec<Fp>> {
    let jobs: Vec<(u64, &BigIndex)> = indices
        .iter()
        .enumerate()
        .map(|(k, d)| (seed.wrapping_add(k as u64), d))
        .collect();
    par::map(&jobs, |&(s, d)| {
        nth_term_auto(rec, d, &mut ChaCha8Rng::seed_from_u64(s)).map(|(v, _)| v)
    })
    .into_iter()
    .collect()
}

/// [`nth_terms`] on the calling thread only.
pub fn nth_terms_sequential(rec: &Recurrence<'_>, indices: &[BigIndex], seed: u64) -> Result<Vec<Fp>> {
    indices
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            nth_term_auto(rec, d, &mut rng).map(|(v, _)| v)
        })
        .collect()
}

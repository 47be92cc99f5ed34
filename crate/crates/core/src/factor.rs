//! Squarefree factorization and Chinese remaindering over `K[x]`.

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::poly::{self, DensePoly};

/// One squarefree part `Q^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreePart {
    /// Monic and squarefree.
    pub q: DensePoly,
    pub multiplicity: usize,
}

impl SquarefreePart {
    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }
}

/// `P = prod Q_i^{m_i}` with pairwise coprime squarefree `Q_i` and strictly
/// increasing multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeFactorization {
    pub parts: Vec<SquarefreePart>,
    /// Degree of the squarefree part, `sum deg Q_i`.
    pub d_bar: usize,
    /// `sum m_i deg Q_i`
    pub d: usize,
}

impl SquarefreeFactorization {
    /// Expands `prod Q_i^{m_i}`.
    pub fn expand(&self, ctx: &FieldCtx) -> DensePoly {
        self.parts.iter().fold(DensePoly::one(), |acc, part| {
            poly::mul(ctx, &acc, &poly::pow_expand(ctx, &part.q, part.multiplicity))
        })
    }
}

/// Yun's squarefree decomposition of a monic `P` with `p > deg P`.
pub fn yun_squarefree(ctx: &FieldCtx, p: &DensePoly) -> Result<SquarefreeFactorization> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        other => {
            return Err(Error::DegreeViolation {
                degree: other.unwrap_or(0),
                bound: 1,
            })
        }
    };
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    if ctx.modulus() <= deg as u64 {
        return Err(Error::CharacteristicTooSmall {
            modulus: ctx.modulus(),
            needed: deg as u64,
        });
    }
    yun_monic(ctx, p)
}

pub(crate) fn yun_monic(ctx: &FieldCtx, p: &DensePoly) -> Result<SquarefreeFactorization> {
    let dp = p.derivative(ctx);
    let a0 = poly::gcd(ctx, p, &dp)?;
    let mut b = poly::div_exact(ctx, p, &a0)?;
    let c = poly::div_exact(ctx, &dp, &a0)?;
    let mut d = c.sub(ctx, &b.derivative(ctx));
    let mut parts = Vec::new();
    let mut i = 1;
    while b.degree().is_some_and(|deg| deg > 0) {
        let a = poly::gcd(ctx, &b, &d)?;
        b = poly::div_exact(ctx, &b, &a)?;
        let c = poly::div_exact(ctx, &d, &a)?;
        d = c.sub(ctx, &b.derivative(ctx));
        if a.degree().is_some_and(|deg| deg > 0) {
            parts.push(SquarefreePart {
                q: a,
                multiplicity: i,
            });
        }
        i += 1;
    }
    let d_bar = parts.iter().map(SquarefreePart::degree).sum();
    let total = parts.iter().map(|pt| pt.degree() * pt.multiplicity).sum();
    Ok(SquarefreeFactorization {
        parts,
        d_bar,
        d: total,
    })
}

/// The unique `R` with `deg R < sum deg M_i` and `R = r_i mod M_i` for all
/// `i`, by Lagrange-style recombination.
pub fn crt_combine(
    ctx: &FieldCtx,
    residues: &[DensePoly],
    moduli: &[DensePoly],
) -> Result<DensePoly> {
    if residues.len() != moduli.len() {
        return Err(Error::LengthMismatch {
            expected: moduli.len(),
            actual: residues.len(),
        });
    }
    for (r, m) in residues.iter().zip(moduli) {
        if !m.is_monic() {
            return Err(Error::NotMonic);
        }
        if r.len() >= m.len() {
            return Err(Error::DegreeViolation {
                degree: r.len() - 1,
                bound: m.len() - 1,
            });
        }
    }
    if moduli.len() == 1 {
        return Ok(residues[0].clone());
    }
    let product = moduli
        .iter()
        .fold(DensePoly::one(), |acc, m| poly::mul(ctx, &acc, m));
    let mut acc = DensePoly::zero();
    for (r, m) in residues.iter().zip(moduli) {
        let cofactor = poly::div_exact(ctx, &product, m)?;
        let inv = poly::invmod(ctx, &cofactor, m)?;
        let term = poly::rem(ctx, &poly::mul(ctx, r, &inv), m)?;
        acc = acc.add(ctx, &poly::mul(ctx, &term, &cofactor));
    }
    Ok(acc)
}

//! The `bench` subcommand: op counts and wall time per (case, algorithm).

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use linrec::seqterm::{self, AlgoTag, NAIVE_INDEX_CAP};
use linrec::{par, poly, BigIndex, DensePoly, FieldCtx, Fp, Recurrence};

use crate::error::CliError;

#[derive(Clone, Debug)]
pub struct Shape {
    pub prime: u64,
    pub f: usize,
    pub m: usize,
    pub index_bits: u32,
    pub algos: Vec<AlgoTag>,
    pub reps: usize,
    pub seed: u64,
}

/// One CSV line; field order is the column order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub algo: &'static str,
    pub p: u64,
    pub d: usize,
    pub f: usize,
    pub m: usize,
    pub index_bits: u32,
    pub field_mults: u64,
    pub field_invs: u64,
    pub wall_ns: u64,
    pub result: String,
}

impl Shape {
    fn validate(&self) -> Result<(), CliError> {
        FieldCtx::new(self.prime).map_err(|e| CliError::validation("prime", e))?;
        if self.f == 0 {
            return Err(CliError::validation("f", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(CliError::validation("m", "must be at least 1"));
        }
        if self.index_bits == 0 || self.index_bits > 4096 {
            return Err(CliError::validation("index-bits", "must be in 1..=4096"));
        }
        if self.reps == 0 {
            return Err(CliError::validation("reps", "must be at least 1"));
        }
        if self.algos.is_empty() {
            return Err(CliError::validation("algos", "at least one algorithm is required"));
        }
        let d = (self.f * self.m) as u64;
        if self.algos.contains(&AlgoTag::Factored) {
            if self.prime <= d {
                return Err(CliError::validation("prime", "factored needs p > f m"));
            }
            if BigIndex::pow2(self.index_bits).lt_small(2 * d) {
                return Err(CliError::validation("index-bits", "factored needs 2^index-bits >= 2 f m"));
            }
        }
        if self.algos.contains(&AlgoTag::Naive)
            && !BigIndex::pow2(self.index_bits).lt_small(NAIVE_INDEX_CAP + 1)
        {
            return Err(CliError::validation("index-bits", "too large for the naive algorithm"));
        }
        Ok(())
    }
}

/// Monic, squarefree, nonzero constant term.
fn sample_factor(ctx: &FieldCtx, rng: &mut ChaCha8Rng, f: usize) -> DensePoly {
    loop {
        let mut c: Vec<Fp> = (0..f).map(|_| ctx.random(rng)).collect();
        c.push(Fp::ONE);
        let q = DensePoly::new(c);
        if q.coeff(0).is_zero() {
            continue;
        }
        if poly::gcd(ctx, &q, &q.derivative(ctx)).is_ok_and(|g| g.is_one()) {
            return q;
        }
    }
}

fn run_case(shape: &Shape, case: usize) -> Result<Vec<BenchRow>, CliError> {
    let ctx = FieldCtx::with_counters(shape.prime).map_err(|e| CliError::validation("prime", e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(shape.seed.wrapping_add(case as u64));
    let q = sample_factor(&ctx, &mut rng, shape.f);
    let p = poly::pow_expand(&ctx, &q, shape.m);
    let d = shape.f * shape.m;
    let init = (0..d).map(|_| ctx.random(&mut rng)).collect();
    let rec = Recurrence::from_charpoly(&ctx, &p, init).map_err(|e| CliError::Internal(e.to_string()))?;
    let index = BigIndex::pow2(shape.index_bits);
    let algo_seed: u64 = rng.random();

    let mut rows = Vec::with_capacity(shape.algos.len());
    for &algo in &shape.algos {
        let mut algo_rng = ChaCha8Rng::seed_from_u64(algo_seed);
        ctx.reset_counters();
        let start = Instant::now();
        let value = seqterm::nth_term_with(&rec, &index, algo, &mut algo_rng)
            .map_err(|e| CliError::Internal(format!("{algo}: {e}")))?;
        let wall_ns = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
        let counts = ctx.counts();
        rows.push(BenchRow {
            algo: algo.name(),
            p: shape.prime,
            d,
            f: shape.f,
            m: shape.m,
            index_bits: shape.index_bits,
            field_mults: counts.mults,
            field_invs: counts.invs,
            wall_ns,
            result: value.to_string(),
        });
    }
    if rows.windows(2).any(|w| w[0].result != w[1].result) {
        return Err(CliError::Internal(format!("case {case}: algorithms disagree")));
    }
    Ok(rows)
}

/// Runs all cases, concurrently when built with `parallel`; rows come back in
/// case order.
pub fn run(shape: &Shape) -> Result<Vec<BenchRow>, CliError> {
    shape.validate()?;
    let cases: Vec<usize> = (0..shape.reps).collect();
    let per_case = par::map(&cases, |&k| run_case(shape, k));
    let mut rows = Vec::new();
    for r in per_case {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Header row comes from the first serialized record.
pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::validation("csv", e);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::validation("csv", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(f: usize, m: usize, bits: u32) -> Shape {
        Shape {
            prime: 65537,
            f,
            m,
            index_bits: bits,
            algos: vec![AlgoTag::Fiduccia, AlgoTag::Factored],
            reps: 3,
            seed: 5,
        }
    }

    #[test]
    fn rows_agree_and_are_deterministic() {
        let s = shape(2, 4, 40);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a.len(), 6);
        let strip = |rows: &[BenchRow]| -> Vec<BenchRow> {
            rows.iter().cloned().map(|r| BenchRow { wall_ns: 0, ..r }).collect()
        };
        assert_eq!(strip(&a), strip(&b));
        for pair in a.chunks(2) {
            assert_eq!(pair[0].result, pair[1].result);
            assert_eq!((pair[0].algo, pair[1].algo), ("fiduccia", "factored"));
        }
    }

    #[test]
    fn sampled_factors_meet_preconditions() {
        let ctx = FieldCtx::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for f in 1..6 {
            let q = sample_factor(&ctx, &mut rng, f);
            assert_eq!(q.degree(), Some(f));
            assert!(!q.coeff(0).is_zero());
        }
    }

    #[test]
    fn invalid_shapes() {
        assert!(matches!(run(&Shape { prime: 91, ..shape(2, 2, 10) }), Err(CliError::Validation { field: "prime", .. })));
        assert!(matches!(run(&Shape { prime: 7, ..shape(2, 4, 10) }), Err(CliError::Validation { field: "prime", .. })));
        assert!(matches!(run(&shape(0, 2, 10)), Err(CliError::Validation { field: "f", .. })));
        assert!(matches!(run(&shape(2, 8, 4)), Err(CliError::Validation { field: "index-bits", .. })));
        let naive_big = Shape { algos: vec![AlgoTag::Naive], ..shape(2, 2, 40) };
        assert!(matches!(run(&naive_big), Err(CliError::Validation { field: "index-bits", .. })));
    }
}

//! Small dense matrices over `Z/p`, used as test oracles and as the
//! deterministic fallback for tangling.

use crate::field::{FieldCtx, Fp};

/// Row-major square or rectangular matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fp>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fp::ZERO; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Fp>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate().take(rows) {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fp {
        self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[Fp]) -> Vec<Fp> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Fp::ZERO, |acc, j| ctx.mul_add(acc, self.get(i, j), v[j]))
            })
            .collect()
    }

    /// `M^T v`
    pub fn mul_vec_transposed(&self, ctx: &FieldCtx, v: &[Fp]) -> Vec<Fp> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(Fp::ZERO, |acc, i| ctx.mul_add(acc, self.get(i, j), v[i]))
            })
            .collect()
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        let mut m = self.clone();
        eliminate(ctx, &mut m, None)
    }

    /// Solves `M x = b` for square nonsingular `M`.
    pub fn solve(&self, ctx: &FieldCtx, b: &[Fp]) -> Option<Vec<Fp>> {
        if self.rows != self.cols || b.len() != self.rows {
            return None;
        }
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        if eliminate(ctx, &mut m, Some(&mut rhs)) < self.rows {
            return None;
        }
        Some(rhs)
    }
}

// Gauss-Jordan elimination; returns the rank. When a right-hand side is
// given and the matrix is nonsingular, it is overwritten by the solution.
fn eliminate(ctx: &FieldCtx, m: &mut Matrix, mut rhs: Option<&mut Vec<Fp>>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m.get(r, col).is_zero()) else {
            continue;
        };
        for j in 0..cols {
            m.data.swap(pivot * cols + j, rank * cols + j);
        }
        if let Some(r) = rhs.as_deref_mut() {
            r.swap(pivot, rank);
        }
        let inv = ctx.inv(m.get(rank, col)).expect("pivot is nonzero");
        for j in 0..cols {
            m.data[rank * cols + j] = ctx.mul(m.data[rank * cols + j], inv);
        }
        if let Some(r) = rhs.as_deref_mut() {
            r[rank] = ctx.mul(r[rank], inv);
        }
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let factor = m.get(i, col);
            if factor.is_zero() {
                continue;
            }
            for j in 0..cols {
                let v = ctx.mul(factor, m.data[rank * cols + j]);
                m.data[i * cols + j] = ctx.sub(m.data[i * cols + j], v);
            }
            if let Some(r) = rhs.as_deref_mut() {
                let v = ctx.mul(factor, r[rank]);
                r[i] = ctx.sub(r[i], v);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_rank() {
        let f = FieldCtx::new(101).unwrap();
        let e = |v: u64| f.elem(v);
        let m = Matrix {
            rows: 2,
            cols: 2,
            data: vec![e(1), e(2), e(3), e(4)],
        };
        assert_eq!(m.rank(&f), 2);
        let x = m.solve(&f, &[e(5), e(6)]).unwrap();
        assert_eq!(m.mul_vec(&f, &x), [e(5), e(6)]);
        let singular = Matrix {
            rows: 2,
            cols: 2,
            data: vec![e(1), e(2), e(2), e(4)],
        };
        assert_eq!(singular.rank(&f), 1);
        assert!(singular.solve(&f, &[e(1), e(1)]).is_none());
    }
}

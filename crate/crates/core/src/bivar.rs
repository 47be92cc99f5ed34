//! The algebra `A = K[y,x]/<Q(y), (x-y)^m>` and the conversions between it
//! and `K[x]/Q^m`.
//!
//! Elements of `A` are stored on the basis `y^a x^b` (`a < f = deg Q`,
//! `b < m`), as `m` residues modulo `Q`. Internally a second presentation
//! with `t = x - y` is used, in which `A` is the truncated polynomial ring
//! `(K[y]/Q)[t]/t^m`.
//!
//! * [`BivarRing::untangle`] sends `C(x)` to its class in `A`. It expands
//!   `C(y + t)` by divide and conquer over the coefficients of `C` and then
//!   rewrites the result in powers of `x` by substituting `t = x - y`.
//! * [`BivarRing::transposed_untangle`] applies the transpose of that linear
//!   map, obtained by running the transposed steps in reverse order.
//! * [`BivarRing::tangle`] inverts `untangle`. It draws a random linear form
//!   `λ` on `A`, computes the power projections `λ(x^j)` and `λ(x^j δ)` with
//!   the transposed map, and solves the resulting Hankel system by rational
//!   reconstruction against `Q^m`.

use std::sync::OnceLock;

use rand::Rng;

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fp};
use crate::poly::{self, DensePoly, Reducer};

/// Largest dimension `n` for which dense matrices are built.
pub const DENSE_BOUND: usize = 64;
/// Number of random projections tried by [`BivarRing::tangle`] before falling
/// back to the dense solver.
pub const DEFAULT_MAX_RETRIES: usize = 8;

/// `K[y]/Q(y)` for monic `Q`.
#[derive(Clone, Debug)]
pub struct ResidueRing<'a> {
    ctx: &'a FieldCtx,
    q: DensePoly,
    reducer: Reducer,
}

impl<'a> ResidueRing<'a> {
    pub fn new(ctx: &'a FieldCtx, q: &DensePoly) -> Result<Self> {
        match q.degree() {
            None | Some(0) => {
                return Err(Error::DegreeViolation {
                    degree: 0,
                    bound: 1,
                })
            }
            _ => {}
        }
        Ok(ResidueRing {
            ctx,
            q: q.clone(),
            reducer: Reducer::new(ctx, q)?,
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn modulus(&self) -> &DensePoly {
        &self.q
    }

    /// `f = deg Q`
    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    pub fn reduce(&self, a: &DensePoly) -> DensePoly {
        self.reducer.reduce(self.ctx, a)
    }

    pub fn mul(&self, a: &DensePoly, b: &DensePoly) -> DensePoly {
        self.reducer.mulmod(self.ctx, a, b)
    }

    /// `y * a`
    pub fn mul_y(&self, a: &DensePoly) -> DensePoly {
        self.reducer.mul_x(self.ctx, a)
    }

    fn contains(&self, a: &DensePoly) -> bool {
        a.len() <= self.degree()
    }
}

/// Element of `A` on the `x`-power basis: entry `b` is the coefficient of
/// `x^b`, a residue modulo `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarElement {
    xcoeffs: Vec<DensePoly>,
}

impl BivarElement {
    pub fn from_xcoeffs(xcoeffs: Vec<DensePoly>) -> Self {
        BivarElement { xcoeffs }
    }

    pub fn xcoeffs(&self) -> &[DensePoly] {
        &self.xcoeffs
    }

    /// Coordinates on the basis `y^a x^b`, at index `b * f + a`.
    pub fn flatten(&self, f: usize) -> Vec<Fp> {
        self.xcoeffs
            .iter()
            .flat_map(|r| (0..f).map(move |a| r.coeff(a)))
            .collect()
    }
}

/// A `K`-linear form on `A`, given by its values on the basis `y^a x^b` at
/// index `b * f + a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub values: Vec<Fp>,
}

impl LinearForm {
    pub fn apply(&self, ctx: &FieldCtx, f: usize, el: &BivarElement) -> Fp {
        el.flatten(f)
            .iter()
            .zip(&self.values)
            .fold(Fp::ZERO, |acc, (&c, &v)| ctx.mul_add(acc, c, v))
    }
}

/// Truncated bivariate polynomial: `rows` powers of the first variable, each
/// a polynomial of length `width` in `y`. Stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Grid {
    rows: usize,
    width: usize,
    data: Vec<Fp>,
}

impl Grid {
    fn zeros(rows: usize, width: usize) -> Self {
        Grid {
            rows,
            width,
            data: vec![Fp::ZERO; rows * width],
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.rows, self.width)
    }

    fn row(&self, s: usize) -> &[Fp] {
        &self.data[s * self.width..(s + 1) * self.width]
    }

    fn row_mut(&mut self, s: usize) -> &mut [Fp] {
        &mut self.data[s * self.width..(s + 1) * self.width]
    }

    fn from_rows(rows: &[Vec<Fp>], width: usize) -> Self {
        let mut g = Grid::zeros(rows.len(), width);
        for (s, r) in rows.iter().enumerate() {
            let n = r.len().min(width);
            g.row_mut(s)[..n].copy_from_slice(&r[..n]);
        }
        g
    }

    /// Sub-block (or zero extension) of the given shape.
    fn resized(&self, rows: usize, width: usize) -> Grid {
        if (rows, width) == self.shape() {
            return self.clone();
        }
        let mut g = Grid::zeros(rows, width);
        let w = width.min(self.width);
        for s in 0..rows.min(self.rows) {
            g.row_mut(s)[..w].copy_from_slice(&self.row(s)[..w]);
        }
        g
    }

    fn add(&self, ctx: &FieldCtx, other: &Grid) -> Grid {
        let mut g = self.resized(self.rows.max(other.rows), self.width.max(other.width));
        for s in 0..other.rows {
            for (o, &v) in g.row_mut(s).iter_mut().zip(other.row(s)) {
                *o = ctx.add(*o, v);
            }
        }
        g
    }

    /// Kronecker packing with row stride `stride >= width`, trailing zeros
    /// of the last row dropped.
    fn pack(&self, stride: usize) -> Vec<Fp> {
        if self.rows == 0 {
            return Vec::new();
        }
        let mut v = vec![Fp::ZERO; (self.rows - 1) * stride + self.width];
        for s in 0..self.rows {
            v[s * stride..s * stride + self.width].copy_from_slice(self.row(s));
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Plus,
    Minus,
}

/// `K[y,x]/<Q(y), (x-y)^m>`.
#[derive(Debug)]
pub struct BivarRing<'a> {
    base: ResidueRing<'a>,
    m: usize,
    n: usize,
    // (±y + s)^(2^k) mod (Q, s^m)
    plus_powers: Vec<Grid>,
    minus_powers: Vec<Grid>,
    // x^m = sum_i reduction[i] x^i in A
    x_power_reduction: OnceLock<Vec<DensePoly>>,
    q_power: OnceLock<DensePoly>,
}

/// Outcome details of one tangling call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TangleStats {
    /// Random projections drawn.
    pub attempts: usize,
    /// Whether the dense solver produced the result.
    pub used_fallback: bool,
}

fn levels_for(count: usize) -> usize {
    count.next_power_of_two().trailing_zeros() as usize
}

impl<'a> BivarRing<'a> {
    pub fn new(ctx: &'a FieldCtx, q: &DensePoly, m: usize) -> Result<Self> {
        if !q.is_monic() {
            return Err(Error::NotMonic);
        }
        if m == 0 {
            return Err(Error::DegreeViolation {
                degree: 0,
                bound: 1,
            });
        }
        let base = ResidueRing::new(ctx, q)?;
        let n = base.degree() * m;
        let mut ring = BivarRing {
            base,
            m,
            n,
            plus_powers: Vec::new(),
            minus_powers: Vec::new(),
            x_power_reduction: OnceLock::new(),
            q_power: OnceLock::new(),
        };
        ring.plus_powers = ring.substitution_powers(Sign::Plus, levels_for(n));
        ring.minus_powers = ring.substitution_powers(Sign::Minus, levels_for(m));
        Ok(ring)
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.base.ctx
    }

    pub fn base(&self) -> &ResidueRing<'a> {
        &self.base
    }

    /// `f = deg Q`
    pub fn f(&self) -> usize {
        self.base.degree()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `n = f m`, the dimension of `A` over `K`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `Q^m`, expanded on first use.
    pub fn q_power(&self) -> &DensePoly {
        self.q_power
            .get_or_init(|| poly::pow_expand(self.ctx(), self.base.modulus(), self.m))
    }

    pub fn one(&self) -> BivarElement {
        let mut xcoeffs = vec![DensePoly::zero(); self.m];
        xcoeffs[0] = DensePoly::one();
        BivarElement { xcoeffs }
    }

    /// Element with coordinates `flat[b * f + a]` on `y^a x^b`.
    pub fn element_from_flat(&self, flat: &[Fp]) -> Result<BivarElement> {
        if flat.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: flat.len(),
            });
        }
        Ok(BivarElement {
            xcoeffs: flat
                .chunks(self.f())
                .map(|c| DensePoly::new(c.to_vec()))
                .collect(),
        })
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BivarElement {
        let flat: Vec<Fp> = (0..self.n).map(|_| self.ctx().random(rng)).collect();
        self.element_from_flat(&flat).expect("length n")
    }

    pub fn random_form<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearForm {
        LinearForm {
            values: (0..self.n).map(|_| self.ctx().random(rng)).collect(),
        }
    }

    fn check_element(&self, el: &BivarElement) -> Result<()> {
        if el.xcoeffs.len() != self.m || !el.xcoeffs.iter().all(|r| self.base.contains(r)) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    fn check_form(&self, form: &LinearForm) -> Result<()> {
        if form.values.len() != self.n {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    fn element_to_grid(&self, el: &BivarElement) -> Grid {
        let rows: Vec<Vec<Fp>> = el.xcoeffs.iter().map(|r| r.coeffs().to_vec()).collect();
        Grid::from_rows(&rows, self.f())
    }

    fn grid_to_element(&self, g: &Grid) -> BivarElement {
        let g = g.resized(self.m, self.f());
        BivarElement {
            xcoeffs: (0..self.m)
                .map(|s| DensePoly::new(g.row(s).to_vec()))
                .collect(),
        }
    }

    fn form_to_grid(&self, form: &LinearForm) -> Grid {
        Grid {
            rows: self.m,
            width: self.f(),
            data: form.values.clone(),
        }
    }

    // ---- truncated bivariate products -------------------------------------

    /// `a * b mod (Q(y), s^m)`.
    fn grid_mul(&self, a: &Grid, b: &Grid) -> Grid {
        let ctx = self.ctx();
        let f = self.f();
        let stride = a.width + b.width - 1;
        let prod = poly::mul_slices(ctx, &a.pack(stride), &b.pack(stride));
        let rows = (a.rows + b.rows - 1).min(self.m);
        let width = stride.min(f);
        let mut out = Grid::zeros(rows, width);
        for s in 0..rows {
            let lo = (s * stride).min(prod.len());
            let hi = ((s + 1) * stride).min(prod.len());
            let chunk = &prod[lo..hi];
            if stride > f {
                let r = self.base.reduce(&DensePoly::new(chunk.to_vec()));
                out.row_mut(s)[..r.len()].copy_from_slice(r.coeffs());
            } else {
                out.row_mut(s)[..chunk.len()].copy_from_slice(chunk);
            }
        }
        out
    }

    /// Transpose of `z -> grid_mul(fixed, z)` for inputs of shape
    /// `input`; `form` lives on the output shape.
    fn grid_mul_transposed(&self, fixed: &Grid, form: &Grid, input: (usize, usize)) -> Grid {
        let ctx = self.ctx();
        let f = self.f();
        let (in_rows, in_width) = input;
        let stride = fixed.width + in_width - 1;
        let rows = (fixed.rows + in_rows - 1).min(self.m);
        let form = form.resized(rows, stride.min(f));
        let mut packed = vec![Fp::ZERO; rows * stride];
        for s in 0..rows {
            let dst = &mut packed[s * stride..(s + 1) * stride];
            if stride > f {
                self.extend_through_reduction(form.row(s), dst);
            } else {
                dst.copy_from_slice(form.row(s));
            }
        }
        let fixed_poly = DensePoly::new(fixed.pack(stride));
        let v = poly::mul_transposed(ctx, &fixed_poly, &packed, in_rows * stride);
        let mut out = Grid::zeros(in_rows, in_width);
        for s in 0..in_rows {
            out.row_mut(s)
                .copy_from_slice(&v[s * stride..s * stride + in_width]);
        }
        out
    }

    /// Given `ψ` on `K[y]/Q` (values on `1, …, y^{f-1}`), fills `out[j]` with
    /// `ψ(y^j mod Q)`: the transpose of reduction modulo `Q`.
    fn extend_through_reduction(&self, psi: &[Fp], out: &mut [Fp]) {
        let ctx = self.ctx();
        let f = self.f();
        let q = self.base.modulus().coeffs();
        out[..f].copy_from_slice(&psi[..f]);
        for j in f..out.len() {
            let acc = (0..f).fold(Fp::ZERO, |acc, i| ctx.mul_add(acc, q[i], out[j - f + i]));
            out[j] = ctx.neg(acc);
        }
    }

    // ---- substitution s -> ±y + s, by divide and conquer -------------------

    fn substitution_powers(&self, sign: Sign, levels: usize) -> Vec<Grid> {
        let ctx = self.ctx();
        let f = self.f();
        let y = match sign {
            Sign::Plus => Fp::ONE,
            Sign::Minus => ctx.neg(Fp::ONE),
        };
        let y_row = if f >= 2 {
            vec![Fp::ZERO, y]
        } else {
            // y = -Q(0) modulo a linear Q
            vec![ctx.mul(y, ctx.neg(self.base.modulus().coeff(0)))]
        };
        let width = y_row.len();
        let mut rows = vec![y_row];
        if self.m >= 2 {
            rows.push(vec![Fp::ONE]);
        }
        let mut powers: Vec<Grid> = Vec::with_capacity(levels);
        for level in 0..levels {
            let next = match powers.last() {
                None => Grid::from_rows(&rows, width),
                Some(prev) => self.grid_mul(prev, prev),
            };
            debug_assert_eq!(powers.len(), level);
            powers.push(next);
        }
        powers
    }

    fn powers(&self, sign: Sign) -> &[Grid] {
        match sign {
            Sign::Plus => &self.plus_powers,
            Sign::Minus => &self.minus_powers,
        }
    }

    /// `sum_k leaves[k] (±y + s)^k mod (Q, s^m)`, each leaf a single row.
    fn substitute(&self, sign: Sign, leaves: Vec<Grid>) -> Grid {
        let ctx = self.ctx();
        let powers = self.powers(sign);
        let mut level = 0;
        let mut cur = leaves;
        while cur.len() > 1 {
            let mut next = Vec::with_capacity(cur.len().div_ceil(2));
            let mut it = cur.into_iter();
            while let Some(lo) = it.next() {
                match it.next() {
                    Some(hi) => next.push(lo.add(ctx, &self.grid_mul(&powers[level], &hi))),
                    None => next.push(lo),
                }
            }
            cur = next;
            level += 1;
        }
        cur.pop().unwrap_or_else(|| Grid::zeros(1, 1))
    }

    /// Transpose of [`Self::substitute`] for leaves of the given shapes.
    fn substitute_transposed(
        &self,
        sign: Sign,
        form: &Grid,
        leaf_shapes: &[(usize, usize)],
    ) -> Vec<Grid> {
        let powers = self.powers(sign);
        let prod_shape = |p: &Grid, hi: (usize, usize)| {
            (
                (p.rows + hi.0 - 1).min(self.m),
                (p.width + hi.1 - 1).min(self.f()),
            )
        };
        // shapes of every intermediate, replaying the forward pass
        let mut shapes = vec![leaf_shapes.to_vec()];
        while shapes.last().expect("nonempty").len() > 1 {
            let level = shapes.len() - 1;
            let next = shapes[level]
                .chunks(2)
                .map(|pair| match *pair {
                    [lo, hi] => {
                        let pr = prod_shape(&powers[level], hi);
                        (lo.0.max(pr.0), lo.1.max(pr.1))
                    }
                    [lo] => lo,
                    _ => unreachable!(),
                })
                .collect();
            shapes.push(next);
        }
        let top = shapes.last().expect("nonempty")[0];
        let mut forms = vec![form.resized(top.0, top.1)];
        for level in (0..shapes.len() - 1).rev() {
            let below = &shapes[level];
            let mut next = Vec::with_capacity(below.len());
            for (i, phi) in forms.iter().enumerate() {
                let lo = below[2 * i];
                next.push(phi.resized(lo.0, lo.1));
                if let Some(&hi) = below.get(2 * i + 1) {
                    let pr = prod_shape(&powers[level], hi);
                    let phi_prod = phi.resized(pr.0, pr.1);
                    next.push(self.grid_mul_transposed(&powers[level], &phi_prod, hi));
                }
            }
            forms = next;
        }
        forms
    }

    // x-basis <-> t-basis, t = x - y
    fn x_to_t(&self, g: &Grid) -> Grid {
        let leaves = (0..g.rows)
            .map(|s| Grid::from_rows(&[g.row(s).to_vec()], g.width))
            .collect();
        self.substitute(Sign::Plus, leaves)
            .resized(self.m, self.f())
    }

    fn t_to_x(&self, g: &Grid) -> Grid {
        let leaves = (0..g.rows)
            .map(|s| Grid::from_rows(&[g.row(s).to_vec()], g.width))
            .collect();
        self.substitute(Sign::Minus, leaves)
            .resized(self.m, self.f())
    }

    fn row_leaf_forms_to_grid(&self, leaf_forms: Vec<Grid>) -> Grid {
        let rows: Vec<Vec<Fp>> = leaf_forms.into_iter().map(|g| g.data).collect();
        Grid::from_rows(&rows, self.f())
    }

    fn x_to_t_transposed(&self, form: &Grid) -> Grid {
        let shapes = vec![(1, self.f()); self.m];
        self.row_leaf_forms_to_grid(self.substitute_transposed(Sign::Plus, form, &shapes))
    }

    fn t_to_x_transposed(&self, form: &Grid) -> Grid {
        let shapes = vec![(1, self.f()); self.m];
        self.row_leaf_forms_to_grid(self.substitute_transposed(Sign::Minus, form, &shapes))
    }

    // ---- public maps -------------------------------------------------------

    /// Product in `A`, computed on the `x`-basis: multiply as polynomials in
    /// `x` over `K[y]/Q`, then fold `x^k` for `k >= m` using the expansion of
    /// `x^m` modulo `(x - y)^m`.
    pub fn bv_mul(&self, u: &BivarElement, v: &BivarElement) -> Result<BivarElement> {
        self.check_element(u)?;
        self.check_element(v)?;
        let ctx = self.ctx();
        let (f, m) = (self.f(), self.m);
        let stride = 2 * f - 1;
        let prod = poly::mul_slices(
            ctx,
            &self.element_to_grid(u).pack(stride),
            &self.element_to_grid(v).pack(stride),
        );
        let mut coeffs: Vec<DensePoly> = (0..2 * m - 1)
            .map(|k| {
                let lo = (k * stride).min(prod.len());
                let hi = ((k + 1) * stride).min(prod.len());
                self.base.reduce(&DensePoly::new(prod[lo..hi].to_vec()))
            })
            .collect();
        let red = self.x_power_reduction();
        for k in (m..2 * m - 1).rev() {
            let top = std::mem::take(&mut coeffs[k]);
            if top.is_zero() {
                continue;
            }
            for (i, g) in red.iter().enumerate() {
                let t = self.base.mul(&top, g);
                coeffs[k - m + i] = coeffs[k - m + i].add(ctx, &t);
            }
        }
        coeffs.truncate(m);
        Ok(BivarElement { xcoeffs: coeffs })
    }

    fn x_power_reduction(&self) -> &[DensePoly] {
        self.x_power_reduction.get_or_init(|| {
            // (x - y)^m over K[y]/Q by repeated multiplication
            let ctx = self.ctx();
            let mut pw = vec![DensePoly::one()];
            for _ in 0..self.m {
                let mut next = vec![DensePoly::zero(); pw.len() + 1];
                for (i, c) in pw.iter().enumerate() {
                    next[i + 1] = next[i + 1].add(ctx, c);
                    next[i] = next[i].sub(ctx, &self.base.mul_y(c));
                }
                pw = next;
            }
            pw.truncate(self.m);
            pw.iter()
                .map(|c| DensePoly::zero().sub(ctx, c))
                .collect()
        })
    }

    /// The class of `C(x)` in `A`. Inputs of degree `n` or more are first
    /// reduced modulo `Q^m`.
    pub fn untangle(&self, c: &DensePoly) -> Result<BivarElement> {
        if c.len() > self.n {
            let reduced = poly::rem(self.ctx(), c, self.q_power())?;
            return self.untangle(&reduced);
        }
        let leaves = (0..self.n)
            .map(|k| Grid::from_rows(&[vec![c.coeff(k)]], 1))
            .collect();
        let in_t = self.substitute(Sign::Plus, leaves).resized(self.m, self.f());
        Ok(self.grid_to_element(&self.t_to_x(&in_t)))
    }

    /// `(μ(π(x^j)))_{j < n}`: the transpose of [`Self::untangle`] applied to
    /// the coordinates of `μ`.
    pub fn transposed_untangle(&self, mu: &LinearForm) -> Result<Vec<Fp>> {
        self.check_form(mu)?;
        let on_t = self.t_to_x_transposed(&self.form_to_grid(mu));
        let shapes = vec![(1, 1); self.n];
        Ok(self
            .substitute_transposed(Sign::Plus, &on_t, &shapes)
            .into_iter()
            .map(|g| g.data[0])
            .collect())
    }

    /// The form `z -> λ(δ z)`.
    pub fn transposed_bv_mul(&self, lambda: &LinearForm, delta: &BivarElement) -> Result<LinearForm> {
        self.check_form(lambda)?;
        self.check_element(delta)?;
        let delta_t = self.x_to_t(&self.element_to_grid(delta));
        Ok(self.transposed_mul_t_basis(lambda, &delta_t))
    }

    fn transposed_mul_t_basis(&self, lambda: &LinearForm, delta_t: &Grid) -> LinearForm {
        let phi = self.t_to_x_transposed(&self.form_to_grid(lambda));
        let phi = self.grid_mul_transposed(delta_t, &phi, (self.m, self.f()));
        LinearForm {
            values: self.x_to_t_transposed(&phi).data,
        }
    }

    /// Dense matrix of [`Self::untangle`]: column `j` holds the coordinates
    /// of `π(x^j)`.
    pub fn untangle_matrix(&self) -> Result<Matrix> {
        self.untangle_matrix_bounded(DENSE_BOUND)
    }

    pub fn untangle_matrix_bounded(&self, bound: usize) -> Result<Matrix> {
        if self.n > bound {
            return Err(Error::TooLarge {
                size: self.n,
                bound,
            });
        }
        let columns = (0..self.n)
            .map(|j| {
                self.untangle(&DensePoly::monomial(j))
                    .map(|e| e.flatten(self.f()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(self.n, &columns))
    }

    /// The unique `C` with `deg C < n` and `untangle(C) = delta`.
    pub fn tangle<R: Rng + ?Sized>(
        &self,
        delta: &BivarElement,
        rng: &mut R,
        max_retries: usize,
    ) -> Result<DensePoly> {
        self.tangle_with_stats(delta, rng, max_retries).map(|(c, _)| c)
    }

    pub fn tangle_with_stats<R: Rng + ?Sized>(
        &self,
        delta: &BivarElement,
        rng: &mut R,
        max_retries: usize,
    ) -> Result<(DensePoly, TangleStats)> {
        self.check_element(delta)?;
        let mut stats = TangleStats::default();
        if self.m == 1 {
            // π is reduction modulo Q, the identity on degrees below f
            return Ok((delta.xcoeffs[0].clone(), stats));
        }
        let ctx = self.ctx();
        let q_power = self.q_power();
        let delta_t = self.x_to_t(&self.element_to_grid(delta));
        for _ in 0..max_retries {
            stats.attempts += 1;
            let lambda = self.random_form(rng);
            let h = self.transposed_untangle(&lambda)?;
            let mu = self.transposed_mul_t_basis(&lambda, &delta_t);
            let l = self.transposed_untangle(&mu)?;
            let num_h = projection_numerator(ctx, q_power, &h)?;
            let inv = match poly::invmod(ctx, &num_h, q_power) {
                Ok(inv) => inv,
                Err(Error::NotCoprime) => continue,
                Err(e) => return Err(e),
            };
            let num_l = projection_numerator(ctx, q_power, &l)?;
            let c = poly::rem(ctx, &poly::mul(ctx, &num_l, &inv), q_power)?;
            if self.untangle(&c)? == *delta {
                return Ok((c, stats));
            }
        }
        if self.n <= DENSE_BOUND {
            stats.used_fallback = true;
            let matrix = self.untangle_matrix()?;
            if let Some(sol) = matrix.solve(ctx, &delta.flatten(self.f())) {
                let c = DensePoly::new(sol);
                if self.untangle(&c)? == *delta {
                    return Ok((c, stats));
                }
            }
        }
        Err(Error::SingularProjection)
    }
}

/// The numerator `N` with `deg N < n` of the generating series
/// `sum_j h_j x^{-j-1} = N / P` for a sequence satisfying the recurrence with
/// monic characteristic polynomial `P` of degree `n`, given its first `n`
/// terms.
pub fn projection_numerator(ctx: &FieldCtx, p: &DensePoly, h: &[Fp]) -> Result<DensePoly> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let n = p.len() - 1;
    if h.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: h.len(),
        });
    }
    let reversed: Vec<Fp> = h.iter().rev().copied().collect();
    let prod = poly::mul_slices(ctx, p.coeffs(), &reversed);
    Ok(DensePoly::new(prod.get(n..).unwrap_or_default().to_vec()))
}

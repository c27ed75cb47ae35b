//! Dense triangular bivariate power series over `Q(i)`, truncated at a
//! fixed total degree.
//!
//! A `Series2` with truncation `N` represents an element of the quotient
//! ring `Q(i)[[X, Y]] / (X, Y)^(N+1)`: all coefficients of total degree
//! `<= N` are stored (row-major by total degree), and every operation is
//! exact in that quotient. Binary operations between series of different
//! truncations reduce to the smaller truncation, because that is the largest
//! quotient in which both operands are known.
//!
//! Variable labels are carried for diagnostics only; they never affect
//! arithmetic and are excluded from equality.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{binomial, GaussRational};

/// Variable-label pair, e.g. `("x", "y")` or `("z", "w")`.
pub type VarPair = (&'static str, &'static str);

pub const VARS_XY: VarPair = ("x", "y");
pub const VARS_ZW: VarPair = ("z", "w");

fn zero_ref() -> &'static GaussRational {
    static ZERO: OnceLock<GaussRational> = OnceLock::new();
    ZERO.get_or_init(GaussRational::zero)
}

/// Index of the coefficient of `X^(d-j) Y^j` inside the triangular layout.
#[inline]
fn tri_index(d: usize, j: usize) -> usize {
    d * (d + 1) / 2 + j
}

/// Number of coefficients stored for truncation `n`.
#[inline]
fn tri_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Truncated bivariate power series with exact `Q(i)` coefficients.
#[derive(Clone)]
pub struct Series2 {
    trunc: usize,
    vars: VarPair,
    /// Triangular storage: coefficient of `X^(d-j) Y^j` at `tri_index(d, j)`.
    coeffs: Vec<GaussRational>,
}

impl PartialEq for Series2 {
    /// Equality compares truncation and coefficients; labels are diagnostic.
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

impl Eq for Series2 {}

impl Series2 {
    pub fn zero(trunc: usize, vars: VarPair) -> Self {
        Series2 {
            trunc,
            vars,
            coeffs: vec![GaussRational::zero(); tri_len(trunc)],
        }
    }

    /// The first variable as a series (requires `trunc >= 1`).
    pub fn var_first(trunc: usize, vars: VarPair) -> Self {
        let mut s = Self::zero(trunc, vars);
        s.set(1, 0, GaussRational::one());
        s
    }

    /// The second variable as a series (requires `trunc >= 1`).
    pub fn var_second(trunc: usize, vars: VarPair) -> Self {
        let mut s = Self::zero(trunc, vars);
        s.set(0, 1, GaussRational::one());
        s
    }

    /// `c * X^i Y^j`.
    pub fn monomial(trunc: usize, vars: VarPair, i: usize, j: usize, c: GaussRational) -> Self {
        let mut s = Self::zero(trunc, vars);
        s.set(i, j, c);
        s
    }

    /// Build from `(i, j, coeff)` triples, `i` the first-variable exponent.
    /// Later duplicates add onto earlier ones.
    pub fn from_terms(
        trunc: usize,
        vars: VarPair,
        terms: &[(usize, usize, GaussRational)],
    ) -> Self {
        let mut s = Self::zero(trunc, vars);
        for (i, j, c) in terms {
            assert!(i + j <= trunc, "term ({i},{j}) exceeds truncation {trunc}");
            let idx = tri_index(i + j, *j);
            let cur = &s.coeffs[idx] + c;
            s.coeffs[idx] = cur;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn vars(&self) -> VarPair {
        self.vars
    }

    /// Replace the diagnostic labels (used when changing coordinates).
    pub fn with_vars(mut self, vars: VarPair) -> Self {
        self.vars = vars;
        self
    }

    /// Coefficient of `X^i Y^j`; zero beyond the truncation.
    pub fn get(&self, i: usize, j: usize) -> &GaussRational {
        let d = i + j;
        if d > self.trunc {
            zero_ref()
        } else {
            &self.coeffs[tri_index(d, j)]
        }
    }

    /// Set the coefficient of `X^i Y^j` (must lie within the truncation).
    pub fn set(&mut self, i: usize, j: usize, c: GaussRational) {
        let d = i + j;
        assert!(
            d <= self.trunc,
            "({i},{j}) exceeds truncation {}",
            self.trunc
        );
        self.coeffs[tri_index(d, j)] = c;
    }

    /// Add `c` onto the coefficient of `X^i Y^j`.
    pub fn add_to(&mut self, i: usize, j: usize, c: &GaussRational) {
        let d = i + j;
        assert!(
            d <= self.trunc,
            "({i},{j}) exceeds truncation {}",
            self.trunc
        );
        let idx = tri_index(d, j);
        self.coeffs[idx] += c;
    }

    /// Iterate `(i, j, coeff)` over nonzero coefficients, ordered by
    /// `(total degree, second exponent)` ascending.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, &GaussRational)> {
        let trunc = self.trunc;
        self.coeffs.iter().enumerate().filter_map(move |(idx, c)| {
            if c.is_zero() {
                return None;
            }
            // Invert tri_index: find d with d(d+1)/2 <= idx.
            let mut d = 0usize;
            while tri_index(d + 1, 0) <= idx {
                d += 1;
            }
            let j = idx - tri_index(d, 0);
            debug_assert!(d <= trunc);
            Some((d - j, j, c))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest total degree with a nonzero coefficient, if any.
    pub fn min_total_degree(&self) -> Option<usize> {
        for d in 0..=self.trunc {
            for j in 0..=d {
                if !self.coeffs[tri_index(d, j)].is_zero() {
                    return Some(d);
                }
            }
        }
        None
    }

    pub fn constant_term(&self) -> &GaussRational {
        &self.coeffs[0]
    }

    /// Copy down to a smaller truncation.
    pub fn reduce_trunc(&self, n: usize) -> Self {
        assert!(
            n <= self.trunc,
            "cannot reduce truncation {} to {n}",
            self.trunc
        );
        Series2 {
            trunc: n,
            vars: self.vars,
            coeffs: self.coeffs[..tri_len(n)].to_vec(),
        }
    }

    /// Extend with zero coefficients above the current truncation.
    ///
    /// Only valid when the receiver is an exact polynomial (its omitted
    /// coefficients are genuinely zero), e.g. a linear map, a derivative of
    /// a polynomial, or a surface polynomial — never a truncated unknown
    /// series. The caller asserts that nothing was cut at the old order.
    pub fn extend_trunc(&self, n: usize) -> Self {
        assert!(n >= self.trunc);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(tri_len(n), GaussRational::zero());
        Series2 {
            trunc: n,
            vars: self.vars,
            coeffs,
        }
    }

    /// The homogeneous part of total degree `k`, as a series truncated at `k`.
    pub fn homogeneous_slice(&self, k: usize) -> Self {
        let mut s = Self::zero(k, self.vars);
        if k <= self.trunc {
            for j in 0..=k {
                s.coeffs[tri_index(k, j)] = self.coeffs[tri_index(k, j)].clone();
            }
        }
        s
    }

    /// Zero out every homogeneous part of total degree `> k`, keeping the
    /// truncation.
    pub fn zero_above_degree(&self, k: usize) -> Self {
        let mut s = self.clone();
        for d in (k + 1)..=self.trunc {
            for j in 0..=d {
                s.coeffs[tri_index(d, j)] = GaussRational::zero();
            }
        }
        s
    }

    fn binary_prep(&self, rhs: &Self) -> (usize, VarPair) {
        debug_assert_eq!(
            self.vars, rhs.vars,
            "mixing series in different variables: {:?} vs {:?}",
            self.vars, rhs.vars
        );
        (self.trunc.min(rhs.trunc), self.vars)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (n, vars) = self.binary_prep(rhs);
        let mut coeffs = Vec::with_capacity(tri_len(n));
        for idx in 0..tri_len(n) {
            coeffs.push(&self.coeffs[idx] + &rhs.coeffs[idx]);
        }
        Series2 {
            trunc: n,
            vars,
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let (n, vars) = self.binary_prep(rhs);
        let mut coeffs = Vec::with_capacity(tri_len(n));
        for idx in 0..tri_len(n) {
            coeffs.push(&self.coeffs[idx] - &rhs.coeffs[idx]);
        }
        Series2 {
            trunc: n,
            vars,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        Series2 {
            trunc: self.trunc,
            vars: self.vars,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc, self.vars);
        }
        Series2 {
            trunc: self.trunc,
            vars: self.vars,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact truncated product. Skips zero coefficients, which matters for
    /// the very sparse series this crate mostly multiplies.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (n, vars) = self.binary_prep(rhs);
        let mut out = Self::zero(n, vars);
        for (i1, j1, c1) in self.iter_nonzero() {
            let d1 = i1 + j1;
            if d1 > n {
                break;
            }
            for (i2, j2, c2) in rhs.iter_nonzero() {
                let d = d1 + i2 + j2;
                if d > n {
                    continue;
                }
                let idx = tri_index(d, j1 + j2);
                let prod = c1 * c2;
                out.coeffs[idx] += &prod;
            }
        }
        out
    }

    /// `self^k` in the quotient ring.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::monomial(self.trunc, self.vars, 0, 0, GaussRational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Generic substitution `f(a(X,Y), b(X,Y))` where `a` and `b` vanish at
    /// the origin (required for the quotient semantics to be exact).
    ///
    /// Double Horner scheme: `f = sum_i X^i h_i(Y)` is evaluated as a Horner
    /// run over `i` with inner Horner runs over the second variable.
    pub fn compose(&self, a: &Self, b: &Self) -> Self {
        assert!(
            a.constant_term().is_zero() && b.constant_term().is_zero(),
            "substitution targets must vanish at the origin"
        );
        debug_assert_eq!(a.vars, b.vars);
        let n = self.trunc.min(a.trunc).min(b.trunc);
        let a = a.reduce_trunc(n);
        let b = b.reduce_trunc(n);
        let vars = a.vars;

        // h_i(b) for descending i, folded into acc = acc * a + h_i(b).
        let mut acc = Series2::zero(n, vars);
        let imax = self.trunc.min(n);
        for i in (0..=imax).rev() {
            // inner = h_i(b) with h_i(Y) = sum_j coeff(i, j) Y^j, by Horner.
            let jmax = n - i.min(n);
            let mut inner = Series2::zero(n, vars);
            for j in (0..=jmax.min(self.trunc.saturating_sub(i))).rev() {
                inner = inner.mul(&b);
                let c = self.get(i, j);
                if !c.is_zero() {
                    inner.coeffs[0] += c;
                }
            }
            acc = acc.mul(&a);
            acc = acc.add(&inner);
        }
        acc
    }

    /// Linear substitution `X -> p*X + q*Y`, `Y -> r*X + s*Y` by per-term
    /// binomial expansion. Exact, degree-preserving, and much cheaper than
    /// `compose` for sparse inputs.
    pub fn compose_linear(
        &self,
        p: &GaussRational,
        q: &GaussRational,
        r: &GaussRational,
        s: &GaussRational,
    ) -> Self {
        let mut out = Self::zero(self.trunc, self.vars);
        for (i, j, c) in self.iter_nonzero() {
            // (p X + q Y)^i expanded over the second-variable exponent.
            let row1 = binomial_row(p, q, i);
            let row2 = binomial_row(r, s, j);
            let d = i + j;
            for (l1, c1) in row1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (l2, c2) in row2.iter().enumerate() {
                    if c2.is_zero() {
                        continue;
                    }
                    let term = &(c1 * c2) * c;
                    out.coeffs[tri_index(d, l1 + l2)] += &term;
                }
            }
        }
        out
    }

    /// Conjugate every coefficient.
    pub fn conj_coeffs(&self) -> Self {
        Series2 {
            trunc: self.trunc,
            vars: self.vars,
            coeffs: self.coeffs.iter().map(GaussRational::conj).collect(),
        }
    }

    /// Substitute `X -> sx * X`, `Y -> sy * Y` with `sx, sy` in `{1, -1}`.
    pub fn substitute_signs(&self, sx: i32, sy: i32) -> Self {
        assert!(sx == 1 || sx == -1);
        assert!(sy == 1 || sy == -1);
        let mut out = self.clone();
        for d in 0..=self.trunc {
            for j in 0..=d {
                let flip = (sx == -1 && (d - j) % 2 == 1) ^ (sy == -1 && j % 2 == 1);
                if flip {
                    let idx = tri_index(d, j);
                    out.coeffs[idx] = -&out.coeffs[idx];
                }
            }
        }
        out
    }

    /// Partial derivative with respect to the first variable. The truncation
    /// drops by one: differentiating a series known modulo degree `N+1`
    /// yields one known modulo degree `N`.
    pub fn d_first(&self) -> Self {
        let n = self.trunc.saturating_sub(1);
        let mut out = Self::zero(n, self.vars);
        for (i, j, c) in self.iter_nonzero() {
            if i == 0 || i + j - 1 > n {
                continue;
            }
            let factor = GaussRational::from_int(i as i64);
            out.coeffs[tri_index(i + j - 1, j)] = &factor * c;
        }
        out
    }

    /// Partial derivative with respect to the second variable.
    pub fn d_second(&self) -> Self {
        let n = self.trunc.saturating_sub(1);
        let mut out = Self::zero(n, self.vars);
        for (i, j, c) in self.iter_nonzero() {
            if j == 0 || i + j - 1 > n {
                continue;
            }
            let factor = GaussRational::from_int(j as i64);
            out.coeffs[tri_index(i + j - 1, j - 1)] = &factor * c;
        }
        out
    }

    /// Whether every nonzero term has first-variable exponent `>= 1`.
    pub fn divisible_by_first_var(&self) -> bool {
        self.iter_nonzero().all(|(i, _, _)| i >= 1)
    }

    /// Exact division by the linear form `a*X + b*Y`. Fails with
    /// `Indivisible` when the form does not divide. The quotient is known
    /// one degree lower than the dividend.
    pub fn divide_by_linear_form(&self, a: &GaussRational, b: &GaussRational) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.constant_term().is_zero() {
            return Err(Error::Indivisible(
                "nonzero constant term cannot be divided by a linear form".into(),
            ));
        }
        let n = self.trunc.saturating_sub(1);
        let mut out = Self::zero(n, self.vars);
        for d in 1..=self.trunc {
            // Solve slice_d(f) = (a X + b Y) * slice_{d-1}(g) coefficient-wise.
            let gd = d - 1;
            if a.is_zero() {
                // b*Y only: f[d][j] = b * g[d-1][j-1]; f[d][0] must vanish.
                if !self.coeffs[tri_index(d, 0)].is_zero() {
                    return Err(Error::Indivisible(format!(
                        "degree-{d} slice has a pure first-variable term but the divisor has no first-variable part"
                    )));
                }
                for j in 1..=d {
                    let g = self.coeffs[tri_index(d, j)].checked_div(b)?;
                    if gd <= n {
                        out.coeffs[tri_index(gd, j - 1)] = g;
                    }
                }
            } else {
                // f[d][j] = a * g[j] + b * g[j-1]  for j = 0..d-1,
                // remainder condition: f[d][d] = b * g[d-1].
                let mut prev = GaussRational::zero();
                for j in 0..d {
                    let rhs = &self.coeffs[tri_index(d, j)] - &(b * &prev);
                    let g = rhs.checked_div(a)?;
                    if gd <= n {
                        out.coeffs[tri_index(gd, j)] = g.clone();
                    }
                    prev = g;
                }
                let expected_top = b * &prev;
                if self.coeffs[tri_index(d, d)] != expected_top {
                    return Err(Error::Indivisible(format!(
                        "degree-{d} slice leaves a nonzero remainder under division by the linear form"
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Restrict to the axis `Y = 0`: coefficient list of `X^0..X^trunc`.
    pub fn restrict_second_zero(&self) -> Vec<GaussRational> {
        (0..=self.trunc)
            .map(|d| self.coeffs[tri_index(d, 0)].clone())
            .collect()
    }

    /// Largest bit size among all coefficient numerators/denominators
    /// (profiling aid).
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(GaussRational::bit_size)
            .max()
            .unwrap_or(0)
    }

    // --- serialization ---

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut terms: Vec<TermRepr> = self
            .iter_nonzero()
            .map(|(i, j, c)| TermRepr { c: c.clone(), i, j })
            .collect();
        // Canonical term order: by total degree, then first exponent.
        terms.sort_by_key(|t| (t.i + t.j, t.i));
        serde_json::to_value(SeriesRepr {
            terms,
            trunc: self.trunc,
        })
        .expect("series to json")
    }

    pub fn from_json_value(v: &serde_json::Value, vars: VarPair) -> Result<Self> {
        let repr: SeriesRepr = serde_json::from_value(v.clone())?;
        let mut s = Self::zero(repr.trunc, vars);
        for t in &repr.terms {
            if t.i + t.j > repr.trunc {
                return Err(Error::invalid(format!(
                    "term ({}, {}) exceeds truncation {}",
                    t.i, t.j, repr.trunc
                )));
            }
            s.set(t.i, t.j, t.c.clone());
        }
        Ok(s)
    }
}

/// Expansion row of `(u*X + v*Y)^k` indexed by the `Y` exponent:
/// entry `l` is `C(k, l) u^(k-l) v^l`.
fn binomial_row(u: &GaussRational, v: &GaussRational, k: usize) -> Vec<GaussRational> {
    let mut row = Vec::with_capacity(k + 1);
    // Powers built incrementally to avoid repeated exponentiation.
    let mut u_pows = vec![GaussRational::one()];
    let mut v_pows = vec![GaussRational::one()];
    for p in 1..=k {
        let nu = &u_pows[p - 1] * u;
        u_pows.push(nu);
        let nv = &v_pows[p - 1] * v;
        v_pows.push(nv);
    }
    for l in 0..=k {
        let b = GaussRational::from_rational(BigRational::from_integer(binomial(k, l)));
        row.push(&(&b * &u_pows[k - l]) * &v_pows[l]);
    }
    row
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: GaussRational,
    i: usize,
    j: usize,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    terms: Vec<TermRepr>,
    trunc: usize,
}

impl fmt::Debug for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (vx, vy) = self.vars;
        let mut first = true;
        for (i, j, c) in self.iter_nonzero() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "*{vx}^{i}")?;
            }
            if j > 0 {
                write!(f, "*{vy}^{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "  [mod deg {}]", self.trunc + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> GaussRational {
        GaussRational::from_int(n)
    }

    #[test]
    fn triangular_layout_round_trips() {
        let mut s = Series2::zero(5, VARS_XY);
        s.set(2, 3, c(7));
        s.set(0, 0, c(1));
        s.set(5, 0, c(-2));
        assert_eq!(s.get(2, 3), &c(7));
        assert_eq!(s.get(0, 0), &c(1));
        assert_eq!(s.get(5, 0), &c(-2));
        assert_eq!(s.get(1, 1), &GaussRational::zero());
        // Beyond truncation reads as zero.
        assert_eq!(s.get(4, 4), &GaussRational::zero());
        let nz: Vec<_> = s.iter_nonzero().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(nz, vec![(0, 0), (5, 0), (2, 3)]);
    }

    #[test]
    fn square_of_binomial() {
        let x = Series2::var_first(4, VARS_XY);
        let y = Series2::var_second(4, VARS_XY);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.get(2, 0), &c(1));
        assert_eq!(sq.get(1, 1), &c(2));
        assert_eq!(sq.get(0, 2), &c(1));
        assert_eq!(sq.get(0, 0), &GaussRational::zero());
    }

    #[test]
    fn products_reduce_to_smaller_truncation() {
        let a = Series2::var_first(8, VARS_XY);
        let b = Series2::var_second(3, VARS_XY);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 3);
        assert_eq!(p.get(1, 1), &c(1));
    }

    #[test]
    fn compose_with_shear_map() {
        // f = x*y composed with (x, 4x + y) gives 4x^2 + xy.
        let f = Series2::monomial(4, VARS_XY, 1, 1, c(1));
        let a = Series2::var_first(4, VARS_XY);
        let b = {
            let mut s = Series2::var_second(4, VARS_XY);
            s.set(1, 0, c(4));
            s
        };
        let g = f.compose(&a, &b);
        assert_eq!(g.get(2, 0), &c(4));
        assert_eq!(g.get(1, 1), &c(1));
        assert_eq!(g.get(0, 2), &GaussRational::zero());
    }

    #[test]
    fn compose_linear_agrees_with_generic_compose() {
        let mut f = Series2::zero(6, VARS_XY);
        f.set(3, 2, GaussRational::from_ratio(1, 3));
        f.set(1, 4, GaussRational::i());
        f.set(2, 0, c(-5));
        let (p, q, r, s) = (c(-1), c(2), c(3), GaussRational::from_ratio(-1, 2));
        let via_linear = f.compose_linear(&p, &q, &r, &s);
        let a = {
            let mut t = Series2::zero(6, VARS_XY);
            t.set(1, 0, p.clone());
            t.set(0, 1, q.clone());
            t
        };
        let b = {
            let mut t = Series2::zero(6, VARS_XY);
            t.set(1, 0, r.clone());
            t.set(0, 1, s.clone());
            t
        };
        assert_eq!(via_linear, f.compose(&a, &b));
    }

    #[test]
    fn exact_division_by_linear_form() {
        // (2X + 2Y) * (X^2 - XY + 3Y^2) recovered by division.
        let g = Series2::from_terms(5, VARS_ZW, &[(2, 0, c(1)), (1, 1, c(-1)), (0, 2, c(3))]);
        let form = Series2::from_terms(5, VARS_ZW, &[(1, 0, c(2)), (0, 1, c(2))]);
        let f = form.mul(&g);
        let back = f.divide_by_linear_form(&c(2), &c(2)).unwrap();
        assert_eq!(back, g.reduce_trunc(4));
    }

    #[test]
    fn inexact_division_is_reported() {
        // X^2 + Y^2 is not divisible by X + Y.
        let f = Series2::from_terms(3, VARS_XY, &[(2, 0, c(1)), (0, 2, c(1))]);
        let err = f.divide_by_linear_form(&c(1), &c(1)).unwrap_err();
        assert!(matches!(err, Error::Indivisible(_)));
    }

    #[test]
    fn division_by_pure_first_variable() {
        // (X) * (X + Y^2) recovered; also checks the divisibility predicate.
        let g = Series2::from_terms(4, VARS_XY, &[(1, 0, c(1)), (0, 2, c(1))]);
        let x = Series2::var_first(4, VARS_XY);
        let f = x.mul(&g);
        assert!(f.divisible_by_first_var());
        let back = f.divide_by_linear_form(&c(1), &c(0)).unwrap();
        assert_eq!(back, g.reduce_trunc(3));
    }

    #[test]
    fn derivatives_drop_truncation() {
        let f = Series2::from_terms(4, VARS_ZW, &[(2, 2, c(6)), (0, 3, c(1))]);
        let fz = f.d_first();
        assert_eq!(fz.trunc(), 3);
        assert_eq!(fz.get(1, 2), &c(12));
        let fw = f.d_second();
        assert_eq!(fw.get(2, 1), &c(12));
        assert_eq!(fw.get(0, 2), &c(3));
    }

    #[test]
    fn sign_substitution_and_conjugation() {
        let mut f = Series2::zero(3, VARS_XY);
        f.set(1, 1, GaussRational::i());
        f.set(0, 2, c(3));
        let g = f.conj_coeffs().substitute_signs(1, -1);
        // i*x*y -> conj(i) * x * (-y) = i*x*y ; 3 y^2 -> 3 y^2.
        assert_eq!(g.get(1, 1), &GaussRational::i());
        assert_eq!(g.get(0, 2), &c(3));
    }

    #[test]
    fn slices_and_degree_filters() {
        let f = Series2::from_terms(5, VARS_XY, &[(1, 1, c(2)), (3, 1, c(5)), (0, 5, c(1))]);
        assert_eq!(f.min_total_degree(), Some(2));
        let s4 = f.homogeneous_slice(4);
        assert_eq!(s4.trunc(), 4);
        assert_eq!(s4.get(3, 1), &c(5));
        assert!(s4.get(1, 1).is_zero());
        let low = f.zero_above_degree(3);
        assert_eq!(low.get(1, 1), &c(2));
        assert!(low.get(3, 1).is_zero());
        assert!(low.get(0, 5).is_zero());
    }

    #[test]
    fn json_round_trip_and_term_ordering() {
        let mut f = Series2::zero(4, VARS_XY);
        f.set(0, 3, GaussRational::from_ratio(1, 2));
        f.set(2, 0, c(-1));
        f.set(1, 1, GaussRational::i());
        let v = f.to_json_value();
        let terms = v.get("terms").unwrap().as_array().unwrap();
        // Sorted by (total degree, first exponent): (1,1), (2,0), (0,3).
        let order: Vec<(u64, u64)> = terms
            .iter()
            .map(|t| (t["i"].as_u64().unwrap(), t["j"].as_u64().unwrap()))
            .collect();
        assert_eq!(order, vec![(1, 1), (2, 0), (0, 3)]);
        assert_eq!(v["trunc"], serde_json::json!(4));
        let back = Series2::from_json_value(&v, VARS_XY).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_rejects_terms_beyond_truncation() {
        let v = serde_json::json!({
            "trunc": 2,
            "terms": [{"c": {"re": ["1","1"], "im": ["0","1"]}, "i": 2, "j": 1}]
        });
        assert!(Series2::from_json_value(&v, VARS_XY).is_err());
    }

    #[test]
    fn restriction_to_first_axis() {
        let f = Series2::from_terms(3, VARS_XY, &[(2, 0, c(7)), (1, 1, c(5)), (3, 0, c(-1))]);
        let row = f.restrict_second_zero();
        assert_eq!(row, vec![c(0), c(0), c(7), c(-1)]);
    }
}

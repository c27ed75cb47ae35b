//! Germs of formal maps `(Q(i)^2, 0) -> (Q(i)^2, 0)`: composition,
//! inversion, implicit solving, and the two-point divided difference that
//! drives the involution construction.

use crate::error::{Error, Result};
use crate::scalar::GaussRational;
use crate::series::{Series2, VarPair};

/// A formal map germ fixing the origin, stored as two truncated series with
/// matching truncation and variable labels.
#[derive(Clone, PartialEq, Eq)]
pub struct MapGerm {
    comp1: Series2,
    comp2: Series2,
}

impl MapGerm {
    pub fn new(comp1: Series2, comp2: Series2) -> Self {
        assert_eq!(comp1.trunc(), comp2.trunc(), "component truncations differ");
        assert!(
            comp1.constant_term().is_zero() && comp2.constant_term().is_zero(),
            "map germ must fix the origin"
        );
        MapGerm { comp1, comp2 }
    }

    pub fn identity(trunc: usize, vars: VarPair) -> Self {
        MapGerm::new(
            Series2::var_first(trunc, vars),
            Series2::var_second(trunc, vars),
        )
    }

    /// The linear map `(p X + q Y, r X + s Y)`.
    pub fn linear(
        trunc: usize,
        vars: VarPair,
        p: GaussRational,
        q: GaussRational,
        r: GaussRational,
        s: GaussRational,
    ) -> Self {
        let mut c1 = Series2::zero(trunc, vars);
        c1.set(1, 0, p);
        c1.set(0, 1, q);
        let mut c2 = Series2::zero(trunc, vars);
        c2.set(1, 0, r);
        c2.set(0, 1, s);
        MapGerm::new(c1, c2)
    }

    pub fn comp1(&self) -> &Series2 {
        &self.comp1
    }

    pub fn comp2(&self) -> &Series2 {
        &self.comp2
    }

    pub fn trunc(&self) -> usize {
        self.comp1.trunc()
    }

    pub fn vars(&self) -> VarPair {
        self.comp1.vars()
    }

    pub fn reduce_trunc(&self, n: usize) -> Self {
        MapGerm {
            comp1: self.comp1.reduce_trunc(n),
            comp2: self.comp2.reduce_trunc(n),
        }
    }

    /// The 2x2 matrix of the linear part, row-major:
    /// `[[d comp1/dX, d comp1/dY], [d comp2/dX, d comp2/dY]]` at the origin.
    pub fn linear_part(&self) -> [[GaussRational; 2]; 2] {
        [
            [self.comp1.get(1, 0).clone(), self.comp1.get(0, 1).clone()],
            [self.comp2.get(1, 0).clone(), self.comp2.get(0, 1).clone()],
        ]
    }

    /// True when every nonzero term of both components has total degree 1.
    pub fn is_linear(&self) -> bool {
        self.comp1.min_total_degree().is_none_or(|d| d >= 1)
            && self.comp2.min_total_degree().is_none_or(|d| d >= 1)
            && self.comp1.iter_nonzero().all(|(i, j, _)| i + j == 1)
            && self.comp2.iter_nonzero().all(|(i, j, _)| i + j == 1)
    }

    /// Substitute this germ into a series: returns `f(comp1, comp2)`,
    /// i.e. `f` composed on the right with this map. Dispatches to the
    /// cheap per-term expansion when the map is linear.
    pub fn substitute_into(&self, f: &Series2) -> Series2 {
        if self.is_linear() {
            f.compose_linear(
                self.comp1.get(1, 0),
                self.comp1.get(0, 1),
                self.comp2.get(1, 0),
                self.comp2.get(0, 1),
            )
            .reduce_trunc(f.trunc().min(self.trunc()))
            .with_vars(self.vars())
        } else {
            f.compose(&self.comp1, &self.comp2)
        }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.trunc();
        self.comp1 == Series2::var_first(n, self.vars())
            && self.comp2 == Series2::var_second(n, self.vars())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "comp1": self.comp1.to_json_value(),
            "comp2": self.comp2.to_json_value(),
        })
    }
}

/// `outer` after `inner`: the germ `p -> outer(inner(p))`.
pub fn map_compose(outer: &MapGerm, inner: &MapGerm) -> MapGerm {
    MapGerm::new(
        inner.substitute_into(outer.comp1()),
        inner.substitute_into(outer.comp2()),
    )
}

/// Compositional inverse of `m` to its truncation, by the contraction
/// `g <- L^{-1} o (id - h o g)` where `m = L + h` splits off the linear
/// part. Verifies `m o g = g o m = id` exactly before returning.
pub fn map_inverse(m: &MapGerm) -> Result<MapGerm> {
    let n = m.trunc();
    let vars = m.vars();
    let lp = m.linear_part();
    let det = &(&lp[0][0] * &lp[1][1]) - &(&lp[0][1] * &lp[1][0]);
    if det.is_zero() {
        return Err(Error::invalid(
            "map germ has singular linear part; no inverse".to_string(),
        ));
    }
    let det_inv = det.inv()?;
    // Inverse of the linear part.
    let li = [
        [&lp[1][1] * &det_inv, -&(&lp[0][1] * &det_inv)],
        [-&(&lp[1][0] * &det_inv), &lp[0][0] * &det_inv],
    ];
    let linear = MapGerm::linear(
        n,
        vars,
        lp[0][0].clone(),
        lp[0][1].clone(),
        lp[1][0].clone(),
        lp[1][1].clone(),
    );
    let h1 = m.comp1.sub(linear.comp1());
    let h2 = m.comp2.sub(linear.comp2());
    let apply_li = |a: &Series2, b: &Series2| -> MapGerm {
        MapGerm::new(
            a.scale(&li[0][0]).add(&b.scale(&li[0][1])),
            a.scale(&li[1][0]).add(&b.scale(&li[1][1])),
        )
    };

    let id = MapGerm::identity(n, vars);
    let mut g = apply_li(id.comp1(), id.comp2());
    let mut stabilized = false;
    for _ in 0..=n {
        let hg1 = g.substitute_into(&h1);
        let hg2 = g.substitute_into(&h2);
        let next = apply_li(&id.comp1().sub(&hg1), &id.comp2().sub(&hg2));
        if next == g {
            stabilized = true;
            break;
        }
        g = next;
    }
    if !stabilized {
        return Err(Error::internal(
            "inverse iteration did not stabilize within the degree bound",
        ));
    }
    if !map_compose(m, &g).is_identity() || !map_compose(&g, m).is_identity() {
        return Err(Error::internal(
            "inverse verification failed: composition is not the identity",
        ));
    }
    Ok(g)
}

/// Solve the scalar implicit equation `u = linear + rhs(u)` by degree-wise
/// fixed-point iteration, where `rhs` raises the valuation (each iteration
/// determines at least one more homogeneous degree). At most `trunc + 1`
/// iterations are attempted; one extra application must leave the solution
/// unchanged, otherwise the equation is rejected as non-stabilizing.
pub fn implicit_solve<F>(linear: &Series2, rhs: F) -> Result<Series2>
where
    F: Fn(&Series2) -> Result<Series2>,
{
    let n = linear.trunc();
    let mut cur = linear.clone();
    for _ in 0..=n {
        let next = linear.add(&rhs(&cur)?);
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    // One extra check beyond the degree bound: must already be stable.
    let next = linear.add(&rhs(&cur)?);
    if next == cur {
        Ok(cur)
    } else {
        Err(Error::internal(
            "implicit equation did not stabilize within the degree bound",
        ))
    }
}

/// Two-point divided difference in the first slot:
/// for `f(S, W) = sum_k S^k h_k(W)` returns
/// `sum_k h_k(W) * sum_{l=0}^{k-1} a^l b^(k-1-l)`,
/// so that `f(a, W) - f(b, W) = (a - b) * divided_difference(f, a, b)`.
///
/// That defining identity is re-checked by explicit substitution before the
/// result is returned; a mismatch is an internal error (the identity holds
/// for every `f`, `a`, `b`, so failure means a series bug, not bad input).
pub fn divided_difference(f: &Series2, a: &Series2, b: &Series2) -> Result<Series2> {
    debug_assert_eq!(a.vars(), b.vars());
    assert!(
        a.constant_term().is_zero() && b.constant_term().is_zero(),
        "divided difference requires substitution targets vanishing at the origin"
    );
    let n = f.trunc().min(a.trunc()).min(b.trunc());
    let a = a.reduce_trunc(n);
    let b = b.reduce_trunc(n);
    let vars = a.vars();

    let mut out = Series2::zero(n, vars);
    // P_k = sum_{l<k} a^l b^(k-1-l), built incrementally: P_{k+1} = a P_k + b^k.
    let mut p = Series2::monomial(n, vars, 0, 0, GaussRational::one());
    let mut b_pow = Series2::monomial(n, vars, 0, 0, GaussRational::one());
    for k in 1..=f.trunc() {
        if k > 1 {
            b_pow = b_pow.mul(&b);
            p = a.mul(&p).add(&b_pow);
        }
        // h_k(W) lifted into the target variables as a pure second-variable series.
        let mut hk = Series2::zero(n, vars);
        let mut hk_zero = true;
        for j in 0..=(f.trunc() - k) {
            let c = f.get(k, j);
            if !c.is_zero() && j <= n {
                hk.set(0, j, c.clone());
                hk_zero = false;
            }
        }
        if !hk_zero {
            out = out.add(&hk.mul(&p));
        }
    }

    // Defining identity: f(a, W) - f(b, W) = (a - b) * out.
    let w = Series2::var_second(n, vars);
    let fa = f.compose(&a, &w);
    let fb = f.compose(&b, &w);
    let lhs = fa.sub(&fb);
    let rhs = a.sub(&b).mul(&out);
    if lhs != rhs {
        return Err(Error::internal(
            "divided difference re-multiplication mismatch: (a-b)*D != f(a,.) - f(b,.)",
        ));
    }
    Ok(out)
}

impl std::fmt::Debug for MapGerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MapGerm[{} ; {}]", self.comp1, self.comp2)
    }
}

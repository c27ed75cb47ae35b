//! The normalized linearizing transformation: the unique formal change of
//! coordinates `Phi = id + (u, v)`, tangent to the identity, conjugating a
//! certified involution pair to its linear model, subject to one
//! normalization per homogeneous degree.
//!
//! Degree `k` of `(u, v)` is found by solving an exact overdetermined linear
//! system: four equation blocks (two involutions times two components) plus
//! normalization rows that kill the one-dimensional kernel of the
//! conjugacy conditions. Uniqueness at every degree is part of the
//! certified result — anything other than a unique solution is an internal
//! error.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::germ::{map_compose, MapGerm};
use crate::involution::{model_tau1_linear, model_tau2_linear, pair_from_surface, InvolutionPair};
use crate::linsolve::{LinearSystem, SolveOutcome};
use crate::scalar::{binomial, GaussRational};
use crate::series::{Series2, VARS_XY};
use crate::surface::{generator_by_degree, metric_within, Surface};

/// The transform `Phi = (x + u, y + v)` with the per-degree normalizations
/// applied, exact through total degree `trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTransform {
    u: Series2,
    v: Series2,
    /// First degree at which the conjugacy is *not* certified: always
    /// `trunc + 1` on success.
    residual_degree: usize,
}

impl NormalizedTransform {
    pub fn u(&self) -> &Series2 {
        &self.u
    }

    pub fn v(&self) -> &Series2 {
        &self.v
    }

    pub fn trunc(&self) -> usize {
        self.u.trunc()
    }

    pub fn residual_degree(&self) -> usize {
        self.residual_degree
    }

    /// The transform as a germ `(x + u, y + v)`.
    pub fn phi_germ(&self) -> MapGerm {
        let n = self.trunc();
        MapGerm::new(
            Series2::var_first(n, VARS_XY).add(&self.u),
            Series2::var_second(n, VARS_XY).add(&self.v),
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "u": self.u.to_json_value(),
            "v": self.v.to_json_value(),
            "residual_degree": self.residual_degree,
        })
    }
}

/// Coefficient of `x^(k-l) y^l` in `(x^(k-m) y^m) o (-x, gamma*x + y)`:
/// `(-1)^(k-m) C(m, l) gamma^(m-l)` for `l <= m`, else zero.
fn reflection_substitution_coeff(k: usize, m: usize, l: usize, gamma: i64) -> GaussRational {
    if l > m {
        return GaussRational::zero();
    }
    let mut g = GaussRational::one();
    for _ in 0..(m - l) {
        g = &g * &GaussRational::from_int(gamma);
    }
    let b = GaussRational::from_rational(BigRational::from_integer(binomial(m, l)));
    let sign = if (k - m).is_multiple_of(2) {
        GaussRational::one()
    } else {
        GaussRational::from_int(-1)
    };
    &(&sign * &b) * &g
}

/// Append the degree-`k` conjugacy equations (and optionally the
/// normalization rows) to `sys`. Unknown layout: columns `0..=k` are the
/// coefficients `u_l` of `x^(k-l) y^l`, columns `k+1..=2k+1` are `v_l`.
/// The `rhs` slices are the degree-`k` obstructions `E` per block.
fn push_degree_system(
    sys: &mut LinearSystem,
    k: usize,
    e11: &Series2,
    e12: &Series2,
    e21: &Series2,
    e22: &Series2,
    with_normalization: bool,
) {
    let w = 2 * (k + 1);
    debug_assert_eq!(sys.ncols(), w);
    let rhs_at = |e: &Series2, l: usize| -> GaussRational { -e.get(k - l, l) };

    for (gamma, u_diag, e1, e2) in [(-2i64, 2i64, e11, e12), (2i64, -2i64, e21, e22)] {
        // Component 1: (u o tau*) + u = -E^1.
        for l in 0..=k {
            let mut row = vec![GaussRational::zero(); w];
            for (m, cell) in row.iter_mut().enumerate().take(k + 1).skip(l) {
                *cell = reflection_substitution_coeff(k, m, l, gamma);
            }
            row[l] = &row[l] + &GaussRational::one();
            sys.push_row(row, rhs_at(e1, l));
        }
        // Component 2: (v o tau*) - v + u_diag * u = -E^2.
        for l in 0..=k {
            let mut row = vec![GaussRational::zero(); w];
            for m in l..=k {
                row[k + 1 + m] = reflection_substitution_coeff(k, m, l, gamma);
            }
            row[k + 1 + l] = &row[k + 1 + l] - &GaussRational::one();
            row[l] = GaussRational::from_int(u_diag);
            sys.push_row(row, rhs_at(e2, l));
        }
    }

    if with_normalization {
        // Always: the pure second-variable coefficient of u vanishes.
        let mut row = vec![GaussRational::zero(); w];
        row[k] = GaussRational::one();
        sys.push_row(row, GaussRational::zero());
        // Parity-dependent: kill the remaining kernel direction.
        let mut row = vec![GaussRational::zero(); w];
        if k % 2 == 1 {
            row[0] = GaussRational::one(); // u's pure first-variable coefficient
        } else {
            row[k + 1] = GaussRational::one(); // v's pure first-variable coefficient
        }
        sys.push_row(row, GaussRational::zero());
    }
}

/// Solve for the normalized transform of a certified pair through total
/// degree `n <= pair.trunc()`.
pub fn normalize_pair(pair: &InvolutionPair, n: usize) -> Result<NormalizedTransform> {
    assert!(
        n <= pair.trunc(),
        "transform degree exceeds the pair's truncation"
    );
    let mut u = Series2::zero(n, VARS_XY);
    let mut v = Series2::zero(n, VARS_XY);

    for k in 2..=n {
        // Current partial transform, reduced to degree k for the compose.
        let phi_k = MapGerm::new(
            Series2::var_first(k, VARS_XY).add(&u.reduce_trunc(k)),
            Series2::var_second(k, VARS_XY).add(&v.reduce_trunc(k)),
        );
        let mut slices = Vec::with_capacity(4);
        for (tau, model) in [
            (pair.tau1().reduce_trunc(k), model_tau1_linear(k)),
            (pair.tau2().reduce_trunc(k), model_tau2_linear(k)),
        ] {
            let left = map_compose(&phi_k, &tau);
            let right = map_compose(&model, &phi_k);
            for (lc, rc) in [(left.comp1(), right.comp1()), (left.comp2(), right.comp2())] {
                let diff = lc.sub(rc);
                if let Some(d) = diff.min_total_degree() {
                    if d < k {
                        return Err(Error::internal(format!(
                            "conjugacy residual below the active degree: found degree {d} while solving degree {k}"
                        )));
                    }
                }
                slices.push(diff.homogeneous_slice(k));
            }
        }

        let mut sys = LinearSystem::new(2 * (k + 1));
        push_degree_system(
            &mut sys, k, &slices[0], &slices[1], &slices[2], &slices[3], true,
        );
        match sys.solve()? {
            SolveOutcome::Unique(sol) => {
                for l in 0..=k {
                    u.set(k - l, l, sol[l].clone());
                    v.set(k - l, l, sol[k + 1 + l].clone());
                }
            }
            SolveOutcome::Inconsistent => {
                return Err(Error::internal(format!(
                    "conjugacy equations inconsistent at degree {k}"
                )));
            }
            SolveOutcome::Underdetermined { rank } => {
                return Err(Error::internal(format!(
                    "normalization failed to pin a unique solution at degree {k} (rank {rank})"
                )));
            }
        }
    }

    // Certify the whole conjugacy by explicit substitution.
    let phi = MapGerm::new(
        Series2::var_first(n, VARS_XY).add(&u),
        Series2::var_second(n, VARS_XY).add(&v),
    );
    for (tau, model) in [
        (pair.tau1().reduce_trunc(n), model_tau1_linear(n)),
        (pair.tau2().reduce_trunc(n), model_tau2_linear(n)),
    ] {
        if map_compose(&phi, &tau) != map_compose(&model, &phi) {
            return Err(Error::internal(
                "final conjugacy verification failed after the degree sweep",
            ));
        }
    }

    Ok(NormalizedTransform {
        u,
        v,
        residual_degree: n + 1,
    })
}

/// The homogeneous linearized solution operator: for a surface concentrated
/// in one total degree `m`, the transform is concentrated (through degree
/// `m - 2`) in its lowest slice, which this returns as `(u, v)` slices of
/// degree `m - 2`. Requires `n >= m - 2`.
pub fn homogeneous_l(r_k: &Surface, n: usize) -> Result<(Series2, Series2)> {
    let m = r_k
        .homogeneous_degree()
        .ok_or_else(|| Error::invalid("surface is zero or not homogeneous".to_string()))?;
    if m < 4 {
        return Err(Error::invalid(format!(
            "homogeneous degree {m} below the surface window"
        )));
    }
    let slice = m - 2;
    if n < slice {
        return Err(Error::invalid(format!(
            "transform degree {n} cannot reach the lowest slice {slice}"
        )));
    }
    let pair = pair_from_surface(r_k, n)?;
    let nt = normalize_pair(&pair, n)?;
    Ok((nt.u.homogeneous_slice(slice), nt.v.homogeneous_slice(slice)))
}

/// Triangularity audit: for each transform degree `k <= n`, zeroing all
/// surface degrees above `k + 2` must leave the degree-`k` slice of the
/// transform bit-identical. Returns the degrees where that fails (expected
/// empty).
pub fn triangularity_gaps(surface: &Surface, n: usize) -> Result<Vec<usize>> {
    let full = normalize_pair(&pair_from_surface(surface, n)?, n)?;
    let mut gaps = Vec::new();
    for k in 2..=n {
        let cut = surface.truncate_to((k + 2).min(surface.trunc()));
        let nt = normalize_pair(&pair_from_surface(&cut, n)?, n)?;
        if nt.u.homogeneous_slice(k) != full.u.homogeneous_slice(k)
            || nt.v.homogeneous_slice(k) != full.v.homogeneous_slice(k)
        {
            gaps.push(k);
        }
    }
    Ok(gaps)
}

/// Staged coefficient-growth search. Stage `k` (1-indexed) works at surface
/// degree `degrees[k-1] = m`: among the current surface and the current
/// surface plus the degree-`m` generator, it keeps the first candidate
/// whose degree-`(m-2)` transform slice reaches size `k / 2` in the
/// degree-root gauge `max |c|^(1/(m-2))` (the unperturbed candidate is
/// preferred on ties). If neither reaches the threshold the search fails,
/// naming the degree.
///
/// The result stays within distance `epsilon` of the base surface in the
/// coefficient-root metric; that containment is re-checked exactly.
pub fn perturb_to_large_coeffs(base: &Surface, degrees: &[usize]) -> Result<Surface> {
    let mut cur = base.clone();
    for (stage, &m) in degrees.iter().enumerate() {
        let k = stage + 1;
        if m < 5 {
            return Err(Error::invalid(format!(
                "stage degree {m} too small: the generator family starts at degree 5"
            )));
        }
        let threshold = BigRational::new((k as i64).into(), 2.into());
        let slice = m - 2;

        let candidates = [
            cur.clone(),
            cur.add(&generator_by_degree(m, cur.epsilon()))?,
        ];
        let mut chosen = None;
        for cand in candidates {
            let probe = cand.truncate_to(m);
            let pair = pair_from_surface(&probe, slice)?;
            let nt = normalize_pair(&pair, slice)?;
            if slice_reaches_threshold(&nt, slice, &threshold) {
                chosen = Some(cand);
                break;
            }
        }
        match chosen {
            Some(next) => cur = next,
            None => {
                return Err(Error::ThresholdUnachievable {
                    degree: m,
                    threshold: threshold.to_string(),
                })
            }
        }
    }
    // Each stage adds at most one generator of distinct degree m, whose
    // cells have modulus eps^m <= eps^5, so the result must stay within
    // distance eps of the base.
    if !metric_within(base, &cur, base.epsilon()) {
        return Err(Error::internal(
            "perturbed surface left the allowed metric ball around the base",
        ));
    }
    Ok(cur)
}

/// `true` when some coefficient `c` of the degree-`slice` parts of `(u, v)`
/// satisfies `|c|^(1/slice) >= t`, decided exactly via
/// `|c|^2 >= t^(2*slice)`.
fn slice_reaches_threshold(nt: &NormalizedTransform, slice: usize, t: &BigRational) -> bool {
    let mut bound = BigRational::from_integer(1.into());
    for _ in 0..(2 * slice) {
        bound *= t;
    }
    let hit = |s: &Series2| {
        s.homogeneous_slice(slice)
            .iter_nonzero()
            .any(|(_, _, c)| c.magnitude_sq() >= bound)
    };
    hit(&nt.u) || hit(&nt.v)
}

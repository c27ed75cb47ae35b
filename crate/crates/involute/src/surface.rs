//! Real-analytic surface data: the higher-order part of a parabolic real
//! surface germ, stored as exact coefficients `r_ij` of `z^i zbar^j`.
//!
//! A surface instance carries three structural constraints, checked by
//! [`Surface::validate`] rather than enforced at construction so that bad
//! input can be *reported* instead of merely rejected:
//!
//! 1. degree range: only total degrees `4..=trunc` may carry terms;
//! 2. reality: `r_ji = conj(r_ij)` (the defining function is real-valued);
//! 3. one linear condition per degree slice, `sum_{i+j=m} i*j*r_ij*(-1)^(j-1) = 0`,
//!    which expresses tangency to the reference fibration through the slice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{pair_to_rational, rational_pair, root_of_magnitude, GaussRational};
use crate::series::{Series2, VarPair};

/// Exact surface coefficients with a degree bound and a recorded scale
/// parameter `epsilon` (used by the generator families; `1` by default).
#[derive(Clone, PartialEq)]
pub struct Surface {
    trunc: usize,
    epsilon: BigRational,
    /// Nonzero coefficients keyed by `(i, j)`, the exponents of `z^i zbar^j`.
    terms: BTreeMap<(usize, usize), GaussRational>,
}

/// A single structural violation found by [`Surface::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A term lies outside the allowed total-degree window `4..=trunc`.
    DegreeRange { i: usize, j: usize },
    /// `r_ji != conj(r_ij)` for the unordered pair `{ (i,j), (j,i) }`.
    Reality { i: usize, j: usize },
    /// The degree-`m` slice fails its linear tangency condition; `value` is
    /// the nonzero slice sum.
    SliceCondition { degree: usize, value: GaussRational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeRange { i, j } => {
                write!(f, "term ({i},{j}) outside the allowed degree window")
            }
            Violation::Reality { i, j } => {
                write!(f, "reality broken at pair ({i},{j})/({j},{i})")
            }
            Violation::SliceCondition { degree, value } => {
                write!(f, "degree-{degree} slice condition fails: sum = {value}")
            }
        }
    }
}

impl Surface {
    pub fn zero(trunc: usize, epsilon: BigRational) -> Self {
        Surface {
            trunc,
            epsilon,
            terms: BTreeMap::new(),
        }
    }

    /// Build from explicit entries. Missing mirror cells `(j, i)` are filled
    /// with the conjugate of `(i, j)` (reality completion); explicitly
    /// repeated cells must agree exactly, otherwise the input is rejected.
    pub fn from_entries(
        trunc: usize,
        epsilon: BigRational,
        entries: &[((usize, usize), GaussRational)],
    ) -> Result<Self> {
        let mut terms: BTreeMap<(usize, usize), GaussRational> = BTreeMap::new();
        for ((i, j), c) in entries {
            if let Some(prev) = terms.get(&(*i, *j)) {
                if prev != c {
                    return Err(Error::invalid(format!(
                        "cell ({i},{j}) listed twice with different values: {prev} vs {c}"
                    )));
                }
            } else {
                terms.insert((*i, *j), c.clone());
            }
        }
        // Reality completion for absent mirrors only: explicitly supplied
        // mirror values are kept verbatim (validate reports mismatches).
        let keys: Vec<(usize, usize)> = terms.keys().copied().collect();
        for (i, j) in keys {
            if i != j && !terms.contains_key(&(j, i)) {
                let conj = terms[&(i, j)].conj();
                terms.insert((j, i), conj);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Surface {
            trunc,
            epsilon,
            terms,
        })
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn coeff(&self, i: usize, j: usize) -> GaussRational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(GaussRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &GaussRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Structural check; returns all violations (empty means valid).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for &(i, j) in self.terms.keys() {
            let m = i + j;
            if !(4..=self.trunc).contains(&m) {
                out.push(Violation::DegreeRange { i, j });
            }
        }
        // Reality, reported once per unordered pair.
        for (&(i, j), c) in &self.terms {
            if i < j {
                continue;
            }
            let mirror = self.coeff(j, i);
            if mirror != c.conj() {
                out.push(Violation::Reality { i, j });
            }
        }
        // Slice conditions.
        for m in 4..=self.trunc {
            let mut sum = GaussRational::zero();
            for (&(i, j), c) in &self.terms {
                if i + j != m || i == 0 || j == 0 {
                    continue;
                }
                let sign = if (j - 1) % 2 == 0 { 1 } else { -1 };
                let factor = GaussRational::from_int(sign * (i as i64) * (j as i64));
                let term = &factor * c;
                sum += &term;
            }
            if !sum.is_zero() {
                out.push(Violation::SliceCondition {
                    degree: m,
                    value: sum,
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Number of stored coefficient cells.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The surface polynomial as a series in `(z, w)` where the second
    /// variable stands for `zbar`.
    pub fn to_series(&self, vars: VarPair) -> Series2 {
        self.to_series_trunc(vars, self.trunc)
    }

    /// Same as [`Surface::to_series`] with an explicit truncation. Extending
    /// beyond `self.trunc()` is sound because the surface is an exact
    /// polynomial (absent coefficients are genuinely zero); terms above the
    /// requested truncation are dropped.
    pub fn to_series_trunc(&self, vars: VarPair, trunc: usize) -> Series2 {
        let mut s = Series2::zero(trunc, vars);
        for (&(i, j), c) in &self.terms {
            if i + j <= trunc {
                s.add_to(i, j, c);
            }
        }
        s
    }

    /// Keep only total degrees `<= m`, with the truncation lowered to `m`.
    pub fn truncate_to(&self, m: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j <= m)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        Surface {
            trunc: m,
            epsilon: self.epsilon.clone(),
            terms,
        }
    }

    /// Pointwise sum; requires matching `epsilon` (the scale is a family
    /// parameter, not a coefficient). Truncation is the larger of the two.
    pub fn add(&self, other: &Surface) -> Result<Surface> {
        if self.epsilon != other.epsilon {
            return Err(Error::invalid(format!(
                "cannot add surfaces with different scale parameters {} and {}",
                self.epsilon, other.epsilon
            )));
        }
        let mut terms = self.terms.clone();
        for (&k, c) in &other.terms {
            let cur = terms.remove(&k).unwrap_or_else(GaussRational::zero);
            let sum = &cur + c;
            if !sum.is_zero() {
                terms.insert(k, sum);
            }
        }
        Ok(Surface {
            trunc: self.trunc.max(other.trunc),
            epsilon: self.epsilon.clone(),
            terms,
        })
    }

    /// True when all nonzero terms share one total degree; returns it.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for &(i, j) in self.terms.keys() {
            match deg {
                None => deg = Some(i + j),
                Some(d) if d == i + j => {}
                Some(_) => return None,
            }
        }
        deg
    }

    // --- serialization ---

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut terms: Vec<SurfaceTermRepr> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| SurfaceTermRepr { c: c.clone(), i, j })
            .collect();
        terms.sort_by_key(|t| (t.i + t.j, t.i));
        serde_json::to_value(SurfaceRepr {
            trunc: self.trunc,
            epsilon: rational_pair(&self.epsilon),
            terms,
        })
        .expect("surface to json")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let repr: SurfaceReprIn = serde_json::from_value(v.clone())?;
        let epsilon = match &repr.epsilon {
            Some(pair) => pair_to_rational(pair)?,
            None => BigRational::one(),
        };
        if !epsilon.is_positive() {
            return Err(Error::invalid(format!(
                "scale parameter must be positive, got {epsilon}"
            )));
        }
        let entries: Vec<((usize, usize), GaussRational)> =
            repr.terms.into_iter().map(|t| ((t.i, t.j), t.c)).collect();
        Surface::from_entries(repr.trunc, epsilon, &entries)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        Surface::from_json_value(&v)
    }
}

#[derive(Serialize)]
struct SurfaceRepr {
    trunc: usize,
    epsilon: [String; 2],
    terms: Vec<SurfaceTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceTermRepr {
    c: GaussRational,
    i: usize,
    j: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceReprIn {
    trunc: usize,
    #[serde(default)]
    epsilon: Option<[String; 2]>,
    terms: Vec<SurfaceTermRepr>,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surface[N={}, eps={}", self.trunc, self.epsilon)?;
        for (&(i, j), c) in &self.terms {
            write!(f, ", ({i},{j})={c}")?;
        }
        write!(f, "]")
    }
}

// --- generator family ---

/// The degree-`(n+2)` generator: `eps^(n+2) * (i^(n-1) z^n zbar^2 +
/// (-i)^(n-1) z^2 zbar^n)` for `n >= 2`. For `n = 2` the two terms cancel
/// and the zero surface is returned.
pub fn generator_e(n: usize, eps: &BigRational) -> Surface {
    assert!(n >= 2, "generator index must be at least 2");
    let m = n + 2;
    if n == 2 {
        // Both monomials land on the diagonal cell and the purely imaginary
        // leads cancel: the degree-4 member is the zero surface.
        return Surface::zero(m, eps.clone());
    }
    let scale = GaussRational::from_rational(eps_pow(eps, m));
    let lead = &GaussRational::i_pow(n as i64 - 1) * &scale;
    let entries = vec![((n, 2usize), lead.clone()), ((2usize, n), lead.conj())];
    Surface::from_entries(m, eps.clone(), &entries).expect("generator entries are consistent")
}

/// The generator of a given total surface degree `m >= 4`
/// (same family, indexed by degree).
pub fn generator_by_degree(m: usize, eps: &BigRational) -> Surface {
    assert!(m >= 4, "generator degree must be at least 4");
    generator_e(m - 2, eps)
}

/// The canonical divergent family truncated at total degree `n_max`: the sum
/// of all generators of degrees `4..=n_max`.
pub fn r_star(n_max: usize, eps: &BigRational) -> Surface {
    assert!(n_max >= 4, "family truncation must be at least 4");
    let mut acc = Surface::zero(n_max, eps.clone());
    for m in 4..=n_max {
        let g = generator_by_degree(m, eps);
        acc = acc.add(&g).expect("matching scale parameters");
        acc.trunc = n_max;
    }
    acc
}

fn eps_pow(eps: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= eps;
    }
    acc
}

// --- random valid surfaces (test corpus) ---

/// A pseudorandom surface satisfying all structural constraints, driven by
/// a fixed-seed generator so corpora are reproducible. Each slice is filled
/// with small random rationals (reality-completed) and then one designated
/// cell is adjusted exactly so the slice condition holds.
pub fn random_valid_surface(trunc: usize, seed: u64) -> Surface {
    assert!(trunc >= 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = |rng: &mut ChaCha8Rng| -> BigRational {
        BigRational::new(
            BigInt::from(rng.gen_range(-9i64..=9)),
            BigInt::from(rng.gen_range(1i64..=4)),
        )
    };
    let mut entries: Vec<((usize, usize), GaussRational)> = Vec::new();
    for m in 4..=trunc {
        for i in (m.div_ceil(2))..=m {
            let j = m - i;
            if i == j {
                // Diagonal cells must be real.
                entries.push(((i, j), GaussRational::from_rational(small(&mut rng))));
            } else {
                let c = GaussRational::new(small(&mut rng), small(&mut rng));
                entries.push(((i, j), c.clone()));
                entries.push(((j, i), c.conj()));
            }
        }
    }
    let mut s = Surface::from_entries(trunc, BigRational::one(), &entries)
        .expect("random entries are consistent");

    // Repair each slice condition with one exact adjustment.
    for m in 4..=trunc {
        let mut sum = GaussRational::zero();
        for (&(i, j), c) in &s.terms {
            if i + j != m || i == 0 || j == 0 {
                continue;
            }
            let sign = if (j - 1) % 2 == 0 { 1 } else { -1 };
            let f = GaussRational::from_int(sign * (i as i64) * (j as i64));
            let t = &f * c;
            sum += &t;
        }
        if sum.is_zero() {
            continue;
        }
        if m % 2 == 1 {
            // Odd slice: the sum is purely imaginary; shift the imaginary
            // part of the cell (a, b) = ((m+1)/2, (m-1)/2) and its mirror.
            let (a, b) = (m.div_ceil(2), (m - 1) / 2);
            debug_assert!(sum.re().is_zero());
            let t = sum.im().clone();
            let sign = if (b as i64 - 1).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            // Contribution of Im-shift delta: 2*a*b*sign*delta to Im(sum).
            let denom = BigRational::from_integer(BigInt::from(2 * (a * b) as i64 * sign));
            let delta = -t / denom;
            let cur = s.coeff(a, b);
            let adjusted = GaussRational::new(cur.re().clone(), cur.im() + &delta);
            s.terms.insert((a, b), adjusted.clone());
            s.terms.insert((b, a), adjusted.conj());
        } else {
            // Even slice: the sum is real; shift the (real) diagonal cell.
            let h = m / 2;
            debug_assert!(sum.im().is_zero());
            let t = sum.re().clone();
            let sign = if (h as i64 - 1).rem_euclid(2) == 0 {
                1
            } else {
                -1
            };
            let denom = BigRational::from_integer(BigInt::from((h * h) as i64 * sign));
            let delta = -t / denom;
            let cur = s.coeff(h, h);
            let adjusted = GaussRational::new(cur.re() + &delta, BigRational::zero());
            if adjusted.is_zero() {
                s.terms.remove(&(h, h));
            } else {
                s.terms.insert((h, h), adjusted);
            }
        }
    }
    debug_assert!(s.is_valid(), "slice repair must produce a valid surface");
    s
}

// --- the coefficient-root metric ---

/// `d(r, s) = sup |r_ij - s_ij|^(1/(i+j))` as a float report.
pub fn metric_d(a: &Surface, b: &Surface) -> f64 {
    let mut best: f64 = 0.0;
    for (i, j, diff) in coeff_diffs(a, b) {
        best = best.max(root_of_magnitude(&diff, i + j));
    }
    best
}

/// Exact predicate `d(a, b) <= t` for `t >= 0`: every cell must satisfy
/// `|diff|^2 <= t^(2(i+j))`.
pub fn metric_within(a: &Surface, b: &Surface, t: &BigRational) -> bool {
    assert!(!t.is_negative(), "metric bound must be non-negative");
    for (i, j, diff) in coeff_diffs(a, b) {
        if diff.is_zero() {
            continue;
        }
        let m = i + j;
        if m == 0 {
            return false;
        }
        let bound = eps_pow(t, 2 * m);
        if diff.magnitude_sq() > bound {
            return false;
        }
    }
    true
}

fn coeff_diffs(a: &Surface, b: &Surface) -> Vec<(usize, usize, GaussRational)> {
    let mut keys: Vec<(usize, usize)> = a.terms.keys().chain(b.terms.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(i, j)| (i, j, &a.coeff(i, j) - &b.coeff(i, j)))
        .collect()
}

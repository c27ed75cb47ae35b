//! The Bernoulli difference operator, the linearized difference equation,
//! the closed-form coefficient families `S_{a,b}`, and the divergence
//! certificate that cross-validates two independent exact routes to the
//! same coefficient sequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::involution::a_series;
use crate::scalar::{
    binomial, factorial, ln_rational, root_of_magnitude, BernoulliTable, GaussRational,
};
use crate::series::Series2;
use crate::surface::r_star;

/// Apply the degree-preserving operator `K = sum_k 4^k beta_k x^k d_y^k`,
/// where `beta_k` are the coefficients of `z / (e^z - 1)`.
///
/// The table must cover `k` up to the largest second-variable exponent in
/// `f`; a too-small table is a caller error.
pub fn k_apply(f: &Series2, table: &BernoulliTable) -> Result<Series2> {
    let needed = f.iter_nonzero().map(|(_, j, _)| j).max().unwrap_or(0);
    if table.max_k() < needed {
        return Err(Error::invalid(format!(
            "Bernoulli table holds k <= {}, but the operator needs k <= {needed}",
            table.max_k()
        )));
    }
    let four = BigInt::from(4);
    let mut weight = Vec::with_capacity(needed + 1);
    let mut pow4 = BigRational::one();
    for k in 0..=needed {
        weight.push(&pow4 * table.beta(k));
        pow4 *= BigRational::from_integer(four.clone());
    }

    let mut out = Series2::zero(f.trunc(), f.vars());
    for (a, b, c) in f.iter_nonzero() {
        // Falling factorial b! / (b-k)! accumulated incrementally.
        let mut fall = BigInt::one();
        for (k, wk) in weight.iter().enumerate().take(b + 1) {
            let w = wk * BigRational::from_integer(fall.clone());
            if !w.is_zero() {
                out.add_to(a + k, b - k, &c.scale(&w));
            }
            fall *= BigInt::from((b - k) as i64);
        }
    }
    Ok(out)
}

/// The finite-difference operator the Bernoulli operator inverts:
/// `f(x, 4x + y) - f(x, y)`.
pub fn shear_difference(f: &Series2) -> Series2 {
    let one = GaussRational::one();
    let zero = GaussRational::zero();
    let four = GaussRational::from_int(4);
    f.compose_linear(&one, &zero, &four, &one).sub(f)
}

/// Solve `u(x, 4x + y) - u(x, y) = -g` exactly, one homogeneous degree at a
/// time. The kernel of the difference operator at each degree is the span
/// of the pure-`x` monomial; that component is fixed to zero.
///
/// Requires `x | g` (a right-hand side with a pure-`y` monomial is
/// unsolvable). The solution is re-substituted into the equation and the
/// residual checked to be exactly zero.
pub fn solve_difference_direct(g: &Series2) -> Result<Series2> {
    if !g.divisible_by_first_var() {
        return Err(Error::invalid(
            "difference equation right-hand side must be divisible by the first variable",
        ));
    }
    let n = g.trunc();
    let mut out = Series2::zero(n, g.vars());
    for k in 1..=n {
        // Slice coefficients: g_k = sum_l gk[l] x^(k-l) y^l. Within one
        // degree the equation is triangular in l: the y^l coefficient of
        // u(x,4x+y) - u(x,y) is sum_{j>l} U[j] C(j,l) 4^(j-l).
        let gk: Vec<&GaussRational> = (0..=k).map(|l| g.get(k - l, l)).collect();
        let mut u = vec![GaussRational::zero(); k + 1];
        u[k] = (-gk[k - 1]).scale(&BigRational::new(BigInt::one(), BigInt::from(4 * k as i64)));
        for l in (0..k.saturating_sub(1)).rev() {
            let mut rhs = -gk[l];
            for (j, uj) in u.iter().enumerate().skip(l + 2) {
                let c =
                    BigRational::from_integer(binomial(j, l) * BigInt::from(4).pow((j - l) as u32));
                rhs -= &uj.scale(&c);
            }
            u[l + 1] = rhs.scale(&BigRational::new(
                BigInt::one(),
                BigInt::from(4 * (l as i64 + 1)),
            ));
        }
        for (l, c) in u.into_iter().enumerate() {
            if !c.is_zero() {
                out.set(k - l, l, c);
            }
        }
    }
    if !shear_difference(&out).add(g).is_zero() {
        return Err(Error::internal(
            "difference-equation solution failed exact re-substitution",
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Univariate closed-form machinery.
// ---------------------------------------------------------------------------

/// Coefficients of the `deriv`-th derivative of `E(s) = s/(e^s - 1)`
/// evaluated at `s = 4x`, as a sequence indexed by the power of `x`.
fn e4_series(deriv: usize, n_max: usize, table: &BernoulliTable) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut pow4 = BigRational::one();
    for k in 0..=n_max {
        // d^deriv/ds^deriv s^(k+deriv) = (k+deriv)!/k! s^k, then s = 4x.
        let fall = BigRational::new(factorial(k + deriv), factorial(k));
        c.push(table.beta(k + deriv) * fall * &pow4);
        pow4 *= BigRational::from_integer(BigInt::from(4));
    }
    c
}

/// Coefficients of `e^(a x)`: `a^n / n!`.
fn exp_series(a: i64, n_max: usize) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut pow = BigInt::one();
    for n in 0..=n_max {
        c.push(BigRational::new(pow.clone(), factorial(n)));
        pow *= BigInt::from(a);
    }
    c
}

/// Truncated product of univariate coefficient sequences (same length).
fn u_mul(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
    let n = p.len();
    let mut r = vec![BigRational::zero(); n];
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        for (j, qj) in q.iter().take(n - i).enumerate() {
            if !qj.is_zero() {
                r[i + j] += pi * qj;
            }
        }
    }
    r
}

/// `s * x^shift * c`, truncated to the input length.
fn u_shift_scale(c: &[BigRational], s: &BigRational, shift: usize) -> Vec<BigRational> {
    let n = c.len();
    let mut r = vec![BigRational::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i + shift < n && !ci.is_zero() {
            r[i + shift] = s * ci;
        }
    }
    r
}

/// Exact coefficients of the generating family
/// `S_{a,b}(x) = 2b x E(4x) e^(ax) - 8 x E'(4x) e^(ax)
///   + a^2 x^2 E(4x) e^(-bx) + 8a x^2 E'(4x) e^(-bx) + 16 x^2 E''(4x) e^(-bx)`
/// through degree `n_max`. The table must cover `k <= n_max + 2` (the
/// second derivative of `E` shifts the index by two).
pub fn s_ab_closed_form(
    a: i64,
    b: i64,
    n_max: usize,
    table: &BernoulliTable,
) -> Result<Vec<BigRational>> {
    if table.max_k() < n_max + 2 {
        return Err(Error::invalid(format!(
            "Bernoulli table holds k <= {}, but degree {n_max} needs k <= {}",
            table.max_k(),
            n_max + 2
        )));
    }
    let e0 = e4_series(0, n_max, table);
    let e1 = e4_series(1, n_max, table);
    let e2 = e4_series(2, n_max, table);
    let eax = exp_series(a, n_max);
    let embx = exp_series(-b, n_max);

    let rat = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut s = u_shift_scale(&u_mul(&e0, &eax), &rat(2 * b), 1);
    let parts = [
        u_shift_scale(&u_mul(&e1, &eax), &rat(-8), 1),
        u_shift_scale(&u_mul(&e0, &embx), &rat(a * a), 2),
        u_shift_scale(&u_mul(&e1, &embx), &rat(8 * a), 2),
        u_shift_scale(&u_mul(&e2, &embx), &rat(16), 2),
    ];
    for part in parts {
        for (i, c) in part.into_iter().enumerate() {
            s[i] += c;
        }
    }
    Ok(s)
}

/// The four `(a, b)` pairs whose alternating combination yields the
/// certificate's generating series `S(x)`.
pub const S_PAIRS: [(i64, i64); 4] = [(5, -3), (1, -3), (3, -1), (-1, -1)];

/// Signs of the four pairs in the combination.
pub const S_SIGNS: [i64; 4] = [1, -1, 1, -1];

/// Exact coefficients of `S(x) = S_{5,-3} - S_{1,-3} + S_{3,-1} - S_{-1,-1}`
/// through degree `n_max`. The four parts are independent and computed in
/// parallel; the combination order is fixed, so the result is identical for
/// every thread count.
pub fn divergence_series_coeffs(n_max: usize, table: &BernoulliTable) -> Result<Vec<BigRational>> {
    let parts: Vec<Result<Vec<BigRational>>> = S_PAIRS
        .par_iter()
        .map(|&(a, b)| s_ab_closed_form(a, b, n_max, table))
        .collect();
    let mut s = vec![BigRational::zero(); n_max + 1];
    for (part, &sign) in parts.into_iter().zip(S_SIGNS.iter()) {
        let part = part?;
        for (i, c) in part.into_iter().enumerate() {
            if sign >= 0 {
                s[i] += c;
            } else {
                s[i] -= c;
            }
        }
    }
    Ok(s)
}

fn int_pow(base: i64, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

fn neg_one_pow(exp: usize) -> BigInt {
    if exp.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// The homogeneous-piece coefficient evaluated by direct summation of the
/// five explicit sums; equals `n! * [x^(n+1)] S_{a,b}(x)` term by term.
/// Requires `n >= 1` and a table covering `k <= n + 1`.
pub fn gamma_five_sum(n: usize, a: i64, b: i64, table: &BernoulliTable) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::invalid("five-sum coefficient needs degree n >= 1"));
    }
    if table.max_k() < n + 1 {
        return Err(Error::invalid(format!(
            "Bernoulli table holds k <= {}, but the five-sum at n = {n} needs k <= {}",
            table.max_k(),
            n + 1
        )));
    }
    let four_beta = |j: usize| table.beta(j) * BigRational::from_integer(int_pow(4, j));
    let fact_ratio = |p: usize, q: usize| BigRational::new(factorial(p), factorial(q));
    let int = BigRational::from_integer;

    let mut s1 = BigRational::zero();
    for j in 0..=n {
        s1 += four_beta(j) * fact_ratio(n, n - j) * int(int_pow(a, n - j) * BigInt::from(b));
    }
    s1 *= int(BigInt::from(2));

    let mut s2 = BigRational::zero();
    for j in 1..=(n + 1) {
        s2 += four_beta(j)
            * int(BigInt::from(j as i64))
            * fact_ratio(n, n + 1 - j)
            * int(int_pow(a, n + 1 - j));
    }
    s2 *= int(BigInt::from(-2));

    let pref = int(neg_one_pow(n - 1) * BigInt::from(n as i64));

    let mut s3 = BigRational::zero();
    for j in 0..n {
        s3 += four_beta(j)
            * fact_ratio(n - 1, n - 1 - j)
            * int(neg_one_pow(j) * int_pow(b, n - 1 - j) * int_pow(a, 2));
    }
    s3 *= &pref;

    let mut s4 = BigRational::zero();
    for j in 1..=n {
        s4 += four_beta(j)
            * int(BigInt::from(2) * binomial(j, 1))
            * fact_ratio(n - 1, n - j)
            * int(neg_one_pow(j - 1) * int_pow(b, n - j) * BigInt::from(a));
    }
    s4 *= &pref;

    let mut s5 = BigRational::zero();
    for j in 2..=(n + 1) {
        s5 += four_beta(j)
            * int(BigInt::from(2) * binomial(j, 2))
            * fact_ratio(n - 1, n + 1 - j)
            * int(neg_one_pow(j - 2) * int_pow(b, n + 1 - j));
    }
    s5 *= &pref;

    Ok(s1 + s2 + s3 + s4 + s5)
}

// ---------------------------------------------------------------------------
// Certificate routes.
// ---------------------------------------------------------------------------

/// Certificate coefficients `c_0 ..= c_N` by direct operator application:
/// build the degree-`(N+1)` family surface, extract its `A` series from the
/// involution pair, apply the Bernoulli operator, restrict to `y = 0`, and
/// multiply by `x`: `c_n = [x^n] x * (K A)(x, 0)`.
pub fn certificate_coeffs_direct(
    n_max: usize,
    eps: &BigRational,
    table: &BernoulliTable,
) -> Result<Vec<GaussRational>> {
    if n_max < 3 {
        return Err(Error::invalid("certificate needs degree >= 3"));
    }
    let r = r_star(n_max + 1, eps);
    let a = a_series(&r, n_max - 1)?;
    let ka = k_apply(&a, table)?;
    let y0 = ka.restrict_second_zero();
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(GaussRational::zero());
    for n in 1..=n_max {
        c.push(y0.get(n - 1).cloned().unwrap_or_else(GaussRational::zero));
    }
    Ok(c)
}

/// Certificate coefficients `c_0 ..= c_N` from the closed-form route:
/// `c_n = S_n * (n-1)! * eps^(n+1) * i^(n-2) / 2^(n+1)` for `n >= 2`,
/// and `c_0 = c_1 = 0`.
pub fn certificate_coeffs_closed(
    n_max: usize,
    eps: &BigRational,
    table: &BernoulliTable,
) -> Result<Vec<GaussRational>> {
    let s = divergence_series_coeffs(n_max, table)?;
    let mut c = vec![GaussRational::zero(), GaussRational::zero()];
    let mut eps_pow = eps * eps * eps; // eps^(n+1) at n = 2
    let mut two_pow = BigRational::new(BigInt::one(), BigInt::from(8)); // 2^-(n+1) at n = 2
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for (n, sn) in s.iter().enumerate().skip(2) {
        let scale = sn * BigRational::from_integer(factorial(n - 1)) * &eps_pow * &two_pow;
        c.push(GaussRational::i_pow(n as i64 - 2).scale(&scale));
        eps_pow *= eps;
        two_pow *= &half;
    }
    Ok(c)
}

/// `|q|^(1/n)` for an exact rational, `0.0` for zero.
fn rational_root(q: &BigRational, n: usize) -> f64 {
    if q.is_zero() {
        0.0
    } else {
        (ln_rational(&q.abs()) / n as f64).exp()
    }
}

/// Least-squares growth-rate estimate: `exp(slope)` of `ln |S_n|` against
/// `n` over the nonzero entries of the top-third window
/// `[floor(2 n_max / 3) + 1, n_max]`. Needs at least two nonzero entries.
fn fit_radius_estimate(s: &[BigRational], n_max: usize) -> Result<f64> {
    let lo = (2 * n_max) / 3 + 1;
    let pts: Vec<(f64, f64)> = (lo..=n_max)
        .filter(|&n| !s[n].is_zero())
        .map(|n| (n as f64, ln_rational(&s[n].abs())))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid(format!(
            "estimate window [{lo}, {n_max}] holds fewer than two nonzero coefficients"
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok((num / den).exp())
}

/// The full two-route divergence certificate.
///
/// `coeffs` holds `c_0 ..= c_N`, computed by the direct operator route and
/// the closed-form route and asserted exactly equal (a mismatch is an
/// internal error, never a "failed" certificate). `s_coeffs` holds the
/// underlying scale-free sequence `S_0 ..= S_N`, whose root test estimates
/// the growth rate; `c_roots` reports `|c_n|^(1/n)` (the factorial-driven
/// growth), `s_roots` reports `|S_n|^(1/n)`.
#[derive(Debug, Clone)]
pub struct DivergenceCertificate {
    n_max: usize,
    epsilon: BigRational,
    coeffs: Vec<GaussRational>,
    s_coeffs: Vec<BigRational>,
    s_roots: Vec<f64>,
    c_roots: Vec<f64>,
    s_radius_estimate: f64,
    max_s_root: f64,
    tail_increasing: bool,
    pass: bool,
}

impl DivergenceCertificate {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    /// `c_0 ..= c_N`, identical for both routes.
    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    /// `S_0 ..= S_N`.
    pub fn s_coeffs(&self) -> &[BigRational] {
        &self.s_coeffs
    }

    /// `|S_n|^(1/n)` indexed by `n` (zero entries report 0.0).
    pub fn s_roots(&self) -> &[f64] {
        &self.s_roots
    }

    /// `|c_n|^(1/n)` indexed by `n` (zero entries report 0.0).
    pub fn c_roots(&self) -> &[f64] {
        &self.c_roots
    }

    /// Windowed least-squares estimate of `limsup |S_n|^(1/n)`.
    pub fn s_radius_estimate(&self) -> f64 {
        self.s_radius_estimate
    }

    /// Largest computed `|S_n|^(1/n)`.
    pub fn max_s_root(&self) -> f64 {
        self.max_s_root
    }

    /// Whether `|c_n|^(1/n)` increases strictly over the nonzero entries of
    /// the tail window `[max(2, N/2), N]`.
    pub fn tail_increasing(&self) -> bool {
        self.tail_increasing
    }

    /// Certificate verdict: routes exact (enforced), the growth-rate
    /// estimate and the largest root both clear 1/4, and the tail grows.
    pub fn pass(&self) -> bool {
        self.pass
    }
}

/// Compute the divergence certificate for the canonical family surface at
/// scale `eps`, truncated at coefficient index `n_max`.
///
/// The family surface is built internally to degree `n_max + 1` so every
/// reported coefficient is complete. `n_max >= 10` is required so the
/// estimate window contains at least two nonzero entries.
pub fn divergence_certificate(n_max: usize, eps: &BigRational) -> Result<DivergenceCertificate> {
    if n_max < 10 {
        return Err(Error::invalid(
            "certificate degree must be at least 10 for a stable growth estimate",
        ));
    }
    if !eps.is_positive() {
        return Err(Error::invalid("certificate scale must be positive"));
    }
    let table = BernoulliTable::new(n_max + 2);
    let direct = certificate_coeffs_direct(n_max, eps, &table)?;
    let closed = certificate_coeffs_closed(n_max, eps, &table)?;
    for n in 0..=n_max {
        if direct[n] != closed[n] {
            return Err(Error::internal(format!(
                "certificate routes disagree at n = {n}: direct {} vs closed {}",
                direct[n], closed[n]
            )));
        }
    }
    let s = divergence_series_coeffs(n_max, &table)?;

    let s_roots: Vec<f64> = (0..=n_max)
        .map(|n| if n < 2 { 0.0 } else { rational_root(&s[n], n) })
        .collect();
    let c_roots: Vec<f64> = (0..=n_max)
        .map(|n| {
            if n < 2 {
                0.0
            } else {
                root_of_magnitude(&direct[n], n)
            }
        })
        .collect();
    let s_radius_estimate = fit_radius_estimate(&s, n_max)?;
    let max_s_root = s_roots.iter().copied().fold(0.0_f64, f64::max);

    let tail_lo = (n_max / 2).max(2);
    let tail: Vec<f64> = (tail_lo..=n_max)
        .filter(|&n| !direct[n].is_zero())
        .map(|n| c_roots[n])
        .collect();
    let tail_increasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);

    let pass = s_radius_estimate > 0.25 && max_s_root > 0.25 && tail_increasing;

    Ok(DivergenceCertificate {
        n_max,
        epsilon: eps.clone(),
        coeffs: direct,
        s_coeffs: s,
        s_roots,
        c_roots,
        s_radius_estimate,
        max_s_root,
        tail_increasing,
        pass,
    })
}

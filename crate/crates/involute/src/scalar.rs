//! Exact scalar arithmetic: Gaussian rationals and the Bernoulli-style
//! coefficient table of `z / (e^z - 1)`.
//!
//! Every number in this crate is an element of `Q(i)` held exactly as a pair
//! of arbitrary-precision rationals. There is no floating point anywhere in
//! the computational core; floats appear only in reporting helpers that turn
//! exact magnitudes into human-readable estimates.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

/// An exact element of `Q(i)`: `re + im * i` with arbitrary-precision
/// rational parts. `BigRational` keeps itself reduced with a positive
/// denominator, so equality is plain structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    re: BigRational,
    im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn zero() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `p/q` as a real Gaussian rational. Panics if `q == 0`; use only with
    /// literal constants.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "literal rational with zero denominator");
        GaussRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussRational {
            re: r,
            im: BigRational::zero(),
        }
    }

    /// `i^n` for any integer exponent (negative allowed).
    pub fn i_pow(n: i64) -> Self {
        match n.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -&Self::one(),
            _ => -&Self::i(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|c|^2 = re^2 + im^2`, an exact non-negative rational. This is the
    /// quantity all root comparisons reduce to: `|c|^(1/m) >= t` iff
    /// `|c|^2 >= t^(2m)`.
    pub fn magnitude_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Fails on zero instead of panicking so that
    /// division buried deep in series code surfaces as an error.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.magnitude_sq();
        Ok(GaussRational {
            re: &self.re / &m,
            im: -(&self.im / &m),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power by repeated squaring (non-negative exponents).
    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    /// Approximate `(re, im)` as floats, for reports only.
    pub fn to_f64_parts(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Approximate `|c|` as a float, overflow-safe via logarithms.
    pub fn abs_f64(&self) -> f64 {
        let m = self.magnitude_sq();
        if m.is_zero() {
            0.0
        } else {
            (0.5 * ln_rational(&m)).exp()
        }
    }

    /// Largest bit size among the four integers making up the value
    /// (profiling aid).
    pub fn bit_size(&self) -> u64 {
        self.re
            .numer()
            .bits()
            .max(self.re.denom().bits())
            .max(self.im.numer().bits())
            .max(self.im.denom().bits())
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut wrote_re = false;
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            wrote_re = true;
        }
        if !self.im.is_zero() {
            if wrote_re && self.im.is_positive() {
                write!(f, "+")?;
            }
            if self.im == BigRational::one() {
                write!(f, "i")?;
            } else if self.im == -BigRational::one() {
                write!(f, "-i")?;
            } else {
                write!(f, "{}i", self.im)?;
            }
        }
        Ok(())
    }
}

// --- arithmetic on references (the form used in series inner loops) ---

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, rhs: &GaussRational) {
        let prod = &*self * rhs;
        *self = prod;
    }
}

// --- serde: {"re": ["p","q"], "im": ["p","q"]} with decimal strings ---

#[derive(Serialize, Deserialize)]
struct GaussRationalRepr {
    re: [String; 2],
    im: [String; 2],
}

impl Serialize for GaussRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GaussRationalRepr {
            re: rational_pair(&self.re),
            im: rational_pair(&self.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GaussRationalRepr::deserialize(d)?;
        Ok(GaussRational {
            re: pair_to_rational(&repr.re).map_err(D::Error::custom)?,
            im: pair_to_rational(&repr.im).map_err(D::Error::custom)?,
        })
    }
}

/// `["p", "q"]` decimal-string pair for a rational, reduced, `q > 0`.
pub fn rational_pair(r: &BigRational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

/// Parse a `["p", "q"]` decimal-string pair.
pub fn pair_to_rational(pair: &[String; 2]) -> Result<BigRational> {
    let p = BigInt::from_str(&pair[0])
        .map_err(|e| Error::invalid(format!("bad integer string {:?}: {e}", pair[0])))?;
    let q = BigInt::from_str(&pair[1])
        .map_err(|e| Error::invalid(format!("bad integer string {:?}: {e}", pair[1])))?;
    if q.is_zero() {
        return Err(Error::invalid("rational with zero denominator".to_string()));
    }
    Ok(BigRational::new(p, q))
}

/// Parse `"p"`, `"-p"`, or `"p/q"` into an exact rational (CLI flag syntax).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let p =
        BigInt::from_str(num).map_err(|e| Error::invalid(format!("bad rational {s:?}: {e}")))?;
    let q =
        BigInt::from_str(den).map_err(|e| Error::invalid(format!("bad rational {s:?}: {e}")))?;
    if q.is_zero() {
        return Err(Error::invalid(format!(
            "rational {s:?} has zero denominator"
        )));
    }
    Ok(BigRational::new(p, q))
}

// --- float helpers for reporting ---

/// Natural log of a positive rational, safe for values far outside `f64`
/// range: both integer parts are scaled by their bit length before the
/// float conversion.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 900 {
        return n.to_f64().expect("small biguint to f64").ln();
    }
    let shift = bits - 64;
    let scaled = (n >> shift).to_f64().expect("shifted biguint to f64");
    scaled.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Rational to nearest float; saturates instead of panicking.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let ln = ln_rational(&r.abs());
    if ln > 700.0 {
        return sign * f64::INFINITY;
    }
    if ln < -700.0 {
        return 0.0;
    }
    r.to_f64().unwrap_or(sign * f64::INFINITY)
}

/// `|c|^(1/m)` as a float, via exact `|c|^2` and logarithms.
pub fn root_of_magnitude(c: &GaussRational, m: usize) -> f64 {
    assert!(m > 0);
    let msq = c.magnitude_sq();
    if msq.is_zero() {
        0.0
    } else {
        (ln_rational(&msq) / (2.0 * m as f64)).exp()
    }
}

// --- small combinatorial helpers shared across modules ---

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a big integer (`0` when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Sign of a rational as -1 / 0 / +1.
pub fn rational_sign(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

// --- coefficient table of z / (e^z - 1) ---

/// Coefficients `beta_k` of the expansion `z / (e^z - 1) = sum beta_k z^k`.
///
/// These drive the degree-preserving difference-inversion operator: they are
/// the Bernoulli numbers divided by factorials (`beta_k = B_k / k!`), but the
/// table is built directly from the defining identity
/// `(sum beta_k z^k) * (e^z - 1) = z` rather than from a Bernoulli-number
/// formula, so it is independent of any external convention.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    betas: Vec<BigRational>,
}

impl BernoulliTable {
    /// Build the table through `beta_max_k` via the recurrence
    /// `beta_{n-1} = - sum_{k=0}^{n-2} beta_k / (n-k)!` with `beta_0 = 1`.
    pub fn new(max_k: usize) -> Self {
        let mut betas: Vec<BigRational> = Vec::with_capacity(max_k + 1);
        betas.push(BigRational::one());
        for n in 2..=(max_k + 1) {
            // Coefficient of z^n in (sum beta_k z^k)(e^z - 1) must vanish.
            let mut sum = BigRational::zero();
            for (k, beta) in betas.iter().enumerate().take(n - 1) {
                sum += beta / BigRational::from_integer(factorial(n - k));
            }
            betas.push(-sum);
        }
        BernoulliTable { betas }
    }

    pub fn max_k(&self) -> usize {
        self.betas.len() - 1
    }

    pub fn beta(&self, k: usize) -> &BigRational {
        &self.betas[k]
    }

    pub fn betas(&self) -> &[BigRational] {
        &self.betas
    }

    /// Check the defining identity `(sum beta_k z^k)(e^z - 1) = z` through
    /// degree `through` (requires `through <= max_k + 1`).
    pub fn verify_defining_identity(&self, through: usize) -> bool {
        assert!(through <= self.max_k() + 1);
        for n in 1..=through {
            let mut sum = BigRational::zero();
            for (k, beta) in self.betas.iter().enumerate().take(n) {
                sum += beta / BigRational::from_integer(factorial(n - k));
            }
            let expected = if n == 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if sum != expected {
                return false;
            }
        }
        true
    }
}

//! Exact rational arithmetic with p-adic valuations, digit expansions and
//! the integral/fractional part split.
//!
//! Every p-adic quantity in this crate is represented by an exact rational:
//! a p-adic number known to precision `N` is stored as the rational whose
//! expansion agrees with it on all digits below index `N`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in canonical form (positive denominator, coprime parts).
pub type Rational = BigRational;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::InvalidPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` for `e >= 0`.
    pub fn pow(self, e: i64) -> BigInt {
        assert!(e >= 0, "negative exponent {e}");
        num_traits::pow(self.to_bigint(), e as usize)
    }

    /// `p^e` as a rational, any sign of `e`.
    pub fn rpow(self, e: i64) -> Rational {
        if e >= 0 {
            Rational::from_integer(self.pow(e))
        } else {
            Rational::new(BigInt::one(), self.pow(-e))
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic Miller-Rabin for the full `u64` range.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A square root of `n` modulo an odd prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod_prime(n: u64, p: Prime) -> Option<u64> {
    let p = p.get();
    let n = n % p;
    if p == 2 || n == 0 {
        return Some(n);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// p-adic valuation; `Infinity` is the valuation of zero and exceeds every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

/// Splits a nonzero integer into `(v_p(n), n / p^v_p(n))`.
pub fn split_unit(n: &BigInt, p: Prime) -> (i64, BigInt) {
    assert!(!n.is_zero(), "split_unit of zero");
    let pb = p.to_bigint();
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (v, rest);
        }
        rest = q;
        v += 1;
    }
}

/// Valuation of an integer.
pub fn vp_int(n: &BigInt, p: Prime) -> Valuation {
    if n.is_zero() {
        Valuation::Infinity
    } else {
        Valuation::Finite(split_unit(n, p).0)
    }
}

pub fn vp(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let (vn, _) = split_unit(x.numer(), p);
    let (vd, _) = split_unit(x.denom(), p);
    Valuation::Finite(vn - vd)
}

/// Finite valuation of a value known to be nonzero.
pub(crate) fn vp_nonzero(x: &Rational, p: Prime) -> i64 {
    vp(x, p).finite().expect("valuation of zero")
}

/// `u(x) = c |c|_p`: the integer with the p-power stripped, sign kept.
pub fn unit_part(n: &BigInt, p: Prime) -> BigInt {
    split_unit(n, p).1
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let egcd = a.mod_floor(m).extended_gcd(m);
    if egcd.gcd.is_one() {
        Some(egcd.x.mod_floor(m))
    } else {
        None
    }
}

/// The rational `y` with p-power denominator that shares all digits of `x`
/// below index `precision` and has none at or above it, so `v_p(x - y) >= precision`.
pub fn truncate(x: &Rational, p: Prime, precision: i64) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let (j, d_unit) = split_unit(x.denom(), p);
    let width = precision + j;
    if width <= 0 {
        return Rational::zero();
    }
    let modulus = p.pow(width);
    let inv = mod_inverse(&d_unit, &modulus).expect("unit part is invertible");
    let numer = (x.numer() * inv).mod_floor(&modulus);
    Rational::new(numer, p.pow(j))
}

/// Digits `e_i` of a p-adic expansion starting at `start_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitVector {
    pub start_index: i64,
    pub digits: Vec<u64>,
    pub prime: Prime,
}

impl DigitVector {
    /// The partial sum `sum e_i p^i`.
    pub fn value(&self) -> Rational {
        let p = self.prime.to_bigint();
        let mut acc = BigInt::zero();
        for &e in self.digits.iter().rev() {
            acc = acc * &p + BigInt::from(e);
        }
        Rational::from_integer(acc) * self.prime.rpow(self.start_index)
    }

    /// Index one past the last stored digit.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.digits.len() as i64
    }
}

/// Base-p digits of a nonnegative integer, least significant first, padded to `len`.
pub(crate) fn base_p_digits(n: &BigInt, p: Prime, len: usize) -> Vec<u64> {
    debug_assert!(!n.is_negative());
    let pb = p.to_bigint();
    let mut out = Vec::with_capacity(len);
    let mut rest = n.clone();
    for _ in 0..len {
        let (q, r) = rest.div_rem(&pb);
        out.push(r.to_u64().expect("digit fits in u64"));
        rest = q;
    }
    debug_assert!(rest.is_zero(), "digits beyond requested length");
    out
}

/// `count` digits of `x` starting at index `v_p(x)`.
///
/// Zero yields `count` zeros starting at index 0.
pub fn digits(x: &Rational, p: Prime, count: usize) -> Result<DigitVector> {
    if count == 0 {
        return Err(Error::InvalidInput("digit count must be positive".into()));
    }
    let v = match vp(x, p) {
        Valuation::Infinity => {
            return Ok(DigitVector {
                start_index: 0,
                digits: vec![0; count],
                prime: p,
            })
        }
        Valuation::Finite(v) => v,
    };
    let y = truncate(x, p, v + count as i64) * p.rpow(-v);
    debug_assert!(y.is_integer());
    Ok(DigitVector {
        start_index: v,
        digits: base_p_digits(&y.to_integer(), p, count),
        prime: p,
    })
}

/// `[x]`: the digits at indices `<= 0`, as a value in `[0, p)`.
pub fn integral_part(x: &Rational, p: Prime) -> Rational {
    truncate(x, p, 1)
}

/// `<x> = x - [x]`, which has valuation at least 1.
pub fn fractional_part(x: &Rational, p: Prime) -> Rational {
    x - integral_part(x, p)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Whether the nonzero rational `x` is a square in `Q_p`.
pub fn unit_square_test(x: &Rational, p: Prime) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::InvalidInput("square test of zero".into()));
    }
    let (vn, un) = split_unit(x.numer(), p);
    let (vd, ud) = split_unit(x.denom(), p);
    if (vn - vd) % 2 != 0 {
        return Ok(false);
    }
    // un/ud is a square iff un*ud is.
    let unit = un * ud;
    if p.get() == 2 {
        return Ok(unit.mod_floor(&BigInt::from(8)) == BigInt::one());
    }
    let residue = unit
        .mod_floor(&p.to_bigint())
        .to_u64()
        .expect("residue fits in u64");
    Ok(sqrt_mod_prime(residue, p).is_some())
}

/// Canonical `num/den` text form; integers keep the `/1`.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

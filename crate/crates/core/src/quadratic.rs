//! General rational and quadratic elements of `Q_p`, held as an exact
//! minimal polynomial plus a root selector.
//!
//! A quadratic element never stores its root as a p-adic number. It keeps a
//! rational approximation `approx` and an exponent `m` such that exactly one
//! root of the polynomial lies within `p^-m` of `approx`; digits are produced
//! on demand by Newton iteration from that selector. The maps `T1`/`T2`
//! act on the polynomial by exact substitution, so every intermediate element
//! is exact and only the selector carries precision.

use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    digits, integral_part, is_perfect_square, split_unit, sqrt_mod_prime, truncate,
    unit_part, unit_square_test, vp, vp_int, vp_nonzero, DigitVector, Prime, Rational,
    Valuation,
};
use crate::engine::{choose_map, Algorithm};
use crate::error::{Error, Result};
use crate::hensel::{in_s, CfTerm, HenselState, MapChoice};

/// Extra p-adic digits carried beyond the root separation exponent.
pub const DEFAULT_GUARD: i64 = 8;

/// Primitive integer polynomial `aX^2 + bX + c` with positive leading
/// coefficient; `a = 0` encodes the degree-one polynomial `bX + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinimalPolynomial {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl MinimalPolynomial {
    /// Normalizes content and sign, and rejects polynomials that are constant
    /// or reducible quadratics.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidInput(format!(
                "constant polynomial {c} has no root"
            )));
        }
        let poly = Self::normalized(a, b, c);
        if !poly.a.is_zero() && is_perfect_square(&poly.discriminant()) {
            return Err(Error::ReduciblePolynomial(poly.to_string()));
        }
        Ok(poly)
    }

    fn normalized(a: BigInt, b: BigInt, c: BigInt) -> Self {
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (a / &g, b / &g, c / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
        }
        MinimalPolynomial { a, b, c }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn degree(&self) -> u32 {
        if self.a.is_zero() {
            1
        } else {
            2
        }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        (Rational::from_integer(self.a.clone()) * x + Rational::from_integer(self.b.clone())) * x
            + Rational::from_integer(self.c.clone())
    }

    pub fn eval_derivative(&self, x: &Rational) -> Rational {
        Rational::from_integer(BigInt::from(2) * &self.a) * x
            + Rational::from_integer(self.b.clone())
    }

    /// The primitive polynomial of `f(X + shift)`.
    pub fn translate(&self, shift: &Rational) -> Self {
        let (n, q) = (shift.numer(), shift.denom());
        let a = &self.a * q * q;
        let b = BigInt::from(2) * &self.a * n * q + &self.b * q * q;
        let c = &self.a * n * n + &self.b * n * q + &self.c * q * q;
        Self::normalized(a, b, c)
    }

    /// The primitive polynomial of `(X + d)^2 f(s / (X + d))`, whose roots are
    /// `s / x - d` for the roots `x` of `f`.
    pub fn mobius(&self, s: &BigInt, d: &BigInt) -> Self {
        let a = self.c.clone();
        let b = &self.b * s + BigInt::from(2) * &self.c * d;
        let c = &self.a * s * s + &self.b * s * d + &self.c * d * d;
        Self::normalized(a, b, c)
    }
}

impl fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a.is_zero() {
            write!(f, "{}X + {}", self.b, self.c)
        } else {
            write!(f, "{}X^2 + {}X + {}", self.a, self.b, self.c)
        }
    }
}

/// Valuations of the two roots of `aX^2 + bX + c`, read off the Newton polygon
/// and returned in ascending order. Equal slopes may be half-integers.
pub fn newton_valuations(a: &BigInt, b: &BigInt, c: &BigInt, p: Prime) -> Result<(Rational, Rational)> {
    if a.is_zero() || c.is_zero() {
        return Err(Error::InvalidInput(
            "Newton polygon needs a != 0 and c != 0".into(),
        ));
    }
    let va = vp_int(a, p).finite().unwrap();
    let vc = vp_int(c, p).finite().unwrap();
    if let Valuation::Finite(vb) = vp_int(b, p) {
        if 2 * vb < va + vc {
            return Ok((
                Rational::from_integer((vb - va).into()),
                Rational::from_integer((vc - vb).into()),
            ));
        }
    }
    let both = Rational::new((vc - va).into(), 2.into());
    Ok((both.clone(), both))
}

/// Newton iteration from `start`, known to satisfy `v(start - root) >= start_prec`
/// with `start_prec > sep`, where `sep` is the valuation of the root difference
/// of `poly`. Returns an approximation good to `target` digits.
fn newton_lift(
    poly: &MinimalPolynomial,
    start: &Rational,
    start_prec: i64,
    sep: i64,
    target: i64,
    p: Prime,
) -> Rational {
    debug_assert!(start_prec > sep);
    let mut x = start.clone();
    let mut prec = start_prec;
    while prec < target {
        let fx = poly.eval(&x);
        if fx.is_zero() {
            return truncate(&x, p, target);
        }
        x = &x - fx / poly.eval_derivative(&x);
        prec = min(2 * prec - sep, target);
        x = truncate(&x, p, prec);
    }
    truncate(&x, p, target)
}

/// `[1A .. 3B]`: how the selected root compares with its conjugate and with 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    OneA,
    OneB,
    TwoA,
    TwoB,
    ThreeA,
    ThreeB,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::OneA => "1A",
            CaseLabel::OneB => "1B",
            CaseLabel::TwoA => "2A",
            CaseLabel::TwoB => "2B",
            CaseLabel::ThreeA => "3A",
            CaseLabel::ThreeB => "3B",
        })
    }
}

/// A root of an irreducible quadratic, both of whose roots lie in `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticElement {
    poly: MinimalPolynomial,
    p: Prime,
    approx: Rational,
    m: i64,
    guard: i64,
}

impl QuadraticElement {
    /// Validates `aX^2 + bX + c` and the selector `(approx, m)`.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        p: Prime,
        approx: Rational,
        m: i64,
    ) -> Result<Self> {
        let poly = quadratic_poly(a.into(), b.into(), c.into(), p)?;
        let x = QuadraticElement {
            poly,
            p,
            approx,
            m,
            guard: DEFAULT_GUARD,
        };
        if !x.selector_is_valid() {
            return Err(Error::AmbiguousSelector {
                poly: x.poly.to_string(),
                approx: x.approx.to_string(),
                exponent: m,
            });
        }
        Ok(x)
    }

    /// Both roots of `aX^2 + bX + c`, the one built from the canonical
    /// p-adic square root of the discriminant first.
    pub fn roots(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        p: Prime,
    ) -> Result<[Self; 2]> {
        let poly = quadratic_poly(a.into(), b.into(), c.into(), p)?;
        Ok(roots_of(poly, p, DEFAULT_GUARD))
    }

    /// The root of larger valuation; the first of [`Self::roots`] on a tie.
    pub fn default_root(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        p: Prime,
    ) -> Result<Self> {
        let [first, second] = Self::roots(a, b, c, p)?;
        Ok(if second.root_valuation() > first.root_valuation() {
            second
        } else {
            first
        })
    }

    /// The Hensel root of a state, as a general element.
    pub fn from_hensel(s: &HenselState) -> Self {
        let p = s.prime();
        let poly = MinimalPolynomial::normalized(BigInt::one(), s.b().clone(), s.c().clone());
        let sep = separation_of(&poly, p);
        let m = sep + DEFAULT_GUARD + 1;
        let approx = Rational::from_integer(s.root_mod_power((m - 1) as usize));
        let x = QuadraticElement {
            poly,
            p,
            approx,
            m,
            guard: DEFAULT_GUARD,
        };
        debug_assert!(x.selector_is_valid());
        x
    }

    /// Same element with a different number of guard digits.
    pub fn with_guard(mut self, guard: i64) -> Self {
        self.guard = guard.max(1);
        self
    }

    pub fn poly(&self) -> &MinimalPolynomial {
        &self.poly
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn guard(&self) -> i64 {
        self.guard
    }

    pub fn selector(&self) -> (&Rational, i64) {
        (&self.approx, self.m)
    }

    /// `v_p(alpha - alpha^sigma) = v_p(disc)/2 - v_p(a)`.
    pub fn separation(&self) -> i64 {
        separation_of(&self.poly, self.p)
    }

    fn selector_is_valid(&self) -> bool {
        let sep = self.separation();
        if self.m <= sep {
            return false;
        }
        let va = vp_int(&self.poly.a, self.p).finite().unwrap();
        vp(&self.poly.eval(&self.approx), self.p) >= Valuation::Finite(va + sep + self.m)
    }

    /// Rational `y` with `v_p(alpha - y) >= precision`, truncated to that precision.
    pub fn approximate(&self, precision: i64) -> Rational {
        if self.m >= precision {
            return truncate(&self.approx, self.p, precision);
        }
        newton_lift(
            &self.poly,
            &self.approx,
            self.m,
            self.separation(),
            precision,
            self.p,
        )
    }

    fn valuation_pair(&self) -> (i64, i64) {
        let (lo, hi) = newton_valuations(&self.poly.a, &self.poly.b, &self.poly.c, self.p)
            .expect("quadratic with c != 0");
        debug_assert!(lo.is_integer() && hi.is_integer());
        (lo.to_integer().to_i64().unwrap(), hi.to_integer().to_i64().unwrap())
    }

    /// `v_p(alpha)` for the selected root.
    pub fn root_valuation(&self) -> i64 {
        let (lo, hi) = self.valuation_pair();
        if lo == hi {
            return lo;
        }
        let y = self.approximate(hi + 1);
        let v = vp_nonzero(&y, self.p);
        debug_assert!(v == lo || v == hi);
        v
    }

    /// `v_p(alpha^sigma)` for the other root.
    pub fn conjugate_valuation(&self) -> i64 {
        let (lo, hi) = self.valuation_pair();
        lo + hi - self.root_valuation()
    }

    /// The other root of the same polynomial.
    pub fn conjugate(&self) -> Self {
        let m = self.separation() + self.guard + 1;
        let y = self.approximate(m);
        let trace = Rational::new(-self.poly.b.clone(), self.poly.a.clone());
        let x = QuadraticElement {
            poly: self.poly.clone(),
            p: self.p,
            approx: truncate(&(trace - y), self.p, m),
            m,
            guard: self.guard,
        };
        debug_assert!(x.selector_is_valid());
        x
    }

    /// `count` digits of the selected root starting at index `v_p(alpha)`.
    pub fn refine_digits(&self, count: usize) -> Result<DigitVector> {
        let v = self.root_valuation();
        digits(&self.approximate(v + count as i64), self.p, count)
    }

    pub fn classify_case(&self) -> CaseLabel {
        let va = self.root_valuation();
        let vs = self.conjugate_valuation();
        let small = va >= 1;
        match (va.cmp(&vs), small) {
            (std::cmp::Ordering::Greater, true) => CaseLabel::OneA,
            (std::cmp::Ordering::Greater, false) => CaseLabel::OneB,
            (std::cmp::Ordering::Less, true) => CaseLabel::TwoA,
            (std::cmp::Ordering::Less, false) => CaseLabel::TwoB,
            (std::cmp::Ordering::Equal, true) => CaseLabel::ThreeA,
            (std::cmp::Ordering::Equal, false) => CaseLabel::ThreeB,
        }
    }

    /// Splits `alpha = [alpha] + <alpha>` and returns the integral part with
    /// the element `<alpha>`, which has valuation at least 1.
    pub fn fractional_step(&self) -> (Rational, QuadraticElement) {
        let d0 = integral_part(&self.approximate(1), self.p);
        if d0.is_zero() {
            return (d0, self.clone());
        }
        let y = QuadraticElement {
            poly: self.poly.translate(&d0),
            p: self.p,
            approx: &self.approx - &d0,
            m: self.m,
            guard: self.guard,
        };
        debug_assert!(y.selector_is_valid());
        (d0, y)
    }

    /// Applies `T1` or `T2`, emitting the term `(+-u, v_p(alpha), d)`.
    pub fn apply_t(&self, which: MapChoice) -> Result<(CfTerm, QuadraticElement)> {
        let u = unit_part(&self.poly.c, self.p);
        let t = match which {
            MapChoice::T1 => u,
            MapChoice::T2 => -u,
        };
        self.step_with_numerator(t)
    }

    /// One step `x -> t p^k / x - d` of the general expansion with a chosen
    /// unit numerator `t`.
    pub fn step_with_numerator(&self, t: BigInt) -> Result<(CfTerm, QuadraticElement)> {
        let p = self.p;
        let k = self.root_valuation();
        if k < 1 {
            return Err(Error::InvalidInput(format!(
                "root of {} has valuation {k}; the maps act on pZ_p",
                self.poly
            )));
        }
        debug_assert!(!t.is_multiple_of(&p.to_bigint()));
        let s = &t * p.pow(k);
        let s_rat = Rational::from_integer(s.clone());
        let leading = &s_rat / self.approximate(k + 1);
        let d = integral_part(&leading, p).to_integer();
        debug_assert!(d.is_positive() && d < p.to_bigint());

        let poly = self.poly.mobius(&s, &d);
        let sep = separation_of(&poly, p);
        let m = sep + self.guard + 1;
        // Inverting an element of valuation k costs k digits.
        let y = self.approximate(m + k);
        let approx = truncate(&(&s_rat / y - Rational::from_integer(d.clone())), p, m);
        let next = QuadraticElement {
            poly,
            p,
            approx,
            m,
            guard: self.guard,
        };
        debug_assert!(next.selector_is_valid(), "selector lost after step");
        let term = CfTerm {
            t,
            k,
            d: d.to_u64().unwrap(),
        };
        Ok((term, next))
    }

    /// The state `(b, c)` when this element is a quadratic Hensel root.
    pub fn as_hensel_state(&self) -> Option<HenselState> {
        if self.poly.a.is_one()
            && in_s(&self.poly.b, &self.poly.c, self.p)
            && self.root_valuation() >= 1
        {
            HenselState::new(self.poly.b.clone(), self.poly.c.clone(), self.p).ok()
        } else {
            None
        }
    }

    /// Default step cap for [`reduce_to_hensel`].
    pub fn default_reduction_cap(&self) -> usize {
        64 + 4 * max(self.separation(), 0) as usize
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of {} near {} mod {}^{}",
            self.poly, self.approx, self.p, self.m
        )
    }
}

fn separation_of(poly: &MinimalPolynomial, p: Prime) -> i64 {
    let vd = vp_int(&poly.discriminant(), p).finite().expect("irreducible");
    let va = vp_int(&poly.a, p).finite().unwrap();
    debug_assert!(vd % 2 == 0);
    vd / 2 - va
}

fn quadratic_poly(a: BigInt, b: BigInt, c: BigInt, p: Prime) -> Result<MinimalPolynomial> {
    let poly = MinimalPolynomial::new(a, b, c)?;
    if poly.a.is_zero() {
        return Err(Error::InvalidInput(format!("{poly} is not quadratic")));
    }
    let disc = Rational::from_integer(poly.discriminant());
    if !unit_square_test(&disc, p)? {
        return Err(Error::NoRootInQp {
            poly: poly.to_string(),
            p: p.get(),
        });
    }
    Ok(poly)
}

/// Square root of a p-adic unit square `u`, to `target` digits. The root is
/// normalized so that its first digit is at most `p/2` (`1 mod 4` for `p = 2`).
fn unit_sqrt(u: &BigInt, p: Prime, target: i64) -> Rational {
    let poly = MinimalPolynomial::normalized(BigInt::one(), BigInt::zero(), -u.clone());
    let (start, start_prec, sep) = if p.get() == 2 {
        (1u64, 2, 1)
    } else {
        let residue = u.mod_floor(&p.to_bigint()).to_u64().unwrap();
        let r = sqrt_mod_prime(residue, p).expect("unit is a square");
        (min(r, p.get() - r), 1, 0)
    };
    let start = Rational::from_integer(start.into());
    if start_prec >= target {
        return truncate(&start, p, target);
    }
    newton_lift(&poly, &start, start_prec, sep, target, p)
}

fn roots_of(poly: MinimalPolynomial, p: Prime, guard: i64) -> [QuadraticElement; 2] {
    let disc = poly.discriminant();
    let (vd, unit) = split_unit(&disc, p);
    let half = vd / 2;
    let sep = half - vp_int(&poly.a, p).finite().unwrap();
    let m = sep + guard + 1;
    let two_a = BigInt::from(2) * &poly.a;
    let loss = vp_int(&two_a, p).finite().unwrap();
    // v(alpha - approx) = half + e - v(2a)
    let root = unit_sqrt(&unit, p, max(m - half + loss, 1)) * p.rpow(half);
    let make = |sign: i64| {
        let approx = (Rational::from_integer(-poly.b.clone()) + &root * Rational::from_integer(sign.into()))
            / Rational::from_integer(two_a.clone());
        let x = QuadraticElement {
            poly: poly.clone(),
            p,
            approx: truncate(&approx, p, m),
            m,
            guard,
        };
        debug_assert!(x.selector_is_valid());
        x
    };
    [make(1), make(-1)]
}

/// Moves a quadratic element of `pZ_p` onto a quadratic Hensel root by
/// iterating the algorithm's map choice, returning the emitted terms and the state.
pub fn reduce_to_hensel(
    x: &QuadraticElement,
    algorithm: Algorithm,
    cap: usize,
) -> Result<(Vec<CfTerm>, HenselState)> {
    if x.root_valuation() < 1 {
        return Err(Error::InvalidInput(format!(
            "{x} is not in pZ_p; take the fractional part first"
        )));
    }
    let mut current = x.clone();
    let mut prefix = Vec::new();
    loop {
        if let Some(state) = current.as_hensel_state() {
            return Ok((prefix, state));
        }
        if prefix.len() >= cap {
            return Err(Error::CapExceeded {
                cap,
                last: current.poly.to_string(),
            });
        }
        let which = choose_map(algorithm, current.poly.b(), current.poly.c())?;
        let (term, next) = current.apply_t(which)?;
        prefix.push(term);
        current = next;
    }
}

/// A rational number with its degree-one minimal polynomial `bX + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalElement {
    value: Rational,
    poly: MinimalPolynomial,
    p: Prime,
}

impl RationalElement {
    pub fn new(value: Rational, p: Prime) -> Self {
        let poly = if value.is_zero() {
            MinimalPolynomial::normalized(BigInt::zero(), BigInt::one(), BigInt::zero())
        } else {
            MinimalPolynomial::normalized(
                BigInt::zero(),
                value.denom().clone(),
                -value.numer().clone(),
            )
        };
        RationalElement { value, poly, p }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn poly(&self) -> &MinimalPolynomial {
        &self.poly
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Rational Hensel root: the root `-c` of `X + c` with `p | c`.
    pub fn is_hensel_root(&self) -> bool {
        self.poly.b.is_one() && self.poly.c.is_multiple_of(&self.p.to_bigint())
    }

    pub fn apply_t(&self, which: MapChoice) -> Result<(CfTerm, RationalElement)> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let u = unit_part(&self.poly.c, self.p);
        let t = match which {
            MapChoice::T1 => u,
            MapChoice::T2 => -u,
        };
        self.step_with_numerator(t)
    }

    pub fn step_with_numerator(&self, t: BigInt) -> Result<(CfTerm, RationalElement)> {
        let k = match vp(&self.value, self.p) {
            Valuation::Infinity => return Err(Error::ZeroInput),
            Valuation::Finite(k) => k,
        };
        if k < 1 {
            return Err(Error::InvalidInput(format!(
                "{} has valuation {k}; the maps act on pZ_p",
                self.value
            )));
        }
        let z = Rational::from_integer(&t * self.p.pow(k)) / &self.value;
        let d = integral_part(&z, self.p);
        debug_assert!(d.is_integer());
        let term = CfTerm {
            t,
            k,
            d: d.to_integer().to_u64().unwrap(),
        };
        Ok((term, RationalElement::new(z - d, self.p)))
    }
}

//! Quadratic Hensel roots as integer states `(b, c)` and the closed-form
//! actions of `T1`, `T2` and `T1^-1` on them.
//!
//! A state `(b, c)` stands for the unique root in `pZ_p` of `X^2 + bX + c`,
//! where `b` is a p-adic unit, `p | c`, `c != 0` and the polynomial is
//! irreducible over Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{base_p_digits, is_perfect_square, mod_inverse, split_unit, DigitVector, Prime};
use crate::error::{Error, Result};

/// Which of the two basic maps is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapChoice {
    T1,
    T2,
}

impl fmt::Display for MapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapChoice::T1 => "T1",
            MapChoice::T2 => "T2",
        })
    }
}

/// One partial quotient `t p^k / (d + ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CfTerm {
    /// p-adic unit numerator factor.
    pub t: BigInt,
    /// Exponent of p, at least 1.
    pub k: i64,
    /// Digit in `1..p`.
    pub d: u64,
}

impl CfTerm {
    pub fn is_valid(&self, p: Prime) -> bool {
        !self.t.is_multiple_of(&p.to_bigint()) && self.k >= 1 && self.d >= 1 && self.d < p.get()
    }
}

impl fmt::Display for CfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.t, self.k, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrant {
    S1,
    S2,
    S3,
    S4,
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Membership of a state in the sign quadrants and the distinguished subsets
/// `R`, `R1`, `R4` and `P1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateClass {
    pub quadrant: Quadrant,
    pub in_r: bool,
    pub in_r1: bool,
    pub in_r4: bool,
    pub in_p1: bool,
}

/// The `r in 1..p` with `r = b mod p`.
pub fn residue_r(b: &BigInt, p: Prime) -> Result<BigInt> {
    let r = b.mod_floor(&p.to_bigint());
    if r.is_zero() {
        return Err(Error::InvalidState {
            b: b.to_string(),
            c: "?".into(),
            p: p.get(),
            reason: "b is divisible by p",
        });
    }
    Ok(r)
}

/// Membership in `S`.
pub fn in_s(b: &BigInt, c: &BigInt, p: Prime) -> bool {
    let pb = p.to_bigint();
    !b.is_multiple_of(&pb)
        && c.is_multiple_of(&pb)
        && !c.is_zero()
        && !is_perfect_square(&(b * b - BigInt::from(4) * c))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HenselState {
    b: BigInt,
    c: BigInt,
    p: Prime,
}

impl HenselState {
    pub fn new(b: impl Into<BigInt>, c: impl Into<BigInt>, p: Prime) -> Result<Self> {
        let (b, c) = (b.into(), c.into());
        let pb = p.to_bigint();
        let reason = if b.is_multiple_of(&pb) {
            Some("b is divisible by p")
        } else if c.is_zero() {
            Some("c is zero")
        } else if !c.is_multiple_of(&pb) {
            Some("c is not divisible by p")
        } else if is_perfect_square(&(&b * &b - BigInt::from(4) * &c)) {
            Some("X^2 + bX + c is reducible")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidState {
                b: b.to_string(),
                c: c.to_string(),
                p: p.get(),
                reason,
            }),
            None => Ok(HenselState { b, c, p }),
        }
    }

    fn from_valid(b: BigInt, c: BigInt, p: Prime) -> Self {
        let s = HenselState { b, c, p };
        debug_assert!(in_s(&s.b, &s.c, p), "left S at ({}, {})", s.b, s.c);
        s
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn into_pair(self) -> (BigInt, BigInt) {
        (self.b, self.c)
    }

    fn r(&self) -> BigInt {
        self.b.mod_floor(&self.p.to_bigint())
    }

    pub fn residue(&self) -> BigInt {
        self.r()
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.c
    }

    /// `T1(b, c) = (b + 2(p-r), (p-r)b + c + (p-r)^2)`.
    pub fn t1(&self) -> Self {
        let s = self.p.to_bigint() - self.r();
        let b = &self.b + BigInt::from(2) * &s;
        let c = &s * &self.b + &self.c + &s * &s;
        Self::from_valid(b, c, self.p)
    }

    /// `T2(b, c) = (-b + 2r, -rb + c + r^2)`; an involution on `S`.
    pub fn t2(&self) -> Self {
        let r = self.r();
        let b = BigInt::from(2) * &r - &self.b;
        let c = &self.c - &r * &self.b + &r * &r;
        Self::from_valid(b, c, self.p)
    }

    /// `T1^-1(b, c) = (b - 2r, -rb + c + r^2)`.
    pub fn t1_inverse(&self) -> Self {
        let r = self.r();
        let b = &self.b - BigInt::from(2) * &r;
        let c = &self.c - &r * &self.b + &r * &r;
        Self::from_valid(b, c, self.p)
    }

    pub fn apply(&self, which: MapChoice) -> Self {
        match which {
            MapChoice::T1 => self.t1(),
            MapChoice::T2 => self.t2(),
        }
    }

    /// The term emitted when `which` is applied: `k = v_p(c)`, `t = +-u(c)`,
    /// and `d = p - r` for `T1`, `d = r` for `T2`.
    pub fn emit_term(&self, which: MapChoice) -> CfTerm {
        let (k, u) = split_unit(&self.c, self.p);
        let r = self.r().to_u64().expect("residue fits in u64");
        let term = match which {
            MapChoice::T1 => CfTerm {
                t: u,
                k,
                d: self.p.get() - r,
            },
            MapChoice::T2 => CfTerm { t: -u, k, d: r },
        };
        debug_assert!(term.is_valid(self.p));
        term
    }

    pub fn quadrant(&self) -> Quadrant {
        match (self.b.is_positive(), self.c.is_positive()) {
            (true, true) => Quadrant::S1,
            (false, true) => Quadrant::S2,
            (false, false) => Quadrant::S3,
            (true, false) => Quadrant::S4,
        }
    }

    pub fn in_r(&self) -> bool {
        self.b.is_positive() && self.b < self.p.to_bigint()
    }

    pub fn classify(&self) -> StateClass {
        let quadrant = self.quadrant();
        let in_r = self.in_r();
        let in_r1 = in_r && quadrant == Quadrant::S1;
        let in_r4 = in_r && quadrant == Quadrant::S4;
        let in_p1 = quadrant == Quadrant::S1 && !in_r1 && {
            // [b]<b> = r(b - r) for integer b.
            let r = self.r();
            self.c < &r * (&self.b - &r)
        };
        StateClass {
            quadrant,
            in_r,
            in_r1,
            in_r4,
            in_p1,
        }
    }

    /// The root in `pZ_p` modulo `p^(count + 1)`, as an integer in `[0, p^(count+1))`.
    pub fn root_mod_power(&self, count: usize) -> BigInt {
        let pb = self.p.to_bigint();
        let b_inv = mod_inverse(&self.b, &pb).expect("b is a unit");
        let mut root = BigInt::zero();
        let mut power = pb.clone(); // p^i
        for _ in 0..count {
            let f = &root * &root + &self.b * &root + &self.c;
            debug_assert!(f.is_multiple_of(&power));
            let e = (-(f / &power) * &b_inv).mod_floor(&pb);
            root += &e * &power;
            power *= &pb;
        }
        root
    }

    /// Digits `e_1, ..., e_count` of the root in `pZ_p`, lifted one digit at a time.
    ///
    /// The vector starts at index 1 even when `e_1 = 0`.
    pub fn root_digits(&self, count: usize) -> DigitVector {
        let root = self.root_mod_power(count);
        let all = base_p_digits(&root, self.p, count + 1);
        debug_assert_eq!(all[0], 0);
        DigitVector {
            start_index: 1,
            digits: all[1..].to_vec(),
            prime: self.p,
        }
    }
}

impl fmt::Display for HenselState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    fn st(b: i64, c: i64) -> HenselState {
        HenselState::new(b, c, p5()).unwrap()
    }

    fn pair(s: &HenselState) -> (i64, i64) {
        (s.b().to_i64().unwrap(), s.c().to_i64().unwrap())
    }

    #[test]
    fn residues() {
        for (b, r) in [(3, 3), (-2, 3), (13, 3)] {
            assert_eq!(residue_r(&BigInt::from(b), p5()).unwrap(), BigInt::from(r));
        }
        assert!(residue_r(&BigInt::from(10), p5()).is_err());
    }

    #[test]
    fn membership() {
        let p = p5();
        assert!(in_s(&3.into(), &5.into(), p));
        assert!(!in_s(&5.into(), &5.into(), p));
        assert!(!in_s(&3.into(), &2.into(), p));
        assert!(!in_s(&3.into(), &0.into(), p));
        // X^2 + 6X + 5 = (X + 1)(X + 5)
        assert!(!in_s(&6.into(), &5.into(), p));
        assert!(HenselState::new(6, 5, p).is_err());
    }

    #[test]
    fn classification() {
        let c = st(3, 5).classify();
        assert_eq!(c.quadrant, Quadrant::S1);
        assert!(c.in_r && c.in_r1 && !c.in_p1 && !c.in_r4);
        let c = st(8, 5).classify();
        assert_eq!(c.quadrant, Quadrant::S1);
        assert!(c.in_p1 && !c.in_r);
        let c = st(8, 25).classify();
        assert!(!c.in_p1);
        let c = st(3, -5).classify();
        assert_eq!(c.quadrant, Quadrant::S4);
        assert!(c.in_r4 && !c.in_r1);
        assert_eq!(st(-3, -35).quadrant(), Quadrant::S3);
        assert_eq!(st(-2, 5).quadrant(), Quadrant::S2);
    }

    #[test]
    fn closed_form_maps() {
        assert_eq!(pair(&st(-2, 5).t1()), (2, 5));
        assert_eq!(pair(&st(-7, -25).t1()), (-3, -35));
        assert_eq!(pair(&st(3, -5).t1()), (7, 5));
        assert_eq!(pair(&st(3, 5).t2()), (3, 5));
        assert_eq!(pair(&st(13, 5).t2()), (-7, -25));
        assert_eq!(pair(&st(-7, -25).t2()), (13, 5));
        assert_eq!(pair(&st(2, 5).t1_inverse()), (-2, 5));
        assert_eq!(pair(&st(7, 5).t1_inverse()), (3, -5));
        assert_eq!(pair(&st(3, 5).t1_inverse()), (-3, 5));
    }

    #[test]
    fn discriminants() {
        assert_eq!(st(3, 5).discriminant(), BigInt::from(-11));
        assert_eq!(st(13, 5).discriminant(), BigInt::from(149));
        assert_eq!(st(-7, -25).discriminant(), BigInt::from(149));
    }

    #[test]
    fn emitted_terms() {
        let t = st(3, 5).emit_term(MapChoice::T2);
        assert_eq!((t.t, t.k, t.d), (BigInt::from(-1), 1, 3));
        let t = st(-2, 5).emit_term(MapChoice::T1);
        assert_eq!((t.t, t.k, t.d), (BigInt::from(1), 1, 2));
        let t = st(13, 25).emit_term(MapChoice::T2);
        assert_eq!((t.t, t.k, t.d), (BigInt::from(-1), 2, 3));
    }

    /// Brute-force search for the root of `X^2 + bX + c` in `pZ` modulo `p^(n+1)`.
    fn brute_root(b: i64, c: i64, p: i64, n: u32) -> i64 {
        let m = p.pow(n + 1);
        let hits: Vec<i64> = (0..m)
            .filter(|a| a % p == 0 && (a * a + b * a + c).rem_euclid(m) == 0)
            .collect();
        assert_eq!(hits.len(), 1, "Hensel root is unique mod p^(n+1)");
        hits[0]
    }

    #[test]
    fn root_digits_match_brute_force() {
        assert_eq!(brute_root(3, 5, 5, 3), 215);
        assert_eq!(brute_root(3, 5, 5, 2), 90);
        assert_eq!(st(3, 5).root_digits(3).digits, vec![3, 3, 1]);
        assert_eq!(st(3, 5).root_digits(2).digits, vec![3, 3]);
        for p in [3u64, 5, 7] {
            let prime = Prime::new(p).unwrap();
            let s = HenselState::new(1, -(p as i64), prime).unwrap();
            let expected = brute_root(1, -(p as i64), p as i64, 1) / p as i64;
            assert_eq!(s.root_digits(1).digits, vec![expected as u64]);
        }
        for (b, c) in [(13, 25), (-7, -25), (1, 10), (4, -40)] {
            let s = st(b, c);
            assert_eq!(
                s.root_mod_power(3),
                BigInt::from(brute_root(b, c, 5, 3)),
                "state ({b}, {c})"
            );
        }
    }

    #[test]
    fn p_equals_two_uses_residue_one() {
        let p = Prime::new(2).unwrap();
        let s = HenselState::new(3, 4, p).unwrap();
        assert_eq!(s.residue(), BigInt::from(1));
        assert_eq!(s.t2().t2(), s);
        assert_eq!(s.t1().t1_inverse(), s);
    }
}

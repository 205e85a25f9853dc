//! Algorithm dispatch, the expansion driver, convergents and their checks.
//!
//! An expansion of `alpha` has the form
//!
//! ```text
//! d0 + t1 p^k1 / (d1 + t2 p^k2 / (d2 + ...))
//! ```
//!
//! with `d0 = [alpha]`. Quadratic inputs are first moved onto a quadratic
//! Hensel root through the general maps; from there the orbit is followed on
//! exact `(b, c)` states and cycles are found by table lookup.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{integral_part, vp, vp_int, Prime, Rational, Valuation};
use crate::error::{Error, Result};
use crate::hensel::{CfTerm, HenselState, MapChoice, Quadrant};
use crate::quadratic::{reduce_to_hensel, QuadraticElement, RationalElement};

pub const DEFAULT_EXPAND_CAP: usize = 10_000;
pub const DEFAULT_SCHNEIDER_CAP: usize = 256;
/// Digits beyond the predicted error valuation used by [`verify_convergence`].
pub const VERIFY_GUARD: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    A,
    B,
    C,
    /// `t(x) = 1` with digits in `1..p`.
    Schneider,
}

impl Algorithm {
    pub const PERIODIC: [Algorithm; 3] = [Algorithm::A, Algorithm::B, Algorithm::C];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::A => "A",
            Algorithm::B => "B",
            Algorithm::C => "C",
            Algorithm::Schneider => "schneider",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Algorithm::A),
            "b" => Ok(Algorithm::B),
            "c" => Ok(Algorithm::C),
            "schneider" | "s" => Ok(Algorithm::Schneider),
            _ => Err(Error::InvalidAlgorithm(s.to_string())),
        }
    }
}

/// Map selection from the coefficients `b`, `c` of the current minimal polynomial.
pub fn choose_map(algorithm: Algorithm, b: &BigInt, c: &BigInt) -> Result<MapChoice> {
    Ok(match algorithm {
        Algorithm::A => MapChoice::T2,
        Algorithm::B if !b.is_negative() => MapChoice::T2,
        Algorithm::B => MapChoice::T1,
        Algorithm::C if !b.is_negative() && c.is_positive() => MapChoice::T2,
        Algorithm::C => MapChoice::T1,
        Algorithm::Schneider => return Err(Error::InvalidAlgorithm(algorithm.to_string())),
    })
}

/// An element of `Q_p` of degree at most two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Rational(RationalElement),
    Quadratic(QuadraticElement),
}

impl Element {
    pub fn prime(&self) -> Prime {
        match self {
            Element::Rational(x) => x.prime(),
            Element::Quadratic(x) => x.prime(),
        }
    }

    /// Approximation with `v_p(alpha - y) >= precision`; exact for rationals.
    pub fn approximate(&self, precision: i64) -> Rational {
        match self {
            Element::Rational(x) => x.value().clone(),
            Element::Quadratic(x) => x.approximate(precision),
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Element::Rational(_))
    }
}

impl From<RationalElement> for Element {
    fn from(x: RationalElement) -> Self {
        Element::Rational(x)
    }
}

impl From<QuadraticElement> for Element {
    fn from(x: QuadraticElement) -> Self {
        Element::Quadratic(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionStatus {
    Finite,
    EventuallyPeriodic { preperiod: usize, period: usize },
    Truncated { cap: usize },
}

/// `d0` plus the emitted terms. A periodic expansion stores the preperiod
/// followed by exactly one period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub p: Prime,
    pub d0: Rational,
    pub terms: Vec<CfTerm>,
    pub status: ExpansionStatus,
    /// First quadratic Hensel root reached, for quadratic inputs.
    pub hensel_state: Option<HenselState>,
}

impl CfExpansion {
    /// Number of terms, or `None` for an infinite (periodic) expansion.
    pub fn available(&self) -> Option<usize> {
        match self.status {
            ExpansionStatus::EventuallyPeriodic { .. } => None,
            _ => Some(self.terms.len()),
        }
    }

    /// The `n`-th term, 1-based, unrolling the period as needed.
    pub fn term(&self, n: usize) -> Option<&CfTerm> {
        if n == 0 {
            return None;
        }
        match self.status {
            ExpansionStatus::EventuallyPeriodic { preperiod, period } if n > preperiod => {
                self.terms.get(preperiod + (n - 1 - preperiod) % period)
            }
            _ => self.terms.get(n - 1),
        }
    }

    /// The first `n` terms (fewer if the expansion is shorter).
    pub fn unrolled(&self, n: usize) -> Vec<CfTerm> {
        (1..=n).map_while(|i| self.term(i).cloned()).collect()
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.d0.is_zero()
            && matches!(
                self.status,
                ExpansionStatus::EventuallyPeriodic { preperiod: 0, .. }
            )
    }
}

/// Orbit of a Hensel state: distinct states in visiting order, the map used
/// at each, and the cycle shape. `states.len() == preperiod + period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub states: Vec<HenselState>,
    pub maps: Vec<MapChoice>,
    pub preperiod: usize,
    pub period: usize,
}

impl Orbit {
    pub fn is_pure(&self) -> bool {
        self.preperiod == 0
    }
}

/// Follows the closed-form orbit of `start` until a state repeats.
pub fn hensel_orbit(start: &HenselState, algorithm: Algorithm, cap: usize) -> Result<Orbit> {
    let mut seen: HashMap<HenselState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut maps = Vec::new();
    let mut current = start.clone();
    loop {
        if let Some(&first) = seen.get(&current) {
            return Ok(Orbit {
                preperiod: first,
                period: states.len() - first,
                states,
                maps,
            });
        }
        if states.len() >= cap {
            return Err(Error::CapExceeded {
                cap,
                last: current.to_string(),
            });
        }
        let which = choose_map(algorithm, current.b(), current.c())?;
        let next = current.apply(which);
        seen.insert(current.clone(), states.len());
        states.push(current);
        maps.push(which);
        current = next;
    }
}

pub fn expand(input: &Element, algorithm: Algorithm, cap: usize) -> Result<CfExpansion> {
    if algorithm == Algorithm::Schneider {
        return schneider_expand(input, cap);
    }
    match input {
        Element::Rational(x) => expand_rational(x, algorithm, cap),
        Element::Quadratic(x) => expand_quadratic(x, algorithm, cap),
    }
}

fn expand_rational(x: &RationalElement, algorithm: Algorithm, cap: usize) -> Result<CfExpansion> {
    let p = x.prime();
    let d0 = integral_part(x.value(), p);
    let mut current = RationalElement::new(x.value() - &d0, p);
    let mut terms = Vec::new();
    while !current.is_zero() {
        if terms.len() >= cap {
            return Err(Error::CapExceeded {
                cap,
                last: current.value().to_string(),
            });
        }
        let which = choose_map(algorithm, current.poly().b(), current.poly().c())?;
        let (term, next) = current.apply_t(which)?;
        terms.push(term);
        current = next;
    }
    Ok(CfExpansion {
        p,
        d0,
        terms,
        status: ExpansionStatus::Finite,
        hensel_state: None,
    })
}

fn expand_quadratic(x: &QuadraticElement, algorithm: Algorithm, cap: usize) -> Result<CfExpansion> {
    let (d0, frac) = x.fractional_step();
    let reduce_cap = cap.min(frac.default_reduction_cap());
    let (mut terms, state) = reduce_to_hensel(&frac, algorithm, reduce_cap)?;
    let orbit = hensel_orbit(&state, algorithm, cap.saturating_sub(terms.len()))?;
    let preperiod = terms.len() + orbit.preperiod;
    terms.extend(
        orbit
            .states
            .iter()
            .zip(&orbit.maps)
            .map(|(s, &which)| s.emit_term(which)),
    );
    Ok(CfExpansion {
        p: x.prime(),
        d0,
        terms,
        status: ExpansionStatus::EventuallyPeriodic {
            preperiod,
            period: orbit.period,
        },
        hensel_state: Some(state),
    })
}

/// Expansion with `t(x) = 1`. Quadratic inputs always stop at the cap with
/// status `Truncated`; rationals may terminate.
pub fn schneider_expand(input: &Element, cap: usize) -> Result<CfExpansion> {
    let p = input.prime();
    let mut terms = Vec::new();
    match input {
        Element::Rational(x) => {
            let d0 = integral_part(x.value(), p);
            let mut current = RationalElement::new(x.value() - &d0, p);
            while !current.is_zero() {
                if terms.len() >= cap {
                    return Ok(truncated(p, d0, terms, cap));
                }
                let (term, next) = current.step_with_numerator(BigInt::one())?;
                terms.push(term);
                current = next;
            }
            Ok(CfExpansion {
                p,
                d0,
                terms,
                status: ExpansionStatus::Finite,
                hensel_state: None,
            })
        }
        Element::Quadratic(x) => {
            let (d0, mut current) = x.fractional_step();
            for _ in 0..cap {
                let (term, next) = current.step_with_numerator(BigInt::one())?;
                terms.push(term);
                current = next;
            }
            Ok(truncated(p, d0, terms, cap))
        }
    }
}

fn truncated(p: Prime, d0: Rational, terms: Vec<CfTerm>, cap: usize) -> CfExpansion {
    CfExpansion {
        p,
        d0,
        terms,
        status: ExpansionStatus::Truncated { cap },
        hensel_state: None,
    }
}

/// `(p_n, q_n)` from the three-term recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub pn: BigInt,
    pub qn: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        Rational::new(self.pn.clone(), self.qn.clone())
    }
}

fn term_numerator(term: &CfTerm, p: Prime) -> BigInt {
    &term.t * p.pow(term.k)
}

/// Convergents `n = 0..=upto`, stopping early at the end of a finite expansion.
pub fn convergents(e: &CfExpansion, upto: usize) -> Vec<Convergent> {
    let terms = e.unrolled(upto);
    let (mut p_prev, mut p_cur) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    let mut out = vec![Convergent {
        n: 0,
        pn: p_cur.clone(),
        qn: q_cur.clone(),
    }];
    for (i, term) in terms.iter().enumerate() {
        let d = BigInt::from(term.d);
        let num = term_numerator(term, e.p);
        let p_next = &d * &p_cur + &num * &p_prev;
        let q_next = &d * &q_cur + &num * &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        out.push(Convergent {
            n: i + 1,
            pn: p_cur.clone(),
            qn: q_cur.clone(),
        });
    }
    out
}

/// Bottom-up value of `t1 p^k1 / (d1 + ... + tN p^kN / dN)`; zero for no terms.
pub fn evaluate_terms(terms: &[CfTerm], p: Prime) -> Result<Rational> {
    let mut tail = Rational::zero();
    for term in terms.iter().rev() {
        let denom = Rational::from_integer(BigInt::from(term.d)) + &tail;
        if denom.is_zero() {
            return Err(Error::MalformedExpansion(format!(
                "zero denominator at term {term}"
            )));
        }
        tail = Rational::from_integer(term_numerator(term, p)) / denom;
    }
    Ok(tail)
}

pub fn evaluate_finite(e: &CfExpansion) -> Result<Rational> {
    if e.status != ExpansionStatus::Finite {
        return Err(Error::MalformedExpansion(
            "only finite expansions have an exact value".into(),
        ));
    }
    Ok(&e.d0 + evaluate_terms(&e.terms, e.p)?)
}

/// Outcome of checking the error valuation of the `n`-th convergent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub n: usize,
    /// `sum_{i<=n+1} k_i`, or infinity at the last step of a finite expansion.
    pub predicted: Valuation,
    pub computed: Valuation,
}

fn verification_failed(index: usize, expected: impl fmt::Display, actual: impl fmt::Display) -> Error {
    Error::VerificationFailed {
        index,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// Checks `v_p(<alpha> - p_n/q_n) = k_1 + ... + k_{n+1}` together with the
/// determinant identity, unit denominators and truncated evaluation for
/// every index up to `n`.
pub fn verify_convergence(x: &Element, e: &CfExpansion, n: usize) -> Result<ConvergenceReport> {
    let p = e.p;
    if n == 0 {
        return Err(Error::InvalidInput("convergence index starts at 1".into()));
    }
    if let Some(len) = e.available() {
        if n > len {
            return Err(Error::InvalidInput(format!(
                "expansion has {len} terms, asked for n = {n}"
            )));
        }
    }
    let terminal = e.status == ExpansionStatus::Finite && Some(n) == e.available();
    let terms = e.unrolled(n + 1);
    if !terminal && terms.len() < n + 1 {
        return Err(Error::InvalidInput(format!(
            "term {} is needed to predict the error at n = {n}",
            n + 1
        )));
    }
    let convs = convergents(e, n);

    let mut product = BigInt::one();
    for j in 0..=n {
        if vp_int(&convs[j].qn, p) != Valuation::Finite(0) {
            return Err(verification_failed(j, "v_p(q_n) = 0", format!("q_n = {}", convs[j].qn)));
        }
        if j == 0 {
            continue;
        }
        product *= -term_numerator(&terms[j - 1], p);
        let det = &convs[j - 1].pn * &convs[j].qn - &convs[j].pn * &convs[j - 1].qn;
        if det != product {
            return Err(verification_failed(j, &product, det));
        }
        let direct = evaluate_terms(&terms[..j], p)?;
        if direct != convs[j].value() {
            return Err(verification_failed(j, convs[j].value(), direct));
        }
    }

    let predicted = if terminal {
        Valuation::Infinity
    } else {
        Valuation::Finite(terms[..=n].iter().map(|t| t.k).sum())
    };
    let computed = if x.is_exact() {
        vp(&(x.approximate(0) - &e.d0 - convs[n].value()), p)
    } else {
        let precision = predicted.finite().unwrap_or(0) + VERIFY_GUARD;
        let diff = x.approximate(precision) - &e.d0 - convs[n].value();
        match vp(&diff, p) {
            Valuation::Finite(v) if v < precision => Valuation::Finite(v),
            _ => {
                return Err(verification_failed(
                    n,
                    predicted,
                    format!(">= {precision}"),
                ))
            }
        }
    };
    if computed != predicted {
        return Err(verification_failed(n, predicted, computed));
    }
    Ok(ConvergenceReport {
        n,
        predicted,
        computed,
    })
}

/// Closed-form membership in the reduced set of the algorithm:
/// all of `S` for A, `R` for B, and `P1 u R1 u S3 u S4` for C.
pub fn classify_pure_periodicity(s: &HenselState, algorithm: Algorithm) -> Result<bool> {
    let class = s.classify();
    match algorithm {
        Algorithm::A => Ok(true),
        Algorithm::B => Ok(class.in_r),
        Algorithm::C => Ok(class.in_p1
            || class.in_r1
            || matches!(class.quadrant, Quadrant::S3 | Quadrant::S4)),
        Algorithm::Schneider => Err(Error::InvalidAlgorithm(algorithm.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn term(t: i64, k: i64, d: u64) -> CfTerm {
        CfTerm { t: t.into(), k, d }
    }

    fn rational(n: i64, d: i64) -> Element {
        RationalElement::new(q(n, d), p5()).into()
    }

    fn hensel(b: i64, c: i64) -> Element {
        QuadraticElement::from_hensel(&HenselState::new(b, c, p5()).unwrap()).into()
    }

    #[test]
    fn map_table() {
        let (b, c) = (BigInt::from(-7), BigInt::from(-25));
        assert_eq!(choose_map(Algorithm::A, &b, &c).unwrap(), MapChoice::T2);
        assert_eq!(choose_map(Algorithm::B, &b, &c).unwrap(), MapChoice::T1);
        assert_eq!(
            choose_map(Algorithm::C, &3.into(), &(-5).into()).unwrap(),
            MapChoice::T1
        );
        assert_eq!(
            choose_map(Algorithm::C, &0.into(), &5.into()).unwrap(),
            MapChoice::T2
        );
        assert!(choose_map(Algorithm::Schneider, &b, &c).is_err());
    }

    #[test]
    fn rational_expansions() {
        let e = expand(&rational(5, 3), Algorithm::A, 100).unwrap();
        assert_eq!(e.d0, q(0, 1));
        assert_eq!(e.terms, vec![term(1, 1, 3)]);
        assert_eq!(e.status, ExpansionStatus::Finite);
        let e = expand(&rational(5, 3), Algorithm::C, 100).unwrap();
        assert_eq!(e.terms, vec![term(-1, 1, 2), term(-1, 1, 1)]);
        assert_eq!(evaluate_finite(&e).unwrap(), q(5, 3));
        let e = expand(&rational(2, 1), Algorithm::B, 100).unwrap();
        assert_eq!((e.d0.clone(), e.terms.len()), (q(2, 1), 0));
    }

    #[test]
    fn quadratic_expansions() {
        let e = expand(&hensel(3, 5), Algorithm::A, 100).unwrap();
        assert_eq!(
            e.status,
            ExpansionStatus::EventuallyPeriodic {
                preperiod: 0,
                period: 1
            }
        );
        assert_eq!(e.terms, vec![term(-1, 1, 3)]);
        assert!(e.is_purely_periodic());

        let e = expand(&hensel(13, 5), Algorithm::B, 100).unwrap();
        assert_eq!(
            e.status,
            ExpansionStatus::EventuallyPeriodic {
                preperiod: 3,
                period: 1
            }
        );

        let e = expand(&hensel(3, -5), Algorithm::C, 100).unwrap();
        assert_eq!(
            e.status,
            ExpansionStatus::EventuallyPeriodic {
                preperiod: 0,
                period: 3
            }
        );
    }

    #[test]
    fn orbit_shapes() {
        let s = HenselState::new(13, 5, p5()).unwrap();
        let o = hensel_orbit(&s, Algorithm::B, 100).unwrap();
        let pairs: Vec<String> = o.states.iter().map(|s| s.to_string()).collect();
        assert_eq!(pairs, ["(13, 5)", "(-7, -25)", "(-3, -35)", "(3, -35)"]);
        assert_eq!((o.preperiod, o.period), (3, 1));
        let o = hensel_orbit(&s, Algorithm::A, 100).unwrap();
        assert_eq!((o.preperiod, o.period), (0, 2));
        let s = HenselState::new(3, -5, p5()).unwrap();
        let o = hensel_orbit(&s, Algorithm::C, 100).unwrap();
        let pairs: Vec<String> = o.states.iter().map(|s| s.to_string()).collect();
        assert_eq!(pairs, ["(3, -5)", "(7, 5)", "(-3, -5)"]);
        assert!(matches!(
            hensel_orbit(&s, Algorithm::C, 2),
            Err(Error::CapExceeded { cap: 2, .. })
        ));
    }

    #[test]
    fn convergent_recursion() {
        let e = expand(&hensel(3, 5), Algorithm::A, 100).unwrap();
        let c = convergents(&e, 2);
        assert_eq!((c[0].pn.clone(), c[0].qn.clone()), (0.into(), 1.into()));
        assert_eq!((c[1].pn.clone(), c[1].qn.clone()), ((-5).into(), 3.into()));
        assert_eq!((c[2].pn.clone(), c[2].qn.clone()), ((-15).into(), 4.into()));
        let finite = expand(&rational(5, 3), Algorithm::A, 100).unwrap();
        assert_eq!(convergents(&finite, 10).len(), 2);
    }

    #[test]
    fn finite_evaluation() {
        let e = CfExpansion {
            p: p5(),
            d0: q(0, 1),
            terms: vec![term(-1, 1, 2), term(-1, 1, 1)],
            status: ExpansionStatus::Finite,
            hensel_state: None,
        };
        assert_eq!(evaluate_finite(&e).unwrap(), q(5, 3));
        let e = CfExpansion {
            d0: q(2, 1),
            terms: vec![],
            ..e
        };
        assert_eq!(evaluate_finite(&e).unwrap(), q(2, 1));
        // Valid terms never produce a zero denominator; a zero digit does.
        let bad = [term(1, 1, 1), term(1, 1, 0)];
        let err = evaluate_terms(&bad, p5()).unwrap_err();
        assert!(matches!(err, Error::MalformedExpansion(_)));
        let periodic = expand(&hensel(3, 5), Algorithm::A, 10).unwrap();
        assert!(evaluate_finite(&periodic).is_err());
    }

    #[test]
    fn convergence_examples() {
        let x = hensel(3, 5);
        let e = expand(&x, Algorithm::A, 100).unwrap();
        for (n, v) in [(1, 2), (2, 3), (5, 6)] {
            let r = verify_convergence(&x, &e, n).unwrap();
            assert_eq!(r.computed, Valuation::Finite(v));
        }
        let x = rational(5, 3);
        let e = expand(&x, Algorithm::A, 100).unwrap();
        let r = verify_convergence(&x, &e, 1).unwrap();
        assert_eq!(r.computed, Valuation::Infinity);
        assert!(verify_convergence(&x, &e, 2).is_err());
    }

    #[test]
    fn reduced_sets() {
        let s = |b: i64, c: i64| HenselState::new(b, c, p5()).unwrap();
        assert!(classify_pure_periodicity(&s(13, 5), Algorithm::A).unwrap());
        assert!(!classify_pure_periodicity(&s(13, 5), Algorithm::B).unwrap());
        assert!(classify_pure_periodicity(&s(3, 5), Algorithm::B).unwrap());
        assert!(!classify_pure_periodicity(&s(8, 25), Algorithm::C).unwrap());
        assert!(classify_pure_periodicity(&s(8, 5), Algorithm::C).unwrap());
        assert!(classify_pure_periodicity(&s(3, -5), Algorithm::C).unwrap());
        assert!(classify_pure_periodicity(&s(3, 5), Algorithm::Schneider).is_err());
    }

    #[test]
    fn schneider() {
        let e = schneider_expand(&rational(5, 3), 50).unwrap();
        let first = &e.terms[0];
        assert_eq!((first.t.clone(), first.k), (BigInt::one(), 1));
        assert!((1..5).contains(&first.d));
        if e.status == ExpansionStatus::Finite {
            assert_eq!(evaluate_finite(&e).unwrap(), q(5, 3));
        }
        let e = schneider_expand(&hensel(3, 25), 5).unwrap();
        assert_eq!(e.terms[0].k, 2);
        assert_eq!(e.status, ExpansionStatus::Truncated { cap: 5 });
        assert!(e.terms.iter().all(|t| t.t.is_one()));
        let e = schneider_expand(&rational(0, 1), 5).unwrap();
        assert!(e.terms.is_empty());
        assert_eq!(e.status, ExpansionStatus::Finite);
    }
}

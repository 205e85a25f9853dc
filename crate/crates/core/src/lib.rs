//! Exact p-adic continued fraction expansions.
//!
//! Rational and quadratic elements of `Q_p` are expanded as
//! `d0 + t1 p^k1 / (d1 + t2 p^k2 / (d2 + ...))` with three map-selection
//! rules (A, B, C) built on two basic maps `T1`, `T2`, plus the `t = 1`
//! baseline. All arithmetic is exact: rationals terminate, quadratics are
//! followed through exact minimal polynomials until their `(b, c)` state
//! orbit closes.
//!
//! ```
//! use padic_cf::{expand, Algorithm, Element, Prime, QuadraticElement, ExpansionStatus};
//!
//! let p = Prime::new(5).unwrap();
//! let x = QuadraticElement::default_root(1, 3, 5, p).unwrap();
//! let e = expand(&Element::from(x), Algorithm::A, 100).unwrap();
//! assert_eq!(e.status, ExpansionStatus::EventuallyPeriodic { preperiod: 0, period: 1 });
//! ```

pub mod arith;
pub mod census;
pub mod engine;
pub mod error;
pub mod hensel;
pub mod quadratic;

pub use arith::{
    digits, fractional_part, integral_part, unit_square_test, vp, DigitVector, Prime, Rational,
    Valuation,
};
pub use census::{run_census, CensusConfig, CensusReport, CensusRow, Violation};
pub use engine::{
    choose_map, classify_pure_periodicity, convergents, evaluate_finite, evaluate_terms, expand,
    hensel_orbit, schneider_expand, verify_convergence, Algorithm, CfExpansion,
    ConvergenceReport, Convergent, Element, ExpansionStatus, Orbit, DEFAULT_EXPAND_CAP,
    DEFAULT_SCHNEIDER_CAP,
};
pub use error::{Error, Result};
pub use hensel::{in_s, residue_r, CfTerm, HenselState, MapChoice, Quadrant, StateClass};
pub use quadratic::{
    newton_valuations, reduce_to_hensel, CaseLabel, MinimalPolynomial, QuadraticElement,
    RationalElement, DEFAULT_GUARD,
};

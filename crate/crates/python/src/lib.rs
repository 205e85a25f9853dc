//! Python module `padic_cf_py`.

use num_bigint::BigInt;
use padic_cf::arith::{format_rational, parse_rational};
use padic_cf::{
    convergents, evaluate_finite, expand, hensel_orbit, verify_convergence, Algorithm, CfExpansion,
    Element, Error, ExpansionStatus, MapChoice, Prime, QuadraticElement, Rational, RationalElement,
    Valuation, DEFAULT_EXPAND_CAP, DEFAULT_SCHNEIDER_CAP,
};
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::CapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::VerificationFailed { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn prime(p: u64) -> PyResult<Prime> {
    Prime::new(p).map_err(to_py)
}

fn rational(x: &str) -> PyResult<Rational> {
    parse_rational(x).map_err(to_py)
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(to_py)
}

fn map_choice(name: &str) -> PyResult<MapChoice> {
    match name {
        "T1" | "t1" => Ok(MapChoice::T1),
        "T2" | "t2" => Ok(MapChoice::T2),
        _ => Err(PyValueError::new_err(format!("unknown map {name:?}"))),
    }
}

fn finite(v: Valuation) -> Option<i64> {
    v.finite()
}

/// p-adic valuation of a rational given as `"n/d"`; `None` for zero.
#[pyfunction]
fn vp(x: &str, p: u64) -> PyResult<Option<i64>> {
    Ok(finite(padic_cf::vp(&rational(x)?, prime(p)?)))
}

/// `(start_index, digits)` of the first `count` digits of `x`.
#[pyfunction]
fn digits(x: &str, p: u64, count: usize) -> PyResult<(i64, Vec<u64>)> {
    let d = padic_cf::digits(&rational(x)?, prime(p)?, count).map_err(to_py)?;
    Ok((d.start_index, d.digits))
}

#[pyfunction]
fn integral_part(x: &str, p: u64) -> PyResult<String> {
    Ok(format_rational(&padic_cf::integral_part(&rational(x)?, prime(p)?)))
}

#[pyfunction]
fn fractional_part(x: &str, p: u64) -> PyResult<String> {
    Ok(format_rational(&padic_cf::fractional_part(&rational(x)?, prime(p)?)))
}

#[pyclass(name = "HenselState", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyHenselState(padic_cf::HenselState);

#[pymethods]
impl PyHenselState {
    #[new]
    fn new(b: BigInt, c: BigInt, p: u64) -> PyResult<Self> {
        Ok(Self(padic_cf::HenselState::new(b, c, prime(p)?).map_err(to_py)?))
    }

    #[getter]
    fn b(&self) -> BigInt {
        self.0.b().clone()
    }

    #[getter]
    fn c(&self) -> BigInt {
        self.0.c().clone()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.prime().get()
    }

    fn discriminant(&self) -> BigInt {
        self.0.discriminant()
    }

    fn t1(&self) -> Self {
        Self(self.0.t1())
    }

    fn t2(&self) -> Self {
        Self(self.0.t2())
    }

    fn t1_inverse(&self) -> Self {
        Self(self.0.t1_inverse())
    }

    /// `(t, k, d)` emitted by map `"T1"` or `"T2"`.
    fn emit_term(&self, which: &str) -> PyResult<(BigInt, i64, u64)> {
        let t = self.0.emit_term(map_choice(which)?);
        Ok((t.t, t.k, t.d))
    }

    fn in_r(&self) -> bool {
        self.0.in_r()
    }

    fn quadrant(&self) -> String {
        self.0.quadrant().to_string()
    }

    /// `(preperiod, period, states)` under the given algorithm.
    #[pyo3(signature = (algorithm, cap = DEFAULT_EXPAND_CAP))]
    fn orbit(&self, algorithm: &str, cap: usize) -> PyResult<(usize, usize, Vec<PyHenselState>)> {
        let o = hensel_orbit(&self.0, self::algorithm(algorithm)?, cap).map_err(to_py)?;
        Ok((o.preperiod, o.period, o.states.into_iter().map(Self).collect()))
    }

    fn __repr__(&self) -> String {
        format!("HenselState({}, {}, p={})", self.0.b(), self.0.c(), self.0.prime())
    }
}

#[pyclass(name = "Expansion", frozen)]
struct PyExpansion {
    input: Element,
    inner: CfExpansion,
    algorithm: Algorithm,
}

fn term_tuple(t: &padic_cf::CfTerm) -> (BigInt, i64, u64) {
    (t.t.clone(), t.k, t.d)
}

#[pymethods]
impl PyExpansion {
    #[getter]
    fn p(&self) -> u64 {
        self.inner.p.get()
    }

    #[getter]
    fn algorithm(&self) -> String {
        self.algorithm.to_string()
    }

    #[getter]
    fn d0(&self) -> String {
        format_rational(&self.inner.d0)
    }

    /// Stored terms: the preperiod followed by one period for periodic expansions.
    #[getter]
    fn terms(&self) -> Vec<(BigInt, i64, u64)> {
        self.inner.terms.iter().map(term_tuple).collect()
    }

    /// `"finite"`, `"periodic"` or `"truncated"`.
    #[getter]
    fn status(&self) -> &'static str {
        match self.inner.status {
            ExpansionStatus::Finite => "finite",
            ExpansionStatus::EventuallyPeriodic { .. } => "periodic",
            ExpansionStatus::Truncated { .. } => "truncated",
        }
    }

    #[getter]
    fn preperiod(&self) -> Option<usize> {
        match self.inner.status {
            ExpansionStatus::EventuallyPeriodic { preperiod, .. } => Some(preperiod),
            _ => None,
        }
    }

    #[getter]
    fn period(&self) -> Option<usize> {
        match self.inner.status {
            ExpansionStatus::EventuallyPeriodic { period, .. } => Some(period),
            _ => None,
        }
    }

    #[getter]
    fn hensel_state(&self) -> Option<PyHenselState> {
        self.inner.hensel_state.clone().map(PyHenselState)
    }

    fn is_purely_periodic(&self) -> bool {
        self.inner.is_purely_periodic()
    }

    fn unrolled(&self, n: usize) -> Vec<(BigInt, i64, u64)> {
        self.inner.unrolled(n).iter().map(term_tuple).collect()
    }

    /// `[(p_n, q_n)]` for `n = 0..=upto`.
    fn convergents(&self, upto: usize) -> Vec<(BigInt, BigInt)> {
        convergents(&self.inner, upto)
            .into_iter()
            .map(|c| (c.pn, c.qn))
            .collect()
    }

    /// Exact value of a finite expansion as `"n/d"`.
    fn evaluate(&self) -> PyResult<String> {
        Ok(format_rational(&evaluate_finite(&self.inner).map_err(to_py)?))
    }

    /// `(predicted, computed)` error valuations of the `n`-th convergent; `None` means exact.
    fn verify(&self, n: usize) -> PyResult<(Option<i64>, Option<i64>)> {
        let r = verify_convergence(&self.input, &self.inner, n).map_err(to_py)?;
        Ok((finite(r.predicted), finite(r.computed)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Expansion(p={}, algorithm={}, d0={}, terms={}, status={:?})",
            self.inner.p,
            self.algorithm,
            format_rational(&self.inner.d0),
            self.inner.terms.len(),
            self.inner.status
        )
    }
}

fn run(input: Element, algorithm: &str, cap: Option<usize>) -> PyResult<PyExpansion> {
    let alg = self::algorithm(algorithm)?;
    let cap = cap.unwrap_or(match alg {
        Algorithm::Schneider => DEFAULT_SCHNEIDER_CAP,
        _ => DEFAULT_EXPAND_CAP,
    });
    let inner = expand(&input, alg, cap).map_err(to_py)?;
    Ok(PyExpansion {
        input,
        inner,
        algorithm: alg,
    })
}

#[pyfunction]
#[pyo3(signature = (value, p, algorithm = "A", cap = None))]
fn expand_rational(value: &str, p: u64, algorithm: &str, cap: Option<usize>) -> PyResult<PyExpansion> {
    let x = RationalElement::new(rational(value)?, prime(p)?);
    run(x.into(), algorithm, cap)
}

/// Expands a root of `aX^2 + bX + c`. Without `approx` and `prec` the root of
/// larger valuation is taken.
#[pyfunction]
#[pyo3(signature = (a, b, c, p, algorithm = "A", cap = None, approx = None, prec = None))]
#[allow(clippy::too_many_arguments)]
fn expand_poly(
    a: BigInt,
    b: BigInt,
    c: BigInt,
    p: u64,
    algorithm: &str,
    cap: Option<usize>,
    approx: Option<&str>,
    prec: Option<i64>,
) -> PyResult<PyExpansion> {
    let p = prime(p)?;
    let x = match (approx, prec) {
        (Some(y), Some(m)) => QuadraticElement::new(a, b, c, p, rational(y)?, m),
        (None, None) => QuadraticElement::default_root(a, b, c, p),
        _ => return Err(PyValueError::new_err("approx and prec go together")),
    }
    .map_err(to_py)?;
    run(x.into(), algorithm, cap)
}

#[pyfunction]
fn classify_pure_periodicity(state: &PyHenselState, algorithm: &str) -> PyResult<bool> {
    padic_cf::classify_pure_periodicity(&state.0, self::algorithm(algorithm)?).map_err(to_py)
}

#[pymodule]
pub fn padic_cf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHenselState>()?;
    m.add_class::<PyExpansion>()?;
    m.add_function(wrap_pyfunction!(vp, m)?)?;
    m.add_function(wrap_pyfunction!(digits, m)?)?;
    m.add_function(wrap_pyfunction!(integral_part, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_part, m)?)?;
    m.add_function(wrap_pyfunction!(expand_rational, m)?)?;
    m.add_function(wrap_pyfunction!(expand_poly, m)?)?;
    m.add_function(wrap_pyfunction!(classify_pure_periodicity, m)?)?;
    Ok(())
}

//! Exhaustive orbit sweeps over boxes of Hensel states.
//!
//! Each state in the box is followed to its cycle and checked against the
//! periodicity results for its algorithm: orbit shape, the closed-form reduced
//! set, and conservation of the discriminant along the orbit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arith::Prime;
use crate::engine::{classify_pure_periodicity, hensel_orbit, Algorithm, Orbit};
use crate::error::{Error, Result};
use crate::hensel::{in_s, HenselState, Quadrant};

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub p: Prime,
    pub algorithm: Algorithm,
    pub b_range: (i64, i64),
    pub c_range: (i64, i64),
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CensusRow {
    pub b: i64,
    pub c: i64,
    pub quadrant: Quadrant,
    pub preperiod: usize,
    pub period: usize,
    pub pure: bool,
    pub closed_form_pure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub b: i64,
    pub c: i64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub prime: Prime,
    pub b_range: (i64, i64),
    pub c_range: (i64, i64),
    pub algorithm: Algorithm,
    /// `(preperiod, period)` histogram.
    pub counts: BTreeMap<(usize, usize), usize>,
    pub violations: Vec<Violation>,
    /// Rows sorted by `(b, c)`.
    pub rows: Vec<CensusRow>,
    /// Largest `preperiod + period` seen.
    pub max_orbit_len: usize,
}

/// Checks one orbit against the expected shape for its algorithm; returns the failures.
pub fn orbit_violations(start: &HenselState, algorithm: Algorithm, orbit: &Orbit) -> Vec<String> {
    let mut out = Vec::new();
    let p = start.prime();
    let disc = start.discriminant();
    for (state, &which) in orbit.states.iter().zip(&orbit.maps) {
        if state.apply(which).discriminant() != disc {
            out.push(format!("discriminant changed after {which} at {state}"));
        }
    }
    let in_r = start.in_r();
    match algorithm {
        Algorithm::A => {
            if !orbit.is_pure() {
                out.push(format!("preperiod {} under A", orbit.preperiod));
            }
            if !(1..=2).contains(&orbit.period) {
                out.push(format!("period {} under A", orbit.period));
            }
            if (orbit.period == 1) != in_r {
                out.push(format!("period {} but in_R = {in_r}", orbit.period));
            }
        }
        Algorithm::B => {
            if orbit.period != 1 {
                out.push(format!("period {} under B", orbit.period));
            }
            if (orbit.preperiod > 0) == in_r {
                out.push(format!("preperiod {} but in_R = {in_r}", orbit.preperiod));
            }
            let bound = b_orbit_bound(start.b(), p);
            let len = orbit.preperiod + orbit.period;
            if len as u64 > bound {
                out.push(format!("orbit length {len} exceeds ceil(|b|/p) + 2 = {bound}"));
            }
        }
        Algorithm::C | Algorithm::Schneider => {}
    }
    match classify_pure_periodicity(start, algorithm) {
        Ok(closed) if closed != orbit.is_pure() => out.push(format!(
            "closed-form pure = {closed}, detected preperiod {}",
            orbit.preperiod
        )),
        Ok(_) => {}
        Err(e) => out.push(e.to_string()),
    }
    out
}

/// `ceil(|b| / p) + 2`.
pub fn b_orbit_bound(b: &BigInt, p: Prime) -> u64 {
    let b: u64 = b.magnitude().try_into().unwrap_or(u64::MAX);
    b.div_ceil(p.get()).saturating_add(2)
}

fn sweep_row(cfg: &CensusConfig, b: i64) -> Result<(Vec<CensusRow>, Vec<Violation>, usize)> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut longest = 0;
    let (bb, pb) = (BigInt::from(b), cfg.p.get() as i64);
    let c_start = cfg.c_range.0.div_euclid(pb) * pb;
    for c in (c_start..=cfg.c_range.1).step_by(pb as usize) {
        if c < cfg.c_range.0 || !in_s(&bb, &BigInt::from(c), cfg.p) {
            continue;
        }
        let start = HenselState::new(b, c, cfg.p)?;
        let orbit = hensel_orbit(&start, cfg.algorithm, cfg.max_steps)?;
        violations.extend(
            orbit_violations(&start, cfg.algorithm, &orbit)
                .into_iter()
                .map(|reason| Violation { b, c, reason }),
        );
        longest = longest.max(orbit.preperiod + orbit.period);
        rows.push(CensusRow {
            b,
            c,
            quadrant: start.quadrant(),
            preperiod: orbit.preperiod,
            period: orbit.period,
            pure: orbit.is_pure(),
            closed_form_pure: classify_pure_periodicity(&start, cfg.algorithm)?,
        });
    }
    Ok((rows, violations, longest))
}

/// Sweeps every state of `S` in the box. Rows of constant `b` are independent
/// and are distributed over `cfg.jobs` workers; output order does not depend
/// on the worker count.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusReport> {
    if cfg.algorithm == Algorithm::Schneider {
        return Err(Error::InvalidAlgorithm(cfg.algorithm.to_string()));
    }
    if cfg.b_range.0 > cfg.b_range.1 || cfg.c_range.0 > cfg.c_range.1 {
        return Err(Error::InvalidInput("empty census range".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let per_row: Vec<_> = pool.install(|| {
        (cfg.b_range.0..=cfg.b_range.1)
            .into_par_iter()
            .map(|b| sweep_row(cfg, b))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut report = CensusReport {
        prime: cfg.p,
        b_range: cfg.b_range,
        c_range: cfg.c_range,
        algorithm: cfg.algorithm,
        counts: BTreeMap::new(),
        violations: Vec::new(),
        rows: Vec::new(),
        max_orbit_len: 0,
    };
    for (rows, violations, longest) in per_row {
        for row in &rows {
            *report.counts.entry((row.preperiod, row.period)).or_default() += 1;
        }
        report.rows.extend(rows);
        report.violations.extend(violations);
        report.max_orbit_len = report.max_orbit_len.max(longest);
    }
    report.rows.sort();
    Ok(report)
}

//! Serializable views of expansions. Every number is a decimal string.

use padic_cf::arith::format_rational;
use padic_cf::{CfExpansion, CfTerm, Convergent, ExpansionStatus};
use serde::Serialize;

#[derive(Serialize)]
pub struct TermOut {
    pub t: String,
    pub k: String,
    pub d: String,
}

impl From<&CfTerm> for TermOut {
    fn from(term: &CfTerm) -> Self {
        TermOut {
            t: term.t.to_string(),
            k: term.k.to_string(),
            d: term.d.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct StatusOut {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preperiod: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<String>,
}

impl From<ExpansionStatus> for StatusOut {
    fn from(status: ExpansionStatus) -> Self {
        let none = StatusOut {
            kind: "finite",
            preperiod: None,
            period: None,
            cap: None,
        };
        match status {
            ExpansionStatus::Finite => none,
            ExpansionStatus::EventuallyPeriodic { preperiod, period } => StatusOut {
                kind: "periodic",
                preperiod: Some(preperiod.to_string()),
                period: Some(period.to_string()),
                ..none
            },
            ExpansionStatus::Truncated { cap } => StatusOut {
                kind: "truncated",
                cap: Some(cap.to_string()),
                ..none
            },
        }
    }
}

#[derive(Serialize)]
pub struct ConvergentOut {
    pub n: String,
    pub p: String,
    pub q: String,
}

impl From<&Convergent> for ConvergentOut {
    fn from(c: &Convergent) -> Self {
        ConvergentOut {
            n: c.n.to_string(),
            p: c.pn.to_string(),
            q: c.qn.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct ExpansionOut {
    pub p: String,
    pub algorithm: String,
    pub d0: String,
    pub terms: Vec<TermOut>,
    pub status: StatusOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergents: Option<Vec<ConvergentOut>>,
}

impl ExpansionOut {
    /// `terms` are the stored block unless an explicit unrolled count is given.
    pub fn new(e: &CfExpansion, algorithm: &str, terms: Option<usize>, convs: Option<&[Convergent]>) -> Self {
        let shown = match terms {
            Some(n) => e.unrolled(n),
            None => e.terms.clone(),
        };
        ExpansionOut {
            p: e.p.to_string(),
            algorithm: algorithm.to_string(),
            d0: format_rational(&e.d0),
            terms: shown.iter().map(TermOut::from).collect(),
            status: e.status.into(),
            convergents: convs.map(|cs| cs.iter().map(ConvergentOut::from).collect()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p = {}, algorithm {}\nd0 = {}\n", self.p, self.algorithm, self.d0);
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("({}, {}, {})", t.t, t.k, t.d))
            .collect();
        out += &format!("terms: {}\n", terms.join(" "));
        out += &match self.status.kind {
            "periodic" => format!(
                "status: periodic, preperiod {}, period {}\n",
                self.status.preperiod.as_deref().unwrap_or_default(),
                self.status.period.as_deref().unwrap_or_default()
            ),
            "truncated" => format!(
                "status: truncated at {} terms\n",
                self.status.cap.as_deref().unwrap_or_default()
            ),
            kind => format!("status: {kind}\n"),
        };
        for c in self.convergents.iter().flatten() {
            out += &format!("p_{n}/q_{n} = {}/{}\n", c.p, c.q, n = c.n);
        }
        out
    }
}

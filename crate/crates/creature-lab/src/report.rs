//! Deterministic reports: every value exact, every asserted inequality
//! recomputed at insertion, byte-identical output for identical inputs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rational::{fmt_rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Negative,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub holds: bool,
}

/// A report: verdict, exact values, the hypothesis-check ledger and
/// optional certificates. Timing is opt-in so that default reports are
/// byte-identical across runs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub verb: String,
    pub verdict: Verdict,
    pub values: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub certificates: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(verb: &str) -> Report {
        Report {
            verb: verb.to_string(),
            verdict: Verdict::Ok,
            values: BTreeMap::new(),
            checks: Vec::new(),
            certificates: BTreeMap::new(),
            timing_ms: None,
        }
    }

    pub fn negative(mut self) -> Report {
        self.verdict = Verdict::Negative;
        self
    }

    pub fn set_verdict(&mut self, ok: bool) {
        self.verdict = if ok { Verdict::Ok } else { Verdict::Negative };
    }

    pub fn value(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn rational(&mut self, key: &str, value: &Rational) -> &mut Self {
        self.values.insert(key.to_string(), fmt_rat(value));
        self
    }

    /// Records a comparison, recomputing it from the exact operands.
    pub fn check_le(&mut self, label: &str, lhs: &Rational, rhs: &Rational) -> bool {
        let holds = lhs <= rhs;
        self.checks.push(Check {
            label: label.to_string(),
            lhs: fmt_rat(lhs),
            relation: "<=".into(),
            rhs: fmt_rat(rhs),
            holds,
        });
        holds
    }

    pub fn check_ge(&mut self, label: &str, lhs: &Rational, rhs: &Rational) -> bool {
        let holds = lhs >= rhs;
        self.checks.push(Check {
            label: label.to_string(),
            lhs: fmt_rat(lhs),
            relation: ">=".into(),
            rhs: fmt_rat(rhs),
            holds,
        });
        holds
    }

    pub fn check_eq(&mut self, label: &str, lhs: &Rational, rhs: &Rational) -> bool {
        let holds = lhs == rhs;
        self.checks.push(Check {
            label: label.to_string(),
            lhs: fmt_rat(lhs),
            relation: "==".into(),
            rhs: fmt_rat(rhs),
            holds,
        });
        holds
    }

    pub fn check_flag(&mut self, label: &str, holds: bool) -> bool {
        self.checks.push(Check {
            label: label.to_string(),
            lhs: String::new(),
            relation: "flag".into(),
            rhs: String::new(),
            holds,
        });
        holds
    }

    pub fn certificate(&mut self, key: &str, value: serde_json::Value) -> &mut Self {
        self.certificates.insert(key.to_string(), value);
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Ok => 0,
            Verdict::Negative => 1,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Text => {
                let mut out = String::new();
                out.push_str(&format!(
                    "{}: {}\n",
                    self.verb,
                    match self.verdict {
                        Verdict::Ok => "ok",
                        Verdict::Negative => "negative",
                    }
                ));
                for (k, v) in &self.values {
                    out.push_str(&format!("  {k} = {v}\n"));
                }
                for c in &self.checks {
                    if c.relation == "flag" {
                        out.push_str(&format!(
                            "  [{}] {}\n",
                            if c.holds { "pass" } else { "FAIL" },
                            c.label
                        ));
                    } else {
                        out.push_str(&format!(
                            "  [{}] {}: {} {} {}\n",
                            if c.holds { "pass" } else { "FAIL" },
                            c.label,
                            c.lhs,
                            c.relation,
                            c.rhs
                        ));
                    }
                }
                for (k, v) in &self.certificates {
                    out.push_str(&format!("  {k}: {v}\n"));
                }
                if let Some(ms) = self.timing_ms {
                    out.push_str(&format!("  timing_ms = {ms}\n"));
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rendering_is_deterministic() {
        let mut r = Report::new("probe");
        r.rational("root", &rat(3, 4));
        r.check_le("bound", &rat(1, 2), &rat(3, 4));
        let a = r.render(Format::Json);
        let b = r.render(Format::Json);
        assert_eq!(a, b);
        assert!(r.render(Format::Text).contains("root = 3/4"));
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.clone().negative().exit_code(), 1);
    }
}

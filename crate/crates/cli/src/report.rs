//! Verification reports, rendered as text or JSON with identical content.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use econtact::assume::Verdict;
use econtact::contact::{Truth, Witness};
use econtact::frame::FrameManifold;
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "econtact.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Zero,
    NonZero,
    Unknown,
    Pass,
    Fail,
}

impl Outcome {
    pub fn verdict(v: Verdict) -> Outcome {
        match v {
            Verdict::Zero => Outcome::Zero,
            Verdict::NonZero => Outcome::NonZero,
            Verdict::Unknown => Outcome::Unknown,
        }
    }

    pub fn truth(t: Truth) -> Outcome {
        match t {
            Truth::True => Outcome::Pass,
            Truth::False => Outcome::Fail,
            Truth::Unknown => Outcome::Unknown,
        }
    }

    pub fn pass_if(b: bool) -> Outcome {
        if b {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Unknown => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOut {
    pub component: Vec<String>,
    pub value: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub point: BTreeMap<String, String>,
}

impl WitnessOut {
    pub fn new(m: &FrameManifold, w: &Witness) -> WitnessOut {
        let labels = m.labels();
        WitnessOut {
            component: w.index.iter().map(|&i| labels.get(i).cloned().unwrap_or_else(|| i.to_string())).collect(),
            value: w.value.to_string(),
            point: w
                .point
                .iter()
                .flat_map(|b| b.values().map(|(s, v)| (s.to_string(), v.to_string())))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    /// Required outcome; informational checks carry none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn status(&self) -> Status {
        match self.expect {
            None => Status::Pass,
            Some(e) if e == self.outcome => Status::Pass,
            Some(_) if self.outcome == Outcome::Unknown => Status::Unknown,
            Some(_) => Status::Fail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: String,
    pub command: String,
    pub subject: String,
    pub seed: u64,
    pub notes: Vec<String>,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<BTreeMap<String, String>>,
    pub checks: Vec<Check>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str, subject: &str, seed: u64) -> Report {
        Report {
            schema: REPORT_SCHEMA,
            tool: format!("econtact {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            subject: subject.into(),
            seed,
            notes: vec![],
            values: BTreeMap::new(),
            certificate: None,
            checks: vec![],
            status: Status::Pass,
        }
    }

    pub fn value(&mut self, k: &str, v: impl ToString) {
        self.values.insert(k.into(), v.to_string());
    }

    pub fn require(&mut self, name: impl Into<String>, outcome: Outcome, expect: Outcome) -> &mut Check {
        self.push(name.into(), outcome, Some(expect))
    }

    pub fn inform(&mut self, name: impl Into<String>, outcome: Outcome) -> &mut Check {
        self.push(name.into(), outcome, None)
    }

    fn push(&mut self, name: String, outcome: Outcome, expect: Option<Outcome>) -> &mut Check {
        self.checks.push(Check {
            name,
            outcome,
            expect,
            witness: None,
            detail: None,
        });
        self.finalize();
        self.checks.last_mut().expect("just pushed")
    }

    /// Recomputes the overall status; call after editing checks in place.
    pub fn finalize(&mut self) {
        let st: Vec<Status> = self.checks.iter().map(Check::status).collect();
        self.status = if st.contains(&Status::Fail) {
            Status::Fail
        } else if st.contains(&Status::Unknown) {
            Status::Unknown
        } else {
            Status::Pass
        };
    }

    /// Merges another report's content under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        let p = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix}: {s}") };
        self.notes.extend(other.notes.into_iter().map(|n| p(&n)));
        self.values.extend(other.values.into_iter().map(|(k, v)| (p(&k), v)));
        if let Some(c) = other.certificate {
            let c: BTreeMap<_, _> = c.into_iter().map(|(k, v)| (p(&k), v)).collect();
            self.certificate.get_or_insert_with(BTreeMap::new).extend(c);
        }
        for mut c in other.checks {
            c.name = p(&c.name);
            self.checks.push(c);
        }
        self.finalize();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} (seed {})", self.tool, self.command, self.subject, self.seed);
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for (k, v) in &self.values {
            let _ = writeln!(s, "  {k} = {v}");
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(s, "  certificate:");
            for (k, v) in c {
                let _ = writeln!(s, "    {k} = {v}");
            }
        }
        for c in &self.checks {
            let mark = match (c.expect, c.status()) {
                (None, _) => "info",
                (_, Status::Pass) => "ok",
                (_, Status::Fail) => "FAIL",
                (_, Status::Unknown) => "??",
            };
            let _ = write!(s, "  [{mark:>4}] {:<8} {}", format!("{:?}", c.outcome), c.name);
            if let Some(e) = c.expect.filter(|e| *e != c.outcome) {
                let _ = write!(s, " (expected {e:?})");
            }
            let _ = writeln!(s);
            if let Some(d) = &c.detail {
                let _ = writeln!(s, "           {d}");
            }
            if let Some(w) = &c.witness {
                let _ = write!(s, "           witness [{}] = {}", w.component.join(","), w.value);
                if !w.point.is_empty() {
                    let pts: Vec<String> = w.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let _ = write!(s, " at {}", pts.join(", "));
                }
                let _ = writeln!(s);
            }
        }
        let _ = writeln!(s, "status: {}", serde_json::to_value(self.status).expect("status").as_str().unwrap_or("?"));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_exit_codes() {
        let mut r = Report::new("check", "x", 1);
        r.inform("finding", Outcome::NonZero);
        assert_eq!((r.status, r.status.exit_code()), (Status::Pass, 0));
        r.require("unknown", Outcome::Unknown, Outcome::Zero);
        assert_eq!((r.status, r.status.exit_code()), (Status::Unknown, 3));
        r.require("broken", Outcome::NonZero, Outcome::Zero);
        assert_eq!((r.status, r.status.exit_code()), (Status::Fail, 1));
    }

    #[test]
    fn absorb_prefixes_and_recomputes() {
        let mut a = Report::new("product", "p", 1);
        let mut b = Report::new("check", "n", 1);
        b.value("epsilon", -1);
        b.require("id", Outcome::Unknown, Outcome::Zero);
        a.absorb("N", b);
        assert_eq!(a.values["N: epsilon"], "-1");
        assert_eq!(a.checks[0].name, "N: id");
        assert_eq!(a.status, Status::Unknown);
    }

    #[test]
    fn text_carries_every_verdict() {
        let mut r = Report::new("check", "x", 1);
        r.require("a", Outcome::Zero, Outcome::Zero);
        r.inform("b", Outcome::Fail);
        let t = r.to_text();
        assert!(t.contains("Zero     a") && t.contains("Fail     b") && t.ends_with("status: pass\n"));
    }
}

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use algebroidkit::{Poly, Verdict};

use crate::schema::{poly_doc, PolyDoc, SCHEMA};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessDoc {
    pub location: String,
    pub residue: String,
    pub terms: PolyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub grade: i64,
    pub betti: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reliable: Option<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub title: String,
    pub rows: Vec<BettiRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
}

/// Everything a task reports. Timing is not part of it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub task: String,
    pub input_sha256: String,
    pub status: &'static str,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<BettiTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificate: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(task: &str, input_sha256: String) -> Self {
        Report {
            schema: SCHEMA,
            task: task.to_string(),
            input_sha256,
            status: "valid",
            checks: Vec::new(),
            tables: Vec::new(),
            certificate: Vec::new(),
            sections: Vec::new(),
            objects: BTreeMap::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.valid)
    }

    /// Records a verdict and returns whether it was valid.
    pub fn check(&mut self, name: &str, v: &Verdict) -> bool {
        let witness = v.witness().map(|w| WitnessDoc {
            location: w.location.clone(),
            residue: w.residue.to_string(),
            terms: poly_doc(&w.residue),
        });
        self.checks.push(Check { name: name.to_string(), valid: v.is_valid(), witness });
        if !v.is_valid() {
            self.status = "invalid";
        }
        v.is_valid()
    }

    /// A yes/no outcome without a natural polynomial; failures carry residue 1.
    pub fn check_bool(&mut self, name: &str, ok: bool, location: &str) -> bool {
        let v = if ok { Verdict::Valid } else { Verdict::Invalid(algebroidkit::Witness::new(location, Poly::one(0))) };
        self.check(name, &v)
    }

    pub fn section(&mut self, title: &str, lines: Vec<String>) {
        self.sections.push(Section { title: title.to_string(), lines });
    }

    pub fn object(&mut self, key: &str, value: impl Serialize) {
        self.objects.insert(key.to_string(), serde_json::to_value(value).expect("report objects serialize"));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.schema, self.task);
        let _ = writeln!(out, "input sha256 {}", self.input_sha256);
        let _ = writeln!(out, "status: {}", self.status);
        for c in &self.checks {
            let _ = writeln!(out, "check {}: {}", c.name, if c.valid { "valid" } else { "invalid" });
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "  witness at {}: {}", w.location, w.residue);
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "{}:", t.title);
            for r in &t.rows {
                let nums: Vec<String> = r.betti.iter().map(ToString::to_string).collect();
                match &r.reliable {
                    None => {
                        let _ = writeln!(out, "  grade {}: {}", r.grade, nums.join(" "));
                    }
                    Some(flags) => {
                        let marked: Vec<String> =
                            nums.iter().zip(flags).map(|(b, &ok)| if ok { b.clone() } else { format!("{b}?") }).collect();
                        let _ = writeln!(out, "  grade {}: {}", r.grade, marked.join(" "));
                    }
                }
            }
            if t.rows.iter().any(|r| r.reliable.as_ref().is_some_and(|f| f.iter().any(|ok| !ok))) {
                let _ = writeln!(out, "  (? marks degrees reached by the truncation)");
            }
        }
        if !self.certificate.is_empty() {
            let _ = writeln!(out, "certificate:");
            for c in &self.certificate {
                let _ = writeln!(out, "  - {c}");
            }
        }
        for s in &self.sections {
            let _ = writeln!(out, "{}:", s.title);
            for l in &s.lines {
                let _ = writeln!(out, "  {l}");
            }
        }
        out
    }
}

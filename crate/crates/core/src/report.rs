//! Window-certified verdicts shared by every check.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// The data needed for this degree lies outside the computed window.
    #[serde(rename = "OUT-OF-WINDOW")]
    OutOfWindow,
    /// A truncated computation only produced a lower bound.
    #[serde(rename = "UNDERDETERMINED")]
    Underdetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::OutOfWindow => "OUT-OF-WINDOW",
            Verdict::Underdetermined => "UNDERDETERMINED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeVerdict {
    pub i: i32,
    /// Second degree for checks indexed by degree pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<i32>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedReport {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    pub per_degree: Vec<DegreeVerdict>,
    pub unchecked_degrees: Vec<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clauses: Vec<CertifiedReport>,
}

impl CertifiedReport {
    pub fn new(check: impl Into<String>) -> Self {
        CertifiedReport {
            check: check.into(),
            n: None,
            per_degree: Vec::new(),
            unchecked_degrees: Vec::new(),
            notes: Vec::new(),
            clauses: Vec::new(),
        }
    }

    pub fn with_n(mut self, n: i32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn push(&mut self, i: i32, verdict: Verdict, witness: Option<String>) {
        if verdict != Verdict::Pass && verdict != Verdict::Fail && !self.unchecked_degrees.contains(&i) {
            self.unchecked_degrees.push(i);
        }
        self.per_degree.push(DegreeVerdict { i, j: None, verdict, witness });
    }

    pub fn push_pair(&mut self, i: i32, j: i32, verdict: Verdict, witness: Option<String>) {
        self.per_degree.push(DegreeVerdict { i, j: Some(j), verdict, witness });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn add_clause(&mut self, clause: CertifiedReport) {
        self.clauses.push(clause);
    }

    /// No FAIL anywhere, including nested clauses.
    pub fn passed(&self) -> bool {
        self.per_degree.iter().all(|d| d.verdict != Verdict::Fail) && self.clauses.iter().all(|c| c.passed())
    }

    pub fn verdict_at(&self, i: i32) -> Option<Verdict> {
        self.per_degree.iter().find(|d| d.i == i && d.j.is_none()).map(|d| d.verdict)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.per_degree.iter().filter(|d| d.verdict == v).count()
            + self.clauses.iter().map(|c| c.count(v)).sum::<usize>()
    }

    pub fn first_failure(&self) -> Option<&DegreeVerdict> {
        self.per_degree
            .iter()
            .find(|d| d.verdict == Verdict::Fail)
            .or_else(|| self.clauses.iter().find_map(|c| c.first_failure()))
    }

    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let pad = "  ".repeat(depth);
        let status = if self.passed() { "PASS" } else { "FAIL" };
        match self.n {
            Some(n) => writeln!(out, "{pad}{} (n = {n}): {status}", self.check).unwrap(),
            None => writeln!(out, "{pad}{}: {status}", self.check).unwrap(),
        }
        for d in &self.per_degree {
            let deg = match d.j {
                Some(j) => format!("({}, {})", d.i, j),
                None => format!("{}", d.i),
            };
            match &d.witness {
                Some(w) => writeln!(out, "{pad}  {deg:>8}  {:<16} {w}", d.verdict.to_string()).unwrap(),
                None => writeln!(out, "{pad}  {deg:>8}  {}", d.verdict).unwrap(),
            }
        }
        for n in &self.notes {
            writeln!(out, "{pad}  note: {n}").unwrap();
        }
        for c in &self.clauses {
            c.render_into(out, depth + 1);
        }
    }
}

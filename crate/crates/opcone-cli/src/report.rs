use std::time::Instant;

use opcone::{Kind, MembershipVerdict};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_MEMBER: u8 = 0;
pub const EXIT_NON_MEMBER: u8 = 1;
pub const EXIT_UNDECIDED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// One asserted claim of a demo.
#[derive(Debug, Serialize)]
pub struct Check {
    pub claim: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    pub inputs: Vec<InputDigest>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub elapsed_ms: f64,
    #[serde(skip)]
    pub exit: u8,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: u64, tol: f64) -> Self {
        RunReport {
            command: command.into(),
            seed,
            tol,
            inputs: Vec::new(),
            verdict: String::new(),
            margin: None,
            checks: Vec::new(),
            details: Value::Null,
            elapsed_ms: 0.0,
            exit: EXIT_MEMBER,
            started: Some(Instant::now()),
        }
    }

    pub fn digest(&mut self, path: &str, bytes: &[u8]) {
        let hash = Sha256::digest(bytes);
        let sha256 = hash.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest { path: path.to_string(), sha256 });
    }

    pub fn set_kind(&mut self, kind: Kind) {
        let (name, code) = match kind {
            Kind::Member => ("member", EXIT_MEMBER),
            Kind::NonMember => ("non_member", EXIT_NON_MEMBER),
            Kind::Undecided => ("undecided", EXIT_UNDECIDED),
        };
        self.verdict = name.to_string();
        self.exit = code;
    }

    pub fn set_verdict(&mut self, v: &MembershipVerdict) {
        self.set_kind(v.kind);
        self.margin = Some(v.margin);
    }

    pub fn set_bool(&mut self, member: bool, margin: f64) {
        self.set_kind(if member { Kind::Member } else { Kind::NonMember });
        self.margin = Some(margin);
    }

    pub fn close(&mut self, claim: &str, actual: f64, expected: f64, tol: f64) {
        let ok = (actual - expected).abs() <= tol;
        self.checks.push(Check { claim: claim.into(), ok, expected: Some(expected), actual: Some(actual), tol: Some(tol) });
    }

    pub fn at_most(&mut self, claim: &str, actual: f64, bound: f64) {
        let ok = actual <= bound;
        self.checks.push(Check { claim: claim.into(), ok, expected: Some(bound), actual: Some(actual), tol: None });
    }

    pub fn at_least(&mut self, claim: &str, actual: f64, bound: f64) {
        let ok = actual >= bound;
        self.checks.push(Check { claim: claim.into(), ok, expected: Some(bound), actual: Some(actual), tol: None });
    }

    pub fn holds(&mut self, claim: &str, ok: bool) {
        self.checks.push(Check { claim: claim.into(), ok, expected: None, actual: None, tol: None });
    }

    /// Verdict from the recorded checks: `pass` (exit 0) or `fail` (exit 1).
    pub fn settle_checks(&mut self) {
        let ok = self.checks.iter().all(|c| c.ok);
        self.verdict = if ok { "pass" } else { "fail" }.to_string();
        self.exit = if ok { EXIT_MEMBER } else { EXIT_NON_MEMBER };
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
        }
        self
    }
}

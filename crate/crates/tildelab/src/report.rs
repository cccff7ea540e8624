//! Verification reports shared by all subcommands.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// One numerical check. `pass` holds iff `residual < tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: Option<String>,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub checks: Vec<Check>,
    /// Command-specific values and series.
    pub data: Map<String, Value>,
    pub wall_time_s: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            write!(s, "{b:02x}").expect("string write");
            s
        })
}

impl RunReport {
    pub fn new(command: &str, tolerance: f64) -> Self {
        Self {
            command: command.into(),
            input_digest: None,
            tolerance,
            seed: None,
            workers: None,
            checks: Vec::new(),
            data: Map::new(),
            wall_time_s: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn with_input(mut self, bytes: &[u8]) -> Self {
        self.input_digest = Some(digest(bytes));
        self
    }

    /// Equality check `lhs = rhs`.
    pub fn check_eq(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        self.push(name.into(), lhs, rhs, (lhs - rhs).abs())
    }

    /// Inequality check `lhs ≥ rhs`; the residual is the shortfall.
    pub fn check_ge(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        self.push(name.into(), lhs, rhs, (rhs - lhs).max(0.0))
    }

    /// Check with a precomputed residual (e.g. a matrix norm).
    pub fn check_residual(&mut self, name: impl Into<String>, residual: f64) -> bool {
        self.push(name.into(), residual, 0.0, residual)
    }

    fn push(&mut self, name: String, lhs: f64, rhs: f64, residual: f64) -> bool {
        let pass = residual < self.tolerance;
        self.checks.push(Check {
            name,
            lhs,
            rhs,
            residual,
            pass,
        });
        pass
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.data.insert(key.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(w, "command:   {}", self.command);
        if let Some(d) = &self.input_digest {
            let _ = writeln!(w, "input:     sha256:{d}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(w, "seed:      {seed}");
        }
        if let Some(k) = self.workers {
            let _ = writeln!(w, "workers:   {k}");
        }
        let _ = writeln!(w, "tolerance: {:e}", self.tolerance);
        for (k, v) in &self.data {
            if !v.is_array() && !v.is_object() {
                let _ = writeln!(w, "{k}: {v}");
            }
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let _ = writeln!(
                    w,
                    "[{}] {:width$}  lhs={:+.12e}  rhs={:+.12e}  residual={:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.lhs,
                    c.rhs,
                    c.residual,
                );
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(
            w,
            "{} checks, {} failed, {:.3}s",
            self.checks.len(),
            failed,
            self.wall_time_s
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_below_tolerance() {
        let mut r = RunReport::new("t", 1e-9);
        assert!(r.check_eq("a", 1.0, 1.0 + 1e-12));
        assert!(!r.check_eq("b", 1.0, 1.1));
        assert!(r.check_ge("c", 0.5, 0.0));
        assert!(!r.check_ge("d", -0.5, 0.0));
        assert_eq!(r.checks[3].residual, 0.5);
        assert!(!r.passed());
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures().count(), 2);
    }

    #[test]
    fn renders_both_formats() {
        let mut r = RunReport::new("cd", 1e-10).with_input(b"abc");
        r.check_eq("x", 1.0, 1.0);
        r.set("cd", 0.5);
        let r = r.finish();
        let json: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(json["command"], "cd");
        assert_eq!(json["checks"][0]["pass"], true);
        assert_eq!(json["data"]["cd"], 0.5);
        let text = r.render(Format::Text);
        assert!(text.contains("[PASS] x") && text.contains("cd: 0.5"));
    }

    #[test]
    fn sha256_of_known_input() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

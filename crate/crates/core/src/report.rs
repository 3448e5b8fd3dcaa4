//! Run reports: per-check verdicts, a text rendering, and a machine-readable JSON
//! document whose floats carry 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::engine::Tolerances;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Computation succeeded but disagrees with a printed claim.
    Mismatch,
    Fail,
    /// Internal numerical failure.
    Error,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Mismatch => "MISMATCH",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        }
    }
}

/// One claim compared against its computed counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimOutcome {
    pub key: String,
    pub claimed: Value,
    pub computed: Value,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub op: String,
    pub verdict: Verdict,
    pub computed: Value,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<ClaimOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<String>,
    /// Wall-clock time; shown in text output only so that JSON stays reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, op: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            op: op.into(),
            verdict: Verdict::Pass,
            computed: Value::Null,
            residuals: BTreeMap::new(),
            claims: Vec::new(),
            messages: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// Raises the verdict; never lowers it.
    pub fn escalate(&mut self, verdict: Verdict, message: impl Into<String>) {
        self.verdict = self.verdict.max(verdict);
        self.messages.push(message.into());
    }

    pub fn residual(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.to_string(), value);
    }

    /// Records a residual and fails the check when it exceeds `limit`.
    pub fn bound(&mut self, key: &str, value: f64, limit: f64) {
        self.residual(key, value);
        if !(value <= limit) {
            self.escalate(Verdict::Fail, format!("{key} = {value:e} exceeds {limit:e}"));
        }
    }

    /// Compares a claim; a disagreement yields `Mismatch`.
    pub fn claim(&mut self, key: &str, claimed: Value, computed: Value, matches: bool) {
        if !matches {
            self.verdict = self.verdict.max(Verdict::Mismatch);
        }
        self.claims.push(ClaimOutcome {
            key: key.to_string(),
            claimed,
            computed,
            matches,
        });
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub mismatch: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub kind: String,
    pub name: String,
    pub strict_paper: bool,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(kind: &str, name: &str, tolerances: Tolerances, strict_paper: bool) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: kind.to_string(),
            name: name.to_string(),
            strict_paper,
            tolerances,
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            summary: Summary::default(),
            exit_code: 0,
        }
    }

    pub fn push(&mut self, check: CheckReport) {
        self.checks.push(check);
        self.refresh();
    }

    fn refresh(&mut self) {
        let mut s = Summary {
            total: self.checks.len(),
            ..Summary::default()
        };
        for c in &self.checks {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Mismatch => s.mismatch += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Error => s.error += 1,
            }
        }
        self.summary = s;
        self.exit_code = if s.error > 0 {
            3
        } else if s.fail > 0 || (self.strict_paper && s.mismatch > 0) {
            1
        } else {
            0
        };
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FloatFormatter::default());
        self.serialize(&mut ser).expect("report serialization is infallible");
        out.push(b'\n');
        String::from_utf8(out).expect("serde_json writes UTF-8")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} run: {}", self.kind, self.name);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{:<8}] {} ({}) {:.3} ms",
                c.verdict.label(),
                c.name,
                c.op,
                c.elapsed.as_secs_f64() * 1e3
            );
            for (k, v) in &c.residuals {
                let _ = writeln!(s, "    {k} = {v:.6e}");
            }
            for claim in &c.claims {
                let _ = writeln!(
                    s,
                    "    claim {}: claimed {} computed {} [{}]",
                    claim.key,
                    claim.claimed,
                    claim.computed,
                    if claim.matches { "match" } else { "mismatch" }
                );
            }
            for m in &c.messages {
                let _ = writeln!(s, "    note: {m}");
            }
        }
        let sum = &self.summary;
        let _ = writeln!(
            s,
            "summary: {} checks, {} pass, {} mismatch, {} fail, {} error; exit {}",
            sum.total, sum.pass, sum.mismatch, sum.fail, sum.error, self.exit_code
        );
        s
    }
}

/// Indented JSON formatter writing every float as `{:.16e}` (17 significant digits).
#[derive(Debug, Default, Clone, Copy)]
pub struct FloatFormatter {
    indent: usize,
    has_value: bool,
}

impl FloatFormatter {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl serde_json::ser::Formatter for FloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes any value into a JSON tree; floats are kept as `f64`.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        let mut r = RunReport::new("test", "floats", Tolerances::default(), false);
        let mut c = CheckReport::new("one_third", "noop");
        c.computed = json!({ "x": 1.0 / 3.0, "n": 3, "flag": true });
        r.push(c);
        let text = r.to_json();
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
        assert!(text.contains("\"n\": 3"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["checks"][0]["computed"]["x"].as_f64(), Some(1.0 / 3.0));
    }

    #[test]
    fn non_finite_floats_become_null() {
        let mut c = CheckReport::new("inf", "noop");
        c.residual("r", f64::INFINITY);
        let mut r = RunReport::new("test", "inf", Tolerances::default(), false);
        r.push(c);
        let back: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(back["checks"][0]["residuals"]["r"].is_null());
    }

    #[test]
    fn exit_codes() {
        let tol = Tolerances::default();
        let mut r = RunReport::new("t", "t", tol, false);
        r.push(CheckReport::new("a", "x"));
        assert_eq!(r.exit_code, 0);
        let mut m = CheckReport::new("b", "x");
        m.claim("k", json!(1), json!(2), false);
        r.push(m.clone());
        assert_eq!(r.exit_code, 0);
        let mut strict = RunReport::new("t", "t", tol, true);
        strict.push(m);
        assert_eq!(strict.exit_code, 1);
        let mut f = CheckReport::new("c", "x");
        f.bound("r", 1.0, 0.5);
        assert_eq!(f.verdict, Verdict::Fail);
        r.push(f);
        assert_eq!(r.exit_code, 1);
        let mut e = CheckReport::new("d", "x");
        e.escalate(Verdict::Error, "boom");
        r.push(e);
        assert_eq!(r.exit_code, 3);
        assert_eq!(r.summary, Summary { total: 4, pass: 1, mismatch: 1, fail: 1, error: 1 });
    }

    #[test]
    fn escalate_never_lowers() {
        let mut c = CheckReport::new("a", "x");
        c.escalate(Verdict::Fail, "f");
        c.escalate(Verdict::Mismatch, "m");
        assert_eq!(c.verdict, Verdict::Fail);
    }

    #[test]
    fn nan_bound_fails() {
        let mut c = CheckReport::new("a", "x");
        c.bound("r", f64::NAN, 1.0);
        assert_eq!(c.verdict, Verdict::Fail);
    }
}

//! Verification reports: named checks grouped into suites, rendered as
//! stable text or JSON.

use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), params: BTreeMap::new(), checks: Vec::new() }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Record a check that passes exactly when `f` returns Ok(true); errors
    /// are captured as failure detail instead of propagating.
    pub fn check_result(
        &mut self,
        name: impl Into<String>,
        f: impl FnOnce() -> crate::Result<bool>,
    ) {
        let name = name.into();
        match f() {
            Ok(true) => self.check(name, true, ""),
            Ok(false) => self.check(name, false, "identity does not hold"),
            Err(e) => self.check(name, false, format!("error: {}", e)),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "params": self.params,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let params = if self.params.is_empty() {
            String::new()
        } else {
            let kv: Vec<String> = self.params.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            format!(" [{}]", kv.join(" "))
        };
        out.push_str(&format!("suite {}{}\n", self.suite, params));
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("  {:4} {}\n", mark, c.name));
            } else {
                out.push_str(&format!("  {:4} {} ({})\n", mark, c.name, c.detail));
            }
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{}: {}\n", verdict, self.suite));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_and_rendering() {
        let mut r = SuiteReport::new("demo");
        r.param("order", 8);
        r.check("first", true, "");
        assert!(r.passed());
        r.check("second", false, "residual nonzero");
        assert!(!r.passed());
        let text = r.render_text();
        assert!(text.contains("ok   first"));
        assert!(text.contains("FAIL second (residual nonzero)"));
        assert!(text.ends_with("FAIL: demo\n"));
        assert_eq!(r.to_json()["passed"], serde_json::json!(false));
    }
}

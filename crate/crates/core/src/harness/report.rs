use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub witness: String,
}

/// Outcome of one suite. The JSON and text renderings are both produced from
/// this struct and nothing else.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TestReport {
    pub suite: String,
    pub instances: usize,
    pub failures: Vec<Failure>,
    pub bounds: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl TestReport {
    pub fn new(suite: impl Into<String>) -> TestReport {
        TestReport { suite: suite.into(), ..Default::default() }
    }

    pub fn bound(mut self, name: &str, value: impl ToString) -> TestReport {
        self.bounds.insert(name.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, instance: impl Into<String>, witness: impl Into<String>) {
        self.failures.push(Failure { instance: instance.into(), witness: witness.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Folds per-instance results, kept in instance order.
    pub fn absorb(&mut self, results: impl IntoIterator<Item = Option<Failure>>) {
        for r in results {
            self.instances += 1;
            if let Some(f) = r {
                self.failures.push(f);
            }
        }
    }

    /// Appends another report's counts and failures under a prefix.
    pub fn merge(&mut self, other: TestReport) {
        self.instances += other.instances;
        for f in other.failures {
            self.failures.push(Failure { instance: format!("{}: {}", other.suite, f.instance), witness: f.witness });
        }
        for (k, v) in other.bounds {
            self.bounds.entry(k).or_insert(v);
        }
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {} instances, {} failures", self.suite, self.instances, self.failures.len())?;
        if !self.bounds.is_empty() {
            let b: Vec<String> = self.bounds.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", b.join(", "))?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for fl in &self.failures {
            write!(f, "\n  failure: {}\n    {}", fl.instance, fl.witness.replace('\n', "\n    "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_text_agree_on_counts() {
        let mut r = TestReport::new("demo").bound("world", 2);
        r.absorb([None, Some(Failure { instance: "x".into(), witness: "w".into() })]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["instances"], 2);
        assert_eq!(v["failures"].as_array().unwrap().len(), 1);
        assert!(r.to_string().starts_with("FAIL demo: 2 instances, 1 failures [world=2]"));
    }
}

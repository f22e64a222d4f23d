//! Named pass/fail verdicts with witnesses.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// An ordered list of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Verdicts(pub Vec<Check>);

impl Verdicts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a check; the witness closure only runs on failure.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, witness: impl FnOnce() -> String) -> bool {
        self.0.push(Check {
            name: name.into(),
            passed,
            witness: (!passed).then(witness),
        });
        passed
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.check(name, true, String::new);
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        let w = witness.into();
        self.check(name, false, || w);
    }

    /// Appends another list with a name prefix.
    pub fn extend_prefixed(&mut self, prefix: &str, other: Verdicts) {
        for mut c in other.0 {
            c.name = format!("{prefix}.{}", c.name);
            self.0.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.0.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.0.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of one named verification.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// A batch of verification outcomes; failures are reported, not thrown.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report { checks: vec![] }
    }

    pub fn record(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            pass,
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

use serde::Serialize;

/// Outcome of one axiom with human-readable witnesses of failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

/// Per-axiom validation results, in a fixed axiom order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport::default()
    }

    pub fn record(&mut self, axiom: &str, witnesses: Vec<String>) {
        self.checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            passed: witnesses.is_empty(),
            witnesses,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

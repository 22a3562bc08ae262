//! The resolved contents of a model file: one automaton plus named
//! observation configurations, secrets, budgets, and check requests.

use opacheck_core::{EnumerationBudget, ObservationConfig, SecretSpec, TimedAutomaton};

/// A parsed and fully resolved model document. All cross-references are
/// guaranteed to resolve and the automaton has passed its syntactic checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub automaton: TimedAutomaton,
    pub obs_configs: Vec<(String, ObservationConfig)>,
    pub secrets: Vec<(String, SecretSpec)>,
    pub budgets: Vec<(String, EnumerationBudget)>,
    pub checks: Vec<CheckRequest>,
}

impl ModelDocument {
    pub fn obs_config(&self, name: &str) -> Option<&ObservationConfig> {
        self.obs_configs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
    }

    pub fn secret(&self, name: &str) -> Option<&SecretSpec> {
        self.secrets.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn budget(&self, name: &str) -> Option<&EnumerationBudget> {
        self.budgets.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRequest> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One requested check, with a unique name used by reports and `--only`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRequest {
    pub name: String,
    pub kind: CheckKind,
}

/// The check to run and the named objects it consumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    Ebto {
        secret: String,
        cfg: String,
        budget: String,
    },
    Lbto {
        secret: String,
        cfg: String,
        budget: String,
    },
    Eto {
        secret: String,
        budget: String,
    },
    Representable {
        secret: String,
        budget: String,
    },
    Closure {
        secret: String,
        budget: String,
    },
}

impl CheckKind {
    pub fn notion(&self) -> &'static str {
        match self {
            CheckKind::Ebto { .. } => "ebto",
            CheckKind::Lbto { .. } => "lbto",
            CheckKind::Eto { .. } => "eto",
            CheckKind::Representable { .. } => "representable",
            CheckKind::Closure { .. } => "closure",
        }
    }

    pub fn secret_name(&self) -> &str {
        match self {
            CheckKind::Ebto { secret, .. }
            | CheckKind::Lbto { secret, .. }
            | CheckKind::Eto { secret, .. }
            | CheckKind::Representable { secret, .. }
            | CheckKind::Closure { secret, .. } => secret,
        }
    }

    pub fn budget_name(&self) -> &str {
        match self {
            CheckKind::Ebto { budget, .. }
            | CheckKind::Lbto { budget, .. }
            | CheckKind::Eto { budget, .. }
            | CheckKind::Representable { budget, .. }
            | CheckKind::Closure { budget, .. } => budget,
        }
    }

    pub fn cfg_name(&self) -> Option<&str> {
        match self {
            CheckKind::Ebto { cfg, .. } | CheckKind::Lbto { cfg, .. } => Some(cfg),
            _ => None,
        }
    }
}

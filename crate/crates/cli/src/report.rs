//! Runs a document's checks and renders the verdict report.
//!
//! Reports are deterministic for identical inputs: checks run in document
//! order, every collection is ordered, and with the `stable` option the
//! per-check timing lines are omitted so reports become byte-identical.
//!
//! JSON field reference (one object per check):
//! `name`, `notion` (`ebto`/`lbto`/`eto`/`representable`/`closure`),
//! `opaque` (the check's positive outcome: opaque, representable, or
//! well-formed), `verdict` (human-readable label), `bounded`, `budget`
//! (`{name, steps, grid, zero_delay}`), `witnesses` (rendered, capped by
//! the witness limit), `witness_total`, `counter_pair` (closure and
//! representability only), `cover_size`, `notes`, `millis` (absent in
//! stable mode).

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use opacheck_core::{
    check_ebto, check_eto, check_lbto, check_secret_closure, check_word_representable,
    enumerate_evolutions, format_rational, CheckError, Evolution, SecretSpec,
    Verdict,
};

use crate::document::{CheckKind, ModelDocument};

/// Options controlling a report run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Run only the named check.
    pub only: Option<String>,
    /// Omit timing so identical inputs give byte-identical reports.
    pub stable: bool,
    /// Maximum number of witnesses rendered per check.
    pub witness_limit: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            only: None,
            stable: true,
            witness_limit: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("no check named `{0}` in the document")]
    UnknownCheck(String),
    #[error("check `{check}`: {source}")]
    Check {
        check: String,
        #[source]
        source: CheckError,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetEcho {
    pub name: String,
    pub steps: usize,
    pub grid: Vec<String>,
    pub zero_delay: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub notion: String,
    pub opaque: bool,
    pub verdict: String,
    pub bounded: bool,
    pub budget: BudgetEcho,
    pub witnesses: Vec<String>,
    pub witness_total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_pair: Option<[String; 2]>,
    pub cover_size: usize,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checksum: String,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// True when every check came out positive.
    pub fn all_positive(&self) -> bool {
        self.checks.iter().all(|c| c.opaque)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("checksum: {}\n", self.checksum);
        for check in &self.checks {
            out.push_str(&format!(
                "check {} [{}] budget={} (steps={} grid={{{}}} zero_delay={})\n",
                check.name,
                check.notion,
                check.budget.name,
                check.budget.steps,
                check.budget.grid.join(", "),
                check.budget.zero_delay
            ));
            let bounded = if check.bounded { " (bounded)" } else { "" };
            out.push_str(&format!("  verdict: {}{}\n", check.verdict, bounded));
            if !check.witnesses.is_empty() {
                out.push_str(&format!(
                    "  witnesses: {} uncovered, showing {}\n",
                    check.witness_total,
                    check.witnesses.len()
                ));
                for w in &check.witnesses {
                    out.push_str(&format!("    {w}\n"));
                }
            }
            if let Some([a, b]) = &check.counter_pair {
                out.push_str("  pair:\n");
                out.push_str(&format!("    {a}\n"));
                out.push_str(&format!("    {b}\n"));
            }
            if check.opaque && check.cover_size > 0 {
                out.push_str(&format!("  cover: {} secret(s) covered\n", check.cover_size));
            }
            for note in &check.notes {
                out.push_str(&format!("  note: {note}\n"));
            }
            if let Some(ms) = check.millis {
                out.push_str(&format!("  time: {ms}ms\n"));
            }
        }
        let positive = self.checks.iter().filter(|c| c.opaque).count();
        out.push_str(&format!(
            "summary: {positive}/{} checks positive\n",
            self.checks.len()
        ));
        out
    }
}

/// FNV-1a over the raw document bytes; stable across runs and platforms.
pub fn document_checksum(text: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn budget_echo(doc: &ModelDocument, name: &str) -> BudgetEcho {
    let budget = doc.budget(name).expect("budget resolved at parse time");
    BudgetEcho {
        name: name.to_string(),
        steps: budget.max_steps(),
        grid: budget.delay_grid().iter().map(format_rational).collect(),
        zero_delay: budget.include_zero_delay(),
    }
}

fn verdict_report(
    doc: &ModelDocument,
    name: &str,
    budget: &str,
    verdict: &Verdict,
    witness_limit: usize,
) -> CheckReport {
    let ta = &doc.automaton;
    CheckReport {
        name: name.to_string(),
        notion: verdict.notion.as_str().to_string(),
        opaque: verdict.opaque,
        verdict: if verdict.opaque {
            "opaque".to_string()
        } else {
            "not opaque".to_string()
        },
        bounded: verdict.bounded,
        budget: budget_echo(doc, budget),
        witnesses: verdict
            .witnesses
            .iter()
            .take(witness_limit)
            .map(|w| w.render(ta))
            .collect(),
        witness_total: verdict.witnesses.len(),
        counter_pair: None,
        cover_size: verdict.cover.len(),
        notes: verdict.notes.clone(),
        millis: None,
    }
}

/// Runs the document's checks (optionally a single one) and assembles the
/// report. Evolutions are enumerated once per budget and shared by all
/// checks that reference it.
pub fn run_checks(
    doc: &ModelDocument,
    text: &str,
    options: &RunOptions,
) -> Result<Report, RunError> {
    if let Some(only) = &options.only {
        if doc.check(only).is_none() {
            return Err(RunError::UnknownCheck(only.clone()));
        }
    }

    let mut enumerations: BTreeMap<String, Vec<Evolution>> = BTreeMap::new();
    let mut reports = Vec::new();

    for check in &doc.checks {
        if let Some(only) = &options.only {
            if check.name != *only {
                continue;
            }
        }
        let fail = |source: CheckError| RunError::Check {
            check: check.name.clone(),
            source,
        };

        let budget_name = check.kind.budget_name().to_string();
        if !enumerations.contains_key(&budget_name) {
            let budget = doc.budget(&budget_name).expect("resolved at parse time");
            let evolutions =
                enumerate_evolutions(&doc.automaton, budget).map_err(|e| fail(e.into()))?;
            enumerations.insert(budget_name.clone(), evolutions);
        }
        let evolutions = &enumerations[&budget_name];
        let secret = doc
            .secret(check.kind.secret_name())
            .expect("resolved at parse time");

        let started = Instant::now();
        let mut report = match &check.kind {
            CheckKind::Ebto { cfg, budget, .. } => {
                let cfg = doc.obs_config(cfg).expect("resolved at parse time");
                let verdict =
                    check_ebto(evolutions, secret, cfg).map_err(|e| fail(e.into()))?;
                verdict_report(doc, &check.name, budget, &verdict, options.witness_limit)
            }
            CheckKind::Lbto { cfg, budget, .. } => {
                let SecretSpec::WordInLanguage(language) = secret else {
                    unreachable!("parser enforces a language secret for lbto");
                };
                let cfg = doc.obs_config(cfg).expect("resolved at parse time");
                let verdict =
                    check_lbto(evolutions, language, cfg.observable_events())
                        .map_err(|e| fail(e.into()))?;
                verdict_report(doc, &check.name, budget, &verdict, options.witness_limit)
            }
            CheckKind::Eto { budget, .. } => {
                let SecretSpec::PrivateRun(spec) = secret else {
                    unreachable!("parser enforces a private_run secret for eto");
                };
                let verdict = check_eto(evolutions, spec);
                verdict_report(doc, &check.name, budget, &verdict, options.witness_limit)
            }
            CheckKind::Representable { budget, .. } => {
                let outcome =
                    check_word_representable(evolutions, secret).map_err(|e| fail(e.into()))?;
                let representable = outcome.is_representable();
                CheckReport {
                    name: check.name.clone(),
                    notion: "representable".to_string(),
                    opaque: representable,
                    verdict: if representable {
                        "representable".to_string()
                    } else {
                        "not representable".to_string()
                    },
                    bounded: true,
                    budget: budget_echo(doc, budget),
                    witnesses: Vec::new(),
                    witness_total: 0,
                    counter_pair: outcome.counter_pair.map(|(s, p)| {
                        [s.render(&doc.automaton), p.render(&doc.automaton)]
                    }),
                    cover_size: 0,
                    notes: Vec::new(),
                    millis: None,
                }
            }
            CheckKind::Closure { budget, .. } => {
                let outcome =
                    check_secret_closure(evolutions, secret).map_err(|e| fail(e.into()))?;
                let closed = outcome.is_closed();
                CheckReport {
                    name: check.name.clone(),
                    notion: "closure".to_string(),
                    opaque: closed,
                    verdict: if closed {
                        "well-formed".to_string()
                    } else {
                        "ill-formed".to_string()
                    },
                    bounded: true,
                    budget: budget_echo(doc, budget),
                    witnesses: Vec::new(),
                    witness_total: 0,
                    counter_pair: outcome.violation.map(|(a, b)| {
                        [a.render(&doc.automaton), b.render(&doc.automaton)]
                    }),
                    cover_size: 0,
                    notes: Vec::new(),
                    millis: None,
                }
            }
        };
        if !options.stable {
            report.millis = Some(started.elapsed().as_millis());
        }
        reports.push(report);
    }

    Ok(Report {
        checksum: document_checksum(text),
        checks: reports,
    })
}

//! Serializes a resolved document back to the model grammar. Parsing the
//! output yields an identical document, which keeps corpus files diffable
//! and round-trip testable.

use opacheck_core::{
    format_rational, ClockConstraint, SecretSpec, TimedAutomaton, TimedLanguageSpec,
};

use crate::document::{CheckKind, ModelDocument};

fn render_atom(c: &ClockConstraint, ta: &TimedAutomaton) -> String {
    match c {
        ClockConstraint::True => "true".to_string(),
        ClockConstraint::Cmp { clock, op, bound } => {
            format!("{} {} {}", ta.clock_name(*clock), op.symbol(), bound)
        }
        ClockConstraint::Diff {
            minuend,
            subtrahend,
            op,
            bound,
        } => format!(
            "{} - {} {} {}",
            ta.clock_name(*minuend),
            ta.clock_name(*subtrahend),
            op.symbol(),
            bound
        ),
        other => render_and(other, ta),
    }
}

fn render_and(c: &ClockConstraint, ta: &TimedAutomaton) -> String {
    match c {
        ClockConstraint::And(l, r) => {
            format!("{} and {}", render_and(l, ta), render_and(r, ta))
        }
        ClockConstraint::Or(..) => format!("({})", render_constraint(c, ta)),
        other => render_atom(other, ta),
    }
}

pub fn render_constraint(c: &ClockConstraint, ta: &TimedAutomaton) -> String {
    match c {
        ClockConstraint::Or(l, r) => {
            format!("{} or {}", render_constraint(l, ta), render_constraint(r, ta))
        }
        other => render_and(other, ta),
    }
}

fn render_name_list<I: IntoIterator<Item = String>>(names: I) -> String {
    names.into_iter().collect::<Vec<_>>().join(", ")
}

fn render_secret(secret: &SecretSpec, ta: &TimedAutomaton) -> String {
    match secret {
        SecretSpec::LocationVisit(l) => format!("location_visit({})", ta.location_name(*l)),
        SecretSpec::WordInLanguage(TimedLanguageSpec::FiniteList(words)) => {
            if words.is_empty() {
                "word_in_list { }".to_string()
            } else {
                let rendered: Vec<String> = words.iter().map(|w| w.render(ta)).collect();
                format!("word_in_list {{ {} }}", rendered.join(" ; "))
            }
        }
        SecretSpec::WordInLanguage(TimedLanguageSpec::Predicate(call)) => {
            match call.name.as_str() {
                "word_prefix_of" => {
                    let [opacheck_core::PredicateArg::Word(w)] = call.args.as_slice() else {
                        panic!("word_prefix_of takes exactly one word");
                    };
                    format!("word_prefix_of({})", w.render(ta))
                }
                "event_count_eq" => {
                    let [opacheck_core::PredicateArg::Event(e), opacheck_core::PredicateArg::Count(n)] =
                        call.args.as_slice()
                    else {
                        panic!("event_count_eq takes an event and a count");
                    };
                    format!("event_count_eq({}, {})", ta.event_name(*e), n)
                }
                "word_in_list" => {
                    let words: Vec<String> = call
                        .args
                        .iter()
                        .map(|a| match a {
                            opacheck_core::PredicateArg::Word(w) => w.render(ta),
                            _ => panic!("word_in_list takes words"),
                        })
                        .collect();
                    if words.is_empty() {
                        "word_in_list { }".to_string()
                    } else {
                        format!("word_in_list {{ {} }}", words.join(" ; "))
                    }
                }
                other => panic!("cannot render unknown language predicate `{other}`"),
            }
        }
        SecretSpec::TrailingDelayGreater {
            threshold,
            after_event,
        } => format!(
            "trailing_delay_gt({}, after {})",
            format_rational(threshold),
            ta.event_name(*after_event)
        ),
        SecretSpec::PrivateRun(spec) => format!(
            "private_run({}, {})",
            ta.location_name(spec.private_location),
            ta.location_name(spec.final_location)
        ),
        SecretSpec::ExplicitList(evolutions) => {
            if evolutions.is_empty() {
                "evolutions { }".to_string()
            } else {
                let rendered: Vec<String> = evolutions.iter().map(|e| e.render(ta)).collect();
                format!("evolutions {{ {} }}", rendered.join(" ; "))
            }
        }
    }
}

/// Renders a document in canonical statement order: clocks, events,
/// locations, edges, observation configs, secrets, budgets, checks.
pub fn render_document(doc: &ModelDocument) -> String {
    let ta = &doc.automaton;
    let mut out = String::new();

    let clock_names: Vec<String> = ta.clocks().map(|c| ta.clock_name(c).to_string()).collect();
    out.push_str(&format!("clocks {};\n", render_name_list(clock_names)));
    let event_names: Vec<String> = ta.events().map(|e| ta.event_name(e).to_string()).collect();
    out.push_str(&format!("events {};\n", render_name_list(event_names)));

    for l in ta.locations() {
        out.push_str(&format!("location {}", ta.location_name(l)));
        if l == ta.initial_location() {
            out.push_str(" init");
        }
        let invariant = ta.invariant(l);
        if *invariant != ClockConstraint::True {
            out.push_str(&format!(" invariant {}", render_constraint(invariant, ta)));
        }
        out.push_str(";\n");
    }

    for edge in ta.edges() {
        out.push_str(&format!(
            "edge {} -> {} on {}",
            ta.location_name(edge.source),
            ta.location_name(edge.target),
            ta.event_name(edge.event)
        ));
        if edge.guard != ClockConstraint::True {
            out.push_str(&format!(" when {}", render_constraint(&edge.guard, ta)));
        }
        if !edge.resets.is_empty() {
            let resets: Vec<String> = edge
                .resets
                .iter()
                .map(|c| ta.clock_name(*c).to_string())
                .collect();
            out.push_str(&format!(" reset {}", render_name_list(resets)));
        }
        out.push_str(";\n");
    }

    for (name, cfg) in &doc.obs_configs {
        let locations = render_name_list(
            cfg.observable_locations()
                .iter()
                .map(|l| ta.location_name(*l).to_string()),
        );
        let clocks = render_name_list(
            cfg.observable_clocks()
                .iter()
                .map(|c| ta.clock_name(*c).to_string()),
        );
        let events: String = render_name_list(
            cfg.observable_events()
                .iter()
                .map(|e| ta.event_name(*e).to_string()),
        );
        out.push_str(&format!(
            "obs {name} {{ locations: {locations}; clocks: {clocks}; events: {events}; }}\n"
        ));
    }

    for (name, secret) in &doc.secrets {
        out.push_str(&format!("secret {name} = {};\n", render_secret(secret, ta)));
    }

    for (name, budget) in &doc.budgets {
        let grid = budget
            .delay_grid()
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ");
        let alternating = if budget.alternating() {
            " alternating: true;"
        } else {
            ""
        };
        out.push_str(&format!(
            "budget {name} {{ steps: {}; grid: {grid}; zero_delay: {};{alternating} }}\n",
            budget.max_steps(),
            budget.include_zero_delay()
        ));
    }

    for check in &doc.checks {
        let args = match &check.kind {
            CheckKind::Ebto {
                secret,
                cfg,
                budget,
            }
            | CheckKind::Lbto {
                secret,
                cfg,
                budget,
            } => format!("{secret}, {cfg}, {budget}"),
            CheckKind::Eto { secret, budget }
            | CheckKind::Representable { secret, budget }
            | CheckKind::Closure { secret, budget } => format!("{secret}, {budget}"),
        };
        out.push_str(&format!(
            "check {}: {}({});\n",
            check.name,
            check.kind.notion(),
            args
        ));
    }

    out
}

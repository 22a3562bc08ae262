//! Execution-time machinery: runs, the normalization from evolutions to
//! runs, durations, and the private/public visit predicates.
//!
//! A run keeps one step per discrete event, folding all delays since the
//! previous event into a single per-step duration and dropping any trailing
//! delay after the last event. Intermediate delay-only states are
//! intentionally absent from the run: measuring only accumulated durations
//! is precisely the information loss that separates duration-based
//! reasoning from evolution-based reasoning.

use crate::model::{EventId, LocationId, ModelError, State, TimedAutomaton};
use crate::rational::{format_rational, rat, Rational};
use crate::semantics::{Action, Evolution};

/// One step of a run: the delay accumulated since the previous event, the
/// event, and the state reached by it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunStep {
    pub delay: Rational,
    pub event: EventId,
    pub state: State,
}

/// An alternating sequence of states and (delay, event) pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    initial: State,
    steps: Vec<RunStep>,
}

impl Run {
    pub fn initial_state(&self) -> &State {
        &self.initial
    }

    pub fn steps(&self) -> &[RunStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last_state(&self) -> &State {
        self.steps.last().map(|s| &s.state).unwrap_or(&self.initial)
    }

    /// All run states in order: the initial state and each post-event state.
    pub fn states(&self) -> impl Iterator<Item = &State> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.state))
    }

    /// Exact sum of the per-step delays.
    pub fn duration(&self) -> Rational {
        self.steps.iter().fold(rat(0), |acc, s| acc + &s.delay)
    }

    /// Renders the run as `(l0, {x: 0}), (2, a), (l1, {x: 0}), (3, b), …`.
    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        let mut out = self.initial.render(automaton);
        for step in &self.steps {
            out.push_str(&format!(
                ", ({}, {}), {}",
                format_rational(&step.delay),
                automaton.event_name(step.event),
                step.state.render(automaton)
            ));
        }
        out
    }
}

/// Private and final locations for execution-time checks. The final
/// location should be reachable for the checks to say anything; an
/// unreachable final location is reported as a note on the verdict, not an
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtoSpec {
    pub private_location: LocationId,
    pub final_location: LocationId,
}

impl EtoSpec {
    pub fn new(
        automaton: &TimedAutomaton,
        private_location: LocationId,
        final_location: LocationId,
    ) -> Result<Self, ModelError> {
        for (kind, id) in [
            ("location", private_location),
            ("location", final_location),
        ] {
            if id.index() >= automaton.location_count() {
                return Err(ModelError::IdOutOfRange {
                    kind,
                    index: id.index() as u32,
                    declared: automaton.location_count(),
                });
            }
        }
        Ok(EtoSpec {
            private_location,
            final_location,
        })
    }
}

/// Normalizes an evolution to a run: one step per discrete event, with the
/// step delay the sum of all delays since the previous event. Trailing
/// delays after the last event are not part of the run.
pub fn normalize_run(evolution: &Evolution) -> Run {
    let mut steps = Vec::new();
    let mut pending = rat(0);
    for (action, state) in evolution.steps() {
        match action {
            Action::Delay(d) => pending += d,
            Action::Event(e) => {
                steps.push(RunStep {
                    delay: std::mem::replace(&mut pending, rat(0)),
                    event: *e,
                    state: state.clone(),
                });
            }
        }
    }
    Run {
        initial: evolution.initial_state().clone(),
        steps,
    }
}

/// Exact delay sum of a run.
pub fn run_duration(run: &Run) -> Rational {
    run.duration()
}

/// True when the evolution terminates exactly upon entering `final_location`
/// for the first time: the last state is there, no earlier state is, and
/// the last action is a discrete event (location changes are event-driven,
/// so a trailing delay means the evolution outlived the arrival).
pub fn ends_at_first_final(evolution: &Evolution, final_location: LocationId) -> bool {
    let Some((last_action, last_state)) = evolution.steps().last() else {
        return false;
    };
    if !matches!(last_action, Action::Event(_)) {
        return false;
    }
    if last_state.location() != final_location {
        return false;
    }
    let states: Vec<_> = evolution.states().collect();
    states[..states.len() - 1]
        .iter()
        .all(|s| s.location() != final_location)
}

/// True when the run visits the private location on the way to the first
/// occurrence of the final location: some state is private, the last state
/// is final, and no earlier state is final.
pub fn is_private_run(run: &Run, spec: &EtoSpec) -> bool {
    let states: Vec<_> = run.states().collect();
    let Some((last, earlier)) = states.split_last() else {
        return false;
    };
    last.location() == spec.final_location
        && earlier.iter().all(|s| s.location() != spec.final_location)
        && states
            .iter()
            .any(|s| s.location() == spec.private_location)
}

/// True when the run reaches the final location for the first time without
/// ever visiting the private location (including at the final state).
pub fn is_public_run(run: &Run, spec: &EtoSpec) -> bool {
    let states: Vec<_> = run.states().collect();
    let Some((last, earlier)) = states.split_last() else {
        return false;
    };
    last.location() == spec.final_location
        && earlier.iter().all(|s| s.location() != spec.final_location)
        && states
            .iter()
            .all(|s| s.location() != spec.private_location)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fig4, two_event_loop};
    use crate::model::{ClockConstraint, TimedAutomatonBuilder};
    use crate::rational::ratio;
    use crate::semantics::{event_successor, initial_state, time_successor};

    fn run_actions(ta: &TimedAutomaton, actions: &[Action]) -> Evolution {
        let s0 = initial_state(ta).unwrap();
        let mut evo = Evolution::new(s0.clone());
        let mut cur = s0;
        for action in actions {
            cur = match action {
                Action::Delay(d) => time_successor(ta, &cur, d).unwrap(),
                Action::Event(e) => event_successor(ta, &cur, *e).unwrap().unwrap(),
            };
            evo.push(action.clone(), cur.clone());
        }
        evo
    }

    #[test]
    fn normalization_folds_delays_and_drops_trailing() {
        // 0.5, 1.5 / a / 3.0 / b / 4.5 normalizes to (2.0, a), (3.0, b)
        let ta = two_event_loop();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(ratio(1, 2)),
                Action::Delay(ratio(3, 2)),
                Action::Event(a),
                Action::Delay(rat(3)),
                Action::Event(b),
                Action::Delay(ratio(9, 2)),
            ],
        );
        let run = normalize_run(&evo);
        assert_eq!(run.len(), 2);
        assert_eq!(run.steps()[0].delay, rat(2));
        assert_eq!(run.steps()[0].event, a);
        assert_eq!(run.steps()[1].delay, rat(3));
        assert_eq!(run.steps()[1].event, b);
        // the run states are the post-event states of the evolution
        assert_eq!(run.steps()[0].state, evo.steps()[2].1);
        assert_eq!(run.steps()[1].state, evo.steps()[4].1);

        assert_eq!(run_duration(&run), rat(5));
        assert_eq!(evo.duration(), ratio(19, 2));
    }

    #[test]
    fn eventless_evolution_normalizes_to_zero_step_run() {
        let ta = two_event_loop();
        let evo = run_actions(&ta, &[Action::Delay(rat(1))]);
        let run = normalize_run(&evo);
        assert!(run.is_empty());
        assert_eq!(run_duration(&run), rat(0));
    }

    #[test]
    fn duration_is_preserved_when_ending_on_an_event() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        );
        assert!(ends_at_first_final(&evo, ta.location_id("lf").unwrap()));
        assert_eq!(run_duration(&normalize_run(&evo)), evo.duration());
        assert_eq!(evo.duration(), rat(3));
    }

    #[test]
    fn first_final_detection() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let lf = ta.location_id("lf").unwrap();
        let to_final = [
            Action::Delay(rat(1)),
            Action::Event(a),
            Action::Delay(rat(2)),
            Action::Event(b),
        ];
        assert!(ends_at_first_final(&run_actions(&ta, &to_final), lf));

        // a trailing delay means the evolution did not stop at the arrival
        let mut with_tail = to_final.to_vec();
        with_tail.push(Action::Delay(rat(1)));
        assert!(!ends_at_first_final(&run_actions(&ta, &with_tail), lf));

        // single-state evolution never "enters" anything
        let single = Evolution::new(initial_state(&ta).unwrap());
        assert!(!ends_at_first_final(&single, ta.location_id("l0").unwrap()));
    }

    #[test]
    fn revisiting_the_final_location_is_not_a_first_visit() {
        // cycle l0 -a-> lf -b-> l0, so lf can be entered twice
        let mut builder = TimedAutomatonBuilder::new();
        builder.clock("x");
        let a = builder.event("a");
        let b = builder.event("b");
        let l0 = builder.location("l0");
        let lf = builder.location("lf");
        builder.initial(l0);
        builder.edge(l0, a, ClockConstraint::tt(), [], lf);
        builder.edge(lf, b, ClockConstraint::tt(), [], l0);
        let ta = builder.build().unwrap();

        let twice = run_actions(
            &ta,
            &[
                Action::Event(a),
                Action::Event(b),
                Action::Delay(rat(1)),
                Action::Event(a),
            ],
        );
        assert!(!ends_at_first_final(&twice, lf));

        let once = run_actions(&ta, &[Action::Delay(rat(1)), Action::Event(a)]);
        assert!(ends_at_first_final(&once, lf));
    }

    #[test]
    fn private_and_public_runs_on_the_diamond() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let spec = EtoSpec::new(
            &ta,
            ta.location_id("l1").unwrap(),
            ta.location_id("lf").unwrap(),
        )
        .unwrap();

        let via_l1 = normalize_run(&run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        ));
        assert!(is_private_run(&via_l1, &spec));
        assert!(!is_public_run(&via_l1, &spec));

        let via_l2 = normalize_run(&run_actions(
            &ta,
            &[
                Action::Delay(rat(2)),
                Action::Event(a),
                Action::Delay(rat(1)),
                Action::Event(b),
            ],
        ));
        assert!(is_public_run(&via_l2, &spec));
        assert!(!is_private_run(&via_l2, &spec));

        // a run that never reaches lf is neither
        let stuck = normalize_run(&run_actions(&ta, &[Action::Delay(rat(1)), Action::Event(a)]));
        assert!(!is_private_run(&stuck, &spec));
        assert!(!is_public_run(&stuck, &spec));
    }

    #[test]
    fn normalization_is_invariant_under_delay_fragmentation() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let whole = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        );
        let fragmented = run_actions(
            &ta,
            &[
                Action::Delay(ratio(1, 2)),
                Action::Delay(ratio(1, 2)),
                Action::Event(a),
                Action::Delay(ratio(3, 2)),
                Action::Delay(ratio(1, 2)),
                Action::Event(b),
            ],
        );
        assert_eq!(normalize_run(&whole), normalize_run(&fragmented));
        assert_eq!(
            normalize_run(&whole),
            normalize_run(&crate::observation::canonicalize_tau(&fragmented))
        );
    }

    #[test]
    fn run_renders_with_full_states() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let run = normalize_run(&run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        ));
        assert_eq!(
            run.render(&ta),
            "(l0, {x: 0}), (1, a), (l1, {x: 0}), (2, b), (lf, {x: 2})"
        );
    }
}

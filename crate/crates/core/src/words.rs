//! Timed words, projection, and the mapping from evolutions to words.
//!
//! A timed word records the discrete events of an evolution together with
//! global timestamps (the sum of all preceding delays). Everything after the
//! last discrete event is discarded by this abstraction — trailing delays
//! are invisible to word-level reasoning, which is exactly the blind spot
//! the evolution-level machinery exists to close.
//!
//! Word preimages under the evolution-to-word mapping are infinite, so they
//! are exposed only as a membership predicate, never as set construction.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{EventId, TimedAutomaton};
use crate::observation::{ObservationSequence, ObservedAction};
use crate::rational::{format_rational, rat, Rational};
use crate::semantics::{Action, Evolution};

/// A finite sequence of (event, timestamp) pairs with non-decreasing,
/// non-negative timestamps.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedWord(Vec<(EventId, Rational)>);

impl TimedWord {
    pub fn empty() -> Self {
        TimedWord(Vec::new())
    }

    /// Builds a word, validating timestamp monotonicity and non-negativity.
    pub fn new(pairs: Vec<(EventId, Rational)>) -> Result<Self, WordsError> {
        let mut previous = rat(0);
        for (_, t) in &pairs {
            if *t < previous {
                return Err(WordsError::NonMonotonicTimestamps {
                    earlier: format_rational(&previous),
                    later: format_rational(t),
                });
            }
            previous = t.clone();
        }
        Ok(TimedWord(pairs))
    }

    pub fn pairs(&self) -> &[(EventId, Rational)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &TimedWord) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Renders the word as `(a,1)(b,100)`; the empty word renders as `eps`.
    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        if self.0.is_empty() {
            return "eps".to_string();
        }
        self.0
            .iter()
            .map(|(e, t)| format!("({},{})", automaton.event_name(*e), format_rational(t)))
            .collect()
    }
}

/// Errors from word and language operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordsError {
    #[error("timestamps must be non-decreasing: {later} follows {earlier}")]
    NonMonotonicTimestamps { earlier: String, later: String },
    #[error("unknown language predicate `{name}`")]
    UnknownPredicate { name: String },
    #[error("language predicate `{name}` expects {expected}")]
    BadPredicateArgs { name: String, expected: &'static str },
}

/// A finite description of a timed language: either an explicit finite list
/// of words or a named predicate with arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimedLanguageSpec {
    FiniteList(Vec<TimedWord>),
    Predicate(PredicateCall),
}

/// A named language predicate applied to arguments. The built-in predicates
/// are `word_in_list` (membership in an explicit list), `word_prefix_of`
/// (the word is a prefix of the given word), and `event_count_eq` (the word
/// contains exactly the given number of occurrences of an event).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateCall {
    pub name: String,
    pub args: Vec<PredicateArg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredicateArg {
    Word(TimedWord),
    Event(EventId),
    Count(u64),
}

/// Decides membership of a word in a language spec.
pub fn language_contains(spec: &TimedLanguageSpec, word: &TimedWord) -> Result<bool, WordsError> {
    match spec {
        TimedLanguageSpec::FiniteList(words) => Ok(words.contains(word)),
        TimedLanguageSpec::Predicate(call) => match call.name.as_str() {
            "word_in_list" => {
                let mut words = Vec::with_capacity(call.args.len());
                for arg in &call.args {
                    match arg {
                        PredicateArg::Word(w) => words.push(w),
                        _ => {
                            return Err(WordsError::BadPredicateArgs {
                                name: call.name.clone(),
                                expected: "a list of timed words",
                            })
                        }
                    }
                }
                Ok(words.contains(&word))
            }
            "word_prefix_of" => match call.args.as_slice() {
                [PredicateArg::Word(w)] => Ok(word.is_prefix_of(w)),
                _ => Err(WordsError::BadPredicateArgs {
                    name: call.name.clone(),
                    expected: "exactly one timed word",
                }),
            },
            "event_count_eq" => match call.args.as_slice() {
                [PredicateArg::Event(e), PredicateArg::Count(n)] => {
                    let count = word.pairs().iter().filter(|(w, _)| w == e).count() as u64;
                    Ok(count == *n)
                }
                _ => Err(WordsError::BadPredicateArgs {
                    name: call.name.clone(),
                    expected: "an event and a count",
                }),
            },
            _ => Err(WordsError::UnknownPredicate {
                name: call.name.clone(),
            }),
        },
    }
}

/// Converts an evolution to its timed word: one pair per discrete event,
/// timestamped with the sum of all preceding delays. Trailing delays after
/// the last event contribute nothing.
pub fn to_timed_word(evolution: &Evolution) -> TimedWord {
    let mut now = rat(0);
    let mut pairs = Vec::new();
    for (action, _) in evolution.steps() {
        match action {
            Action::Delay(d) => now += d,
            Action::Event(e) => pairs.push((*e, now.clone())),
        }
    }
    TimedWord(pairs)
}

/// The word of an observation sequence: silent actions carry no event and
/// zero duration, so only visible events produce pairs.
pub fn observed_to_timed_word(sequence: &ObservationSequence) -> TimedWord {
    let mut now = rat(0);
    let mut pairs = Vec::new();
    for (action, _) in sequence.steps() {
        match action {
            ObservedAction::Delay(d) => now += d,
            ObservedAction::Event(e) => pairs.push((*e, now.clone())),
            ObservedAction::Silent => {}
        }
    }
    TimedWord(pairs)
}

/// Projection onto an observable event set: keeps the pairs whose event is
/// observable, timestamps unchanged.
pub fn project_word(word: &TimedWord, observable_events: &BTreeSet<EventId>) -> TimedWord {
    TimedWord(
        word.0
            .iter()
            .filter(|(e, _)| observable_events.contains(e))
            .cloned()
            .collect(),
    )
}

/// Membership of an evolution in the preimage of a language: true iff the
/// evolution's timed word belongs to the language.
pub fn word_preimage_member(
    evolution: &Evolution,
    language: &TimedLanguageSpec,
) -> Result<bool, WordsError> {
    language_contains(language, &to_timed_word(evolution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fig2, two_event_loop};
    use crate::observation::{observe_evolution, ObservationConfig};
    use crate::rational::ratio;
    use crate::semantics::{event_successor, initial_state, time_successor, Evolution};

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
    fn worked_example_accumulates_timestamps() {
        // 1.5 / a / 0.7 / 0.3 / b / 0.2 maps to (a, 3/2)(b, 5/2)
        let ta = two_event_loop();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(ratio(3, 2)),
                Action::Event(a),
                Action::Delay(ratio(7, 10)),
                Action::Delay(ratio(3, 10)),
                Action::Event(b),
                Action::Delay(ratio(1, 5)),
            ],
        );
        let word = to_timed_word(&evo);
        assert_eq!(
            word.pairs(),
            &[(a, ratio(3, 2)), (b, ratio(5, 2))]
        );
        assert_eq!(word.render(&ta), "(a,3/2)(b,5/2)");
    }

    #[test]
    fn empty_evolution_maps_to_empty_word() {
        let ta = fig2();
        let evo = Evolution::new(initial_state(&ta).unwrap());
        assert!(to_timed_word(&evo).is_empty());
    }

    #[test]
    fn fig2_full_run_yields_both_events() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(99)),
                Action::Event(b),
            ],
        );
        let word = to_timed_word(&evo);
        assert_eq!(word.pairs(), &[(a, rat(1)), (b, rat(100))]);
    }

    #[test]
    fn trailing_delays_are_invisible_to_words() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let base = run_actions(&ta, &[Action::Delay(rat(1)), Action::Event(a)]);
        let extended = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(50)),
            ],
        );
        assert_eq!(to_timed_word(&base), to_timed_word(&extended));
    }

    #[test]
    fn projection_keeps_observable_pairs() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let w2 = TimedWord::new(vec![(a, rat(1)), (b, rat(100))]).unwrap();

        let only_a: BTreeSet<EventId> = [a].into_iter().collect();
        assert_eq!(
            project_word(&w2, &only_a).pairs(),
            &[(a, rat(1))]
        );

        let all: BTreeSet<EventId> = [a, b].into_iter().collect();
        assert_eq!(project_word(&w2, &all), w2);

        assert!(project_word(&w2, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn preimage_membership_by_word_equality() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let w1 = TimedWord::new(vec![(a, rat(1))]).unwrap();
        let w2 = TimedWord::new(vec![(a, rat(1)), (b, rat(100))]).unwrap();

        let lang1 = TimedLanguageSpec::FiniteList(vec![w1.clone()]);
        let lang2 = TimedLanguageSpec::FiniteList(vec![w2.clone()]);
        let empty = TimedLanguageSpec::FiniteList(vec![]);

        // total delay 1, then a, then a trailing 50
        let short = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(50)),
            ],
        );
        assert!(word_preimage_member(&short, &lang1).unwrap());
        assert!(!word_preimage_member(&short, &lang2).unwrap());

        let full = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(99)),
                Action::Event(b),
            ],
        );
        assert!(word_preimage_member(&full, &lang2).unwrap());
        assert!(!word_preimage_member(&full, &lang1).unwrap());
        assert!(!word_preimage_member(&full, &empty).unwrap());
    }

    #[test]
    fn builtin_predicates() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let w1 = TimedWord::new(vec![(a, rat(1))]).unwrap();
        let w2 = TimedWord::new(vec![(a, rat(1)), (b, rat(100))]).unwrap();

        let in_list = TimedLanguageSpec::Predicate(PredicateCall {
            name: "word_in_list".to_string(),
            args: vec![PredicateArg::Word(w1.clone())],
        });
        assert!(language_contains(&in_list, &w1).unwrap());
        assert!(!language_contains(&in_list, &w2).unwrap());

        let prefix = TimedLanguageSpec::Predicate(PredicateCall {
            name: "word_prefix_of".to_string(),
            args: vec![PredicateArg::Word(w2.clone())],
        });
        assert!(language_contains(&prefix, &w1).unwrap());
        assert!(language_contains(&prefix, &w2).unwrap());
        assert!(language_contains(&prefix, &TimedWord::empty()).unwrap());
        let other = TimedWord::new(vec![(b, rat(1))]).unwrap();
        assert!(!language_contains(&prefix, &other).unwrap());

        let count = TimedLanguageSpec::Predicate(PredicateCall {
            name: "event_count_eq".to_string(),
            args: vec![PredicateArg::Event(a), PredicateArg::Count(1)],
        });
        assert!(language_contains(&count, &w1).unwrap());
        assert!(language_contains(&count, &w2).unwrap());
        assert!(!language_contains(&count, &TimedWord::empty()).unwrap());

        let unknown = TimedLanguageSpec::Predicate(PredicateCall {
            name: "no_such_predicate".to_string(),
            args: vec![],
        });
        assert!(matches!(
            language_contains(&unknown, &w1),
            Err(WordsError::UnknownPredicate { .. })
        ));
    }

    #[test]
    fn word_of_observation_skips_silent_steps() {
        // the identity: word-of-observation equals projection-of-word
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(99)),
                Action::Event(b),
                Action::Delay(rat(1)),
            ],
        );
        for events in [vec![], vec![a], vec![b], vec![a, b]] {
            let cfg = ObservationConfig::events_only(&ta, events.clone()).unwrap();
            let lhs = observed_to_timed_word(&observe_evolution(&evo, &cfg));
            let rhs = project_word(&to_timed_word(&evo), &events.into_iter().collect());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn word_constructor_rejects_decreasing_timestamps() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        assert!(matches!(
            TimedWord::new(vec![(a, rat(2)), (a, rat(1))]),
            Err(WordsError::NonMonotonicTimestamps { .. })
        ));
    }
}

//! Timed-automata modeling and opacity checking over bounded evolution
//! sets.
//!
//! The library models timed automata with exact rational time, enumerates
//! generated evolutions of the semantic graph over a finite delay grid, and
//! decides three opacity notions against finite secret descriptions:
//!
//! - evolution-based opacity, via observational equivalence of masked
//!   evolutions under partial observation of locations, clocks, and events;
//! - language-based opacity, via projection equality of generated timed
//!   words;
//! - execution-time opacity, via inclusion of private run durations in
//!   public run durations.
//!
//! Verdicts are bounded: a non-opaque verdict exhibits a witness and is
//! sound, while an opaque verdict is relative to the enumeration budget it
//! records.

pub mod corpus;
pub mod model;
pub mod observation;
pub mod opacity;
pub mod rational;
pub mod runs;
pub mod semantics;
pub mod words;

pub use model::{
    ClockConstraint, ClockId, ClockValuation, CmpOp, Edge, EventId, LocationId, ModelError,
    State, TimedAutomaton, TimedAutomatonBuilder,
};
pub use observation::{
    apply_rewrite, canonicalize, canonicalize_tau, elapse_observed, obs_equivalent,
    observe_action, observe_evolution, observe_state, rewrite_candidates, CanonicalObservation,
    ObservationConfig, ObservationSequence, ObservedAction, ObservedState, ObservedValuation,
    Rewrite, RewriteRule,
};
pub use opacity::{
    check_closure_bounded, check_ebto, check_ebto_bounded, check_eto, check_eto_bounded,
    check_lbto, check_lbto_bounded, check_representable_bounded, check_secret_closure,
    check_word_representable, convert_eto, convert_lbto, CheckError, ClosureCheck, CoverMap,
    Notion, OpacityError, RepresentabilityCheck, SecretSpec, Verdict, Witness,
};
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use runs::{
    ends_at_first_final, is_private_run, is_public_run, normalize_run, run_duration, EtoSpec,
    Run, RunStep,
};
pub use semantics::{
    check_determinism, duration, enumerate_evolutions, event_successor, initial_state,
    time_successor, validate_evolution, Action, EnumerationBudget, Evolution, Invalidity,
    SemanticsError,
};
pub use words::{
    language_contains, observed_to_timed_word, project_word, to_timed_word,
    word_preimage_member, PredicateArg, PredicateCall, TimedLanguageSpec, TimedWord, WordsError,
};

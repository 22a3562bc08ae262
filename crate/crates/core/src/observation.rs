//! The universal observation model: masking of locations, clocks, and
//! events, observation sequences, and decision of observational equivalence
//! via canonical forms.
//!
//! Observational equivalence is defined as the closure of three rewrites:
//! silent-step removal, merging of adjacent delays, and zero-delay removal.
//! Each rewrite strictly shortens a sequence, so repeated application
//! terminates; two evolutions are equivalent iff their observations share a
//! canonical form. The rewrite system has no confluence proof, so the test
//! suites additionally drive the rewrites in randomized orders and check
//! that every order converges to the same normal form.

use std::collections::BTreeSet;

use crate::model::{
    ClockId, EventId, LocationId, ModelError, State, TimedAutomaton,
};
use crate::rational::{format_rational, rat, Rational};
use crate::semantics::{Action, Evolution};

/// Which locations, clocks, and events an observer can see. The complements
/// of these sets are the unobservable partitions. Time delays are always
/// fully observable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationConfig {
    observable_locations: BTreeSet<LocationId>,
    observable_clocks: BTreeSet<ClockId>,
    observable_events: BTreeSet<EventId>,
}

impl ObservationConfig {
    pub fn new(
        automaton: &TimedAutomaton,
        locations: impl IntoIterator<Item = LocationId>,
        clocks: impl IntoIterator<Item = ClockId>,
        events: impl IntoIterator<Item = EventId>,
    ) -> Result<Self, ModelError> {
        let observable_locations: BTreeSet<LocationId> = locations.into_iter().collect();
        let observable_clocks: BTreeSet<ClockId> = clocks.into_iter().collect();
        let observable_events: BTreeSet<EventId> = events.into_iter().collect();
        for l in &observable_locations {
            if l.index() >= automaton.location_count() {
                return Err(ModelError::IdOutOfRange {
                    kind: "location",
                    index: l.index() as u32,
                    declared: automaton.location_count(),
                });
            }
        }
        for c in &observable_clocks {
            if c.index() >= automaton.clock_count() {
                return Err(ModelError::IdOutOfRange {
                    kind: "clock",
                    index: c.index() as u32,
                    declared: automaton.clock_count(),
                });
            }
        }
        for e in &observable_events {
            if e.index() >= automaton.event_count() {
                return Err(ModelError::IdOutOfRange {
                    kind: "event",
                    index: e.index() as u32,
                    declared: automaton.event_count(),
                });
            }
        }
        Ok(ObservationConfig {
            observable_locations,
            observable_clocks,
            observable_events,
        })
    }

    /// Everything masked: the observer sees only delays.
    pub fn fully_hidden() -> Self {
        ObservationConfig {
            observable_locations: BTreeSet::new(),
            observable_clocks: BTreeSet::new(),
            observable_events: BTreeSet::new(),
        }
    }

    /// Only the given events observable; locations and clocks masked.
    pub fn events_only(
        automaton: &TimedAutomaton,
        events: impl IntoIterator<Item = EventId>,
    ) -> Result<Self, ModelError> {
        Self::new(automaton, [], [], events)
    }

    /// Only the given location observable; clocks and events masked.
    pub fn location_only(
        automaton: &TimedAutomaton,
        location: LocationId,
    ) -> Result<Self, ModelError> {
        Self::new(automaton, [location], [], [])
    }

    pub fn fully_observable(automaton: &TimedAutomaton) -> Self {
        ObservationConfig {
            observable_locations: automaton.locations().collect(),
            observable_clocks: automaton.clocks().collect(),
            observable_events: automaton.events().collect(),
        }
    }

    pub fn observable_locations(&self) -> &BTreeSet<LocationId> {
        &self.observable_locations
    }

    pub fn observable_clocks(&self) -> &BTreeSet<ClockId> {
        &self.observable_clocks
    }

    pub fn observable_events(&self) -> &BTreeSet<EventId> {
        &self.observable_events
    }

    pub fn location_observable(&self, l: LocationId) -> bool {
        self.observable_locations.contains(&l)
    }

    pub fn clock_observable(&self, c: ClockId) -> bool {
        self.observable_clocks.contains(&c)
    }

    pub fn event_observable(&self, e: EventId) -> bool {
        self.observable_events.contains(&e)
    }
}

/// Per-clock observed value: the exact rational for observable clocks, the
/// mask for unobservable ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservedValuation(Vec<Option<Rational>>);

impl ObservedValuation {
    pub fn new(values: Vec<Option<Rational>>) -> Self {
        ObservedValuation(values)
    }

    pub fn values(&self) -> &[Option<Rational>] {
        &self.0
    }

    /// Extended time elapse: adds the delay to every visible entry and
    /// leaves masked entries masked.
    pub fn elapse(&self, delay: &Rational) -> ObservedValuation {
        debug_assert!(*delay >= rat(0));
        ObservedValuation(
            self.0
                .iter()
                .map(|v| v.as_ref().map(|v| v + delay))
                .collect(),
        )
    }
}

/// An observed state: the location (or its mask) and the observed valuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservedState {
    location: Option<LocationId>,
    valuation: ObservedValuation,
}

impl ObservedState {
    pub fn new(location: Option<LocationId>, valuation: ObservedValuation) -> Self {
        ObservedState {
            location,
            valuation,
        }
    }

    pub fn location(&self) -> Option<LocationId> {
        self.location
    }

    pub fn valuation(&self) -> &ObservedValuation {
        &self.valuation
    }

    fn elapse(&self, delay: &Rational) -> ObservedState {
        ObservedState {
            location: self.location,
            valuation: self.valuation.elapse(delay),
        }
    }

    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        let location = match self.location {
            Some(l) => automaton.location_name(l).to_string(),
            None => "ε".to_string(),
        };
        let clocks = self
            .valuation
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let value = match v {
                    Some(v) => format_rational(v),
                    None => "ε".to_string(),
                };
                format!("{}: {}", automaton.clock_name(ClockId(i as u32)), value)
            })
            .collect::<Vec<_>>()
            .join(", ");
        format!("({location}, {{{clocks}}})")
    }
}

/// An observed action: a visible event, the silent mask, or a delay.
/// Delays pass through observation unchanged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObservedAction {
    Delay(Rational),
    Event(EventId),
    Silent,
}

impl ObservedAction {
    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        match self {
            ObservedAction::Delay(d) => format_rational(d),
            ObservedAction::Event(e) => automaton.event_name(*e).to_string(),
            ObservedAction::Silent => "ε".to_string(),
        }
    }
}

/// What the observer sees of an evolution: the masked initial state followed
/// by masked action/state steps. Length is preserved by the mapping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservationSequence {
    initial: ObservedState,
    steps: Vec<(ObservedAction, ObservedState)>,
}

impl ObservationSequence {
    pub fn new(initial: ObservedState) -> Self {
        ObservationSequence {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn from_parts(initial: ObservedState, steps: Vec<(ObservedAction, ObservedState)>) -> Self {
        ObservationSequence { initial, steps }
    }

    pub fn initial_state(&self) -> &ObservedState {
        &self.initial
    }

    pub fn steps(&self) -> &[(ObservedAction, ObservedState)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, action: ObservedAction, state: ObservedState) {
        self.steps.push((action, state));
    }

    /// The state a step departs from: the initial state for step 0,
    /// otherwise the state reached by the previous step.
    pub fn state_before(&self, index: usize) -> &ObservedState {
        if index == 0 {
            &self.initial
        } else {
            &self.steps[index - 1].1
        }
    }

    /// Exact sum of all delay actions.
    pub fn total_delay(&self) -> Rational {
        self.steps
            .iter()
            .filter_map(|(a, _)| match a {
                ObservedAction::Delay(d) => Some(d),
                _ => None,
            })
            .fold(rat(0), |acc, d| acc + d)
    }

    /// Renders the sequence in the report line format,
    /// `(l0, {x: 1}) --a--> (ε, {x: ε}) --3/2--> …`.
    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        let mut out = self.initial.render(automaton);
        for (action, state) in &self.steps {
            out.push_str(&format!(
                " --{}--> {}",
                action.render(automaton),
                state.render(automaton)
            ));
        }
        out
    }
}

/// An observation sequence in canonical form: no zero-delay steps, no
/// adjacent delay pairs, and no silent step whose flanking observed states
/// are equal. Only [`canonicalize`] constructs values of this type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalObservation(ObservationSequence);

impl CanonicalObservation {
    pub fn as_sequence(&self) -> &ObservationSequence {
        &self.0
    }

    pub fn into_sequence(self) -> ObservationSequence {
        self.0
    }

    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        self.0.render(automaton)
    }
}

/// Masks a state component-wise: the location becomes its mask when
/// unobservable, and each unobservable clock is masked in the valuation.
pub fn observe_state(state: &State, cfg: &ObservationConfig) -> ObservedState {
    let location = cfg
        .location_observable(state.location())
        .then(|| state.location());
    let valuation = ObservedValuation(
        state
            .valuation()
            .values()
            .enumerate()
            .map(|(i, v)| {
                cfg.clock_observable(ClockId(i as u32))
                    .then(|| v.clone())
            })
            .collect(),
    );
    ObservedState {
        location,
        valuation,
    }
}

/// Masks an action: unobservable events become the silent action, delays
/// pass through unchanged.
pub fn observe_action(action: &Action, cfg: &ObservationConfig) -> ObservedAction {
    match action {
        Action::Delay(d) => ObservedAction::Delay(d.clone()),
        Action::Event(e) if cfg.event_observable(*e) => ObservedAction::Event(*e),
        Action::Event(_) => ObservedAction::Silent,
    }
}

/// Maps an evolution to its observation sequence by structural induction:
/// the zero-length evolution maps to its masked state, and each step maps
/// its action and resulting state. Length is preserved.
pub fn observe_evolution(evolution: &Evolution, cfg: &ObservationConfig) -> ObservationSequence {
    let mut out = ObservationSequence::new(observe_state(evolution.initial_state(), cfg));
    for (action, state) in evolution.steps() {
        out.push(observe_action(action, cfg), observe_state(state, cfg));
    }
    out
}

/// Extended time elapse on an observed valuation (see
/// [`ObservedValuation::elapse`]).
pub fn elapse_observed(valuation: &ObservedValuation, delay: &Rational) -> ObservedValuation {
    valuation.elapse(delay)
}

/// One rewrite of the observational-equivalence system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteRule {
    /// Delete a silent step whose flanking observed states are equal.
    SilentStep,
    /// Merge two adjacent delay steps into their sum.
    MergeDelays,
    /// Delete a zero-delay step.
    DropZeroDelay,
}

/// A rewrite applicable at a specific step index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rewrite {
    pub index: usize,
    pub rule: RewriteRule,
}

fn delay_of(action: &ObservedAction) -> Option<&Rational> {
    match action {
        ObservedAction::Delay(d) => Some(d),
        _ => None,
    }
}

fn rewrite_applies(seq: &ObservationSequence, rw: Rewrite) -> bool {
    let steps = seq.steps();
    let i = rw.index;
    if i >= steps.len() {
        return false;
    }
    let before = seq.state_before(i);
    match rw.rule {
        RewriteRule::SilentStep => steps[i].0 == ObservedAction::Silent && steps[i].1 == *before,
        RewriteRule::DropZeroDelay => {
            steps[i].0 == ObservedAction::Delay(rat(0)) && steps[i].1 == *before
        }
        RewriteRule::MergeDelays => {
            if i + 1 >= steps.len() {
                return false;
            }
            let (Some(t1), Some(t2)) = (delay_of(&steps[i].0), delay_of(&steps[i + 1].0)) else {
                return false;
            };
            // the pattern requires genuine elapse steps: same location,
            // intermediate and final states reached by extended addition
            steps[i].1 == before.elapse(t1)
                && steps[i + 1].1 == before.elapse(&(t1.clone() + t2))
        }
    }
}

/// All rewrites applicable to `seq`, ordered by step index and then by rule
/// (silent step, delay merge, zero delay). [`canonicalize`] always applies
/// the first candidate; randomized strategies may pick any.
pub fn rewrite_candidates(seq: &ObservationSequence) -> Vec<Rewrite> {
    let mut out = Vec::new();
    for index in 0..seq.len() {
        for rule in [
            RewriteRule::SilentStep,
            RewriteRule::MergeDelays,
            RewriteRule::DropZeroDelay,
        ] {
            let rw = Rewrite { index, rule };
            if rewrite_applies(seq, rw) {
                out.push(rw);
            }
        }
    }
    out
}

/// Applies one rewrite, or returns `None` when it does not match.
pub fn apply_rewrite(seq: &ObservationSequence, rw: Rewrite) -> Option<ObservationSequence> {
    if !rewrite_applies(seq, rw) {
        return None;
    }
    let mut steps = seq.steps().to_vec();
    match rw.rule {
        RewriteRule::SilentStep | RewriteRule::DropZeroDelay => {
            steps.remove(rw.index);
        }
        RewriteRule::MergeDelays => {
            let (a2, s2) = steps.remove(rw.index + 1);
            let t2 = delay_of(&a2).cloned().expect("checked by rewrite_applies");
            let t1 = delay_of(&steps[rw.index].0)
                .cloned()
                .expect("checked by rewrite_applies");
            steps[rw.index] = (ObservedAction::Delay(t1 + t2), s2);
        }
    }
    Some(ObservationSequence::from_parts(
        seq.initial_state().clone(),
        steps,
    ))
}

/// Rewrites an observation sequence to its canonical form: the fixpoint of
/// the three rewrites applied leftmost-first. Each rewrite strictly shortens
/// the sequence, so the loop terminates.
pub fn canonicalize(seq: &ObservationSequence) -> CanonicalObservation {
    let mut current = seq.clone();
    loop {
        let candidates = rewrite_candidates(&current);
        match candidates.first() {
            Some(rw) => {
                current = apply_rewrite(&current, *rw).expect("candidate rewrite applies");
            }
            None => return CanonicalObservation(current),
        }
    }
}

fn tau_rewrite_applies(evolution: &Evolution, index: usize, merge: bool) -> Option<()> {
    let steps = evolution.steps();
    let before = if index == 0 {
        evolution.initial_state()
    } else {
        &steps[index - 1].1
    };
    if merge {
        let t1 = steps.get(index)?.0.delay()?;
        let t2 = steps.get(index + 1)?.0.delay()?;
        let same_location = steps[index].1.location() == before.location()
            && steps[index + 1].1.location() == before.location();
        let mid_ok = *steps[index].1.valuation() == before.valuation().elapse(t1).ok()?;
        let end_ok =
            *steps[index + 1].1.valuation() == before.valuation().elapse(&(t1.clone() + t2)).ok()?;
        (same_location && mid_ok && end_ok).then_some(())
    } else {
        let t = steps.get(index)?.0.delay()?;
        (*t == rat(0) && steps[index].1 == *before).then_some(())
    }
}

/// The delay-merging and zero-delay rewrites applied to a concrete
/// evolution until fixpoint. The silent-step rule does not apply here: it
/// is an observation-level rule, and concrete evolutions carry real events.
pub fn canonicalize_tau(evolution: &Evolution) -> Evolution {
    let mut current = evolution.clone();
    'outer: loop {
        for index in 0..current.len() {
            if tau_rewrite_applies(&current, index, true).is_some() {
                let mut steps = current.steps().to_vec();
                let (a2, s2) = steps.remove(index + 1);
                let t2 = a2.delay().cloned().expect("merge candidate");
                let t1 = steps[index].0.delay().cloned().expect("merge candidate");
                steps[index] = (Action::Delay(t1 + t2), s2);
                current = Evolution::from_parts(current.initial_state().clone(), steps);
                continue 'outer;
            }
            if tau_rewrite_applies(&current, index, false).is_some() {
                let mut steps = current.steps().to_vec();
                steps.remove(index);
                current = Evolution::from_parts(current.initial_state().clone(), steps);
                continue 'outer;
            }
        }
        return current;
    }
}

/// Decides observational equivalence of two evolutions under a
/// configuration: equality of the canonical forms of their observations.
pub fn obs_equivalent(lhs: &Evolution, rhs: &Evolution, cfg: &ObservationConfig) -> bool {
    canonicalize(&observe_evolution(lhs, cfg)) == canonicalize(&observe_evolution(rhs, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fig1, fig2, fig4};
    use crate::model::ClockValuation;
    use crate::rational::ratio;
    use crate::semantics::{
        enumerate_evolutions, event_successor, initial_state, time_successor, EnumerationBudget,
    };

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
    fn observe_state_masks_each_partition() {
        let ta = fig2();
        let l1 = ta.location_id("l1").unwrap();
        let x = ta.clock_id("x").unwrap();
        let s = State::new(&ta, l1, ClockValuation::from_values(vec![rat(2)]).unwrap()).unwrap();

        let hidden = ObservationConfig::fully_hidden();
        let o = observe_state(&s, &hidden);
        assert_eq!(o.location(), None);
        assert_eq!(o.valuation().values(), &[None]);

        let locs = ObservationConfig::location_only(&ta, l1).unwrap();
        let o = observe_state(&s, &locs);
        assert_eq!(o.location(), Some(l1));
        assert_eq!(o.valuation().values(), &[None]);

        let clocks = ObservationConfig::new(&ta, [], [x], []).unwrap();
        let o = observe_state(&s, &clocks);
        assert_eq!(o.location(), None);
        assert_eq!(o.valuation().values(), &[Some(rat(2))]);
    }

    #[test]
    fn observe_action_masks_unobservable_events_only() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();

        assert_eq!(
            observe_action(&Action::Event(b), &cfg),
            ObservedAction::Silent
        );
        assert_eq!(
            observe_action(&Action::Delay(ratio(3, 2)), &cfg),
            ObservedAction::Delay(ratio(3, 2))
        );
        assert_eq!(
            observe_action(&Action::Event(a), &cfg),
            ObservedAction::Event(a)
        );
    }

    #[test]
    fn observe_evolution_base_and_full_cases() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();

        // zero-length evolution maps to a single observed state
        let evo = Evolution::new(initial_state(&ta).unwrap());
        let o = observe_evolution(&evo, &ObservationConfig::fully_hidden());
        assert!(o.is_empty());
        assert_eq!(o.initial_state().location(), None);

        // full observability yields an isomorphic copy
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(99)),
                Action::Event(b),
            ],
        );
        let full = ObservationConfig::fully_observable(&ta);
        let o = observe_evolution(&evo, &full);
        assert_eq!(o.len(), evo.len());
        for ((oa, os), (ca, cs)) in o.steps().iter().zip(evo.steps()) {
            match (oa, ca) {
                (ObservedAction::Delay(d), Action::Delay(c)) => assert_eq!(d, c),
                (ObservedAction::Event(e), Action::Event(c)) => assert_eq!(e, c),
                other => panic!("unexpected mapping {other:?}"),
            }
            assert_eq!(os.location(), Some(cs.location()));
        }

        // masked run: only the observable event survives, delays intact
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();
        let o = observe_evolution(&evo, &cfg);
        let kinds: Vec<_> = o.steps().iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                ObservedAction::Delay(rat(1)),
                ObservedAction::Event(a),
                ObservedAction::Delay(rat(99)),
                ObservedAction::Silent,
            ]
        );
        assert!(o.steps().iter().all(|(_, s)| s.location().is_none()));
    }

    #[test]
    fn elapse_observed_fixes_masked_entries() {
        let masked = ObservedValuation::new(vec![None]);
        assert_eq!(elapse_observed(&masked, &rat(5)).values(), &[None]);

        let visible = ObservedValuation::new(vec![Some(rat(1))]);
        assert_eq!(
            elapse_observed(&visible, &rat(0)).values(),
            &[Some(rat(1))]
        );

        let mixed = ObservedValuation::new(vec![Some(rat(1)), None]);
        assert_eq!(
            elapse_observed(&mixed, &ratio(1, 2)).values(),
            &[Some(ratio(3, 2)), None]
        );
    }

    #[test]
    fn canonicalize_merges_adjacent_delays() {
        let ta = fig1();
        let evo = run_actions(&ta, &[Action::Delay(rat(1)), Action::Delay(rat(2))]);
        let cfg = ObservationConfig::fully_observable(&ta);
        let canon = canonicalize(&observe_evolution(&evo, &cfg));
        assert_eq!(canon.as_sequence().len(), 1);
        assert_eq!(
            canon.as_sequence().steps()[0].0,
            ObservedAction::Delay(rat(3))
        );
        // delay conservation
        assert_eq!(canon.as_sequence().total_delay(), rat(3));
    }

    #[test]
    fn canonicalize_drops_zero_delays() {
        let ta = fig1();
        let evo = run_actions(&ta, &[Action::Delay(rat(0))]);
        let cfg = ObservationConfig::fully_observable(&ta);
        let canon = canonicalize(&observe_evolution(&evo, &cfg));
        assert!(canon.as_sequence().is_empty());
    }

    #[test]
    fn canonicalize_deletes_silent_steps_with_equal_flanks() {
        let ta = fig2();
        let b = ta.event_id("b").unwrap();
        let a = ta.event_id("a").unwrap();
        let evo = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(99)),
                Action::Event(b),
            ],
        );
        // a observable, b masked: the b-step's flanking observed states are
        // both fully masked, so the silent step disappears
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();
        let canon = canonicalize(&observe_evolution(&evo, &cfg));
        let kinds: Vec<_> = canon
            .as_sequence()
            .steps()
            .iter()
            .map(|(a, _)| a.clone())
            .collect();
        assert_eq!(
            kinds,
            vec![
                ObservedAction::Delay(rat(1)),
                ObservedAction::Event(a),
                ObservedAction::Delay(rat(99)),
            ]
        );

        // with the location of l2 observable the entry into l2 changes the
        // observed state, so the silent step survives
        let l2 = ta.location_id("l2").unwrap();
        let cfg = ObservationConfig::new(&ta, [l2], [], [a]).unwrap();
        let canon = canonicalize(&observe_evolution(&evo, &cfg));
        assert_eq!(canon.as_sequence().len(), 4);
    }

    #[test]
    fn canonicalize_tau_merges_and_drops_on_concrete_evolutions() {
        let ta = fig1();
        let fragmented = run_actions(&ta, &[Action::Delay(rat(1)), Action::Delay(rat(2))]);
        let jump = run_actions(&ta, &[Action::Delay(rat(3))]);
        assert_eq!(canonicalize_tau(&fragmented), jump);

        let zero_first = run_actions(&ta, &[Action::Delay(rat(0)), Action::Delay(rat(3))]);
        assert_eq!(canonicalize_tau(&zero_first), jump);

        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let no_delays = run_actions(&ta, &[Action::Delay(rat(1)), Action::Event(a)]);
        assert_eq!(canonicalize_tau(&no_delays), no_delays);
    }

    #[test]
    fn obs_equivalence_separates_fig4_diamond_paths() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let rho1 = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        );
        let rho2 = run_actions(
            &ta,
            &[
                Action::Delay(rat(2)),
                Action::Event(a),
                Action::Delay(rat(1)),
                Action::Event(b),
            ],
        );
        let cfg = ObservationConfig::events_only(&ta, [a, b]).unwrap();
        assert!(!obs_equivalent(&rho1, &rho2, &cfg));
        // each evolution is equivalent to its own fragmented variant
        let rho1_frag = run_actions(
            &ta,
            &[
                Action::Delay(ratio(1, 2)),
                Action::Delay(ratio(1, 2)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        );
        assert!(obs_equivalent(&rho1, &rho1_frag, &cfg));
    }

    #[test]
    fn equal_duration_runs_to_observable_final_location_are_equivalent() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let b = ta.event_id("b").unwrap();
        let lf = ta.location_id("lf").unwrap();
        let cfg = ObservationConfig::location_only(&ta, lf).unwrap();
        let rho1 = run_actions(
            &ta,
            &[
                Action::Delay(rat(1)),
                Action::Event(a),
                Action::Delay(rat(2)),
                Action::Event(b),
            ],
        );
        let rho2 = run_actions(
            &ta,
            &[
                Action::Delay(rat(2)),
                Action::Event(a),
                Action::Delay(rat(1)),
                Action::Event(b),
            ],
        );
        assert!(obs_equivalent(&rho1, &rho2, &cfg));
        // canonical shape: one merged delay, then the visible entry into lf
        let canon = canonicalize(&observe_evolution(&rho1, &cfg));
        let steps = canon.as_sequence().steps();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].0, ObservedAction::Delay(rat(3)));
        assert_eq!(steps[1].0, ObservedAction::Silent);
        assert_eq!(steps[1].1.location(), Some(lf));
    }

    #[test]
    fn canonicalize_is_idempotent_on_enumerated_evolutions() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();
        let budget = EnumerationBudget::new(4, [rat(1), rat(99), rat(100)], true).unwrap();
        for evo in enumerate_evolutions(&ta, &budget).unwrap() {
            let canon = canonicalize(&observe_evolution(&evo, &cfg));
            let again = canonicalize(canon.as_sequence());
            assert_eq!(canon, again);
            assert!(rewrite_candidates(canon.as_sequence()).is_empty());
            // delay conservation
            assert_eq!(
                canon.as_sequence().total_delay(),
                observe_evolution(&evo, &cfg).total_delay()
            );
        }
    }

    #[test]
    fn obs_equivalence_is_an_equivalence_relation_at_desk_scale() {
        let ta = fig4(1, 2);
        let a = ta.event_id("a").unwrap();
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();
        let budget = EnumerationBudget::new(3, [rat(1), rat(2)], false).unwrap();
        let evolutions = enumerate_evolutions(&ta, &budget).unwrap();
        for x in &evolutions {
            assert!(obs_equivalent(x, x, &cfg));
        }
        for x in &evolutions {
            for y in &evolutions {
                assert_eq!(obs_equivalent(x, y, &cfg), obs_equivalent(y, x, &cfg));
                for z in &evolutions {
                    if obs_equivalent(x, y, &cfg) && obs_equivalent(y, z, &cfg) {
                        assert!(obs_equivalent(x, z, &cfg));
                    }
                }
            }
        }
    }

    #[test]
    fn renders_line_format() {
        let ta = fig2();
        let a = ta.event_id("a").unwrap();
        let evo = run_actions(&ta, &[Action::Delay(rat(1)), Action::Event(a)]);
        let cfg = ObservationConfig::events_only(&ta, [a]).unwrap();
        let o = observe_evolution(&evo, &cfg);
        assert_eq!(
            o.render(&ta),
            "(ε, {x: ε}) --1--> (ε, {x: ε}) --a--> (ε, {x: ε})"
        );
    }
}

//! The semantic graph of a timed automaton: successor computation,
//! evolution validation, determinism checking, and bounded enumeration of
//! generated evolutions over a rational delay grid.
//!
//! The semantic graph itself is infinite; everything here decides questions
//! over the finite set of evolutions reachable within an
//! [`EnumerationBudget`]. Callers own the grid choice; the usual convention
//! is to include every guard constant so that all edges can fire.

use std::fmt;

use thiserror::Error;

use crate::model::{EventId, ModelError, State, TimedAutomaton};
use crate::rational::{format_rational, rat, Rational};

/// One action of the semantic graph: a discrete event or a time delay.
///
/// The derived order (delays before events, delays by value, events by id)
/// is the action order used for the lexicographic enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Delay(Rational),
    Event(EventId),
}

impl Action {
    pub fn delay(&self) -> Option<&Rational> {
        match self {
            Action::Delay(d) => Some(d),
            Action::Event(_) => None,
        }
    }

    pub fn event(&self) -> Option<EventId> {
        match self {
            Action::Delay(_) => None,
            Action::Event(e) => Some(*e),
        }
    }

    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        match self {
            Action::Delay(d) => format_rational(d),
            Action::Event(e) => automaton.event_name(*e).to_string(),
        }
    }
}

/// A finite alternating state/action path of the semantic graph.
///
/// Length is measured in actions, so a single state is the length-0
/// evolution. Structural equality is exact on states, actions, and
/// rationals; equivalence up to delay fragmentation lives in the
/// observation module.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Evolution {
    initial: State,
    steps: Vec<(Action, State)>,
}

impl Evolution {
    pub fn new(initial: State) -> Self {
        Evolution {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn from_parts(initial: State, steps: Vec<(Action, State)>) -> Self {
        Evolution { initial, steps }
    }

    pub fn initial_state(&self) -> &State {
        &self.initial
    }

    pub fn steps(&self) -> &[(Action, State)] {
        &self.steps
    }

    /// Number of actions.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, action: Action, state: State) {
        self.steps.push((action, state));
    }

    pub fn pop(&mut self) -> Option<(Action, State)> {
        self.steps.pop()
    }

    pub fn last_state(&self) -> &State {
        self.steps.last().map(|(_, s)| s).unwrap_or(&self.initial)
    }

    /// All states in order, starting with the initial state.
    pub fn states(&self) -> impl Iterator<Item = &State> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|(_, s)| s))
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.steps.iter().map(|(a, _)| a)
    }

    /// Exact sum of all delay actions.
    pub fn duration(&self) -> Rational {
        self.actions()
            .filter_map(Action::delay)
            .fold(rat(0), |acc, d| acc + d)
    }

    /// Index of the last discrete event, if any.
    pub fn last_event_index(&self) -> Option<usize> {
        self.steps
            .iter()
            .rposition(|(a, _)| matches!(a, Action::Event(_)))
    }

    /// Sum of the delays after the last discrete event (the whole duration
    /// when there is no event).
    pub fn trailing_delay(&self) -> Rational {
        let start = self.last_event_index().map(|i| i + 1).unwrap_or(0);
        self.steps[start..]
            .iter()
            .filter_map(|(a, _)| a.delay())
            .fold(rat(0), |acc, d| acc + d)
    }

    pub fn visits_location(&self, location: crate::model::LocationId) -> bool {
        self.states().any(|s| s.location() == location)
    }

    /// Renders the evolution as
    /// `(l0, {x: 0}) --1--> (l0, {x: 1}) --a--> (l1, {x: 1})`.
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

/// Bounds for evolution enumeration: a maximum number of actions and a
/// finite grid of positive delays (optionally extended with the zero delay).
///
/// By default consecutive delay actions are generated, because equivalence
/// of fragmented delays is part of what the checkers must exercise. The
/// `alternating` flag normalizes generation so that no delay directly
/// follows another delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_steps: usize,
    delay_grid: Vec<Rational>,
    include_zero_delay: bool,
    alternating: bool,
}

impl EnumerationBudget {
    pub fn new(
        max_steps: usize,
        delay_grid: impl IntoIterator<Item = Rational>,
        include_zero_delay: bool,
    ) -> Result<Self, SemanticsError> {
        let mut grid: Vec<Rational> = delay_grid.into_iter().collect();
        grid.sort();
        grid.dedup();
        if grid.is_empty() {
            return Err(SemanticsError::EmptyDelayGrid);
        }
        if let Some(bad) = grid.iter().find(|d| **d <= rat(0)) {
            return Err(SemanticsError::NonPositiveGridDelay {
                value: format_rational(bad),
            });
        }
        Ok(EnumerationBudget {
            max_steps,
            delay_grid: grid,
            include_zero_delay,
            alternating: false,
        })
    }

    /// Restricts generation to alternating form: no delay action is
    /// generated directly after another delay action.
    pub fn with_alternating(mut self, alternating: bool) -> Self {
        self.alternating = alternating;
        self
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn delay_grid(&self) -> &[Rational] {
        &self.delay_grid
    }

    pub fn include_zero_delay(&self) -> bool {
        self.include_zero_delay
    }

    pub fn alternating(&self) -> bool {
        self.alternating
    }

    /// Candidate delays in ascending order (zero first when enabled).
    pub fn delays(&self) -> impl Iterator<Item = Rational> + '_ {
        self.include_zero_delay
            .then(|| rat(0))
            .into_iter()
            .chain(self.delay_grid.iter().cloned())
    }
}

/// Errors from semantic-graph operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("semantic graph undefined: the zero valuation violates the invariant of initial location `{location}`")]
    SemanticGraphUndefined { location: String },
    #[error("determinism violation at state {state} on event `{event}`: multiple enabled edges yield distinct successors")]
    DeterminismViolation { state: String, event: String },
    #[error("delay grid must not be empty")]
    EmptyDelayGrid,
    #[error("delay grid value {value} is not positive")]
    NonPositiveGridDelay { value: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Why an evolution failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invalidity {
    /// The initial state itself is not a state of the automaton.
    MalformedInitialState,
    /// Generated-ness was requested and the evolution does not start at the
    /// initial state.
    NotGenerated,
    /// The step at this index is not reproduced by the successor functions.
    UnreproducibleStep { index: usize },
    /// The step at this index hit a determinism violation.
    AmbiguousStep { index: usize },
}

impl fmt::Display for Invalidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invalidity::MalformedInitialState => write!(f, "initial state is malformed"),
            Invalidity::NotGenerated => write!(f, "evolution does not start at the initial state"),
            Invalidity::UnreproducibleStep { index } => {
                write!(f, "step {index} is not a transition of the semantic graph")
            }
            Invalidity::AmbiguousStep { index } => {
                write!(f, "step {index} hit a determinism violation")
            }
        }
    }
}

/// The initial state `(l0, 0)`, defined only when the zero valuation
/// satisfies the initial location's invariant.
pub fn initial_state(automaton: &TimedAutomaton) -> Result<State, SemanticsError> {
    let l0 = automaton.initial_location();
    let zero = crate::model::ClockValuation::zero(automaton.clock_count());
    if !automaton.invariant(l0).eval(&zero)? {
        return Err(SemanticsError::SemanticGraphUndefined {
            location: automaton.location_name(l0).to_string(),
        });
    }
    Ok(State::new_unchecked(l0, zero))
}

/// The unique event successor of `state` under `event`, if an enabled edge
/// exists. An edge is enabled when the guard and source invariant hold at
/// the state and the reset valuation satisfies the target invariant.
///
/// Errs when two enabled edges yield distinct successor states.
pub fn event_successor(
    automaton: &TimedAutomaton,
    state: &State,
    event: EventId,
) -> Result<Option<State>, SemanticsError> {
    let mut successor: Option<State> = None;
    for edge in automaton.edges_from(state.location(), event) {
        let enabled = edge.guard.eval(state.valuation())?
            && automaton.invariant(edge.source).eval(state.valuation())?;
        if !enabled {
            continue;
        }
        let reset = state.valuation().reset(&edge.resets);
        if !automaton.invariant(edge.target).eval(&reset)? {
            continue;
        }
        let next = State::new_unchecked(edge.target, reset);
        match &successor {
            None => successor = Some(next),
            // two enabled edges with identical successor states still keep
            // the successor set a singleton
            Some(prev) if *prev == next => {}
            Some(_) => {
                return Err(SemanticsError::DeterminismViolation {
                    state: state.render(automaton),
                    event: automaton.event_name(event).to_string(),
                });
            }
        }
    }
    Ok(successor)
}

/// The time successor `(l, u + delay)`, if the location invariant holds
/// throughout the delay. Invariants are disjunction-free, so each atom's
/// truth set along the time ray is convex and checking the two endpoints
/// suffices.
pub fn time_successor(
    automaton: &TimedAutomaton,
    state: &State,
    delay: &Rational,
) -> Option<State> {
    if *delay < rat(0) {
        return None;
    }
    let invariant = automaton.invariant(state.location());
    if !invariant.eval(state.valuation()).ok()? {
        return None;
    }
    let elapsed = state.valuation().elapse(delay).ok()?;
    if !invariant.eval(&elapsed).ok()? {
        return None;
    }
    Some(State::new_unchecked(state.location(), elapsed))
}

/// Checks that every step of `evolution` is reproduced by
/// [`event_successor`]/[`time_successor`], and that the evolution starts at
/// the initial state when `require_generated` is set.
pub fn validate_evolution(
    automaton: &TimedAutomaton,
    evolution: &Evolution,
    require_generated: bool,
) -> Result<(), Invalidity> {
    let init = evolution.initial_state();
    if State::new(automaton, init.location(), init.valuation().clone()).is_err() {
        return Err(Invalidity::MalformedInitialState);
    }
    if require_generated {
        match initial_state(automaton) {
            Ok(s0) if s0 == *init => {}
            _ => return Err(Invalidity::NotGenerated),
        }
    }
    let mut current = init.clone();
    for (index, (action, claimed)) in evolution.steps().iter().enumerate() {
        let computed = match action {
            Action::Delay(d) => time_successor(automaton, &current, d),
            Action::Event(e) => match event_successor(automaton, &current, *e) {
                Ok(s) => s,
                Err(_) => return Err(Invalidity::AmbiguousStep { index }),
            },
        };
        match computed {
            Some(s) if s == *claimed => current = s,
            _ => return Err(Invalidity::UnreproducibleStep { index }),
        }
    }
    Ok(())
}

/// Exact sum of the delay actions of an evolution.
pub fn duration(evolution: &Evolution) -> Rational {
    evolution.duration()
}

/// Enumerates every generated evolution with at most `max_steps` actions
/// whose delays are drawn from the budget's grid (plus zero when enabled).
///
/// The result is prefix-closed, free of duplicates, and ordered
/// lexicographically by action sequence. Determinism is checked on the fly;
/// a violated state/event pair aborts enumeration with an error.
pub fn enumerate_evolutions(
    automaton: &TimedAutomaton,
    budget: &EnumerationBudget,
) -> Result<Vec<Evolution>, SemanticsError> {
    let mut out = Vec::new();
    let mut evolution = Evolution::new(initial_state(automaton)?);
    extend(automaton, budget, &mut evolution, &mut out)?;
    Ok(out)
}

fn extend(
    automaton: &TimedAutomaton,
    budget: &EnumerationBudget,
    evolution: &mut Evolution,
    out: &mut Vec<Evolution>,
) -> Result<(), SemanticsError> {
    out.push(evolution.clone());
    if evolution.len() >= budget.max_steps() {
        return Ok(());
    }
    let current = evolution.last_state().clone();
    let after_delay = matches!(evolution.steps().last(), Some((Action::Delay(_), _)));
    if !(budget.alternating() && after_delay) {
        for delay in budget.delays() {
            if let Some(next) = time_successor(automaton, &current, &delay) {
                evolution.push(Action::Delay(delay), next);
                extend(automaton, budget, evolution, out)?;
                evolution.pop();
            }
        }
    }
    for event in automaton.events() {
        if let Some(next) = event_successor(automaton, &current, event)? {
            evolution.push(Action::Event(event), next);
            extend(automaton, budget, evolution, out)?;
            evolution.pop();
        }
    }
    Ok(())
}

/// True when no state visited within the budget admits two distinct
/// successors for a single event. The single-initial-location restriction
/// holds by construction of [`TimedAutomaton`]. An undefined semantic graph
/// has no visited states and counts as deterministic.
pub fn check_determinism(automaton: &TimedAutomaton, budget: &EnumerationBudget) -> bool {
    match enumerate_evolutions(automaton, budget) {
        Ok(_) => true,
        Err(SemanticsError::DeterminismViolation { .. }) => false,
        Err(_) => true,
    }
}

//! Timed-automaton syntax: clocks, constraints, valuations, locations,
//! edges, and invariants.
//!
//! All types here are immutable values after construction and can be shared
//! freely between threads. Clock, location, and event identifiers are
//! interned symbols minted by [`TimedAutomatonBuilder`]; equality is by id.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rational::{format_rational, rat, Rational};

/// Interned clock identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub(crate) u32);

/// Interned location identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub(crate) u32);

/// Interned event identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub(crate) u32);

impl ClockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The id of the clock at a positional index. Valuations are indexed
    /// positionally, so this is the inverse of [`ClockId::index`].
    pub fn from_index(index: usize) -> ClockId {
        ClockId(index as u32)
    }
}

impl LocationId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Comparison operator of a constraint atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// A clock constraint: the guard/invariant grammar over a clock set.
///
/// Atoms compare a clock, or the difference of two clocks, against a natural
/// constant; `And`/`Or` combine them. Constants are naturals by construction
/// (`u64`), matching the constraint grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClockConstraint {
    True,
    Cmp {
        clock: ClockId,
        op: CmpOp,
        bound: u64,
    },
    Diff {
        minuend: ClockId,
        subtrahend: ClockId,
        op: CmpOp,
        bound: u64,
    },
    And(Box<ClockConstraint>, Box<ClockConstraint>),
    Or(Box<ClockConstraint>, Box<ClockConstraint>),
}

impl ClockConstraint {
    pub fn tt() -> Self {
        ClockConstraint::True
    }

    pub fn cmp(clock: ClockId, op: CmpOp, bound: u64) -> Self {
        ClockConstraint::Cmp { clock, op, bound }
    }

    pub fn lt(clock: ClockId, bound: u64) -> Self {
        Self::cmp(clock, CmpOp::Lt, bound)
    }

    pub fn le(clock: ClockId, bound: u64) -> Self {
        Self::cmp(clock, CmpOp::Le, bound)
    }

    pub fn eq(clock: ClockId, bound: u64) -> Self {
        Self::cmp(clock, CmpOp::Eq, bound)
    }

    pub fn ge(clock: ClockId, bound: u64) -> Self {
        Self::cmp(clock, CmpOp::Ge, bound)
    }

    pub fn gt(clock: ClockId, bound: u64) -> Self {
        Self::cmp(clock, CmpOp::Gt, bound)
    }

    pub fn diff(minuend: ClockId, subtrahend: ClockId, op: CmpOp, bound: u64) -> Self {
        ClockConstraint::Diff {
            minuend,
            subtrahend,
            op,
            bound,
        }
    }

    pub fn and(lhs: ClockConstraint, rhs: ClockConstraint) -> Self {
        ClockConstraint::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: ClockConstraint, rhs: ClockConstraint) -> Self {
        ClockConstraint::Or(Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates the constraint under a valuation, recursively over
    /// `And`/`Or`. Errs if the constraint references a clock the valuation
    /// does not define.
    pub fn eval(&self, valuation: &ClockValuation) -> Result<bool, ModelError> {
        match self {
            ClockConstraint::True => Ok(true),
            ClockConstraint::Cmp { clock, op, bound } => {
                let value = valuation.try_get(*clock)?;
                Ok(op.holds(value, &rat(*bound)))
            }
            ClockConstraint::Diff {
                minuend,
                subtrahend,
                op,
                bound,
            } => {
                let lhs = valuation.try_get(*minuend)?.clone() - valuation.try_get(*subtrahend)?;
                Ok(op.holds(&lhs, &rat(*bound)))
            }
            ClockConstraint::And(lhs, rhs) => Ok(lhs.eval(valuation)? && rhs.eval(valuation)?),
            ClockConstraint::Or(lhs, rhs) => Ok(lhs.eval(valuation)? || rhs.eval(valuation)?),
        }
    }

    /// True when the constraint contains an `Or` node anywhere.
    pub fn has_disjunction(&self) -> bool {
        match self {
            ClockConstraint::True | ClockConstraint::Cmp { .. } | ClockConstraint::Diff { .. } => {
                false
            }
            ClockConstraint::And(lhs, rhs) => lhs.has_disjunction() || rhs.has_disjunction(),
            ClockConstraint::Or(..) => true,
        }
    }

    /// Collects every clock referenced by the constraint.
    pub fn referenced_clocks(&self, out: &mut BTreeSet<ClockId>) {
        match self {
            ClockConstraint::True => {}
            ClockConstraint::Cmp { clock, .. } => {
                out.insert(*clock);
            }
            ClockConstraint::Diff {
                minuend,
                subtrahend,
                ..
            } => {
                out.insert(*minuend);
                out.insert(*subtrahend);
            }
            ClockConstraint::And(lhs, rhs) | ClockConstraint::Or(lhs, rhs) => {
                lhs.referenced_clocks(out);
                rhs.referenced_clocks(out);
            }
        }
    }

    /// Collects every constant appearing in an atom.
    pub fn collect_constants(&self, out: &mut BTreeSet<u64>) {
        match self {
            ClockConstraint::True => {}
            ClockConstraint::Cmp { bound, .. } | ClockConstraint::Diff { bound, .. } => {
                out.insert(*bound);
            }
            ClockConstraint::And(lhs, rhs) | ClockConstraint::Or(lhs, rhs) => {
                lhs.collect_constants(out);
                rhs.collect_constants(out);
            }
        }
    }
}

/// Total map from the automaton's clocks to non-negative exact rationals,
/// indexed by [`ClockId`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockValuation(Vec<Rational>);

impl ClockValuation {
    /// The zero valuation over `clock_count` clocks.
    pub fn zero(clock_count: usize) -> Self {
        ClockValuation(vec![rat(0); clock_count])
    }

    /// Builds a valuation from explicit values; every value must be >= 0.
    pub fn from_values(values: Vec<Rational>) -> Result<Self, ModelError> {
        if let Some(v) = values.iter().find(|v| **v < rat(0)) {
            return Err(ModelError::NegativeClockValue {
                value: format_rational(v),
            });
        }
        Ok(ClockValuation(values))
    }

    pub fn clock_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, clock: ClockId) -> &Rational {
        &self.0[clock.index()]
    }

    fn try_get(&self, clock: ClockId) -> Result<&Rational, ModelError> {
        self.0
            .get(clock.index())
            .ok_or(ModelError::UndeclaredClock {
                index: clock.0,
                declared: self.0.len(),
            })
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.0.iter()
    }

    /// Resets the clocks in `resets` to zero and leaves the rest unchanged.
    pub fn reset(&self, resets: &BTreeSet<ClockId>) -> ClockValuation {
        let values = self
            .0
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if resets.contains(&ClockId(i as u32)) {
                    rat(0)
                } else {
                    v.clone()
                }
            })
            .collect();
        ClockValuation(values)
    }

    /// Advances every clock uniformly by `delay`. Errs on negative delays.
    pub fn elapse(&self, delay: &Rational) -> Result<ClockValuation, ModelError> {
        if *delay < rat(0) {
            return Err(ModelError::NegativeDelay {
                delay: format_rational(delay),
            });
        }
        Ok(ClockValuation(self.0.iter().map(|v| v + delay).collect()))
    }
}

/// One edge of a timed automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: LocationId,
    pub event: EventId,
    pub guard: ClockConstraint,
    pub resets: BTreeSet<ClockId>,
    pub target: LocationId,
}

/// A timed automaton: locations with invariants, clocks, events, and
/// guarded edges with resets.
///
/// Construction goes through [`TimedAutomatonBuilder`], which validates that
/// all referenced identifiers are declared, that there is exactly one
/// initial location, and that every location invariant is disjunction-free
/// (an invariant must stay convex along time elapse so that checking the
/// endpoints of a delay suffices; guards keep the full grammar because they
/// are evaluated at a single time point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomaton {
    location_names: Vec<String>,
    clock_names: Vec<String>,
    event_names: Vec<String>,
    initial: LocationId,
    edges: Vec<Edge>,
    invariants: Vec<ClockConstraint>,
}

impl TimedAutomaton {
    pub fn builder() -> TimedAutomatonBuilder {
        TimedAutomatonBuilder::default()
    }

    pub fn initial_location(&self) -> LocationId {
        self.initial
    }

    pub fn location_count(&self) -> usize {
        self.location_names.len()
    }

    pub fn clock_count(&self) -> usize {
        self.clock_names.len()
    }

    pub fn event_count(&self) -> usize {
        self.event_names.len()
    }

    pub fn locations(&self) -> impl Iterator<Item = LocationId> {
        (0..self.location_names.len() as u32).map(LocationId)
    }

    pub fn clocks(&self) -> impl Iterator<Item = ClockId> {
        (0..self.clock_names.len() as u32).map(ClockId)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.event_names.len() as u32).map(EventId)
    }

    pub fn location_name(&self, id: LocationId) -> &str {
        &self.location_names[id.index()]
    }

    pub fn clock_name(&self, id: ClockId) -> &str {
        &self.clock_names[id.index()]
    }

    pub fn event_name(&self, id: EventId) -> &str {
        &self.event_names[id.index()]
    }

    pub fn location_id(&self, name: &str) -> Option<LocationId> {
        self.location_names
            .iter()
            .position(|n| n == name)
            .map(|i| LocationId(i as u32))
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clock_names
            .iter()
            .position(|n| n == name)
            .map(|i| ClockId(i as u32))
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_names
            .iter()
            .position(|n| n == name)
            .map(|i| EventId(i as u32))
    }

    pub fn invariant(&self, location: LocationId) -> &ClockConstraint {
        &self.invariants[location.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_from(&self, source: LocationId, event: EventId) -> impl Iterator<Item = &Edge> {
        self.edges
            .iter()
            .filter(move |e| e.source == source && e.event == event)
    }

    /// Every constant mentioned by a guard or invariant. Useful for building
    /// delay grids that include all guard boundaries.
    pub fn guard_constants(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for edge in &self.edges {
            edge.guard.collect_constants(&mut out);
        }
        for inv in &self.invariants {
            inv.collect_constants(&mut out);
        }
        out
    }
}

/// A concrete state of the semantic graph: a location paired with a clock
/// valuation that satisfies the location's invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    location: LocationId,
    valuation: ClockValuation,
}

impl State {
    /// Builds a state, checking the valuation width and the location
    /// invariant against the automaton.
    pub fn new(
        automaton: &TimedAutomaton,
        location: LocationId,
        valuation: ClockValuation,
    ) -> Result<State, ModelError> {
        if valuation.clock_count() != automaton.clock_count() {
            return Err(ModelError::ValuationWidth {
                got: valuation.clock_count(),
                expected: automaton.clock_count(),
            });
        }
        if !automaton.invariant(location).eval(&valuation)? {
            return Err(ModelError::InvariantViolated {
                location: automaton.location_name(location).to_string(),
            });
        }
        Ok(State {
            location,
            valuation,
        })
    }

    pub(crate) fn new_unchecked(location: LocationId, valuation: ClockValuation) -> State {
        State {
            location,
            valuation,
        }
    }

    pub fn location(&self) -> LocationId {
        self.location
    }

    pub fn valuation(&self) -> &ClockValuation {
        &self.valuation
    }

    /// Renders the state as `(l0, {x: 3/2, y: 0})`.
    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        let clocks = self
            .valuation
            .values()
            .enumerate()
            .map(|(i, v)| {
                format!(
                    "{}: {}",
                    automaton.clock_name(ClockId(i as u32)),
                    format_rational(v)
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "({}, {{{}}})",
            automaton.location_name(self.location),
            clocks
        )
    }
}

/// Errors raised while constructing or evaluating model objects.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("constraint references clock #{index} but only {declared} clocks are declared")]
    UndeclaredClock { index: u32, declared: usize },
    #[error("negative delay {delay}")]
    NegativeDelay { delay: String },
    #[error("negative clock value {value}")]
    NegativeClockValue { value: String },
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("invalid {kind} name `{name}`: identifiers match [A-Za-z_][A-Za-z0-9_]*")]
    InvalidName { kind: &'static str, name: String },
    #[error("no initial location declared")]
    MissingInitial,
    #[error("timed automata are restricted to a single initial location; `{first}` and `{second}` are both marked initial")]
    MultipleInitial { first: String, second: String },
    #[error("invariant of location `{location}` contains a disjunction; invariants must stay convex along time elapse")]
    DisjunctiveInvariant { location: String },
    #[error("{kind} id #{index} is out of range ({declared} declared)")]
    IdOutOfRange {
        kind: &'static str,
        index: u32,
        declared: usize,
    },
    #[error("valuation has {got} clocks, automaton declares {expected}")]
    ValuationWidth { got: usize, expected: usize },
    #[error("valuation violates the invariant of location `{location}`")]
    InvariantViolated { location: String },
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Builder for [`TimedAutomaton`]. Identifiers are minted as names are
/// declared; `build` performs all validation.
#[derive(Debug, Default)]
pub struct TimedAutomatonBuilder {
    location_names: Vec<String>,
    clock_names: Vec<String>,
    event_names: Vec<String>,
    initial: Option<LocationId>,
    duplicate_initial: Option<(LocationId, LocationId)>,
    edges: Vec<Edge>,
    invariants: Vec<(LocationId, ClockConstraint)>,
}

impl TimedAutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clock(&mut self, name: &str) -> ClockId {
        self.clock_names.push(name.to_string());
        ClockId(self.clock_names.len() as u32 - 1)
    }

    pub fn event(&mut self, name: &str) -> EventId {
        self.event_names.push(name.to_string());
        EventId(self.event_names.len() as u32 - 1)
    }

    pub fn location(&mut self, name: &str) -> LocationId {
        self.location_names.push(name.to_string());
        LocationId(self.location_names.len() as u32 - 1)
    }

    pub fn initial(&mut self, location: LocationId) -> &mut Self {
        if let Some(first) = self.initial {
            if self.duplicate_initial.is_none() && first != location {
                self.duplicate_initial = Some((first, location));
            }
        } else {
            self.initial = Some(location);
        }
        self
    }

    pub fn invariant(&mut self, location: LocationId, constraint: ClockConstraint) -> &mut Self {
        self.invariants.push((location, constraint));
        self
    }

    pub fn edge(
        &mut self,
        source: LocationId,
        event: EventId,
        guard: ClockConstraint,
        resets: impl IntoIterator<Item = ClockId>,
        target: LocationId,
    ) -> &mut Self {
        self.edges.push(Edge {
            source,
            event,
            guard,
            resets: resets.into_iter().collect(),
            target,
        });
        self
    }

    fn check_location(&self, id: LocationId) -> Result<(), ModelError> {
        if id.index() >= self.location_names.len() {
            return Err(ModelError::IdOutOfRange {
                kind: "location",
                index: id.0,
                declared: self.location_names.len(),
            });
        }
        Ok(())
    }

    fn check_event(&self, id: EventId) -> Result<(), ModelError> {
        if id.index() >= self.event_names.len() {
            return Err(ModelError::IdOutOfRange {
                kind: "event",
                index: id.0,
                declared: self.event_names.len(),
            });
        }
        Ok(())
    }

    fn check_constraint_clocks(&self, constraint: &ClockConstraint) -> Result<(), ModelError> {
        let mut clocks = BTreeSet::new();
        constraint.referenced_clocks(&mut clocks);
        for clock in clocks {
            if clock.index() >= self.clock_names.len() {
                return Err(ModelError::UndeclaredClock {
                    index: clock.0,
                    declared: self.clock_names.len(),
                });
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<TimedAutomaton, ModelError> {
        for (kind, names) in [
            ("location", &self.location_names),
            ("clock", &self.clock_names),
            ("event", &self.event_names),
        ] {
            for (i, name) in names.iter().enumerate() {
                if !valid_identifier(name) {
                    return Err(ModelError::InvalidName {
                        kind,
                        name: name.clone(),
                    });
                }
                if names[..i].contains(name) {
                    return Err(ModelError::DuplicateName {
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        if let Some((first, second)) = self.duplicate_initial {
            return Err(ModelError::MultipleInitial {
                first: self.location_names[first.index()].clone(),
                second: self.location_names[second.index()].clone(),
            });
        }
        let initial = self.initial.ok_or(ModelError::MissingInitial)?;
        self.check_location(initial)?;

        let mut invariants = vec![ClockConstraint::True; self.location_names.len()];
        for (location, constraint) in &self.invariants {
            self.check_location(*location)?;
            self.check_constraint_clocks(constraint)?;
            if constraint.has_disjunction() {
                return Err(ModelError::DisjunctiveInvariant {
                    location: self.location_names[location.index()].clone(),
                });
            }
            invariants[location.index()] = constraint.clone();
        }
        for edge in &self.edges {
            self.check_location(edge.source)?;
            self.check_location(edge.target)?;
            self.check_event(edge.event)?;
            self.check_constraint_clocks(&edge.guard)?;
            for clock in &edge.resets {
                if clock.index() >= self.clock_names.len() {
                    return Err(ModelError::UndeclaredClock {
                        index: clock.0,
                        declared: self.clock_names.len(),
                    });
                }
            }
        }

        Ok(TimedAutomaton {
            location_names: self.location_names,
            clock_names: self.clock_names,
            event_names: self.event_names,
            initial,
            edges: self.edges,
            invariants,
        })
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

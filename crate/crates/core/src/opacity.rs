//! The opacity checkers: evolution-based, language-based, and
//! execution-time opacity over a finite evolution set, plus the conversion
//! functions between the notions, secret-set closure checking, and the
//! word-representability test.
//!
//! Every checker takes an explicit finite evolution set rather than an
//! automaton, decoupling enumeration policy from decision logic; the
//! `*_bounded` wrappers compose enumeration and checking. A bounded
//! non-opaque verdict is sound (a witness exists); a bounded opaque verdict
//! is only relative to the enumeration budget, which the verdict records.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{EventId, LocationId, State, TimedAutomaton};
use crate::observation::{canonicalize, canonicalize_tau, observe_evolution, ObservationConfig};
use crate::rational::{format_rational, rat, Rational};
use crate::runs::{ends_at_first_final, is_private_run, is_public_run, normalize_run, EtoSpec};
use crate::semantics::{
    enumerate_evolutions, Action, EnumerationBudget, Evolution, SemanticsError,
};
use crate::words::{
    language_contains, project_word, to_timed_word, word_preimage_member, TimedLanguageSpec,
    TimedWord, WordsError,
};

/// Finite description of a secret set of evolutions.
///
/// The induced predicate must be closed under delay fragmentation and
/// zero-delay removal; [`check_secret_closure`] verifies this on a concrete
/// evolution set and every checker that needs the property runs it first.
/// `ExplicitList` membership is by structural equality, which makes
/// unsaturated lists the canonical example of an ill-formed secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecretSpec {
    /// Evolutions that visit the given location.
    LocationVisit(LocationId),
    /// Evolutions whose timed word belongs to the given language.
    WordInLanguage(TimedLanguageSpec),
    /// Evolutions whose last discrete event is `after_event`, followed by a
    /// trailing delay summing to more than `threshold`.
    TrailingDelayGreater {
        threshold: Rational,
        after_event: EventId,
    },
    /// Evolutions that end at the first visit to the final location having
    /// visited the private location on the way.
    PrivateRun(EtoSpec),
    /// An explicit finite list, matched by structural equality.
    ExplicitList(Vec<Evolution>),
}

impl SecretSpec {
    pub fn is_secret(&self, evolution: &Evolution) -> Result<bool, WordsError> {
        match self {
            SecretSpec::LocationVisit(location) => Ok(evolution.visits_location(*location)),
            SecretSpec::WordInLanguage(language) => word_preimage_member(evolution, language),
            SecretSpec::TrailingDelayGreater {
                threshold,
                after_event,
            } => match evolution.last_event_index() {
                None => Ok(false),
                Some(index) => {
                    let event = evolution.steps()[index].0.event().expect("event index");
                    Ok(event == *after_event && evolution.trailing_delay() > *threshold)
                }
            },
            SecretSpec::PrivateRun(spec) => Ok(ends_at_first_final(
                evolution,
                spec.final_location,
            )
                && is_private_run(&normalize_run(evolution), spec)),
            SecretSpec::ExplicitList(list) => Ok(list.contains(evolution)),
        }
    }
}

/// Which opacity notion a verdict speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notion {
    Ebto,
    Lbto,
    Eto,
}

impl Notion {
    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Ebto => "ebto",
            Notion::Lbto => "lbto",
            Notion::Eto => "eto",
        }
    }
}

/// A leak witness: a secret with no covering non-secret partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// An uncovered secret evolution.
    Evolution(Evolution),
    /// An uncovered secret word and the smallest evolution producing it.
    Word {
        word: TimedWord,
        evolution: Evolution,
    },
    /// A private duration with no public match, and the smallest private
    /// evolution of that duration.
    Duration {
        duration: Rational,
        evolution: Evolution,
    },
}

impl Witness {
    pub fn evolution(&self) -> &Evolution {
        match self {
            Witness::Evolution(e) => e,
            Witness::Word { evolution, .. } => evolution,
            Witness::Duration { evolution, .. } => evolution,
        }
    }

    pub fn render(&self, automaton: &TimedAutomaton) -> String {
        match self {
            Witness::Evolution(e) => e.render(automaton),
            Witness::Word { word, evolution } => {
                format!("{} via {}", word.render(automaton), evolution.render(automaton))
            }
            Witness::Duration { duration, evolution } => format!(
                "duration {} via {}",
                format_rational(duration),
                evolution.render(automaton)
            ),
        }
    }
}

/// For opaque verdicts, how each secret is covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverMap {
    /// Each secret evolution with its observation-equivalent non-secret.
    Evolutions(Vec<(Evolution, Evolution)>),
    /// Each secret word with a projection-equal non-secret word.
    Words(Vec<(TimedWord, TimedWord)>),
    /// Each private duration matched by an equal public duration.
    Durations(Vec<Rational>),
}

impl CoverMap {
    pub fn len(&self) -> usize {
        match self {
            CoverMap::Evolutions(v) => v.len(),
            CoverMap::Words(v) => v.len(),
            CoverMap::Durations(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Outcome of an opacity check over a finite evolution set.
///
/// `bounded` is always true: verdicts are relative to the enumerated set.
/// A non-opaque verdict carries witnesses that are secret and provably
/// uncovered within the set; an opaque verdict carries the cover map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub notion: Notion,
    pub opaque: bool,
    pub bounded: bool,
    pub budget: Option<EnumerationBudget>,
    pub witnesses: Vec<Witness>,
    pub cover: CoverMap,
    pub notes: Vec<String>,
}

impl Verdict {
    /// The smallest uncovered secret, when not opaque.
    pub fn witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

/// Result of [`check_secret_closure`]: either closed, or the first pair of
/// time-equivalent evolutions with differing secrecy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureCheck {
    pub violation: Option<(Evolution, Evolution)>,
}

impl ClosureCheck {
    pub fn is_closed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Result of [`check_word_representable`]: either every word group is
/// uniform in secrecy, or a (secret, non-secret) pair mapping to the same
/// timed word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentabilityCheck {
    pub counter_pair: Option<(Evolution, Evolution)>,
}

impl RepresentabilityCheck {
    pub fn is_representable(&self) -> bool {
        self.counter_pair.is_none()
    }
}

/// Errors from opacity checking.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpacityError {
    #[error("ill-formed secret set: two time-equivalent evolutions are classified differently")]
    IllFormedSecretSet { pair: Box<(Evolution, Evolution)> },
    #[error(transparent)]
    Words(#[from] WordsError),
}

/// Errors from the bounded convenience wrappers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Opacity(#[from] OpacityError),
}

impl From<WordsError> for CheckError {
    fn from(e: WordsError) -> Self {
        CheckError::Opacity(OpacityError::Words(e))
    }
}

/// Evolution-based opacity over a finite set: opaque iff every secret
/// evolution is observationally equivalent to some non-secret evolution in
/// the set. Implemented by grouping the set by canonical observation and
/// requiring every group that contains a secret to also contain a
/// non-secret.
///
/// The secret must be closed under time-equivalence on the set; a closure
/// violation is an error carrying the violating pair.
pub fn check_ebto(
    evolutions: &[Evolution],
    secret: &SecretSpec,
    cfg: &ObservationConfig,
) -> Result<Verdict, OpacityError> {
    let closure = check_secret_closure(evolutions, secret)?;
    if let Some(pair) = closure.violation {
        return Err(OpacityError::IllFormedSecretSet {
            pair: Box::new(pair),
        });
    }

    let mut groups: BTreeMap<_, (Vec<&Evolution>, Vec<&Evolution>)> = BTreeMap::new();
    for evolution in evolutions {
        let key = canonicalize(&observe_evolution(evolution, cfg));
        let entry = groups.entry(key).or_default();
        if secret.is_secret(evolution)? {
            entry.0.push(evolution);
        } else {
            entry.1.push(evolution);
        }
    }

    let mut witnesses = Vec::new();
    let mut cover = Vec::new();
    for (_, (mut secrets, mut publics)) in groups {
        if secrets.is_empty() {
            continue;
        }
        secrets.sort();
        if publics.is_empty() {
            witnesses.extend(
                secrets
                    .into_iter()
                    .map(|e| Witness::Evolution(e.clone())),
            );
        } else {
            publics.sort();
            let partner = publics[0];
            cover.extend(secrets.into_iter().map(|e| (e.clone(), partner.clone())));
        }
    }

    Ok(Verdict {
        notion: Notion::Ebto,
        opaque: witnesses.is_empty(),
        bounded: true,
        budget: None,
        witnesses,
        cover: CoverMap::Evolutions(cover),
        notes: Vec::new(),
    })
}

/// Language-based opacity over the words generated by a finite evolution
/// set: opaque iff every generated secret word has a generated non-secret
/// word with an equal projection.
pub fn check_lbto(
    evolutions: &[Evolution],
    secret_language: &TimedLanguageSpec,
    observable_events: &BTreeSet<EventId>,
) -> Result<Verdict, OpacityError> {
    // smallest generating evolution per word, for witness reporting
    let mut by_word: BTreeMap<TimedWord, &Evolution> = BTreeMap::new();
    for evolution in evolutions {
        by_word
            .entry(to_timed_word(evolution))
            .and_modify(|e| {
                if evolution < *e {
                    *e = evolution;
                }
            })
            .or_insert(evolution);
    }

    let mut groups: BTreeMap<TimedWord, (Vec<&TimedWord>, Vec<&TimedWord>)> = BTreeMap::new();
    for word in by_word.keys() {
        let projection = project_word(word, observable_events);
        let entry = groups.entry(projection).or_default();
        if language_contains(secret_language, word)? {
            entry.0.push(word);
        } else {
            entry.1.push(word);
        }
    }

    let mut witnesses = Vec::new();
    let mut cover = Vec::new();
    for (_, (secrets, publics)) in groups {
        if secrets.is_empty() {
            continue;
        }
        match publics.first() {
            None => witnesses.extend(secrets.into_iter().map(|w| Witness::Word {
                word: w.clone(),
                evolution: by_word[w].clone(),
            })),
            Some(partner) => {
                cover.extend(secrets.into_iter().map(|w| (w.clone(), (*partner).clone())))
            }
        }
    }

    Ok(Verdict {
        notion: Notion::Lbto,
        opaque: witnesses.is_empty(),
        bounded: true,
        budget: None,
        witnesses,
        cover: CoverMap::Words(cover),
        notes: Vec::new(),
    })
}

/// Execution-time opacity over a finite evolution set: restrict to
/// evolutions ending at the first visit to the final location, split their
/// normalized runs into private and public, and require the set of private
/// durations to be included in the set of public durations. The inclusion
/// is exact rational set inclusion, no tolerance.
pub fn check_eto(evolutions: &[Evolution], spec: &EtoSpec) -> Verdict {
    let mut private: BTreeMap<Rational, &Evolution> = BTreeMap::new();
    let mut public: BTreeSet<Rational> = BTreeSet::new();
    let mut reaches_final = false;

    for evolution in evolutions {
        if !ends_at_first_final(evolution, spec.final_location) {
            continue;
        }
        reaches_final = true;
        let run = normalize_run(evolution);
        let d = run.duration();
        if is_private_run(&run, spec) {
            private
                .entry(d)
                .and_modify(|e| {
                    if evolution < *e {
                        *e = evolution;
                    }
                })
                .or_insert(evolution);
        } else {
            debug_assert!(is_public_run(&run, spec));
            public.insert(d);
        }
    }

    let mut witnesses = Vec::new();
    let mut covered = Vec::new();
    for (d, evolution) in &private {
        if public.contains(d) {
            covered.push(d.clone());
        } else {
            witnesses.push(Witness::Duration {
                duration: d.clone(),
                evolution: (*evolution).clone(),
            });
        }
    }

    let mut notes = Vec::new();
    if !reaches_final {
        notes.push(
            "no enumerated evolution ends at the final location within the budget".to_string(),
        );
    }

    Verdict {
        notion: Notion::Eto,
        opaque: witnesses.is_empty(),
        bounded: true,
        budget: None,
        witnesses,
        cover: CoverMap::Durations(covered),
        notes,
    }
}

/// Converts a language-based secret into an evolution secret: the exact
/// preimage of the language, exposed as a membership predicate.
pub fn convert_lbto(secret_language: TimedLanguageSpec) -> SecretSpec {
    SecretSpec::WordInLanguage(secret_language)
}

/// Converts an execution-time spec into an evolution secret: evolutions
/// that end at the first visit to the final location and whose normalized
/// run is private.
pub fn convert_eto(spec: EtoSpec) -> SecretSpec {
    SecretSpec::PrivateRun(spec)
}

const FRAGMENT_SEED: u64 = 0x0bac_17e5;
const FRAGMENTS_PER_EVOLUTION: usize = 3;

/// Splits the delay at `index` into `fraction` and its complement, inserting
/// the intermediate state. The variant is time-equivalent to the input and
/// stays valid: invariants are disjunction-free, so holding at the original
/// endpoints implies holding at the split point.
fn split_delay(evolution: &Evolution, index: usize, fraction: &Rational) -> Evolution {
    let steps = evolution.steps();
    let total = steps[index].0.delay().expect("split target is a delay");
    let after = steps[index].1.clone();
    let before = if index == 0 {
        evolution.initial_state()
    } else {
        &steps[index - 1].1
    };
    let first = total * fraction;
    let second = total - &first;
    let mid = State::new_unchecked(
        before.location(),
        before
            .valuation()
            .elapse(&first)
            .expect("fraction of a non-negative delay is non-negative"),
    );
    let mut new_steps = steps[..index].to_vec();
    new_steps.push((Action::Delay(first), mid));
    new_steps.push((Action::Delay(second), after));
    new_steps.extend_from_slice(&steps[index + 1..]);
    Evolution::from_parts(evolution.initial_state().clone(), new_steps)
}

fn random_fragmentations(evolution: &Evolution, rng: &mut ChaCha8Rng) -> Vec<Evolution> {
    let positions: Vec<usize> = evolution
        .steps()
        .iter()
        .enumerate()
        .filter(|(_, (a, _))| matches!(a.delay(), Some(d) if *d > rat(0)))
        .map(|(i, _)| i)
        .collect();
    if positions.is_empty() {
        return Vec::new();
    }
    let fractions = [
        Rational::new(1.into(), 2.into()),
        Rational::new(1.into(), 3.into()),
        Rational::new(2.into(), 3.into()),
    ];
    (0..FRAGMENTS_PER_EVOLUTION)
        .map(|_| {
            let position = *positions.choose(rng).expect("non-empty");
            let fraction = fractions.choose(rng).expect("non-empty");
            split_delay(evolution, position, fraction)
        })
        .collect()
}

/// Checks that secrecy is invariant under time-equivalence on the given
/// set: for every enumerated evolution, the evolution and its merged
/// canonical form classify identically, and so does every randomized
/// re-fragmentation of its delays that falls within the set. Returns the
/// first violating pair otherwise.
///
/// Closure is judged relative to the analyzed set: two set members in the
/// same time-equivalence class classify identically exactly when each
/// agrees with their shared canonical form, which the first check decides.
/// The fragmentation sampling is seeded, so the result is deterministic for
/// a given input.
pub fn check_secret_closure(
    evolutions: &[Evolution],
    secret: &SecretSpec,
) -> Result<ClosureCheck, OpacityError> {
    let members: BTreeSet<&Evolution> = evolutions.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(FRAGMENT_SEED);
    for evolution in evolutions {
        let classed = secret.is_secret(evolution)?;
        let canon = canonicalize_tau(evolution);
        if canon != *evolution && secret.is_secret(&canon)? != classed {
            return Ok(ClosureCheck {
                violation: Some((evolution.clone(), canon)),
            });
        }
        for variant in random_fragmentations(evolution, &mut rng) {
            if !members.contains(&variant) {
                continue;
            }
            if secret.is_secret(&variant)? != classed {
                return Ok(ClosureCheck {
                    violation: Some((evolution.clone(), variant)),
                });
            }
        }
    }
    Ok(ClosureCheck { violation: None })
}

/// Tests whether the secret is expressible as a word-language preimage on
/// this set: groups the evolutions by timed word and requires every group
/// to be uniform in secrecy. A mixed group yields a (secret, non-secret)
/// counter-pair mapping to the same word.
pub fn check_word_representable(
    evolutions: &[Evolution],
    secret: &SecretSpec,
) -> Result<RepresentabilityCheck, OpacityError> {
    let mut groups: BTreeMap<TimedWord, (Option<&Evolution>, Option<&Evolution>)> =
        BTreeMap::new();
    for evolution in evolutions {
        let word = to_timed_word(evolution);
        let entry = groups.entry(word).or_default();
        let slot = if secret.is_secret(evolution)? {
            &mut entry.0
        } else {
            &mut entry.1
        };
        match slot {
            Some(existing) if *existing <= evolution => {}
            _ => *slot = Some(evolution),
        }
    }
    for (_, (secret_min, public_min)) in groups {
        if let (Some(s), Some(p)) = (secret_min, public_min) {
            return Ok(RepresentabilityCheck {
                counter_pair: Some((s.clone(), p.clone())),
            });
        }
    }
    Ok(RepresentabilityCheck { counter_pair: None })
}

/// Enumerates within the budget and runs [`check_ebto`], recording the
/// budget on the verdict.
pub fn check_ebto_bounded(
    automaton: &TimedAutomaton,
    secret: &SecretSpec,
    cfg: &ObservationConfig,
    budget: &EnumerationBudget,
) -> Result<Verdict, CheckError> {
    let evolutions = enumerate_evolutions(automaton, budget)?;
    let mut verdict = check_ebto(&evolutions, secret, cfg)?;
    verdict.budget = Some(budget.clone());
    Ok(verdict)
}

/// Enumerates within the budget and runs [`check_lbto`].
pub fn check_lbto_bounded(
    automaton: &TimedAutomaton,
    secret_language: &TimedLanguageSpec,
    observable_events: &BTreeSet<EventId>,
    budget: &EnumerationBudget,
) -> Result<Verdict, CheckError> {
    let evolutions = enumerate_evolutions(automaton, budget)?;
    let mut verdict = check_lbto(&evolutions, secret_language, observable_events)?;
    verdict.budget = Some(budget.clone());
    Ok(verdict)
}

/// Enumerates within the budget and runs [`check_eto`].
pub fn check_eto_bounded(
    automaton: &TimedAutomaton,
    spec: &EtoSpec,
    budget: &EnumerationBudget,
) -> Result<Verdict, CheckError> {
    let evolutions = enumerate_evolutions(automaton, budget)?;
    let mut verdict = check_eto(&evolutions, spec);
    verdict.budget = Some(budget.clone());
    Ok(verdict)
}

/// Enumerates within the budget and runs [`check_secret_closure`].
pub fn check_closure_bounded(
    automaton: &TimedAutomaton,
    secret: &SecretSpec,
    budget: &EnumerationBudget,
) -> Result<ClosureCheck, CheckError> {
    let evolutions = enumerate_evolutions(automaton, budget)?;
    Ok(check_secret_closure(&evolutions, secret)?)
}

/// Enumerates within the budget and runs [`check_word_representable`].
pub fn check_representable_bounded(
    automaton: &TimedAutomaton,
    secret: &SecretSpec,
    budget: &EnumerationBudget,
) -> Result<RepresentabilityCheck, CheckError> {
    let evolutions = enumerate_evolutions(automaton, budget)?;
    Ok(check_word_representable(&evolutions, secret)?)
}

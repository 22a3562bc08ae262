//! Cross-module suites: the correspondence between observational
//! equivalence, word projections, and durations, and the relationships
//! between the three opacity checkers.

use std::collections::BTreeMap;

use opacheck_core::corpus::{fig2, fig4};
use opacheck_core::{
    canonicalize, check_ebto, check_eto, check_lbto, convert_eto, convert_lbto,
    enumerate_evolutions, obs_equivalent, observe_evolution, project_word, rat, ratio,
    to_timed_word, CanonicalObservation, ClockConstraint, EnumerationBudget, EtoSpec, Evolution,
    EventId, ObservationConfig, SecretSpec, TimedAutomaton, TimedAutomatonBuilder,
    TimedLanguageSpec, TimedWord,
};

fn event_subsets(ta: &TimedAutomaton) -> Vec<Vec<EventId>> {
    let mut subsets = vec![vec![]];
    for e in ta.events() {
        for mut s in subsets.clone() {
            s.push(e);
            subsets.push(s);
        }
    }
    subsets
}

fn canonical_groups(
    evolutions: &[Evolution],
    cfg: &ObservationConfig,
) -> BTreeMap<CanonicalObservation, Vec<Evolution>> {
    let mut groups: BTreeMap<CanonicalObservation, Vec<Evolution>> = BTreeMap::new();
    for evo in evolutions {
        groups
            .entry(canonicalize(&observe_evolution(evo, cfg)))
            .or_default()
            .push(evo.clone());
    }
    groups
}

#[test]
fn equivalent_evolutions_have_equal_projected_words() {
    // exhaustive over all observationally equivalent pairs in each
    // enumeration: equivalence classes are exactly the canonical groups
    let instances = [
        (fig2(), EnumerationBudget::new(5, [rat(1), rat(50), rat(99), rat(100)], false).unwrap()),
        (fig4(1, 2), EnumerationBudget::new(5, [rat(1), rat(2)], true).unwrap()),
    ];
    let mut nontrivial_groups = 0usize;
    for (ta, budget) in instances {
        let evolutions = enumerate_evolutions(&ta, &budget).unwrap();
        for events in event_subsets(&ta) {
            let cfg = ObservationConfig::events_only(&ta, events.clone()).unwrap();
            let observable = events.into_iter().collect();
            for (_, group) in canonical_groups(&evolutions, &cfg) {
                if group.len() > 1 {
                    nontrivial_groups += 1;
                }
                let reference = project_word(&to_timed_word(&group[0]), &observable);
                for evo in &group[1..] {
                    assert_eq!(project_word(&to_timed_word(evo), &observable), reference);
                }
            }
        }
    }
    assert!(nontrivial_groups > 0, "the check must not be vacuous");
}

/// A fork whose two branches reach the final location after different
/// forced durations, giving distinct duration classes.
fn two_duration_fork() -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    let x = b.clock("x");
    let a = b.event("a");
    let l0 = b.location("l0");
    let lf = b.location("lf");
    b.initial(l0);
    b.edge(l0, a, ClockConstraint::eq(x, 1), [], lf);
    b.edge(l0, a, ClockConstraint::eq(x, 2), [], lf);
    b.build().unwrap()
}

#[test]
fn duration_equality_characterizes_equivalence_on_first_final_evolutions() {
    // with only the final location observable, two evolutions that stop at
    // its first visit are equivalent exactly when their durations agree
    let instances: [(TimedAutomaton, &str, EnumerationBudget); 3] = [
        (
            fig2(),
            "l2",
            EnumerationBudget::new(5, [rat(1), rat(50), rat(99), rat(100)], false).unwrap(),
        ),
        (
            fig4(1, 2),
            "lf",
            EnumerationBudget::new(5, [rat(1), rat(2)], false).unwrap(),
        ),
        (
            two_duration_fork(),
            "lf",
            EnumerationBudget::new(5, [ratio(1, 2), rat(1), rat(2)], false).unwrap(),
        ),
    ];
    let mut equal_pairs = 0usize;
    let mut unequal_pairs = 0usize;
    for (ta, final_name, budget) in instances {
        let lf = ta.location_id(final_name).unwrap();
        let cfg = ObservationConfig::location_only(&ta, lf).unwrap();
        let first_final: Vec<Evolution> = enumerate_evolutions(&ta, &budget)
            .unwrap()
            .into_iter()
            .filter(|e| opacheck_core::ends_at_first_final(e, lf))
            .collect();
        assert!(!first_final.is_empty(), "instances must reach the final location");
        for x in &first_final {
            for y in &first_final {
                let same_duration = x.duration() == y.duration();
                if same_duration {
                    equal_pairs += 1;
                } else {
                    unequal_pairs += 1;
                }
                assert_eq!(obs_equivalent(x, y, &cfg), same_duration);
            }
        }
    }
    assert!(equal_pairs > 0 && unequal_pairs > 0, "both directions exercised");
}

#[test]
fn ebto_of_a_word_preimage_implies_lbto_everywhere() {
    // with locations and clocks hidden, whenever the evolution checker
    // accepts the preimage secret, the word checker accepts the language
    let ta = fig2();
    let a = ta.event_id("a").unwrap();
    let b = ta.event_id("b").unwrap();
    let budget = EnumerationBudget::new(5, [rat(1), rat(50), rat(99), rat(100)], false).unwrap();
    let evolutions = enumerate_evolutions(&ta, &budget).unwrap();

    let words = [
        TimedWord::empty(),
        TimedWord::new(vec![(a, rat(1))]).unwrap(),
        TimedWord::new(vec![(a, rat(1)), (b, rat(100))]).unwrap(),
    ];
    let mut languages = Vec::new();
    for i in 0..words.len() {
        languages.push(TimedLanguageSpec::FiniteList(vec![words[i].clone()]));
        for j in i + 1..words.len() {
            languages.push(TimedLanguageSpec::FiniteList(vec![
                words[i].clone(),
                words[j].clone(),
            ]));
        }
    }

    let mut ebto_opaque_seen = false;
    for language in &languages {
        for events in event_subsets(&ta) {
            let cfg = ObservationConfig::events_only(&ta, events.clone()).unwrap();
            let secret = convert_lbto(language.clone());
            let ebto = check_ebto(&evolutions, &secret, &cfg).unwrap();
            let lbto =
                check_lbto(&evolutions, language, &events.into_iter().collect()).unwrap();
            if ebto.opaque {
                ebto_opaque_seen = true;
                assert!(lbto.opaque, "evolution-level opacity implies word-level opacity");
            }
        }
    }
    assert!(ebto_opaque_seen, "the implication must not be vacuous");
}

#[test]
fn eto_matches_ebto_under_the_duration_observer_on_corpus_instances() {
    let instances: [(TimedAutomaton, &str, EnumerationBudget); 3] = [
        (
            fig4(1, 2),
            "lf",
            EnumerationBudget::new(5, [rat(1), rat(2)], false).unwrap(),
        ),
        (
            fig2(),
            "l2",
            EnumerationBudget::new(5, [rat(1), rat(99), rat(100)], false).unwrap(),
        ),
        (
            two_duration_fork(),
            "lf",
            EnumerationBudget::new(4, [ratio(1, 2), rat(1), rat(2)], false).unwrap(),
        ),
    ];
    for (ta, final_name, budget) in instances {
        let lf = ta.location_id(final_name).unwrap();
        let cfg = ObservationConfig::location_only(&ta, lf).unwrap();
        let evolutions = enumerate_evolutions(&ta, &budget).unwrap();
        for l_priv in ta.locations() {
            let spec = EtoSpec::new(&ta, l_priv, lf).unwrap();
            let eto = check_eto(&evolutions, &spec);
            let ebto = check_ebto(&evolutions, &convert_eto(spec), &cfg).unwrap();
            assert_eq!(
                eto.opaque, ebto.opaque,
                "duration inclusion and evolution equivalence must agree (private {})",
                ta.location_name(l_priv)
            );
        }
    }
}

#[test]
fn explicit_list_secrets_compare_canonically_in_closure_groups() {
    // an explicit list saturated with every in-budget fragmentation of the
    // secret duration is accepted by the closure check
    let ta = opacheck_core::corpus::fig1();
    let budget = EnumerationBudget::new(2, [rat(1), rat(2), rat(3)], false).unwrap();
    let evolutions = enumerate_evolutions(&ta, &budget).unwrap();
    let jump = |total: u64| {
        evolutions
            .iter()
            .find(|e| e.len() == 1 && e.duration() == rat(total))
            .unwrap()
            .clone()
    };
    let saturated: Vec<Evolution> = evolutions
        .iter()
        .filter(|e| e.duration() == rat(3) && !e.is_empty())
        .cloned()
        .collect();
    assert!(saturated.len() >= 3, "3, 1+2, and 2+1 are all in budget");

    let closed = SecretSpec::ExplicitList(saturated);
    assert!(opacheck_core::check_secret_closure(&evolutions, &closed)
        .unwrap()
        .is_closed());

    let unsaturated = SecretSpec::ExplicitList(vec![jump(3)]);
    let outcome = opacheck_core::check_secret_closure(&evolutions, &unsaturated).unwrap();
    assert!(!outcome.is_closed());
}

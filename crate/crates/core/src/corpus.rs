//! The small automata shipped in the tool's corpus, constructible
//! programmatically. The CLI ships the same models as `corpus/*.ta` files;
//! these constructors are the library-side source of truth used by the test
//! suites.

use crate::model::{ClockConstraint, TimedAutomaton, TimedAutomatonBuilder};

/// `fig1.ta`: a single location with one clock and no edges. Its generated
/// evolutions are pure delay sequences, which is all the closure demo needs:
/// a one-jump delay and its fragmented variants are time-equivalent.
pub fn fig1() -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    b.clock("x");
    let l0 = b.location("l0");
    b.initial(l0);
    b.build().expect("fig1 is well-formed")
}

/// `fig2.ta`: the suffix-blindness chain
/// `l0 --a, x==1--> l1 --b, x==100--> l2` with no resets.
pub fn fig2() -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    let x = b.clock("x");
    let a = b.event("a");
    let ev_b = b.event("b");
    let l0 = b.location("l0");
    let l1 = b.location("l1");
    let l2 = b.location("l2");
    b.initial(l0);
    b.edge(l0, a, ClockConstraint::eq(x, 1), [], l1);
    b.edge(l1, ev_b, ClockConstraint::eq(x, 100), [], l2);
    b.build().expect("fig2 is well-formed")
}

/// `fig3.ta`: a single location with the self-loop `a, true, x := 0`.
/// Every firing of `a` resets the clock, so all events carry timestamp 0 and
/// secrecy can live entirely in the trailing delay.
pub fn fig3() -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    let x = b.clock("x");
    let a = b.event("a");
    let l0 = b.location("l0");
    b.initial(l0);
    b.edge(l0, a, ClockConstraint::tt(), [x], l0);
    b.build().expect("fig3 is well-formed")
}

/// `fig4.ta`: the diamond whose two branches consume the same total time in
/// opposite order:
/// `l0 --a, x==c1, x:=0--> l1 --b, x==c2--> lf` and
/// `l0 --a, x==c2, x:=0--> l2 --b, x==c1--> lf`.
pub fn fig4(c1: u64, c2: u64) -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    let x = b.clock("x");
    let a = b.event("a");
    let ev_b = b.event("b");
    let l0 = b.location("l0");
    let l1 = b.location("l1");
    let l2 = b.location("l2");
    let lf = b.location("lf");
    b.initial(l0);
    b.edge(l0, a, ClockConstraint::eq(x, c1), [x], l1);
    b.edge(l1, ev_b, ClockConstraint::eq(x, c2), [], lf);
    b.edge(l0, a, ClockConstraint::eq(x, c2), [x], l2);
    b.edge(l2, ev_b, ClockConstraint::eq(x, c1), [], lf);
    b.build().expect("fig4 is well-formed")
}

/// A permissive single-location automaton with unguarded self-loops on `a`
/// and `b`. Any alternation of delays and events is a valid evolution here,
/// which makes it the canvas for the worked word/run examples.
pub fn two_event_loop() -> TimedAutomaton {
    let mut b = TimedAutomatonBuilder::new();
    b.clock("x");
    let a = b.event("a");
    let ev_b = b.event("b");
    let l0 = b.location("l0");
    b.initial(l0);
    b.edge(l0, a, ClockConstraint::tt(), [], l0);
    b.edge(l0, ev_b, ClockConstraint::tt(), [], l0);
    b.build().expect("loop automaton is well-formed")
}

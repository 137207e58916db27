//! Safety checking with testing automata.
//!
//! A system is instrumented with property signals, composed with a testing
//! automaton that watches those signals, and the property holds when no
//! designated error state of the testing automaton is reachable.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Signal, SignalSet};
use crate::rcsm::{RState, RTransition, RcsmAutomaton};
use crate::state::StateId;
use crate::tcsm::TcsmAutomaton;

/// Adds `signal` to the outputs of state `s` of `p`.
pub fn attach_signal(p: &TcsmAutomaton, s: &StateId, signal: &Signal) -> Result<TcsmAutomaton> {
    p.attach_signal(s, signal)
}

/// A path from the initial region state to an error region state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub start: RState,
    pub steps: Vec<RTransition>,
}

impl Witness {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &RState {
        self.steps.last().map_or(&self.start, |t| &t.target)
    }
}

/// One line per step:
/// `STEP k: (state-tuple)@region --kind[trigger/resets]--> (state-tuple)@region`.
impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.steps.iter().enumerate() {
            let resets: Vec<&str> = t.resets.iter().map(|c| c.name()).collect();
            writeln!(
                f,
                "STEP {}: {} --{}[{}/{}]--> {}",
                k + 1,
                t.source,
                t.kind,
                t.trigger,
                resets.join(","),
                t.target
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub explored: usize,
}

/// Composes `system` with `test` and searches for a reachable region state
/// whose test component is in `error_states`.
pub fn check_safety(
    system: &RcsmAutomaton,
    test: &RcsmAutomaton,
    error_states: &[StateId],
) -> Result<SafetyVerdict> {
    let known: BTreeSet<&StateId> = test.rstates().iter().map(|rs| &rs.state).collect();
    if let Some(e) = error_states.iter().find(|e| !known.contains(e)) {
        return Err(Error::UnknownErrorState(e.to_string()));
    }
    let product = RcsmAutomaton::product(&[system.clone(), test.clone()])?;
    let (offset, arity) = (system.arity(), test.arity());
    let errors: BTreeSet<&StateId> = error_states.iter().collect();
    let (path, _) = product.shortest_path(|rs| errors.contains(&rs.state.slice(offset, arity)));
    let witness = path.map(|steps| Witness {
        start: product.init().clone(),
        steps: steps.into_iter().cloned().collect(),
    });
    Ok(SafetyVerdict {
        holds: witness.is_none(),
        witness,
        explored: product.rstates().len(),
    })
}

/// The region states reachable in one step when exactly the signals in
/// `external` occur.
pub fn simulate_step(a: &RcsmAutomaton, rs: &RState, external: &SignalSet) -> Result<Vec<RState>> {
    if let Some(s) = external.iter().find(|s| !a.alphabets().external.contains(*s)) {
        return Err(Error::NonExternalSignal(s.to_string()));
    }
    Ok(a.outgoing(rs)?
        .filter(|t| t.trigger.eval(external))
        .map(|t| t.target.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{signals, Formula};
    use crate::state::sid;
    use crate::tcsm::TimedTransition;

    fn f(text: &str) -> Formula {
        text.parse().unwrap()
    }

    fn blinker() -> TcsmAutomaton {
        TcsmAutomaton::new(
            "B",
            vec![],
            vec![(sid("off"), SignalSet::new()), (sid("on"), signals(["light"]))],
            &sid("off"),
            vec![
                TimedTransition::new(sid("off"), sid("off"), f("-push")),
                TimedTransition::new(sid("off"), sid("on"), f("push")),
                TimedTransition::new(sid("on"), sid("off"), Formula::True),
            ],
        )
        .unwrap()
    }

    fn watcher(init_is_error: bool) -> TcsmAutomaton {
        let init = if init_is_error { "bad" } else { "ok" };
        TcsmAutomaton::new(
            "W",
            vec![],
            vec![(sid("ok"), SignalSet::new()), (sid("bad"), SignalSet::new())],
            &sid(init),
            vec![
                TimedTransition::new(sid("ok"), sid("ok"), f("-light")),
                TimedTransition::new(sid("ok"), sid("bad"), f("light")),
                TimedTransition::new(sid("bad"), sid("bad"), Formula::True),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reachable_error_has_shortest_witness() {
        let sys = RcsmAutomaton::build(&blinker()).unwrap();
        let test = RcsmAutomaton::build(&watcher(false)).unwrap();
        let v = check_safety(&sys, &test, &[sid("bad")]).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.end().state, sid("(off,bad)"));
        let report = w.to_string();
        assert_eq!(report.lines().count(), 2);
        assert!(report.starts_with("STEP 1: (off,ok)@ints= zero= order= beyond= --action[push/]--> (on,ok)@"));
    }

    #[test]
    fn initial_error_gives_empty_witness() {
        let sys = RcsmAutomaton::build(&blinker()).unwrap();
        let test = RcsmAutomaton::build(&watcher(true)).unwrap();
        let v = check_safety(&sys, &test, &[sid("bad")]).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().is_empty());
    }

    #[test]
    fn unknown_error_state() {
        let sys = RcsmAutomaton::build(&blinker()).unwrap();
        let test = RcsmAutomaton::build(&watcher(false)).unwrap();
        assert!(matches!(
            check_safety(&sys, &test, &[sid("nowhere")]),
            Err(Error::UnknownErrorState(_))
        ));
    }

    #[test]
    fn stepping_on_external_inputs() {
        let a = RcsmAutomaton::build(&blinker()).unwrap();
        let init = a.init().clone();
        let pushed = simulate_step(&a, &init, &signals(["push"])).unwrap();
        assert_eq!(pushed.len(), 1);
        assert_eq!(pushed[0].state, sid("on"));
        let idle = simulate_step(&a, &init, &SignalSet::new()).unwrap();
        assert_eq!(idle, vec![init.clone()]);
        assert!(matches!(
            simulate_step(&a, &init, &signals(["light"])),
            Err(Error::NonExternalSignal(_))
        ));
    }

    #[test]
    fn attaching_is_idempotent() {
        let p = blinker();
        let x = Signal::new("x").unwrap();
        let once = attach_signal(&p, &sid("on"), &x).unwrap();
        assert_eq!(attach_signal(&once, &sid("on"), &x).unwrap(), once);
    }
}

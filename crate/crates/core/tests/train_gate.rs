use std::collections::{HashSet, VecDeque};

use tcsm_core::bundled;
use tcsm_core::state::sid;
use tcsm_core::{check_safety, RState, RcsmAutomaton, StateId, TcsmAutomaton};

fn system(machines: &[TcsmAutomaton]) -> RcsmAutomaton {
    let parts: Vec<RcsmAutomaton> = machines
        .iter()
        .map(|m| RcsmAutomaton::build(m).unwrap())
        .collect();
    RcsmAutomaton::product(&parts).unwrap()
}

/// Plain breadth-first search over the product, returning the length of the
/// shortest path to an error state.
fn naive_distance(product: &RcsmAutomaton, is_error: impl Fn(&RState) -> bool) -> Option<usize> {
    let mut seen = HashSet::from([product.init().clone()]);
    let mut frontier = VecDeque::from([(product.init().clone(), 0)]);
    while let Some((rs, d)) = frontier.pop_front() {
        if is_error(&rs) {
            return Some(d);
        }
        for t in product.transitions().filter(|t| t.source == rs) {
            if seen.insert(t.target.clone()) {
                frontier.push_back((t.target.clone(), d + 1));
            }
        }
    }
    None
}

#[test]
fn crossing_is_safe() {
    let sys = system(&bundled::instrument(&bundled::train_gate()).unwrap());
    let test = RcsmAutomaton::build(&bundled::safety_test()).unwrap();
    let verdict = check_safety(&sys, &test, &[sid(bundled::ERROR_STATE)]).unwrap();
    assert!(verdict.holds);
    assert!(verdict.witness.is_none());

    let product = RcsmAutomaton::product(&[sys.clone(), test.clone()]).unwrap();
    assert_eq!(verdict.explored, product.rstates().len());
    let q1 = StateId::new("q1").unwrap();
    assert_eq!(naive_distance(&product, |rs| rs.state.slice(3, 1) == q1), None);
}

#[test]
fn stuck_gate_is_caught_with_a_minimal_witness() {
    let sys = system(&bundled::broken_crossing());
    let test = RcsmAutomaton::build(&bundled::safety_test()).unwrap();
    let verdict = check_safety(&sys, &test, &[sid("q1")]).unwrap();
    assert!(!verdict.holds);
    let witness = verdict.witness.unwrap();
    let product = RcsmAutomaton::product(&[sys, test]).unwrap();
    let q1 = StateId::new("q1").unwrap();
    assert_eq!(
        naive_distance(&product, |rs| rs.state.slice(3, 1) == q1),
        Some(witness.len())
    );
    for pair in witness.steps.windows(2) {
        assert_eq!(pair[0].target, pair[1].source);
    }
    assert_eq!(witness.steps[0].source, *product.init());
    for t in &witness.steps {
        assert_eq!(product.transition(&t.source, &t.target).unwrap(), Some(t));
    }
}

#[test]
fn crossing_has_no_traps() {
    let sys = system(&bundled::instrument(&bundled::train_gate()).unwrap());
    assert!(sys.zero_time_traps().is_empty());
    for m in bundled::train_gate() {
        assert!(RcsmAutomaton::build(&m).unwrap().zero_time_traps().is_empty());
    }
}

#[test]
fn trap_appears_only_in_product() {
    let pair = bundled::trap_pair();
    for m in &pair {
        assert!(RcsmAutomaton::build(m).unwrap().zero_time_traps().is_empty());
        assert!(m.check_timed_complete().unwrap().is_empty());
    }
    let traps = system(&pair).zero_time_traps();
    assert_eq!(traps.len(), 1);
    let states: Vec<String> = traps[0].iter().map(|rs| rs.state.to_string()).collect();
    assert_eq!(states, vec!["(a0,b0)", "(a1,b1)"]);
}

#[test]
fn crossing_regionization_commutes_with_product() {
    let machines = bundled::instrument(&bundled::train_gate()).unwrap();
    let direct = RcsmAutomaton::build(&TcsmAutomaton::product(&machines[..2]).unwrap()).unwrap();
    assert!(direct.canonical_compare(&system(&machines[..2])).unwrap());
    let direct = RcsmAutomaton::build(&TcsmAutomaton::product(&machines).unwrap()).unwrap();
    assert!(direct.canonical_compare(&system(&machines)).unwrap());
}

#[test]
fn verdict_depends_on_timing() {
    let fast = bundled::TRAIN_GATE_INSTRUMENTED.replace("guard x > 3", "guard x > 1");
    let machines = tcsm_core::parse_model(&fast).unwrap().timed().unwrap();
    let test = RcsmAutomaton::build(&bundled::safety_test()).unwrap();
    let verdict = check_safety(&system(&machines), &test, &[sid("q1")]).unwrap();
    assert!(!verdict.holds);

    let sys = system(&bundled::instrument(&bundled::train_gate()).unwrap());
    assert!(sys.rstates().iter().any(|rs| rs.state == sid("(s1',t2,u3)")));
}

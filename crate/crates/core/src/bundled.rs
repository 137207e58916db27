//! Bundled models: the railroad crossing and a pair that traps in product.
//!
//! `passing` marks the train inside the crossing (`TRAIN.s1'`) and
//! `lowered` marks the gate down (`GATE.t2`). The testing automaton enters
//! its error state `q1` when the train passes while the gate is not down.

use crate::error::Result;
use crate::formula::Signal;
use crate::model::parse_model;
use crate::state::StateId;
use crate::tcsm::TcsmAutomaton;

pub const TRAIN_GATE: &str = include_str!("../models/train_gate.tcsm");
pub const TRAIN_GATE_INSTRUMENTED: &str = include_str!("../models/train_gate_instrumented.tcsm");
pub const SAFETY_TEST: &str = include_str!("../models/safety_test.tcsm");
pub const GATE_STUCK: &str = include_str!("../models/gate_stuck.tcsm");
pub const TRAP_PAIR: &str = include_str!("../models/trap_pair.tcsm");

pub const ERROR_STATE: &str = "q1";

/// Every bundled file with its name.
pub const FILES: [(&str, &str); 5] = [
    ("train_gate.tcsm", TRAIN_GATE),
    ("train_gate_instrumented.tcsm", TRAIN_GATE_INSTRUMENTED),
    ("safety_test.tcsm", SAFETY_TEST),
    ("gate_stuck.tcsm", GATE_STUCK),
    ("trap_pair.tcsm", TRAP_PAIR),
];

fn load(text: &str) -> Vec<TcsmAutomaton> {
    parse_model(text)
        .and_then(|f| f.timed())
        .expect("bundled models are well formed")
}

/// TRAIN, GATE and CONTROLLER, uninstrumented.
pub fn train_gate() -> Vec<TcsmAutomaton> {
    load(TRAIN_GATE)
}

/// The crossing with `passing` and `lowered` attached.
pub fn instrument(machines: &[TcsmAutomaton]) -> Result<Vec<TcsmAutomaton>> {
    machines
        .iter()
        .map(|m| match m.name() {
            "TRAIN" => m.attach_signal(&StateId::new("s1'")?, &Signal::new("passing")?),
            "GATE" => m.attach_signal(&StateId::new("t2")?, &Signal::new("lowered")?),
            _ => Ok(m.clone()),
        })
        .collect()
}

pub fn safety_test() -> TcsmAutomaton {
    load(SAFETY_TEST).remove(0)
}

/// The instrumented crossing with a gate that never lowers.
pub fn broken_crossing() -> Vec<TcsmAutomaton> {
    let stuck = load(GATE_STUCK).remove(0);
    load(TRAIN_GATE_INSTRUMENTED)
        .into_iter()
        .map(|m| if m.name() == "GATE" { stuck.clone() } else { m })
        .collect()
}

pub fn trap_pair() -> Vec<TcsmAutomaton> {
    load(TRAP_PAIR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, ModelFile};

    #[test]
    fn instrumented_file_matches_instrumentation() {
        let attached = instrument(&train_gate()).unwrap();
        let file = ModelFile {
            automata: attached.into_iter().map(Model::Timed).collect(),
        };
        assert_eq!(parse_model(TRAIN_GATE_INSTRUMENTED).unwrap(), file);
    }

    #[test]
    fn bundled_machines_are_timed_complete() {
        for (name, text) in FILES {
            for m in load(text) {
                let v = m.check_timed_complete().unwrap();
                assert!(v.is_empty(), "{name}/{}: {v:?}", m.name());
            }
        }
    }
}

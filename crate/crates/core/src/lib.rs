//! Model checking for timed concurrent state machines.
//!
//! The crate covers three tiers of automata:
//!
//! * [`csm::CsmAutomaton`]: untimed concurrent state machines whose
//!   transitions are triggered by Boolean formulas over signals;
//! * [`tcsm::TcsmAutomaton`]: the same machines extended with clocks, guards
//!   and resets;
//! * [`rcsm::RcsmAutomaton`]: region automata, the finite executable
//!   semantics of timed machines, which can be multiplied directly.
//!
//! Safety properties are checked by composing a system with a testing
//! automaton and searching for error states ([`verify`]).

pub mod bundled;
pub mod clock;
pub mod csm;
pub mod dot;
pub mod error;
pub mod formula;
pub mod model;
pub mod rcsm;
pub mod state;
pub mod tcsm;
pub mod verify;

pub use clock::{Clock, ClockBounds, ClockConstraint, ClockSet, ClockValuation, Rational, Region};
pub use csm::{Alphabets, CsmAutomaton, ReachabilityGraph};
pub use error::{Error, Result};
pub use formula::{Formula, Signal, SignalSet};
pub use model::{parse_model, Model, ModelFile};
pub use rcsm::{Kind, RState, RTransition, RcsmAutomaton};
pub use state::StateId;
pub use tcsm::{TcsmAutomaton, TimedTransition, TimedViolation};
pub use verify::{check_safety, simulate_step, SafetyVerdict, Witness};

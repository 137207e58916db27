//! Timed concurrent state machines: CSM extended with clocks, guards and resets.
//!
//! Time passes only on ears (self-loops). A state without an ear is
//! instantaneous and must be left as soon as it is entered. At most one
//! transition exists per (source, target) pair.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::clock::{Clock, ClockBounds, ClockConstraint, ClockSet, Region};
use crate::csm::{cartesian, check_disjoint_outputs, Alphabets, CsmAutomaton};
use crate::error::{Error, Result};
use crate::formula::{Formula, Signal, SignalSet, DEFAULT_ATOM_CAP};
use crate::state::StateId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedTransition {
    pub source: StateId,
    pub target: StateId,
    pub trigger: Formula,
    pub guard: ClockConstraint,
    pub resets: ClockSet,
}

impl TimedTransition {
    pub fn new(source: StateId, target: StateId, trigger: Formula) -> Self {
        TimedTransition {
            source,
            target,
            trigger,
            guard: ClockConstraint::unconstrained(),
            resets: ClockSet::new(),
        }
    }

    pub fn with_guard(mut self, guard: ClockConstraint) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_resets(mut self, resets: ClockSet) -> Self {
        self.resets = resets;
        self
    }

    pub fn is_ear(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcsmAutomaton {
    name: String,
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    clocks: Vec<Clock>,
    out: Vec<SignalSet>,
    init: usize,
    transitions: BTreeMap<(usize, usize), TimedTransition>,
    alphabets: Alphabets,
    bounds: Arc<ClockBounds>,
}

/// A state and region in which the enabled triggers do not cover every input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedViolation {
    pub state: StateId,
    pub region: Region,
    pub witness: SignalSet,
}

impl TcsmAutomaton {
    pub fn new(
        name: &str,
        clocks: Vec<Clock>,
        states: Vec<(StateId, SignalSet)>,
        init: &StateId,
        transitions: Vec<TimedTransition>,
    ) -> Result<Self> {
        let mut seen_clocks = ClockSet::new();
        for c in &clocks {
            if !seen_clocks.insert(c.clone()) {
                return Err(Error::Malformed(format!("duplicate clock `{c}`")));
            }
        }
        let mut index = HashMap::new();
        let mut ids = Vec::new();
        let mut out = Vec::new();
        for (id, signals) in states {
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::Malformed(format!("duplicate state `{id}`")));
            }
            ids.push(id);
            out.push(signals);
        }
        let lookup = |s: &StateId| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownState(s.to_string()))
        };
        let init = lookup(init)?;
        let mut table = BTreeMap::new();
        for t in transitions {
            let key = (lookup(&t.source)?, lookup(&t.target)?);
            if let Some(c) = t
                .guard
                .clocks()
                .into_iter()
                .chain(t.resets.iter().cloned())
                .find(|c| !seen_clocks.contains(c))
            {
                return Err(Error::UnknownClock(c.to_string()));
            }
            if table.contains_key(&key) {
                return Err(Error::Malformed(format!(
                    "duplicate transition `{}` -> `{}`",
                    t.source, t.target
                )));
            }
            if !t.trigger.is_false() {
                table.insert(key, t);
            }
        }
        let outputs = out.iter().flatten().cloned().collect();
        let alphabets = Alphabets::derive(table.values().map(|t| &t.trigger), outputs);
        let bounds = Arc::new(ClockBounds::from_constraints(
            &clocks,
            table.values().map(|t| &t.guard),
        )?);
        Ok(TcsmAutomaton {
            name: name.to_string(),
            states: ids,
            index,
            clocks,
            out,
            init,
            transitions: table,
            alphabets,
            bounds,
        })
    }

    /// A clockless timed automaton with the same transitions.
    pub fn from_csm(csm: &CsmAutomaton) -> Self {
        let states = csm
            .states()
            .iter()
            .map(|s| (s.clone(), csm.out(s).expect("own state").clone()))
            .collect();
        let transitions = csm
            .transitions()
            .map(|(s, t, f)| TimedTransition::new(s.clone(), t.clone(), f.clone()))
            .collect();
        TcsmAutomaton::new(csm.name(), Vec::new(), states, csm.init(), transitions)
            .expect("a valid CSM is a valid clockless TCSM")
    }

    /// The untimed automaton, if this one has no clocks.
    pub fn to_csm(&self) -> Option<CsmAutomaton> {
        if !self.clocks.is_empty() {
            return None;
        }
        let states = self
            .states
            .iter()
            .cloned()
            .zip(self.out.iter().cloned())
            .collect();
        let transitions = self
            .transitions
            .values()
            .map(|t| (t.source.clone(), t.target.clone(), t.trigger.clone()))
            .collect();
        Some(CsmAutomaton::new(&self.name, states, self.init(), transitions).expect("valid"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    /// Clocks in declaration order.
    pub fn clocks(&self) -> &[Clock] {
        &self.clocks
    }

    pub fn bounds(&self) -> &Arc<ClockBounds> {
        &self.bounds
    }

    pub fn init(&self) -> &StateId {
        &self.states[self.init]
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn contains(&self, s: &StateId) -> bool {
        self.index.contains_key(s)
    }

    pub(crate) fn idx(&self, s: &StateId) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownState(s.to_string()))
    }

    pub fn out(&self, s: &StateId) -> Result<&SignalSet> {
        Ok(&self.out[self.idx(s)?])
    }

    pub fn transition(&self, s: &StateId, t: &StateId) -> Result<Option<&TimedTransition>> {
        Ok(self.transitions.get(&(self.idx(s)?, self.idx(t)?)))
    }

    /// All transitions sorted by (source, target) declaration index.
    pub fn transitions(&self) -> impl Iterator<Item = &TimedTransition> {
        self.transitions.values()
    }

    pub(crate) fn outgoing_idx(&self, s: usize) -> impl Iterator<Item = &TimedTransition> {
        self.transitions.range((s, 0)..(s + 1, 0)).map(|(_, t)| t)
    }

    pub fn outgoing(&self, s: &StateId) -> Result<impl Iterator<Item = &TimedTransition>> {
        Ok(self.outgoing_idx(self.idx(s)?))
    }

    pub fn ear(&self, s: &StateId) -> Result<Option<&TimedTransition>> {
        self.transition(s, s)
    }

    pub fn is_instantaneous(&self, s: &StateId) -> Result<bool> {
        Ok(self.ear(s)?.is_none())
    }

    /// For every state and every region, the triggers of the transitions
    /// whose guard holds throughout the region must sum to a tautology.
    pub fn check_timed_complete(&self) -> Result<Vec<TimedViolation>> {
        let regions = Region::enumerate(self.bounds.clone());
        let mut violations = Vec::new();
        for (i, state) in self.states.iter().enumerate() {
            for region in &regions {
                let mut cover = Formula::False;
                for t in self.outgoing_idx(i) {
                    if region.agrees(&t.guard)? {
                        cover = Formula::or(cover, t.trigger.clone());
                    }
                }
                if let Some(witness) = cover.find_assignment(false, DEFAULT_ATOM_CAP)? {
                    violations.push(TimedViolation {
                        state: state.clone(),
                        region: region.clone(),
                        witness,
                    });
                }
            }
        }
        Ok(violations)
    }

    /// Coincidence product: triggers and guards are conjoined, resets joined.
    pub fn product(components: &[TcsmAutomaton]) -> Result<TcsmAutomaton> {
        if components.is_empty() {
            return Err(Error::EmptyProduct);
        }
        check_disjoint_outputs(components.iter().map(|c| (c.name.as_str(), &c.alphabets.outputs)))?;
        check_disjoint_clocks(components.iter().map(|c| (c.name.as_str(), c.clocks.as_slice())))?;

        let sizes: Vec<usize> = components.iter().map(|c| c.states.len()).collect();
        let tuples = cartesian(&sizes);
        let mut states = Vec::with_capacity(tuples.len());
        for tuple in &tuples {
            let id = StateId::tuple(tuple.iter().zip(components).map(|(&i, c)| &c.states[i]));
            let out = tuple
                .iter()
                .zip(components)
                .flat_map(|(&i, c)| c.out[i].iter().cloned())
                .collect();
            states.push((id, out));
        }
        let mut transitions = Vec::new();
        for tuple in &tuples {
            let choices: Vec<Vec<&TimedTransition>> = tuple
                .iter()
                .zip(components)
                .map(|(&i, c)| c.outgoing_idx(i).collect())
                .collect();
            let counts: Vec<usize> = choices.iter().map(Vec::len).collect();
            for pick in cartesian(&counts) {
                let parts: Vec<&TimedTransition> =
                    pick.iter().enumerate().map(|(k, &j)| choices[k][j]).collect();
                let mut guard = ClockConstraint::unconstrained();
                let mut resets = ClockSet::new();
                for t in &parts {
                    guard = guard.and(&t.guard);
                    resets.extend(t.resets.iter().cloned());
                }
                transitions.push(TimedTransition {
                    source: StateId::tuple(parts.iter().map(|t| &t.source)),
                    target: StateId::tuple(parts.iter().map(|t| &t.target)),
                    trigger: Formula::conjunction(parts.iter().map(|t| t.trigger.clone())),
                    guard,
                    resets,
                });
            }
        }
        let init = StateId::tuple(components.iter().map(|c| c.init()));
        let clocks = components.iter().flat_map(|c| c.clocks.iter().cloned()).collect();
        let name = components
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join("_");
        // Void composite pairs drop guards, so derived bounds could shrink.
        TcsmAutomaton::new(&name, clocks, states, &init, transitions)?
            .with_bounds(ClockBounds::union(components.iter().map(|c| &*c.bounds)))
    }

    /// Replaces the derived clock bounds by wider ones.
    pub fn with_bounds(mut self, bounds: ClockBounds) -> Result<Self> {
        if bounds.clocks().len() != self.clocks.len()
            || !self.clocks.iter().all(|c| bounds.position(c).is_ok())
        {
            return Err(Error::Malformed(format!(
                "bounds `{bounds}` do not cover exactly the declared clocks"
            )));
        }
        for (clock, derived) in self.bounds.iter() {
            let given = bounds.get(clock)?;
            if given < derived {
                return Err(Error::ConstantExceedsBound {
                    clock: clock.to_string(),
                    constant: derived,
                    bound: given,
                });
            }
        }
        self.bounds = Arc::new(bounds);
        Ok(self)
    }

    /// Whether the bounds are exactly those implied by the guards.
    pub fn has_derived_bounds(&self) -> bool {
        ClockBounds::from_constraints(&self.clocks, self.transitions.values().map(|t| &t.guard))
            .map(|b| b == *self.bounds)
            .unwrap_or(false)
    }

    /// Adds `signal` to the outputs of state `s`.
    pub fn attach_signal(&self, s: &StateId, signal: &Signal) -> Result<TcsmAutomaton> {
        let i = self.idx(s)?;
        let mut next = self.clone();
        if next.out[i].insert(signal.clone()) {
            next.alphabets = Alphabets::derive(
                next.transitions.values().map(|t| &t.trigger),
                next.out.iter().flatten().cloned().collect(),
            );
        }
        Ok(next)
    }
}

pub(crate) fn check_disjoint_clocks<'a>(
    parts: impl IntoIterator<Item = (&'a str, &'a [Clock])>,
) -> Result<()> {
    let mut owner: BTreeMap<&Clock, &str> = BTreeMap::new();
    for (name, clocks) in parts {
        for c in clocks {
            if let Some(first) = owner.insert(c, name) {
                return Err(Error::OverlappingClocks {
                    clock: c.to_string(),
                    first: first.to_string(),
                    second: name.to_string(),
                });
            }
        }
    }
    Ok(())
}

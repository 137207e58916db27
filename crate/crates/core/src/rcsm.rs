//! Region automata: the finite semantics of timed machines.
//!
//! A region state pairs a machine state with a clock region. Progress
//! transitions let time pass inside one machine state; action transitions
//! change the machine state in zero time. Both kinds may reset clocks.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::clock::{Clock, ClockBounds, ClockSet, Region};
use crate::csm::{cartesian, check_disjoint_outputs, Alphabets};
use crate::error::{Error, Result};
use crate::formula::{Formula, SignalSet};
use crate::state::StateId;
use crate::tcsm::{check_disjoint_clocks, TcsmAutomaton};

pub const DEFAULT_REGION_BUDGET: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RState {
    pub state: StateId,
    pub region: Region,
}

impl RState {
    pub fn new(state: StateId, region: Region) -> Self {
        RState { state, region }
    }

    fn sort_key(&self) -> (StateId, String) {
        (self.state.clone(), self.region.to_string())
    }
}

impl fmt::Display for RState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.state, self.region)
    }
}

impl fmt::Debug for RState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Progress,
    Action,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Progress => "progress",
            Kind::Action => "action",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RTransition {
    pub source: RState,
    pub target: RState,
    pub trigger: Formula,
    pub resets: ClockSet,
    pub kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcsmAutomaton {
    name: String,
    clocks: Vec<Clock>,
    bounds: Arc<ClockBounds>,
    rstates: Vec<RState>,
    index: HashMap<RState, usize>,
    out: Vec<SignalSet>,
    init: usize,
    transitions: BTreeMap<(usize, usize), RTransition>,
    alphabets: Alphabets,
}

/// An outgoing edge under construction: target, reduced trigger, resets, kind.
struct Edge {
    target: RState,
    trigger: Formula,
    resets: ClockSet,
    kind: Kind,
}

/// Unions parallel edges towards the same target.
fn merge(edges: Vec<Edge>) -> Vec<Edge> {
    let mut merged: Vec<Edge> = Vec::new();
    for e in edges {
        if let Some(m) = merged.iter_mut().find(|m| m.target == e.target) {
            if m.trigger != e.trigger {
                m.trigger = Formula::or(m.trigger.clone(), e.trigger);
            }
            m.resets.extend(e.resets);
            m.kind = m.kind.min(e.kind);
        } else {
            merged.push(e);
        }
    }
    merged
}

/// Breadth-first construction shared by regionization and the product.
/// `expand` returns the raw outgoing edges and the outputs of a region state.
fn explore(
    name: &str,
    clocks: Vec<Clock>,
    bounds: Arc<ClockBounds>,
    outputs: SignalSet,
    init: RState,
    budget: usize,
    mut expand: impl FnMut(&RState) -> Result<(SignalSet, Vec<Edge>)>,
) -> Result<RcsmAutomaton> {
    let mut rstates = vec![init.clone()];
    let mut index = HashMap::from([(init, 0)]);
    let mut out = Vec::new();
    let mut transitions = BTreeMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let source = rstates[i].clone();
        let (signals, edges) = expand(&source)?;
        out.push(signals.clone());
        let mut kept = Vec::new();
        for e in edges {
            let trigger = e.trigger.reduce(&signals, &outputs);
            if !trigger.is_unsatisfiable()? {
                kept.push(Edge { trigger, ..e });
            }
        }
        let mut kept = merge(kept);
        kept.sort_by_cached_key(|e| e.target.sort_key());
        for e in kept {
            let j = match index.get(&e.target) {
                Some(&j) => j,
                None => {
                    if rstates.len() >= budget {
                        return Err(Error::RegionBudgetExceeded(budget));
                    }
                    let j = rstates.len();
                    rstates.push(e.target.clone());
                    index.insert(e.target.clone(), j);
                    queue.push_back(j);
                    j
                }
            };
            transitions.insert(
                (i, j),
                RTransition {
                    source: source.clone(),
                    target: e.target,
                    trigger: e.trigger,
                    resets: e.resets,
                    kind: e.kind,
                },
            );
        }
    }
    let alphabets = Alphabets::derive(transitions.values().map(|t| &t.trigger), outputs);
    Ok(RcsmAutomaton {
        name: name.to_string(),
        clocks,
        bounds,
        rstates,
        index,
        out,
        init: 0,
        transitions,
        alphabets,
    })
}

/// Progress edges of an ear with resets `resets` at region `r`: one to
/// `r[resets := 0]` and, if different from `r`, one to `succ(r)[resets := 0]`.
fn progress_edges(state: &StateId, r: &Region, trigger: Formula, resets: &ClockSet) -> Result<Vec<Edge>> {
    let now = r.reset(resets)?;
    let later = r.time_successor().reset(resets)?;
    let mut edges = vec![Edge {
        target: RState::new(state.clone(), now),
        trigger: trigger.clone(),
        resets: resets.clone(),
        kind: Kind::Progress,
    }];
    if later != *r {
        edges.push(Edge {
            target: RState::new(state.clone(), later),
            trigger,
            resets: resets.clone(),
            kind: Kind::Progress,
        });
    }
    Ok(edges)
}

impl RcsmAutomaton {
    /// Regionizes a timed machine, keeping only the reachable part.
    pub fn build(p: &TcsmAutomaton) -> Result<Self> {
        Self::build_with_budget(p, DEFAULT_REGION_BUDGET)
    }

    pub fn build_with_budget(p: &TcsmAutomaton, budget: usize) -> Result<Self> {
        let bounds = p.bounds().clone();
        let init = RState::new(p.init().clone(), Region::zero(bounds.clone()));
        explore(
            p.name(),
            p.clocks().to_vec(),
            bounds,
            p.alphabets().outputs.clone(),
            init,
            budget,
            |rs| {
                let s = p.idx(&rs.state)?;
                let mut edges = Vec::new();
                for t in p.outgoing_idx(s) {
                    if !rs.region.agrees(&t.guard)? {
                        continue;
                    }
                    if t.is_ear() {
                        edges.extend(progress_edges(
                            &rs.state,
                            &rs.region,
                            t.trigger.clone(),
                            &t.resets,
                        )?);
                    } else {
                        edges.push(Edge {
                            target: RState::new(t.target.clone(), rs.region.reset(&t.resets)?),
                            trigger: t.trigger.clone(),
                            resets: t.resets.clone(),
                            kind: Kind::Action,
                        });
                    }
                }
                Ok((p.out(&rs.state)?.clone(), edges))
            },
        )
    }

    /// Direct product of region automata.
    pub fn product(components: &[RcsmAutomaton]) -> Result<Self> {
        Self::product_with_budget(components, DEFAULT_REGION_BUDGET)
    }

    pub fn product_with_budget(components: &[RcsmAutomaton], budget: usize) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyProduct);
        }
        check_disjoint_outputs(components.iter().map(|c| (c.name.as_str(), &c.alphabets.outputs)))?;
        check_disjoint_clocks(components.iter().map(|c| (c.name.as_str(), c.clocks.as_slice())))?;
        let clocks: Vec<Clock> = components.iter().flat_map(|c| c.clocks.iter().cloned()).collect();
        let bounds = Arc::new(ClockBounds::union(components.iter().map(|c| &*c.bounds)));
        let outputs: SignalSet = components
            .iter()
            .flat_map(|c| c.alphabets.outputs.iter().cloned())
            .collect();
        let clock_sets: Vec<ClockSet> = components
            .iter()
            .map(|c| c.clocks.iter().cloned().collect())
            .collect();
        let init = RState::new(
            StateId::tuple(components.iter().map(|c| &c.init().state)),
            Region::zero(bounds.clone()),
        );
        let name = components
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join("_");
        explore(&name, clocks, bounds, outputs, init, budget, |rs| {
            let mut offset = 0;
            let mut signals = SignalSet::new();
            let mut choices: Vec<Vec<&RTransition>> = Vec::new();
            for (c, xs) in components.iter().zip(&clock_sets) {
                let arity = c.arity();
                let local = RState::new(rs.state.slice(offset, arity), rs.region.project(xs)?);
                offset += arity;
                match c.index.get(&local) {
                    Some(&i) => {
                        signals.extend(c.out[i].iter().cloned());
                        choices.push(c.outgoing_idx(i).collect());
                    }
                    None => choices.push(Vec::new()),
                }
            }
            let counts: Vec<usize> = choices.iter().map(Vec::len).collect();
            let mut edges = Vec::new();
            for pick in cartesian(&counts) {
                let h: Vec<&RTransition> = pick.iter().enumerate().map(|(k, &j)| choices[k][j]).collect();
                let trigger = Formula::conjunction(h.iter().map(|t| t.trigger.clone()));
                let resets: ClockSet = h.iter().flat_map(|t| t.resets.iter().cloned()).collect();
                if h.iter().all(|t| t.kind == Kind::Progress) {
                    edges.extend(progress_edges(&rs.state, &rs.region, trigger, &resets)?);
                } else {
                    let target = StateId::tuple(h.iter().map(|t| match t.kind {
                        Kind::Action => &t.target.state,
                        Kind::Progress => &t.source.state,
                    }));
                    edges.push(Edge {
                        target: RState::new(target, rs.region.reset(&resets)?),
                        trigger,
                        resets,
                        kind: Kind::Action,
                    });
                }
            }
            Ok((signals, edges))
        })
    }

    /// Assembles an automaton from explicit parts, checking the region
    /// transition law. Used when reading serialized automata.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: &str,
        clocks: Vec<Clock>,
        bounds: ClockBounds,
        outputs: SignalSet,
        rstates: Vec<(RState, SignalSet)>,
        init: &RState,
        transitions: Vec<RTransition>,
    ) -> Result<Self> {
        let declared: BTreeSet<&Clock> = clocks.iter().collect();
        if declared.len() != clocks.len() || declared.into_iter().ne(bounds.clocks().iter()) {
            return Err(Error::Malformed(format!(
                "clock list does not match bounds `{bounds}`"
            )));
        }
        let bounds = Arc::new(bounds);
        let mut index = HashMap::new();
        let mut ids = Vec::new();
        let mut out = Vec::new();
        for (rs, signals) in rstates {
            if *rs.region.bounds() != *bounds {
                return Err(Error::InvalidRegion(format!("`{rs}` uses foreign bounds")));
            }
            rs.region.validate()?;
            if let Some(s) = signals.iter().find(|s| !outputs.contains(*s)) {
                return Err(Error::OutSetNotInAlphabet(s.to_string()));
            }
            if index.insert(rs.clone(), ids.len()).is_some() {
                return Err(Error::Malformed(format!("duplicate region state `{rs}`")));
            }
            ids.push(rs);
            out.push(signals);
        }
        let lookup = |rs: &RState| {
            index
                .get(rs)
                .copied()
                .ok_or_else(|| Error::UnknownRState(rs.to_string()))
        };
        let init_idx = lookup(init)?;
        if init.region != Region::zero(bounds.clone()) {
            return Err(Error::Malformed(format!(
                "initial region state `{init}` is not at zero"
            )));
        }
        let arity = init.state.arity();
        let mut table = BTreeMap::new();
        for t in transitions {
            let key = (lookup(&t.source)?, lookup(&t.target)?);
            if t.source.state.arity() != arity || t.target.state.arity() != arity {
                return Err(Error::Malformed(format!(
                    "`{}` -> `{}` mixes tuple arities",
                    t.source, t.target
                )));
            }
            check_law(&t)?;
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
        let alphabets = Alphabets::derive(table.values().map(|t| &t.trigger), outputs);
        Ok(RcsmAutomaton {
            name: name.to_string(),
            clocks,
            bounds,
            rstates: ids,
            index,
            out,
            init: init_idx,
            transitions: table,
            alphabets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Clocks in declaration order.
    pub fn clocks(&self) -> &[Clock] {
        &self.clocks
    }

    pub fn bounds(&self) -> &Arc<ClockBounds> {
        &self.bounds
    }

    pub fn rstates(&self) -> &[RState] {
        &self.rstates
    }

    pub fn init(&self) -> &RState {
        &self.rstates[self.init]
    }

    /// Number of component states in every state tuple.
    pub fn arity(&self) -> usize {
        self.init().state.arity()
    }

    pub fn alphabets(&self) -> &Alphabets {
        &self.alphabets
    }

    pub fn contains(&self, rs: &RState) -> bool {
        self.index.contains_key(rs)
    }

    fn idx(&self, rs: &RState) -> Result<usize> {
        self.index
            .get(rs)
            .copied()
            .ok_or_else(|| Error::UnknownRState(rs.to_string()))
    }

    /// Index of a region state in `rstates()`.
    pub fn position(&self, rs: &RState) -> Result<usize> {
        self.idx(rs)
    }

    pub fn out(&self, rs: &RState) -> Result<&SignalSet> {
        Ok(&self.out[self.idx(rs)?])
    }

    /// All transitions in (source, target) index order.
    pub fn transitions(&self) -> impl Iterator<Item = &RTransition> {
        self.transitions.values()
    }

    pub fn transition(&self, from: &RState, to: &RState) -> Result<Option<&RTransition>> {
        Ok(self.transitions.get(&(self.idx(from)?, self.idx(to)?)))
    }

    fn outgoing_idx(&self, i: usize) -> impl Iterator<Item = &RTransition> {
        self.transitions.range((i, 0)..(i + 1, 0)).map(|(_, t)| t)
    }

    pub fn outgoing(&self, rs: &RState) -> Result<impl Iterator<Item = &RTransition>> {
        Ok(self.outgoing_idx(self.idx(rs)?))
    }

    /// Region states whose transition trigger can fire together with the
    /// source's own outputs.
    pub fn region_successors(&self, rs: &RState) -> Result<Vec<RState>> {
        let i = self.idx(rs)?;
        let alpha = Formula::output_formula(&self.out[i], &self.alphabets.outputs)?;
        let mut next = Vec::new();
        for t in self.outgoing_idx(i) {
            if !Formula::and(t.trigger.clone(), alpha.clone()).is_unsatisfiable()? {
                next.push(t.target.clone());
            }
        }
        Ok(next)
    }

    /// Breadth-first search from the initial region state; returns the
    /// transitions of a shortest path to the first region state satisfying
    /// `goal`, and the number of region states visited.
    pub fn shortest_path(&self, goal: impl Fn(&RState) -> bool) -> (Option<Vec<&RTransition>>, usize) {
        let mut parent: HashMap<usize, Option<(usize, usize)>> = HashMap::from([(self.init, None)]);
        let mut queue = VecDeque::from([self.init]);
        while let Some(i) = queue.pop_front() {
            if goal(&self.rstates[i]) {
                let mut path = Vec::new();
                let mut at = i;
                while let Some((from, to)) = parent[&at] {
                    path.push(&self.transitions[&(from, to)]);
                    at = from;
                }
                path.reverse();
                return (Some(path), parent.len());
            }
            for (&(_, j), _) in self.transitions.range((i, 0)..(i + 1, 0)) {
                if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(j) {
                    slot.insert(Some((i, j)));
                    queue.push_back(j);
                }
            }
        }
        (None, parent.len())
    }

    /// Terminal strongly connected components without progress transitions.
    /// A region state with no outgoing transitions counts as one.
    pub fn zero_time_traps(&self) -> Vec<Vec<RState>> {
        let mut graph = DiGraph::<(), Kind>::with_capacity(self.rstates.len(), self.transitions.len());
        let nodes: Vec<_> = self.rstates.iter().map(|_| graph.add_node(())).collect();
        for (&(i, j), t) in &self.transitions {
            graph.add_edge(nodes[i], nodes[j], t.kind);
        }
        let mut traps = Vec::new();
        for scc in tarjan_scc(&graph) {
            let members: BTreeSet<usize> = scc.iter().map(|n| n.index()).collect();
            let mut terminal = true;
            let mut timed = false;
            for &i in &members {
                for (&(_, j), t) in self.transitions.range((i, 0)..(i + 1, 0)) {
                    if !members.contains(&j) {
                        terminal = false;
                    } else if t.kind == Kind::Progress {
                        timed = true;
                    }
                }
            }
            if terminal && !timed {
                traps.push(members.into_iter().map(|i| self.rstates[i].clone()).collect());
            }
        }
        traps.sort();
        traps
    }

    /// Renames machine states. Fails if two region states collide.
    pub fn relabel(&self, rename: impl Fn(&StateId) -> StateId) -> Result<Self> {
        let map = |rs: &RState| RState::new(rename(&rs.state), rs.region.clone());
        let rstates = self
            .rstates
            .iter()
            .zip(&self.out)
            .map(|(rs, o)| (map(rs), o.clone()))
            .collect();
        let transitions = self
            .transitions
            .values()
            .map(|t| RTransition {
                source: map(&t.source),
                target: map(&t.target),
                ..t.clone()
            })
            .collect();
        RcsmAutomaton::from_parts(
            &self.name,
            self.clocks.clone(),
            (*self.bounds).clone(),
            self.alphabets.outputs.clone(),
            rstates,
            &map(self.init()),
            transitions,
        )
    }

    /// Graph equality under the key (state tuple, region descriptor), with
    /// triggers compared semantically.
    pub fn canonical_compare(&self, other: &RcsmAutomaton) -> Result<bool> {
        let mine: BTreeSet<&Clock> = self.clocks.iter().collect();
        let theirs: BTreeSet<&Clock> = other.clocks.iter().collect();
        if mine != theirs {
            return Err(Error::IncomparableAlphabets(format!(
                "clocks {:?} versus {:?}",
                self.clocks, other.clocks
            )));
        }
        if self.arity() != other.arity() {
            return Err(Error::IncomparableAlphabets(format!(
                "state tuples of arity {} versus {}",
                self.arity(),
                other.arity()
            )));
        }
        if self.alphabets.outputs != other.alphabets.outputs {
            return Err(Error::IncomparableAlphabets(format!(
                "outputs {:?} versus {:?}",
                self.alphabets.outputs, other.alphabets.outputs
            )));
        }
        if self.bounds != other.bounds || self.init().sort_key() != other.init().sort_key() {
            return Ok(false);
        }
        let states = |a: &RcsmAutomaton| -> BTreeMap<(StateId, String), SignalSet> {
            a.rstates
                .iter()
                .zip(&a.out)
                .map(|(rs, o)| (rs.sort_key(), o.clone()))
                .collect()
        };
        if states(self) != states(other) {
            return Ok(false);
        }
        type Key = ((StateId, String), (StateId, String));
        let edges = |a: &RcsmAutomaton| -> BTreeMap<Key, RTransition> {
            a.transitions
                .values()
                .map(|t| ((t.source.sort_key(), t.target.sort_key()), t.clone()))
                .collect()
        };
        let (mine, theirs) = (edges(self), edges(other));
        if mine.len() != theirs.len() {
            return Ok(false);
        }
        for (key, t) in &mine {
            let Some(u) = theirs.get(key) else {
                return Ok(false);
            };
            if t.kind != u.kind || t.resets != u.resets || !t.trigger.equivalent(&u.trigger)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks that every transition obeys the region transition law.
    pub fn check_law(&self) -> Result<()> {
        self.transitions.values().try_for_each(check_law)
    }
}

fn check_law(t: &RTransition) -> Result<()> {
    let r = &t.source.region;
    let now = r.reset(&t.resets)?;
    let ok = match t.kind {
        Kind::Action => t.source.state != t.target.state && t.target.region == now,
        Kind::Progress => {
            t.source.state == t.target.state
                && (t.target.region == now || t.target.region == r.time_successor().reset(&t.resets)?)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "{} transition `{}` -> `{}` breaks the region transition law",
            t.kind, t.source, t.target
        )))
    }
}

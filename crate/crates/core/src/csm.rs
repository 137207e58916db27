//! Untimed concurrent state machines.
//!
//! Components of a CSM system run in lock step: a product transition fires the
//! transitions of all components at once, triggered by the conjunction of their
//! formulas. States generate signals; a transition is only a real successor if
//! its formula is consistent with the output formula of the source state.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::formula::{Formula, SignalSet};
use crate::state::StateId;

static VOID: Formula = Formula::False;

/// The four alphabets derived from an automaton.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabets {
    pub inputs: SignalSet,
    pub outputs: SignalSet,
    pub external: SignalSet,
    pub all: SignalSet,
}

impl Alphabets {
    pub(crate) fn derive<'a>(formulas: impl IntoIterator<Item = &'a Formula>, outputs: SignalSet) -> Self {
        let mut inputs = SignalSet::new();
        for f in formulas {
            inputs.extend(f.signals());
        }
        let external = inputs.difference(&outputs).cloned().collect();
        let all = inputs.union(&outputs).cloned().collect();
        Alphabets {
            inputs,
            outputs,
            external,
            all,
        }
    }
}

/// Checks that output alphabets are pairwise disjoint.
pub(crate) fn check_disjoint_outputs<'a>(
    parts: impl IntoIterator<Item = (&'a str, &'a SignalSet)>,
) -> Result<()> {
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for (name, outputs) in parts {
        for s in outputs {
            if let Some(first) = owner.insert(s.name(), name) {
                return Err(Error::OverlappingOutputs {
                    signal: s.name().to_string(),
                    first: first.to_string(),
                    second: name.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Odometer over component indices, first component most significant.
pub(crate) fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut acc = vec![Vec::new()];
    for &n in sizes {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsmAutomaton {
    name: String,
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    out: Vec<SignalSet>,
    init: usize,
    // Void pairs are absent.
    form: BTreeMap<(usize, usize), Formula>,
    alphabets: Alphabets,
}

/// A state whose outgoing formulas do not cover every input combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessViolation {
    pub state: StateId,
    /// Signals present in a step on which no transition is enabled.
    pub witness: SignalSet,
}

impl CsmAutomaton {
    /// Builds an automaton. `states` are kept in the given order; pairs
    /// without a transition are void.
    pub fn new(
        name: &str,
        states: Vec<(StateId, SignalSet)>,
        init: &StateId,
        transitions: Vec<(StateId, StateId, Formula)>,
    ) -> Result<Self> {
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
        let mut form = BTreeMap::new();
        for (src, dst, f) in transitions {
            let key = (lookup(&src)?, lookup(&dst)?);
            if form.contains_key(&key) {
                return Err(Error::Malformed(format!(
                    "duplicate transition `{src}` -> `{dst}`"
                )));
            }
            if !f.is_false() {
                form.insert(key, f);
            }
        }
        let outputs = out.iter().flatten().cloned().collect();
        let alphabets = Alphabets::derive(form.values(), outputs);
        Ok(CsmAutomaton {
            name: name.to_string(),
            states: ids,
            index,
            out,
            init,
            form,
            alphabets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
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

    fn idx(&self, s: &StateId) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownState(s.to_string()))
    }

    pub fn out(&self, s: &StateId) -> Result<&SignalSet> {
        Ok(&self.out[self.idx(s)?])
    }

    /// The transition formula of a pair; `0` for void pairs.
    pub fn form(&self, s: &StateId, t: &StateId) -> Result<&Formula> {
        let key = (self.idx(s)?, self.idx(t)?);
        Ok(self.form.get(&key).unwrap_or(&VOID))
    }

    /// Non-void transitions sorted by (source, target) declaration index.
    pub fn transitions(&self) -> impl Iterator<Item = (&StateId, &StateId, &Formula)> {
        self.form
            .iter()
            .map(|(&(s, t), f)| (&self.states[s], &self.states[t], f))
    }

    fn outgoing(&self, s: usize) -> impl Iterator<Item = (usize, &Formula)> {
        self.form.range((s, 0)..(s + 1, 0)).map(|(&(_, t), f)| (t, f))
    }

    /// The output formula of `s` over this automaton's output alphabet.
    pub fn output_formula(&self, s: &StateId) -> Result<Formula> {
        Formula::output_formula(self.out(s)?, &self.alphabets.outputs)
    }

    /// States whose outgoing formulas do not sum to a tautology.
    pub fn check_complete(&self) -> Result<Vec<CompletenessViolation>> {
        let mut violations = Vec::new();
        for (i, state) in self.states.iter().enumerate() {
            let cover = Formula::disjunction(self.outgoing(i).map(|(_, f)| f.clone()));
            if let Some(witness) = cover.find_assignment(false, crate::formula::DEFAULT_ATOM_CAP)? {
                violations.push(CompletenessViolation {
                    state: state.clone(),
                    witness,
                });
            }
        }
        Ok(violations)
    }

    /// The successor relation `r`: targets whose formula is consistent with
    /// the output formula of `s`. Returned in declaration order.
    pub fn successors(&self, s: &StateId) -> Result<Vec<StateId>> {
        let i = self.idx(s)?;
        let alpha = self.output_formula(s)?;
        let mut next = Vec::new();
        for (t, f) in self.outgoing(i) {
            if !Formula::and(f.clone(), alpha.clone()).is_unsatisfiable()? {
                next.push(self.states[t].clone());
            }
        }
        Ok(next)
    }

    /// Coincidence product. Keeps the full Cartesian state set; pruning to the
    /// reachable part is [`CsmAutomaton::reachability_graph`]'s job.
    pub fn product(components: &[CsmAutomaton]) -> Result<CsmAutomaton> {
        if components.is_empty() {
            return Err(Error::EmptyProduct);
        }
        check_disjoint_outputs(components.iter().map(|c| (c.name.as_str(), &c.alphabets.outputs)))?;
        let sizes: Vec<usize> = components.iter().map(|c| c.states.len()).collect();
        let tuples = cartesian(&sizes);
        let mut states = Vec::with_capacity(tuples.len());
        let mut ids = HashMap::with_capacity(tuples.len());
        for tuple in &tuples {
            let id = StateId::tuple(tuple.iter().zip(components).map(|(&i, c)| &c.states[i]));
            let out = tuple
                .iter()
                .zip(components)
                .flat_map(|(&i, c)| c.out[i].iter().cloned())
                .collect();
            ids.insert(tuple.clone(), id.clone());
            states.push((id, out));
        }
        let mut transitions = Vec::new();
        for tuple in &tuples {
            let choices: Vec<Vec<(usize, &Formula)>> = tuple
                .iter()
                .zip(components)
                .map(|(&i, c)| c.outgoing(i).collect())
                .collect();
            let counts: Vec<usize> = choices.iter().map(Vec::len).collect();
            for pick in cartesian(&counts) {
                let target: Vec<usize> = pick.iter().enumerate().map(|(k, &j)| choices[k][j].0).collect();
                let f = Formula::conjunction(pick.iter().enumerate().map(|(k, &j)| choices[k][j].1.clone()));
                transitions.push((ids[tuple].clone(), ids[&target].clone(), f));
            }
        }
        let init_tuple: Vec<usize> = components.iter().map(|c| c.init).collect();
        let name = components
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join("_");
        CsmAutomaton::new(&name, states, &ids[&init_tuple], transitions)
    }

    /// Restriction to states reachable from the initial state over the
    /// successor relation, with formulas reduced by the source state's outputs.
    pub fn reachability_graph(&self) -> Result<ReachabilityGraph> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.init]);
        seen[self.init] = true;
        let mut kept = Vec::new();
        while let Some(i) = queue.pop_front() {
            let alpha = Formula::output_formula(&self.out[i], &self.alphabets.outputs)?;
            for (t, f) in self.outgoing(i) {
                if Formula::and(f.clone(), alpha.clone()).is_unsatisfiable()? {
                    continue;
                }
                let reduced = f.reduce(&self.out[i], &self.alphabets.outputs);
                kept.push((i, t, reduced));
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let states = (0..self.states.len())
            .filter(|&i| seen[i])
            .map(|i| (self.states[i].clone(), self.out[i].clone()))
            .collect();
        let transitions = kept
            .into_iter()
            .map(|(s, t, f)| (self.states[s].clone(), self.states[t].clone(), f))
            .collect();
        Ok(ReachabilityGraph(CsmAutomaton::new(
            &self.name,
            states,
            self.init(),
            transitions,
        )?))
    }
}

/// A CSM restricted to its reachable part, with reduced formulas and no
/// void or non-successor transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityGraph(CsmAutomaton);

impl ReachabilityGraph {
    pub fn automaton(&self) -> &CsmAutomaton {
        &self.0
    }

    pub fn into_automaton(self) -> CsmAutomaton {
        self.0
    }
}

impl std::ops::Deref for ReachabilityGraph {
    type Target = CsmAutomaton;

    fn deref(&self) -> &CsmAutomaton {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::signals;
    use crate::state::sid;

    fn f(text: &str) -> Formula {
        text.parse().unwrap()
    }

    fn worked_example() -> CsmAutomaton {
        CsmAutomaton::new(
            "p",
            vec![
                (sid("s"), signals(["a", "b"])),
                (sid("s1"), signals(["c"])),
                (sid("s2"), SignalSet::new()),
            ],
            &sid("s"),
            vec![
                (sid("s"), sid("s1"), f("a*b")),
                (sid("s"), sid("s2"), f("-a + -b")),
                (sid("s1"), sid("s1"), Formula::True),
                (sid("s2"), sid("s2"), Formula::True),
            ],
        )
        .unwrap()
    }

    #[test]
    fn successor_relation_worked_example() {
        let p = worked_example();
        assert_eq!(p.alphabets().outputs, signals(["a", "b", "c"]));
        assert_eq!(p.successors(&sid("s")).unwrap(), vec![sid("s1")]);
    }

    #[test]
    fn output_signal_not_generated_blocks_transition() {
        let p = CsmAutomaton::new(
            "p",
            vec![(sid("s"), SignalSet::new()), (sid("t"), signals(["c"]))],
            &sid("s"),
            vec![
                (sid("s"), sid("t"), f("c")),
                (sid("s"), sid("s"), Formula::True),
                (sid("t"), sid("t"), Formula::True),
            ],
        )
        .unwrap();
        assert_eq!(p.successors(&sid("s")).unwrap(), vec![sid("s")]);
        assert!(matches!(p.successors(&sid("nope")), Err(Error::UnknownState(_))));
    }

    #[test]
    fn completeness() {
        let loop1 = CsmAutomaton::new(
            "p",
            vec![(sid("s"), SignalSet::new())],
            &sid("s"),
            vec![(sid("s"), sid("s"), Formula::True)],
        )
        .unwrap();
        assert!(loop1.check_complete().unwrap().is_empty());

        let states = vec![
            (sid("s"), SignalSet::new()),
            (sid("t"), SignalSet::new()),
            (sid("u"), SignalSet::new()),
        ];
        let loops = || {
            vec![
                (sid("t"), sid("t"), Formula::True),
                (sid("u"), sid("u"), Formula::True),
            ]
        };
        let mut tr = loops();
        tr.push((sid("s"), sid("t"), f("a")));
        let partial = CsmAutomaton::new("p", states.clone(), &sid("s"), tr).unwrap();
        let v = partial.check_complete().unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].state, sid("s"));
        assert_eq!(v[0].witness, SignalSet::new());

        let mut tr = loops();
        tr.push((sid("s"), sid("t"), f("a")));
        tr.push((sid("s"), sid("u"), f("-a")));
        let full = CsmAutomaton::new("p", states, &sid("s"), tr).unwrap();
        assert!(full.check_complete().unwrap().is_empty());
    }

    #[test]
    fn duplicate_pairs_and_states_are_rejected() {
        let err = CsmAutomaton::new(
            "p",
            vec![(sid("s"), SignalSet::new())],
            &sid("s"),
            vec![(sid("s"), sid("s"), f("a")), (sid("s"), sid("s"), f("-a"))],
        );
        assert!(matches!(err, Err(Error::Malformed(_))));
        let err = CsmAutomaton::new(
            "p",
            vec![(sid("s"), SignalSet::new()), (sid("s"), SignalSet::new())],
            &sid("s"),
            vec![],
        );
        assert!(matches!(err, Err(Error::Malformed(_))));
    }

    #[test]
    fn reachability_graph_prunes() {
        let chain = CsmAutomaton::new(
            "chain",
            vec![
                (sid("s0"), SignalSet::new()),
                (sid("s1"), SignalSet::new()),
                (sid("s2"), SignalSet::new()),
                (sid("s3"), SignalSet::new()),
            ],
            &sid("s0"),
            vec![
                (sid("s0"), sid("s1"), Formula::True),
                (sid("s1"), sid("s2"), Formula::True),
                (sid("s2"), sid("s2"), Formula::True),
                (sid("s3"), sid("s0"), Formula::True),
            ],
        )
        .unwrap();
        let rg = chain.reachability_graph().unwrap();
        assert_eq!(rg.states(), &[sid("s0"), sid("s1"), sid("s2")]);

        let rg = worked_example().reachability_graph().unwrap();
        assert_eq!(rg.states(), &[sid("s"), sid("s1")]);
        assert!(!rg.contains(&sid("s2")));
    }

    #[test]
    fn reduction_in_reachability_graph() {
        let p = CsmAutomaton::new(
            "p",
            vec![(sid("s"), signals(["a", "b"])), (sid("t"), SignalSet::new())],
            &sid("s"),
            vec![
                (sid("s"), sid("t"), f("a*b")),
                (sid("t"), sid("t"), Formula::True),
            ],
        )
        .unwrap();
        let rg = p.reachability_graph().unwrap();
        assert_eq!(rg.form(&sid("s"), &sid("t")).unwrap(), &Formula::True);
    }

    #[test]
    fn product_shape() {
        let a = CsmAutomaton::new(
            "A",
            vec![(sid("a0"), signals(["x"])), (sid("a1"), SignalSet::new())],
            &sid("a0"),
            vec![
                (sid("a0"), sid("a1"), f("y")),
                (sid("a0"), sid("a0"), f("-y")),
                (sid("a1"), sid("a1"), Formula::True),
            ],
        )
        .unwrap();
        let b = CsmAutomaton::new(
            "B",
            vec![(sid("b0"), signals(["y"])), (sid("b1"), SignalSet::new())],
            &sid("b0"),
            vec![
                (sid("b0"), sid("b1"), f("x")),
                (sid("b0"), sid("b0"), f("-x")),
                (sid("b1"), sid("b1"), Formula::True),
            ],
        )
        .unwrap();
        let p = CsmAutomaton::product(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(p.states().len(), 4);
        assert_eq!(p.states()[1], sid("(a0,b1)"));
        assert_eq!(p.form(&sid("(a0,b0)"), &sid("(a1,b1)")).unwrap(), &f("y*x"));
        // x is produced by A and consumed by B, so it is not external.
        assert_eq!(p.alphabets().inputs, signals(["x", "y"]));
        assert!(p.alphabets().external.is_empty());

        let clash = CsmAutomaton::new(
            "C",
            vec![(sid("c0"), signals(["x"]))],
            &sid("c0"),
            vec![(sid("c0"), sid("c0"), Formula::True)],
        )
        .unwrap();
        match CsmAutomaton::product(&[a, clash]) {
            Err(Error::OverlappingOutputs {
                signal,
                first,
                second,
            }) => {
                assert_eq!(
                    (signal.as_str(), first.as_str(), second.as_str()),
                    ("x", "A", "C")
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

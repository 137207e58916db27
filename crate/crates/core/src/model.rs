//! Line-oriented text format for timed and region automata.
//!
//! ```text
//! # comment
//! automaton TRAIN
//!   clocks x
//!   state s0 init
//!   state s1 outputs app
//!   trans s0 -> s1 when 1 reset x
//!   trans s1 -> s1 when 1 guard x <= 5
//! end
//! ```
//!
//! Region automata use the same blocks with `STATE@descriptor` names, a
//! `bounds` line and an `alphabet` line listing the output alphabet.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::clock::{Clock, ClockBounds, ClockConstraint, ClockSet, Region};
use crate::csm::CsmAutomaton;
use crate::error::{Error, Result};
use crate::formula::{Formula, Signal, SignalSet};
use crate::rcsm::{Kind, RState, RTransition, RcsmAutomaton};
use crate::state::StateId;
use crate::tcsm::{TcsmAutomaton, TimedTransition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Timed(TcsmAutomaton),
    Region(RcsmAutomaton),
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::Timed(a) => a.name(),
            Model::Region(a) => a.name(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelFile {
    pub automata: Vec<Model>,
}

impl ModelFile {
    /// The timed automata of the file; fails on region automata.
    pub fn timed(&self) -> Result<Vec<TcsmAutomaton>> {
        self.automata
            .iter()
            .map(|m| match m {
                Model::Timed(a) => Ok(a.clone()),
                Model::Region(a) => Err(Error::Malformed(format!(
                    "`{}` is a region automaton where a timed one is expected",
                    a.name()
                ))),
            })
            .collect()
    }

    /// The region automata of the file, regionizing timed ones.
    pub fn regions(&self) -> Result<Vec<RcsmAutomaton>> {
        self.automata
            .iter()
            .map(|m| match m {
                Model::Timed(a) => RcsmAutomaton::build(a),
                Model::Region(a) => Ok(a.clone()),
            })
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Model> {
        self.automata.iter().find(|m| m.name() == name)
    }

    pub fn to_text(&self) -> String {
        let blocks: Vec<String> = self
            .automata
            .iter()
            .map(|m| match m {
                Model::Timed(a) => serialize_tcsm(a),
                Model::Region(a) => serialize_rcsm(a),
            })
            .collect();
        blocks.join("\n")
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Tokens of one line, with comments dropped and region names glued back
/// to their descriptor fields.
fn tokens(line: &str) -> Vec<String> {
    let code = line.split('#').next().unwrap_or("");
    let mut raw = code.split_whitespace();
    let mut out = Vec::new();
    while let Some(t) = raw.next() {
        if t.contains("@ints=") {
            let mut glued = t.to_string();
            for _ in 0..3 {
                if let Some(next) = raw.next() {
                    glued.push(' ');
                    glued.push_str(next);
                }
            }
            out.push(glued);
        } else {
            out.push(t.to_string());
        }
    }
    out
}

struct StateLine {
    line: usize,
    name: String,
    init: bool,
    outputs: SignalSet,
}

struct TransLine {
    line: usize,
    source: String,
    target: String,
    trigger: Formula,
    guard: ClockConstraint,
    resets: ClockSet,
}

#[derive(Default)]
struct Block {
    name: String,
    line: usize,
    clocks: Option<(usize, Vec<Clock>)>,
    bounds: Option<(usize, ClockBounds)>,
    alphabet: Option<(usize, SignalSet)>,
    states: Vec<StateLine>,
    transitions: Vec<TransLine>,
}

fn parse_signal(line: usize, name: &str) -> Result<Signal> {
    Signal::new(name).map_err(|_| err(line, format!("invalid signal name `{name}`")))
}

fn parse_clock(line: usize, name: &str) -> Result<Clock> {
    Clock::new(name).map_err(|_| err(line, format!("invalid clock name `{name}`")))
}

fn parse_state_line(line: usize, rest: &[String]) -> Result<StateLine> {
    let (name, rest) = rest
        .split_first()
        .ok_or_else(|| err(line, "expected a state name"))?;
    let mut init = false;
    let mut outputs = SignalSet::new();
    let mut i = 0;
    if rest.first().map(String::as_str) == Some("init") {
        init = true;
        i = 1;
    }
    if i < rest.len() {
        if rest[i] != "outputs" {
            return Err(err(line, format!("unexpected `{}` in state line", rest[i])));
        }
        for s in &rest[i + 1..] {
            if !outputs.insert(parse_signal(line, s)?) {
                return Err(err(line, format!("signal `{s}` listed twice")));
            }
        }
    }
    Ok(StateLine {
        line,
        name: name.clone(),
        init,
        outputs,
    })
}

fn parse_trans_line(line: usize, rest: &[String]) -> Result<TransLine> {
    let [source, arrow, target, when, tail @ ..] = rest else {
        return Err(err(line, "expected `trans SRC -> DST when FORMULA`"));
    };
    if arrow != "->" || when != "when" {
        return Err(err(line, "expected `trans SRC -> DST when FORMULA`"));
    }
    let guard_at = tail.iter().position(|t| t == "guard");
    let reset_at = tail.iter().position(|t| t == "reset");
    if let (Some(g), Some(r)) = (guard_at, reset_at) {
        if r < g {
            return Err(err(line, "`guard` must precede `reset`"));
        }
    }
    let formula_end = guard_at.or(reset_at).unwrap_or(tail.len());
    let formula_text = tail[..formula_end].join(" ");
    if formula_text.is_empty() {
        return Err(err(line, "missing trigger formula"));
    }
    let trigger: Formula = formula_text
        .parse()
        .map_err(|e| err(line, format!("in formula: {e}")))?;
    let guard = match guard_at {
        Some(g) => {
            let text = tail[g + 1..reset_at.unwrap_or(tail.len())].join(" ");
            text.parse().map_err(|e| err(line, format!("in guard: {e}")))?
        }
        None => ClockConstraint::unconstrained(),
    };
    let mut resets = ClockSet::new();
    if let Some(r) = reset_at {
        for c in &tail[r + 1..] {
            resets.insert(parse_clock(line, c)?);
        }
    }
    Ok(TransLine {
        line,
        source: source.clone(),
        target: target.clone(),
        trigger,
        guard,
        resets,
    })
}

fn parse_bounds(line: usize, rest: &[String]) -> Result<ClockBounds> {
    let mut pairs = Vec::new();
    for t in rest {
        let (c, n) = t
            .split_once(':')
            .ok_or_else(|| err(line, format!("expected `clock:bound`, found `{t}`")))?;
        let n: u32 = n
            .parse()
            .map_err(|_| err(line, format!("bound `{n}` is not a natural number")))?;
        pairs.push((parse_clock(line, c)?, n));
    }
    Ok(ClockBounds::new(pairs))
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<ModelFile> {
    let mut file = ModelFile::default();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut current: Option<Block> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokens(raw);
        let Some((head, rest)) = toks.split_first() else {
            continue;
        };
        match (head.as_str(), current.as_mut()) {
            ("automaton", None) => {
                let [name] = rest else {
                    return Err(err(line, "expected `automaton NAME`"));
                };
                if let Some(first) = names.insert(name.clone(), line) {
                    return Err(err(
                        line,
                        format!("automaton `{name}` already declared on line {first}"),
                    ));
                }
                current = Some(Block {
                    name: name.clone(),
                    line,
                    ..Block::default()
                });
            }
            ("automaton", Some(b)) => {
                return Err(err(line, format!("automaton `{}` is missing `end`", b.name)));
            }
            ("end", Some(_)) => {
                if !rest.is_empty() {
                    return Err(err(line, "unexpected text after `end`"));
                }
                let block = current.take().expect("inside a block");
                file.automata.push(finish(block)?);
            }
            (_, None) => {
                return Err(err(line, format!("`{head}` outside an automaton block")));
            }
            ("clocks", Some(b)) => {
                if b.clocks.is_some() {
                    return Err(err(line, "`clocks` declared twice"));
                }
                let clocks = rest
                    .iter()
                    .map(|c| parse_clock(line, c))
                    .collect::<Result<Vec<_>>>()?;
                b.clocks = Some((line, clocks));
            }
            ("bounds", Some(b)) => {
                if b.bounds.is_some() {
                    return Err(err(line, "`bounds` declared twice"));
                }
                b.bounds = Some((line, parse_bounds(line, rest)?));
            }
            ("alphabet", Some(b)) => {
                if b.alphabet.is_some() {
                    return Err(err(line, "`alphabet` declared twice"));
                }
                let signals = rest
                    .iter()
                    .map(|s| parse_signal(line, s))
                    .collect::<Result<SignalSet>>()?;
                b.alphabet = Some((line, signals));
            }
            ("state", Some(b)) => b.states.push(parse_state_line(line, rest)?),
            ("trans", Some(b)) => b.transitions.push(parse_trans_line(line, rest)?),
            (other, Some(_)) => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some(b) = current {
        return Err(err(b.line, format!("automaton `{}` is missing `end`", b.name)));
    }
    Ok(file)
}

/// Checks the parts shared by both kinds of block and returns the index of
/// the initial state line.
fn check_block(b: &Block) -> Result<usize> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut init = None;
    for s in &b.states {
        if let Some(first) = seen.insert(&s.name, s.line) {
            return Err(err(
                s.line,
                format!("duplicate state `{}` (first declared on line {first})", s.name),
            ));
        }
        if s.init {
            if let Some(i) = init {
                let other: &StateLine = &b.states[i];
                return Err(err(
                    s.line,
                    format!("second initial state (first on line {})", other.line),
                ));
            }
            init = Some(seen.len() - 1);
        }
    }
    let init = init.ok_or_else(|| err(b.line, format!("automaton `{}` has no initial state", b.name)))?;
    let declared: BTreeSet<&Clock> = b.clocks.iter().flat_map(|(_, c)| c).collect();
    let mut pairs: HashMap<(&str, &str), usize> = HashMap::new();
    for t in &b.transitions {
        for end in [&t.source, &t.target] {
            if !seen.contains_key(end.as_str()) {
                return Err(err(t.line, format!("unknown state `{end}`")));
            }
        }
        if let Some(c) = t
            .guard
            .clocks()
            .iter()
            .chain(&t.resets)
            .find(|c| !declared.contains(c))
        {
            return Err(err(t.line, format!("unknown clock `{c}`")));
        }
        if let Some(first) = pairs.insert((&t.source, &t.target), t.line) {
            return Err(err(
                t.line,
                format!(
                    "duplicate transition `{}` -> `{}` (first declared on line {first})",
                    t.source, t.target
                ),
            ));
        }
    }
    Ok(init)
}

fn finish(b: Block) -> Result<Model> {
    let init = check_block(&b)?;
    let regional = b.states.iter().any(|s| s.name.contains('@'));
    let at = |line: usize| move |e: Error| err(line, e.to_string());
    let clocks = b.clocks.as_ref().map(|(_, c)| c.clone()).unwrap_or_default();
    if !regional {
        if let Some((line, _)) = b.alphabet {
            return Err(err(line, "`alphabet` is only allowed for region automata"));
        }
        let states = b
            .states
            .iter()
            .map(|s| Ok((s.name.parse::<StateId>().map_err(at(s.line))?, s.outputs.clone())))
            .collect::<Result<Vec<_>>>()?;
        let transitions = b
            .transitions
            .iter()
            .map(|t| {
                Ok(TimedTransition {
                    source: t.source.parse().map_err(at(t.line))?,
                    target: t.target.parse().map_err(at(t.line))?,
                    trigger: t.trigger.clone(),
                    guard: t.guard.clone(),
                    resets: t.resets.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let init = states[init].0.clone();
        let mut a = TcsmAutomaton::new(&b.name, clocks, states, &init, transitions).map_err(at(b.line))?;
        if let Some((line, bounds)) = b.bounds {
            a = a.with_bounds(bounds).map_err(at(line))?;
        }
        return Ok(Model::Timed(a));
    }

    let bounds = match b.bounds {
        Some((_, bounds)) => bounds,
        None if clocks.is_empty() => ClockBounds::default(),
        None => return Err(err(b.line, "region automaton with clocks needs a `bounds` line")),
    };
    let shared = std::sync::Arc::new(bounds.clone());
    let rstate = |line: usize, name: &str| -> Result<RState> {
        let (state, descriptor) = name
            .split_once('@')
            .ok_or_else(|| err(line, format!("region state `{name}` lacks `@descriptor`")))?;
        let state: StateId = state.parse().map_err(at(line))?;
        let region = Region::parse_descriptor(descriptor, shared.clone()).map_err(at(line))?;
        Ok(RState::new(state, region))
    };
    let rstates = b
        .states
        .iter()
        .map(|s| Ok((rstate(s.line, &s.name)?, s.outputs.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut transitions = Vec::new();
    for t in &b.transitions {
        if !t.guard.is_unconstrained() {
            return Err(err(t.line, "region transitions carry no guard"));
        }
        let source = rstate(t.line, &t.source)?;
        let target = rstate(t.line, &t.target)?;
        let kind = if source.state == target.state {
            Kind::Progress
        } else {
            Kind::Action
        };
        transitions.push(RTransition {
            source,
            target,
            trigger: t.trigger.clone(),
            resets: t.resets.clone(),
            kind,
        });
    }
    let outputs = match b.alphabet {
        Some((_, a)) => a,
        None => rstates.iter().flat_map(|(_, o)| o.iter().cloned()).collect(),
    };
    let init = rstates[init].0.clone();
    let a = RcsmAutomaton::from_parts(&b.name, clocks, bounds, outputs, rstates, &init, transitions)
        .map_err(at(b.line))?;
    Ok(Model::Region(a))
}

fn write_list<'a>(out: &mut String, keyword: &str, items: impl IntoIterator<Item = &'a str>) {
    let items: Vec<&str> = items.into_iter().collect();
    if !items.is_empty() {
        let _ = write!(out, " {keyword} {}", items.join(" "));
    }
}

fn write_state(out: &mut String, name: &str, init: bool, outputs: &SignalSet) {
    let _ = write!(out, "  state {name}");
    if init {
        out.push_str(" init");
    }
    write_list(out, "outputs", outputs.iter().map(|s| s.name()));
    out.push('\n');
}

pub fn serialize_tcsm(a: &TcsmAutomaton) -> String {
    let mut out = format!("automaton {}\n", a.name());
    if !a.clocks().is_empty() {
        let names: Vec<&str> = a.clocks().iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "  clocks {}", names.join(" "));
    }
    if !a.has_derived_bounds() {
        let _ = writeln!(out, "  bounds {}", a.bounds());
    }
    for s in a.states() {
        write_state(
            &mut out,
            &s.to_string(),
            s == a.init(),
            a.out(s).expect("own state"),
        );
    }
    for t in a.transitions() {
        let _ = write!(out, "  trans {} -> {} when {}", t.source, t.target, t.trigger);
        if !t.guard.is_unconstrained() {
            let _ = write!(out, " guard {}", t.guard);
        }
        write_list(&mut out, "reset", t.resets.iter().map(|c| c.name()));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn serialize_csm(a: &CsmAutomaton) -> String {
    serialize_tcsm(&TcsmAutomaton::from_csm(a))
}

pub fn serialize_rcsm(a: &RcsmAutomaton) -> String {
    let mut out = format!("automaton {}\n", a.name());
    if !a.clocks().is_empty() {
        let names: Vec<&str> = a.clocks().iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "  clocks {}", names.join(" "));
        let _ = writeln!(out, "  bounds {}", a.bounds());
    }
    out.push_str("  alphabet");
    for s in &a.alphabets().outputs {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    for rs in a.rstates() {
        write_state(
            &mut out,
            &rs.to_string(),
            rs == a.init(),
            a.out(rs).expect("own state"),
        );
    }
    for t in a.transitions() {
        let _ = write!(out, "  trans {} -> {} when {}", t.source, t.target, t.trigger);
        write_list(&mut out, "reset", t.resets.iter().map(|c| c.name()));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

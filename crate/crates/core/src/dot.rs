//! Graphviz export.

use std::fmt::Write as _;

use crate::csm::ReachabilityGraph;
use crate::rcsm::{Kind, RState, RcsmAutomaton};
use crate::state::StateId;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Region automaton as a digraph. Region states for which `is_error`
/// holds are filled red.
pub fn rcsm_to_dot(a: &RcsmAutomaton, is_error: impl Fn(&RState) -> bool) -> String {
    let mut out = format!("digraph {} {{\n", quote(a.name()));
    for (i, rs) in a.rstates().iter().enumerate() {
        let mut attrs = vec![format!(
            "label={}",
            quote(&format!("{}\n{}", rs.state, rs.region))
        )];
        if rs == a.init() {
            attrs.push("peripheries=2".into());
        }
        if is_error(rs) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=red".into());
        }
        let _ = writeln!(out, "  n{i} [{}];", attrs.join(", "));
    }
    let position = |rs: &RState| a.position(rs).expect("own state");
    for t in a.transitions() {
        let resets: Vec<&str> = t.resets.iter().map(|c| c.name()).collect();
        let style = match t.kind {
            Kind::Progress => "dashed",
            Kind::Action => "solid",
        };
        let _ = writeln!(
            out,
            "  n{} -> n{} [label={}, style={style}];",
            position(&t.source),
            position(&t.target),
            quote(&format!("{} / {}", t.trigger, resets.join(",")))
        );
    }
    out.push_str("}\n");
    out
}

/// Untimed reachability graph as a digraph; nodes carry state names only.
pub fn reachability_to_dot(g: &ReachabilityGraph, is_error: impl Fn(&StateId) -> bool) -> String {
    let mut out = format!("digraph {} {{\n", quote(g.name()));
    for (i, s) in g.states().iter().enumerate() {
        let init = if s == g.init() { ", peripheries=2" } else { "" };
        let fill = if is_error(s) {
            ", style=filled, fillcolor=red"
        } else {
            ""
        };
        let _ = writeln!(out, "  n{i} [label={}{init}{fill}];", quote(&s.to_string()));
    }
    let position = |s| g.states().iter().position(|x| x == s).expect("own state");
    for (s, t, f) in g.transitions() {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label={}, style=solid];",
            position(s),
            position(t),
            quote(&f.to_string())
        );
    }
    out.push_str("}\n");
    out
}

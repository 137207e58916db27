//! Workloads shared by the benchmarks.

use std::sync::Arc;

use tcsm_core::clock::{clk, ClockConstraint, Relation};
use tcsm_core::formula::signals;
use tcsm_core::state::sid;
use tcsm_core::{ClockBounds, ClockSet, Formula, SignalSet, TcsmAutomaton, TimedTransition};

/// Bounds with `n` clocks, all at `c`.
pub fn uniform_bounds(n: usize, c: u32) -> Arc<ClockBounds> {
    Arc::new(ClockBounds::new((0..n).map(|i| (clk(&format!("x{i}")), c))))
}

/// A two-state timer: idles below `c`, fires `tick{i}` between `c` and
/// `c + 1`, then restarts.
pub fn timer(i: usize, c: u32) -> TcsmAutomaton {
    let x = format!("x{i}");
    let tick = format!("tick{i}");
    let resets: ClockSet = [clk(&x)].into_iter().collect();
    TcsmAutomaton::new(
        &format!("T{i}"),
        vec![clk(&x)],
        vec![
            (sid("idle"), SignalSet::new()),
            (sid("fire"), signals([tick.as_str()])),
        ],
        &sid("idle"),
        vec![
            TimedTransition::new(sid("idle"), sid("idle"), Formula::True).with_guard(ClockConstraint::bound(
                &x,
                Relation::Le,
                c,
            )),
            TimedTransition::new(sid("idle"), sid("fire"), Formula::True).with_guard(ClockConstraint::bound(
                &x,
                Relation::Ge,
                c,
            )),
            TimedTransition::new(sid("fire"), sid("idle"), Formula::True).with_resets(resets),
        ],
    )
    .expect("well formed")
}

/// `n` independent timers with the same constant.
pub fn timers(n: usize, c: u32) -> Vec<TcsmAutomaton> {
    (0..n).map(|i| timer(i, c)).collect()
}

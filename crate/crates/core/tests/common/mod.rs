#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tcsm_core::clock::{clk, Relation};
use tcsm_core::state::sid;
use tcsm_core::{
    Clock, ClockConstraint, ClockSet, Formula, Signal, SignalSet, TcsmAutomaton, TimedTransition,
};

pub fn random_formula(rng: &mut impl Rng, atoms: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::var(atoms.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::Not(Box::new(random_formula(rng, atoms, depth - 1))),
        1 => Formula::And(
            Box::new(random_formula(rng, atoms, depth - 1)),
            Box::new(random_formula(rng, atoms, depth - 1)),
        ),
        _ => Formula::Or(
            Box::new(random_formula(rng, atoms, depth - 1)),
            Box::new(random_formula(rng, atoms, depth - 1)),
        ),
    }
}

fn random_guard(rng: &mut impl Rng, clock: Option<&Clock>) -> ClockConstraint {
    match clock {
        Some(c) if rng.gen_bool(0.6) => {
            let relation = *[Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge]
                .choose(rng)
                .unwrap();
            ClockConstraint::bound(c.name(), relation, rng.gen_range(0..=2))
        }
        _ => ClockConstraint::unconstrained(),
    }
}

/// A small random timed machine: at most three states, at most one clock,
/// constants at most two. `tag` keeps names, outputs and clocks disjoint
/// across components; `foreign` lists signals the triggers may also read.
pub fn random_tcsm(rng: &mut impl Rng, tag: &str, foreign: &[&str]) -> TcsmAutomaton {
    let n = rng.gen_range(1..=3);
    let names: Vec<String> = (0..n).map(|i| format!("{tag}{i}")).collect();
    let own: Vec<String> = (0..2).map(|i| format!("{tag}_o{i}")).collect();
    let clock = rng.gen_bool(0.8).then(|| clk(&format!("{tag}_x")));
    let mut atoms: Vec<&str> = own.iter().map(String::as_str).collect();
    atoms.extend_from_slice(foreign);
    let states = names
        .iter()
        .map(|s| {
            let out: SignalSet = own
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .map(|o| Signal::new(o).unwrap())
                .collect();
            (sid(s), out)
        })
        .collect();
    let mut transitions = Vec::new();
    for src in &names {
        for dst in &names {
            let p = if src == dst { 0.8 } else { 0.5 };
            if !rng.gen_bool(p) {
                continue;
            }
            let mut resets = ClockSet::new();
            if let Some(c) = &clock {
                if rng.gen_bool(0.4) {
                    resets.insert(c.clone());
                }
            }
            transitions.push(
                TimedTransition::new(sid(src), sid(dst), random_formula(rng, &atoms, 2))
                    .with_guard(random_guard(rng, clock.as_ref()))
                    .with_resets(resets),
            );
        }
    }
    TcsmAutomaton::new(
        &tag.to_uppercase(),
        clock.into_iter().collect(),
        states,
        &sid(&names[0]),
        transitions,
    )
    .unwrap()
}

pub mod regions {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use num_traits::Zero;
    use rand::Rng;
    use tcsm_core::clock::clk;
    use tcsm_core::{Clock, ClockBounds, ClockSet, ClockValuation, Rational, Region};

    pub const NAMES: [&str; 3] = ["x", "y", "z"];

    /// Every bounds profile with one to three clocks and bounds up to 3.
    pub fn profiles() -> Vec<Arc<ClockBounds>> {
        let mut out = Vec::new();
        for n in 1..=3u32 {
            for code in 0..4u32.pow(n) {
                let bounds = (0..n).map(|i| (clk(NAMES[i as usize]), code / 4u32.pow(i) % 4));
                out.push(Arc::new(ClockBounds::new(bounds)));
            }
        }
        out
    }

    fn frac(v: Rational) -> Rational {
        v - v.floor()
    }

    /// The three integrity conditions, checked in both directions.
    pub fn integrity_equivalent(a: &ClockValuation, b: &ClockValuation, bounds: &ClockBounds) -> bool {
        let within = |v: &ClockValuation, c: &Clock, bound: u32| {
            v.get(c).unwrap() <= Rational::from_integer(bound.into())
        };
        for (c, bound) in bounds.iter() {
            let (va, vb) = (a.get(c).unwrap(), b.get(c).unwrap());
            let (ia, ib) = (within(a, c, bound), within(b, c, bound));
            if ia != ib || (ia && va.floor() != vb.floor()) {
                return false;
            }
        }
        for (x, cx) in bounds.iter() {
            if !within(a, x, cx) {
                continue;
            }
            if frac(a.get(x).unwrap()).is_zero() != frac(b.get(x).unwrap()).is_zero() {
                return false;
            }
            for (y, cy) in bounds.iter() {
                if !within(a, y, cy) {
                    continue;
                }
                let le_a = frac(a.get(x).unwrap()) <= frac(a.get(y).unwrap());
                let le_b = frac(b.get(x).unwrap()) <= frac(b.get(y).unwrap());
                if le_a != le_b {
                    return false;
                }
            }
        }
        true
    }

    pub fn random_valuation(rng: &mut impl Rng, bounds: &ClockBounds) -> ClockValuation {
        ClockValuation::new(bounds.iter().map(|(c, bound)| {
            let d = rng.gen_range(1..=4i64);
            let n = rng.gen_range(0..=(i64::from(bound) + 2) * d);
            (c.clone(), Rational::new(n, d))
        }))
        .unwrap()
    }

    /// A valuation obtained from `v` by an order-preserving reshuffle of the
    /// fractional parts and fresh values above the bound, usually but not
    /// always landing in the same region.
    pub fn partner(rng: &mut impl Rng, v: &ClockValuation, bounds: &ClockBounds) -> ClockValuation {
        let mut fracs: Vec<Rational> = v
            .values()
            .values()
            .map(|x| frac(*x))
            .filter(|f| !f.is_zero())
            .collect();
        fracs.sort();
        fracs.dedup();
        // Strictly increasing images in (0,1) for the distinct fractions.
        let mut images: Vec<Rational> = (0..fracs.len())
            .map(|_| Rational::new(rng.gen_range(1..60), 60))
            .collect();
        images.sort();
        images.dedup();
        let sloppy = images.len() < fracs.len() || rng.gen_bool(0.1);
        ClockValuation::new(bounds.iter().map(|(c, bound)| {
            let x = v.get(c).unwrap();
            let top = Rational::from_integer(bound.into());
            let y = if x > top {
                top + Rational::new(rng.gen_range(1..=40), 10)
            } else if frac(x).is_zero() {
                x
            } else if sloppy {
                x.floor() + Rational::new(rng.gen_range(1..8), 8)
            } else {
                let k = fracs.iter().position(|f| *f == frac(x)).unwrap();
                x.floor() + images[k]
            };
            (c.clone(), y)
        }))
        .unwrap()
    }

    /// The first region other than the starting one met by `v + k/den`,
    /// k = 1, 2, ..., up to two time units; `None` if time never leaves it.
    pub fn first_change(v: &ClockValuation, bounds: &Arc<ClockBounds>, den: i64) -> Option<Region> {
        let start = Region::of(v, bounds.clone()).unwrap();
        (1..=2 * den).find_map(|k| {
            let w = v
                .advance_and_reset(Rational::new(k, den), &ClockSet::new())
                .unwrap();
            let r = Region::of(&w, bounds.clone()).unwrap();
            (r != start).then_some(r)
        })
    }

    /// The region reached first when time flows from the representative of
    /// `r`, swept on two grids that both contain every event time.
    pub fn swept_successor(r: &Region) -> Region {
        let m = r.fracs().len() as i64;
        let v = r.representative();
        let bounds = r.shared_bounds();
        assert_eq!(&Region::of(&v, bounds.clone()).unwrap(), r);
        let coarse = first_change(&v, bounds, 2 * (m + 1));
        let fine = first_change(&v, bounds, 2 * (m + 1) * (m + 2));
        assert_eq!(coarse, fine, "a region was skipped after {r}");
        coarse.unwrap_or_else(|| r.clone())
    }

    /// Canonical descriptors generated straight from the type invariants:
    /// each clock is beyond, or has an integral part with a zero or a
    /// nonzero fraction; nonzero fractions form an ordered partition.
    pub fn brute_force_descriptors(bounds: &ClockBounds) -> BTreeSet<String> {
        #[derive(Clone, Copy)]
        enum Choice {
            Beyond,
            Zero(u32),
            Frac(u32),
        }
        let clocks: Vec<(Clock, u32)> = bounds.iter().map(|(c, b)| (c.clone(), b)).collect();
        let mut per_clock: Vec<Vec<Choice>> = Vec::new();
        for (_, c) in &clocks {
            let mut options = vec![Choice::Beyond];
            options.extend((0..=*c).map(Choice::Zero));
            options.extend((0..*c).map(Choice::Frac));
            per_clock.push(options);
        }
        let mut out = BTreeSet::new();
        let mut pick = vec![0usize; clocks.len()];
        loop {
            let choice: Vec<Choice> = pick.iter().enumerate().map(|(i, &k)| per_clock[i][k]).collect();
            let frac_clocks: Vec<usize> = (0..clocks.len())
                .filter(|&i| matches!(choice[i], Choice::Frac(_)))
                .collect();
            let f = frac_clocks.len();
            for code in 0..f.pow(f as u32).max(1) {
                let ranks: Vec<usize> = (0..f).map(|j| code / f.pow(j as u32) % f.max(1)).collect();
                let used: BTreeSet<usize> = ranks.iter().copied().collect();
                if used.len() != used.iter().max().map_or(0, |m| m + 1) {
                    continue;
                }
                let mut ints = Vec::new();
                let mut zero = Vec::new();
                let mut beyond = Vec::new();
                for (i, (c, _)) in clocks.iter().enumerate() {
                    match choice[i] {
                        Choice::Beyond => beyond.push(c.name().to_string()),
                        Choice::Zero(v) => {
                            ints.push(format!("{c}:{v}"));
                            zero.push(c.name().to_string());
                        }
                        Choice::Frac(v) => ints.push(format!("{c}:{v}")),
                    }
                }
                let order: String = (0..used.len())
                    .map(|rank| {
                        let members: Vec<&str> = frac_clocks
                            .iter()
                            .zip(&ranks)
                            .filter(|(_, r)| **r == rank)
                            .map(|(&i, _)| clocks[i].0.name())
                            .collect();
                        format!("({})", members.join(","))
                    })
                    .collect();
                out.insert(format!(
                    "ints={} zero={} order={} beyond={}",
                    ints.join(","),
                    zero.join(","),
                    order,
                    beyond.join(",")
                ));
            }
            let mut i = 0;
            loop {
                if i == pick.len() {
                    return out;
                }
                pick[i] += 1;
                if pick[i] < per_clock[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    /// `|X|! * 2^|X| * prod(2c + 2)`.
    pub fn count_bound(bounds: &ClockBounds) -> u64 {
        let n = bounds.len() as u64;
        let fact: u64 = (1..=n).product();
        let prod: u64 = bounds.iter().map(|(_, c)| 2 * u64::from(c) + 2).product();
        fact * (1 << n) * prod
    }
}

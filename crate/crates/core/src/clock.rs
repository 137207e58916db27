//! Clocks, clock constraints, exact rational valuations and clock regions.
//!
//! A [`Region`] is the finite abstraction of a [`ClockValuation`]: the integral
//! part of every clock that has not passed its bound, the set of clocks beyond
//! their bound, the set of clocks with zero fractional part, and the remaining
//! clocks grouped by equal fractional part, ordered greatest first.
//!
//! Valuations use exact rationals so that fractional-part comparisons are never
//! subject to rounding.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::formula::is_identifier;

pub type Rational = Rational64;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clock(Arc<str>);

pub type ClockSet = BTreeSet<Clock>;

impl Clock {
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) {
            Ok(Clock(Arc::from(name)))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Clock literal for tests; panics on a malformed name.
pub fn clk(name: &str) -> Clock {
    Clock::new(name).expect("valid clock name")
}

pub fn clock_set<'a>(names: impl IntoIterator<Item = &'a str>) -> ClockSet {
    names.into_iter().map(clk).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    fn holds(self, value: Rational, constant: Rational) -> bool {
        match self {
            Relation::Lt => value < constant,
            Relation::Le => value <= constant,
            Relation::Gt => value > constant,
            Relation::Ge => value >= constant,
        }
    }
}

/// A simple bound `clock REL constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleBound {
    pub clock: Clock,
    pub relation: Relation,
    pub constant: u32,
}

impl fmt::Display for SimpleBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.clock, self.relation.symbol(), self.constant)
    }
}

/// A conjunction of simple bounds. The empty conjunction places no
/// constraint.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockConstraint {
    conjuncts: BTreeSet<SimpleBound>,
}

impl ClockConstraint {
    pub fn unconstrained() -> Self {
        Self::default()
    }

    pub fn new(conjuncts: impl IntoIterator<Item = SimpleBound>) -> Self {
        ClockConstraint {
            conjuncts: conjuncts.into_iter().collect(),
        }
    }

    pub fn bound(clock: &str, relation: Relation, constant: u32) -> Self {
        Self::new([SimpleBound {
            clock: clk(clock),
            relation,
            constant,
        }])
    }

    pub fn is_unconstrained(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = &SimpleBound> {
        self.conjuncts.iter()
    }

    pub fn and(&self, other: &ClockConstraint) -> ClockConstraint {
        ClockConstraint {
            conjuncts: self.conjuncts.union(&other.conjuncts).cloned().collect(),
        }
    }

    pub fn clocks(&self) -> ClockSet {
        self.conjuncts.iter().map(|b| b.clock.clone()).collect()
    }

    /// Conjuncts restricted to the given clocks.
    pub fn restrict(&self, clocks: &ClockSet) -> ClockConstraint {
        ClockConstraint::new(
            self.conjuncts
                .iter()
                .filter(|b| clocks.contains(&b.clock))
                .cloned(),
        )
    }

    pub fn eval(&self, valuation: &ClockValuation) -> Result<bool> {
        for b in &self.conjuncts {
            let value = valuation.get(&b.clock)?;
            if !b.relation.holds(value, Rational::from_integer(b.constant.into())) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjuncts.is_empty() {
            return f.write_str("true");
        }
        for (i, b) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for ClockConstraint {
    type Err = Error;

    /// `true`, or `&`-joined atoms `clock OP NAT` with OP in `< <= > >=`.
    fn from_str(text: &str) -> Result<Self> {
        let syntax = |message: String| Error::Syntax { column: 1, message };
        if text.trim() == "true" {
            return Ok(Self::unconstrained());
        }
        let mut conjuncts = BTreeSet::new();
        for atom in text.split('&') {
            let atom = atom.trim();
            let op_at = atom
                .find(['<', '>'])
                .ok_or_else(|| syntax(format!("expected a comparison in `{atom}`")))?;
            let clock = Clock::new(atom[..op_at].trim())?;
            let rest = &atom[op_at..];
            let (relation, constant) = if let Some(c) = rest.strip_prefix("<=") {
                (Relation::Le, c)
            } else if let Some(c) = rest.strip_prefix(">=") {
                (Relation::Ge, c)
            } else if let Some(c) = rest.strip_prefix('<') {
                (Relation::Lt, c)
            } else {
                (Relation::Gt, &rest[1..])
            };
            let constant = constant.trim();
            let constant: u32 = constant
                .parse()
                .map_err(|_| syntax(format!("constant `{constant}` is not a natural number")))?;
            conjuncts.insert(SimpleBound {
                clock,
                relation,
                constant,
            });
        }
        Ok(ClockConstraint { conjuncts })
    }
}

/// An assignment of nonnegative rationals to clocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockValuation {
    values: BTreeMap<Clock, Rational>,
}

impl ClockValuation {
    pub fn new(values: impl IntoIterator<Item = (Clock, Rational)>) -> Result<Self> {
        let values: BTreeMap<_, _> = values.into_iter().collect();
        if values.values().any(|v| v.is_negative()) {
            return Err(Error::NegativeDelta);
        }
        Ok(ClockValuation { values })
    }

    pub fn zero(clocks: impl IntoIterator<Item = Clock>) -> Self {
        ClockValuation {
            values: clocks.into_iter().map(|c| (c, Rational::zero())).collect(),
        }
    }

    pub fn get(&self, clock: &Clock) -> Result<Rational> {
        self.values
            .get(clock)
            .copied()
            .ok_or_else(|| Error::UnknownClock(clock.to_string()))
    }

    pub fn values(&self) -> &BTreeMap<Clock, Rational> {
        &self.values
    }

    /// Lets `delta` time units pass, then resets `resets` to zero.
    pub fn advance_and_reset(&self, delta: Rational, resets: &ClockSet) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::NegativeDelta);
        }
        if let Some(c) = resets.iter().find(|c| !self.values.contains_key(*c)) {
            return Err(Error::UnknownClock(c.to_string()));
        }
        let values = self
            .values
            .iter()
            .map(|(c, v)| {
                let next = if resets.contains(c) {
                    Rational::zero()
                } else {
                    v + delta
                };
                (c.clone(), next)
            })
            .collect();
        Ok(ClockValuation { values })
    }

    pub fn restrict(&self, clocks: &ClockSet) -> Self {
        ClockValuation {
            values: self
                .values
                .iter()
                .filter(|(c, _)| clocks.contains(*c))
                .map(|(c, v)| (c.clone(), *v))
                .collect(),
        }
    }
}

/// The largest constant each clock is compared against.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockBounds {
    clocks: Vec<Clock>,
    bounds: Vec<u32>,
}

impl ClockBounds {
    pub fn new(bounds: impl IntoIterator<Item = (Clock, u32)>) -> Self {
        let map: BTreeMap<Clock, u32> = bounds.into_iter().collect();
        ClockBounds {
            clocks: map.keys().cloned().collect(),
            bounds: map.values().copied().collect(),
        }
    }

    /// Bounds derived from constraints; clocks never compared get 0.
    pub fn from_constraints<'a>(
        clocks: impl IntoIterator<Item = &'a Clock>,
        constraints: impl IntoIterator<Item = &'a ClockConstraint>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Clock, u32> = clocks.into_iter().map(|c| (c.clone(), 0)).collect();
        for constraint in constraints {
            for b in constraint.conjuncts() {
                let slot = map
                    .get_mut(&b.clock)
                    .ok_or_else(|| Error::UnknownClock(b.clock.to_string()))?;
                *slot = (*slot).max(b.constant);
            }
        }
        Ok(ClockBounds::new(map))
    }

    pub fn clocks(&self) -> &[Clock] {
        &self.clocks
    }

    pub fn len(&self) -> usize {
        self.clocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clocks.is_empty()
    }

    pub fn position(&self, clock: &Clock) -> Result<usize> {
        self.clocks
            .binary_search(clock)
            .map_err(|_| Error::UnknownClock(clock.to_string()))
    }

    pub fn get(&self, clock: &Clock) -> Result<u32> {
        Ok(self.bounds[self.position(clock)?])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Clock, u32)> {
        self.clocks.iter().zip(self.bounds.iter().copied())
    }

    pub fn restrict(&self, clocks: &ClockSet) -> Result<Self> {
        for c in clocks {
            self.position(c)?;
        }
        Ok(ClockBounds::new(
            self.iter()
                .filter(|(c, _)| clocks.contains(*c))
                .map(|(c, b)| (c.clone(), b)),
        ))
    }

    /// Joins bounds over disjoint clock sets.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a ClockBounds>) -> Self {
        ClockBounds::new(
            parts
                .into_iter()
                .flat_map(|p| p.iter().map(|(c, b)| (c.clone(), b))),
        )
    }
}

impl fmt::Display for ClockBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, b)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}:{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Part {
    Beyond,
    Zero,
    /// Rank among the fractional classes, 0 = greatest fractional part.
    Frac(u32),
}

/// A clock region. Clocks are indexed in the sorted order of the bounds table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    bounds: Arc<ClockBounds>,
    // Integral parts; 0 for clocks beyond their bound.
    ints: Vec<u32>,
    parts: Vec<Part>,
}

/// Region extension operations on naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NatOp {
    Assign,
    Increment,
}

impl Region {
    /// The region where every clock is exactly zero.
    pub fn zero(bounds: Arc<ClockBounds>) -> Self {
        let n = bounds.len();
        Region {
            bounds,
            ints: vec![0; n],
            parts: vec![Part::Zero; n],
        }
    }

    /// Builds a region from its components, checking every canonical-form
    /// invariant. `fracs` is ordered greatest fractional part first.
    pub fn from_parts(
        bounds: Arc<ClockBounds>,
        ints: &BTreeMap<Clock, u32>,
        beyond: &ClockSet,
        zero: &ClockSet,
        fracs: &[ClockSet],
    ) -> Result<Self> {
        let n = bounds.len();
        let mut parts: Vec<Option<Part>> = vec![None; n];
        let mut assign = |clock: &Clock, part: Part| -> Result<()> {
            let i = bounds.position(clock)?;
            if parts[i].replace(part).is_some() {
                return Err(Error::InvalidRegion(format!("clock `{clock}` placed twice")));
            }
            Ok(())
        };
        for c in beyond {
            assign(c, Part::Beyond)?;
        }
        for c in zero {
            assign(c, Part::Zero)?;
        }
        for (k, class) in fracs.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidRegion("empty fractional class".into()));
            }
            for c in class {
                assign(c, Part::Frac(k as u32))?;
            }
        }
        let mut region_ints = vec![0; n];
        let mut out_parts = Vec::with_capacity(n);
        for (i, part) in parts.into_iter().enumerate() {
            let clock = &bounds.clocks[i];
            let part = part.ok_or_else(|| Error::InvalidRegion(format!("clock `{clock}` is not placed")))?;
            if part == Part::Beyond {
                if ints.contains_key(clock) {
                    return Err(Error::InvalidRegion(format!(
                        "clock `{clock}` is beyond its bound but has an integral part"
                    )));
                }
            } else {
                let v = *ints
                    .get(clock)
                    .ok_or_else(|| Error::InvalidRegion(format!("clock `{clock}` has no integral part")))?;
                region_ints[i] = v;
            }
            out_parts.push(part);
        }
        for clock in ints.keys() {
            bounds.position(clock)?;
        }
        let region = Region {
            bounds,
            ints: region_ints,
            parts: out_parts,
        };
        region.validate()?;
        Ok(region)
    }

    /// Checks the canonical-form invariants.
    pub fn validate(&self) -> Result<()> {
        let mut ranks = BTreeSet::new();
        for (i, part) in self.parts.iter().enumerate() {
            let c = self.bounds.bounds[i];
            let v = self.ints[i];
            let clock = &self.bounds.clocks[i];
            match part {
                Part::Beyond if v != 0 => {
                    return Err(Error::InvalidRegion(format!(
                        "clock `{clock}` beyond its bound carries an integral part"
                    )))
                }
                Part::Zero if v > c => {
                    return Err(Error::InvalidRegion(format!(
                        "integral part {v} of `{clock}` exceeds bound {c}"
                    )))
                }
                Part::Frac(_) if v >= c => {
                    return Err(Error::InvalidRegion(format!(
                        "clock `{clock}` with integral part {v} and a fraction exceeds bound {c}"
                    )))
                }
                Part::Frac(k) => {
                    ranks.insert(*k);
                }
                _ => {}
            }
        }
        if ranks.iter().copied().ne(0..ranks.len() as u32) {
            return Err(Error::InvalidRegion(
                "fractional classes are not contiguous".into(),
            ));
        }
        Ok(())
    }

    pub fn bounds(&self) -> &ClockBounds {
        &self.bounds
    }

    pub fn shared_bounds(&self) -> &Arc<ClockBounds> {
        &self.bounds
    }

    pub fn clocks(&self) -> &[Clock] {
        &self.bounds.clocks
    }

    /// Integral part of a clock, `None` when it is beyond its bound.
    pub fn int_of(&self, clock: &Clock) -> Result<Option<u32>> {
        let i = self.bounds.position(clock)?;
        Ok((self.parts[i] != Part::Beyond).then_some(self.ints[i]))
    }

    pub fn ints(&self) -> BTreeMap<Clock, u32> {
        self.indices(|p| p != Part::Beyond)
            .map(|i| (self.bounds.clocks[i].clone(), self.ints[i]))
            .collect()
    }

    fn indices<'a>(&'a self, pred: impl Fn(Part) -> bool + 'a) -> impl Iterator<Item = usize> + 'a {
        (0..self.parts.len()).filter(move |&i| pred(self.parts[i]))
    }

    fn clocks_where(&self, pred: impl Fn(Part) -> bool) -> ClockSet {
        self.indices(pred)
            .map(|i| self.bounds.clocks[i].clone())
            .collect()
    }

    pub fn beyond(&self) -> ClockSet {
        self.clocks_where(|p| p == Part::Beyond)
    }

    pub fn zero_set(&self) -> ClockSet {
        self.clocks_where(|p| p == Part::Zero)
    }

    fn class_count(&self) -> u32 {
        self.parts
            .iter()
            .filter_map(|p| match p {
                Part::Frac(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Fractional classes, greatest fractional part first.
    pub fn fracs(&self) -> Vec<ClockSet> {
        (0..self.class_count())
            .map(|k| self.clocks_where(|p| p == Part::Frac(k)))
            .collect()
    }

    /// True when time passing no longer changes the region.
    pub fn is_final(&self) -> bool {
        self.parts.iter().all(|p| *p == Part::Beyond)
    }

    /// The region containing a valuation.
    pub fn of(valuation: &ClockValuation, bounds: Arc<ClockBounds>) -> Result<Self> {
        if let Some(c) = valuation.values.keys().find(|c| bounds.position(c).is_err()) {
            return Err(Error::UnknownClock(c.to_string()));
        }
        let n = bounds.len();
        let mut ints = vec![0; n];
        let mut parts = vec![Part::Zero; n];
        let mut fracs: Vec<(Rational, usize)> = Vec::new();
        for i in 0..n {
            let v = valuation.get(&bounds.clocks[i])?;
            if v > Rational::from_integer(bounds.bounds[i].into()) {
                parts[i] = Part::Beyond;
                continue;
            }
            ints[i] = v.floor().to_integer() as u32;
            let frac = v.fract();
            if !frac.is_zero() {
                fracs.push((frac, i));
            }
        }
        let mut distinct: Vec<Rational> = fracs.iter().map(|(f, _)| *f).collect();
        distinct.sort_unstable_by(|a, b| b.cmp(a));
        distinct.dedup();
        for (frac, i) in fracs {
            let rank = distinct.iter().position(|d| *d == frac).expect("collected");
            parts[i] = Part::Frac(rank as u32);
        }
        Ok(Region { bounds, ints, parts })
    }

    /// A valuation inside the region: class `k` of `m` (0 = greatest) gets
    /// fractional part `(m - k) / (m + 1)`; clocks beyond their bound get
    /// `c + 1`.
    pub fn representative(&self) -> ClockValuation {
        let m = self.class_count() as i64;
        let values = self
            .parts
            .iter()
            .enumerate()
            .map(|(i, part)| {
                let int = Rational::from_integer(self.ints[i].into());
                let v = match part {
                    Part::Zero => int,
                    Part::Frac(k) => int + Rational::new(m - *k as i64, m + 1),
                    Part::Beyond => Rational::from_integer(i64::from(self.bounds.bounds[i]) + 1),
                };
                (self.bounds.clocks[i].clone(), v)
            })
            .collect();
        ClockValuation { values }
    }

    /// The immediate successor region under the passage of time.
    pub fn time_successor(&self) -> Region {
        let mut next = self.clone();
        if self.parts.contains(&Part::Zero) {
            let m = self.class_count();
            for i in 0..next.parts.len() {
                if next.parts[i] != Part::Zero {
                    continue;
                }
                if next.ints[i] == next.bounds.bounds[i] {
                    next.parts[i] = Part::Beyond;
                    next.ints[i] = 0;
                } else {
                    next.parts[i] = Part::Frac(m);
                }
            }
        } else if self.class_count() > 0 {
            for i in 0..next.parts.len() {
                match next.parts[i] {
                    Part::Frac(0) => {
                        next.parts[i] = Part::Zero;
                        next.ints[i] += 1;
                    }
                    Part::Frac(k) => next.parts[i] = Part::Frac(k - 1),
                    _ => {}
                }
            }
        }
        next
    }

    /// Resets the given clocks to zero.
    pub fn reset(&self, clocks: &ClockSet) -> Result<Region> {
        let mut mask = vec![false; self.parts.len()];
        for c in clocks {
            mask[self.bounds.position(c)?] = true;
        }
        Ok(self.reset_mask(&mask))
    }

    fn reset_mask(&self, mask: &[bool]) -> Region {
        let mut next = self.clone();
        for (i, &hit) in mask.iter().enumerate() {
            if hit {
                next.parts[i] = Part::Zero;
                next.ints[i] = 0;
            }
        }
        next.compact_ranks();
        next
    }

    fn compact_ranks(&mut self) {
        let used: BTreeSet<u32> = self
            .parts
            .iter()
            .filter_map(|p| match p {
                Part::Frac(k) => Some(*k),
                _ => None,
            })
            .collect();
        if used.iter().copied().eq(0..used.len() as u32) {
            return;
        }
        let remap: BTreeMap<u32, u32> = used.into_iter().zip(0..).collect();
        for p in &mut self.parts {
            if let Part::Frac(k) = p {
                *k = remap[k];
            }
        }
    }

    /// Whether every valuation of the region satisfies the constraint.
    pub fn agrees(&self, constraint: &ClockConstraint) -> Result<bool> {
        for b in constraint.conjuncts() {
            let i = self.bounds.position(&b.clock)?;
            let bound = self.bounds.bounds[i];
            if b.constant > bound {
                return Err(Error::ConstantExceedsBound {
                    clock: b.clock.to_string(),
                    constant: b.constant,
                    bound,
                });
            }
            let beyond = self.parts[i] == Part::Beyond;
            let int = self.ints[i];
            let c = b.constant;
            let lt = !beyond && int < c;
            let le = !beyond && (int < c || (int == c && self.parts[i] == Part::Zero));
            let holds = match b.relation {
                Relation::Lt => lt,
                Relation::Le => le,
                Relation::Gt => !le,
                Relation::Ge => !lt,
            };
            if !holds {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Assigns or increments a clock by a natural number, widening the bound
    /// of that clock as needed. The returned region carries the new bounds.
    pub fn nat_extend(&self, op: NatOp, clock: &Clock, n: u32) -> Result<(Region, ClockBounds)> {
        let i = self.bounds.position(clock)?;
        let mut bounds = (*self.bounds).clone();
        let mut next = self.clone();
        match op {
            NatOp::Assign => {
                bounds.bounds[i] = bounds.bounds[i].max(n);
                next.parts[i] = Part::Zero;
                next.ints[i] = n;
                next.compact_ranks();
            }
            NatOp::Increment => {
                bounds.bounds[i] += n;
                if next.parts[i] != Part::Beyond {
                    next.ints[i] += n;
                }
            }
        }
        next.bounds = Arc::new(bounds.clone());
        Ok((next, bounds))
    }

    /// Restriction to a subset of the clocks.
    pub fn project(&self, clocks: &ClockSet) -> Result<Region> {
        let bounds = Arc::new(self.bounds.restrict(clocks)?);
        let keep: Vec<usize> = bounds
            .clocks
            .iter()
            .map(|c| self.bounds.position(c).expect("restricted"))
            .collect();
        let mut region = Region {
            ints: keep.iter().map(|&i| self.ints[i]).collect(),
            parts: keep.iter().map(|&i| self.parts[i]).collect(),
            bounds,
        };
        region.compact_ranks();
        Ok(region)
    }

    /// Every canonical region over the bounds: the closure of the zero region
    /// under time successors and single-clock resets, sorted.
    pub fn enumerate(bounds: Arc<ClockBounds>) -> Vec<Region> {
        let start = Region::zero(bounds);
        let n = start.parts.len();
        let mut seen: HashSet<Region> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(r) = queue.pop_front() {
            let mut next = vec![r.time_successor()];
            for i in 0..n {
                let mut mask = vec![false; n];
                mask[i] = true;
                next.push(r.reset_mask(&mask));
            }
            for s in next {
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut all: Vec<Region> = seen.into_iter().collect();
        all.sort();
        all
    }

    /// Parses the canonical descriptor produced by `Display`.
    pub fn parse_descriptor(text: &str, bounds: Arc<ClockBounds>) -> Result<Region> {
        let bad = |what: &str| Error::InvalidRegion(format!("{what} in descriptor `{text}`"));
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [ints, zero, order, beyond] = fields[..] else {
            return Err(bad("expected four fields"));
        };
        let field = |token: &str, key: &str| -> Result<String> {
            token
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("missing `{key}=`")))
        };
        let list = |s: &str| -> Result<ClockSet> {
            s.split(',').filter(|p| !p.is_empty()).map(Clock::new).collect()
        };
        let mut int_map = BTreeMap::new();
        for entry in field(ints, "ints")?.split(',').filter(|p| !p.is_empty()) {
            let (c, v) = entry.split_once(':').ok_or_else(|| bad("malformed ints entry"))?;
            let v: u32 = v.parse().map_err(|_| bad("malformed integral part"))?;
            if int_map.insert(Clock::new(c)?, v).is_some() {
                return Err(bad("repeated clock in ints"));
            }
        }
        let zero = list(&field(zero, "zero")?)?;
        let beyond = list(&field(beyond, "beyond")?)?;
        let order = field(order, "order")?;
        let mut fracs = Vec::new();
        let mut rest = order.as_str();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(|| bad("malformed order"))?;
            let close = inner.find(')').ok_or_else(|| bad("unclosed class"))?;
            fracs.push(list(&inner[..close])?);
            rest = &inner[close + 1..];
        }
        Region::from_parts(bounds, &int_map, &beyond, &zero, &fracs)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, set: &ClockSet) -> fmt::Result {
    for (i, c) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// Canonical descriptor: `ints=x:1,y:0 zero=y order=(x) beyond=`.
impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ints=")?;
        for (k, (c, v)) in self.ints().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}:{v}")?;
        }
        f.write_str(" zero=")?;
        write_list(f, &self.zero_set())?;
        f.write_str(" order=")?;
        for class in self.fracs() {
            f.write_str("(")?;
            write_list(f, &class)?;
            f.write_str(")")?;
        }
        f.write_str(" beyond=")?;
        write_list(f, &self.beyond())
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

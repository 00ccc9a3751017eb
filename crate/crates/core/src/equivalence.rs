//! Digit surgery: inserting or removing a run of equal digits whose walk is
//! a closed loop.
//!
//! In base 2 on the hexagonal grid a run is six equal bits. For the other
//! schemes the run length is the shortest closing run of that digit's turn
//! (4 on the square grid, 3 or 6 on the hexagonal grid in base 5); those are
//! provided as an extension of the binary relation.
//!
//! Operations act on a chosen expansion. Rationals are expanded by long
//! division, so a dyadic rational uses its terminating expansion. Op
//! positions are 1-based and always index the current expansion.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::{classify, in_class_k, Membership};
use crate::digits::{expand, value_of, EventuallyPeriodicDigits, Rational};
use crate::error::{Error, Result};
use crate::lattice::{Direction, LatticePoint};
use crate::walk::{walk_prefix, TurnMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurgeryOp {
    /// Splice a closing run of `digit` in front of digit `position`.
    Insert { position: usize, digit: u8 },
    /// Cut the closing run that starts at digit `position`.
    Remove { position: usize },
}

impl SurgeryOp {
    pub fn position(&self) -> usize {
        match *self {
            SurgeryOp::Insert { position, .. } | SurgeryOp::Remove { position } => position,
        }
    }
}

impl fmt::Display for SurgeryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryOp::Insert { position, digit } => write!(f, "insert@{position}:{digit}"),
            SurgeryOp::Remove { position } => write!(f, "remove@{position}"),
        }
    }
}

impl FromStr for SurgeryOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            input: s.to_string(),
            reason: "expected `insert@n:digit` or `remove@n`".to_string(),
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("insert@") {
            let (n, z) = rest.split_once(':').ok_or_else(err)?;
            Ok(SurgeryOp::Insert {
                position: n.parse().map_err(|_| err())?,
                digit: z.parse().map_err(|_| err())?,
            })
        } else if let Some(n) = s.strip_prefix("remove@") {
            Ok(SurgeryOp::Remove {
                position: n.parse().map_err(|_| err())?,
            })
        } else {
            Err(err())
        }
    }
}

/// Ops that turn one expansion into another, applied in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub ops: Vec<SurgeryOp>,
}

impl EquivalenceWitness {
    pub fn replay(&self, start: &EventuallyPeriodicDigits, tm: &TurnMap) -> Result<EventuallyPeriodicDigits> {
        self.ops
            .iter()
            .try_fold(start.clone(), |d, op| apply(&d, *op, tm))
    }
}

impl fmt::Display for EquivalenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("-");
        }
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

impl FromStr for EquivalenceWitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(EquivalenceWitness::default());
        }
        let ops = s.split(',').map(str::parse).collect::<Result<_>>()?;
        Ok(EquivalenceWitness { ops })
    }
}

fn check_position(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroPosition)
    } else {
        Ok(())
    }
}

/// Applies one op to an expansion.
pub fn apply(d: &EventuallyPeriodicDigits, op: SurgeryOp, tm: &TurnMap) -> Result<EventuallyPeriodicDigits> {
    check_position(op.position())?;
    let n = op.position();
    match op {
        SurgeryOp::Insert { digit, .. } => {
            let run = tm.closing_run(digit)?.ok_or(Error::NoClosingRun { digit })?;
            let mut head = d.prefix(n - 1);
            head.extend(std::iter::repeat_n(digit, run));
            d.suffix(n - 1).prepend(&head)
        }
        SurgeryOp::Remove { .. } => {
            let run = removable_run(d, n, tm)?;
            d.suffix(n - 1 + run).prepend(&d.prefix(n - 1))
        }
    }
}

/// Length of the closing run starting at digit `n`, or the refusal.
fn removable_run(d: &EventuallyPeriodicDigits, n: usize, tm: &TurnMap) -> Result<usize> {
    let z = d.digit_at(n);
    let closing = tm.closing_run(z)?;
    let run = closing.unwrap_or(usize::from(tm.direction_count()));
    let window: Vec<u8> = d.digits().skip(n - 1).take(run).collect();
    if closing.is_some() && window.iter().all(|&w| w == z) {
        Ok(run)
    } else {
        Err(Error::NotARun {
            position: n,
            run_length: run,
            window,
        })
    }
}

/// Value after splicing a closing run of `z` before digit `n` of `r`.
pub fn insert_run(r: &Rational, n: usize, z: u8, tm: &TurnMap) -> Result<Rational> {
    check_position(n)?;
    let d = expand(r, tm.base())?;
    Ok(value_of(&apply(&d, SurgeryOp::Insert { position: n, digit: z }, tm)?))
}

/// Value after cutting the closing run starting at digit `n` of `r`.
pub fn remove_run(r: &Rational, n: usize, tm: &TurnMap) -> Result<Rational> {
    check_position(n)?;
    let d = expand(r, tm.base())?;
    Ok(value_of(&apply(&d, SurgeryOp::Remove { position: n }, tm)?))
}

/// Value change of one op by closed form.
///
/// With `A` the value of the first `n-1` digits, `m` the run length and `S`
/// the sum of `b^-i` over the run's positions, inserting gives
/// `A + b^-m (r - A) + z S`; removing inverts that map.
pub fn op_delta(d: &EventuallyPeriodicDigits, op: SurgeryOp, tm: &TurnMap) -> Result<Rational> {
    check_position(op.position())?;
    let n = op.position();
    let base = BigInt::from(d.base());
    let r = value_of(d);
    let head = d.prefix(n - 1);
    let a = head.iter().enumerate().fold(Rational::zero(), |acc, (i, &z)| {
        acc + Rational::new(BigInt::from(z), Pow::pow(&base, i + 1))
    });
    let (z, run) = match op {
        SurgeryOp::Insert { digit, .. } => (
            digit,
            tm.closing_run(digit)?.ok_or(Error::NoClosingRun { digit })?,
        ),
        SurgeryOp::Remove { .. } => (d.digit_at(n), removable_run(d, n, tm)?),
    };
    let run_sum = (n..n + run).fold(Rational::zero(), |acc, i| {
        acc + Rational::new(BigInt::one(), Pow::pow(&base, i))
    });
    let shrink = Rational::new(BigInt::one(), Pow::pow(&base, run));
    let filled = run_sum * Rational::from_integer(BigInt::from(z));
    let after = match op {
        SurgeryOp::Insert { .. } => &a + shrink * (&r - &a) + filled,
        SurgeryOp::Remove { .. } => &a + (&r - &a - filled) / shrink,
    };
    Ok(after - r)
}

/// Bounds for the witness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_ops: usize,
    pub max_position: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_ops: 2,
            max_position: 16,
        }
    }
}

/// All ops within the position bound, in canonical order, with results.
fn neighbours(
    d: &EventuallyPeriodicDigits,
    tm: &TurnMap,
    max_position: usize,
) -> Vec<(SurgeryOp, EventuallyPeriodicDigits, SurgeryOp)> {
    let closing: Vec<u8> = (0..tm.base() as u8)
        .filter(|&z| matches!(tm.closing_run(z), Ok(Some(_))))
        .collect();
    let mut out = Vec::new();
    for position in 1..=max_position {
        for &digit in &closing {
            let op = SurgeryOp::Insert { position, digit };
            if let Ok(next) = apply(d, op, tm) {
                out.push((op, next, SurgeryOp::Remove { position }));
            }
        }
    }
    for position in 1..=max_position {
        let op = SurgeryOp::Remove { position };
        if let Ok(next) = apply(d, op, tm) {
            let digit = d.digit_at(position);
            out.push((op, next, SurgeryOp::Insert { position, digit }));
        }
    }
    out
}

/// Bidirectional breadth-first search for a witness turning `d1` into `d2`.
///
/// A semidecision: `None` only means nothing was found within the budget.
/// Among the witnesses found at the meeting layer the shortest, then
/// lexicographically smallest, is returned.
pub fn witness_between(
    d1: &EventuallyPeriodicDigits,
    d2: &EventuallyPeriodicDigits,
    tm: &TurnMap,
    budget: Budget,
) -> Option<EquivalenceWitness> {
    if d1 == d2 {
        return Some(EquivalenceWitness::default());
    }
    // node -> ops from d1 to node
    let mut forward: HashMap<EventuallyPeriodicDigits, Vec<SurgeryOp>> = HashMap::new();
    // node -> ops from node to d2
    let mut backward: HashMap<EventuallyPeriodicDigits, Vec<SurgeryOp>> = HashMap::new();
    forward.insert(d1.clone(), Vec::new());
    backward.insert(d2.clone(), Vec::new());
    let mut front_f = vec![d1.clone()];
    let mut front_b = vec![d2.clone()];
    let (mut depth_f, mut depth_b) = (0, 0);

    while depth_f + depth_b < budget.max_ops {
        let grow_forward = depth_f <= depth_b;
        let mut found: Vec<Vec<SurgeryOp>> = Vec::new();
        let mut next_front = Vec::new();
        if grow_forward {
            for node in &front_f {
                let base_ops = forward[node].clone();
                for (op, next, _) in neighbours(node, tm, budget.max_position) {
                    if forward.contains_key(&next) {
                        continue;
                    }
                    let mut ops = base_ops.clone();
                    ops.push(op);
                    if let Some(rest) = backward.get(&next) {
                        let mut full = ops.clone();
                        full.extend_from_slice(rest);
                        found.push(full);
                    }
                    forward.insert(next.clone(), ops);
                    next_front.push(next);
                }
            }
            front_f = next_front;
            depth_f += 1;
        } else {
            for node in &front_b {
                let base_ops = backward[node].clone();
                for (_, next, inverse) in neighbours(node, tm, budget.max_position) {
                    if backward.contains_key(&next) {
                        continue;
                    }
                    // inverse takes `next` back to `node`
                    let mut ops = vec![inverse];
                    ops.extend_from_slice(&base_ops);
                    if let Some(head) = forward.get(&next) {
                        let mut full = head.clone();
                        full.extend_from_slice(&ops);
                        found.push(full);
                    }
                    backward.insert(next.clone(), ops);
                    next_front.push(next);
                }
            }
            front_b = next_front;
            depth_b += 1;
        }
        if let Some(best) = found.into_iter().min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y))) {
            return Some(EquivalenceWitness { ops: best });
        }
        if front_f.is_empty() && front_b.is_empty() {
            break;
        }
    }
    None
}

/// Witness search between two rationals, using their long-division
/// expansions.
pub fn equivalent_witness(
    r1: &Rational,
    r2: &Rational,
    tm: &TurnMap,
    budget: Budget,
) -> Result<Option<EquivalenceWitness>> {
    let d1 = expand(r1, tm.base())?;
    let d2 = expand(r2, tm.base())?;
    Ok(witness_between(&d1, &d2, tm, budget))
}

/// Walk state plus the digits still to come.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TailState {
    position: LatticePoint,
    direction: Direction,
    rest: EventuallyPeriodicDigits,
}

fn tail_states(d: &EventuallyPeriodicDigits, tm: &TurnMap, horizon: usize) -> Result<Vec<TailState>> {
    let path = walk_prefix(d.digits(), horizon, tm)?;
    Ok(path
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| TailState {
            position: s.position,
            direction: s.direction,
            rest: d.suffix(i),
        })
        .collect())
}

/// The first step `i2` of the second walk, and the first step `i1` of the
/// first walk, both at most `horizon`, at which the two walks stand on the same
/// point facing the same way with the same digits still to come, so they
/// coincide from there on.
pub fn tails_agree_digits(
    d1: &EventuallyPeriodicDigits,
    d2: &EventuallyPeriodicDigits,
    tm: &TurnMap,
    horizon: usize,
) -> Result<Option<(usize, usize)>> {
    let mut first_seen: HashMap<TailState, usize> = HashMap::new();
    for (i1, st) in tail_states(d1, tm, horizon)?.into_iter().enumerate() {
        first_seen.entry(st).or_insert(i1);
    }
    Ok(tail_states(d2, tm, horizon)?
        .into_iter()
        .enumerate()
        .find_map(|(i2, st)| first_seen.get(&st).map(|&i1| (i1, i2))))
}

pub fn tails_agree(r1: &Rational, r2: &Rational, tm: &TurnMap, horizon: usize) -> Result<Option<(usize, usize)>> {
    tails_agree_digits(&expand(r1, tm.base())?, &expand(r2, tm.base())?, tm, horizon)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Difference {
    /// `r1 - r2`.
    pub value: Rational,
    /// Closed-form value change of each op along the witness.
    pub deltas: Vec<Rational>,
}

/// Replays the witness from `r1`, checks it lands on `r2`, and confirms that
/// the per-op value changes add up to `r2 - r1`.
pub fn difference_is_rational(
    r1: &Rational,
    r2: &Rational,
    witness: &EquivalenceWitness,
    tm: &TurnMap,
) -> Result<Difference> {
    let mut d = expand(r1, tm.base())?;
    let mut deltas = Vec::with_capacity(witness.ops.len());
    for &op in &witness.ops {
        deltas.push(op_delta(&d, op, tm)?);
        d = apply(&d, op, tm)?;
    }
    let target = expand(r2, tm.base())?;
    if d != target {
        return Err(Error::WitnessMismatch(format!("replay ends at {d}, expected {target}")));
    }
    let total = deltas.iter().fold(Rational::zero(), |acc, x| acc + x);
    if total != r2 - r1 {
        return Err(Error::WitnessMismatch(format!(
            "op deltas sum to {total}, direct difference is {}",
            r2 - r1
        )));
    }
    Ok(Difference {
        value: r1 - r2,
        deltas,
    })
}

/// Searches the surgery neighbourhood of `r` (breadth first, within the
/// budget) for a number whose walk leaves the disk of the given radius.
pub fn search_outside_k(
    r: &Rational,
    radius: &Rational,
    tm: &TurnMap,
    budget: Budget,
) -> Result<Option<(EquivalenceWitness, EventuallyPeriodicDigits, Membership)>> {
    let start = expand(r, tm.base())?;
    let mut seen: HashMap<EventuallyPeriodicDigits, Vec<SurgeryOp>> = HashMap::new();
    seen.insert(start.clone(), Vec::new());
    let mut front = vec![start];
    for depth in 0..=budget.max_ops {
        let mut next_front = Vec::new();
        for node in &front {
            let ops = seen[node].clone();
            let verdict = in_class_k(&classify(node, tm)?, radius)?;
            if !verdict.is_member() {
                return Ok(Some((EquivalenceWitness { ops }, node.clone(), verdict)));
            }
            if depth == budget.max_ops {
                continue;
            }
            for (op, next, _) in neighbours(node, tm, budget.max_position) {
                if seen.contains_key(&next) {
                    continue;
                }
                let mut path = ops.clone();
                path.push(op);
                seen.insert(next.clone(), path);
                next_front.push(next);
            }
        }
        front = next_front;
    }
    Ok(None)
}

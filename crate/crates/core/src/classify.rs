//! Fate of the infinite walk of an eventually periodic expansion.
//!
//! One period of digits acts on the turtle as a rigid motion: a rotation by
//! `tau` units and a translation `v`. If the rotation is nontrivial, `k`
//! copies of the period close up into a loop (`k = D / gcd(tau mod D, D)`).
//! If it is trivial, the walk either repeats itself in place (`v = 0`) or
//! drifts away by a constant displacement every period.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::digits::{expand, EventuallyPeriodicDigits, Rational};
use crate::error::{Error, Result};
use crate::lattice::{GridSpec, LatticePoint};
use crate::walk::{walk_prefix, Path, TurnMap, WalkState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodIsometry {
    /// Net turn over one period, in units of `2π/D`.
    pub tau: i64,
    /// `tau` reduced into `[0, D)`.
    pub tau_mod: u8,
    /// Displacement of one period, starting from the origin facing direction 0.
    pub v: LatticePoint,
}

/// Rotation and translation effected by walking one period.
pub fn period_isometry(d: &EventuallyPeriodicDigits, tm: &TurnMap) -> Result<PeriodIsometry> {
    check_base(d, tm)?;
    let path = walk_prefix(d.period().iter().copied(), d.period().len(), tm)?;
    let end = path.last();
    Ok(PeriodIsometry {
        tau: end.turn_sum,
        tau_mod: end.direction.index(),
        v: end.position,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Closed {
        multiplier: u32,
        cycle_length: usize,
        distinct_points: usize,
        max_norm_sq: i64,
    },
    Drift {
        /// Per-period displacement in the global frame after the preperiod.
        v_global: LatticePoint,
    },
}

impl Verdict {
    pub fn is_closed(&self) -> bool {
        matches!(self, Verdict::Closed { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Closed { .. } => "closed",
            Verdict::Drift { .. } => "drift",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub isometry: PeriodIsometry,
    pub verdict: Verdict,
    /// `tau / (D * period length)`: average turn per digit, in full turns.
    pub torsion_rate: Rational,
}

/// A classification together with the walk that certifies it.
///
/// The recorded path covers the preperiod and one full cycle (closed) or one
/// period (drift); every later state follows from it exactly.
#[derive(Clone, Debug)]
pub struct Classified {
    digits: EventuallyPeriodicDigits,
    classification: Classification,
    path: Path,
}

impl Classified {
    pub fn digits(&self) -> &EventuallyPeriodicDigits {
        &self.digits
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn verdict(&self) -> &Verdict {
        &self.classification.verdict
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn grid(&self) -> GridSpec {
        self.path.grid()
    }

    pub fn preperiod_len(&self) -> usize {
        self.digits.preperiod().len()
    }

    pub fn period_len(&self) -> usize {
        self.digits.period().len()
    }

    /// Steps after which the tail repeats as a state cycle (closed) or as a
    /// translated copy (drift).
    fn repeat_len(&self) -> usize {
        match self.classification.verdict {
            Verdict::Closed { cycle_length, .. } => cycle_length,
            Verdict::Drift { .. } => self.period_len(),
        }
    }

    /// Exact state after `i` digits, for any `i`.
    pub fn state_at(&self, i: usize) -> WalkState {
        let pre = self.preperiod_len();
        if i <= pre {
            return self.path.states()[i];
        }
        let len = self.repeat_len();
        let (m, j) = ((i - pre) / len, (i - pre) % len);
        let base = self.path.states()[pre + j];
        let m = m as i64;
        let (shift, turned) = match self.classification.verdict {
            Verdict::Closed { .. } => {
                let k = len / self.period_len();
                (LatticePoint::ORIGIN, self.classification.isometry.tau * k as i64)
            }
            Verdict::Drift { v_global } => (v_global, self.classification.isometry.tau),
        };
        WalkState {
            position: base.position + shift * m,
            direction: base.direction,
            step_index: i as u64,
            turn_sum: base.turn_sum + turned * m,
        }
    }

    pub fn position_at(&self, i: usize) -> LatticePoint {
        self.state_at(i).position
    }
}

fn check_base(d: &EventuallyPeriodicDigits, tm: &TurnMap) -> Result<()> {
    if d.base() == tm.base() {
        Ok(())
    } else {
        Err(Error::TurnMap(format!(
            "expansion is in base {} but the turn map expects base {}",
            d.base(),
            tm.base()
        )))
    }
}

/// Classifies the walk of `r` using its expansion in the turn map's base.
pub fn classify_rational(r: &Rational, tm: &TurnMap) -> Result<Classified> {
    classify(&expand(r, tm.base())?, tm)
}

pub fn classify(d: &EventuallyPeriodicDigits, tm: &TurnMap) -> Result<Classified> {
    let iso = period_isometry(d, tm)?;
    let pre = d.preperiod().len();
    let period = d.period().len();
    let dcount = tm.direction_count();
    let torsion_rate = Rational::new(
        BigInt::from(iso.tau),
        BigInt::from(i64::from(dcount) * period as i64),
    );

    if iso.tau_mod == 0 && !iso.v.is_origin() {
        let path = walk_prefix(d.digits(), pre + period, tm)?;
        let start = path.states()[pre];
        let v_global = tm.grid().rotate(iso.v, i64::from(start.direction.index()));
        assert_eq!(path.last().position - start.position, v_global);
        return Ok(Classified {
            digits: d.clone(),
            classification: Classification {
                isometry: iso,
                verdict: Verdict::Drift { v_global },
                torsion_rate,
            },
            path,
        });
    }

    let multiplier = u32::from(dcount / (iso.tau_mod).gcd(&dcount));
    let cycle_length = multiplier as usize * period;
    let path = walk_prefix(d.digits(), pre + cycle_length, tm)?;
    let states = path.states();
    let start = states[pre];
    let end = path.last();
    assert!(
        end.position == start.position && end.direction == start.direction,
        "cycle of {d} failed to close"
    );
    let mut cycle_points: Vec<LatticePoint> = states[pre..pre + cycle_length]
        .iter()
        .map(|s| s.position)
        .collect();
    cycle_points.sort_unstable();
    cycle_points.dedup();
    let max_norm_sq = states
        .iter()
        .map(|s| tm.grid().norm_sq(s.position))
        .max()
        .unwrap_or(0);
    Ok(Classified {
        digits: d.clone(),
        classification: Classification {
            isometry: iso,
            verdict: Verdict::Closed {
                multiplier,
                cycle_length,
                distinct_points: cycle_points.len(),
                max_norm_sq,
            },
            torsion_rate,
        },
        path,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Member,
    /// The first step whose point is at distance at least the radius.
    Outside { step: usize, norm_sq: i64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// `norm_sq >= radius²`, exactly.
fn reaches(norm_sq: i64, radius: &Rational) -> bool {
    BigInt::from(norm_sq) * radius.denom() * radius.denom() >= radius.numer() * radius.numer()
}

fn isqrt_floor(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn isqrt_ceil(n: i64) -> i64 {
    let r = isqrt_floor(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Decides whether every point of the walk lies strictly inside the disk of
/// the given radius around the start.
pub fn in_class_k(c: &Classified, radius: &Rational) -> Result<Membership> {
    if !radius.is_positive() {
        return Err(Error::NonPositiveRadius);
    }
    let grid = c.grid();
    let first_outside = |limit: usize| {
        (0..=limit).find_map(|i| {
            let n = grid.norm_sq(c.position_at(i));
            reaches(n, radius).then_some(Membership::Outside { step: i, norm_sq: n })
        })
    };
    match c.classification.verdict {
        Verdict::Closed { max_norm_sq, .. } => {
            if reaches(max_norm_sq, radius) {
                Ok(first_outside(c.path.last_index()).expect("maximum is attained on the path"))
            } else {
                Ok(Membership::Member)
            }
        }
        Verdict::Drift { v_global } => {
            // After m periods every point is at least m|v| - |P| - reach away,
            // where P is the point ending the preperiod and reach bounds the
            // distance of any point of one period from its start.
            let pre = c.preperiod_len();
            let anchor = c.path.states()[pre].position;
            let reach = c.path.states()[pre..]
                .iter()
                .map(|s| grid.norm_sq(s.position - anchor))
                .max()
                .unwrap_or(0);
            let radius_up = radius.ceil().to_integer();
            let span = radius_up
                + BigInt::from(isqrt_ceil(grid.norm_sq(anchor)))
                + BigInt::from(isqrt_ceil(reach));
            let step_len = BigInt::from(isqrt_floor(grid.norm_sq(v_global)));
            let periods: BigInt = span.div_ceil(&step_len) + 1;
            let periods = usize::try_from(periods).expect("horizon fits in memory");
            let limit = pre + periods * c.period_len();
            Ok(first_outside(limit).expect("horizon is sufficient"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Simplicity {
    /// No lattice point is reached twice; for a closed walk, within one
    /// traversal of the preperiod and the cycle (its points then recur
    /// forever, flagged by `cycle_recurs`).
    Simple { cycle_recurs: bool },
    /// Earliest repetition: `second` is the first step landing on a point
    /// already visited, at step `first`.
    Repeated {
        first: usize,
        second: usize,
        point: LatticePoint,
    },
}

/// Exact integer `t` with `d = t·v`, if any.
fn integer_multiple(d: LatticePoint, v: LatticePoint) -> Option<i64> {
    let t = if v.a != 0 {
        if d.a % v.a != 0 {
            return None;
        }
        d.a / v.a
    } else {
        if d.a != 0 || v.b == 0 || d.b % v.b != 0 {
            return None;
        }
        d.b / v.b
    };
    (d == v * t).then_some(t)
}

/// Decides self-avoidance of the whole infinite walk.
pub fn is_simple(c: &Classified) -> Simplicity {
    let pre = c.preperiod_len();
    match c.classification.verdict {
        Verdict::Closed { cycle_length, .. } => {
            let mut seen = HashMap::new();
            for (i, s) in c.path.states()[..pre + cycle_length].iter().enumerate() {
                if let Some(&first) = seen.get(&s.position) {
                    return Simplicity::Repeated {
                        first,
                        second: i,
                        point: s.position,
                    };
                }
                seen.insert(s.position, i);
            }
            Simplicity::Simple { cycle_recurs: true }
        }
        Verdict::Drift { v_global } => {
            let period = c.period_len();
            let states = c.path.states();
            let head: Vec<LatticePoint> = states[..pre].iter().map(|s| s.position).collect();
            let tail: Vec<LatticePoint> = states[pre..pre + period].iter().map(|s| s.position).collect();
            // (later, earlier) index pairs landing on the same point
            let mut best: Option<(usize, usize)> = None;
            let mut offer = |x: usize, y: usize| {
                let pair = (x.max(y), x.min(y));
                if best.is_none_or(|b| pair < b) {
                    best = Some(pair);
                }
            };
            for i in 0..head.len() {
                for i2 in i + 1..head.len() {
                    if head[i] == head[i2] {
                        offer(i, i2);
                    }
                }
                for (j, &y) in tail.iter().enumerate() {
                    if let Some(m) = integer_multiple(head[i] - y, v_global) {
                        if m >= 0 {
                            offer(i, pre + j + m as usize * period);
                        }
                    }
                }
            }
            for j in 0..tail.len() {
                for j2 in j + 1..tail.len() {
                    if let Some(t) = integer_multiple(tail[j] - tail[j2], v_global) {
                        // tail[j] + m v = tail[j2] + (m + t) v
                        let m = (-t).max(0);
                        offer(pre + j + m as usize * period, pre + j2 + (m + t) as usize * period);
                    }
                }
            }
            match best {
                None => Simplicity::Simple { cycle_recurs: false },
                Some((second, first)) => Simplicity::Repeated {
                    first,
                    second,
                    point: c.position_at(second),
                },
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visits {
    /// Visits at steps `1..=window`.
    pub count: u64,
    /// Visits over the whole infinite walk, counted from step 1.
    pub eventual: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    /// The start point, occupied at step 0 and not included in the counts.
    pub start: LatticePoint,
    pub window: usize,
    pub points: BTreeMap<LatticePoint, Visits>,
}

fn eventual_multiplicity(c: &Classified, point: LatticePoint) -> Multiplicity {
    let pre = c.preperiod_len();
    let states = c.path.states();
    let head = states[1..pre.max(1)].iter().filter(|s| s.position == point).count() as u64;
    match c.classification.verdict {
        Verdict::Closed { cycle_length, .. } => {
            if states[pre..pre + cycle_length].iter().any(|s| s.position == point) {
                Multiplicity::Infinite
            } else {
                Multiplicity::Finite(head)
            }
        }
        Verdict::Drift { v_global } => {
            let period = c.period_len();
            let tail = states[pre..pre + period]
                .iter()
                .enumerate()
                .filter(|&(j, s)| {
                    integer_multiple(point - s.position, v_global)
                        .is_some_and(|m| m >= 0 && (pre + j + m as usize * period) >= 1)
                })
                .count() as u64;
            Multiplicity::Finite(head + tail)
        }
    }
}

/// Visit counts over steps `1..=window` with the eventual multiplicity of
/// each visited point.
pub fn visit_census(c: &Classified, window: usize) -> Census {
    let mut counts: BTreeMap<LatticePoint, u64> = BTreeMap::new();
    for i in 1..=window {
        *counts.entry(c.position_at(i)).or_default() += 1;
    }
    let points = counts
        .into_iter()
        .map(|(p, count)| {
            (
                p,
                Visits {
                    count,
                    eventual: eventual_multiplicity(c, p),
                },
            )
        })
        .collect();
    Census {
        start: LatticePoint::ORIGIN,
        window,
        points,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    /// Steps `(i, j)`, `i < j`, with the walk beyond the far radius at `i`
    /// and back inside the near radius at `j`.
    pub witness: Option<(usize, usize)>,
    pub horizon: usize,
    pub max_norm_sq: i64,
}

/// Scans steps `0..=horizon` of any walk for an excursion beyond `far`
/// followed by a return within `near`.
pub fn recurrence_scan<I>(positions: I, grid: GridSpec, far: &Rational, near: &Rational) -> RecurrenceReport
where
    I: IntoIterator<Item = LatticePoint>,
{
    let mut far_at = None;
    let mut witness = None;
    let mut max_norm_sq = 0;
    let mut horizon = 0;
    for (i, p) in positions.into_iter().enumerate() {
        horizon = i;
        let n = grid.norm_sq(p);
        max_norm_sq = max_norm_sq.max(n);
        match far_at {
            None => {
                // beyond far: n > far², i.e. not (far² >= n)
                if !reaches_not_beyond(n, far) {
                    far_at = Some(i);
                }
            }
            Some(i0) if witness.is_none() && !reaches(n, near) => witness = Some((i0, i)),
            _ => {}
        }
    }
    RecurrenceReport {
        witness,
        horizon,
        max_norm_sq,
    }
}

/// `norm_sq <= radius²`, exactly.
fn reaches_not_beyond(norm_sq: i64, radius: &Rational) -> bool {
    BigInt::from(norm_sq) * radius.denom() * radius.denom() <= radius.numer() * radius.numer()
}

pub fn recurrence_stats(c: &Classified, far: &Rational, near: &Rational, horizon: usize) -> RecurrenceReport {
    recurrence_scan((0..=horizon).map(|i| c.position_at(i)), c.grid(), far, near)
}

//! The turtle: each digit turns the heading by a fixed amount at the current
//! lattice point, then the turtle advances one unit step.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::digits::Rational;
use crate::error::{Error, Result};
use crate::lattice::{Direction, GridSpec, LatticePoint};

/// A named digit-to-turn assignment on a particular grid.
#[derive(Debug, Clone, Copy)]
pub struct Scheme {
    pub name: &'static str,
    pub base: u32,
    pub grid: GridSpec,
    /// Turn for each digit, in units of `2π/D`; positive is counterclockwise.
    pub turns: &'static [i8],
}

/// Built-in schemes, one per supported base.
pub const SCHEMES: [Scheme; 3] = [
    Scheme {
        name: "binary-hex",
        base: 2,
        grid: GridSpec::HEX,
        turns: &[1, -1],
    },
    Scheme {
        name: "ternary-square",
        base: 3,
        grid: GridSpec::SQUARE,
        turns: &[1, 0, -1],
    },
    Scheme {
        name: "quinary-hex",
        base: 5,
        grid: GridSpec::HEX,
        turns: &[2, 1, 0, -1, -2],
    },
];

impl Scheme {
    pub fn by_name(name: &str) -> Result<Scheme> {
        SCHEMES
            .iter()
            .find(|s| s.name == name)
            .copied()
            .ok_or_else(|| Error::UnknownName {
                kind: "scheme",
                name: name.to_string(),
            })
    }

    pub fn for_base(base: u32) -> Result<Scheme> {
        SCHEMES
            .iter()
            .find(|s| s.base == base)
            .copied()
            .ok_or(Error::InvalidBase(base))
    }

    pub fn turn_map(&self) -> TurnMap {
        TurnMap::new(self.base, self.grid, self.turns.to_vec()).expect("built-in schemes are valid")
    }
}

/// Orientation of the digit-to-turn assignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurnSign {
    /// Low digits turn left.
    #[default]
    Positive,
    /// Mirror image: low digits turn right.
    Negative,
}

impl FromStr for TurnSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "left" => Ok(TurnSign::Positive),
            "-" | "-1" | "right" => Ok(TurnSign::Negative),
            other => Err(Error::Parse {
                input: other.to_string(),
                reason: "turn sign must be +1 or -1".to_string(),
            }),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TurnMap {
    base: u32,
    grid: GridSpec,
    turns: Vec<i8>,
    units: Vec<LatticePoint>,
}

impl TurnMap {
    /// Each turn must lie in `(-D/2, D/2]`.
    pub fn new(base: u32, grid: GridSpec, turns: Vec<i8>) -> Result<Self> {
        if turns.len() != base as usize {
            return Err(Error::TurnMap(format!(
                "{} turns given for base {base}",
                turns.len()
            )));
        }
        let d = i16::from(grid.direction_count());
        if let Some(&t) = turns.iter().find(|&&t| !(-d < 2 * i16::from(t) && 2 * i16::from(t) <= d)) {
            return Err(Error::TurnMap(format!(
                "turn {t} outside (-{d}/2, {d}/2]"
            )));
        }
        let units = (0..grid.direction_count())
            .map(|k| grid.unit_vector(Direction(k)))
            .collect();
        Ok(TurnMap {
            base,
            grid,
            turns,
            units,
        })
    }

    /// Default scheme for `base`.
    pub fn for_base(base: u32) -> Result<Self> {
        Ok(Scheme::for_base(base)?.turn_map())
    }

    /// Default scheme for `base`, optionally checked against a requested grid
    /// and mirrored when `sign` is negative.
    pub fn configured(base: u32, grid: Option<GridSpec>, sign: TurnSign) -> Result<Self> {
        let scheme = Scheme::for_base(base)?;
        if let Some(g) = grid {
            if g != scheme.grid {
                return Err(Error::Pairing {
                    base,
                    grid: g.name(),
                });
            }
        }
        scheme.turn_map().with_sign(sign)
    }

    pub fn with_sign(self, sign: TurnSign) -> Result<Self> {
        match sign {
            TurnSign::Positive => Ok(self),
            TurnSign::Negative => {
                let turns = self.turns.iter().map(|t| -t).collect();
                TurnMap::new(self.base, self.grid, turns)
            }
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn direction_count(&self) -> u8 {
        self.grid.direction_count()
    }

    pub fn turns(&self) -> &[i8] {
        &self.turns
    }

    pub fn turn(&self, digit: u8) -> Result<i8> {
        self.turns
            .get(usize::from(digit))
            .copied()
            .ok_or(Error::DigitOutOfRange {
                digit: digit.into(),
                base: self.base,
            })
    }

    /// Shortest run of `digit` that brings the turtle back to where it
    /// started; `None` for a straight-ahead digit.
    pub fn closing_run(&self, digit: u8) -> Result<Option<usize>> {
        let t = i64::from(self.turn(digit)?);
        if t == 0 {
            return Ok(None);
        }
        let d = i64::from(self.direction_count());
        Ok((1..=d).find(|m| (m * t) % d == 0).map(|m| m as usize))
    }

    #[inline]
    fn unit(&self, dir: Direction) -> LatticePoint {
        self.units[usize::from(dir.0)]
    }
}

impl fmt::Debug for TurnMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TurnMap")
            .field("base", &self.base)
            .field("grid", &self.grid.name())
            .field("turns", &self.turns)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkState {
    pub position: LatticePoint,
    pub direction: Direction,
    pub step_index: u64,
    /// Signed sum of all turns so far, in units of `2π/D`, not reduced.
    pub turn_sum: i64,
}

impl WalkState {
    pub const START: WalkState = WalkState {
        position: LatticePoint::ORIGIN,
        direction: Direction::INITIAL,
        step_index: 0,
        turn_sum: 0,
    };

    /// Reflection of this state across the initial axis.
    pub fn mirrored(&self, grid: GridSpec) -> WalkState {
        let d = grid.direction_count();
        WalkState {
            position: grid.mirror(self.position),
            direction: Direction((d - self.direction.0) % d),
            step_index: self.step_index,
            turn_sum: -self.turn_sum,
        }
    }
}

/// Consumes one digit: turn, then move.
pub fn step(s: &WalkState, z: u8, tm: &TurnMap) -> Result<WalkState> {
    let t = tm.turn(z)?;
    Ok(advance(s, t, tm))
}

#[inline]
fn advance(s: &WalkState, turn: i8, tm: &TurnMap) -> WalkState {
    let direction = s.direction.turned(i64::from(turn), tm.direction_count());
    WalkState {
        position: s.position + tm.unit(direction),
        direction,
        step_index: s.step_index + 1,
        turn_sum: s.turn_sum + i64::from(turn),
    }
}

/// Streaming turtle that keeps only its current state.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    map: &'a TurnMap,
    state: WalkState,
}

impl<'a> Walker<'a> {
    pub fn new(map: &'a TurnMap) -> Self {
        Walker::from_state(map, WalkState::START)
    }

    pub fn from_state(map: &'a TurnMap, state: WalkState) -> Self {
        Walker { map, state }
    }

    pub fn state(&self) -> &WalkState {
        &self.state
    }

    pub fn push(&mut self, z: u8) -> Result<&WalkState> {
        self.state = step(&self.state, z, self.map)?;
        Ok(&self.state)
    }
}

/// A recorded walk; `states[i]` is the state after consuming `z_1..z_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    turnmap: TurnMap,
    states: Vec<WalkState>,
}

impl Path {
    pub fn turnmap(&self) -> &TurnMap {
        &self.turnmap
    }

    pub fn grid(&self) -> GridSpec {
        self.turnmap.grid
    }

    pub fn states(&self) -> &[WalkState] {
        &self.states
    }

    pub fn last_index(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &WalkState {
        self.states.last().expect("a path holds at least the start state")
    }

    pub fn positions(&self) -> Vec<LatticePoint> {
        self.states.iter().map(|s| s.position).collect()
    }

    pub fn state(&self, i: usize) -> Result<&WalkState> {
        self.states.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            last: self.last_index(),
        })
    }
}

/// Walks the first `n` digits of `digits`.
pub fn walk_prefix<I>(digits: I, n: usize, tm: &TurnMap) -> Result<Path>
where
    I: IntoIterator<Item = u8>,
{
    let mut states = Vec::with_capacity(n + 1);
    let mut current = WalkState::START;
    states.push(current);
    let mut source = digits.into_iter();
    for taken in 0..n {
        let z = source.next().ok_or(Error::SourceExhausted {
            available: taken,
            requested: n,
        })?;
        current = step(&current, z, tm)?;
        debug_assert_eq!(tm.grid.norm_sq(current.position - states[taken].position), 1);
        states.push(current);
    }
    Ok(Path {
        turnmap: tm.clone(),
        states,
    })
}

/// Torsion number `R_i / D` at step `i`.
pub fn torsion(p: &Path, i: usize) -> Result<Rational> {
    let s = p.state(i)?;
    Ok(Rational::new(
        BigInt::from(s.turn_sum),
        BigInt::from(p.grid().direction_count()),
    ))
}

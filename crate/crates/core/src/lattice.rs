//! Exact integer lattices.
//!
//! Every grid is a [`Lattice`] implementation, reachable by name through
//! [`GridSpec::by_name`]. Points use axial integer coordinates: for the
//! hexagonal-direction grid the basis vectors sit at 0° and 60°, for the
//! square grid at 0° and 90°. Floating point only appears in
//! [`Lattice::to_cartesian`], which is used for rendering.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        LatticePoint { a, b }
    }

    pub fn is_origin(self) -> bool {
        self == Self::ORIGIN
    }

    /// Parses `"a,b"`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = || Error::Parse {
            input: text.to_string(),
            reason: "expected `a,b` with integer coordinates".to_string(),
        };
        let (a, b) = text.split_once(',').ok_or_else(err)?;
        Ok(LatticePoint::new(
            a.trim().parse().map_err(|_| err())?,
            b.trim().parse().map_err(|_| err())?,
        ))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.a, -self.b)
    }
}

impl Mul<i64> for LatticePoint {
    type Output = LatticePoint;
    fn mul(self, k: i64) -> LatticePoint {
        LatticePoint::new(self.a * k, self.b * k)
    }
}

/// Heading index; 0 is the initial direction, counting counterclockwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Direction(pub u8);

impl Direction {
    pub const INITIAL: Direction = Direction(0);

    /// Reduces `turns` modulo `count`.
    pub fn from_turns(turns: i64, count: u8) -> Direction {
        Direction(turns.rem_euclid(i64::from(count)) as u8)
    }

    pub fn turned(self, by: i64, count: u8) -> Direction {
        Direction::from_turns(i64::from(self.0) + by, count)
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

/// A planar lattice with `D` equally spaced step directions.
pub trait Lattice: Send + Sync + fmt::Debug {
    /// Registry name.
    fn name(&self) -> &'static str;

    /// Number of step directions `D`.
    fn direction_count(&self) -> u8;

    /// One quarter (square) or one sixth (hex) turn counterclockwise.
    fn rotate_once(&self, p: LatticePoint) -> LatticePoint;

    fn norm_sq(&self, p: LatticePoint) -> i64;

    /// Reflection across the axis of direction 0.
    fn mirror(&self, p: LatticePoint) -> LatticePoint;

    fn to_cartesian(&self, p: LatticePoint) -> (f64, f64);

    /// Integer coordinates of a positively scaled copy of the Cartesian
    /// embedding that keeps horizontal lines horizontal. Orientation
    /// predicates evaluated here agree with the true geometry.
    fn ray_frame(&self, p: LatticePoint) -> (i64, i64);

    fn rotate(&self, p: LatticePoint, steps: i64) -> LatticePoint {
        let turns = steps.rem_euclid(i64::from(self.direction_count()));
        (0..turns).fold(p, |q, _| self.rotate_once(q))
    }

    fn unit_vector(&self, dir: Direction) -> LatticePoint {
        self.rotate(LatticePoint::new(1, 0), i64::from(dir.0))
    }
}

/// Triangular lattice with six step directions.
#[derive(Debug, Clone, Copy)]
pub struct HexLattice;

impl Lattice for HexLattice {
    fn name(&self) -> &'static str {
        "hex"
    }

    fn direction_count(&self) -> u8 {
        6
    }

    fn rotate_once(&self, p: LatticePoint) -> LatticePoint {
        LatticePoint::new(-p.b, p.a + p.b)
    }

    fn norm_sq(&self, p: LatticePoint) -> i64 {
        p.a * p.a + p.a * p.b + p.b * p.b
    }

    fn mirror(&self, p: LatticePoint) -> LatticePoint {
        LatticePoint::new(p.a + p.b, -p.b)
    }

    fn to_cartesian(&self, p: LatticePoint) -> (f64, f64) {
        let (a, b) = (p.a as f64, p.b as f64);
        (a + b / 2.0, b * 3f64.sqrt() / 2.0)
    }

    fn ray_frame(&self, p: LatticePoint) -> (i64, i64) {
        (2 * p.a + p.b, p.b)
    }

    fn unit_vector(&self, dir: Direction) -> LatticePoint {
        const UNITS: [LatticePoint; 6] = [
            LatticePoint::new(1, 0),
            LatticePoint::new(0, 1),
            LatticePoint::new(-1, 1),
            LatticePoint::new(-1, 0),
            LatticePoint::new(0, -1),
            LatticePoint::new(1, -1),
        ];
        UNITS[usize::from(dir.0 % 6)]
    }
}

/// Square lattice with four step directions.
#[derive(Debug, Clone, Copy)]
pub struct SquareLattice;

impl Lattice for SquareLattice {
    fn name(&self) -> &'static str {
        "square"
    }

    fn direction_count(&self) -> u8 {
        4
    }

    fn rotate_once(&self, p: LatticePoint) -> LatticePoint {
        LatticePoint::new(-p.b, p.a)
    }

    fn norm_sq(&self, p: LatticePoint) -> i64 {
        p.a * p.a + p.b * p.b
    }

    fn mirror(&self, p: LatticePoint) -> LatticePoint {
        LatticePoint::new(p.a, -p.b)
    }

    fn to_cartesian(&self, p: LatticePoint) -> (f64, f64) {
        (p.a as f64, p.b as f64)
    }

    fn ray_frame(&self, p: LatticePoint) -> (i64, i64) {
        (p.a, p.b)
    }
}

static HEX: HexLattice = HexLattice;
static SQUARE: SquareLattice = SquareLattice;
static REGISTRY: [&dyn Lattice; 2] = [&HEX, &SQUARE];

/// Copyable handle to a registered lattice.
#[derive(Clone, Copy)]
pub struct GridSpec(&'static dyn Lattice);

impl GridSpec {
    pub const HEX: GridSpec = GridSpec(&HEX);
    pub const SQUARE: GridSpec = GridSpec(&SQUARE);

    pub fn by_name(name: &str) -> Result<GridSpec> {
        REGISTRY
            .iter()
            .find(|l| l.name() == name)
            .map(|&l| GridSpec(l))
            .ok_or_else(|| Error::UnknownName {
                kind: "grid",
                name: name.to_string(),
            })
    }

    /// Names of all registered lattices.
    pub fn names() -> impl Iterator<Item = &'static str> {
        REGISTRY.iter().map(|l| l.name())
    }

    pub fn lattice(&self) -> &'static dyn Lattice {
        self.0
    }
}

impl Deref for GridSpec {
    type Target = dyn Lattice;
    fn deref(&self) -> &Self::Target {
        self.0
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

impl Eq for GridSpec {}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridSpec({})", self.name())
    }
}

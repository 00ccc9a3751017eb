//! Winding numbers with exact integer predicates.
//!
//! The winding of an open walk around `B` is the signed count of crossings
//! of the ray from `B` towards +x. On closed loops this is the topological
//! winding number; on open walks it depends on the ray direction, which is
//! fixed here. Segments with an endpoint at `B` are skipped entirely.

use crate::error::{Error, Result};
use crate::lattice::{GridSpec, LatticePoint};
use crate::walk::Path;

/// Winding of a walk from the start up to step `upto` around `center`.
#[derive(Clone, Copy, Debug)]
pub struct WindingQuery<'a> {
    pub path: &'a Path,
    pub upto: usize,
    pub center: LatticePoint,
}

impl<'a> WindingQuery<'a> {
    /// Query up to the last step, around the start point.
    pub fn new(path: &'a Path) -> Self {
        WindingQuery {
            path,
            upto: path.last_index(),
            center: LatticePoint::ORIGIN,
        }
    }

    pub fn upto(mut self, upto: usize) -> Self {
        self.upto = upto;
        self
    }

    pub fn around(mut self, center: LatticePoint) -> Self {
        self.center = center;
        self
    }
}

/// Signed crossing of segment `p -> q` with the ray from `center` towards +x.
fn crossing(grid: GridSpec, p: LatticePoint, q: LatticePoint, center: LatticePoint) -> i64 {
    if p == center || q == center {
        return 0;
    }
    let (px, py) = grid.ray_frame(p);
    let (qx, qy) = grid.ray_frame(q);
    let (bx, by) = grid.ray_frame(center);
    let side = (qx - px) * (by - py) - (qy - py) * (bx - px);
    if py <= by && by < qy && side > 0 {
        1
    } else if qy <= by && by < py && side < 0 {
        -1
    } else {
        0
    }
}

/// Signed ray-crossing count of the polyline through `points`.
pub fn crossing_count(points: &[LatticePoint], grid: GridSpec, center: LatticePoint) -> i64 {
    points
        .windows(2)
        .map(|w| crossing(grid, w[0], w[1], center))
        .sum()
}

pub fn winding(q: &WindingQuery<'_>) -> Result<i64> {
    let states = q.path.states();
    if q.upto >= states.len() {
        return Err(Error::IndexOutOfRange {
            index: q.upto,
            last: q.path.last_index(),
        });
    }
    let grid = q.path.grid();
    Ok(states[..=q.upto]
        .windows(2)
        .map(|w| crossing(grid, w[0].position, w[1].position, q.center))
        .sum())
}

/// Winding around `center` at every step index of the path.
pub fn winding_profile(path: &Path, center: LatticePoint) -> Vec<i64> {
    let grid = path.grid();
    let mut total = 0;
    let mut profile = Vec::with_capacity(path.states().len());
    profile.push(0);
    for w in path.states().windows(2) {
        total += crossing(grid, w[0].position, w[1].position, center);
        profile.push(total);
    }
    profile
}

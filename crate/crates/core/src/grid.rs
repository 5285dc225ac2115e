//! Square-lattice addressing shared by every module.
//!
//! Vertices are stored row-major: `index = y * n + x`. The `y` axis points
//! "up" for orientation purposes, so counterclockwise means counterclockwise
//! in the usual mathematical sense of the `(x, y)` plane.

use serde::{Deserialize, Serialize};

/// A lattice vertex, `x` the column and `y` the row.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: usize,
    pub y: usize,
}

impl GridPoint {
    pub const fn new(x: usize, y: usize) -> Self {
        GridPoint { x, y }
    }

    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.y * n + self.x
    }

    #[inline]
    pub fn from_index(index: usize, n: usize) -> Self {
        GridPoint {
            x: index % n,
            y: index / n,
        }
    }

    /// Euclidean distance in lattice units.
    pub fn lattice_distance(self, other: GridPoint) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        dx.hypot(dy)
    }

    pub fn is_interior(self, n: usize) -> bool {
        self.x > 0 && self.y > 0 && self.x + 1 < n && self.y + 1 < n
    }

    pub fn on_border(self, n: usize) -> bool {
        self.x == 0 || self.y == 0 || self.x + 1 == n || self.y + 1 == n
    }
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Neighbourhood used by the path metric.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adjacency {
    #[default]
    Four,
    Eight,
}

pub(crate) const OFFSETS_4: [(isize, isize); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
pub(crate) const OFFSETS_8: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

impl Adjacency {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Adjacency::Four => &OFFSETS_4,
            Adjacency::Eight => &OFFSETS_8,
        }
    }
}

/// Neighbours of `index` inside an `n`-by-`n` grid.
#[inline]
pub(crate) fn neighbors(
    index: usize,
    n: usize,
    adjacency: Adjacency,
) -> impl Iterator<Item = usize> {
    let x = (index % n) as isize;
    let y = (index / n) as isize;
    let n_i = n as isize;
    adjacency.offsets().iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        (nx >= 0 && ny >= 0 && nx < n_i && ny < n_i).then(|| (ny * n_i + nx) as usize)
    })
}

#[inline]
pub(crate) fn neighbors4(index: usize, n: usize) -> impl Iterator<Item = usize> {
    neighbors(index, n, Adjacency::Four)
}

use std::collections::{HashMap, HashSet};

use super::{outer_complement, RegionMask};
use crate::error::{LabError, Result};
use crate::grid::{neighbors4, GridPoint};

/// A labelled run `start..start + len` of cycle positions.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub label: usize,
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn contains(&self, position: usize) -> bool {
        position >= self.start && position < self.start + self.len
    }
}

/// Outer boundary of a mask as a counterclockwise vertex cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCycle {
    n: usize,
    pub vertices: Vec<GridPoint>,
    pub arcs: Option<Vec<Arc>>,
    /// Number of times the contour came back to an already listed vertex
    /// (one-vertex-wide necks). Those repeat visits are dropped, so the cycle
    /// stays simple but consecutive entries around a neck need not touch.
    pub revisits: usize,
}

impl BoundaryCycle {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(move |p| p.index(self.n))
    }

    /// Vertex index to cycle position.
    pub fn positions(&self) -> HashMap<usize, usize> {
        self.indices().enumerate().map(|(k, i)| (i, k)).collect()
    }

    /// Label of the arc containing `position`, if arcs are assigned.
    pub fn arc_label(&self, position: usize) -> Option<usize> {
        self.arcs
            .as_ref()?
            .iter()
            .find(|a| a.contains(position))
            .map(|a| a.label)
    }

    /// Split into `k` arcs of (nearly) equal vertex count.
    pub fn with_equal_arcs(mut self, k: usize) -> Self {
        let len = self.len();
        let k = k.clamp(1, len.max(1));
        let cuts: Vec<usize> = (0..=k).map(|j| j * len / k).collect();
        self.arcs = Some(
            cuts.windows(2)
                .enumerate()
                .map(|(label, w)| Arc {
                    label,
                    start: w[0],
                    len: w[1] - w[0],
                })
                .collect(),
        );
        self
    }
}

/// Mask vertices 4-adjacent to the border-connected part of the complement.
/// These are exactly the vertices listed by [`trace_boundary`].
pub fn boundary_vertices(mask: &RegionMask) -> RegionMask {
    let n = mask.n();
    let outside = outer_complement(mask);
    RegionMask::from_fn(n, |p| {
        let i = p.index(n);
        mask.contains_index(i)
            && (p.on_border(n) || neighbors4(i, n).any(|j| outside.contains_index(j)))
    })
}

const STEP: [(isize, isize); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Pixel on the left of the lattice edge leaving `corner` in direction `dir`.
/// Pixel `(x, y)` occupies the unit square with lower-left corner `(x, y)`.
fn left_pixel((cx, cy): (isize, isize), dir: usize) -> (isize, isize) {
    match dir {
        0 => (cx, cy),
        1 => (cx - 1, cy),
        2 => (cx - 1, cy - 1),
        _ => (cx, cy - 1),
    }
}

fn right_pixel((cx, cy): (isize, isize), dir: usize) -> (isize, isize) {
    match dir {
        0 => (cx, cy - 1),
        1 => (cx, cy),
        2 => (cx - 1, cy),
        _ => (cx - 1, cy - 1),
    }
}

/// Counterclockwise trace of the outer contour, starting from the vertex
/// with the smallest index.
///
/// The walk follows the lattice edges separating the mask from the outer
/// complement with the mask on its left, emitting the mask pixel it is
/// hugging; at convex corners it cuts diagonally, as a Moore-neighbourhood
/// trace does. Consecutive entries are therefore 8-adjacent.
pub fn trace_boundary(mask: &RegionMask) -> Result<BoundaryCycle> {
    let n = mask.n();
    let start = mask.indices().next().ok_or(LabError::EmptyMask)?;
    let ni = n as isize;
    let inside = |(x, y): (isize, isize)| {
        x >= 0 && y >= 0 && x < ni && y < ni && mask.contains_index((y * ni + x) as usize)
    };
    let to_index = |(x, y): (isize, isize)| (y * ni + x) as usize;

    let sp = GridPoint::from_index(start, n);
    let start_corner = (sp.x as isize, sp.y as isize);
    let mut corner = start_corner;
    let mut dir = 0usize;
    let mut raw = vec![start];
    loop {
        corner = (corner.0 + STEP[dir].0, corner.1 + STEP[dir].1);
        let ahead_left = left_pixel(corner, dir);
        let ahead_right = right_pixel(corner, dir);
        if inside(ahead_right) {
            dir = (dir + 3) % 4;
            raw.push(to_index(ahead_right));
        } else if inside(ahead_left) {
            raw.push(to_index(ahead_left));
        } else {
            dir = (dir + 1) % 4;
        }
        if corner == start_corner && dir == 0 {
            break;
        }
    }
    if raw.len() > 1 && raw.last() == raw.first() {
        raw.pop();
    }

    let mut seen = HashSet::with_capacity(raw.len());
    let mut vertices = Vec::with_capacity(raw.len());
    let mut revisits = 0;
    for i in raw {
        if seen.insert(i) {
            vertices.push(GridPoint::from_index(i, n));
        } else {
            revisits += 1;
        }
    }
    if revisits > 0 {
        log::debug!("boundary trace revisited {revisits} neck vertices");
    }
    Ok(BoundaryCycle {
        n,
        vertices,
        arcs: None,
        revisits,
    })
}

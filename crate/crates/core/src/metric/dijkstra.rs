use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::LatticeMetric;
use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::grid::{neighbors, GridPoint};

const NO_PARENT: u32 = u32::MAX;

/// Geodesic distances from a source set plus the shortest-path forest.
///
/// `dist(s) = weight(s)` for each source; every other reached vertex `v`
/// satisfies `dist(v) = dist(parent(v)) + weight(v)` bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    n: usize,
    sources: Vec<usize>,
    dist: Vec<f64>,
    parent: Vec<u32>,
}

impl DistanceField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sources(&self) -> impl Iterator<Item = GridPoint> + '_ {
        self.sources.iter().map(move |&i| GridPoint::from_index(i, self.n))
    }

    pub(crate) fn source_indices(&self) -> &[usize] {
        &self.sources
    }

    pub fn dist(&self, p: GridPoint) -> f64 {
        self.dist[p.index(self.n)]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    #[inline]
    pub(crate) fn dist_at(&self, i: usize) -> f64 {
        self.dist[i]
    }

    pub fn parent(&self, p: GridPoint) -> Option<GridPoint> {
        self.parent_index(p.index(self.n))
            .map(|i| GridPoint::from_index(i, self.n))
    }

    #[inline]
    pub(crate) fn parent_index(&self, i: usize) -> Option<usize> {
        let p = self.parent[i];
        (p != NO_PARENT).then_some(p as usize)
    }

    /// Parents as signed integers with `-1` for roots and unreached vertices.
    pub fn parents_i64(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|&p| if p == NO_PARENT { -1 } else { p as i64 })
            .collect()
    }

    /// Rebuild from exported arrays (used by the file readers).
    pub fn from_parts(n: usize, dist: Vec<f64>, parents: &[i64]) -> Result<Self> {
        if dist.len() != n * n || parents.len() != n * n {
            return Err(LabError::Format("distance field arrays need n*n entries".into()));
        }
        let mut parent = Vec::with_capacity(n * n);
        let mut sources = Vec::new();
        for (i, &p) in parents.iter().enumerate() {
            if p < 0 {
                parent.push(NO_PARENT);
                if dist[i].is_finite() {
                    sources.push(i);
                }
            } else if (p as usize) < n * n {
                parent.push(p as u32);
            } else {
                return Err(LabError::Format(format!("parent {p} out of range")));
            }
        }
        Ok(DistanceField {
            n,
            sources,
            dist,
            parent,
        })
    }

    pub fn is_reached(&self, p: GridPoint) -> bool {
        self.dist(p).is_finite()
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    dist: f64,
    vertex: u32,
}

impl Eq for Entry {}

// Min-heap on (dist, vertex).
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Binary-heap Dijkstra over the vertex-sum length.
///
/// Vertices are settled in lexicographic `(dist, index)` order and a parent
/// is only replaced by a strictly shorter route, so the forest is a
/// deterministic function of the weights.
fn run(
    metric: &LatticeMetric,
    sources: &[usize],
    region: Option<&RegionMask>,
    stop_at: Option<usize>,
) -> DistanceField {
    let n = metric.n;
    let w = &metric.weights;
    let mut dist = vec![f64::INFINITY; n * n];
    let mut parent = vec![NO_PARENT; n * n];
    let mut heap = BinaryHeap::with_capacity(4 * n);
    let mut srcs: Vec<usize> = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    for &s in &srcs {
        dist[s] = w[s];
        heap.push(Entry {
            dist: w[s],
            vertex: s as u32,
        });
    }
    let allowed = |v: usize| region.is_none_or(|r| r.contains_index(v));
    while let Some(Entry { dist: d, vertex }) = heap.pop() {
        let u = vertex as usize;
        if d > dist[u] {
            continue;
        }
        if stop_at == Some(u) {
            break;
        }
        for v in neighbors(u, n, metric.adjacency) {
            if !allowed(v) {
                continue;
            }
            let nd = d + w[v];
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = vertex;
                heap.push(Entry {
                    dist: nd,
                    vertex: v as u32,
                });
            }
        }
    }
    DistanceField {
        n,
        sources: srcs,
        dist,
        parent,
    }
}

fn check_in_grid(metric: &LatticeMetric, p: GridPoint) -> Result<usize> {
    if p.x >= metric.n || p.y >= metric.n {
        return Err(LabError::OutOfBounds(format!("vertex {p} outside the grid")));
    }
    Ok(p.index(metric.n))
}

/// Single- or multi-source shortest paths over the whole grid.
pub fn distance_field(metric: &LatticeMetric, sources: &[GridPoint]) -> Result<DistanceField> {
    if sources.is_empty() {
        return Err(LabError::InvalidSpec("distance field needs a source".into()));
    }
    let idx = sources
        .iter()
        .map(|&p| check_in_grid(metric, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(run(metric, &idx, None, None))
}

/// Shortest paths that only use vertices of `region`.
pub fn distance_field_in(
    metric: &LatticeMetric,
    sources: &[GridPoint],
    region: &RegionMask,
) -> Result<DistanceField> {
    if sources.is_empty() {
        return Err(LabError::InvalidSpec("distance field needs a source".into()));
    }
    let mut idx = Vec::with_capacity(sources.len());
    for &p in sources {
        let i = check_in_grid(metric, p)?;
        if !region.contains_index(i) {
            return Err(LabError::VertexOutsideRegion { x: p.x, y: p.y });
        }
        idx.push(i);
    }
    Ok(run(metric, &idx, Some(region), None))
}

/// Point-to-point distance. The search always starts from the endpoint with
/// the smaller index, which makes the function exactly symmetric.
pub fn distance(metric: &LatticeMetric, u: GridPoint, v: GridPoint) -> Result<f64> {
    let a = check_in_grid(metric, u)?;
    let b = check_in_grid(metric, v)?;
    let (s, t) = (a.min(b), a.max(b));
    Ok(run(metric, &[s], None, Some(t)).dist[t])
}

/// Internal distance within `region`; `f64::INFINITY` when `u` and `v` lie
/// in different components of the region.
pub fn internal_distance(
    metric: &LatticeMetric,
    u: GridPoint,
    v: GridPoint,
    region: &RegionMask,
) -> Result<f64> {
    let a = check_in_grid(metric, u)?;
    let b = check_in_grid(metric, v)?;
    for (i, p) in [(a, u), (b, v)] {
        if !region.contains_index(i) {
            return Err(LabError::VertexOutsideRegion { x: p.x, y: p.y });
        }
    }
    let (s, t) = (a.min(b), a.max(b));
    Ok(run(metric, &[s], Some(region), Some(t)).dist[t])
}

/// `d(u, v) - (weight(u) + weight(v)) / 2`, which vanishes on the diagonal
/// and satisfies the triangle inequality up to rounding.
pub fn normalized_distance(metric: &LatticeMetric, u: GridPoint, v: GridPoint) -> Result<f64> {
    Ok(distance(metric, u, v)? - 0.5 * (metric.weight(u) + metric.weight(v)))
}

pub(crate) fn run_multi(
    metric: &LatticeMetric,
    sources: &[usize],
    region: Option<&RegionMask>,
) -> DistanceField {
    run(metric, sources, region, None)
}

/// Distances from `source` to each of `targets` inside `region`, stopping as
/// soon as every target is settled. Scratch state is sparse, so the cost is
/// proportional to the explored neighbourhood rather than the grid.
pub(crate) fn local_distances(
    metric: &LatticeMetric,
    source: usize,
    targets: &[usize],
    region: &RegionMask,
) -> Vec<f64> {
    let n = metric.n;
    let w = &metric.weights;
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut settled: HashMap<usize, f64> = HashMap::new();
    let mut remaining = targets.iter().filter(|&&t| t != source).count();
    let mut heap = BinaryHeap::new();
    dist.insert(source, w[source]);
    heap.push(Entry {
        dist: w[source],
        vertex: source as u32,
    });
    while let Some(Entry { dist: d, vertex }) = heap.pop() {
        let u = vertex as usize;
        if settled.contains_key(&u) {
            continue;
        }
        settled.insert(u, d);
        if u != source && targets.contains(&u) {
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for v in neighbors(u, n, metric.adjacency) {
            if !region.contains_index(v) || settled.contains_key(&v) {
                continue;
            }
            let nd = d + w[v];
            if dist.get(&v).is_none_or(|&old| nd < old) {
                dist.insert(v, nd);
                heap.push(Entry {
                    dist: nd,
                    vertex: v as u32,
                });
            }
        }
    }
    targets
        .iter()
        .map(|t| settled.get(t).copied().unwrap_or(f64::INFINITY))
        .collect()
}

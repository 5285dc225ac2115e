#![allow(dead_code)]

use std::collections::VecDeque;

use lfpp::ball::RegionMask;
use lfpp::metric::{LatticeMetric, LfppParams};
use lfpp::GridPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Weights `e^{xi g}` with iid standard normal `g`, for grids too small to
/// sample a field on.
pub fn lognormal_metric(n: usize, seed: u64) -> LatticeMetric {
    let params = LfppParams::pure_gravity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n * n)
        .map(|_| (params.xi * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    LatticeMetric::from_weights(n, 1.0 / n as f64, w, params).unwrap()
}

/// Small integer weights, so that many paths tie exactly.
pub fn integer_metric(n: usize, seed: u64, max: u32) -> LatticeMetric {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..n * n).map(|_| rng.random_range(1..=max) as f64).collect();
    LatticeMetric::from_weights(n, 1.0 / n as f64, w, LfppParams::pure_gravity()).unwrap()
}

fn grid_neighbors(i: usize, n: usize) -> Vec<usize> {
    let (x, y) = (i % n, i / n);
    let mut out = Vec::with_capacity(4);
    if x > 0 {
        out.push(i - 1);
    }
    if x + 1 < n {
        out.push(i + 1);
    }
    if y > 0 {
        out.push(i - n);
    }
    if y + 1 < n {
        out.push(i + n);
    }
    out
}

/// All-pairs vertex-weighted distances by Floyd-Warshall on the successor
/// matrix. The final lengths are re-summed front to back along each
/// recovered path, the same order in which a single-source search adds
/// weights, so equal paths give bit-equal values.
pub fn floyd_warshall(metric: &LatticeMetric) -> Vec<Vec<f64>> {
    let n = metric.n();
    let m = n * n;
    let w = metric.weights();
    let mut d = vec![vec![f64::INFINITY; m]; m];
    let mut next = vec![vec![usize::MAX; m]; m];
    for u in 0..m {
        d[u][u] = 0.0;
        next[u][u] = u;
        for v in grid_neighbors(u, n) {
            d[u][v] = w[v];
            next[u][v] = v;
        }
    }
    for k in 0..m {
        for i in 0..m {
            let dik = d[i][k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..m {
                let c = dik + d[k][j];
                if c < d[i][j] {
                    d[i][j] = c;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    let mut out = vec![vec![f64::INFINITY; m]; m];
    for u in 0..m {
        for v in 0..m {
            let mut acc = w[u];
            let mut at = u;
            while at != v {
                at = next[at][v];
                acc += w[at];
            }
            out[u][v] = acc;
        }
    }
    out
}

/// Flood-fill labels of the 4-connected components of `keep`.
pub fn components(n: usize, keep: &[bool]) -> Vec<Option<usize>> {
    let mut label = vec![None; n * n];
    let mut next = 0;
    for s in 0..n * n {
        if !keep[s] || label[s].is_some() {
            continue;
        }
        label[s] = Some(next);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for v in grid_neighbors(u, n) {
                if keep[v] && label[v].is_none() {
                    label[v] = Some(next);
                    q.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// The mask together with every complement component that avoids the border.
pub fn brute_filled(mask: &RegionMask) -> RegionMask {
    let n = mask.n();
    let comp: Vec<bool> = mask.bits().iter().map(|b| !b).collect();
    let label = components(n, &comp);
    let mut touches = std::collections::HashSet::new();
    for i in 0..n * n {
        if GridPoint::from_index(i, n).on_border(n) {
            if let Some(l) = label[i] {
                touches.insert(l);
            }
        }
    }
    RegionMask::from_fn(n, |p| {
        let i = p.index(n);
        mask.contains_index(i) || !touches.contains(&label[i].unwrap())
    })
}

pub fn component_count(mask: &RegionMask) -> usize {
    components(mask.n(), mask.bits())
        .into_iter()
        .flatten()
        .max()
        .map_or(0, |l| l + 1)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

use crate::grid::GridPoint;

/// A subset of the `n`-by-`n` vertex grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegionMask {
    n: usize,
    bits: Vec<bool>,
}

impl RegionMask {
    pub fn empty(n: usize) -> Self {
        RegionMask {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn full(n: usize) -> Self {
        RegionMask {
            n,
            bits: vec![true; n * n],
        }
    }

    pub fn from_bits(n: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), n * n, "mask needs n*n bits");
        RegionMask { n, bits }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(GridPoint) -> bool) -> Self {
        let bits = (0..n * n).map(|i| f(GridPoint::from_index(i, n))).collect();
        RegionMask { n, bits }
    }

    /// Axis-aligned rectangle of `w` by `h` vertices with lower-left corner `origin`.
    pub fn rectangle(n: usize, origin: GridPoint, w: usize, h: usize) -> Self {
        RegionMask::from_fn(n, |p| {
            p.x >= origin.x && p.x < origin.x + w && p.y >= origin.y && p.y < origin.y + h
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, p: GridPoint) -> bool {
        p.x < self.n && p.y < self.n && self.bits[p.index(self.n)]
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, p: GridPoint, value: bool) {
        let i = p.index(self.n);
        self.bits[i] = value;
    }

    pub(crate) fn set_index(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let n = self.n;
        self.indices().map(move |i| GridPoint::from_index(i, n))
    }

    pub fn touches_border(&self) -> bool {
        self.points().any(|p| p.on_border(self.n))
    }

    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn complement(&self) -> RegionMask {
        RegionMask {
            n: self.n,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &RegionMask) -> RegionMask {
        RegionMask {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn intersection(&self, other: &RegionMask) -> RegionMask {
        RegionMask {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        }
    }

    /// Closed Euclidean annulus `inner <= |p - center| <= outer` in lattice units.
    pub fn annulus(n: usize, center: GridPoint, inner: f64, outer: f64) -> Self {
        RegionMask::from_fn(n, |p| {
            let d = p.lattice_distance(center);
            d >= inner && d <= outer
        })
    }
}

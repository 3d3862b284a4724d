//! Elements of the finite inverse symmetric semigroup IS_n: partial
//! injective self-maps of {1,…,n}, their composition, inversion, the
//! cycle/chain calculus, and exhaustive enumeration.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A point of the base set {1,…,n}. Points are 1-based throughout.
pub type Point = u8;

/// Largest `n` for which `enumerate_isn(n)` stays below
/// [`DEFAULT_MAX_ELEMENTS`](crate::semigroup::DEFAULT_MAX_ELEMENTS):
/// |IS_5| = 1546 while |IS_6| = 13327.
pub const DEFAULT_MAX_RANK: Point = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsnError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u8, u8),
    #[error("point {point} out of range 1..={rank}")]
    PointOutOfRange { point: Point, rank: u8 },
    #[error("duplicate point {0}")]
    DuplicatePoint(Point),
    #[error("duplicate image {0}")]
    DuplicateImage(Point),
    #[error("point sequence must be nonempty")]
    EmptyPoints,
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("enumeration of IS_{n} ({size} elements) exceeds the limit of {limit}")]
    EnumerationLimit { n: u8, size: u128, limit: usize },
}

/// A partial injective self-map of {1,…,n}; the element of IS_n.
///
/// `images[i]` holds the image of point `i + 1`, with `0` meaning the point
/// is outside the domain. The empty map (all zeros) is the zero of IS_n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialBijection {
    rank: u8,
    images: Vec<u8>,
}

impl PartialBijection {
    /// The identity map on {1,…,n}.
    pub fn identity(n: u8) -> Self {
        assert!(n >= 1, "rank must be at least 1");
        PartialBijection {
            rank: n,
            images: (1..=n).collect(),
        }
    }

    /// The empty map: defined nowhere. The zero of IS_n.
    pub fn empty(n: u8) -> Self {
        assert!(n >= 1, "rank must be at least 1");
        PartialBijection {
            rank: n,
            images: vec![0; n as usize],
        }
    }

    /// Builds an element from explicit (source, target) pairs.
    pub fn from_pairs(n: u8, pairs: &[(Point, Point)]) -> Result<Self, IsnError> {
        if n == 0 {
            return Err(IsnError::ZeroRank);
        }
        let mut images = vec![0u8; n as usize];
        let mut hit = vec![false; n as usize + 1];
        for &(src, dst) in pairs {
            if src == 0 || src > n {
                return Err(IsnError::PointOutOfRange {
                    point: src,
                    rank: n,
                });
            }
            if dst == 0 || dst > n {
                return Err(IsnError::PointOutOfRange {
                    point: dst,
                    rank: n,
                });
            }
            if images[src as usize - 1] != 0 {
                return Err(IsnError::DuplicatePoint(src));
            }
            if hit[dst as usize] {
                return Err(IsnError::DuplicateImage(dst));
            }
            images[src as usize - 1] = dst;
            hit[dst as usize] = true;
        }
        Ok(PartialBijection { rank: n, images })
    }

    /// The cycle (x₁ x₂ … x_k): x_i ↦ x_{i+1} cyclically, identity elsewhere.
    pub fn cycle(n: u8, points: &[Point]) -> Result<Self, IsnError> {
        let mut a = Self::check_points(n, points)?;
        for w in points.windows(2) {
            a.images[w[0] as usize - 1] = w[1];
        }
        a.images[points[points.len() - 1] as usize - 1] = points[0];
        Ok(a)
    }

    /// The chain [x₁ x₂ … x_k]: x_i ↦ x_{i+1}, x_k deleted from the domain,
    /// identity elsewhere.
    pub fn chain(n: u8, points: &[Point]) -> Result<Self, IsnError> {
        let mut a = Self::check_points(n, points)?;
        for w in points.windows(2) {
            a.images[w[0] as usize - 1] = w[1];
        }
        a.images[points[points.len() - 1] as usize - 1] = 0;
        Ok(a)
    }

    fn check_points(n: u8, points: &[Point]) -> Result<Self, IsnError> {
        if n == 0 {
            return Err(IsnError::ZeroRank);
        }
        if points.is_empty() {
            return Err(IsnError::EmptyPoints);
        }
        let mut seen = vec![false; n as usize + 1];
        for &p in points {
            if p == 0 || p > n {
                return Err(IsnError::PointOutOfRange { point: p, rank: n });
            }
            if seen[p as usize] {
                return Err(IsnError::DuplicatePoint(p));
            }
            seen[p as usize] = true;
        }
        Ok(Self::identity(n))
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// The image of `x`, or `None` when `x` is outside the domain.
    pub fn apply(&self, x: Point) -> Option<Point> {
        debug_assert!(x >= 1 && x <= self.rank);
        match self.images[x as usize - 1] {
            0 => None,
            y => Some(y),
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = Point> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != 0)
            .map(|(i, _)| i as Point + 1)
    }

    pub fn range(&self) -> Vec<Point> {
        let mut r: Vec<Point> = self.images.iter().copied().filter(|&y| y != 0).collect();
        r.sort_unstable();
        r
    }

    pub fn domain_size(&self) -> usize {
        self.images.iter().filter(|&&y| y != 0).count()
    }

    /// Domain as a bitmask: bit i set iff point i+1 is in the domain.
    pub fn domain_mask(&self) -> u32 {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != 0)
            .fold(0u32, |m, (i, _)| m | (1 << i))
    }

    /// Range as a bitmask: bit i set iff point i+1 is in the range.
    pub fn range_mask(&self) -> u32 {
        self.images
            .iter()
            .filter(|&&y| y != 0)
            .fold(0u32, |m, &y| m | (1 << (y - 1)))
    }

    pub fn is_empty_map(&self) -> bool {
        self.images.iter().all(|&y| y == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &y)| y == i as u8 + 1)
    }

    /// True iff a∘a = a, i.e. `self` is the identity on its domain.
    pub fn is_idempotent(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &y)| y == 0 || y == i as u8 + 1)
    }

    /// The partial identity on the given (bitmask-encoded) subset.
    pub fn partial_identity(n: u8, mask: u32) -> Self {
        assert!(n >= 1);
        let images = (0..n)
            .map(|i| if mask & (1 << i) != 0 { i + 1 } else { 0 })
            .collect();
        PartialBijection { rank: n, images }
    }

    /// Composition with `self` acting first: x ↦ other(self(x)).
    ///
    /// dom(a∘b) = { x ∈ dom(a) : a(x) ∈ dom(b) }.
    pub fn compose(&self, other: &Self) -> Result<Self, IsnError> {
        if self.rank != other.rank {
            return Err(IsnError::RankMismatch(self.rank, other.rank));
        }
        let images = self
            .images
            .iter()
            .map(|&y| {
                if y == 0 {
                    0
                } else {
                    other.images[y as usize - 1]
                }
            })
            .collect();
        Ok(PartialBijection {
            rank: self.rank,
            images,
        })
    }

    /// The inverse partial bijection: mapping reversed, dom = ran(self).
    pub fn inverse(&self) -> Self {
        let mut images = vec![0u8; self.rank as usize];
        for (i, &y) in self.images.iter().enumerate() {
            if y != 0 {
                images[y as usize - 1] = i as u8 + 1;
            }
        }
        PartialBijection {
            rank: self.rank,
            images,
        }
    }

    /// Restriction to the subset given as a bitmask: undefined outside it,
    /// and images falling outside the subset are dropped too.
    pub fn restrict_to(&self, mask: u32) -> Self {
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                if mask & (1 << i) != 0 && y != 0 && mask & (1 << (y - 1)) != 0 {
                    y
                } else {
                    0
                }
            })
            .collect();
        PartialBijection {
            rank: self.rank,
            images,
        }
    }

    /// Decomposes into disjoint cycles and chains. Fixed points are omitted;
    /// a point outside both domain and range becomes a length-1 chain.
    pub fn chain_decomposition(&self) -> ChainDecomposition {
        let n = self.rank as usize;
        let mut visited = vec![false; n + 1];
        let mut in_range = vec![false; n + 1];
        for &y in &self.images {
            if y != 0 {
                in_range[y as usize] = true;
            }
        }

        let mut cycles = Vec::new();
        let mut chains = Vec::new();

        // Fixed points are skipped outright.
        for x in 1..=n as u8 {
            if self.apply(x) == Some(x) {
                visited[x as usize] = true;
            }
        }

        // Chains start at points with no preimage and follow images until
        // the map runs out.
        for x in 1..=n as u8 {
            if visited[x as usize] || in_range[x as usize] {
                continue;
            }
            let mut seq = vec![x];
            visited[x as usize] = true;
            let mut cur = x;
            while let Some(next) = self.apply(cur) {
                seq.push(next);
                visited[next as usize] = true;
                cur = next;
            }
            chains.push(seq);
        }

        // Whatever remains unvisited lies on cycles; scanning in ascending
        // order starts each cycle at its minimal point.
        for x in 1..=n as u8 {
            if visited[x as usize] {
                continue;
            }
            let mut seq = vec![x];
            visited[x as usize] = true;
            let mut cur = self.apply(x).expect("cycle point has an image");
            while cur != x {
                seq.push(cur);
                visited[cur as usize] = true;
                cur = self.apply(cur).expect("cycle point has an image");
            }
            cycles.push(seq);
        }

        chains.sort_by_key(|c| c[0]);
        ChainDecomposition {
            rank: self.rank,
            cycles,
            chains,
        }
    }
}

impl PartialOrd for PartialBijection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical element order: by rank, then domain size, then the domain
/// point list, then the image list. `enumerate_isn` emits this order.
impl Ord for PartialBijection {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.domain_size().cmp(&other.domain_size()))
            .then_with(|| {
                let da: Vec<Point> = self.domain().collect();
                let db: Vec<Point> = other.domain().collect();
                da.cmp(&db)
            })
            .then_with(|| self.images.cmp(&other.images))
    }
}

impl fmt::Debug for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.rank)
    }
}

/// The unique factorization of an element into disjoint cycles and chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub rank: u8,
    /// Periodic orbits of length ≥ 2, each starting at its minimal point,
    /// sorted by that point.
    pub cycles: Vec<Vec<Point>>,
    /// Maximal non-periodic orbits (length ≥ 1, the last point outside the
    /// domain), sorted by first point.
    pub chains: Vec<Vec<Point>>,
}

impl ChainDecomposition {
    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty() && self.chains.is_empty()
    }

    /// Multiplies the parts back together; inverse of `chain_decomposition`.
    pub fn recompose(&self) -> PartialBijection {
        let mut a = PartialBijection::identity(self.rank);
        for cyc in &self.cycles {
            for w in cyc.windows(2) {
                a.images[w[0] as usize - 1] = w[1];
            }
            a.images[cyc[cyc.len() - 1] as usize - 1] = cyc[0];
        }
        for ch in &self.chains {
            for w in ch.windows(2) {
                a.images[w[0] as usize - 1] = w[1];
            }
            a.images[ch[ch.len() - 1] as usize - 1] = 0;
        }
        a
    }
}

/// Number of elements of IS_n: Σ_{k=0..n} C(n,k)² k!.
pub fn isn_size(n: u8) -> u128 {
    let n = n as u128;
    let mut total = 0u128;
    for k in 0..=n {
        let mut binom = 1u128;
        for i in 0..k {
            binom = binom * (n - i) / (i + 1);
        }
        let mut fact = 1u128;
        for i in 2..=k {
            fact *= i;
        }
        total += binom * binom * fact;
    }
    total
}

/// Every element of IS_n exactly once, in canonical order (domain size
/// ascending, then domain, then images). Enforces the default element limit.
pub fn enumerate_isn(n: u8) -> Result<Vec<PartialBijection>, IsnError> {
    enumerate_isn_limited(n, crate::semigroup::DEFAULT_MAX_ELEMENTS)
}

/// As `enumerate_isn` with an explicit element limit.
pub fn enumerate_isn_limited(n: u8, limit: usize) -> Result<Vec<PartialBijection>, IsnError> {
    if n == 0 {
        return Err(IsnError::ZeroRank);
    }
    let size = isn_size(n);
    if size > limit as u128 {
        return Err(IsnError::EnumerationLimit { n, size, limit });
    }

    let mut domains: Vec<Vec<Point>> = (0u32..(1 << n))
        .map(|mask| (1..=n).filter(|&p| mask & (1 << (p - 1)) != 0).collect())
        .collect();
    domains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut out = Vec::with_capacity(size as usize);
    for dom in &domains {
        let mut images = Vec::with_capacity(dom.len());
        let mut used = vec![false; n as usize + 1];
        fill_images(n, dom, &mut images, &mut used, &mut out);
    }
    Ok(out)
}

fn fill_images(
    n: u8,
    dom: &[Point],
    images: &mut Vec<Point>,
    used: &mut Vec<bool>,
    out: &mut Vec<PartialBijection>,
) {
    if images.len() == dom.len() {
        let pairs: Vec<(Point, Point)> = dom.iter().copied().zip(images.iter().copied()).collect();
        out.push(PartialBijection::from_pairs(n, &pairs).expect("valid by construction"));
        return;
    }
    for y in 1..=n {
        if !used[y as usize] {
            used[y as usize] = true;
            images.push(y);
            fill_images(n, dom, images, used, out);
            images.pop();
            used[y as usize] = false;
        }
    }
}

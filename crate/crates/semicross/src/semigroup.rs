//! A uniform value for finite inverse semigroups.
//!
//! Elements are handles (indices into the canonical element sequence);
//! products and inversion go through a backend that knows the concrete
//! representation (IS_n, a partial wreath product, or an ingested Cayley
//! table). Products are memoized into a full table when the semigroup has
//! at most [`MEMO_LIMIT`] elements and computed on demand above that.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::green::GreenClassPartition;
use crate::isn::{enumerate_isn_limited, isn_size, PartialBijection};
use crate::notation::format_element;
use crate::rng::SplitMix64;
use crate::wreath::{WreathContext, WreathElement};

/// Handle of an element: its index in the canonical element sequence.
pub type ElementId = u32;

/// Default cap on the number of elements of any constructed semigroup.
/// Overridable per call; the CLI maps `SEMICROSS_MAX_SIZE` onto it.
pub const DEFAULT_MAX_ELEMENTS: usize = 4096;

/// Products are memoized into a full table up to this size.
pub const MEMO_LIMIT: usize = 4096;

/// Ingested tables are checked for associativity exhaustively up to this
/// size and by random sampling above it.
pub const EXHAUSTIVE_ASSOC_LIMIT: usize = 200;
const SAMPLED_ASSOC_TRIPLES: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SemigroupError {
    #[error("semigroup with {size} elements exceeds the limit of {limit}")]
    LimitExceeded { size: u128, limit: usize },
    #[error("table is not square: row {row} has {len} entries, expected {size}")]
    RaggedTable { row: usize, len: usize, size: usize },
    #[error("table entry [{row}][{col}] = {value} is out of range 0..{size}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        size: usize,
    },
    #[error("table size 0 is not a semigroup")]
    EmptyTable,
    #[error("labels/inverse array length {len} does not match size {size}")]
    BadAuxLength { len: usize, size: usize },
    #[error("not associative: ({a}·{b})·{c} ≠ {a}·({b}·{c})")]
    NotAssociative {
        a: ElementId,
        b: ElementId,
        c: ElementId,
    },
    #[error("element {x} has {count} inverses (exactly one required)")]
    NoUniqueInverse { x: ElementId, count: usize },
    #[error("declared inverse of {x} violates x·x⁻¹·x = x")]
    BadDeclaredInverse { x: ElementId },
    #[error("subset is not closed: {a}·{b} lies outside it")]
    NotClosed { a: ElementId, b: ElementId },
    #[error("isomorphism search limited to {limit} elements, got {size}")]
    IsomorphismLimit { size: usize, limit: usize },
}

/// A violation found by [`FiniteInverseSemigroup::verify_inverse_semigroup`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AxiomViolation {
    #[error("associativity fails at ({a}, {b}, {c})")]
    Associativity {
        a: ElementId,
        b: ElementId,
        c: ElementId,
    },
    #[error("x·x⁻¹·x ≠ x for x = {x}")]
    InverseAxiom { x: ElementId },
    #[error("(x⁻¹)⁻¹ ≠ x for x = {x}")]
    InverseInvolution { x: ElementId },
    #[error("(x·y)⁻¹ ≠ y⁻¹·x⁻¹ for ({x}, {y})")]
    InverseAntiHomomorphism { x: ElementId, y: ElementId },
    #[error("idempotents {e} and {f} do not commute")]
    IdempotentsDoNotCommute { e: ElementId, f: ElementId },
    #[error("unit law fails at {x}")]
    UnitLaw { x: ElementId },
    #[error("zero law fails at {x}")]
    ZeroLaw { x: ElementId },
}

/// JSON-facing Cayley table: `{ "size": N, "table": [[…]], "labels": […]?,
/// "inverse": […]? }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CayleyTable {
    pub size: usize,
    pub table: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<u32>>,
}

pub(crate) enum Backend {
    Table {
        labels: Vec<String>,
    },
    Isn {
        n: u8,
        elems: Vec<PartialBijection>,
        index: HashMap<PartialBijection, ElementId>,
    },
    Wreath {
        ctx: WreathContext,
        elems: Vec<WreathElement>,
        index: HashMap<WreathElement, ElementId>,
    },
}

pub(crate) struct Inner {
    size: usize,
    backend: Backend,
    /// Row-major product table, present iff size ≤ MEMO_LIMIT.
    table: Option<Vec<ElementId>>,
    inv: Vec<ElementId>,
    idempotent: Vec<bool>,
    unit: Option<ElementId>,
    zero: Option<ElementId>,
    pub(crate) green_r: OnceLock<GreenClassPartition>,
    pub(crate) green_l: OnceLock<GreenClassPartition>,
}

/// An enumerated finite inverse semigroup with product, inversion,
/// idempotent predicate, and optional unit and zero.
///
/// Values are cheap to clone (shared internally) and immutable after
/// construction; all queries are safe for concurrent use.
#[derive(Clone)]
pub struct FiniteInverseSemigroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for FiniteInverseSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} elements)", self.describe(), self.size())
    }
}

impl FiniteInverseSemigroup {
    /// IS_n as a semigroup value, under the default element limit.
    pub fn from_isn(n: u8) -> Result<Self, SemigroupError> {
        Self::from_isn_limited(n, DEFAULT_MAX_ELEMENTS)
    }

    pub fn from_isn_limited(n: u8, limit: usize) -> Result<Self, SemigroupError> {
        let size = isn_size(n);
        if size > limit as u128 {
            return Err(SemigroupError::LimitExceeded { size, limit });
        }
        let elems = enumerate_isn_limited(n, limit).expect("size checked above");
        let index: HashMap<PartialBijection, ElementId> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as ElementId))
            .collect();
        let unit = index[&PartialBijection::identity(n)];
        let zero = index[&PartialBijection::empty(n)];
        let backend = Backend::Isn { n, elems, index };
        Ok(Self::from_backend(backend, Some(unit), Some(zero)))
    }

    /// The one-element semigroup (handy as a degenerate inner semigroup).
    pub fn trivial() -> Self {
        Self::from_cayley_table(&CayleyTable {
            size: 1,
            table: vec![vec![0]],
            labels: Some(vec!["e".to_string()]),
            inverse: Some(vec![0]),
        })
        .expect("the one-element table is an inverse semigroup")
    }

    /// Wraps a verified Cayley table. Associativity is checked exhaustively
    /// for sizes ≤ [`EXHAUSTIVE_ASSOC_LIMIT`] and on 10⁶ sampled triples
    /// above; every element must have a unique inverse.
    pub fn from_cayley_table(t: &CayleyTable) -> Result<Self, SemigroupError> {
        let size = t.size;
        if size == 0 {
            return Err(SemigroupError::EmptyTable);
        }
        if t.table.len() != size {
            return Err(SemigroupError::RaggedTable {
                row: usize::MAX,
                len: t.table.len(),
                size,
            });
        }
        let mut flat = Vec::with_capacity(size * size);
        for (r, row) in t.table.iter().enumerate() {
            if row.len() != size {
                return Err(SemigroupError::RaggedTable {
                    row: r,
                    len: row.len(),
                    size,
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v as usize >= size {
                    return Err(SemigroupError::EntryOutOfRange {
                        row: r,
                        col: c,
                        value: v,
                        size,
                    });
                }
                flat.push(v);
            }
        }

        check_associativity(&flat, size)?;
        let inv = compute_unique_inverses(&flat, size)?;
        if let Some(declared) = &t.inverse {
            if declared.len() != size {
                return Err(SemigroupError::BadAuxLength {
                    len: declared.len(),
                    size,
                });
            }
            for (x, &d) in declared.iter().enumerate() {
                if d != inv[x] {
                    return Err(SemigroupError::BadDeclaredInverse { x: x as ElementId });
                }
            }
        }

        let labels = match &t.labels {
            Some(l) => {
                if l.len() != size {
                    return Err(SemigroupError::BadAuxLength { len: l.len(), size });
                }
                l.clone()
            }
            None => (0..size).map(|i| format!("x{i}")).collect(),
        };

        let prod = |a: usize, b: usize| flat[a * size + b];
        let idempotent: Vec<bool> = (0..size).map(|x| prod(x, x) as usize == x).collect();
        let unit = (0..size)
            .find(|&e| (0..size).all(|x| prod(e, x) as usize == x && prod(x, e) as usize == x))
            .map(|e| e as ElementId);
        let zero = (0..size)
            .find(|&z| (0..size).all(|x| prod(z, x) as usize == z && prod(x, z) as usize == z))
            .map(|z| z as ElementId);

        let inner = Inner {
            size,
            backend: Backend::Table { labels },
            table: Some(flat),
            inv,
            idempotent,
            unit,
            zero,
            green_r: OnceLock::new(),
            green_l: OnceLock::new(),
        };
        Ok(FiniteInverseSemigroup {
            inner: Arc::new(inner),
        })
    }

    pub(crate) fn from_backend(
        backend: Backend,
        unit: Option<ElementId>,
        zero: Option<ElementId>,
    ) -> Self {
        let size = match &backend {
            Backend::Table { labels } => labels.len(),
            Backend::Isn { elems, .. } => elems.len(),
            Backend::Wreath { elems, .. } => elems.len(),
        };
        Self::from_backend_sized(backend, size, unit, zero)
    }

    fn from_backend_sized(
        backend: Backend,
        size: usize,
        unit: Option<ElementId>,
        zero: Option<ElementId>,
    ) -> Self {
        let table = if size <= MEMO_LIMIT {
            let mut t = Vec::with_capacity(size * size);
            for a in 0..size {
                for b in 0..size {
                    t.push(raw_product(&backend, a as ElementId, b as ElementId));
                }
            }
            Some(t)
        } else {
            None
        };
        let inv: Vec<ElementId> = (0..size)
            .map(|x| raw_inverse(&backend, x as ElementId))
            .collect();
        let idempotent: Vec<bool> = match &table {
            Some(t) => (0..size).map(|x| t[x * size + x] as usize == x).collect(),
            None => (0..size)
                .map(|x| raw_product(&backend, x as ElementId, x as ElementId) as usize == x)
                .collect(),
        };
        FiniteInverseSemigroup {
            inner: Arc::new(Inner {
                size,
                backend,
                table,
                inv,
                idempotent,
                unit,
                zero,
                green_r: OnceLock::new(),
                green_l: OnceLock::new(),
            }),
        }
    }

    pub fn size(&self) -> usize {
        self.inner.size
    }

    pub fn product(&self, a: ElementId, b: ElementId) -> ElementId {
        debug_assert!((a as usize) < self.inner.size && (b as usize) < self.inner.size);
        match &self.inner.table {
            Some(t) => t[a as usize * self.inner.size + b as usize],
            None => raw_product(&self.inner.backend, a, b),
        }
    }

    pub fn inverse(&self, a: ElementId) -> ElementId {
        self.inner.inv[a as usize]
    }

    pub fn is_idempotent(&self, a: ElementId) -> bool {
        self.inner.idempotent[a as usize]
    }

    /// All idempotents, in canonical element order.
    pub fn idempotents(&self) -> Vec<ElementId> {
        (0..self.inner.size as ElementId)
            .filter(|&x| self.inner.idempotent[x as usize])
            .collect()
    }

    pub fn unit(&self) -> Option<ElementId> {
        self.inner.unit
    }

    pub fn zero(&self) -> Option<ElementId> {
        self.inner.zero
    }

    /// The memoized Green class partition for the given relation, computed
    /// by explicit ideal enumeration on first use.
    pub fn green(&self, relation: crate::green::GreenRelation) -> &GreenClassPartition {
        let lock = match relation {
            crate::green::GreenRelation::R => &self.inner.green_r,
            crate::green::GreenRelation::L => &self.inner.green_l,
        };
        lock.get_or_init(|| crate::green::compute_green_classes(self, relation))
    }

    /// Canonical text of an element (notation for IS_n, "(f; a)" for wreath
    /// elements, stored labels for ingested tables).
    pub fn element_text(&self, a: ElementId) -> String {
        match &self.inner.backend {
            Backend::Table { labels } => labels[a as usize].clone(),
            Backend::Isn { elems, .. } => format_element(&elems[a as usize]),
            Backend::Wreath { ctx, elems, .. } => ctx.format_element(&elems[a as usize]),
        }
    }

    /// A short structural descriptor, e.g. "IS_3" or "IS_2 wr IS_2".
    pub fn describe(&self) -> String {
        match &self.inner.backend {
            Backend::Table { .. } => format!("table({})", self.inner.size),
            Backend::Isn { n, .. } => format!("IS_{n}"),
            Backend::Wreath { ctx, .. } => {
                format!("{} wr IS_{}", ctx.inner().describe(), ctx.base_size())
            }
        }
    }

    /// The rank and element list when this value is IS_n.
    pub fn isn_parts(&self) -> Option<(u8, &[PartialBijection])> {
        match &self.inner.backend {
            Backend::Isn { n, elems, .. } => Some((*n, elems)),
            _ => None,
        }
    }

    pub fn isn_id_of(&self, a: &PartialBijection) -> Option<ElementId> {
        match &self.inner.backend {
            Backend::Isn { index, .. } => index.get(a).copied(),
            _ => None,
        }
    }

    /// The wreath context and element list when this value is S ≀ IS(M).
    pub fn wreath_parts(&self) -> Option<(&WreathContext, &[WreathElement])> {
        match &self.inner.backend {
            Backend::Wreath { ctx, elems, .. } => Some((ctx, elems)),
            _ => None,
        }
    }

    pub fn wreath_id_of(&self, x: &WreathElement) -> Option<ElementId> {
        match &self.inner.backend {
            Backend::Wreath { index, .. } => index.get(x).copied(),
            _ => None,
        }
    }

    /// Whether two values denote the same semigroup (shared storage, or the
    /// same built-in construction).
    pub fn same_semigroup(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        if self.inner.size != other.inner.size {
            return false;
        }
        match (&self.inner.backend, &other.inner.backend) {
            (Backend::Table { .. }, Backend::Table { .. }) => self.inner.table == other.inner.table,
            _ => self.describe() == other.describe(),
        }
    }

    /// Smallest product-closed superset of `generators`, ascending ids.
    pub fn subsemigroup_closure(&self, generators: &[ElementId]) -> Vec<ElementId> {
        let mut in_set = vec![false; self.inner.size];
        let mut members: Vec<ElementId> = Vec::new();
        let mut queue: Vec<ElementId> = Vec::new();
        for &g in generators {
            if !in_set[g as usize] {
                in_set[g as usize] = true;
                members.push(g);
                queue.push(g);
            }
        }
        while let Some(x) = queue.pop() {
            // Snapshot: products of x with everything currently present.
            for i in 0..members.len() {
                let y = members[i];
                for p in [self.product(x, y), self.product(y, x)] {
                    if !in_set[p as usize] {
                        in_set[p as usize] = true;
                        members.push(p);
                        queue.push(p);
                    }
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// The multiplication table of the sub-semigroup on `members` (which
    /// must be product-closed), ids renumbered by position in `members`.
    /// The result is a plain semigroup: subsemigroups of inverse semigroups
    /// need not be inverse.
    pub fn restriction(&self, members: &[ElementId]) -> Result<PlainSemigroup, SemigroupError> {
        let mut pos: HashMap<ElementId, u32> = HashMap::new();
        for (i, &m) in members.iter().enumerate() {
            pos.insert(m, i as u32);
        }
        let size = members.len();
        let mut table = Vec::with_capacity(size * size);
        for &a in members {
            for &b in members {
                let p = self.product(a, b);
                match pos.get(&p) {
                    Some(&k) => table.push(k),
                    None => return Err(SemigroupError::NotClosed { a, b }),
                }
            }
        }
        Ok(PlainSemigroup {
            size,
            table,
            labels: members.iter().map(|&m| self.element_text(m)).collect(),
        })
    }

    /// Exports the full Cayley table (with labels and the inverse map).
    pub fn export_cayley_table(&self) -> CayleyTable {
        let size = self.inner.size;
        let table = (0..size)
            .map(|a| {
                (0..size)
                    .map(|b| self.product(a as ElementId, b as ElementId))
                    .collect()
            })
            .collect();
        CayleyTable {
            size,
            table,
            labels: Some(
                (0..size)
                    .map(|i| self.element_text(i as ElementId))
                    .collect(),
            ),
            inverse: Some(self.inner.inv.clone()),
        }
    }

    /// Runs the inverse-semigroup axiom suite.
    ///
    /// Associativity is exhaustive when `assoc_samples` is `None` (caller
    /// should keep that to small semigroups), otherwise checked on that many
    /// seeded random triples. Everything else is exhaustive.
    pub fn verify_inverse_semigroup(
        &self,
        assoc_samples: Option<usize>,
        seed: u64,
    ) -> Result<(), AxiomViolation> {
        let n = self.inner.size as ElementId;

        match assoc_samples {
            None => {
                for a in 0..n {
                    for b in 0..n {
                        let ab = self.product(a, b);
                        for c in 0..n {
                            if self.product(ab, c) != self.product(a, self.product(b, c)) {
                                return Err(AxiomViolation::Associativity { a, b, c });
                            }
                        }
                    }
                }
            }
            Some(k) => {
                let mut rng = SplitMix64::new(seed);
                for _ in 0..k {
                    let a = rng.below(n as usize) as ElementId;
                    let b = rng.below(n as usize) as ElementId;
                    let c = rng.below(n as usize) as ElementId;
                    if self.product(self.product(a, b), c) != self.product(a, self.product(b, c)) {
                        return Err(AxiomViolation::Associativity { a, b, c });
                    }
                }
            }
        }

        for x in 0..n {
            let xi = self.inverse(x);
            if self.product(self.product(x, xi), x) != x {
                return Err(AxiomViolation::InverseAxiom { x });
            }
            if self.inverse(xi) != x {
                return Err(AxiomViolation::InverseInvolution { x });
            }
        }

        // (xy)⁻¹ = y⁻¹x⁻¹, exhaustively for small semigroups, sampled above.
        let antihom_exhaustive = self.inner.size <= EXHAUSTIVE_ASSOC_LIMIT;
        if antihom_exhaustive {
            for x in 0..n {
                for y in 0..n {
                    if self.inverse(self.product(x, y))
                        != self.product(self.inverse(y), self.inverse(x))
                    {
                        return Err(AxiomViolation::InverseAntiHomomorphism { x, y });
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(seed ^ 0xa5a5_a5a5);
            for _ in 0..SAMPLED_ASSOC_TRIPLES.min(100_000) {
                let x = rng.below(n as usize) as ElementId;
                let y = rng.below(n as usize) as ElementId;
                if self.inverse(self.product(x, y))
                    != self.product(self.inverse(y), self.inverse(x))
                {
                    return Err(AxiomViolation::InverseAntiHomomorphism { x, y });
                }
            }
        }

        let idems = self.idempotents();
        for &e in &idems {
            for &f in &idems {
                if self.product(e, f) != self.product(f, e) {
                    return Err(AxiomViolation::IdempotentsDoNotCommute { e, f });
                }
            }
        }

        if let Some(u) = self.inner.unit {
            for x in 0..n {
                if self.product(u, x) != x || self.product(x, u) != x {
                    return Err(AxiomViolation::UnitLaw { x });
                }
            }
        }
        if let Some(z) = self.inner.zero {
            for x in 0..n {
                if self.product(z, x) != z || self.product(x, z) != z {
                    return Err(AxiomViolation::ZeroLaw { x });
                }
            }
        }
        Ok(())
    }
}

fn raw_product(backend: &Backend, a: ElementId, b: ElementId) -> ElementId {
    match backend {
        Backend::Table { .. } => unreachable!("table backends always memoize"),
        Backend::Isn { elems, index, .. } => {
            let p = elems[a as usize]
                .compose(&elems[b as usize])
                .expect("uniform rank");
            index[&p]
        }
        Backend::Wreath { ctx, elems, index } => {
            let p = ctx
                .multiply(&elems[a as usize], &elems[b as usize])
                .expect("uniform base");
            index[&p]
        }
    }
}

fn raw_inverse(backend: &Backend, a: ElementId) -> ElementId {
    match backend {
        Backend::Table { .. } => unreachable!("table backends precompute inverses"),
        Backend::Isn { elems, index, .. } => index[&elems[a as usize].inverse()],
        Backend::Wreath { ctx, elems, index } => index[&ctx.inverse(&elems[a as usize])],
    }
}

fn check_associativity(flat: &[u32], size: usize) -> Result<(), SemigroupError> {
    let prod = |a: usize, b: usize| flat[a * size + b] as usize;
    if size <= EXHAUSTIVE_ASSOC_LIMIT {
        for a in 0..size {
            for b in 0..size {
                let ab = prod(a, b);
                for c in 0..size {
                    if prod(ab, c) != prod(a, prod(b, c)) {
                        return Err(SemigroupError::NotAssociative {
                            a: a as ElementId,
                            b: b as ElementId,
                            c: c as ElementId,
                        });
                    }
                }
            }
        }
    } else {
        let mut rng = SplitMix64::new(0x5eed);
        for _ in 0..SAMPLED_ASSOC_TRIPLES {
            let a = rng.below(size);
            let b = rng.below(size);
            let c = rng.below(size);
            if prod(prod(a, b), c) != prod(a, prod(b, c)) {
                return Err(SemigroupError::NotAssociative {
                    a: a as ElementId,
                    b: b as ElementId,
                    c: c as ElementId,
                });
            }
        }
    }
    Ok(())
}

fn compute_unique_inverses(flat: &[u32], size: usize) -> Result<Vec<ElementId>, SemigroupError> {
    let prod = |a: usize, b: usize| flat[a * size + b] as usize;
    let mut inv = Vec::with_capacity(size);
    for x in 0..size {
        let mut found = Vec::new();
        for y in 0..size {
            if prod(prod(x, y), x) == x && prod(prod(y, x), y) == y {
                found.push(y);
            }
        }
        if found.len() != 1 {
            return Err(SemigroupError::NoUniqueInverse {
                x: x as ElementId,
                count: found.len(),
            });
        }
        inv.push(found[0] as ElementId);
    }
    Ok(inv)
}

/// A finite semigroup given purely by its multiplication table, with no
/// inverse-semigroup requirement. Cross-section restrictions live here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainSemigroup {
    size: usize,
    /// Row-major products.
    table: Vec<ElementId>,
    labels: Vec<String>,
}

impl PlainSemigroup {
    pub fn label(&self, x: ElementId) -> &str {
        &self.labels[x as usize]
    }
}

/// Minimal product interface shared by inverse and plain semigroups; what
/// isomorphism testing actually needs.
pub trait Multiplication {
    fn size(&self) -> usize;
    fn product(&self, a: ElementId, b: ElementId) -> ElementId;

    fn is_idempotent_element(&self, x: ElementId) -> bool {
        self.product(x, x) == x
    }
}

impl Multiplication for FiniteInverseSemigroup {
    fn size(&self) -> usize {
        FiniteInverseSemigroup::size(self)
    }
    fn product(&self, a: ElementId, b: ElementId) -> ElementId {
        FiniteInverseSemigroup::product(self, a, b)
    }
}

impl Multiplication for PlainSemigroup {
    fn size(&self) -> usize {
        self.size
    }
    fn product(&self, a: ElementId, b: ElementId) -> ElementId {
        self.table[a as usize * self.size + b as usize]
    }
}

/// Per-element structural fingerprint used to prune isomorphism search:
/// idempotency, index and period of the cyclic subsemigroup, and principal
/// ideal sizes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
struct Fingerprint {
    idempotent: bool,
    index: u32,
    period: u32,
    right_ideal: u32,
    left_ideal: u32,
}

fn fingerprints<S: Multiplication + ?Sized>(s: &S) -> Vec<Fingerprint> {
    let n = s.size();
    (0..n as ElementId)
        .map(|x| {
            // powers x, x², … are eventually periodic
            let mut seen: HashMap<ElementId, u32> = HashMap::new();
            let mut cur = x;
            let mut step = 1u32;
            let (index, period) = loop {
                if let Some(&first) = seen.get(&cur) {
                    break (first, step - first);
                }
                seen.insert(cur, step);
                cur = s.product(cur, x);
                step += 1;
            };
            let mut right = vec![false; n];
            let mut left = vec![false; n];
            for y in 0..n as ElementId {
                right[s.product(x, y) as usize] = true;
                left[s.product(y, x) as usize] = true;
            }
            right[x as usize] = true;
            left[x as usize] = true;
            Fingerprint {
                idempotent: s.is_idempotent_element(x),
                index,
                period,
                right_ideal: right.iter().filter(|&&b| b).count() as u32,
                left_ideal: left.iter().filter(|&&b| b).count() as u32,
            }
        })
        .collect()
}

fn closure_generic<S: Multiplication + ?Sized>(s: &S, generators: &[ElementId]) -> Vec<ElementId> {
    let mut in_set = vec![false; s.size()];
    let mut members: Vec<ElementId> = Vec::new();
    let mut queue: Vec<ElementId> = Vec::new();
    for &g in generators {
        if !in_set[g as usize] {
            in_set[g as usize] = true;
            members.push(g);
            queue.push(g);
        }
    }
    while let Some(x) = queue.pop() {
        for i in 0..members.len() {
            let y = members[i];
            for p in [s.product(x, y), s.product(y, x)] {
                if !in_set[p as usize] {
                    in_set[p as usize] = true;
                    members.push(p);
                    queue.push(p);
                }
            }
        }
    }
    members.sort_unstable();
    members
}

/// Greedy generating sequence: scan elements in id order, keeping those not
/// yet generated by the previous picks.
fn generating_set<S: Multiplication + ?Sized>(s: &S) -> Vec<ElementId> {
    let mut gens: Vec<ElementId> = Vec::new();
    let mut closure: Vec<ElementId> = Vec::new();
    for x in 0..s.size() as ElementId {
        if !closure.contains(&x) {
            gens.push(x);
            closure = closure_generic(s, &gens);
            if closure.len() == s.size() {
                break;
            }
        }
    }
    gens
}

/// Default size cap for [`are_isomorphic`].
pub const DEFAULT_ISO_LIMIT: usize = 64;

/// Searches for a product-preserving bijection from `s1` onto `s2`,
/// backtracking over generator images with invariant-based pruning.
/// Returns the element map `φ` (indexed by `s1` ids) if one exists.
pub fn are_isomorphic<A: Multiplication + ?Sized, B: Multiplication + ?Sized>(
    s1: &A,
    s2: &B,
    limit: usize,
) -> Result<Option<Vec<ElementId>>, SemigroupError> {
    for size in [s1.size(), s2.size()] {
        if size > limit {
            return Err(SemigroupError::IsomorphismLimit { size, limit });
        }
    }
    if s1.size() != s2.size() {
        return Ok(None);
    }

    let fp1 = fingerprints(s1);
    let fp2 = fingerprints(s2);
    let mut sorted1 = fp1.clone();
    let mut sorted2 = fp2.clone();
    sorted1.sort_unstable();
    sorted2.sort_unstable();
    if sorted1 != sorted2 {
        return Ok(None);
    }

    let gens = generating_set(s1);
    let mut candidates: Vec<Vec<ElementId>> = gens
        .iter()
        .map(|&g| {
            (0..s2.size() as ElementId)
                .filter(|&h| fp2[h as usize] == fp1[g as usize])
                .collect()
        })
        .collect();
    // Most-constrained generator first.
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| candidates[i].len());
    let gens: Vec<ElementId> = order.iter().map(|&i| gens[i]).collect();
    candidates = order.iter().map(|&i| candidates[i].clone()).collect();

    let mut assignment: Vec<ElementId> = Vec::new();
    match backtrack_iso(s1, s2, &gens, &candidates, &mut assignment) {
        Some(map) => Ok(Some(map)),
        None => Ok(None),
    }
}

fn backtrack_iso<A: Multiplication + ?Sized, B: Multiplication + ?Sized>(
    s1: &A,
    s2: &B,
    gens: &[ElementId],
    candidates: &[Vec<ElementId>],
    assignment: &mut Vec<ElementId>,
) -> Option<Vec<ElementId>> {
    let i = assignment.len();
    if i == gens.len() {
        return match extend_generator_map(s1, s2, gens, assignment) {
            // All generators mapped: propagation spans the whole semigroup.
            Extension::Full(map) => Some(map),
            _ => None,
        };
    }
    for &cand in &candidates[i] {
        if assignment.contains(&cand) {
            continue;
        }
        assignment.push(cand);
        let consistent = !matches!(
            extend_generator_map(s1, s2, &gens[..=i], assignment),
            Extension::Contradiction
        );
        if consistent {
            if let Some(map) = backtrack_iso(s1, s2, gens, candidates, assignment) {
                return Some(map);
            }
        }
        assignment.pop();
    }
    None
}

enum Extension {
    Contradiction,
    /// Consistent but spans only part of the semigroup (generator prefix).
    Partial,
    Full(Vec<ElementId>),
}

/// Closes a generator assignment under products into a product-preserving
/// partial map.
fn extend_generator_map<A: Multiplication + ?Sized, B: Multiplication + ?Sized>(
    s1: &A,
    s2: &B,
    gens: &[ElementId],
    images: &[ElementId],
) -> Extension {
    let n = s1.size();
    let mut map: Vec<Option<ElementId>> = vec![None; n];
    let mut hit = vec![false; n];
    let mut mapped: Vec<ElementId> = Vec::new();

    for (&g, &h) in gens.iter().zip(images) {
        match map[g as usize] {
            Some(prev) if prev != h => return Extension::Contradiction,
            Some(_) => {}
            None => {
                if hit[h as usize] {
                    return Extension::Contradiction;
                }
                map[g as usize] = Some(h);
                hit[h as usize] = true;
                mapped.push(g);
            }
        }
    }

    let mut head = 0usize;
    while head < mapped.len() {
        let x = mapped[head];
        head += 1;
        let fx = map[x as usize].unwrap();
        for i in 0..mapped.len() {
            let y = mapped[i];
            let fy = map[y as usize].unwrap();
            for (p, q) in [
                (s1.product(x, y), s2.product(fx, fy)),
                (s1.product(y, x), s2.product(fy, fx)),
            ] {
                match map[p as usize] {
                    Some(r) => {
                        if r != q {
                            return Extension::Contradiction;
                        }
                    }
                    None => {
                        if hit[q as usize] {
                            return Extension::Contradiction;
                        }
                        map[p as usize] = Some(q);
                        hit[q as usize] = true;
                        mapped.push(p);
                    }
                }
            }
        }
    }

    if mapped.len() == n {
        Extension::Full(map.into_iter().map(|m| m.unwrap()).collect())
    } else {
        Extension::Partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isn_adapter_counts() {
        let s2 = FiniteInverseSemigroup::from_isn(2).unwrap();
        assert_eq!(s2.size(), 7);
        assert_eq!(s2.idempotents().len(), 4);
        assert!(s2.unit().is_some());
        assert!(s2.zero().is_some());

        let s3 = FiniteInverseSemigroup::from_isn(3).unwrap();
        assert_eq!(s3.size(), 34);
        assert_eq!(s3.idempotents().len(), 8);
    }

    #[test]
    fn isn2_products_match_composition() {
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let (_, elems) = s.isn_parts().unwrap();
        let elems = elems.to_vec();
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let p = s.product(i as ElementId, j as ElementId);
                assert_eq!(elems[p as usize], a.compose(b).unwrap());
            }
        }
    }

    #[test]
    fn axiom_suite_passes_on_isn3() {
        let s = FiniteInverseSemigroup::from_isn(3).unwrap();
        s.verify_inverse_semigroup(None, 0).unwrap();
    }

    #[test]
    fn inversion_is_involution_and_antihomomorphism() {
        let s = FiniteInverseSemigroup::from_isn(3).unwrap();
        let n = s.size() as ElementId;
        for x in 0..n {
            assert_eq!(s.inverse(s.inverse(x)), x);
            for y in 0..n {
                assert_eq!(
                    s.inverse(s.product(x, y)),
                    s.product(s.inverse(y), s.inverse(x))
                );
            }
        }
    }

    #[test]
    fn trivial_semigroup() {
        let t = FiniteInverseSemigroup::trivial();
        assert_eq!(t.size(), 1);
        assert_eq!(t.idempotents(), vec![0]);
        t.verify_inverse_semigroup(None, 0).unwrap();
    }

    #[test]
    fn cayley_round_trip_is2() {
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let t = s.export_cayley_table();
        let back = FiniteInverseSemigroup::from_cayley_table(&t).unwrap();
        assert_eq!(back.size(), 7);
        for a in 0..7 {
            assert_eq!(back.inverse(a), s.inverse(a));
            for b in 0..7 {
                assert_eq!(back.product(a, b), s.product(a, b));
            }
        }
        assert_eq!(back.unit(), s.unit());
        assert_eq!(back.zero(), s.zero());
        // Bytes round-trip too.
        let json = serde_json::to_string_pretty(&t).unwrap();
        let t2: CayleyTable = serde_json::from_str(&json).unwrap();
        assert_eq!(t, t2);
        assert_eq!(
            json,
            serde_json::to_string_pretty(&back.export_cayley_table()).unwrap()
        );
    }

    #[test]
    fn singleton_table() {
        let t = CayleyTable {
            size: 1,
            table: vec![vec![0]],
            labels: None,
            inverse: None,
        };
        let s = FiniteInverseSemigroup::from_cayley_table(&t).unwrap();
        assert_eq!(s.size(), 1);
        assert!(s.is_idempotent(0));
    }

    #[test]
    fn non_associative_table_rejected() {
        // 0·(0·1) = 0·0 = 1 but (0·0)·1 = 1·1 = 0.
        let broken = CayleyTable {
            size: 2,
            table: vec![vec![1, 0], vec![0, 0]],
            labels: None,
            inverse: None,
        };
        match FiniteInverseSemigroup::from_cayley_table(&broken) {
            Err(SemigroupError::NotAssociative { .. }) => {}
            other => panic!("expected associativity rejection, got {other:?}"),
        }
    }

    #[test]
    fn non_inverse_table_rejected() {
        // The two-element left-zero semigroup: x·y = x. Associative, but
        // every y is an inverse of every x, so uniqueness fails.
        let t = CayleyTable {
            size: 2,
            table: vec![vec![0, 0], vec![1, 1]],
            labels: None,
            inverse: None,
        };
        match FiniteInverseSemigroup::from_cayley_table(&t) {
            Err(SemigroupError::NoUniqueInverse { .. }) => {}
            other => panic!("expected inverse rejection, got {other:?}"),
        }
    }

    #[test]
    fn closure_examples() {
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let e = s.unit().unwrap();
        assert_eq!(s.subsemigroup_closure(&[e]), vec![e]);

        let chain12 = s
            .isn_id_of(&PartialBijection::chain(2, &[1, 2]).unwrap())
            .unwrap();
        let zero = s.zero().unwrap();
        assert_eq!(s.subsemigroup_closure(&[chain12]), {
            let mut v = vec![chain12, zero];
            v.sort_unstable();
            v
        });

        // Closure is monotone and idempotent.
        let c1 = s.subsemigroup_closure(&[chain12, e]);
        let c2 = s.subsemigroup_closure(&c1);
        assert_eq!(c1, c2);
    }

    #[test]
    fn isomorphic_to_itself() {
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let phi = are_isomorphic(&s, &s, DEFAULT_ISO_LIMIT).unwrap().unwrap();
        for a in 0..s.size() as ElementId {
            for b in 0..s.size() as ElementId {
                assert_eq!(
                    phi[s.product(a, b) as usize],
                    s.product(phi[a as usize], phi[b as usize])
                );
            }
        }
    }

    #[test]
    fn order_variants_of_one_block_sections_are_isomorphic() {
        // {e, id_2, [1 2], 0} and {e, id_1, [2 1], 0} inside IS_2.
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let grab = |texts: &[&str]| -> Vec<ElementId> {
            texts
                .iter()
                .map(|t| {
                    s.isn_id_of(&crate::notation::parse_element(t, 2).unwrap())
                        .unwrap()
                })
                .collect()
        };
        let m1 = grab(&["e", "[1]", "[1 2]", "0"]);
        let m2 = grab(&["e", "[2]", "[2 1]", "0"]);
        let r1 = s.restriction(&m1).unwrap();
        let r2 = s.restriction(&m2).unwrap();
        assert!(are_isomorphic(&r1, &r2, DEFAULT_ISO_LIMIT)
            .unwrap()
            .is_some());
        // Symmetry.
        assert!(are_isomorphic(&r2, &r1, DEFAULT_ISO_LIMIT)
            .unwrap()
            .is_some());
    }

    #[test]
    fn section_vs_semilattice_not_isomorphic() {
        let s = FiniteInverseSemigroup::from_isn(2).unwrap();
        let grab = |texts: &[&str]| -> Vec<ElementId> {
            texts
                .iter()
                .map(|t| {
                    s.isn_id_of(&crate::notation::parse_element(t, 2).unwrap())
                        .unwrap()
                })
                .collect()
        };
        let section = grab(&["e", "[1]", "[1 2]", "0"]);
        let idems = s.idempotents();
        let r1 = s.restriction(&section).unwrap();
        let r2 = s.restriction(&idems).unwrap();
        assert!(are_isomorphic(&r1, &r2, DEFAULT_ISO_LIMIT)
            .unwrap()
            .is_none());
    }

    #[test]
    fn iso_limit_enforced() {
        let s = FiniteInverseSemigroup::from_isn(3).unwrap();
        match are_isomorphic(&s, &s, 10) {
            Err(SemigroupError::IsomorphismLimit {
                size: 34,
                limit: 10,
            }) => {}
            other => panic!("expected limit error, got {other:?}"),
        }
    }

    #[test]
    fn on_demand_products_above_memo_limit() {
        // |IS_6| = 13327 > MEMO_LIMIT: products go through the backend.
        let s = FiniteInverseSemigroup::from_isn_limited(6, 20_000).unwrap();
        assert_eq!(s.size(), 13327);
        let (_, elems) = s.isn_parts().unwrap();
        let mut rng = SplitMix64::new(1);
        for _ in 0..2000 {
            let a = rng.below(s.size()) as ElementId;
            let b = rng.below(s.size()) as ElementId;
            let p = s.product(a, b);
            assert_eq!(
                elems[p as usize],
                elems[a as usize].compose(&elems[b as usize]).unwrap()
            );
        }
        let x = 12_000 as ElementId;
        assert_eq!(elems[s.inverse(x) as usize], elems[x as usize].inverse());
    }

    #[test]
    fn isn_limit_enforced() {
        match FiniteInverseSemigroup::from_isn(6) {
            Err(SemigroupError::LimitExceeded { .. }) => {}
            other => panic!("expected limit error, got {other:?}"),
        }
        assert!(FiniteInverseSemigroup::from_isn_limited(6, 20_000).is_ok());
    }
}

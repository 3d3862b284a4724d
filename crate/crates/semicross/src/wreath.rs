//! The partial wreath product S ≀ IS(M).
//!
//! Elements are pairs (f, a) where a is a partial bijection of
//! M = {1,…,m}, f is a partial map from M into an inner inverse semigroup
//! S, and dom(f) = dom(a). The product is
//!
//!   (f, a) · (g, b) = (f·g^a, a·b)
//!
//! with (f·g)(x) = f(x)·g(x) on dom(f) ∩ dom(g) and the pullback
//! (g^a)(x) = g(x·a) on { x ∈ dom(a) : x·a ∈ dom(g) }.
//!
//! Iterating the construction with S = IS_n models the partial
//! automorphisms of a k-level n-regular rooted tree: the top component of
//! each pair acts on level 1, the attached inner elements on the subtrees.

use std::cmp::Ordering;

use serde_json::{json, Value};
use thiserror::Error;

use crate::isn::{enumerate_isn_limited, isn_size, IsnError, PartialBijection, Point};
use crate::notation;
use crate::semigroup::{Backend, ElementId, FiniteInverseSemigroup, DEFAULT_MAX_ELEMENTS};

#[derive(Debug, Error)]
pub enum WreathError {
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u8, u8),
    #[error("base must be at least 1")]
    ZeroBase,
    #[error("inner element id {value} out of range 0..{size}")]
    ValueOutOfRange { value: ElementId, size: usize },
    #[error("dom(f) and dom(a) differ")]
    DomainMismatch,
    #[error("wreath product with {size} elements exceeds the limit of {limit}")]
    LimitExceeded { size: u128, limit: usize },
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error(transparent)]
    Isn(#[from] IsnError),
    #[error("element parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("elements of this inner semigroup cannot be parsed from text")]
    UnparseableInner,
}

fn perr(pos: usize, msg: impl Into<String>) -> WreathError {
    WreathError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// A partial map from {1,…,m} into an inner semigroup, values stored as
/// element handles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMapToS {
    base: u8,
    values: Vec<Option<ElementId>>,
}

impl PartialMapToS {
    pub fn empty(base: u8) -> Self {
        PartialMapToS {
            base,
            values: vec![None; base as usize],
        }
    }

    pub fn from_pairs(base: u8, pairs: &[(Point, ElementId)]) -> Result<Self, WreathError> {
        if base == 0 {
            return Err(WreathError::ZeroBase);
        }
        let mut values = vec![None; base as usize];
        for &(p, v) in pairs {
            if p == 0 || p > base {
                return Err(WreathError::Isn(IsnError::PointOutOfRange {
                    point: p,
                    rank: base,
                }));
            }
            values[p as usize - 1] = Some(v);
        }
        Ok(PartialMapToS { base, values })
    }

    /// The constant map with the given value on every point of `mask`.
    pub fn constant_on(base: u8, mask: u32, value: ElementId) -> Self {
        let values = (0..base)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    Some(value)
                } else {
                    None
                }
            })
            .collect();
        PartialMapToS { base, values }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn get(&self, x: Point) -> Option<ElementId> {
        debug_assert!(x >= 1 && x <= self.base);
        self.values[x as usize - 1]
    }

    pub fn domain_mask(&self) -> u32 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Pointwise product (f·g)(x) = f(x)·g(x) on dom(f) ∩ dom(g).
    pub fn product(
        &self,
        other: &Self,
        inner: &FiniteInverseSemigroup,
    ) -> Result<Self, WreathError> {
        if self.base != other.base {
            return Err(WreathError::BaseMismatch(self.base, other.base));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(inner.product(*x, *y)),
                _ => None,
            })
            .collect();
        Ok(PartialMapToS {
            base: self.base,
            values,
        })
    }

    /// The pullback f^a: x ↦ f(x·a) on { x ∈ dom(a) : x·a ∈ dom(f) }.
    pub fn pullback(&self, a: &PartialBijection) -> Result<Self, WreathError> {
        if a.rank() != self.base {
            return Err(WreathError::BaseMismatch(self.base, a.rank()));
        }
        let values = (1..=self.base)
            .map(|x| a.apply(x).and_then(|y| self.get(y)))
            .collect();
        Ok(PartialMapToS {
            base: self.base,
            values,
        })
    }
}

/// An element (f, a) of S ≀ IS(M) with dom(f) = dom(a).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    f: PartialMapToS,
    top: PartialBijection,
}

impl WreathElement {
    pub fn new(f: PartialMapToS, top: PartialBijection) -> Result<Self, WreathError> {
        if f.base() != top.rank() {
            return Err(WreathError::BaseMismatch(f.base(), top.rank()));
        }
        if f.domain_mask() != top.domain_mask() {
            return Err(WreathError::DomainMismatch);
        }
        Ok(WreathElement { f, top })
    }

    pub fn assignment(&self) -> &PartialMapToS {
        &self.f
    }

    pub fn top(&self) -> &PartialBijection {
        &self.top
    }
}

impl PartialOrd for WreathElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by the top component (isn order), then lexicographically
/// on the assignment.
impl Ord for WreathElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.top
            .cmp(&other.top)
            .then_with(|| self.f.values.cmp(&other.f.values))
    }
}

/// The arithmetic of S ≀ IS(M) for a fixed inner semigroup S and base size m.
#[derive(Clone)]
pub struct WreathContext {
    inner: FiniteInverseSemigroup,
    base: u8,
}

impl WreathContext {
    pub fn new(inner: FiniteInverseSemigroup, base: u8) -> Result<Self, WreathError> {
        if base == 0 {
            return Err(WreathError::ZeroBase);
        }
        Ok(WreathContext { inner, base })
    }

    pub fn inner(&self) -> &FiniteInverseSemigroup {
        &self.inner
    }

    pub fn base_size(&self) -> u8 {
        self.base
    }

    /// Validates ranges and the dom(f) = dom(a) invariant.
    pub fn make_element(
        &self,
        f: PartialMapToS,
        top: PartialBijection,
    ) -> Result<WreathElement, WreathError> {
        if f.base() != self.base {
            return Err(WreathError::BaseMismatch(f.base(), self.base));
        }
        for v in f.values.iter().flatten() {
            if *v as usize >= self.inner.size() {
                return Err(WreathError::ValueOutOfRange {
                    value: *v,
                    size: self.inner.size(),
                });
            }
        }
        WreathElement::new(f, top)
    }

    /// The unit (𝟙-constant on the full domain, id), if S has a unit.
    pub fn identity(&self) -> Option<WreathElement> {
        let unit = self.inner.unit()?;
        let full = (1u32 << self.base) - 1;
        Some(
            WreathElement::new(
                PartialMapToS::constant_on(self.base, full, unit),
                PartialBijection::identity(self.base),
            )
            .expect("full domains match"),
        )
    }

    /// The zero (empty assignment, empty map).
    pub fn zero(&self) -> WreathElement {
        WreathElement::new(
            PartialMapToS::empty(self.base),
            PartialBijection::empty(self.base),
        )
        .expect("empty domains match")
    }

    /// (f, a)·(g, b) = (f·g^a, a·b).
    pub fn multiply(
        &self,
        x: &WreathElement,
        y: &WreathElement,
    ) -> Result<WreathElement, WreathError> {
        if x.f.base() != self.base || y.f.base() != self.base {
            return Err(WreathError::BaseMismatch(x.f.base(), y.f.base()));
        }
        let pulled = y.f.pullback(&x.top)?;
        let f = x.f.product(&pulled, &self.inner)?;
        let top = x.top.compose(&y.top)?;
        WreathElement::new(f, top)
    }

    /// (f, a)⁻¹ = (g, a⁻¹) with g(y) = f(y·a⁻¹)⁻¹ for y ∈ ran(a).
    pub fn inverse(&self, x: &WreathElement) -> WreathElement {
        let top_inv = x.top.inverse();
        let values = (1..=self.base)
            .map(|y| {
                top_inv
                    .apply(y)
                    .and_then(|w| x.f.get(w))
                    .map(|v| self.inner.inverse(v))
            })
            .collect();
        let f = PartialMapToS {
            base: self.base,
            values,
        };
        WreathElement::new(f, top_inv).expect("dom matches ran(a)")
    }

    /// Idempotent iff a is idempotent in IS(M) and every f(i) is idempotent
    /// in S.
    pub fn is_idempotent(&self, x: &WreathElement) -> bool {
        x.top.is_idempotent()
            && x.f
                .values
                .iter()
                .flatten()
                .all(|&v| self.inner.is_idempotent(v))
    }

    /// Number of elements: Σ_{a ∈ IS_m} |S|^{|dom(a)|}. `None` on overflow.
    pub fn size(&self) -> Option<u128> {
        let s = self.inner.size() as u128;
        let m = self.base as u128;
        let mut total: u128 = 0;
        for k in 0..=m {
            let mut binom: u128 = 1;
            for i in 0..k {
                binom = binom.checked_mul(m - i)? / (i + 1);
            }
            let mut term = binom.checked_mul(binom)?;
            for i in 2..=k {
                term = term.checked_mul(i)?;
            }
            for _ in 0..k {
                term = term.checked_mul(s)?;
            }
            total = total.checked_add(term)?;
        }
        Some(total)
    }

    /// All elements in canonical order: by top component, then
    /// lexicographically on the assignment values.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<WreathElement>, WreathError> {
        let size = self.size().unwrap_or(u128::MAX);
        if size > limit as u128 {
            return Err(WreathError::LimitExceeded { size, limit });
        }
        let tops = enumerate_isn_limited(self.base, limit).map_err(WreathError::Isn)?;
        let s = self.inner.size() as ElementId;
        let mut out = Vec::with_capacity(size as usize);
        for top in tops {
            let dom: Vec<Point> = top.domain().collect();
            let mut values = vec![0 as ElementId; dom.len()];
            loop {
                let pairs: Vec<(Point, ElementId)> =
                    dom.iter().copied().zip(values.iter().copied()).collect();
                let f = PartialMapToS::from_pairs(self.base, &pairs)
                    .expect("points from a valid domain");
                out.push(WreathElement::new(f, top.clone()).expect("dom matches"));
                // Odometer with the last position fastest: lexicographic order.
                let mut i = values.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    values[i] += 1;
                    if values[i] < s {
                        break;
                    }
                    values[i] = 0;
                }
                if values.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Canonical text form "(i:elem …; top)", e.g. "(1:(1 2); [1 2])".
    pub fn format_element(&self, x: &WreathElement) -> String {
        let mut out = String::from("(");
        let mut first = true;
        for p in 1..=self.base {
            if let Some(v) = x.f.get(p) {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&p.to_string());
                out.push(':');
                out.push_str(&self.inner.element_text(v));
            }
        }
        out.push_str("; ");
        out.push_str(&notation::format_element(&x.top));
        out.push(')');
        out
    }

    /// JSON mirror of the text form: {"f": {"1": "(1 2)"}, "a": "[1 2]"}.
    pub fn element_to_json(&self, x: &WreathElement) -> Value {
        let mut f = serde_json::Map::new();
        for p in 1..=self.base {
            if let Some(v) = x.f.get(p) {
                f.insert(p.to_string(), Value::String(self.inner.element_text(v)));
            }
        }
        json!({ "f": f, "a": notation::format_element(&x.top) })
    }

    /// Parses the "(i:elem …; top)" form. Inner elements are parsed
    /// recursively (IS_n notation or nested wreath forms).
    pub fn parse_element(&self, text: &str) -> Result<WreathElement, WreathError> {
        let t = text.trim();
        let bytes = t.as_bytes();
        if bytes.is_empty() || bytes[0] != b'(' || bytes[bytes.len() - 1] != b')' {
            return Err(perr(0, "wreath element must be wrapped in ( … )"));
        }
        let body = &t[1..t.len() - 1];

        // Top-level ';' split (inner wreath elements keep theirs inside
        // their own parentheses).
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in body.char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                ';' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let split = split.ok_or_else(|| perr(0, "missing ';' between assignment and top"))?;
        let (pairs_text, top_text) = (&body[..split], &body[split + 1..]);

        let top = notation::parse_element(top_text.trim(), self.base)
            .map_err(|e| perr(split + 1, e.to_string()))?;

        let mut pairs: Vec<(Point, ElementId)> = Vec::new();
        let pb = pairs_text.as_bytes();
        let mut pos = 0usize;
        while pos < pb.len() {
            while pos < pb.len() && pb[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos >= pb.len() {
                break;
            }
            let start = pos;
            let mut point: u32 = 0;
            while pos < pb.len() && pb[pos].is_ascii_digit() {
                point = point * 10 + (pb[pos] - b'0') as u32;
                pos += 1;
            }
            if pos == start {
                return Err(perr(start, "expected a point number"));
            }
            if pos >= pb.len() || pb[pos] != b':' {
                return Err(perr(pos, "expected ':' after point"));
            }
            pos += 1;
            let vstart = pos;
            if pos < pb.len() && (pb[pos] == b'(' || pb[pos] == b'[') {
                let mut d = 0i32;
                while pos < pb.len() {
                    match pb[pos] {
                        b'(' | b'[' => d += 1,
                        b')' | b']' => {
                            d -= 1;
                            if d == 0 {
                                pos += 1;
                                break;
                            }
                        }
                        _ => {}
                    }
                    pos += 1;
                }
                if d != 0 {
                    return Err(perr(vstart, "unbalanced brackets in inner element"));
                }
                // Cycles may be juxtaposed: keep reading bracketed terms.
                while pos < pb.len() && (pb[pos] == b'(' || pb[pos] == b'[') {
                    let mut d = 0i32;
                    while pos < pb.len() {
                        match pb[pos] {
                            b'(' | b'[' => d += 1,
                            b')' | b']' => {
                                d -= 1;
                                if d == 0 {
                                    pos += 1;
                                    break;
                                }
                            }
                            _ => {}
                        }
                        pos += 1;
                    }
                    if d != 0 {
                        return Err(perr(vstart, "unbalanced brackets in inner element"));
                    }
                }
            } else {
                while pos < pb.len() && !pb[pos].is_ascii_whitespace() {
                    pos += 1;
                }
            }
            let value_text = &pairs_text[vstart..pos];
            let value = self.parse_inner_element(value_text, vstart)?;
            if point == 0 || point > self.base as u32 {
                return Err(perr(
                    start,
                    format!("point {point} out of range 1..={}", self.base),
                ));
            }
            pairs.push((point as Point, value));
        }

        let f = PartialMapToS::from_pairs(self.base, &pairs)?;
        self.make_element(f, top)
    }

    fn parse_inner_element(&self, text: &str, pos: usize) -> Result<ElementId, WreathError> {
        if let Some((n, _)) = self.inner.isn_parts() {
            let e = notation::parse_element(text, n).map_err(|e| perr(pos, e.to_string()))?;
            return self
                .inner
                .isn_id_of(&e)
                .ok_or_else(|| perr(pos, "element not found in inner semigroup"));
        }
        if let Some((ctx, _)) = self.inner.wreath_parts() {
            let e = ctx.parse_element(text)?;
            return self
                .inner
                .wreath_id_of(&e)
                .ok_or_else(|| perr(pos, "element not found in inner semigroup"));
        }
        Err(WreathError::UnparseableInner)
    }
}

/// Builds S ≀ IS_m as an enumerated semigroup.
pub fn build_wreath(
    inner: &FiniteInverseSemigroup,
    m: u8,
    limit: usize,
) -> Result<FiniteInverseSemigroup, WreathError> {
    let ctx = WreathContext::new(inner.clone(), m)?;
    let elems = ctx.enumerate(limit)?;
    let index: std::collections::HashMap<WreathElement, ElementId> = elems
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i as ElementId))
        .collect();
    let unit = ctx.identity().map(|e| index[&e]);
    let zero = Some(index[&ctx.zero()]);
    Ok(FiniteInverseSemigroup::from_backend(
        Backend::Wreath { ctx, elems, index },
        unit,
        zero,
    ))
}

/// The k-fold partial wreath power of IS_n with the default element limit:
/// each iteration wraps the previous semigroup as the inner part under a
/// fresh IS_n on top (the outermost top component is the level-1 action of
/// the corresponding rooted tree).
pub fn iterated_wreath(n: u8, k: u32) -> Result<FiniteInverseSemigroup, WreathError> {
    iterated_wreath_limited(n, k, DEFAULT_MAX_ELEMENTS)
}

pub fn iterated_wreath_limited(
    n: u8,
    k: u32,
    limit: usize,
) -> Result<FiniteInverseSemigroup, WreathError> {
    if k == 0 {
        return Err(WreathError::ZeroIterations);
    }
    let mut acc = FiniteInverseSemigroup::from_isn_limited(n, limit).map_err(|_| {
        WreathError::LimitExceeded {
            size: isn_size(n),
            limit,
        }
    })?;
    for _ in 1..k {
        acc = build_wreath(&acc, n, limit)?;
    }
    Ok(acc)
}

/// Expected idempotent count of S ≀ IS_m: (|E(S)| + 1)^m.
pub fn idempotent_count_formula(inner_idempotents: u128, m: u32) -> u128 {
    (inner_idempotents + 1).pow(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::DEFAULT_MAX_ELEMENTS;

    fn is2() -> FiniteInverseSemigroup {
        FiniteInverseSemigroup::from_isn(2).unwrap()
    }

    fn id_of(s: &FiniteInverseSemigroup, text: &str) -> ElementId {
        let (n, _) = s.isn_parts().unwrap();
        s.isn_id_of(&notation::parse_element(text, n).unwrap())
            .unwrap()
    }

    #[test]
    fn pmap_product_cases() {
        let inner = is2();
        let f = PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "e"))]).unwrap();
        let g = PartialMapToS::from_pairs(2, &[(2, id_of(&inner, "e"))]).unwrap();
        let fg = f.product(&g, &inner).unwrap();
        assert_eq!(fg.domain_mask(), 0);

        let unit = inner.unit().unwrap();
        let h = PartialMapToS::constant_on(2, 0b11, unit);
        assert_eq!(h.product(&h, &inner).unwrap(), h);

        let f = PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "(1 2)"))]).unwrap();
        let g = PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "[1 2]"))]).unwrap();
        let fg = f.product(&g, &inner).unwrap();
        assert_eq!(fg.get(1), Some(id_of(&inner, "[1]"))); // partial identity on {2}
    }

    #[test]
    fn pmap_pullback_cases() {
        let f = PartialMapToS::from_pairs(2, &[(1, 3), (2, 5)]).unwrap();
        let id = PartialBijection::identity(2);
        assert_eq!(f.pullback(&id).unwrap(), f);

        let zero = PartialBijection::empty(2);
        assert_eq!(f.pullback(&zero).unwrap().domain_mask(), 0);

        // a = [1 2], f defined only at 2 → f^a defined only at 1, value f(2).
        let f = PartialMapToS::from_pairs(2, &[(2, 4)]).unwrap();
        let a = PartialBijection::chain(2, &[1, 2]).unwrap();
        let fa = f.pullback(&a).unwrap();
        assert_eq!(fa.get(1), Some(4));
        assert_eq!(fa.get(2), None);

        let g = PartialMapToS::from_pairs(3, &[(1, 0)]).unwrap();
        assert!(matches!(
            g.pullback(&a),
            Err(WreathError::BaseMismatch(3, 2))
        ));
    }

    #[test]
    fn multiply_worked_example() {
        let inner = is2();
        let ctx = WreathContext::new(inner.clone(), 2).unwrap();
        let x = ctx
            .make_element(
                PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "(1 2)"))]).unwrap(),
                PartialBijection::chain(2, &[1, 2]).unwrap(),
            )
            .unwrap();
        let y = ctx
            .make_element(
                PartialMapToS::from_pairs(
                    2,
                    &[(1, id_of(&inner, "[2]")), (2, id_of(&inner, "[2 1]"))],
                )
                .unwrap(),
                PartialBijection::identity(2),
            )
            .unwrap();
        let xy = ctx.multiply(&x, &y).unwrap();
        assert_eq!(*xy.top(), PartialBijection::chain(2, &[1, 2]).unwrap());
        assert_eq!(xy.assignment().get(1), Some(id_of(&inner, "[2]"))); // id on {1}
        assert_eq!(xy.assignment().get(2), None);
    }

    #[test]
    fn multiply_unit_acts_trivially() {
        let inner = is2();
        let ctx = WreathContext::new(inner.clone(), 2).unwrap();
        let e = ctx.identity().unwrap();
        for y in ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap().iter().take(40) {
            assert_eq!(&ctx.multiply(&e, y).unwrap(), y);
            assert_eq!(&ctx.multiply(y, &e).unwrap(), y);
        }
    }

    #[test]
    fn inverse_worked_example() {
        let inner = is2();
        let ctx = WreathContext::new(inner.clone(), 2).unwrap();
        let x = ctx
            .make_element(
                PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "(1 2)"))]).unwrap(),
                PartialBijection::chain(2, &[1, 2]).unwrap(),
            )
            .unwrap();
        let xi = ctx.inverse(&x);
        assert_eq!(*xi.top(), PartialBijection::chain(2, &[2, 1]).unwrap());
        assert_eq!(xi.assignment().get(2), Some(id_of(&inner, "(1 2)")));
        assert_eq!(xi.assignment().get(1), None);

        let e = ctx.identity().unwrap();
        assert_eq!(ctx.inverse(&e), e);
    }

    #[test]
    fn inverse_axioms_exhaustive() {
        let inner = is2();
        let ctx = WreathContext::new(inner, 2).unwrap();
        let elems = ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(elems.len(), 127);
        for x in &elems {
            let xi = ctx.inverse(x);
            let back = ctx.multiply(&ctx.multiply(x, &xi).unwrap(), x).unwrap();
            assert_eq!(&back, x);
            let there = ctx.multiply(&ctx.multiply(&xi, x).unwrap(), &xi).unwrap();
            assert_eq!(there, xi);
            assert_eq!(ctx.inverse(&xi), *x);
        }
    }

    #[test]
    fn domain_invariant_closed_under_multiplication() {
        let inner = is2();
        let ctx = WreathContext::new(inner, 2).unwrap();
        let elems = ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap();
        for x in &elems {
            for y in &elems {
                let p = ctx.multiply(x, y).unwrap();
                assert_eq!(p.assignment().domain_mask(), p.top().domain_mask());
            }
        }
    }

    #[test]
    fn idempotent_predicate_matches_squaring() {
        let inner = is2();
        let ctx = WreathContext::new(inner, 2).unwrap();
        let elems = ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap();
        let mut count = 0usize;
        for x in &elems {
            let structural = ctx.is_idempotent(x);
            let squared = ctx.multiply(x, x).unwrap() == *x;
            assert_eq!(structural, squared);
            if structural {
                count += 1;
            }
        }
        assert_eq!(count, 25);
        assert_eq!(idempotent_count_formula(4, 2), 25);
        assert!(ctx.is_idempotent(&ctx.zero()));
        assert!(ctx.is_idempotent(&ctx.identity().unwrap()));
    }

    #[test]
    fn build_sizes() {
        let w = build_wreath(&is2(), 2, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(w.size(), 127);
        assert!(w.unit().is_some());
        assert!(w.zero().is_some());

        let t = build_wreath(&FiniteInverseSemigroup::trivial(), 2, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(t.size(), 7);
    }

    #[test]
    fn trivial_inner_wreath_is_fully_associative() {
        let t = build_wreath(&FiniteInverseSemigroup::trivial(), 2, DEFAULT_MAX_ELEMENTS).unwrap();
        t.verify_inverse_semigroup(None, 0).unwrap();
    }

    #[test]
    fn iterated_wreath_sizes() {
        assert_eq!(iterated_wreath(2, 1).unwrap().size(), 7);
        let w = iterated_wreath(2, 2).unwrap();
        assert_eq!(w.size(), 127);
        assert_eq!(w.idempotents().len(), 25);
        assert!(matches!(
            iterated_wreath(2, 3),
            Err(WreathError::LimitExceeded { size: 32767, .. })
        ));
    }

    #[test]
    fn format_and_parse_round_trip() {
        let inner = is2();
        let ctx = WreathContext::new(inner.clone(), 2).unwrap();
        let x = ctx
            .make_element(
                PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "(1 2)"))]).unwrap(),
                PartialBijection::chain(2, &[1, 2]).unwrap(),
            )
            .unwrap();
        assert_eq!(ctx.format_element(&x), "(1:(1 2); [1 2])");
        assert_eq!(ctx.parse_element("(1:(1 2); [1 2])").unwrap(), x);

        assert_eq!(ctx.format_element(&ctx.zero()), "(; 0)");
        assert_eq!(ctx.parse_element("(; 0)").unwrap(), ctx.zero());

        for e in ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap() {
            let text = ctx.format_element(&e);
            assert_eq!(ctx.parse_element(&text).unwrap(), e, "round trip of {text}");
        }
    }

    #[test]
    fn element_json_shape() {
        let inner = is2();
        let ctx = WreathContext::new(inner.clone(), 2).unwrap();
        let x = ctx
            .make_element(
                PartialMapToS::from_pairs(2, &[(1, id_of(&inner, "(1 2)"))]).unwrap(),
                PartialBijection::chain(2, &[1, 2]).unwrap(),
            )
            .unwrap();
        assert_eq!(
            ctx.element_to_json(&x),
            serde_json::json!({"f": {"1": "(1 2)"}, "a": "[1 2]"})
        );
    }

    #[test]
    fn nested_parse_round_trip() {
        // Elements of (IS_2 ≀ IS_2) ≀ IS_2 print with nested '(…; …)' forms.
        let w = build_wreath(&is2(), 2, DEFAULT_MAX_ELEMENTS).unwrap();
        let ctx = WreathContext::new(w.clone(), 2).unwrap();
        let sample = ctx
            .make_element(
                PartialMapToS::from_pairs(2, &[(1, 17), (2, 90)]).unwrap(),
                PartialBijection::identity(2),
            )
            .unwrap();
        let text = ctx.format_element(&sample);
        assert_eq!(ctx.parse_element(&text).unwrap(), sample);
    }

    #[test]
    fn enumeration_is_strictly_increasing() {
        let ctx = WreathContext::new(is2(), 2).unwrap();
        let elems = ctx.enumerate(DEFAULT_MAX_ELEMENTS).unwrap();
        for w in elems.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}

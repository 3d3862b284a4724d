//! Green's R and L relations.
//!
//! Two routes are kept deliberately independent so they can cross-validate
//! each other:
//!
//! - the generic, ideal-based definitions (a R b ⇔ aS¹ = bS¹, a L b ⇔
//!   S¹a = S¹b), computed by explicit ideal enumeration and memoized per
//!   semigroup as a class partition;
//! - the structural characterizations: on IS_n, a R b ⇔ dom(a) = dom(b)
//!   and a L b ⇔ ran(a) = ran(b); on S ≀ IS(M), the componentwise rules of
//!   the wreath product.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

use crate::isn::{IsnError, PartialBijection};
use crate::semigroup::{ElementId, FiniteInverseSemigroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreenRelation {
    R,
    L,
}

impl GreenRelation {
    pub fn flipped(self) -> Self {
        match self {
            GreenRelation::R => GreenRelation::L,
            GreenRelation::L => GreenRelation::R,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GreenRelation::R => "R",
            GreenRelation::L => "L",
        }
    }
}

impl fmt::Display for GreenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("operation requires a wreath-product semigroup")]
    NotWreathBacked,
    #[error(transparent)]
    Isn(#[from] IsnError),
}

/// Disjoint classes covering the semigroup, each holding exactly one
/// idempotent (its representative).
#[derive(Clone, Debug)]
pub struct GreenClassPartition {
    pub relation: GreenRelation,
    /// Element id → class index.
    pub class_of: Vec<u32>,
    /// Classes ordered by smallest member id; members ascending.
    pub classes: Vec<Vec<ElementId>>,
    /// The unique idempotent of each class.
    pub representatives: Vec<ElementId>,
}

impl GreenClassPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Ideal-based partition; called once per semigroup and relation through
/// [`FiniteInverseSemigroup::green`].
pub(crate) fn compute_green_classes(
    s: &FiniteInverseSemigroup,
    relation: GreenRelation,
) -> GreenClassPartition {
    let n = s.size();
    let blocks = n.div_ceil(64);
    let mut groups: HashMap<Vec<u64>, Vec<ElementId>> = HashMap::new();

    for x in 0..n as ElementId {
        let mut ideal = vec![0u64; blocks];
        for y in 0..n as ElementId {
            let p = match relation {
                GreenRelation::R => s.product(x, y),
                GreenRelation::L => s.product(y, x),
            };
            ideal[p as usize / 64] |= 1 << (p % 64);
        }
        if s.unit().is_none() {
            // S¹ adjoins an external identity only when S lacks one.
            ideal[x as usize / 64] |= 1 << (x % 64);
        }
        groups.entry(ideal).or_default().push(x);
    }

    let mut classes: Vec<Vec<ElementId>> = groups.into_values().collect();
    for class in &mut classes {
        class.sort_unstable();
    }
    classes.sort_by_key(|c| c[0]);

    let mut class_of = vec![0u32; n];
    let mut representatives = Vec::with_capacity(classes.len());
    for (ci, class) in classes.iter().enumerate() {
        let mut idems = class.iter().copied().filter(|&x| s.is_idempotent(x));
        let rep = idems
            .next()
            .expect("every Green class of an inverse semigroup holds an idempotent");
        assert!(
            idems.next().is_none(),
            "more than one idempotent in a Green class"
        );
        representatives.push(rep);
        for &x in class {
            class_of[x as usize] = ci as u32;
        }
    }

    GreenClassPartition {
        relation,
        class_of,
        classes,
        representatives,
    }
}

/// The partition itself (memoized).
pub fn green_classes(s: &FiniteInverseSemigroup, relation: GreenRelation) -> &GreenClassPartition {
    s.green(relation)
}

/// a R b ⇔ aS¹ = bS¹, by ideal enumeration.
pub fn r_related_generic(s: &FiniteInverseSemigroup, x: ElementId, y: ElementId) -> bool {
    let g = s.green(GreenRelation::R);
    g.class_of[x as usize] == g.class_of[y as usize]
}

/// a L b ⇔ S¹a = S¹b, by ideal enumeration.
pub fn l_related_generic(s: &FiniteInverseSemigroup, x: ElementId, y: ElementId) -> bool {
    let g = s.green(GreenRelation::L);
    g.class_of[x as usize] == g.class_of[y as usize]
}

/// On IS_n: a R b ⇔ dom(a) = dom(b).
pub fn r_related_isn(a: &PartialBijection, b: &PartialBijection) -> Result<bool, IsnError> {
    if a.rank() != b.rank() {
        return Err(IsnError::RankMismatch(a.rank(), b.rank()));
    }
    Ok(a.domain_mask() == b.domain_mask())
}

/// On IS_n: a L b ⇔ ran(a) = ran(b).
pub fn l_related_isn(a: &PartialBijection, b: &PartialBijection) -> Result<bool, IsnError> {
    if a.rank() != b.rank() {
        return Err(IsnError::RankMismatch(a.rank(), b.rank()));
    }
    Ok(a.range_mask() == b.range_mask())
}

/// On S ≀ IS(M): (f,a) R (g,b) ⇔ dom(a) = dom(b) and f(z) R g(z) for every
/// z ∈ dom(a), the inner relation taken in S.
pub fn r_related_wreath(
    w: &FiniteInverseSemigroup,
    x: ElementId,
    y: ElementId,
) -> Result<bool, GreenError> {
    let (ctx, elems) = w.wreath_parts().ok_or(GreenError::NotWreathBacked)?;
    let (ex, ey) = (&elems[x as usize], &elems[y as usize]);
    if ex.top().domain_mask() != ey.top().domain_mask() {
        return Ok(false);
    }
    let inner = ctx.inner();
    for z in 1..=ctx.base_size() {
        if let (Some(u), Some(v)) = (ex.assignment().get(z), ey.assignment().get(z)) {
            if !r_related_generic(inner, u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// On S ≀ IS(M): (f,a) L (g,b) ⇔ ran(a) = ran(b) and, for every z ∈ ran(a),
/// f^{a⁻¹}(z) L g^{b⁻¹}(z) in S — each assignment pulled back along its own
/// inverted top part, which is everywhere defined on the shared range.
pub fn l_related_wreath(
    w: &FiniteInverseSemigroup,
    x: ElementId,
    y: ElementId,
) -> Result<bool, GreenError> {
    let (ctx, elems) = w.wreath_parts().ok_or(GreenError::NotWreathBacked)?;
    let (ex, ey) = (&elems[x as usize], &elems[y as usize]);
    if ex.top().range_mask() != ey.top().range_mask() {
        return Ok(false);
    }
    let inner = ctx.inner();
    let ax_inv = ex.top().inverse();
    let ay_inv = ey.top().inverse();
    for z in 1..=ctx.base_size() {
        let u = ax_inv.apply(z).and_then(|p| ex.assignment().get(p));
        let v = ay_inv.apply(z).and_then(|p| ey.assignment().get(p));
        match (u, v) {
            (None, None) => {}
            (Some(u), Some(v)) => {
                if !l_related_generic(inner, u, v) {
                    return Ok(false);
                }
            }
            _ => unreachable!("shared range, own-inverse pullbacks total on it"),
        }
    }
    Ok(true)
}

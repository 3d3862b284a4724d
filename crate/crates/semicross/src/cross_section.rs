//! Construction and verification of R- and L-cross-sections.
//!
//! A cross-section of a Green relation is a subsemigroup containing exactly
//! one element from every equivalence class; its size therefore equals the
//! number of idempotents of the ambient semigroup.
//!
//! For IS_n the R-cross-sections are parameterized by ordered partitions of
//! {1,…,n}: the blocks with their linear orders give chain generators whose
//! closure (plus the identity) is a cross-section, and every R-cross-section
//! arises this way. For S ≀ IS_n, gluing one inner R-cross-section per block
//! to the block-wise construction on the top level yields R-cross-sections
//! of the wreath product.
//!
//! Every construction here verifies its output and fails loudly; the
//! structure theorems are treated as oracles to check, not axioms to trust.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::green::GreenRelation;
use crate::isn::{IsnError, PartialBijection, Point};
use crate::semigroup::{ElementId, FiniteInverseSemigroup, PlainSemigroup, SemigroupError};
use crate::wreath::{PartialMapToS, WreathElement, WreathError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrossSectionViolation {
    #[error("element {element} is outside the ambient semigroup")]
    NotInSemigroup { element: ElementId },
    #[error("member {element} listed twice")]
    DuplicateMember { element: ElementId },
    #[error("not closed: {a}·{b} = {product} is not a member")]
    NotClosed {
        a: ElementId,
        b: ElementId,
        product: ElementId,
    },
    #[error("class of idempotent {representative} has no member")]
    ClassMissed { representative: ElementId },
    #[error("class of idempotent {representative} holds members {first} and {second}")]
    ClassDoubled {
        representative: ElementId,
        first: ElementId,
        second: ElementId,
    },
}

#[derive(Debug, Error)]
pub enum CrossSectionError {
    #[error("block index {i} out of range 1..={blocks}")]
    BlockOutOfRange { i: usize, blocks: usize },
    #[error("prefix length {j} out of range 1..={len}")]
    PrefixOutOfRange { j: usize, len: usize },
    #[error("ordered partition must cover every point exactly once (point {point})")]
    BadPartition { point: Point },
    #[error("empty block in ordered partition")]
    EmptyBlock,
    #[error("partition rank {expected} does not match semigroup rank {got}")]
    RankMismatch { expected: u8, got: u8 },
    #[error("expected an IS_n-backed semigroup")]
    NotIsnBacked,
    #[error("expected a wreath-product semigroup")]
    NotWreathBacked,
    #[error("need one inner cross-section per block: {blocks} blocks, {given} given")]
    InnerCountMismatch { blocks: usize, given: usize },
    #[error("inner cross-section {i} is not over the wreath's inner semigroup")]
    InnerAmbientMismatch { i: usize },
    #[error("inner cross-section {i} must be an R-cross-section")]
    InnerRelationMismatch { i: usize },
    #[error("cross-section relation must be {0}")]
    WrongRelation(GreenRelation),
    #[error("inner semigroup has no zero element")]
    NoZero,
    #[error("inner semigroup has no unit element")]
    NoUnit,
    #[error("map is not an automorphism: {reason}")]
    NotAutomorphism { reason: String },
    #[error("φ_{point} is not an invertible unit-class element")]
    NotInvertible { point: Point },
    #[error("constructed set failed verification (theorem violation): {0}")]
    ConstructionInvariant(CrossSectionViolation),
    #[error("verification failed: {0}")]
    Violation(#[from] CrossSectionViolation),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Wreath(#[from] WreathError),
    #[error(transparent)]
    Isn(#[from] IsnError),
    #[error("partition parse error: {0}")]
    PartitionParse(String),
}

/// A decomposition of {1,…,n} into disjoint nonempty blocks, each carrying
/// a linear order (the block's element sequence). Blocks are canonicalized
/// by minimal element; the within-block sequence is meaningful data.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedPartition {
    n: u8,
    blocks: Vec<Vec<Point>>,
}

impl OrderedPartition {
    pub fn new(n: u8, blocks: Vec<Vec<Point>>) -> Result<Self, CrossSectionError> {
        let mut seen = vec![false; n as usize + 1];
        for block in &blocks {
            if block.is_empty() {
                return Err(CrossSectionError::EmptyBlock);
            }
            for &p in block {
                if p == 0 || p > n || seen[p as usize] {
                    return Err(CrossSectionError::BadPartition { point: p });
                }
                seen[p as usize] = true;
            }
        }
        for p in 1..=n {
            if !seen[p as usize] {
                return Err(CrossSectionError::BadPartition { point: p });
            }
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| *b.iter().min().expect("nonempty"));
        Ok(OrderedPartition { n, blocks })
    }

    /// Parses the "m₁<m₂<…|…" form, e.g. "2<1|3".
    pub fn parse(text: &str, n: u8) -> Result<Self, CrossSectionError> {
        let mut blocks = Vec::new();
        for chunk in text.split('|') {
            let mut block = Vec::new();
            for item in chunk.split('<') {
                let item = item.trim();
                let p: u64 = item.parse().map_err(|_| {
                    CrossSectionError::PartitionParse(format!("bad point {item:?}"))
                })?;
                if p == 0 || p > n as u64 {
                    return Err(CrossSectionError::PartitionParse(format!(
                        "point {p} out of range 1..={n}"
                    )));
                }
                block.push(p as Point);
            }
            blocks.push(block);
        }
        Self::new(n, blocks)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<Point>] {
        &self.blocks
    }

    pub fn block_index_of(&self, p: Point) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&p))
            .expect("partition covers every point")
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, p) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str("<")?;
                }
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

/// A verified cross-section: a subsemigroup meeting every class of the
/// chosen Green relation exactly once.
#[derive(Clone)]
pub struct CrossSection {
    ambient: FiniteInverseSemigroup,
    relation: GreenRelation,
    members: Vec<ElementId>,
}

impl CrossSection {
    /// Verifies and wraps a member set.
    pub fn verify(
        ambient: &FiniteInverseSemigroup,
        relation: GreenRelation,
        members: &[ElementId],
    ) -> Result<Self, CrossSectionViolation> {
        is_cross_section(ambient, relation, members)?;
        let mut members = members.to_vec();
        members.sort_unstable();
        Ok(CrossSection {
            ambient: ambient.clone(),
            relation,
            members,
        })
    }

    pub fn ambient(&self) -> &FiniteInverseSemigroup {
        &self.ambient
    }

    pub fn relation(&self) -> GreenRelation {
        self.relation
    }

    /// Members in ascending id order.
    pub fn members(&self) -> &[ElementId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The sub-semigroup on the members, as a plain multiplication table
    /// (cross-sections need not be inverse subsemigroups).
    pub fn as_semigroup(&self) -> Result<PlainSemigroup, SemigroupError> {
        self.ambient.restriction(&self.members)
    }

    /// JSON dump: {relation, ambient, members:[elem-text, …]}.
    pub fn to_json(&self) -> Value {
        json!({
            "relation": self.relation.as_str(),
            "ambient": self.ambient.describe(),
            "members": self
                .members
                .iter()
                .map(|&m| self.ambient.element_text(m))
                .collect::<Vec<_>>(),
        })
    }
}

impl PartialEq for CrossSection {
    fn eq(&self, other: &Self) -> bool {
        self.relation == other.relation && self.members == other.members
    }
}
impl Eq for CrossSection {}

impl fmt::Debug for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-cross-section of {} with {} members",
            self.relation,
            self.ambient.describe(),
            self.members.len()
        )
    }
}

/// Checks the cross-section conditions, reporting the first violation as a
/// witness: members must be distinct, product-closed, and hit each Green
/// class exactly once.
pub fn is_cross_section(
    s: &FiniteInverseSemigroup,
    relation: GreenRelation,
    members: &[ElementId],
) -> Result<(), CrossSectionViolation> {
    let size = s.size();
    let mut in_set = vec![false; size];
    for &m in members {
        if m as usize >= size {
            return Err(CrossSectionViolation::NotInSemigroup { element: m });
        }
        if in_set[m as usize] {
            return Err(CrossSectionViolation::DuplicateMember { element: m });
        }
        in_set[m as usize] = true;
    }

    for &a in members {
        for &b in members {
            let p = s.product(a, b);
            if !in_set[p as usize] {
                return Err(CrossSectionViolation::NotClosed { a, b, product: p });
            }
        }
    }

    let green = s.green(relation);
    let mut chosen: Vec<Option<ElementId>> = vec![None; green.class_count()];
    for &m in members {
        let c = green.class_of[m as usize] as usize;
        match chosen[c] {
            None => chosen[c] = Some(m),
            Some(first) => {
                return Err(CrossSectionViolation::ClassDoubled {
                    representative: green.representatives[c],
                    first,
                    second: m,
                })
            }
        }
    }
    for (c, slot) in chosen.iter().enumerate() {
        if slot.is_none() {
            return Err(CrossSectionViolation::ClassMissed {
                representative: green.representatives[c],
            });
        }
    }
    Ok(())
}

/// The generator a_{i,j} (1-based block i, prefix length j): the chain on
/// the first j points of block i, identity elsewhere. Its domain misses
/// exactly one point.
pub fn chain_generator(
    p: &OrderedPartition,
    i: usize,
    j: usize,
) -> Result<PartialBijection, CrossSectionError> {
    if i == 0 || i > p.blocks.len() {
        return Err(CrossSectionError::BlockOutOfRange {
            i,
            blocks: p.blocks.len(),
        });
    }
    let block = &p.blocks[i - 1];
    if j == 0 || j > block.len() {
        return Err(CrossSectionError::PrefixOutOfRange {
            j,
            len: block.len(),
        });
    }
    Ok(PartialBijection::chain(p.n, &block[..j])?)
}

/// The closure of all a_{i,j} plus the identity: an R-cross-section of IS_n
/// with 2^n members, one per domain subset.
pub fn build_isn_r_cross_section(
    s: &FiniteInverseSemigroup,
    p: &OrderedPartition,
) -> Result<CrossSection, CrossSectionError> {
    let (n, _) = s.isn_parts().ok_or(CrossSectionError::NotIsnBacked)?;
    if n != p.n {
        return Err(CrossSectionError::RankMismatch {
            expected: p.n,
            got: n,
        });
    }
    let mut gens = Vec::new();
    for (bi, block) in p.blocks.iter().enumerate() {
        for j in 1..=block.len() {
            let g = chain_generator(p, bi + 1, j)?;
            gens.push(s.isn_id_of(&g).expect("generator is an IS_n element"));
        }
    }
    gens.push(s.unit().expect("IS_n has a unit"));
    let members = s.subsemigroup_closure(&gens);
    CrossSection::verify(s, GreenRelation::R, &members)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// Elements of the one-block construction on `block`, realized inside IS_n
/// as maps undefined outside the block: exactly one element per subset of
/// the block (as domain), 2^|block| in total.
pub(crate) fn block_section_elements(n: u8, block: &[Point]) -> Vec<PartialBijection> {
    let mask = block.iter().fold(0u32, |m, &p| m | (1 << (p - 1)));
    let mut set: BTreeSet<PartialBijection> = BTreeSet::new();
    for j in 1..=block.len() {
        set.insert(
            PartialBijection::chain(n, &block[..j])
                .expect("block points are valid")
                .restrict_to(mask),
        );
    }
    set.insert(PartialBijection::partial_identity(n, mask));
    loop {
        let snapshot: Vec<PartialBijection> = set.iter().cloned().collect();
        let before = set.len();
        for a in &snapshot {
            for b in &snapshot {
                set.insert(a.compose(b).expect("same rank"));
            }
        }
        if set.len() == before {
            break;
        }
    }
    debug_assert_eq!(set.len(), 1 << block.len());
    set.into_iter().collect()
}

/// The product-of-wreaths construction: members (f, a) where the restriction
/// of a to each block lies in that block's one-block construction and each
/// f(x) lies in the inner cross-section assigned to x's block. Verified as
/// an R-cross-section of S ≀ IS_n with (|E(S)|+1)^n members.
pub fn build_wreath_r_cross_section(
    w: &FiniteInverseSemigroup,
    p: &OrderedPartition,
    inner_sections: &[CrossSection],
) -> Result<CrossSection, CrossSectionError> {
    let (ctx, _) = w.wreath_parts().ok_or(CrossSectionError::NotWreathBacked)?;
    let m = ctx.base_size();
    if m != p.n {
        return Err(CrossSectionError::RankMismatch {
            expected: p.n,
            got: m,
        });
    }
    if inner_sections.len() != p.blocks.len() {
        return Err(CrossSectionError::InnerCountMismatch {
            blocks: p.blocks.len(),
            given: inner_sections.len(),
        });
    }
    for (i, sec) in inner_sections.iter().enumerate() {
        if !sec.ambient().same_semigroup(ctx.inner()) {
            return Err(CrossSectionError::InnerAmbientMismatch { i });
        }
        if sec.relation() != GreenRelation::R {
            return Err(CrossSectionError::InnerRelationMismatch { i });
        }
    }

    let block_elems: Vec<Vec<PartialBijection>> = p
        .blocks
        .iter()
        .map(|b| block_section_elements(m, b))
        .collect();
    let block_of: Vec<usize> = (1..=m).map(|pt| p.block_index_of(pt)).collect();

    let mut members = Vec::new();
    let mut tops = vec![0usize; p.blocks.len()];
    loop {
        // Assemble the top part from the per-block choices.
        let mut pairs: Vec<(Point, Point)> = Vec::new();
        for (bi, &ti) in tops.iter().enumerate() {
            let b = &block_elems[bi][ti];
            for x in b.domain() {
                pairs.push((x, b.apply(x).expect("domain point")));
            }
        }
        let top = PartialBijection::from_pairs(m, &pairs).expect("blocks are disjoint");
        let dom: Vec<Point> = top.domain().collect();

        // All assignments with f(x) drawn from x's inner cross-section.
        let mut choice = vec![0usize; dom.len()];
        loop {
            let fpairs: Vec<(Point, ElementId)> = dom
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    (
                        x,
                        inner_sections[block_of[x as usize - 1]].members()[choice[k]],
                    )
                })
                .collect();
            let f = PartialMapToS::from_pairs(m, &fpairs).expect("valid points");
            let elem = WreathElement::new(f, top.clone()).expect("dom(f) = dom(a)");
            members.push(w.wreath_id_of(&elem).expect("element of the wreath"));

            let mut k = choice.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < inner_sections[block_of[dom[k] as usize - 1]].len() {
                    break;
                }
                choice[k] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }

        let mut bi = tops.len();
        loop {
            if bi == 0 {
                break;
            }
            bi -= 1;
            tops[bi] += 1;
            if tops[bi] < block_elems[bi].len() {
                break;
            }
            tops[bi] = 0;
        }
        if tops.iter().all(|&t| t == 0) {
            break;
        }
    }

    CrossSection::verify(w, GreenRelation::R, &members)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// Member-wise inversion: sends R-cross-sections to L-cross-sections and
/// back. An involution.
pub fn invert_cross_section(c: &CrossSection) -> Result<CrossSection, CrossSectionError> {
    let members: Vec<ElementId> = c
        .members()
        .iter()
        .map(|&m| c.ambient().inverse(m))
        .collect();
    CrossSection::verify(c.ambient(), c.relation().flipped(), &members)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// First projection of a wreath R-cross-section: the set of top components,
/// a verified R-cross-section of IS_m.
pub fn project_first(c: &CrossSection) -> Result<CrossSection, CrossSectionError> {
    let (ctx, elems) = c
        .ambient()
        .wreath_parts()
        .ok_or(CrossSectionError::NotWreathBacked)?;
    if c.relation() != GreenRelation::R {
        return Err(CrossSectionError::WrongRelation(GreenRelation::R));
    }
    let tops: BTreeSet<PartialBijection> = c
        .members()
        .iter()
        .map(|&m| elems[m as usize].top().clone())
        .collect();
    let top_semigroup = FiniteInverseSemigroup::from_isn(ctx.base_size())?;
    let ids: Vec<ElementId> = tops
        .iter()
        .map(|t| {
            top_semigroup
                .isn_id_of(t)
                .expect("top part is an IS_m element")
        })
        .collect();
    CrossSection::verify(&top_semigroup, GreenRelation::R, &ids)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// Second projection: { f(1) : (f, a) ∈ R, a = id, f(x) = 𝟘 for x ≠ 1 },
/// a verified R-cross-section of the inner semigroup. Requires S to have a
/// zero.
pub fn project_second(c: &CrossSection) -> Result<CrossSection, CrossSectionError> {
    let (ctx, elems) = c
        .ambient()
        .wreath_parts()
        .ok_or(CrossSectionError::NotWreathBacked)?;
    if c.relation() != GreenRelation::R {
        return Err(CrossSectionError::WrongRelation(GreenRelation::R));
    }
    let inner = ctx.inner().clone();
    let zero = inner.zero().ok_or(CrossSectionError::NoZero)?;
    let m = ctx.base_size();
    let mut picked: BTreeSet<ElementId> = BTreeSet::new();
    for &mid in c.members() {
        let e = &elems[mid as usize];
        if !e.top().is_identity() {
            continue;
        }
        let zero_off_one = (2..=m).all(|x| e.assignment().get(x) == Some(zero));
        if zero_off_one {
            picked.insert(e.assignment().get(1).expect("full domain"));
        }
    }
    let ids: Vec<ElementId> = picked.into_iter().collect();
    CrossSection::verify(&inner, GreenRelation::R, &ids)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// Checks that `phi` (an element map by id) is a product-preserving
/// bijection of `s`.
pub fn verify_automorphism(
    s: &FiniteInverseSemigroup,
    phi: &[ElementId],
) -> Result<(), CrossSectionError> {
    let n = s.size();
    if phi.len() != n {
        return Err(CrossSectionError::NotAutomorphism {
            reason: format!("map has {} entries for {} elements", phi.len(), n),
        });
    }
    let mut hit = vec![false; n];
    for &img in phi {
        if img as usize >= n || hit[img as usize] {
            return Err(CrossSectionError::NotAutomorphism {
                reason: "not a bijection".to_string(),
            });
        }
        hit[img as usize] = true;
    }
    for a in 0..n as ElementId {
        for b in 0..n as ElementId {
            if phi[s.product(a, b) as usize] != s.product(phi[a as usize], phi[b as usize]) {
                return Err(CrossSectionError::NotAutomorphism {
                    reason: format!("products disagree at ({a}, {b})"),
                });
            }
        }
    }
    Ok(())
}

/// Image of a cross-section under a verified automorphism; verified again
/// on the way out.
pub fn apply_automorphism(
    c: &CrossSection,
    phi: &[ElementId],
) -> Result<CrossSection, CrossSectionError> {
    verify_automorphism(c.ambient(), phi)?;
    let members: Vec<ElementId> = c.members().iter().map(|&m| phi[m as usize]).collect();
    CrossSection::verify(c.ambient(), c.relation(), &members)
        .map_err(CrossSectionError::ConstructionInvariant)
}

/// The automorphism of IS_n induced by conjugation with a full permutation
/// g: a ↦ g⁻¹·a·g.
pub fn conjugation_automorphism(
    s: &FiniteInverseSemigroup,
    g: &PartialBijection,
) -> Result<Vec<ElementId>, CrossSectionError> {
    let (n, elems) = s.isn_parts().ok_or(CrossSectionError::NotIsnBacked)?;
    if g.rank() != n {
        return Err(CrossSectionError::RankMismatch {
            expected: n,
            got: g.rank(),
        });
    }
    if g.domain_size() != n as usize {
        return Err(CrossSectionError::NotAutomorphism {
            reason: "conjugating element must be a full permutation".to_string(),
        });
    }
    let g_inv = g.inverse();
    let map = elems
        .iter()
        .map(|a| {
            let image = g_inv
                .compose(a)
                .expect("same rank")
                .compose(g)
                .expect("same rank");
            s.isn_id_of(&image).expect("conjugate stays in IS_n")
        })
        .collect();
    Ok(map)
}

/// The Θ map of a wreath product for per-point unit-class elements φ:
/// (f, a) ↦ (g, a) with g(x) = φ_x · f(x) · φ⁻¹_{x·a}. Returns the full
/// element map; it is an automorphism whenever every φ_x is invertible.
pub fn theta_map(
    w: &FiniteInverseSemigroup,
    phi: &[ElementId],
) -> Result<Vec<ElementId>, CrossSectionError> {
    let (ctx, elems) = w.wreath_parts().ok_or(CrossSectionError::NotWreathBacked)?;
    let inner = ctx.inner();
    let m = ctx.base_size();
    if phi.len() != m as usize {
        return Err(CrossSectionError::NotAutomorphism {
            reason: format!("need {} unit-class elements, got {}", m, phi.len()),
        });
    }
    let unit = inner.unit().ok_or(CrossSectionError::NoUnit)?;
    for (i, &u) in phi.iter().enumerate() {
        let ui = inner.inverse(u);
        if inner.product(u, ui) != unit || inner.product(ui, u) != unit {
            return Err(CrossSectionError::NotInvertible {
                point: (i + 1) as Point,
            });
        }
    }

    let map = elems
        .iter()
        .map(|e| {
            let top = e.top();
            let pairs: Vec<(Point, ElementId)> = (1..=m)
                .filter_map(|x| {
                    e.assignment().get(x).map(|v| {
                        let dst = top.apply(x).expect("dom(f) = dom(a)");
                        let conj = inner.product(
                            inner.product(phi[x as usize - 1], v),
                            inner.inverse(phi[dst as usize - 1]),
                        );
                        (x, conj)
                    })
                })
                .collect();
            let f = PartialMapToS::from_pairs(m, &pairs).expect("valid points");
            let image = WreathElement::new(f, top.clone()).expect("domains unchanged");
            w.wreath_id_of(&image).expect("image stays in the wreath")
        })
        .collect();
    Ok(map)
}

/// Θ-conjugation of a cross-section; the image is verified.
pub fn theta_conjugate(
    c: &CrossSection,
    phi: &[ElementId],
) -> Result<CrossSection, CrossSectionError> {
    let map = theta_map(c.ambient(), phi)?;
    apply_automorphism(c, &map)
}

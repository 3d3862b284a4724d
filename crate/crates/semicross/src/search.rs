//! Exhaustive enumeration of cross-sections by pruned backtracking, plus
//! ordered-partition generation and the count-arbitration report.
//!
//! The search walks the Green classes of the ambient semigroup in a fixed
//! order (largest principal ideal of the class idempotent first), picking
//! one element per class. Products of chosen elements are propagated
//! eagerly: a product landing in a decided class must equal that class's
//! choice, and a product landing in an undecided class forces the choice.
//! For wreath products an additional cut rejects partial selections whose
//! top components already violate the one-top-per-domain shape that any
//! cross-section projection must have.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::counting::{
    count_formula_paper, count_structural, CountReport, CountingError, FormulaPaperEntry,
};
use crate::cross_section::{
    build_isn_r_cross_section, build_wreath_r_cross_section, invert_cross_section, CrossSection,
    CrossSectionError, OrderedPartition,
};
use crate::green::GreenRelation;
use crate::isn::Point;
use crate::semigroup::{
    are_isomorphic, ElementId, FiniteInverseSemigroup, Multiplication, PlainSemigroup,
    SemigroupError, DEFAULT_MAX_ELEMENTS,
};
use crate::wreath::build_wreath;

/// Ordered partitions are enumerable up to this rank.
pub const MAX_PARTITION_RANK: u8 = 7;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("rank {n} exceeds the partition enumeration bound {bound}")]
    PartitionRank { n: u8, bound: u8 },
    #[error("semigroup with {size} elements exceeds the search limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("search timed out after {elapsed:?} with {} cross-sections found", found.len())]
    Timeout {
        elapsed: Duration,
        found: Vec<CrossSection>,
    },
    #[error(transparent)]
    CrossSection(#[from] CrossSectionError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Counting(#[from] CountingError),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_semigroup_size: usize,
    pub parallel_branching: bool,
    pub prune_with_projection: bool,
    pub timeout: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_semigroup_size: 256,
            parallel_branching: false,
            prune_with_projection: true,
            timeout: Duration::from_secs(600),
        }
    }
}

/// Every ordered partition of {1,…,n} exactly once, in canonical order
/// (blocks by minimal element, partitions sorted lexicographically).
pub fn enumerate_ordered_partitions(n: u8) -> Result<Vec<OrderedPartition>, SearchError> {
    if n == 0 || n > MAX_PARTITION_RANK {
        return Err(SearchError::PartitionRank {
            n,
            bound: MAX_PARTITION_RANK,
        });
    }

    // Set partitions first, blocks ordered by first appearance (ascending
    // insertion keeps that equal to min-element order).
    let mut set_partitions: Vec<Vec<Vec<Point>>> = Vec::new();
    let mut current: Vec<Vec<Point>> = Vec::new();
    fn distribute(
        p: Point,
        n: Point,
        current: &mut Vec<Vec<Point>>,
        out: &mut Vec<Vec<Vec<Point>>>,
    ) {
        if p > n {
            out.push(current.clone());
            return;
        }
        for i in 0..current.len() {
            current[i].push(p);
            distribute(p + 1, n, current, out);
            current[i].pop();
        }
        current.push(vec![p]);
        distribute(p + 1, n, current, out);
        current.pop();
    }
    distribute(1, n, &mut current, &mut set_partitions);

    let mut result = Vec::new();
    for blocks in set_partitions {
        // Each block ranges over all orderings of its points.
        let orderings: Vec<Vec<Vec<Point>>> = blocks.iter().map(|b| permutations(b)).collect();
        let mut pick = vec![0usize; blocks.len()];
        loop {
            let chosen: Vec<Vec<Point>> = pick
                .iter()
                .enumerate()
                .map(|(bi, &oi)| orderings[bi][oi].clone())
                .collect();
            result.push(OrderedPartition::new(n, chosen).expect("valid by construction"));
            let mut bi = pick.len();
            loop {
                if bi == 0 {
                    break;
                }
                bi -= 1;
                pick[bi] += 1;
                if pick[bi] < orderings[bi].len() {
                    break;
                }
                pick[bi] = 0;
            }
            if pick.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    result.sort();
    result.dedup();
    Ok(result)
}

fn permutations(points: &[Point]) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    let mut scratch = points.to_vec();
    scratch.sort_unstable();
    loop {
        out.push(scratch.clone());
        // next_permutation in lexicographic order
        let Some(i) = scratch.windows(2).rposition(|w| w[0] < w[1]) else {
            break;
        };
        let j = scratch
            .iter()
            .rposition(|&x| x > scratch[i])
            .expect("exists");
        scratch.swap(i, j);
        scratch[i + 1..].reverse();
    }
    out
}

/// Per-candidate search state: the chosen representative per class, the
/// member list, and (for wreath ambient) the top component seen per
/// domain/range mask.
#[derive(Clone)]
struct State {
    chosen: Vec<Option<ElementId>>,
    members: Vec<ElementId>,
    proj: Vec<i32>,
}

struct Searcher<'a> {
    s: &'a FiniteInverseSemigroup,
    class_of: &'a [u32],
    class_order: Vec<u32>,
    classes: &'a [Vec<ElementId>],
    /// Per element: (projection mask, top key), when projection pruning is on.
    tops: Option<Vec<(u32, i32)>>,
    deadline: Instant,
    timed_out: AtomicBool,
}

impl<'a> Searcher<'a> {
    /// Returns false when the assignment contradicts previous choices.
    fn assign(&self, state: &mut State, elem: ElementId) -> bool {
        let class = self.class_of[elem as usize] as usize;
        match state.chosen[class] {
            Some(z) => return z == elem,
            None => state.chosen[class] = Some(elem),
        }
        if !self.project_ok(state, elem) {
            return false;
        }
        state.members.push(elem);
        let mut queue = vec![elem];
        while let Some(x) = queue.pop() {
            for i in 0..state.members.len() {
                let y = state.members[i];
                for p in [self.s.product(x, y), self.s.product(y, x)] {
                    let c = self.class_of[p as usize] as usize;
                    match state.chosen[c] {
                        Some(z) => {
                            if z != p {
                                return false;
                            }
                        }
                        None => {
                            state.chosen[c] = Some(p);
                            if !self.project_ok(state, p) {
                                return false;
                            }
                            state.members.push(p);
                            queue.push(p);
                        }
                    }
                }
            }
        }
        true
    }

    fn project_ok(&self, state: &mut State, elem: ElementId) -> bool {
        let Some(tops) = &self.tops else { return true };
        let (mask, key) = tops[elem as usize];
        let slot = &mut state.proj[mask as usize];
        if *slot == -1 {
            *slot = key;
            true
        } else {
            *slot == key
        }
    }

    fn run(&self, state: State, from: usize, out: &mut Vec<Vec<ElementId>>) {
        if self.timed_out.load(Ordering::Relaxed) {
            return;
        }
        if Instant::now() > self.deadline {
            self.timed_out.store(true, Ordering::Relaxed);
            return;
        }
        let next = (from..self.class_order.len())
            .find(|&i| state.chosen[self.class_order[i] as usize].is_none());
        let Some(pos) = next else {
            let mut members = state.members;
            members.sort_unstable();
            out.push(members);
            return;
        };
        let class = self.class_order[pos] as usize;
        for &cand in &self.classes[class] {
            let mut next_state = state.clone();
            if self.assign(&mut next_state, cand) {
                self.run(next_state, pos + 1, out);
            }
        }
    }
}

/// All product-closed one-per-class member sets of the given relation,
/// deduplicated and canonically ordered. Exhaustive unless it times out, in
/// which case the partial results ride along in the error.
pub fn brute_force_cross_sections(
    s: &FiniteInverseSemigroup,
    relation: GreenRelation,
    cfg: &SearchConfig,
) -> Result<Vec<CrossSection>, SearchError> {
    if s.size() > cfg.max_semigroup_size {
        return Err(SearchError::TooLarge {
            size: s.size(),
            limit: cfg.max_semigroup_size,
        });
    }
    let green = s.green(relation);

    // Class decision order: largest principal ideal of the representative
    // first (on IS_n and wreaths this is descending idempotent domain size).
    let mut ideal_size = vec![0usize; green.class_count()];
    for (ci, &rep) in green.representatives.iter().enumerate() {
        let mut seen = vec![false; s.size()];
        for y in 0..s.size() as ElementId {
            let p = match relation {
                GreenRelation::R => s.product(rep, y),
                GreenRelation::L => s.product(y, rep),
            };
            seen[p as usize] = true;
        }
        ideal_size[ci] = seen.iter().filter(|&&b| b).count();
    }
    let mut class_order: Vec<u32> = (0..green.class_count() as u32).collect();
    class_order.sort_by_key(|&c| {
        (
            usize::MAX - ideal_size[c as usize],
            green.representatives[c as usize],
        )
    });

    // Projection pruning data: per element the top's dom (R) or ran (L)
    // mask plus a dense key for the top itself.
    let tops = if cfg.prune_with_projection {
        s.wreath_parts().map(|(_, elems)| {
            let mut key_of: BTreeMap<Vec<u8>, i32> = BTreeMap::new();
            elems
                .iter()
                .map(|e| {
                    let top = e.top();
                    let mask = match relation {
                        GreenRelation::R => top.domain_mask(),
                        GreenRelation::L => top.range_mask(),
                    };
                    let repr: Vec<u8> = (1..=top.rank())
                        .map(|x| top.apply(x).unwrap_or(0))
                        .collect();
                    let next = key_of.len() as i32;
                    let key = *key_of.entry(repr).or_insert(next);
                    (mask, key)
                })
                .collect::<Vec<_>>()
        })
    } else {
        None
    };
    let proj_slots = tops
        .as_ref()
        .map(|t| t.iter().map(|&(m, _)| m as usize + 1).max().unwrap_or(1))
        .unwrap_or(0);

    let searcher = Searcher {
        s,
        class_of: &green.class_of,
        class_order,
        classes: &green.classes,
        tops,
        deadline: Instant::now() + cfg.timeout,
        timed_out: AtomicBool::new(false),
    };

    let start = Instant::now();
    let blank = State {
        chosen: vec![None; green.class_count()],
        members: Vec::new(),
        proj: vec![-1; proj_slots],
    };

    let mut found: Vec<Vec<ElementId>> = Vec::new();
    let first_class = searcher.class_order[0] as usize;
    if cfg.parallel_branching {
        let branches: Vec<Vec<Vec<ElementId>>> = green.classes[first_class]
            .par_iter()
            .map(|&cand| {
                let mut local = Vec::new();
                let mut state = blank.clone();
                if searcher.assign(&mut state, cand) {
                    searcher.run(state, 1, &mut local);
                }
                local
            })
            .collect();
        for b in branches {
            found.extend(b);
        }
    } else {
        for &cand in &green.classes[first_class] {
            let mut state = blank.clone();
            if searcher.assign(&mut state, cand) {
                searcher.run(state, 1, &mut found);
            }
        }
    }

    let dedup: BTreeSet<Vec<ElementId>> = found.into_iter().collect();
    let sections: Vec<CrossSection> = dedup
        .into_iter()
        .map(|members| {
            CrossSection::verify(s, relation, &members)
                .expect("search output must verify as a cross-section")
        })
        .collect();

    if searcher.timed_out.load(Ordering::Relaxed) {
        return Err(SearchError::Timeout {
            elapsed: start.elapsed(),
            found: sections,
        });
    }
    Ok(sections)
}

/// All standard product-of-wreaths constructions for S ≀ IS_n built over
/// `w` (ordered partition of the top × one inner section per block), with
/// the inner sections drawn from the chain-generator family of S = IS_n.
/// For the L relation the R family is inverted member-wise.
pub fn standard_wreath_sections(
    w: &FiniteInverseSemigroup,
    relation: GreenRelation,
) -> Result<Vec<CrossSection>, SearchError> {
    let (ctx, _) = w.wreath_parts().ok_or(CrossSectionError::NotWreathBacked)?;
    let inner = ctx.inner().clone();
    let (inner_n, _) = inner.isn_parts().ok_or(CrossSectionError::NotIsnBacked)?;
    let m = ctx.base_size();

    let inner_family: Vec<CrossSection> = enumerate_ordered_partitions(inner_n)?
        .iter()
        .map(|p| build_isn_r_cross_section(&inner, p))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for p in enumerate_ordered_partitions(m)? {
        let k = p.blocks().len();
        let mut pick = vec![0usize; k];
        loop {
            let inner_choice: Vec<CrossSection> =
                pick.iter().map(|&i| inner_family[i].clone()).collect();
            let section = build_wreath_r_cross_section(w, &p, &inner_choice)?;
            out.push(match relation {
                GreenRelation::R => section,
                GreenRelation::L => invert_cross_section(&section)?,
            });
            let mut bi = k;
            loop {
                if bi == 0 {
                    break;
                }
                bi -= 1;
                pick[bi] += 1;
                if pick[bi] < inner_family.len() {
                    break;
                }
                pick[bi] = 0;
            }
            if pick.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// Builds IS_n ≀ IS_n, enumerates all its cross-sections of the relation,
/// and compares the count against both closed forms. The brute force is the
/// arbiter; neither closed form is presumed correct.
pub fn wreath_count_report(
    n: u8,
    relation: GreenRelation,
    cfg: &SearchConfig,
) -> Result<CountReport, SearchError> {
    let inner = FiniteInverseSemigroup::from_isn(n)?;
    let w = build_wreath(&inner, n, DEFAULT_MAX_ELEMENTS).map_err(CrossSectionError::Wreath)?;

    let start = Instant::now();
    let found = brute_force_cross_sections(&w, relation, cfg)?;
    let elapsed = start.elapsed();

    let standards = standard_wreath_sections(&w, relation)?;
    let standard_sets: BTreeSet<&[ElementId]> = standards.iter().map(|c| c.members()).collect();

    let mut all_isomorphic = true;
    let mut standard_semigroups: Vec<PlainSemigroup> = Vec::new();
    for c in &found {
        if standard_sets.contains(c.members()) {
            continue;
        }
        if standard_semigroups.is_empty() {
            standard_semigroups = standards
                .iter()
                .map(|s| s.as_semigroup())
                .collect::<Result<_, _>>()?;
        }
        let cs = c.as_semigroup()?;
        let hit = standard_semigroups
            .iter()
            .any(|ss| matches!(are_isomorphic(&cs, ss, cs.size().max(64)), Ok(Some(_))));
        if !hit {
            all_isomorphic = false;
        }
    }

    let formula = count_formula_paper(n as u64)?;
    let inner_count = BigUint::from(enumerate_ordered_partitions(n)?.len());
    let structural = count_structural(n as u64, &inner_count)?;
    let count = found.len() as u64;

    let matches_formula = formula
        .as_integer()
        .is_some_and(|v| v == BigUint::from(count));
    let matches_structural = structural == BigUint::from(count);

    Ok(CountReport {
        n,
        relation,
        count,
        formula_paper: FormulaPaperEntry {
            value: formula.display(),
            integral: formula.integral,
        },
        structural: structural.to_string(),
        matches_formula,
        matches_structural,
        all_isomorphic_to_standard: all_isomorphic,
        elapsed_ms: elapsed.as_millis(),
    })
}

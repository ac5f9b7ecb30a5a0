//! Transition monoids: enumeration by right-composition closure, the pruned
//! defect-≤1 enumeration, the full-transformation-monoid decision and
//! monoid containment.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::dfa::{Dfa, Word};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::transform::Transformation;

/// Elements of a transition monoid (or a defect-bounded part of it), each
/// with its shortest realizing word.
///
/// Elements are stored in breadth-first order, which is also the order of
/// their witnesses by (length, letter order).
#[derive(Debug, Clone)]
pub struct MonoidTable {
    elements: Vec<Transformation>,
    parent: Vec<Option<(u32, u16)>>,
    index: HashMap<Transformation, u32>,
    truncated: bool,
}

impl MonoidTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the enumeration stopped at its cap before closing.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn elements(&self) -> &[Transformation] {
        &self.elements
    }

    pub fn contains(&self, t: &Transformation) -> bool {
        self.index.contains_key(t)
    }

    pub fn witness(&self, t: &Transformation) -> Option<Word> {
        self.index.get(t).map(|&i| self.witness_at(i as usize))
    }

    /// Witness of the element at position `i` of [`elements`](Self::elements).
    pub fn witness_at(&self, mut i: usize) -> Word {
        let mut letters = Vec::new();
        while let Some((p, a)) = self.parent[i] {
            letters.push(a as usize);
            i = p as usize;
        }
        letters.reverse();
        Word::new(letters)
    }

    /// Elements together with their witnesses, in breadth-first order.
    pub fn iter(&self) -> impl Iterator<Item = (&Transformation, Word)> + '_ {
        self.elements
            .iter()
            .enumerate()
            .map(move |(i, t)| (t, self.witness_at(i)))
    }
}

/// Breadth-first closure from the identity, keeping only elements that pass
/// `keep`. Pruning is sound for any `keep` closed under taking prefixes.
fn closure(dfa: &Dfa, cap: usize, keep: impl Fn(&Transformation) -> bool) -> MonoidTable {
    let identity = Transformation::identity(dfa.n());
    let mut table = MonoidTable {
        elements: vec![identity.clone()],
        parent: vec![None],
        index: HashMap::from([(identity, 0)]),
        truncated: false,
    };
    let mut head = 0;
    while head < table.elements.len() {
        for (a, action) in dfa.actions().iter().enumerate() {
            let next = table.elements[head].then(action);
            if table.index.contains_key(&next) || !keep(&next) {
                continue;
            }
            if table.elements.len() >= cap {
                table.truncated = true;
                return table;
            }
            table
                .index
                .insert(next.clone(), table.elements.len() as u32);
            table.elements.push(next);
            table.parent.push(Some((head as u32, a as u16)));
        }
        head += 1;
    }
    table
}

/// `M(A)` by closure, stopping (and flagging truncation) at `cap` elements.
pub fn enumerate_monoid(dfa: &Dfa, cap: usize) -> MonoidTable {
    closure(dfa, cap.max(1), |_| true)
}

/// Syntactic complexity `|M(A)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoidSize {
    Exact(usize),
    /// The enumeration hit its cap; the monoid has more than this many elements.
    AtLeast(usize),
}

pub fn syntactic_complexity(dfa: &Dfa, cap: usize) -> MonoidSize {
    let table = enumerate_monoid(dfa, cap);
    if table.truncated() {
        MonoidSize::AtLeast(table.len())
    } else {
        MonoidSize::Exact(table.len())
    }
}

/// Elements of `M(A)` with defect at most 1.
///
/// The search never extends a product of defect ≥ 2, which is sound because
/// appending letters cannot decrease the defect.
pub fn enumerate_defect_at_most_1(dfa: &Dfa, limits: &Limits) -> Result<MonoidTable> {
    let table = closure(dfa, limits.monoid_elements, |t| t.defect() <= 1);
    if table.truncated() {
        return Err(Error::CapExceeded {
            what: "defect-1 monoid elements",
            limit: limits.monoid_elements,
            requested: limits.monoid_elements + 1,
        });
    }
    Ok(table)
}

/// The defect-1 elements of `M(A)` (the transformations of `D₁(A)`).
pub fn defect_one_elements(dfa: &Dfa, limits: &Limits) -> Result<Vec<Transformation>> {
    Ok(enumerate_defect_at_most_1(dfa, limits)?
        .elements()
        .iter()
        .filter(|t| t.defect() == 1)
        .cloned()
        .collect())
}

/// The permutation group generated by `generators`, by closure.
pub fn permutation_group(
    n: usize,
    generators: &[&Transformation],
    cap: usize,
) -> Result<HashSet<Transformation>> {
    let identity = Transformation::identity(n);
    let mut group = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for &s in generators {
            let next = g.then(s);
            if group.insert(next.clone()) {
                if group.len() > cap {
                    return Err(Error::CapExceeded {
                        what: "permutation group size",
                        limit: cap,
                        requested: group.len(),
                    });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(group)
}

/// Decide `M(A) = T(Q)` without enumerating `M(A)`.
///
/// Holds iff some letter has defect exactly 1 and the group generated by the
/// permutation letters contains the cycle `(1 2 … n)` and the transposition
/// `(1 2)`. The group is built by explicit closure, bounded by
/// `limits.group_elements`.
pub fn is_full_transformation_monoid(dfa: &Dfa, limits: &Limits) -> Result<bool> {
    let n = dfa.n();
    if n == 1 {
        return Ok(true);
    }
    if !dfa.actions().iter().any(|t| t.defect() == 1) {
        return Ok(false);
    }
    let generators: Vec<&Transformation> = dfa
        .actions()
        .iter()
        .filter(|t| t.is_permutation())
        .collect();
    let group = permutation_group(n, &generators, limits.group_elements)?;
    let cycle: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    let mut transposition: Vec<u8> = (0..n as u8).collect();
    transposition.swap(0, 1);
    Ok(group.contains(&Transformation::from_indices(cycle))
        && group.contains(&Transformation::from_indices(transposition)))
}

/// True iff every letter action of `b` lies in `M(a)`, i.e. `a` induces `b`.
pub fn monoid_contains(a: &Dfa, b: &Dfa, cap: usize) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::StateCountMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let table = enumerate_monoid(a, cap);
    if table.truncated() {
        return Err(Error::CapExceeded {
            what: "transition monoid size",
            limit: cap,
            requested: cap + 1,
        });
    }
    Ok(b.actions().iter().all(|t| table.contains(t)))
}

//! Minimal completely reachable automata from respectful trees.
//!
//! The automaton of a marked tree with `n` leaves has states `[1, n]` and
//! one letter per non-root vertex, named after the vertex's interval. The
//! letters are defined by induction on the tree: letters of a subtree keep
//! their action on the subtree's interval and fix the sibling interval; the
//! son letter `a_s` of the root sends the son interval onto the nephew's
//! leaves (or onto the daughter when she is a leaf) and acts on the daughter
//! interval like the nephew's letter; the daughter letter is symmetric.

use std::collections::BTreeMap;

use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::monoid::{self, MonoidSize};
use crate::reach;
use crate::transform::Transformation;
use crate::trees::{canonical_marking, FullBinaryTree, MarkedTree};

/// The automaton built from a marked tree, with the vertex behind each letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct T2aAutomaton {
    pub dfa: Dfa,
    /// `vertex_of_letter[i]` is the pre-order index of letter `i`'s vertex.
    pub vertex_of_letter: Vec<usize>,
}

/// Build the automaton of a canonically marked tree. Letters follow the
/// pre-order of non-root vertices, son before daughter.
pub fn build_automaton(mt: &MarkedTree, require_respectful: bool) -> Result<T2aAutomaton> {
    if !mt.is_canonical() {
        return Err(Error::precondition("the marking must start at 1"));
    }
    if require_respectful && !mt.tree().is_respectful() {
        return Err(Error::precondition(format!(
            "tree {} is not respectful",
            mt.tree()
        )));
    }
    let maps = letter_maps(mt)?;
    let n = mt.root().span();
    let mut letters = Vec::with_capacity(maps.len());
    let mut vertex_of_letter = Vec::with_capacity(maps.len());
    for (v, images) in maps {
        letters.push((
            mt.vertex(v).letter_name(),
            Transformation::from_images(&images)?,
        ));
        vertex_of_letter.push(v);
    }
    Ok(T2aAutomaton {
        dfa: Dfa::new(n, letters)?,
        vertex_of_letter,
    })
}

/// Shorthand: canonical marking plus [`build_automaton`] on a respectful tree.
pub fn automaton_of_tree(tree: &FullBinaryTree) -> Result<T2aAutomaton> {
    build_automaton(&canonical_marking(tree), true)
}

/// Letter actions on the root interval of any faithful marking, keyed by
/// pre-order vertex index; `images[x - lo]` is the image of state `x`.
pub fn letter_maps(mt: &MarkedTree) -> Result<BTreeMap<usize, Vec<usize>>> {
    maps_below(mt, 0)
}

fn maps_below(mt: &MarkedTree, r: usize) -> Result<BTreeMap<usize, Vec<usize>>> {
    let Some((s, d)) = mt.vertex(r).children else {
        return Ok(BTreeMap::new());
    };
    let (sv, dv) = (mt.vertex(s), mt.vertex(d));
    let son_maps = maps_below(mt, s)?;
    let daughter_maps = maps_below(mt, d)?;
    let s_range: Vec<usize> = (sv.lo..=sv.hi).collect();
    let d_range: Vec<usize> = (dv.lo..=dv.hi).collect();
    let mut out = BTreeMap::new();

    let son_letter = sibling_letter(mt, s, d, &daughter_maps, dv.children.map(|c| c.0))?;
    let daughter_letter = sibling_letter(mt, d, s, &son_maps, sv.children.map(|c| c.1))?;
    // The son's interval comes first in the root interval.
    out.insert(s, [son_letter.0, son_letter.1].concat());
    out.insert(d, [daughter_letter.1, daughter_letter.0].concat());
    for (v, map) in son_maps {
        out.insert(v, [map, d_range.clone()].concat());
    }
    for (v, map) in daughter_maps {
        out.insert(v, [s_range.clone(), map].concat());
    }
    Ok(out)
}

/// Action of the letter of `own` (a child of the current root) as the pair
/// (images on `own`'s interval, images on `sibling`'s interval).
/// `relative` is the nephew (for a son) or the niece (for a daughter), absent
/// when the sibling is a leaf.
fn sibling_letter(
    mt: &MarkedTree,
    own: usize,
    sibling: usize,
    sibling_maps: &BTreeMap<usize, Vec<usize>>,
    relative: Option<usize>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let (ov, sv) = (mt.vertex(own), mt.vertex(sibling));
    let Some(t) = relative else {
        // The sibling is a leaf: everything goes to it.
        return Ok((vec![sv.lo; ov.span()], vec![sv.lo; sv.span()]));
    };
    let mut on_own = vec![0usize; ov.span()];
    for (leaf, image) in embedding(mt, t, own)? {
        let target = mt.vertex(image);
        for x in target.lo..=target.hi {
            on_own[x - ov.lo] = mt.vertex(leaf).lo;
        }
    }
    if on_own.contains(&0) {
        return Err(Error::Invariant(
            "embedded leaves do not cover the interval".into(),
        ));
    }
    let on_sibling = sibling_maps
        .get(&t)
        .expect("the relative is a non-root vertex of the sibling subtree")
        .clone();
    Ok((on_own, on_sibling))
}

/// The forced embedding of the subtree at `from` into the subtree at `to`,
/// as pairs (leaf below `from`, its image).
fn embedding(mt: &MarkedTree, from: usize, to: usize) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    let mut stack = vec![(from, to)];
    while let Some((u, v)) = stack.pop() {
        match (mt.vertex(u).children, mt.vertex(v).children) {
            (None, _) => pairs.push((u, v)),
            (Some(_), None) => {
                return Err(Error::precondition(format!(
                    "the vertex marked [{},{}] does not subordinate the one marked [{},{}]",
                    mt.vertex(from).lo,
                    mt.vertex(from).hi,
                    mt.vertex(to).lo,
                    mt.vertex(to).hi
                )))
            }
            (Some((us, ud)), Some((vs, vd))) => {
                stack.push((ud, vd));
                stack.push((us, vs));
            }
        }
    }
    Ok(pairs)
}

/// Outcome of the minimality check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub n: usize,
    pub completely_reachable: bool,
    pub monoid_size: MonoidSize,
    pub alphabet_size: usize,
}

impl MinimalityReport {
    /// Completely reachable, `2ⁿ − 1` monoid elements and `2n − 2` letters.
    pub fn passes(&self) -> bool {
        let n = self.n;
        self.completely_reachable
            && self.monoid_size == MonoidSize::Exact((1usize << n) - 1)
            && self.alphabet_size == 2 * n - 2
    }
}

pub fn verify_minimal_cra(dfa: &Dfa, limits: &Limits) -> Result<MinimalityReport> {
    let n = dfa.n();
    let completely_reachable = reach::is_completely_reachable(dfa, limits)?.is_complete();
    // One more than the target size is enough to tell "too large" apart.
    let cap = (1usize << n).max(2);
    Ok(MinimalityReport {
        n,
        completely_reachable,
        monoid_size: monoid::syntactic_complexity(dfa, cap),
        alphabet_size: dfa.num_letters(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn build(text: &str) -> T2aAutomaton {
        automaton_of_tree(&FullBinaryTree::parse(text).unwrap()).unwrap()
    }

    fn letter(a: &T2aAutomaton, name: &str) -> Vec<usize> {
        a.dfa.action(a.dfa.letter_index(name).unwrap()).images()
    }

    #[test]
    fn two_leaves_give_flip_flop() {
        let a = build("(L L)");
        assert_eq!(letter(&a, "a_[1]"), vec![2, 2]);
        assert_eq!(letter(&a, "a_[2]"), vec![1, 1]);
        let ff = families::flip_flop();
        let mut ours: Vec<_> = a.dfa.actions().to_vec();
        let mut theirs: Vec<_> = ff.actions().to_vec();
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs);
    }

    #[test]
    fn three_leaves_give_e3() {
        let a = build("((L L) L)");
        let e3 = families::e3();
        for (i, l) in e3.letters().iter().enumerate() {
            assert_eq!(letter(&a, l.name()), e3.action(i).images(), "{}", l.name());
        }
        let names: Vec<&str> = a.dfa.letters().iter().map(|l| l.name()).collect();
        assert_eq!(names, ["a_[1,2]", "a_[1]", "a_[2]", "a_[3]"]);
    }

    #[test]
    fn seven_leaf_root_letters() {
        let a = build("(((L (L L)) (L L)) (L L))");
        assert_eq!(letter(&a, "a_[6,7]"), vec![1, 1, 1, 2, 3, 4, 5]);
        assert_eq!(letter(&a, "a_[1,5]"), vec![6, 6, 6, 6, 6, 7, 7]);
        assert_eq!(a.dfa.num_letters(), 12);
    }

    #[test]
    fn single_leaf() {
        let a = build("L");
        assert_eq!(a.dfa.n(), 1);
        assert_eq!(a.dfa.num_letters(), 0);
        assert!(verify_minimal_cra(&a.dfa, &Limits::default())
            .unwrap()
            .passes());
    }

    #[test]
    fn rejects_bad_input() {
        let fig4 = FullBinaryTree::parse("(((L (L L)) (L L)) L)").unwrap();
        assert!(build_automaton(&canonical_marking(&fig4), true).is_err());
        let shifted = MarkedTree::with_start(&FullBinaryTree::parse("(L L)").unwrap(), 3);
        assert!(build_automaton(&shifted, false).is_err());
    }

    #[test]
    fn small_cases_are_minimal() {
        let limits = Limits::default();
        assert!(verify_minimal_cra(&families::flip_flop(), &limits)
            .unwrap()
            .passes());
        let report = verify_minimal_cra(&families::e3(), &limits).unwrap();
        assert_eq!(report.monoid_size, MonoidSize::Exact(7));
        assert!(report.passes());
        assert!(!verify_minimal_cra(&families::cerny(3).unwrap(), &limits)
            .unwrap()
            .passes());
    }
}

//! Breadth-first search on the powerset automaton.
//!
//! This is the exact (exponential) oracle behind every other check: a subset
//! `P` is reachable when `P = Q·w` for some word `w`, and the automaton is
//! completely reachable when every non-empty subset is.
//!
//! Subsets are indexed densely by their bit mask, so a search over `n` states
//! allocates `O(2^n)` memory; [`Limits::powerset_bits`] guards `n`.

use std::collections::VecDeque;

use crate::dfa::{Dfa, Word};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::state::StateSet;
use crate::transform::Transformation;

const UNSEEN: u16 = u16::MAX;
const ROOT: u16 = u16::MAX - 1;

/// Per-letter byte lookup tables: the image of a mask is the union of the
/// images of its bytes.
struct ImageTables {
    chunks: usize,
    // tables[letter][chunk * 256 + byte]
    tables: Vec<Vec<u32>>,
}

impl ImageTables {
    fn new(actions: &[Transformation], n: usize) -> Self {
        let chunks = n.div_ceil(8).max(1);
        let tables = actions
            .iter()
            .map(|t| {
                let mut table = vec![0u32; chunks * 256];
                for chunk in 0..chunks {
                    for byte in 0..256usize {
                        let bits = ((byte as u64) << (8 * chunk)) & ((1u64 << n) - 1);
                        table[chunk * 256 + byte] = t.apply_bits(bits) as u32;
                    }
                }
                table
            })
            .collect();
        ImageTables { chunks, tables }
    }

    #[inline]
    fn image(&self, letter: usize, mask: u32) -> u32 {
        let table = &self.tables[letter];
        let mut out = 0;
        for chunk in 0..self.chunks {
            out |= table[chunk * 256 + ((mask >> (8 * chunk)) & 0xff) as usize];
        }
        out
    }
}

/// Shortest witnesses for every reachable subset.
///
/// Witnesses are shortest, with ties broken lexicographically by letter
/// order; `Q` itself maps to the empty word.
pub struct ReachabilityTable {
    n: usize,
    parent: Vec<u32>,
    letter: Vec<u16>,
    order: Vec<u32>,
}

impl ReachabilityTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of reachable subsets.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, p: &StateSet) -> bool {
        let bits = p.bits() as usize;
        bits < self.letter.len() && self.letter[bits] != UNSEEN
    }

    /// Shortest word `w` with `Q·w = p`, if `p` is reachable.
    pub fn witness(&self, p: &StateSet) -> Option<Word> {
        if !self.contains(p) {
            return None;
        }
        Some(self.trace(p.bits() as u32))
    }

    fn trace(&self, mut mask: u32) -> Word {
        let mut letters = Vec::new();
        while self.letter[mask as usize] != ROOT {
            letters.push(self.letter[mask as usize] as usize);
            mask = self.parent[mask as usize];
        }
        letters.reverse();
        Word::new(letters)
    }

    /// Reachable subsets in breadth-first discovery order.
    pub fn subsets(&self) -> impl Iterator<Item = StateSet> + '_ {
        self.order
            .iter()
            .map(move |&m| StateSet::from_bits_unchecked(self.n, m as u64))
    }

    /// Non-empty subsets that are not reachable, in report order.
    pub fn missing(&self) -> Vec<StateSet> {
        let mut missing: Vec<StateSet> = (1..self.letter.len())
            .filter(|&m| self.letter[m] == UNSEEN)
            .map(|m| StateSet::from_bits_unchecked(self.n, m as u64))
            .collect();
        missing.sort_by(|a, b| a.report_order(b));
        missing
    }

    /// Length of the shortest witness of each reachable subset, indexed like
    /// [`subsets`](Self::subsets).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.letter.len()];
        for &m in &self.order {
            if self.letter[m as usize] != ROOT {
                depth[m as usize] = depth[self.parent[m as usize] as usize] + 1;
            }
        }
        self.order.iter().map(|&m| depth[m as usize]).collect()
    }
}

/// Breadth-first search from `Q`, stopping early once `stop` accepts a subset.
fn search(
    dfa: &Dfa,
    limits: &Limits,
    mut stop: impl FnMut(u32) -> bool,
) -> Result<(ReachabilityTable, Option<u32>)> {
    let n = dfa.n();
    limits.check_powerset(n)?;
    if n > 32 {
        return Err(Error::CapExceeded {
            what: "powerset state count",
            limit: 32,
            requested: n,
        });
    }
    if dfa.num_letters() >= ROOT as usize {
        return Err(Error::CapExceeded {
            what: "alphabet size",
            limit: ROOT as usize - 1,
            requested: dfa.num_letters(),
        });
    }
    let size = 1usize << n;
    let tables = ImageTables::new(dfa.actions(), n);
    let mut parent = vec![0u32; size];
    let mut letter = vec![UNSEEN; size];
    let mut order = Vec::new();
    let full = (size - 1) as u32;
    letter[full as usize] = ROOT;
    order.push(full);
    let mut found = None;
    if stop(full) {
        found = Some(full);
    }
    let mut head = 0;
    'bfs: while found.is_none() && head < order.len() {
        let mask = order[head];
        head += 1;
        for a in 0..dfa.num_letters() {
            let next = tables.image(a, mask);
            if letter[next as usize] == UNSEEN {
                letter[next as usize] = a as u16;
                parent[next as usize] = mask;
                order.push(next);
                if stop(next) {
                    found = Some(next);
                    break 'bfs;
                }
            }
        }
    }
    Ok((
        ReachabilityTable {
            n,
            parent,
            letter,
            order,
        },
        found,
    ))
}

/// All subsets reachable from `Q`, each with its shortest witness.
pub fn reachable_subsets(dfa: &Dfa, limits: &Limits) -> Result<ReachabilityTable> {
    Ok(search(dfa, limits, |_| false)?.0)
}

/// Outcome of the complete-reachability oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    Complete,
    /// Not completely reachable; carries a smallest missing subset
    /// (ties broken lexicographically).
    Incomplete {
        first_missing: StateSet,
    },
}

impl Reachability {
    pub fn is_complete(&self) -> bool {
        matches!(self, Reachability::Complete)
    }
}

pub fn is_completely_reachable(dfa: &Dfa, limits: &Limits) -> Result<Reachability> {
    let table = reachable_subsets(dfa, limits)?;
    Ok(reachability_of(&table))
}

/// Verdict derived from an existing table.
pub fn reachability_of(table: &ReachabilityTable) -> Reachability {
    if table.len() == (1usize << table.n()) - 1 {
        Reachability::Complete
    } else {
        Reachability::Incomplete {
            first_missing: table.missing()[0],
        }
    }
}

/// Shortest word reaching `p` from `Q`, if any.
pub fn is_reachable(dfa: &Dfa, p: &StateSet, limits: &Limits) -> Result<Option<Word>> {
    if p.is_empty() {
        return Err(Error::precondition("target subset must be non-empty"));
    }
    if p.capacity() != dfa.n() {
        return Err(Error::StateCountMismatch {
            left: dfa.n(),
            right: p.capacity(),
        });
    }
    let target = p.bits() as u32;
    let (table, found) = search(dfa, limits, |m| m == target)?;
    Ok(found.map(|m| table.trace(m)))
}

/// Shortest reset word, if the automaton is synchronizing.
pub fn shortest_reset_word(dfa: &Dfa, limits: &Limits) -> Result<Option<Word>> {
    let (table, found) = search(dfa, limits, |m| m.count_ones() == 1)?;
    Ok(found.map(|m| table.trace(m)))
}

/// Subsets reachable from `Q` through products of the given defect-1
/// transformations (at least one factor; `Q` itself is never included since
/// every product has defect at least 1).
pub fn defect1_reachable_subsets(
    dfa: &Dfa,
    defect_one: &[Transformation],
    limits: &Limits,
) -> Result<Vec<StateSet>> {
    let n = dfa.n();
    limits.check_powerset(n)?;
    if let Some(t) = defect_one.iter().find(|t| t.n() != n) {
        return Err(Error::StateCountMismatch {
            left: n,
            right: t.n(),
        });
    }
    if let Some(t) = defect_one.iter().find(|t| t.defect() != 1) {
        return Err(Error::precondition(format!(
            "{t} has defect {}, expected 1",
            t.defect()
        )));
    }
    let mut seen = vec![false; 1usize << n];
    let mut queue = VecDeque::new();
    let full = StateSet::full(n).bits();
    queue.push_back(full);
    let mut out = Vec::new();
    while let Some(mask) = queue.pop_front() {
        for t in defect_one {
            let next = t.apply_bits(mask);
            if !seen[next as usize] {
                seen[next as usize] = true;
                out.push(StateSet::from_bits_unchecked(n, next));
                queue.push_back(next);
            }
        }
    }
    out.sort_by(|a, b| a.report_order(b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn limits() -> Limits {
        Limits::default()
    }

    fn set(n: usize, states: &[usize]) -> StateSet {
        StateSet::from_states(n, states.iter().copied()).unwrap()
    }

    #[test]
    fn flip_flop_table() {
        let ff = families::flip_flop();
        let table = reachable_subsets(&ff, &limits()).unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table.witness(&set(2, &[1, 2])), Some(Word::empty()));
        assert_eq!(table.witness(&set(2, &[1])), Some(Word::letter(0)));
        assert_eq!(table.witness(&set(2, &[2])), Some(Word::letter(1)));
        assert_eq!(table.depths(), vec![0, 1, 1]);
    }

    #[test]
    fn identity_automaton_reaches_only_q() {
        let d = Dfa::from_tables(2, vec![("a", vec![1, 2])]).unwrap();
        let table = reachable_subsets(&d, &limits()).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(
            is_completely_reachable(&d, &limits()).unwrap(),
            Reachability::Incomplete {
                first_missing: set(2, &[1])
            }
        );
    }

    #[test]
    fn e3_is_completely_reachable() {
        let e3 = families::e3();
        assert_eq!(reachable_subsets(&e3, &limits()).unwrap().len(), 7);
        assert!(is_completely_reachable(&e3, &limits())
            .unwrap()
            .is_complete());
    }

    #[test]
    fn reachable_subset_queries() {
        let e6 = families::e6();
        assert_eq!(
            is_reachable(&e6, &set(6, &[2, 3, 4, 5, 6]), &limits()).unwrap(),
            Some(Word::letter(0))
        );
        assert_eq!(
            is_reachable(&e6, &StateSet::full(6), &limits()).unwrap(),
            Some(Word::empty())
        );
        let e6p = families::e6_prime();
        for q in 1..=6 {
            assert_eq!(is_reachable(&e6p, &set(6, &[q]), &limits()).unwrap(), None);
        }
        assert!(is_reachable(&e6, &StateSet::empty(6), &limits()).is_err());
    }

    #[test]
    fn reset_words() {
        let c4 = families::cerny(4).unwrap();
        assert_eq!(
            shortest_reset_word(&c4, &limits()).unwrap().unwrap().len(),
            9
        );
        let ff = families::flip_flop();
        assert_eq!(
            shortest_reset_word(&ff, &limits()).unwrap(),
            Some(Word::letter(0))
        );
        assert_eq!(
            shortest_reset_word(&families::e6_prime(), &limits()).unwrap(),
            None
        );
    }

    #[test]
    fn cap_is_a_resource_error() {
        let c = families::cerny(6).unwrap();
        let tight = Limits {
            powerset_bits: 5,
            ..Limits::default()
        };
        let err = reachable_subsets(&c, &tight).err().unwrap();
        assert!(err.is_resource());
    }

    #[test]
    fn defect1_products_on_e3_miss_only_3() {
        let e3 = families::e3();
        let d1: Vec<Transformation> = e3
            .actions()
            .iter()
            .filter(|t| t.defect() == 1)
            .cloned()
            .collect();
        let reached = defect1_reachable_subsets(&e3, &d1, &limits()).unwrap();
        let literals: Vec<String> = reached.iter().map(|p| p.to_literal()).collect();
        assert_eq!(literals, vec!["1", "2", "1,2", "1,3", "2,3"]);
    }

    #[test]
    fn defect1_products_empty_for_permutations() {
        let d = Dfa::from_tables(3, vec![("a", vec![2, 3, 1])]).unwrap();
        assert!(defect1_reachable_subsets(&d, &[], &limits())
            .unwrap()
            .is_empty());
    }
}

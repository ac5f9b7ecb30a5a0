//! The defect-1 graph `Γ₁(A)`: one edge `excl(w) → dupl(w)` for every word
//! `w` of defect 1.
//!
//! Strong connectivity of `Γ₁(A)` is a sufficient condition for complete
//! reachability, and the proof is constructive: [`witness_for_subset`]
//! turns it into a word for every non-empty subset. This module also hosts
//! the cyclic state-map criteria and a random harness relating `Γ₁` to the
//! subsets reachable through products of defect-1 words.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::dfa::{Dfa, Word};
use crate::error::{Error, Result};
use crate::families;
use crate::limits::Limits;
use crate::monoid::{self, MonoidTable};
use crate::reach;
use crate::state::{StateId, StateSet};
use crate::transform::Transformation;

/// `Γ₁(A)` with the shortest (then letter-order smallest) defect-1 word
/// inducing each edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gamma1Graph {
    n: usize,
    edges: BTreeMap<(StateId, StateId), Word>,
}

impl Gamma1Graph {
    /// Edges read off an enumeration of the defect-≤1 part of `M(A)`.
    /// Breadth-first order makes the first element per edge the shortest one.
    pub fn from_table(n: usize, table: &MonoidTable) -> Self {
        let mut edges = BTreeMap::new();
        for (i, t) in table.elements().iter().enumerate() {
            if t.defect() == 1 {
                edges
                    .entry(t.excl_dupl_unchecked())
                    .or_insert_with(|| table.witness_at(i));
            }
        }
        Gamma1Graph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in (source, target) order with their witnesses.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId, &Word)> + '_ {
        self.edges.iter().map(|(&(s, t), w)| (s, t, w))
    }

    pub fn contains_edge(&self, source: StateId, target: StateId) -> bool {
        self.edges.contains_key(&(source, target))
    }

    pub fn witness(&self, source: StateId, target: StateId) -> Option<&Word> {
        self.edges.get(&(source, target))
    }

    /// Targets of the edges leaving `source`, in state order.
    pub fn successors(&self, source: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.edges
            .range((source, StateId::from_index(0))..)
            .take_while(move |(&(s, _), _)| s == source)
            .map(|(&(_, t), _)| t)
    }

    /// Strongly connected components, each sorted, listed by smallest state.
    pub fn components(&self) -> Vec<StateSet> {
        let mut graph = DiGraph::<(), ()>::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| graph.add_node(())).collect();
        for &(s, t) in self.edges.keys() {
            graph.add_edge(nodes[s.index()], nodes[t.index()], ());
        }
        let mut parts: Vec<StateSet> = tarjan_scc(&graph)
            .into_iter()
            .map(|scc| {
                let bits = scc.iter().fold(0u64, |acc, v| acc | 1 << v.index());
                StateSet::from_bits_unchecked(self.n, bits)
            })
            .collect();
        parts.sort_by_key(|p| p.bits().trailing_zeros());
        parts
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// `digraph gamma1 { … }` with each edge labelled by its witness.
    pub fn to_dot(&self, dfa: &Dfa) -> String {
        let mut out = String::from("digraph gamma1 {\n");
        for q in 1..=self.n {
            let _ = writeln!(out, "  {q};");
        }
        for (&(s, t), w) in &self.edges {
            let _ = writeln!(
                out,
                "  {s} -> {t} [label=\"{}\"];",
                dfa.render_word(w, false)
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_gamma1(dfa: &Dfa, limits: &Limits) -> Result<Gamma1Graph> {
    let table = monoid::enumerate_defect_at_most_1(dfa, limits)?;
    Ok(Gamma1Graph::from_table(dfa.n(), &table))
}

/// Outcome of the strong-connectivity certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `Γ₁` is strongly connected, so the automaton is completely reachable.
    CertifiedCr,
    /// `Γ₁` is not strongly connected. This says nothing about complete
    /// reachability; the components are listed.
    Inconclusive(Vec<StateSet>),
}

pub fn certify_strong_connectivity(dfa: &Dfa, limits: &Limits) -> Result<Certificate> {
    let parts = build_gamma1(dfa, limits)?.components();
    Ok(if parts.len() == 1 {
        Certificate::CertifiedCr
    } else {
        Certificate::Inconclusive(parts)
    })
}

/// A word reaching a subset together with the cut edges used, outermost
/// (last applied) first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetWitness {
    pub word: Word,
    pub cut_edges: Vec<(StateId, StateId)>,
}

impl SubsetWitness {
    /// Number of extraction steps; equals `n − |P|`.
    pub fn depth(&self) -> usize {
        self.cut_edges.len()
    }
}

/// Build a word `w` with `Q·w = P` from `Γ₁`.
///
/// While the target `P` is proper, pick an edge `q → p` with `q ∉ P`,
/// `p ∈ P` (shortest witness, then smallest `(q, p)`), let `R` be the
/// preimage of `P` under its witness `u` (so `|R| = |P| + 1` and `R·u = P`)
/// and continue with `R`. Fails when some intermediate target has no
/// entering edge, which cannot happen when `Γ₁` is strongly connected.
pub fn witness_for_subset(g: &Gamma1Graph, dfa: &Dfa, p: &StateSet) -> Result<SubsetWitness> {
    if p.is_empty() {
        return Err(Error::precondition("target subset must be non-empty"));
    }
    if p.capacity() != g.n || dfa.n() != g.n {
        return Err(Error::StateCountMismatch {
            left: g.n,
            right: p.capacity(),
        });
    }
    let mut target = *p;
    let mut suffix: Vec<&Word> = Vec::new();
    let mut cut_edges = Vec::new();
    while !target.is_full() {
        let (edge, w) = g
            .edges
            .iter()
            .filter(|(&(q, p), _)| !target.contains(q) && target.contains(p))
            .min_by_key(|(&edge, w)| (w.len(), edge))
            .ok_or_else(|| {
                Error::precondition(format!("no edge of the defect-1 graph enters {target}"))
            })?;
        target = dfa.word_action(w)?.preimage(&target);
        suffix.push(w);
        cut_edges.push(*edge);
    }
    let mut word = Word::empty();
    for w in suffix.iter().rev() {
        word = word.concat(w);
    }
    Ok(SubsetWitness { word, cut_edges })
}

/// Defect-1 words, one excluding each state, whose state map
/// `excl(w) ↦ dupl(w)` is a single cycle through all states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DonCollection {
    /// `words[q - 1]` excludes state `q`. Empty when `n = 1`.
    pub words: Vec<Word>,
    pub state_map: Transformation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DonSearch {
    Found(DonCollection),
    /// Some subset of size `n − 1` is not the image of any defect-1 word.
    UnreachableSubset(StateSet),
    /// Every `(n − 1)`-subset is reachable but no choice of words yields a
    /// cyclic state map.
    NoCyclicMap,
}

/// Backtracking search over all collections whose state map is an `n`-cycle.
pub fn don_collection_search(dfa: &Dfa, limits: &Limits) -> Result<DonSearch> {
    Ok(don_search_in(&build_gamma1(dfa, limits)?))
}

/// [`don_collection_search`] on an already built graph.
pub fn don_search_in(g: &Gamma1Graph) -> DonSearch {
    let n = g.n;
    if n == 1 {
        return DonSearch::Found(DonCollection {
            words: Vec::new(),
            state_map: Transformation::identity(1),
        });
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            g.successors(StateId::from_index(q))
                .map(StateId::index)
                .collect()
        })
        .collect();
    if let Some(q) = candidates.iter().position(Vec::is_empty) {
        let mut missing = StateSet::full(n);
        missing.remove(StateId::from_index(q));
        return DonSearch::UnreachableSubset(missing);
    }
    // A single n-cycle is a Hamiltonian cycle through state 0: follow it from
    // 0, choosing each successor among the candidates.
    let mut path = vec![0usize];
    let mut used = vec![false; n];
    used[0] = true;
    if !extend_cycle(&candidates, &mut path, &mut used) {
        return DonSearch::NoCyclicMap;
    }
    let mut map = vec![0u8; n];
    for i in 0..n {
        map[path[i]] = path[(i + 1) % n] as u8;
    }
    let words = (0..n)
        .map(|q| {
            g.witness(StateId::from_index(q), StateId::from_index(map[q] as usize))
                .expect("candidate edges come from the graph")
                .clone()
        })
        .collect();
    DonSearch::Found(DonCollection {
        words,
        state_map: Transformation::from_indices(map),
    })
}

fn extend_cycle(candidates: &[Vec<usize>], path: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let n = candidates.len();
    let last = *path.last().expect("path starts at state 0");
    if path.len() == n {
        return candidates[last].contains(&0);
    }
    for &next in &candidates[last] {
        if used[next] {
            continue;
        }
        used[next] = true;
        path.push(next);
        if extend_cycle(candidates, path, used) {
            return true;
        }
        path.pop();
        used[next] = false;
    }
    false
}

/// Outcome of the coprimality criterion for a defect-1 letter `a` and a
/// cyclic permutation letter `b`: `d` is the least positive integer with
/// `excl(a)·bᵈ = dupl(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DonCoprime {
    /// `gcd(d, n) = 1`, so the automaton is completely reachable.
    Applies { a: usize, b: usize, d: usize },
    /// No suitable pair of letters, or `d` shares a factor with `n` for every
    /// pair; `d` is reported for the first pair when one exists.
    NotApplicable { reason: String, d: Option<usize> },
}

/// Tries every (defect-1 letter, cyclic letter) pair in letter order and
/// applies with the first coprime one.
pub fn don_coprime_check(dfa: &Dfa) -> DonCoprime {
    let n = dfa.n();
    let defect_one: Vec<usize> = (0..dfa.num_letters())
        .filter(|&i| dfa.action(i).defect() == 1)
        .collect();
    let cyclic: Vec<usize> = (0..dfa.num_letters())
        .filter(|&i| dfa.action(i).is_cyclic_permutation())
        .collect();
    if defect_one.is_empty() {
        return DonCoprime::NotApplicable {
            reason: "no letter of defect 1".into(),
            d: None,
        };
    }
    if cyclic.is_empty() {
        return DonCoprime::NotApplicable {
            reason: "no letter acting as a cyclic permutation".into(),
            d: None,
        };
    }
    let mut first_d = None;
    for &a in &defect_one {
        let (excl, dupl) = dfa.action(a).excl_dupl_unchecked();
        for &b in &cyclic {
            let action = dfa.action(b);
            let mut q = excl;
            let mut d = 0;
            loop {
                q = action.apply(q);
                d += 1;
                if q == dupl {
                    break;
                }
            }
            if d.gcd(&n) == 1 {
                return DonCoprime::Applies { a, b, d };
            }
            first_d.get_or_insert(d);
        }
    }
    DonCoprime::NotApplicable {
        reason: format!("d shares a factor with n = {n} for every letter pair"),
        d: first_d,
    }
}

/// Both sides of the conjectured converse: reachability of every proper
/// non-empty subset through products of defect-1 words (hypothesis) and
/// strong connectivity of `Γ₁` (conclusion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConverseCheck {
    Consistent { hypothesis: bool, conclusion: bool },
    Counterexample { dfa: Dfa, components: Vec<StateSet> },
}

pub fn converse_check(dfa: &Dfa, limits: &Limits) -> Result<ConverseCheck> {
    let table = monoid::enumerate_defect_at_most_1(dfa, limits)?;
    let g = Gamma1Graph::from_table(dfa.n(), &table);
    let hypothesis = defect1_hypothesis(dfa, &table, limits)?;
    let components = g.components();
    let conclusion = components.len() == 1;
    Ok(if hypothesis && !conclusion {
        ConverseCheck::Counterexample {
            dfa: dfa.clone(),
            components,
        }
    } else {
        ConverseCheck::Consistent {
            hypothesis,
            conclusion,
        }
    })
}

fn defect1_hypothesis(dfa: &Dfa, table: &MonoidTable, limits: &Limits) -> Result<bool> {
    let defect_one: Vec<Transformation> = table
        .elements()
        .iter()
        .filter(|t| t.defect() == 1)
        .cloned()
        .collect();
    let reached = reach::defect1_reachable_subsets(dfa, &defect_one, limits)?;
    Ok(reached.len() == (1usize << dfa.n()) - 2)
}

/// Everything the harness computes for one automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonSummary {
    pub strongly_connected: bool,
    pub components: Vec<StateSet>,
    pub completely_reachable: bool,
    /// All proper non-empty subsets are reachable through defect-1 products.
    pub defect1_hypothesis: bool,
    pub don_collection: bool,
    pub don_coprime: bool,
}

pub fn summarize(dfa: &Dfa, limits: &Limits) -> Result<AutomatonSummary> {
    let table = monoid::enumerate_defect_at_most_1(dfa, limits)?;
    let g = Gamma1Graph::from_table(dfa.n(), &table);
    let components = g.components();
    Ok(AutomatonSummary {
        strongly_connected: components.len() == 1,
        components,
        completely_reachable: reach::is_completely_reachable(dfa, limits)?.is_complete(),
        defect1_hypothesis: defect1_hypothesis(dfa, &table, limits)?,
        don_collection: matches!(don_search_in(&g), DonSearch::Found(_)),
        don_coprime: matches!(don_coprime_check(dfa), DonCoprime::Applies { .. }),
    })
}

/// Harness findings for one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuntFinding {
    pub seed: u64,
    pub dfa: Dfa,
    pub kind: FindingKind,
    pub components: Vec<StateSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    /// Every proper subset is defect-1 reachable yet `Γ₁` is not strongly connected.
    ConverseCounterexample,
    /// `Γ₁` strongly connected but the oracle disagrees (would refute soundness).
    StrongConnectivityWithoutCr,
    /// A cyclic state map exists but the oracle disagrees.
    DonWithoutCr,
    /// A coprime letter pair exists but the oracle disagrees.
    CoprimeWithoutCr,
    /// `Γ₁` strongly connected but no collection has a cyclic state map.
    StrongConnectivityWithoutDon,
}

impl FindingKind {
    /// True for findings that contradict a proved statement.
    pub fn is_violation(self) -> bool {
        matches!(
            self,
            FindingKind::StrongConnectivityWithoutCr
                | FindingKind::DonWithoutCr
                | FindingKind::CoprimeWithoutCr
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HuntReport {
    pub examined: usize,
    pub strongly_connected: usize,
    pub completely_reachable: usize,
    pub hypothesis_holds: usize,
    pub don_found: usize,
    /// Findings ordered by seed.
    pub findings: Vec<HuntFinding>,
}

/// Which generator feeds the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// [`families::random_dfa`].
    Uniform,
    /// [`families::random_mixed_dfa`].
    Mixed,
}

/// Run the harness over seeds `seed .. seed + count` in parallel.
pub fn hunt(
    n: usize,
    m: usize,
    seed: u64,
    count: u64,
    generator: Generator,
    limits: &Limits,
) -> Result<HuntReport> {
    let results: Vec<(u64, Dfa, AutomatonSummary)> = (seed..seed + count)
        .into_par_iter()
        .map(|s| {
            let dfa = match generator {
                Generator::Uniform => families::random_dfa(n, m, s)?,
                Generator::Mixed => families::random_mixed_dfa(n, m, s)?,
            };
            let summary = summarize(&dfa, limits)?;
            Ok((s, dfa, summary))
        })
        .collect::<Result<_>>()?;
    let mut report = HuntReport::default();
    for (s, dfa, summary) in results {
        report.examined += 1;
        report.strongly_connected += summary.strongly_connected as usize;
        report.completely_reachable += summary.completely_reachable as usize;
        report.hypothesis_holds += summary.defect1_hypothesis as usize;
        report.don_found += summary.don_collection as usize;
        let mut kinds = Vec::new();
        if summary.defect1_hypothesis && !summary.strongly_connected {
            kinds.push(FindingKind::ConverseCounterexample);
        }
        if !summary.completely_reachable {
            if summary.strongly_connected {
                kinds.push(FindingKind::StrongConnectivityWithoutCr);
            }
            if summary.don_collection {
                kinds.push(FindingKind::DonWithoutCr);
            }
            if summary.don_coprime {
                kinds.push(FindingKind::CoprimeWithoutCr);
            }
        }
        if summary.strongly_connected && !summary.don_collection {
            kinds.push(FindingKind::StrongConnectivityWithoutDon);
        }
        for kind in kinds {
            report.findings.push(HuntFinding {
                seed: s,
                dfa: dfa.clone(),
                kind,
                components: summary.components.clone(),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cerny, e3, e6, e6_prime, flip_flop};

    fn s(q: usize) -> StateId {
        StateId::new(q)
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn e3_graph() {
        let g = build_gamma1(&e3(), &limits()).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().map(|(a, b, _)| (a.get(), b.get())).collect();
        assert_eq!(edges, vec![(1, 2), (2, 1), (3, 1)]);
        let parts: Vec<String> = g.components().iter().map(StateSet::to_literal).collect();
        assert_eq!(parts, vec!["1,2", "3"]);
        assert!(!g.is_strongly_connected());
    }

    #[test]
    fn e6_graph() {
        let d = e6();
        let g = build_gamma1(&d, &limits()).unwrap();
        assert_eq!(d.render_word(g.witness(s(1), s(3)).unwrap(), false), "a");
        assert_eq!(d.render_word(g.witness(s(1), s(4)).unwrap(), false), "aba");
        for k in 0..6 {
            assert!(g.contains_edge(s(1 + k), s((2 + k) % 6 + 1)));
            assert!(g.contains_edge(s(1 + k), s((3 + k) % 6 + 1)));
        }
        assert!(g.is_strongly_connected());
        assert!(g.to_dot(&d).starts_with("digraph gamma1 {\n"));
        assert!(g.to_dot(&d).contains("1 -> 4 [label=\"aba\"];"));
    }

    #[test]
    fn permutations_give_no_edges() {
        let d = Dfa::from_tables(3, vec![("c", vec![2, 3, 1])]).unwrap();
        let g = build_gamma1(&d, &limits()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.components().len(), 3);
        let one = Dfa::from_tables(1, vec![("a", vec![1])]).unwrap();
        assert!(build_gamma1(&one, &limits())
            .unwrap()
            .is_strongly_connected());
    }

    #[test]
    fn certificates() {
        assert_eq!(
            certify_strong_connectivity(&e6(), &limits()).unwrap(),
            Certificate::CertifiedCr
        );
        assert!(matches!(
            certify_strong_connectivity(&e3(), &limits()).unwrap(),
            Certificate::Inconclusive(_)
        ));
        for n in 2..=8 {
            assert_eq!(
                certify_strong_connectivity(&cerny(n).unwrap(), &limits()).unwrap(),
                Certificate::CertifiedCr
            );
        }
    }

    #[test]
    fn subset_witnesses_replay() {
        let d = e6();
        let g = build_gamma1(&d, &limits()).unwrap();
        let full = witness_for_subset(&g, &d, &StateSet::full(6)).unwrap();
        assert!(full.word.is_empty());
        let p = StateSet::parse("2,3,4,5,6", 6).unwrap();
        let w = witness_for_subset(&g, &d, &p).unwrap();
        assert_eq!(d.render_word(&w.word, false), "a");
        assert_eq!(w.cut_edges, vec![(s(1), s(3))]);
        for bits in 1u64..64 {
            let p = StateSet::from_bits(6, bits).unwrap();
            let w = witness_for_subset(&g, &d, &p).unwrap();
            assert_eq!(d.image_of_word(&w.word).unwrap(), p);
            assert_eq!(w.depth(), 6 - p.len());
        }
    }

    #[test]
    fn subset_witness_fails_without_entering_edge() {
        let d = e3();
        let g = build_gamma1(&d, &limits()).unwrap();
        assert!(witness_for_subset(&g, &d, &StateSet::parse("3", 3).unwrap()).is_err());
        assert!(witness_for_subset(&g, &d, &StateSet::empty(3)).is_err());
    }

    #[test]
    fn don_collections() {
        match don_collection_search(&cerny(4).unwrap(), &limits()).unwrap() {
            DonSearch::Found(c) => {
                assert_eq!(c.state_map.images(), vec![2, 3, 4, 1]);
                assert!(c.state_map.is_cyclic_permutation());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            don_collection_search(&e3(), &limits()).unwrap(),
            DonSearch::NoCyclicMap
        );
        let one = Dfa::from_tables(1, vec![("a", vec![1])]).unwrap();
        assert!(matches!(
            don_collection_search(&one, &limits()).unwrap(),
            DonSearch::Found(_)
        ));
        assert!(matches!(
            don_collection_search(&e6_prime(), &limits()).unwrap(),
            DonSearch::Found(_) | DonSearch::NoCyclicMap | DonSearch::UnreachableSubset(_)
        ));
    }

    #[test]
    fn coprime_criterion() {
        assert_eq!(
            don_coprime_check(&cerny(4).unwrap()),
            DonCoprime::Applies { a: 0, b: 1, d: 1 }
        );
        match don_coprime_check(&e6()) {
            DonCoprime::NotApplicable { d, .. } => assert_eq!(d, Some(2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            don_coprime_check(&flip_flop()),
            DonCoprime::NotApplicable { d: None, .. }
        ));
    }

    #[test]
    fn conjecture_sides() {
        assert_eq!(
            converse_check(&e3(), &limits()).unwrap(),
            ConverseCheck::Consistent {
                hypothesis: false,
                conclusion: false
            }
        );
        assert_eq!(
            converse_check(&e6(), &limits()).unwrap(),
            ConverseCheck::Consistent {
                hypothesis: true,
                conclusion: true
            }
        );
    }

    #[test]
    fn small_hunt_is_ordered_and_sound() {
        let report = hunt(4, 2, 0, 200, Generator::Mixed, &limits()).unwrap();
        assert_eq!(report.examined, 200);
        assert!(report.findings.windows(2).all(|w| w[0].seed <= w[1].seed));
        assert!(report.findings.iter().all(|f| !f.kind.is_violation()));
    }
}

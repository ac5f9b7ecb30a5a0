//! Polynomial-time decision of strong connectivity of `Γ₁(A)` for automata
//! with two letters.
//!
//! Apart from small degenerate cases, `Γ₁` can only be strongly connected
//! when one letter `a` has defect 1 and the other letter `b` is a cyclic
//! permutation. Then `b` acts on the edges of `Γ₁` by translation, the
//! translates of `excl(a) → dupl(a)` form `d` disjoint cycles, and the
//! procedure grows this spanning subgraph level by level: for each frontier
//! word `w` exactly two of the words `w bᵏ a` have defect 1, and those whose
//! edges join different components are appended with all their translates.

use std::fmt::Write as _;

use crate::dfa::{Dfa, Word};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::reach;
use crate::state::StateId;
use crate::transform::Transformation;

/// How the letters of the automaton were classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryCase {
    /// One state: `Γ₁` is a single vertex.
    SingleState,
    /// Both letters permute the states; `Γ₁` has no edges.
    Permutations,
    /// Both letters have defect 1.
    BothDefectOne,
    /// Some letter has defect at least 2.
    HighDefect,
    /// One letter of defect 1, the other a permutation that is not an `n`-cycle.
    NotCyclic,
    /// One letter of defect 1, the other an `n`-cycle.
    Main,
}

/// What happened to a candidate word `w bᵏ a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateStatus {
    DefectAbove1,
    /// Defect 1, but its edge is already in the subgraph.
    DuplicateEdge,
    /// Defect 1 with a new edge inside one component; not appended.
    WithinComponent,
    /// Defect 1 with an edge joining two components; appended with translates.
    Appended,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// Index of the frontier word this candidate extends.
    pub parent: usize,
    pub k: usize,
    pub word: Word,
    pub action: Transformation,
    pub status: CandidateStatus,
}

impl Candidate {
    pub fn is_survivor(&self) -> bool {
        self.status != CandidateStatus::DefectAbove1
    }

    /// `(excl, dupl)` of a defect-1 candidate.
    pub fn edge(&self) -> Option<(StateId, StateId)> {
        self.is_survivor()
            .then(|| self.action.excl_dupl_unchecked())
    }
}

/// One level of the procedure. The first level has no candidates: its
/// frontier is `a` and its only new edge is `excl(a) → dupl(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLevel {
    pub frontier: Vec<Word>,
    pub candidates: Vec<Candidate>,
    /// Appended edges, one representative per translate orbit.
    pub new_edges: Vec<(StateId, StateId, Word)>,
    /// Components of the spanning subgraph after this level.
    pub component_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinaryTrace {
    pub levels: Vec<BinaryLevel>,
}

impl BinaryTrace {
    pub fn words_examined(&self) -> usize {
        self.levels.iter().map(|l| l.candidates.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryAnalysis {
    pub case: BinaryCase,
    pub strongly_connected: bool,
    /// Known complete reachability: `Some(true)` whenever `Γ₁` is strongly
    /// connected, `Some(false)` when the case analysis rules it out, `None`
    /// when the procedure cannot tell.
    pub completely_reachable: Option<bool>,
    /// Index of the defect-1 letter and of the permutation letter, in the
    /// cases where those roles exist.
    pub roles: Option<(usize, usize)>,
    /// True when the main case stopped because no survivor joined two components.
    pub stuck: bool,
    pub trace: BinaryTrace,
}

/// Letter roles `(a, b)` of the main and not-cyclic cases.
fn roles(dfa: &Dfa) -> Option<(usize, usize)> {
    let d0 = dfa.action(0).defect();
    let d1 = dfa.action(1).defect();
    match (d0, d1) {
        (1, 0) => Some((0, 1)),
        (0, 1) => Some((1, 0)),
        _ => None,
    }
}

fn require_two_letters(dfa: &Dfa) -> Result<()> {
    if dfa.num_letters() != 2 {
        return Err(Error::precondition(format!(
            "the two-letter procedure needs exactly 2 letters, got {}",
            dfa.num_letters()
        )));
    }
    Ok(())
}

pub fn analyze_binary(dfa: &Dfa, limits: &Limits) -> Result<BinaryAnalysis> {
    require_two_letters(dfa)?;
    let n = dfa.n();
    let done = |case, sc: bool, cr: Option<bool>, roles| BinaryAnalysis {
        case,
        strongly_connected: sc,
        completely_reachable: cr,
        roles,
        stuck: false,
        trace: BinaryTrace::default(),
    };
    if n == 1 {
        return Ok(done(BinaryCase::SingleState, true, Some(true), None));
    }
    let (d0, d1) = (dfa.action(0).defect(), dfa.action(1).defect());
    if d0 == 0 && d1 == 0 {
        return Ok(done(BinaryCase::Permutations, false, Some(false), None));
    }
    if d0 >= 2 || d1 >= 2 {
        return Ok(done(BinaryCase::HighDefect, false, Some(false), None));
    }
    if d0 == 1 && d1 == 1 {
        if n > 2 {
            // Every defect-1 word ends in a letter of defect 1, so edges
            // leave at most two vertices.
            return Ok(done(BinaryCase::BothDefectOne, false, Some(false), None));
        }
        // Two constant maps on two states: the edges are the letters' own.
        let sc = dfa.action(0) != dfa.action(1);
        let cr = reach::is_completely_reachable(dfa, limits)?.is_complete();
        return Ok(done(BinaryCase::BothDefectOne, sc, Some(cr), None));
    }
    let (a, b) = roles(dfa).expect("one letter of defect 1, one permutation");
    if !dfa.action(b).is_cyclic_permutation() {
        return Ok(done(BinaryCase::NotCyclic, false, None, Some((a, b))));
    }
    main_case(dfa, a, b)
}

/// Union–find over states.
struct Components {
    parent: Vec<usize>,
    count: usize,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx] = ry;
            self.count -= 1;
        }
    }
}

fn main_case(dfa: &Dfa, a: usize, b: usize) -> Result<BinaryAnalysis> {
    let n = dfa.n();
    let b_action = dfa.action(b);
    let seed = Word::letter(a);
    let (excl, dupl) = dfa.action(a).excl_dupl_unchecked();
    // Edges present so far are exactly the translates of edges leaving
    // excl(a); `present[t]` records whether excl(a) → t is one of them.
    let mut present = vec![false; n];
    let mut components = Components::new(n);
    let append = |components: &mut Components, target: StateId| {
        let (mut s, mut t) = (excl, target);
        for _ in 0..n {
            components.union(s.index(), t.index());
            s = b_action.apply(s);
            t = b_action.apply(t);
        }
    };
    present[dupl.index()] = true;
    append(&mut components, dupl);
    let mut trace = BinaryTrace {
        levels: vec![BinaryLevel {
            frontier: vec![seed.clone()],
            candidates: Vec::new(),
            new_edges: vec![(excl, dupl, seed.clone())],
            component_count: components.count,
        }],
    };
    let mut frontier = vec![seed];
    let mut stuck = false;
    while components.count > 1 {
        let mut candidates = Vec::with_capacity(frontier.len() * n);
        let mut new_edges = Vec::new();
        let mut next_frontier = Vec::new();
        // Crossing is judged against the components at the start of the level.
        let mut before = Components {
            parent: components.parent.clone(),
            count: components.count,
        };
        for (parent, w) in frontier.iter().enumerate() {
            let rows = candidate_rows(dfa, a, b, w)?;
            let survivors = rows.iter().filter(|(_, t)| t.defect() == 1).count();
            if survivors != 2 {
                return Err(Error::Invariant(format!(
                    "{} of the words {}·bᵏ·a have defect 1, expected exactly 2",
                    survivors,
                    dfa.render_word(w, true)
                )));
            }
            for (k, (word, action)) in rows.into_iter().enumerate() {
                let status = if action.defect() != 1 {
                    CandidateStatus::DefectAbove1
                } else {
                    let (s, t) = action.excl_dupl_unchecked();
                    if s != excl {
                        return Err(Error::Invariant(format!(
                            "excl({}) = {s}, expected {excl}",
                            dfa.render_word(&word, true)
                        )));
                    }
                    if present[t.index()] {
                        CandidateStatus::DuplicateEdge
                    } else if before.find(s.index()) == before.find(t.index()) {
                        CandidateStatus::WithinComponent
                    } else {
                        present[t.index()] = true;
                        append(&mut components, t);
                        new_edges.push((s, t, word.clone()));
                        next_frontier.push(word.clone());
                        CandidateStatus::Appended
                    }
                };
                candidates.push(Candidate {
                    parent,
                    k,
                    word,
                    action,
                    status,
                });
            }
        }
        trace.levels.push(BinaryLevel {
            frontier: std::mem::take(&mut frontier),
            candidates,
            new_edges,
            component_count: components.count,
        });
        if next_frontier.is_empty() {
            stuck = true;
            break;
        }
        frontier = next_frontier;
    }
    let sc = components.count == 1;
    Ok(BinaryAnalysis {
        case: BinaryCase::Main,
        strongly_connected: sc,
        completely_reachable: sc.then_some(true),
        roles: Some((a, b)),
        stuck,
        trace,
    })
}

fn candidate_rows(dfa: &Dfa, a: usize, b: usize, w: &Word) -> Result<Vec<(Word, Transformation)>> {
    let base = dfa.word_action(w)?;
    let (a_action, b_action) = (dfa.action(a), dfa.action(b));
    let mut prefix = base;
    let mut rows = Vec::with_capacity(dfa.n());
    for k in 0..dfa.n() {
        let mut word = w.with_power(b, k);
        word.push(a);
        rows.push((word, prefix.then(a_action)));
        prefix = prefix.then(b_action);
    }
    Ok(rows)
}

/// One row of [`candidate_word_table`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRow {
    pub word: Word,
    pub action: Transformation,
    pub defect: usize,
}

/// The actions of `w bᵏ a` for `k = 0..n−1`, where `a` is the defect-1
/// letter and `b` the permutation letter.
pub fn candidate_word_table(dfa: &Dfa, w: &Word) -> Result<Vec<CandidateRow>> {
    require_two_letters(dfa)?;
    let (a, b) = roles(dfa).ok_or_else(|| {
        Error::precondition("need one letter of defect 1 and one permutation letter")
    })?;
    dfa.check_word(w)?;
    Ok(candidate_rows(dfa, a, b, w)?
        .into_iter()
        .map(|(word, action)| CandidateRow {
            defect: action.defect(),
            word,
            action,
        })
        .collect())
}

impl BinaryAnalysis {
    /// Text report: the verdict, then per level a table of candidate words
    /// (rows) by states (columns).
    pub fn render(&self, dfa: &Dfa, powers: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "case: {}", case_name(self.case));
        if let Some((a, b)) = self.roles {
            let _ = writeln!(
                out,
                "letters: a = {}, b = {}",
                dfa.letter_name(a),
                dfa.letter_name(b)
            );
        }
        let n = dfa.n();
        let words: Vec<String> = self
            .trace
            .levels
            .iter()
            .flat_map(|l| {
                l.candidates
                    .iter()
                    .map(|c| dfa.render_word(&c.word, powers))
            })
            .collect();
        let width = words
            .iter()
            .map(|w| w.chars().count())
            .max()
            .unwrap_or(0)
            .max(4);
        let state_width = n.to_string().len();
        for (i, level) in self.trace.levels.iter().enumerate() {
            let frontier: Vec<String> = level
                .frontier
                .iter()
                .map(|w| dfa.render_word(w, powers))
                .collect();
            let _ = writeln!(out, "level {}: frontier {}", i + 1, frontier.join(", "));
            if !level.candidates.is_empty() {
                let header: Vec<String> = (1..=n).map(|q| format!("{q:>state_width$}")).collect();
                let _ = writeln!(out, "  {:width$} | {}", "", header.join(" "));
                for c in &level.candidates {
                    let images: Vec<String> = c
                        .action
                        .images()
                        .iter()
                        .map(|q| format!("{q:>state_width$}"))
                        .collect();
                    let note = match (c.status, c.edge()) {
                        (CandidateStatus::DefectAbove1, _) => String::new(),
                        (status, Some((s, t))) => format!("  {s} -> {t} {}", status_name(status)),
                        _ => String::new(),
                    };
                    let _ = writeln!(
                        out,
                        "  {:width$} | {}{note}",
                        dfa.render_word(&c.word, powers),
                        images.join(" ")
                    );
                }
            }
            for (s, t, w) in &level.new_edges {
                let _ = writeln!(
                    out,
                    "  edge {s} -> {t} via {} and its translates",
                    dfa.render_word(w, powers)
                );
            }
            let _ = writeln!(out, "  components: {}", level.component_count);
        }
        if self.stuck {
            let _ = writeln!(out, "stuck: no new edge joins two components");
        }
        let _ = writeln!(
            out,
            "strongly connected: {}",
            if self.strongly_connected { "yes" } else { "no" }
        );
        let _ = writeln!(
            out,
            "completely reachable: {}",
            match self.completely_reachable {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undecided",
            }
        );
        out
    }

    /// The accumulated spanning subgraph (appended edges and translates).
    pub fn to_dot(&self, dfa: &Dfa) -> String {
        let mut out = String::from("digraph spanning {\n");
        for q in 1..=dfa.n() {
            let _ = writeln!(out, "  {q};");
        }
        if let Some((_, b)) = self.roles {
            let b_action = dfa.action(b);
            for level in &self.trace.levels {
                for (s, t, w) in &level.new_edges {
                    let label = dfa.render_word(w, true);
                    let (mut s, mut t) = (*s, *t);
                    for k in 0..dfa.n() {
                        let suffix = if k == 0 {
                            String::new()
                        } else {
                            format!("b^{k}")
                        };
                        let _ = writeln!(out, "  {s} -> {t} [label=\"{label}{suffix}\"];");
                        s = b_action.apply(s);
                        t = b_action.apply(t);
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn case_name(case: BinaryCase) -> &'static str {
    match case {
        BinaryCase::SingleState => "single state",
        BinaryCase::Permutations => "both letters are permutations",
        BinaryCase::BothDefectOne => "both letters have defect 1",
        BinaryCase::HighDefect => "a letter has defect at least 2",
        BinaryCase::NotCyclic => "the permutation letter is not an n-cycle",
        BinaryCase::Main => "defect-1 letter and cyclic permutation",
    }
}

fn status_name(status: CandidateStatus) -> &'static str {
    match status {
        CandidateStatus::DefectAbove1 => "",
        CandidateStatus::DuplicateEdge => "(already present)",
        CandidateStatus::WithinComponent => "(inside a component)",
        CandidateStatus::Appended => "(appended)",
    }
}

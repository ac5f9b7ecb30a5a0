//! Road colorings: every vertex sends each letter along one of its out-edges,
//! using every out-edge at least once, which turns a digraph into a DFA.
//!
//! Graph text format: `graph <n>` followed by one `u -> v` line per edge;
//! the order of a vertex's out-edges is their order in the file.

use std::fmt::Write as _;

use num_integer::Integer;

use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::families::letter_name;
use crate::limits::{Limits, MAX_STATES};
use crate::reach;
use crate::transform::Transformation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutDigraph {
    /// `out[u]` lists the 0-based targets of `u`'s out-edges in file order.
    out: Vec<Vec<usize>>,
}

impl OutDigraph {
    /// Build from 1-based edges in order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_STATES {
            return Err(Error::precondition(format!(
                "vertex count must be in 1..={MAX_STATES}, got {n}"
            )));
        }
        let mut out = vec![Vec::new(); n];
        for &(u, v) in edges {
            for q in [u, v] {
                if q == 0 || q > n {
                    return Err(Error::StateOutOfRange { state: q, n });
                }
            }
            out[u - 1].push(v - 1);
        }
        Ok(OutDigraph { out })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(count) = n else {
                n = Some(crate::dfa::parse_header(line_no, line, "graph")?);
                continue;
            };
            let (u, v) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(line_no, 1, "expected `u -> v`"))?;
            let vertex = |s: &str, column: usize| -> Result<usize> {
                let q: usize = s.trim().parse().map_err(|_| {
                    Error::parse(line_no, column, format!("`{}` is not a vertex", s.trim()))
                })?;
                if q == 0 || q > count {
                    return Err(Error::parse(
                        line_no,
                        column,
                        format!("vertex {q} out of range 1..={count}"),
                    ));
                }
                Ok(q)
            };
            let column_v = raw.find("->").map_or(1, |c| c + 3);
            edges.push((vertex(u, 1)?, vertex(v, column_v)?));
        }
        let n = n.ok_or_else(|| Error::parse(1, 1, "missing `graph <n>` header"))?;
        OutDigraph::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    /// 0-based out-neighbours of 0-based vertex `u`, in edge order.
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn reaches_all(&self, reverse: bool) -> bool {
        let n = self.n();
        let mut adj = vec![Vec::new(); n];
        for (u, targets) in self.out.iter().enumerate() {
            for &v in targets {
                if reverse {
                    adj[v].push(u);
                } else {
                    adj[u].push(v);
                }
            }
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(false) && self.reaches_all(true)
    }
}

/// The gcd of all cycle lengths of a strongly connected graph (1 means
/// primitive), computed from breadth-first levels as the gcd of
/// `level(u) + 1 − level(v)` over all edges `u → v`.
pub fn primitivity_period(g: &OutDigraph) -> Result<usize> {
    if !g.is_strongly_connected() {
        return Err(Error::precondition(
            "the period is defined for strongly connected graphs",
        ));
    }
    let n = g.n();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in g.out_edges(u) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0usize;
    for u in 0..n {
        for &v in g.out_edges(u) {
            period = period.gcd(&(level[u] + 1).abs_diff(level[v]));
        }
    }
    Ok(period)
}

/// A coloring with `m` letters: `choice[u][x]` is the index (in `u`'s edge
/// order) of the out-edge that letter `x` follows from vertex `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoadColoring {
    pub choice: Vec<Vec<usize>>,
}

impl RoadColoring {
    pub fn m(&self) -> usize {
        self.choice.first().map_or(0, Vec::len)
    }

    /// The induced automaton, letters named `a`, `b`, ….
    pub fn to_dfa(&self, g: &OutDigraph) -> Result<Dfa> {
        let letters = (0..self.m())
            .map(|x| {
                let map = (0..g.n())
                    .map(|u| g.out_edges(u)[self.choice[u][x]] as u8)
                    .collect();
                (letter_name(x), Transformation::from_indices(map))
            })
            .collect();
        Dfa::new(g.n(), letters)
    }

    /// One line per vertex: `u: a=u->v b=u->w …`.
    pub fn render(&self, g: &OutDigraph) -> String {
        let mut out = String::new();
        for (u, row) in self.choice.iter().enumerate() {
            let _ = write!(out, "{}:", u + 1);
            for (x, &e) in row.iter().enumerate() {
                let _ = write!(
                    out,
                    " {}={}->{}",
                    letter_name(x),
                    u + 1,
                    g.out_edges(u)[e] + 1
                );
            }
            out.push('\n');
        }
        out
    }
}

/// All surjections from `m` letters onto `k` edges, as tables in
/// lexicographic order.
fn surjections(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > m {
        return out;
    }
    let mut table = vec![0usize; m];
    loop {
        let mut hit = vec![false; k];
        for &e in &table {
            hit[e] = true;
        }
        if hit.iter().all(|&h| h) {
            out.push(table.clone());
        }
        // Odometer increment, last letter fastest.
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            table[i] += 1;
            if table[i] < k {
                break;
            }
            table[i] = 0;
        }
    }
}

/// Number of surjections from an `m`-set onto a `k`-set.
pub fn surjection_count(m: usize, k: usize) -> u128 {
    // Inclusion–exclusion: Σ (−1)^j C(k, j) (k − j)^m.
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let term = binom * ((k - j) as i128).pow(m as u32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (k - j) as i128 / (j + 1) as i128;
    }
    total as u128
}

/// `Π_v Surj(m, outdeg(v))`.
pub fn coloring_count(g: &OutDigraph, m: usize) -> u128 {
    (0..g.n())
        .map(|u| surjection_count(m, g.out_edges(u).len()))
        .product()
}

/// Every coloring with `m` letters, in lexicographic order of the per-vertex
/// tables (vertex 1 most significant). Empty when some out-degree exceeds
/// `m` or is zero.
pub fn enumerate_colorings(g: &OutDigraph, m: usize) -> impl Iterator<Item = RoadColoring> {
    let options: Vec<Vec<Vec<usize>>> = (0..g.n())
        .map(|u| surjections(m, g.out_edges(u).len()))
        .collect();
    let empty = options.iter().any(Vec::is_empty);
    let mut index = vec![0usize; options.len()];
    let mut done = empty || options.is_empty();
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let coloring = RoadColoring {
            choice: index
                .iter()
                .zip(&options)
                .map(|(&i, o)| o[i].clone())
                .collect(),
        };
        let mut v = options.len();
        loop {
            if v == 0 {
                done = true;
                break;
            }
            v -= 1;
            index[v] += 1;
            if index[v] < options[v].len() {
                break;
            }
            index[v] = 0;
        }
        Some(coloring)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColoringPredicate {
    Synchronizing,
    CompletelyReachable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringSearch {
    pub total: usize,
    pub count: usize,
    /// First satisfying coloring in enumeration order.
    pub first: Option<RoadColoring>,
}

pub fn holds(dfa: &Dfa, predicate: ColoringPredicate, limits: &Limits) -> Result<bool> {
    Ok(match predicate {
        ColoringPredicate::Synchronizing => reach::shortest_reset_word(dfa, limits)?.is_some(),
        ColoringPredicate::CompletelyReachable => {
            reach::is_completely_reachable(dfa, limits)?.is_complete()
        }
    })
}

/// Test every coloring with `m` letters.
pub fn search_colorings(
    g: &OutDigraph,
    m: usize,
    predicate: ColoringPredicate,
    limits: &Limits,
) -> Result<ColoringSearch> {
    let mut report = ColoringSearch {
        total: 0,
        count: 0,
        first: None,
    };
    for coloring in enumerate_colorings(g, m) {
        report.total += 1;
        if holds(&coloring.to_dfa(g)?, predicate, limits)? {
            report.count += 1;
            report.first.get_or_insert(coloring);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center() -> OutDigraph {
        OutDigraph::parse("graph 4\n1 -> 1\n1 -> 2\n2 -> 1\n2 -> 3\n3 -> 4\n4 -> 1\n").unwrap()
    }

    #[test]
    fn parse_errors() {
        assert!(OutDigraph::parse("graph 2\n1 -> 3\n").is_err());
        assert!(OutDigraph::parse("1 -> 1\n").is_err());
        assert!(OutDigraph::parse("graph 2\n1 2\n").is_err());
    }

    #[test]
    fn periods() {
        let left = OutDigraph::new(3, &[(1, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(primitivity_period(&left).unwrap(), 1);
        let cycle = OutDigraph::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]).unwrap();
        assert_eq!(primitivity_period(&cycle).unwrap(), 5);
        let two_cycles = OutDigraph::new(4, &[(1, 2), (2, 1), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(primitivity_period(&two_cycles).unwrap(), 2);
        let not_sc = OutDigraph::new(2, &[(1, 2), (2, 2)]).unwrap();
        assert!(primitivity_period(&not_sc).is_err());
    }

    #[test]
    fn surjection_tables() {
        assert_eq!(surjections(2, 2), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(surjections(3, 2).len(), 6);
        assert!(surjections(1, 2).is_empty());
        for m in 0..6 {
            for k in 1..5 {
                assert_eq!(
                    surjections(m, k).len() as u128,
                    surjection_count(m, k),
                    "{m} {k}"
                );
            }
        }
    }

    #[test]
    fn counts_match_formula() {
        let g = center();
        assert_eq!(enumerate_colorings(&g, 2).count(), 4);
        assert_eq!(enumerate_colorings(&g, 3).count(), 36);
        assert_eq!(coloring_count(&g, 2), 4);
        assert_eq!(coloring_count(&g, 3), 36);
        assert_eq!(enumerate_colorings(&g, 1).count(), 0);
    }

    #[test]
    fn colorings_respect_edges() {
        let g = center();
        for c in enumerate_colorings(&g, 3) {
            let d = c.to_dfa(&g).unwrap();
            for (x, t) in d.actions().iter().enumerate() {
                for u in 0..g.n() {
                    assert_eq!(t.indices()[u] as usize, g.out_edges(u)[c.choice[u][x]]);
                }
            }
        }
    }

    #[test]
    fn render_lists_letters() {
        let g = center();
        let c = enumerate_colorings(&g, 2).next().unwrap();
        assert_eq!(c.render(&g).lines().next().unwrap(), "1: a=1->1 b=1->2");
    }
}

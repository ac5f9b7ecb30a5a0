//! Full binary trees with genders: the left child of a vertex is its son,
//! the right child its daughter.
//!
//! Text format: `tree := "L" | "(" tree " " tree ")"`, son first.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest leaf count accepted by the enumerators (Catalan growth).
pub const MAX_ENUMERATION_LEAVES: usize = 14;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FullBinaryTree {
    Leaf,
    Node {
        son: Arc<FullBinaryTree>,
        daughter: Arc<FullBinaryTree>,
        span: usize,
    },
}

impl FullBinaryTree {
    pub fn leaf() -> Self {
        FullBinaryTree::Leaf
    }

    pub fn node(son: FullBinaryTree, daughter: FullBinaryTree) -> Self {
        Self::node_arc(Arc::new(son), Arc::new(daughter))
    }

    fn node_arc(son: Arc<FullBinaryTree>, daughter: Arc<FullBinaryTree>) -> Self {
        let span = son.span() + daughter.span();
        FullBinaryTree::Node {
            son,
            daughter,
            span,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, FullBinaryTree::Leaf)
    }

    pub fn son(&self) -> Option<&FullBinaryTree> {
        match self {
            FullBinaryTree::Node { son, .. } => Some(son),
            FullBinaryTree::Leaf => None,
        }
    }

    pub fn daughter(&self) -> Option<&FullBinaryTree> {
        match self {
            FullBinaryTree::Node { daughter, .. } => Some(daughter),
            FullBinaryTree::Leaf => None,
        }
    }

    /// Number of leaves.
    pub fn span(&self) -> usize {
        match self {
            FullBinaryTree::Leaf => 1,
            FullBinaryTree::Node { span, .. } => *span,
        }
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.span() - 1
    }

    /// True iff some 1-1 homomorphism maps `self` into `other`: root to
    /// root, sons to sons, daughters to daughters. Such a map has no freedom,
    /// so it exists iff `self` is a leaf or both are internal and the sons and
    /// daughters subordinate pairwise.
    pub fn subordinates(&self, other: &FullBinaryTree) -> bool {
        match (self, other) {
            (FullBinaryTree::Leaf, _) => true,
            (FullBinaryTree::Node { .. }, FullBinaryTree::Leaf) => false,
            (
                FullBinaryTree::Node { son, daughter, .. },
                FullBinaryTree::Node {
                    son: son2,
                    daughter: daughter2,
                    ..
                },
            ) => son.subordinates(son2) && daughter.subordinates(daughter2),
        }
    }

    /// Every nephew subordinates his uncle and every niece her aunt.
    pub fn is_respectful(&self) -> bool {
        match self {
            FullBinaryTree::Leaf => true,
            FullBinaryTree::Node { son, daughter, .. } => {
                let nephew_ok = daughter.son().is_none_or(|nephew| nephew.subordinates(son));
                let niece_ok = son
                    .daughter()
                    .is_none_or(|niece| niece.subordinates(daughter));
                nephew_ok && niece_ok && son.is_respectful() && daughter.is_respectful()
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        parser.skip_ws();
        let tree = parser.tree()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(Error::parse(1, parser.pos + 1, "trailing input after tree"));
        }
        Ok(tree)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn tree(&mut self) -> Result<FullBinaryTree> {
        match self.bytes.get(self.pos) {
            Some(b'L') => {
                self.pos += 1;
                Ok(FullBinaryTree::Leaf)
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let son = self.tree()?;
                self.skip_ws();
                let daughter = self.tree()?;
                self.skip_ws();
                if self.bytes.get(self.pos) != Some(&b')') {
                    return Err(Error::parse(1, self.pos + 1, "expected `)`"));
                }
                self.pos += 1;
                Ok(FullBinaryTree::node(son, daughter))
            }
            Some(_) => Err(Error::parse(1, self.pos + 1, "expected `L` or `(`")),
            None => Err(Error::parse(1, self.pos + 1, "unexpected end of tree")),
        }
    }
}

impl fmt::Display for FullBinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullBinaryTree::Leaf => write!(f, "L"),
            FullBinaryTree::Node { son, daughter, .. } => write!(f, "({son} {daughter})"),
        }
    }
}

impl fmt::Debug for FullBinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Gender of a non-root vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gender {
    Son,
    Daughter,
}

/// A vertex of a [`MarkedTree`], marked with the interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedVertex {
    pub lo: usize,
    pub hi: usize,
    pub parent: Option<usize>,
    pub gender: Option<Gender>,
    /// Son and daughter indices, for internal vertices.
    pub children: Option<(usize, usize)>,
}

impl MarkedVertex {
    pub fn span(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// `a_[i,j]`, or `a_[i]` for a one-element interval.
    pub fn letter_name(&self) -> String {
        if self.lo == self.hi {
            format!("a_[{}]", self.lo)
        } else {
            format!("a_[{},{}]", self.lo, self.hi)
        }
    }
}

/// A tree with a faithful interval marking: every vertex carries an interval
/// of its span's length and the son takes the left part of its parent's
/// interval. Vertices are stored in pre-order, son before daughter; index 0
/// is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTree {
    tree: FullBinaryTree,
    vertices: Vec<MarkedVertex>,
}

impl MarkedTree {
    /// The marking whose root interval starts at `start`.
    pub fn with_start(tree: &FullBinaryTree, start: usize) -> Self {
        let mut vertices = Vec::with_capacity(tree.vertex_count());
        mark(tree, start, None, None, &mut vertices);
        MarkedTree {
            tree: tree.clone(),
            vertices,
        }
    }

    pub fn tree(&self) -> &FullBinaryTree {
        &self.tree
    }

    pub fn vertices(&self) -> &[MarkedVertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &MarkedVertex {
        &self.vertices[v]
    }

    pub fn root(&self) -> &MarkedVertex {
        &self.vertices[0]
    }

    pub fn is_canonical(&self) -> bool {
        self.root().lo == 1
    }

    /// Indices of the leaves below `v`, left to right.
    pub fn leaves_below(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match self.vertices[u].children {
                None => out.push(u),
                Some((s, d)) => {
                    stack.push(d);
                    stack.push(s);
                }
            }
        }
        out
    }
}

fn mark(
    tree: &FullBinaryTree,
    lo: usize,
    parent: Option<usize>,
    gender: Option<Gender>,
    out: &mut Vec<MarkedVertex>,
) -> usize {
    let index = out.len();
    out.push(MarkedVertex {
        lo,
        hi: lo + tree.span() - 1,
        parent,
        gender,
        children: None,
    });
    if let FullBinaryTree::Node { son, daughter, .. } = tree {
        let s = mark(son, lo, Some(index), Some(Gender::Son), out);
        let d = mark(
            daughter,
            lo + son.span(),
            Some(index),
            Some(Gender::Daughter),
            out,
        );
        out[index].children = Some((s, d));
    }
    index
}

/// The marking with root interval `[1, n]`.
pub fn canonical_marking(tree: &FullBinaryTree) -> MarkedTree {
    MarkedTree::with_start(tree, 1)
}

fn check_enumeration(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::precondition("trees have at least one leaf"));
    }
    if n > MAX_ENUMERATION_LEAVES {
        return Err(Error::CapExceeded {
            what: "tree leaf count",
            limit: MAX_ENUMERATION_LEAVES,
            requested: n,
        });
    }
    Ok(())
}

/// All full binary trees with `n` leaves: by increasing son span, and for a
/// fixed split, sons in their own enumeration order before daughters.
pub fn enumerate_full_binary_trees(n: usize) -> Result<Vec<FullBinaryTree>> {
    check_enumeration(n)?;
    let mut by_span: Vec<Vec<Arc<FullBinaryTree>>> =
        vec![Vec::new(), vec![Arc::new(FullBinaryTree::Leaf)]];
    for total in 2..=n {
        let mut trees = Vec::new();
        for left in 1..total {
            for son in &by_span[left] {
                for daughter in &by_span[total - left] {
                    trees.push(Arc::new(FullBinaryTree::node_arc(
                        son.clone(),
                        daughter.clone(),
                    )));
                }
            }
        }
        by_span.push(trees);
    }
    Ok(by_span[n].iter().map(|t| (**t).clone()).collect())
}

/// The respectful trees among [`enumerate_full_binary_trees`], same order.
pub fn enumerate_respectful_trees(n: usize) -> Result<Vec<FullBinaryTree>> {
    Ok(enumerate_full_binary_trees(n)?
        .into_iter()
        .filter(FullBinaryTree::is_respectful)
        .collect())
}

pub fn count_respectful(n: usize) -> Result<usize> {
    Ok(enumerate_respectful_trees(n)?.len())
}

//! States and subsets of states.

use std::fmt;

use crate::error::{Error, Result};
use crate::limits::MAX_STATES;

/// A state of an automaton with states `1..=n`.
///
/// Stored 0-based; `new` and `get` speak the 1-based convention used in every
/// file format and printed report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(u8);

impl StateId {
    /// Build from a 1-based state number.
    ///
    /// Panics if `q` is 0 or above [`MAX_STATES`].
    pub fn new(q: usize) -> Self {
        assert!(
            (1..=MAX_STATES).contains(&q),
            "state number {q} outside 1..={MAX_STATES}"
        );
        StateId((q - 1) as u8)
    }

    pub(crate) fn from_index(index: usize) -> Self {
        debug_assert!(index < MAX_STATES);
        StateId(index as u8)
    }

    /// 1-based state number.
    pub fn get(self) -> usize {
        self.0 as usize + 1
    }

    /// 0-based position.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// A subset of `1..=n`, held as a bit vector in one machine word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    bits: u64,
    n: u8,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_STATES);
        StateSet {
            bits: 0,
            n: n as u8,
        }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_STATES);
        StateSet {
            bits: full_mask(n),
            n: n as u8,
        }
    }

    /// Build from raw bits; bit `i` stands for state `i + 1`.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_STATES {
            return Err(Error::CapExceeded {
                what: "state count",
                limit: MAX_STATES,
                requested: n,
            });
        }
        if bits & !full_mask(n) != 0 {
            let state = 64 - bits.leading_zeros() as usize;
            return Err(Error::StateOutOfRange { state, n });
        }
        Ok(StateSet { bits, n: n as u8 })
    }

    pub(crate) fn from_bits_unchecked(n: usize, bits: u64) -> Self {
        debug_assert!(bits & !full_mask(n) == 0);
        StateSet { bits, n: n as u8 }
    }

    /// Build from 1-based state numbers.
    pub fn from_states<I: IntoIterator<Item = usize>>(n: usize, states: I) -> Result<Self> {
        let mut set = StateSet::empty(n);
        for q in states {
            if q == 0 || q > n {
                return Err(Error::StateOutOfRange { state: q, n });
            }
            set.bits |= 1 << (q - 1);
        }
        Ok(set)
    }

    /// Parse a subset literal such as `1,3,5` (an empty literal is the empty set).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        let text = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(text);
        let mut states = Vec::new();
        let mut column = 1;
        for part in text.split(',') {
            let token = part.trim();
            if token.is_empty() {
                if text.trim().is_empty() {
                    break;
                }
                return Err(Error::parse(1, column, "empty element in subset literal"));
            }
            let q: usize = token
                .parse()
                .map_err(|_| Error::parse(1, column, format!("`{token}` is not a state number")))?;
            states.push(q);
            column += part.len() + 1;
        }
        StateSet::from_states(n, states)
    }

    /// Capacity, i.e. the `n` of the owning automaton.
    pub fn capacity(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.n as usize)
    }

    pub fn contains(&self, q: StateId) -> bool {
        q.index() < self.n as usize && self.bits >> q.index() & 1 == 1
    }

    pub fn insert(&mut self, q: StateId) {
        assert!(q.index() < self.n as usize);
        self.bits |= 1 << q.index();
    }

    pub fn remove(&mut self, q: StateId) {
        self.bits &= !(1 << q.index());
    }

    pub fn complement(&self) -> Self {
        StateSet {
            bits: !self.bits & full_mask(self.n as usize),
            n: self.n,
        }
    }

    pub fn union(&self, other: &StateSet) -> Self {
        StateSet {
            bits: self.bits | other.bits,
            n: self.n.max(other.n),
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(StateId::from_index(i))
        })
    }

    /// Comma-separated literal, the inverse of [`StateSet::parse`].
    pub fn to_literal(&self) -> String {
        self.iter()
            .map(|q| q.get().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Order used when reporting missing subsets: smaller first, then
    /// lexicographic on the sorted member lists.
    pub fn report_order(&self, other: &StateSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_literal())
    }
}

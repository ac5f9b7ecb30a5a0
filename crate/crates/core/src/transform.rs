//! Total self-maps of a finite state set.

use std::fmt;

use crate::error::{Error, Result};
use crate::limits::MAX_STATES;
use crate::state::{StateId, StateSet};

/// A total map `q ↦ q·t` on `1..=n` with its image cached.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    map: Box<[u8]>,
    image: u64,
}

impl Transformation {
    /// Build from 1-based images: `images[q - 1] = q·t`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > MAX_STATES {
            return Err(Error::CapExceeded {
                what: "state count",
                limit: MAX_STATES,
                requested: n,
            });
        }
        let mut map = Vec::with_capacity(n);
        for &q in images {
            if q == 0 || q > n {
                return Err(Error::StateOutOfRange { state: q, n });
            }
            map.push((q - 1) as u8);
        }
        Ok(Self::from_indices(map))
    }

    /// Build from 0-based images. The caller guarantees every entry is `< len`.
    pub(crate) fn from_indices(map: Vec<u8>) -> Self {
        let image = map.iter().fold(0u64, |acc, &q| acc | 1 << q);
        Transformation {
            map: map.into_boxed_slice(),
            image,
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_STATES);
        Self::from_indices((0..n as u8).collect())
    }

    pub fn constant(n: usize, q: StateId) -> Self {
        assert!(q.index() < n);
        Self::from_indices(vec![q.index() as u8; n])
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, q: StateId) -> StateId {
        StateId::from_index(self.map[q.index()] as usize)
    }

    #[inline]
    pub(crate) fn apply_index(&self, q: usize) -> usize {
        self.map[q] as usize
    }

    pub(crate) fn indices(&self) -> &[u8] {
        &self.map
    }

    /// 1-based images, position `q - 1` holding `q·t`.
    pub fn images(&self) -> Vec<usize> {
        self.map.iter().map(|&q| q as usize + 1).collect()
    }

    pub fn image(&self) -> StateSet {
        StateSet::from_bits_unchecked(self.n(), self.image)
    }

    pub fn rank(&self) -> usize {
        self.image.count_ones() as usize
    }

    pub fn defect(&self) -> usize {
        self.n() - self.rank()
    }

    pub fn is_permutation(&self) -> bool {
        self.defect() == 0
    }

    /// True when the map is a single cycle through all `n` states.
    pub fn is_cyclic_permutation(&self) -> bool {
        if !self.is_permutation() {
            return false;
        }
        let n = self.n();
        let mut q = 0usize;
        for step in 1..=n {
            q = self.map[q] as usize;
            if q == 0 {
                return step == n;
            }
        }
        false
    }

    /// `q·compose(u, v) = (q·u)·v`: `u` acts first.
    pub fn compose(&self, v: &Transformation) -> Result<Transformation> {
        if self.n() != v.n() {
            return Err(Error::StateCountMismatch {
                left: self.n(),
                right: v.n(),
            });
        }
        Ok(self.then(v))
    }

    /// Unchecked [`compose`](Self::compose) for internal hot loops.
    #[inline]
    pub(crate) fn then(&self, v: &Transformation) -> Transformation {
        debug_assert_eq!(self.n(), v.n());
        let map: Vec<u8> = self.map.iter().map(|&q| v.map[q as usize]).collect();
        Transformation::from_indices(map)
    }

    /// Pointwise image of a subset.
    pub fn apply_set(&self, p: &StateSet) -> StateSet {
        let bits = p.iter().fold(0u64, |acc, q| acc | 1 << self.map[q.index()]);
        StateSet::from_bits_unchecked(self.n(), bits)
    }

    #[inline]
    pub(crate) fn apply_bits(&self, mut bits: u64) -> u64 {
        let mut out = 0u64;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1 << self.map[i];
        }
        out
    }

    /// Full preimage of a subset.
    pub fn preimage(&self, p: &StateSet) -> StateSet {
        let bits = self
            .map
            .iter()
            .enumerate()
            .filter(|&(_, &q)| p.bits() >> q & 1 == 1)
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        StateSet::from_bits_unchecked(self.n(), bits)
    }

    /// Excluded and duplicate states of a defect-1 map: the unique state
    /// missing from the image and the unique image point hit twice.
    pub fn excl_dupl(&self) -> Result<(StateId, StateId)> {
        if self.defect() != 1 {
            return Err(Error::precondition(format!(
                "excluded/duplicate states need defect 1, transformation has defect {}",
                self.defect()
            )));
        }
        Ok(self.excl_dupl_unchecked())
    }

    pub(crate) fn excl_dupl_unchecked(&self) -> (StateId, StateId) {
        let excl = (!self.image & full(self.n())).trailing_zeros() as usize;
        let mut seen = 0u64;
        let mut dupl = 0;
        for &q in self.map.iter() {
            if seen >> q & 1 == 1 {
                dupl = q as usize;
                break;
            }
            seen |= 1 << q;
        }
        (StateId::from_index(excl), StateId::from_index(dupl))
    }
}

fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Debug for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transformation{self}")
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", q + 1)?;
        }
        write!(f, ")")
    }
}

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::schema::{Group, FEATURE_COUNT};

/// Selection of active feature components.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureMask {
    active: [bool; FEATURE_COUNT],
}

impl core::fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl Default for FeatureMask {
    fn default() -> Self {
        Self::empty()
    }
}

impl FeatureMask {
    pub fn full() -> Self {
        Self {
            active: [true; FEATURE_COUNT],
        }
    }

    pub fn empty() -> Self {
        Self {
            active: [false; FEATURE_COUNT],
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut m = Self::empty();
        for i in indices {
            if i >= FEATURE_COUNT {
                return Err(Error::LengthMismatch {
                    expected: FEATURE_COUNT,
                    actual: i + 1,
                });
            }
            m.active[i] = true;
        }
        Ok(m)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        if bits.len() != FEATURE_COUNT {
            return Err(Error::LengthMismatch {
                expected: FEATURE_COUNT,
                actual: bits.len(),
            });
        }
        let mut m = Self::empty();
        m.active.copy_from_slice(bits);
        Ok(m)
    }

    pub fn group(group: Group) -> Self {
        let mut m = Self::empty();
        for i in group.range() {
            m.active[i] = true;
        }
        m
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.active[i]
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.active[i] = true;
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.active[i] = false;
    }

    pub fn as_bools(&self) -> &[bool; FEATURE_COUNT] {
        &self.active
    }

    pub fn count(&self) -> usize {
        self.active.iter().filter(|b| **b).count()
    }

    pub fn count_in(&self, group: Group) -> usize {
        self.active[group.range()].iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.active.iter().any(|b| *b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.indices().collect()
    }

    pub fn union(&self, other: &FeatureMask) -> FeatureMask {
        let mut m = *self;
        for i in 0..FEATURE_COUNT {
            m.active[i] |= other.active[i];
        }
        m
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyMask)
        } else {
            Ok(())
        }
    }
}

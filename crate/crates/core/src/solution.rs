//! Solution sets for the facility-location and k-means problems.

use std::collections::BTreeSet;
use std::fmt;

/// An ordered set of facility indices (or point indices for k-means).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionSet {
    members: BTreeSet<usize>,
}

impl SolutionSet {
    pub fn new() -> SolutionSet {
        SolutionSet {
            members: BTreeSet::new(),
        }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> SolutionSet {
        SolutionSet {
            members: members.into_iter().collect(),
        }
    }

    /// Members encoded as a bitmask, lowest bit = index 0.
    pub fn from_bits(bits: u64) -> SolutionSet {
        SolutionSet {
            members: (0..64).filter(|i| bits >> i & 1 == 1).collect(),
        }
    }

    /// Uniformly random nonempty subset of `0..universe`.
    pub fn random_nonempty<R: rand::Rng>(universe: usize, rng: &mut R) -> SolutionSet {
        assert!(universe > 0, "cannot draw from an empty universe");
        loop {
            let members: BTreeSet<usize> = (0..universe).filter(|_| rng.gen()).collect();
            if !members.is_empty() {
                return SolutionSet { members };
            }
        }
    }

    /// Uniformly random subset of `0..universe` with exactly `k` members.
    pub fn random_k_subset<R: rand::Rng>(universe: usize, k: usize, rng: &mut R) -> SolutionSet {
        assert!(k <= universe, "k exceeds universe size");
        let mut picked = BTreeSet::new();
        while picked.len() < k {
            picked.insert(rng.gen_range(0..universe));
        }
        SolutionSet { members: picked }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn max_member(&self) -> Option<usize> {
        self.members.iter().next_back().copied()
    }

    /// A copy with `index` added.
    pub fn with(&self, index: usize) -> SolutionSet {
        let mut members = self.members.clone();
        members.insert(index);
        SolutionSet { members }
    }

    /// A copy with `index` removed.
    pub fn without(&self, index: usize) -> SolutionSet {
        let mut members = self.members.clone();
        members.remove(&index);
        SolutionSet { members }
    }

    /// A copy with `out` exchanged for `inn`.
    pub fn swapped(&self, out: usize, inn: usize) -> SolutionSet {
        let mut members = self.members.clone();
        members.remove(&out);
        members.insert(inn);
        SolutionSet { members }
    }
}

impl FromIterator<usize> for SolutionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> SolutionSet {
        SolutionSet::from_members(iter)
    }
}

impl fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

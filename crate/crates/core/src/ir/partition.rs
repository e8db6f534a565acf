//! Partitions of the variable index set `{0..n}`.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition contains an empty block")]
    EmptyBlock,
    #[error("variable {0} occurs in more than one block")]
    Overlap(usize),
    #[error("variable {0} is not covered by any block")]
    Missing(usize),
    #[error("variable {index} is out of range for {n} variables")]
    OutOfRange { index: usize, n: usize },
    #[error("partitions are over different ground sets ({left} vs {right} elements)")]
    GroundSetMismatch { left: usize, right: usize },
}

/// Disjoint sorted blocks covering `0..n`, ordered by their minimum element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &i in block {
                if i >= n {
                    return Err(PartitionError::OutOfRange { index: i, n });
                }
                if owner[i] != usize::MAX {
                    return Err(PartitionError::Overlap(i));
                }
                owner[i] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&b| b == usize::MAX) {
            return Err(PartitionError::Missing(i));
        }
        Ok(Self::from_labels(&owner))
    }

    /// Groups indices with equal labels. Block order follows first
    /// occurrence, which is the minimum element.
    pub fn from_labels<K: Hash + Eq>(labels: &[K]) -> Self {
        let mut index: HashMap<&K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            let b = *index.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| vec![i]).collect(), block_of: (0..n).collect() }
    }

    pub fn one_block(n: usize) -> Self {
        if n == 0 {
            return Partition { blocks: Vec::new(), block_of: Vec::new() };
        }
        Partition { blocks: vec![(0..n).collect()], block_of: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// Minimum element of the block containing `i`.
    pub fn representative(&self, i: usize) -> usize {
        self.blocks[self.block_of[i]][0]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool, PartitionError> {
        if self.len() != coarser.len() {
            return Err(PartitionError::GroundSetMismatch { left: self.len(), right: coarser.len() });
        }
        Ok(self.blocks.iter().all(|block| block.iter().all(|&i| coarser.block_of[i] == coarser.block_of[block[0]])))
    }

    /// Splits every block by `key`: two elements stay together iff they share
    /// a block now and have equal keys.
    pub fn split_by<K: Hash + Eq>(&self, keys: &[K]) -> Partition {
        debug_assert_eq!(keys.len(), self.len());
        let labels: Vec<(usize, &K)> = (0..self.len()).map(|i| (self.block_of[i], &keys[i])).collect();
        Partition::from_labels(&labels)
    }

    /// Meet of two partitions over the same ground set.
    pub fn meet(&self, other: &Partition) -> Result<Partition, PartitionError> {
        if self.len() != other.len() {
            return Err(PartitionError::GroundSetMismatch { left: self.len(), right: other.len() });
        }
        Ok(self.split_by(&other.block_of))
    }

    /// Relabels the ground set: element `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Partition {
        let mut labels = vec![0; self.len()];
        for i in 0..self.len() {
            labels[perm[i]] = self.block_of[i];
        }
        Partition::from_labels(&labels)
    }

    /// Renders blocks as `{a, b}, {c}` using `names`.
    pub fn display<S: AsRef<str>>(&self, names: &[S]) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let members: Vec<&str> = b.iter().map(|&i| names[i].as_ref()).collect();
                format!("{{{}}}", members.join(", "))
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

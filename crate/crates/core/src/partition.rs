//! Set partitions of `{0, …, k−1}` and the admissible family `P(k, k′)` of
//! partitions whose block sizes are all multiples of `k′`.
//!
//! Indices are 0-based here; reports convert to 1-based on output.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};

/// Disjoint nonempty blocks covering `{0, …, k−1}`, kept in canonical
/// order: elements ascending inside a block, blocks by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(k: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; k];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(FrameError::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= k {
                    return Err(FrameError::IndexOutOfRange { index: i, k });
                }
                if seen[i] {
                    return Err(FrameError::InvalidPartition(format!("index {} appears twice", i + 1)));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(FrameError::InvalidPartition(format!("index {} is not covered", missing + 1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { k, blocks })
    }

    /// The one-block partition.
    pub fn whole(k: usize) -> Self {
        Partition { k, blocks: vec![(0..k).collect()] }
    }

    pub fn singletons(k: usize) -> Self {
        Partition { k, blocks: (0..k).map(|i| vec![i]).collect() }
    }

    /// Partition from a block label per index.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot: Vec<Option<usize>> = Vec::new();
        for (i, &label) in labels.iter().enumerate() {
            if label >= slot.len() {
                slot.resize(label + 1, None);
            }
            match slot[label] {
                Some(b) => blocks[b].push(i),
                None => {
                    slot[label] = Some(blocks.len());
                    blocks.push(vec![i]);
                }
            }
        }
        Partition::new(labels.len(), blocks).expect("labels cover every index")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Blocks as 1-based index lists.
    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }

    /// Image under `i ↦ map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.k {
            return Err(FrameError::InvalidArgument(format!(
                "relabelling needs {} entries, got {}",
                self.k,
                map.len()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| map[i]).collect())
            .collect();
        Partition::new(self.k, blocks)
    }

    /// Every block divisible by `k_prime`.
    pub fn is_admissible(&self, k_prime: usize) -> bool {
        k_prime > 0 && self.blocks.iter().all(|b| b.len() % k_prime == 0)
    }
}

/// All partitions of `{0, …, k−1}` whose block sizes are positive multiples
/// of `k_prime`.
///
/// The block holding the smallest unplaced index is chosen first, larger
/// blocks before smaller ones and companions in lexicographic order, so
/// `(4, 2)` yields `{1234}, {12|34}, {13|24}, {14|23}`.
pub fn enumerate_partitions(k: usize, k_prime: usize) -> Result<Vec<Partition>> {
    if k == 0 || k_prime == 0 || !k.is_multiple_of(k_prime) {
        return Err(FrameError::NotDivisible { k, k_prime });
    }
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    let remaining: Vec<usize> = (0..k).collect();
    extend(&remaining, k_prime, &mut blocks, &mut out, k);
    Ok(out)
}

fn extend(
    remaining: &[usize],
    k_prime: usize,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Partition>,
    k: usize,
) {
    let Some((&head, rest)) = remaining.split_first() else {
        out.push(Partition { k, blocks: blocks.clone() });
        return;
    };
    let mut size = remaining.len();
    while size >= k_prime {
        for companions in combinations(rest, size - 1) {
            let mut block = Vec::with_capacity(size);
            block.push(head);
            block.extend_from_slice(&companions);
            let left: Vec<usize> = rest.iter().copied().filter(|i| !companions.contains(i)).collect();
            blocks.push(block);
            extend(&left, k_prime, blocks, out, k);
            blocks.pop();
        }
        size -= k_prime;
    }
}

/// `r`-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if r > n {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

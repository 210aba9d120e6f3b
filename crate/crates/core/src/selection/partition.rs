use crate::{Error, Result};

/// Partition of the index pairs `{(i, j) : i < j < n}` into blocks. Block `k`
/// spans `{H_ij : (i, j) in B_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GivensPartition {
    n: usize,
    blocks: Vec<Vec<(usize, usize)>>,
}

impl GivensPartition {
    /// Validates that every pair `i < j < n` appears in exactly one non-empty
    /// block.
    pub fn new(n: usize, blocks: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPartition(format!("need n >= 2, got {n}")));
        }
        let mut seen = vec![false; n * n];
        let mut count = 0;
        for (k, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {k} is empty")));
            }
            for &(i, j) in block {
                if i >= j || j >= n {
                    return Err(Error::InvalidPartition(format!(
                        "pair ({i}, {j}) must satisfy i < j < {n}"
                    )));
                }
                if seen[i * n + j] {
                    return Err(Error::InvalidPartition(format!("pair ({i}, {j}) repeated")));
                }
                seen[i * n + j] = true;
                count += 1;
            }
        }
        if count != n * (n - 1) / 2 {
            return Err(Error::InvalidPartition(format!(
                "{count} pairs listed, {} required",
                n * (n - 1) / 2
            )));
        }
        Ok(Self { n, blocks })
    }

    /// One pair per block, lexicographic order.
    pub fn singleton(n: usize) -> Self {
        assert!(n >= 2, "singleton partition needs n >= 2");
        let blocks = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| vec![(i, j)]))
            .collect();
        Self { n, blocks }
    }

    /// Perfect matchings from the circle method: `n - 1` blocks of `n / 2`
    /// disjoint pairs for even `n`, `n` blocks of `(n - 1) / 2` pairs for odd
    /// `n`.
    pub fn round_robin(n: usize) -> Self {
        assert!(n >= 2, "round-robin partition needs n >= 2");
        let players = if n % 2 == 0 { n } else { n + 1 };
        let rounds = players - 1;
        let mut blocks = Vec::with_capacity(rounds);
        for r in 0..rounds {
            let mut block = Vec::with_capacity(players / 2);
            let mut push = |a: usize, b: usize| {
                if a < n && b < n {
                    block.push((a.min(b), a.max(b)));
                }
            };
            push(rounds, r);
            for k in 1..players / 2 {
                push((r + k) % rounds, (r + rounds - k) % rounds);
            }
            block.sort_unstable();
            blocks.push(block);
        }
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<(usize, usize)>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether the pairs inside every block have pairwise disjoint indices,
    /// which makes a block's exponential a product of commuting rotations.
    pub fn has_disjoint_indices(&self) -> bool {
        self.blocks.iter().all(|b| pairs_disjoint(self.n, b))
    }
}

pub(crate) fn pairs_disjoint(n: usize, pairs: &[(usize, usize)]) -> bool {
    let mut used = vec![false; n];
    for &(i, j) in pairs {
        if used[i] || used[j] {
            return false;
        }
        used[i] = true;
        used[j] = true;
    }
    true
}

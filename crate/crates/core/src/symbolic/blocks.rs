use std::collections::HashSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::symbolic::{Sft, Word};

/// Higher-block presentation of a subshift: the symbols are admissible `level`-blocks
/// (kept in lexicographic order) and `u -> v` is allowed when the `(level-1)`-suffix of
/// `u` equals the `(level-1)`-prefix of `v`.
#[derive(Clone, Debug)]
pub struct BlockShift {
    base_alphabet: usize,
    level: usize,
    blocks: Vec<u32>,
    sft: Sft,
}

impl BlockShift {
    pub fn higher_block(base: &Sft, level: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("block level must be at least 1".into()));
        }
        Ok(Self::filtered(base, level, |_| true))
    }

    /// Presentation on the admissible `level`-blocks accepted by `keep`.
    pub fn filtered(base: &Sft, level: usize, keep: impl Fn(&[u32]) -> bool) -> Self {
        assert!(level > 0);
        let mut blocks = Vec::new();
        let mut buf = Vec::with_capacity(level);
        for s in 0..base.alphabet_size() as u32 {
            buf.push(s);
            base.extend_words(&mut buf, level, &mut |w| {
                if keep(w) {
                    blocks.extend_from_slice(w);
                }
            });
            buf.pop();
        }
        let count = blocks.len() / level;
        let mut offsets = Vec::with_capacity(count + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let mut key = vec![0u32; level];
        for i in 0..count {
            let b = &blocks[i * level..(i + 1) * level];
            key[..level - 1].copy_from_slice(&b[1..]);
            for &x in base.successors(b[level - 1]) {
                key[level - 1] = x;
                if let Some(j) = search(&blocks, level, &key) {
                    targets.push(j as u32);
                }
            }
            offsets.push(targets.len());
        }
        Self { base_alphabet: base.alphabet_size(), level, blocks, sft: Sft::from_csr(offsets, targets) }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base_alphabet(&self) -> usize {
        self.base_alphabet
    }

    pub fn len(&self) -> usize {
        self.sft.alphabet_size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.blocks[i * self.level..(i + 1) * self.level]
    }

    pub fn block_word(&self, i: usize) -> Word {
        Word::new(self.block(i).to_vec(), self.base_alphabet).expect("blocks use base symbols")
    }

    pub fn index_of(&self, block: &[u32]) -> Option<usize> {
        if block.len() != self.level {
            return None;
        }
        search(&self.blocks, self.level, block)
    }

    /// Indices of all blocks starting with `prefix` (`prefix.len() <= level`).
    pub fn prefix_range(&self, prefix: &[u32]) -> Range<usize> {
        let p = prefix.len().min(self.level);
        let prefix = &prefix[..p];
        let n = self.len();
        let lo = partition_point(n, |i| &self.block(i)[..p] < prefix);
        let hi = partition_point(n, |i| &self.block(i)[..p] <= prefix);
        lo..hi
    }
}

fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) { lo = mid + 1 } else { hi = mid }
    }
    lo
}

fn search(blocks: &[u32], level: usize, key: &[u32]) -> Option<usize> {
    let n = blocks.len() / level;
    let i = partition_point(n, |i| &blocks[i * level..(i + 1) * level] < key);
    (i < n && &blocks[i * level..(i + 1) * level] == key).then_some(i)
}

/// Validates holes and returns their common length (1 if there are none) and set.
pub(crate) fn hole_set(sft: &Sft, holes: &[Word]) -> Result<(usize, HashSet<Vec<u32>>)> {
    let n = holes.first().map_or(1, Word::len);
    if n == 0 {
        return Err(Error::InvalidArgument("hole words must be nonempty".into()));
    }
    let mut set = HashSet::new();
    for h in holes {
        if h.len() != n {
            return Err(Error::InvalidArgument("hole words must share a common length".into()));
        }
        sft.check_word(h)?;
        set.insert(h.symbols().to_vec());
    }
    Ok((n, set))
}

/// Survivor shift of the open system with holes `holes` (all of one length `n`),
/// presented on `level`-blocks (`level >= n`): a block is removed when its `n`-prefix
/// is a hole. May be empty or contain transient symbols.
pub fn survivor_shift(sft: &Sft, holes: &[Word], level: usize) -> Result<BlockShift> {
    let (n, set) = hole_set(sft, holes)?;
    if level < n {
        return Err(Error::InvalidArgument(format!("block level {level} is below hole length {n}")));
    }
    Ok(BlockShift::filtered(sft, level, |b| !set.contains(&b[..n])))
}

/// Removes hole cylinders of common length `n`, recoding on `n`-blocks. The result's
/// alphabet is the set of surviving `n`-cylinders; its sequences are exactly those
/// that never enter a hole.
pub fn remove_hole(sft: &Sft, holes: &[Word]) -> Result<BlockShift> {
    let (n, _) = hole_set(sft, holes)?;
    let survivor = survivor_shift(sft, holes, n)?;
    if !survivor.sft().has_cycle() {
        return Err(Error::EmptySurvivor);
    }
    Ok(survivor)
}

use std::collections::HashMap;

use super::{Sft, Word};
use crate::{Error, Result};

/// Higher-block presentation of an [`Sft`]: new symbols are admissible
/// `block`-words, and `u -> v` is allowed when `u` and `v` overlap in
/// `block - 1` symbols.
#[derive(Clone, Debug)]
pub struct BlockRecoding {
    pub sft: Sft,
    /// New symbol index -> original `block`-word.
    pub dictionary: Vec<Word>,
    pub block: usize,
    index: HashMap<Vec<usize>, usize>,
}

pub fn recode_higher_block(sft: &Sft, block: usize) -> Result<BlockRecoding> {
    if block == 0 {
        return Err(Error::Range("block length must be at least 1".into()));
    }
    let dictionary: Vec<Word> = sft.words(block);
    let index: HashMap<Vec<usize>, usize> = dictionary
        .iter()
        .enumerate()
        .map(|(i, w)| (w.0.clone(), i))
        .collect();
    let n = dictionary.len();
    let mut matrix = vec![vec![0u8; n]; n];
    for (u, word) in dictionary.iter().enumerate() {
        let last = *word.0.last().expect("block >= 1");
        for s in sft.successors(last) {
            let mut next: Vec<usize> = word.0[1..].to_vec();
            next.push(s);
            if let Some(&v) = index.get(&next) {
                matrix[u][v] = 1;
            }
        }
    }
    Ok(BlockRecoding {
        sft: Sft::from_matrix(matrix)?,
        dictionary,
        block,
        index,
    })
}

impl BlockRecoding {
    pub fn symbol_of(&self, block_word: &[usize]) -> Option<usize> {
        self.index.get(block_word).copied()
    }

    /// Sliding-block image of an original word: length `len - block + 1`.
    pub fn encode(&self, word: &[usize]) -> Result<Vec<usize>> {
        if word.len() < self.block {
            return Ok(Vec::new());
        }
        word.windows(self.block)
            .map(|w| {
                self.symbol_of(w).ok_or_else(|| {
                    Error::Domain(format!("block {} is not admissible", Word::from(w)))
                })
            })
            .collect()
    }

    /// Inverse of [`encode`](Self::encode) on admissible block words.
    pub fn decode(&self, block_word: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(block_word.len() + self.block - 1);
        if let Some((&first, rest)) = block_word.split_first() {
            out.extend_from_slice(&self.dictionary[first].0);
            for &b in rest {
                out.push(*self.dictionary[b].0.last().expect("nonempty block"));
            }
        }
        out
    }
}

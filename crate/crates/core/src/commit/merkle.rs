use std::fmt;

use rayon::prelude::*;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

const LEAF_TAG: u8 = 0x00;
const NODE_TAG: u8 = 0x01;

/// Below this many nodes a level is hashed on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MerkleError {
    #[error("cannot build a Merkle tree without leaves")]
    Empty,
    #[error("leaf index {index} out of range for {leaf_count} leaves")]
    IndexOutOfRange { index: usize, leaf_count: usize },
    #[error("truncated Merkle path encoding")]
    Truncated,
}

/// A 32-byte SHA-256 digest.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn finish(hasher: Sha256) -> Digest {
    Digest(hasher.finalize().into())
}

pub(crate) fn hash_leaf(payload: &[u8]) -> Digest {
    let mut h = Sha256::new();
    h.update([LEAF_TAG]);
    h.update(payload);
    finish(h)
}

pub(crate) fn hash_node(left: &Digest, right: &Digest) -> Digest {
    let mut h = Sha256::new();
    h.update([NODE_TAG]);
    h.update(left.0);
    h.update(right.0);
    finish(h)
}

/// Binary SHA-256 Merkle tree with leaves padded to a power of two.
///
/// Leaf digests are `H(0x00 || payload)`, interior nodes `H(0x01 || l || r)`
/// and padding leaves hash the empty payload. A single leaf is padded to two
/// so every path has at least one sibling.
#[derive(Debug, Clone)]
pub struct MerkleTree {
    data: Vec<u8>,
    offsets: Vec<usize>,
    levels: Vec<Vec<Digest>>,
}

impl MerkleTree {
    pub fn build<I, B>(leaves: I) -> Result<Self, MerkleError>
    where
        I: IntoIterator<Item = B>,
        B: AsRef<[u8]>,
    {
        let mut data = Vec::new();
        let mut offsets = vec![0];
        for leaf in leaves {
            data.extend_from_slice(leaf.as_ref());
            offsets.push(data.len());
        }
        Self::from_flat(data, offsets)
    }

    /// Builds from equally sized leaves packed back to back.
    pub fn from_chunks(data: Vec<u8>, leaf_len: usize) -> Result<Self, MerkleError> {
        if leaf_len == 0 || data.is_empty() || data.len() % leaf_len != 0 {
            return Err(MerkleError::Empty);
        }
        let offsets = (0..=data.len() / leaf_len).map(|k| k * leaf_len).collect();
        Self::from_flat(data, offsets)
    }

    fn from_flat(data: Vec<u8>, offsets: Vec<usize>) -> Result<Self, MerkleError> {
        let count = offsets.len() - 1;
        if count == 0 {
            return Err(MerkleError::Empty);
        }
        let width = count.next_power_of_two().max(2);
        let leaf_at = |k: usize| &data[offsets[k]..offsets[k + 1]];
        let mut base: Vec<Digest> = if count >= PARALLEL_THRESHOLD {
            (0..count).into_par_iter().map(|k| hash_leaf(leaf_at(k))).collect()
        } else {
            (0..count).map(|k| hash_leaf(leaf_at(k))).collect()
        };
        base.resize(width, hash_leaf(&[]));

        let mut levels = vec![base];
        while levels.last().map_or(0, Vec::len) > 1 {
            let prev = levels.last().expect("non-empty");
            let next: Vec<Digest> = if prev.len() >= PARALLEL_THRESHOLD {
                prev.par_chunks(2).map(|p| hash_node(&p[0], &p[1])).collect()
            } else {
                prev.chunks(2).map(|p| hash_node(&p[0], &p[1])).collect()
            };
            levels.push(next);
        }
        Ok(Self { data, offsets, levels })
    }

    pub fn root(&self) -> Digest {
        self.levels.last().expect("tree has a root")[0]
    }

    /// Number of real (unpadded) leaves.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Leaf count after padding.
    pub fn width(&self) -> usize {
        self.levels[0].len()
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn leaf(&self, index: usize) -> &[u8] {
        &self.data[self.offsets[index]..self.offsets[index + 1]]
    }

    pub fn open(&self, index: usize) -> Result<MerklePath, MerkleError> {
        if index >= self.len() {
            return Err(MerkleError::IndexOutOfRange {
                index,
                leaf_count: self.len(),
            });
        }
        let mut siblings = Vec::with_capacity(self.depth());
        let mut k = index;
        for level in &self.levels[..self.depth()] {
            siblings.push(level[k ^ 1]);
            k >>= 1;
        }
        Ok(MerklePath {
            leaf_index: index,
            payload: self.leaf(index).to_vec(),
            siblings,
        })
    }
}

/// An authentication path for one leaf, siblings ordered bottom-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerklePath {
    pub leaf_index: usize,
    pub payload: Vec<u8>,
    pub siblings: Vec<Digest>,
}

impl MerklePath {
    pub fn verify(&self, root: &Digest) -> bool {
        if self.siblings.len() >= usize::BITS as usize || self.leaf_index >> self.siblings.len() != 0 {
            return false;
        }
        let mut acc = hash_leaf(&self.payload);
        let mut k = self.leaf_index;
        for sib in &self.siblings {
            acc = if k & 1 == 0 {
                hash_node(&acc, sib)
            } else {
                hash_node(sib, &acc)
            };
            k >>= 1;
        }
        acc == *root
    }

    /// `u32 index, u32 payload_len, payload, siblings` (count implied by context).
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.leaf_index as u32).to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.payload);
        for s in &self.siblings {
            out.extend_from_slice(&s.0);
        }
    }

    pub fn read_from(input: &mut &[u8], depth: usize) -> Result<Self, MerkleError> {
        fn take<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], MerkleError> {
            if input.len() < n {
                return Err(MerkleError::Truncated);
            }
            let (head, tail) = input.split_at(n);
            *input = tail;
            Ok(head)
        }
        let index = u32::from_le_bytes(take(input, 4)?.try_into().expect("4 bytes"));
        let len = u32::from_le_bytes(take(input, 4)?.try_into().expect("4 bytes")) as usize;
        let payload = take(input, len)?.to_vec();
        let siblings = (0..depth)
            .map(|_| take(input, 32).map(|b| Digest(b.try_into().expect("32 bytes"))))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            leaf_index: index as usize,
            payload,
            siblings,
        })
    }
}

pub fn merkle_build<B: AsRef<[u8]>>(leaves: &[B]) -> Result<MerkleTree, MerkleError> {
    MerkleTree::build(leaves.iter().map(AsRef::as_ref))
}

pub fn merkle_open(tree: &MerkleTree, index: usize) -> Result<MerklePath, MerkleError> {
    tree.open(index)
}

pub fn merkle_verify(root: &Digest, path: &MerklePath) -> bool {
    path.verify(root)
}

use sha2::{Digest as _, Sha256};

use crate::field::{FieldElement, MODULUS};

/// How 64-bit hash outputs are mapped onto the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChallengeMode {
    /// Reduce modulo `p`; the induced bias is at most `2^-32`.
    #[default]
    Reduce,
    /// Redraw until the output is already canonical.
    Reject,
}

/// Fiat–Shamir transcript over a running SHA-256 state.
///
/// Every absorbed message is framed as `len(label) || label || len(data) ||
/// data` with little-endian `u64` lengths. Challenge `k` is the first eight
/// bytes of `SHA-256(state || "challenge" || k)`.
#[derive(Clone)]
pub struct Transcript {
    state: Sha256,
    counter: u64,
    mode: ChallengeMode,
}

impl Transcript {
    pub fn new(protocol: &[u8]) -> Self {
        Self::with_mode(protocol, ChallengeMode::Reduce)
    }

    pub fn with_mode(protocol: &[u8], mode: ChallengeMode) -> Self {
        let mut t = Self {
            state: Sha256::new(),
            counter: 0,
            mode,
        };
        t.absorb(b"protocol", protocol);
        t
    }

    pub fn absorb(&mut self, label: &[u8], data: &[u8]) {
        self.state.update((label.len() as u64).to_le_bytes());
        self.state.update(label);
        self.state.update((data.len() as u64).to_le_bytes());
        self.state.update(data);
    }

    pub fn absorb_field(&mut self, label: &[u8], values: &[FieldElement]) {
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        self.absorb(label, &bytes);
    }

    fn next_u64(&mut self) -> u64 {
        let mut h = self.state.clone();
        h.update(b"challenge");
        h.update(self.counter.to_le_bytes());
        self.counter += 1;
        let digest: [u8; 32] = h.finalize().into();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    pub fn challenge_field(&mut self) -> FieldElement {
        match self.mode {
            ChallengeMode::Reduce => FieldElement::new(self.next_u64()),
            ChallengeMode::Reject => loop {
                let v = self.next_u64();
                if v < MODULUS {
                    return FieldElement::new(v);
                }
            },
        }
    }

    /// Draws `count` distinct indices in `[0, bound)`, redrawing duplicates.
    ///
    /// Panics if `count > bound`.
    pub fn challenge_indices(&mut self, count: usize, bound: usize) -> Vec<usize> {
        assert!(count <= bound, "cannot draw {count} distinct indices below {bound}");
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let idx = (self.next_u64() % bound as u64) as usize;
            if !out.contains(&idx) {
                out.push(idx);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(data: &[u8]) -> Transcript {
        let mut t = Transcript::new(b"geostark-test");
        t.absorb(b"data", data);
        t
    }

    #[test]
    fn deterministic_streams() {
        let mut a = seeded(&[1, 2, 3]);
        let mut b = seeded(&[1, 2, 3]);
        for _ in 0..10 {
            assert_eq!(a.challenge_field(), b.challenge_field());
        }
    }

    #[test]
    fn golden_vectors() {
        let mut t = seeded(&[1, 2, 3]);
        let got: Vec<u64> = (0..3).map(|_| t.challenge_field().value()).collect();
        assert_eq!(
            got,
            [4413935755249301830, 15752418840230357355, 1226141118942813723]
        );
        let mut t = seeded(&[1, 2, 4]);
        let got: Vec<u64> = (0..3).map(|_| t.challenge_field().value()).collect();
        assert_eq!(got, [2035217699305097833, 8834310529860754269, 807614632468907212]);
    }

    #[test]
    fn indices_are_distinct_and_bounded() {
        let mut t = seeded(b"idx");
        let idx = t.challenge_indices(4, 16);
        assert_eq!(idx.len(), 4);
        assert!(idx.iter().all(|&i| i < 16));
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        let all = t.challenge_indices(16, 16);
        let mut all_sorted = all.clone();
        all_sorted.sort_unstable();
        assert_eq!(all_sorted, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn rejection_mode_is_canonical() {
        let mut t = Transcript::with_mode(b"geostark-test", ChallengeMode::Reject);
        t.absorb(b"data", &[1, 2, 3]);
        // the first reduced draw is already canonical, so both modes agree on it
        assert_eq!(t.challenge_field().value(), 4413935755249301830);
    }
}

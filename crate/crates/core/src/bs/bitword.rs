//! The binary family of translation words: for a bit vector
//! `α = (α₀, …, α_m)` the word `Π_i aⁱ b^{αᵢ} a⁻ⁱ`, which represents the
//! translation by `Σ_{αᵢ=1} nⁱ`.
//!
//! These words are the test family for length-expansion arguments: their
//! normal-form data (top exponent, bit count, and the gap profile of the
//! set bits) drives the per-factor bookkeeping.

use num_traits::Zero;
use serde::Serialize;

use crate::Integer;

use super::element::BsElement;
use super::word::{Letter, Word};

/// A bit vector `α₀, …, α_m` (index = power of the base carried by the bit).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BitWord {
    bits: Vec<bool>,
}

/// Shape data of a nonzero bit word, read off its set bits
/// `i₁ < i₂ < … < i_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitWordShape {
    /// Top set index `i_r`: the scaling depth the word reaches.
    pub top: u32,
    /// Number of set bits `r`.
    pub ones: u32,
    /// Gaps `[i_r − i_{r−1}, …, i₂ − i₁, i₁]`; they sum to `top`.
    pub gaps: Vec<u32>,
}

impl BitWord {
    pub fn new(bits: Vec<bool>) -> Self {
        BitWord { bits }
    }

    /// The bit word whose bits are the binary digits of `index`
    /// (LSB = α₀), padded to `m + 1` positions.
    pub fn from_index(m: usize, index: u64) -> Self {
        let bits = (0..=m).map(|i| (index >> i) & 1 == 1).collect();
        BitWord { bits }
    }

    /// All `2^{m+1}` bit words with positions `0..=m`.
    pub fn all_of_degree(m: usize) -> impl Iterator<Item = BitWord> {
        (0u64..(1u64 << (m + 1))).map(move |i| BitWord::from_index(m, i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i).copied().unwrap_or(false)
    }

    /// Highest position carried (length of the vector minus one).
    pub fn degree(&self) -> usize {
        self.bits.len().saturating_sub(1)
    }

    pub fn ones(&self) -> u32 {
        self.bits.iter().filter(|b| **b).count() as u32
    }

    pub fn set_positions(&self) -> Vec<u32> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i as u32))
            .collect()
    }

    /// The translation amount `Σ_{αᵢ=1} nⁱ`.
    pub fn weight(&self, n: u32) -> Integer {
        let base = Integer::from(n);
        let mut total = Integer::zero();
        for i in self.set_positions() {
            total += base.pow(i);
        }
        total
    }

    /// The group element: the translation `b^{weight}`.
    pub fn weight_element(&self, n: u32) -> BsElement {
        BsElement::new(n, 0, super::element::NAdic::from_integer(self.weight(n)))
            .expect("n ≥ 2 enforced by caller")
    }

    /// Literal word `Π aⁱ b a⁻ⁱ` over the set bits, highest bit first;
    /// the `a`-runs of adjacent factors are kept literal (not cancelled).
    pub fn letters(&self) -> Word {
        let mut w = Word::empty();
        for i in self.set_positions().into_iter().rev() {
            w = w
                .concat(&Word::power(Letter::A, i as i64))
                .concat(&Word::power(Letter::B, 1))
                .concat(&Word::power(Letter::A, -(i as i64)));
        }
        w
    }

    /// Shape of a nonzero word; `None` when no bit is set.
    pub fn shape(&self) -> Option<BitWordShape> {
        let set = self.set_positions();
        let (first, last) = (set.first()?, set.last()?);
        let mut gaps: Vec<u32> = set.windows(2).rev().map(|w| w[1] - w[0]).collect();
        gaps.push(*first);
        Some(BitWordShape {
            top: *last,
            ones: set.len() as u32,
            gaps,
        })
    }
}

impl std::fmt::Display for BitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.bits {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_sums_powers_of_the_base() {
        let w = BitWord::new(vec![true, false, true]);
        assert_eq!(w.weight(2), Integer::from(5));
        assert_eq!(w.weight(3), Integer::from(10));
        assert_eq!(BitWord::new(vec![false; 4]).weight(2), Integer::from(0));
    }

    #[test]
    fn literal_word_realizes_the_weight_translation() {
        for n in [2u32, 3] {
            for w in BitWord::all_of_degree(5) {
                let via_word = BsElement::from_word(n, &w.letters()).unwrap();
                assert_eq!(via_word, w.weight_element(n), "bits {w}");
            }
        }
    }

    #[test]
    fn shape_gaps_telescope_to_the_top() {
        let w = BitWord::new(vec![false, true, false, true, true]);
        let s = w.shape().unwrap();
        assert_eq!(s.top, 4);
        assert_eq!(s.ones, 3);
        assert_eq!(s.gaps, vec![1, 2, 1]);
        assert_eq!(s.gaps.iter().sum::<u32>(), s.top);
        assert!(BitWord::new(vec![false]).shape().is_none());
    }

    #[test]
    fn indexing_covers_the_family_without_repeats() {
        let all: Vec<BitWord> = BitWord::all_of_degree(3).collect();
        assert_eq!(all.len(), 16);
        let weights: std::collections::BTreeSet<Integer> =
            all.iter().map(|w| w.weight(2)).collect();
        assert_eq!(weights.len(), 16, "binary weights are distinct for n = 2");
    }

    #[test]
    fn display_shows_bits_in_position_order() {
        assert_eq!(BitWord::from_index(3, 0b1010).to_string(), "0101");
    }
}

//! Words in the two generators `a`, `b` and their inverses.
//!
//! Letters are written `a`, `A`, `b`, `B`, where the capital is the inverse.
//! Words act with the leftmost letter applied last (outermost), matching
//! function composition: the word `ab` is the map `a ∘ b`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

#[derive(Debug, Error)]
pub enum WordError {
    #[error("invalid letter {0:?}: words use only a, A, b, B")]
    InvalidLetter(char),
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Result<Letter, WordError> {
        match c {
            'a' => Ok(Letter::A),
            'A' => Ok(Letter::AInv),
            'b' => Ok(Letter::B),
            'B' => Ok(Letter::BInv),
            other => Err(WordError::InvalidLetter(other)),
        }
    }
}

/// A word over `{a, A, b, B}`; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Formal inverse: reversed letters, each inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `letter^k` (negative `k` uses the inverse letter).
    pub fn power(letter: Letter, k: i64) -> Word {
        let l = if k < 0 { letter.inverse() } else { letter };
        Word(std::iter::repeat(l).take(k.unsigned_abs() as usize).collect())
    }

    /// Free reduction: cancels adjacent inverse pairs until none remain.
    /// (Only free cancellation — no group relation is applied.)
    pub fn reduce(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["", "a", "abAB", "aabBA", "BBBB"] {
            let w: Word = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("abc".parse::<Word>().is_err());
        let spaced: Word = "a b A".parse().unwrap();
        assert_eq!(spaced.to_string(), "abA");
    }

    #[test]
    fn free_reduction_cancels_inverse_pairs() {
        let w: Word = "abBAba".parse().unwrap();
        assert_eq!(w.reduce().to_string(), "ba");
        let ww: Word = "aAbB".parse().unwrap();
        assert!(ww.reduce().is_empty());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let w: Word = "abA".parse().unwrap();
        assert_eq!(w.inverse().to_string(), "aBA");
        assert!(w.concat(&w.inverse()).reduce().is_empty());
    }

    #[test]
    fn powers_expand_to_runs() {
        assert_eq!(Word::power(Letter::A, 3).to_string(), "aaa");
        assert_eq!(Word::power(Letter::A, -2).to_string(), "AA");
        assert_eq!(Word::power(Letter::B, 0).to_string(), "");
    }
}

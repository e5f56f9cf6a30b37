//! Finite binary words and their block decomposition `0^a0 1 0^a1 1 ... 1 0^am`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word {
    letters: Vec<u8>,
}

/// Run lengths of zeros between consecutive ones.
///
/// For `0^a0 1 0^a1 1 ... 1 0^am`, `zeros` is `[a0, a1, ..., am]` and has
/// `ones + 1` entries. A word without any 1 has a single block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub zeros: Vec<usize>,
}

impl Blocks {
    pub fn ones(&self) -> usize {
        self.zeros.len() - 1
    }

    pub fn leading(&self) -> usize {
        self.zeros[0]
    }

    pub fn trailing(&self) -> usize {
        *self.zeros.last().unwrap()
    }

    pub fn inner(&self) -> &[usize] {
        if self.zeros.len() <= 2 {
            &[]
        } else {
            &self.zeros[1..self.zeros.len() - 1]
        }
    }

    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for (i, &z) in self.zeros.iter().enumerate() {
            if i > 0 {
                letters.push(1);
            }
            letters.extend(std::iter::repeat_n(0, z));
        }
        Word { letters }
    }
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self, Error> {
        if let Some(&bad) = letters.iter().find(|&&l| l > 1) {
            return Err(Error::Parse(format!("letter {bad} is not binary")));
        }
        Ok(Word { letters })
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn zeros(n: usize) -> Self {
        Word { letters: vec![0; n] }
    }

    /// The pattern `1 0^(k-1)` of length `k`.
    pub fn one_then_zeros(k: usize) -> Self {
        assert!(k >= 1, "pattern 10^(k-1) needs k >= 1");
        let mut letters = vec![0; k];
        letters[0] = 1;
        Word { letters }
    }

    /// Word whose letters are the low `len` bits of `bits`, most significant first.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        let letters = (0..len).map(|i| ((bits >> (len - 1 - i)) & 1) as u8).collect();
        Word { letters }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn contains_one(&self) -> bool {
        self.letters.contains(&1)
    }

    pub fn concat(parts: &[&Word]) -> Word {
        let mut letters = Vec::with_capacity(parts.iter().map(|w| w.len()).sum());
        for p in parts {
            letters.extend_from_slice(&p.letters);
        }
        Word { letters }
    }

    pub fn blocks(&self) -> Blocks {
        let mut zeros = vec![0usize];
        for &l in &self.letters {
            if l == 1 {
                zeros.push(0);
            } else {
                *zeros.last_mut().unwrap() += 1;
            }
        }
        Blocks { zeros }
    }

    /// Number of trailing zeros.
    pub fn trailing_zeros(&self) -> usize {
        self.letters.iter().rev().take_while(|&&l| l == 0).count()
    }

    pub fn leading_zeros(&self) -> usize {
        self.letters.iter().take_while(|&&l| l == 0).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            f.write_str(if l == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!("invalid letter {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word { letters })
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

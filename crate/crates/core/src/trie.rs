//! Suffix tries over one growing stream.
//!
//! The trie `T_n` stores the suffixes `U_i U_{i+1} ...`, `1 <= i <= n`, of a
//! single stream in its leaves. A node at depth `j` is encoded by a word of
//! length `j`; it is internal when at least two stored suffixes start with
//! that word. The root (depth 0) always counts as internal.
//!
//! `H_n` is the largest depth of an internal node and `l_n` the largest `j`
//! with all `2^j` nodes of depth `j` internal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampler::LetterStream;
use crate::word::Word;

/// Default cap on letters pulled into one trie's buffer.
pub const DEFAULT_LETTER_CAP: u64 = 100_000_000;

const EMPTY: u32 = 0;
const LEAF: u32 = 1 << 31;

/// Where a trie gets its letters.
pub trait LetterSource {
    /// The next letter, or `None` when a finite source is exhausted.
    fn next_letter(&mut self) -> Option<u8>;
}

impl LetterSource for LetterStream {
    fn next_letter(&mut self) -> Option<u8> {
        Some(LetterStream::next_letter(self))
    }
}

/// A finite, fixed word.
#[derive(Clone, Debug)]
pub struct FixedLetters {
    letters: Vec<u8>,
    pos: usize,
}

impl FixedLetters {
    pub fn new(w: &Word) -> Self {
        FixedLetters { letters: w.letters().to_vec(), pos: 0 }
    }
}

impl LetterSource for FixedLetters {
    fn next_letter(&mut self) -> Option<u8> {
        let x = self.letters.get(self.pos).copied();
        self.pos += 1;
        x
    }
}

/// What one insertion did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InsertReport {
    /// Index of the inserted suffix (1-based).
    pub suffix: u64,
    pub leaf_depth: usize,
    /// Letters in the buffer after the insertion.
    pub letters: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrieStats {
    pub n: u64,
    pub height: usize,
    pub saturation: usize,
    /// Internal nodes per depth, from the root.
    pub profile: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct SuffixTrie<S> {
    source: S,
    buf: Vec<u8>,
    letter_cap: u64,
    /// `children[v][x]`: `EMPTY`, `LEAF | suffix` or an internal node id.
    children: Vec<[u32; 2]>,
    n: u64,
    height: usize,
    saturation: usize,
    counts: Vec<u64>,
}

impl<S: LetterSource> SuffixTrie<S> {
    pub fn new(source: S) -> Self {
        Self::with_cap(source, DEFAULT_LETTER_CAP)
    }

    pub fn with_cap(source: S, letter_cap: u64) -> Self {
        SuffixTrie {
            source,
            buf: Vec::new(),
            letter_cap,
            children: vec![[EMPTY; 2]],
            n: 0,
            height: 0,
            saturation: 0,
            counts: vec![1],
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn saturation(&self) -> usize {
        self.saturation
    }

    /// Letters pulled from the source so far.
    pub fn letters(&self) -> &[u8] {
        &self.buf
    }

    pub fn internal_nodes(&self) -> usize {
        self.children.len()
    }

    fn letter(&mut self, idx: usize) -> Result<u8> {
        while self.buf.len() <= idx {
            if self.buf.len() as u64 >= self.letter_cap {
                return Err(Error::LetterBudget { cap: self.letter_cap });
            }
            match self.source.next_letter() {
                Some(x) => self.buf.push(x),
                None => return Err(Error::Argument(format!("letter source exhausted after {} letters", self.buf.len()))),
            }
        }
        Ok(self.buf[idx])
    }

    fn new_internal(&mut self, depth: usize) -> u32 {
        let id = self.children.len() as u32;
        assert!(id < LEAF, "too many trie nodes");
        self.children.push([EMPTY; 2]);
        if self.counts.len() <= depth {
            self.counts.resize(depth + 1, 0);
        }
        self.counts[depth] += 1;
        self.height = self.height.max(depth);
        id
    }

    /// Inserts suffix `n + 1`.
    pub fn insert_next_suffix(&mut self) -> Result<InsertReport> {
        let i = self.n as usize; // 0-based start of the new suffix
        if self.n + 1 >= LEAF as u64 {
            return Err(Error::Argument("suffix index out of range".into()));
        }
        let (mut node, mut d) = (0usize, 0usize);
        let leaf_depth = loop {
            let x = self.letter(i + d)? as usize;
            let child = self.children[node][x];
            if child == EMPTY {
                self.children[node][x] = LEAF | (i as u32 + 1);
                break d + 1;
            }
            if child & LEAF == 0 {
                node = child as usize;
                d += 1;
                continue;
            }
            // Split a leaf: grow internal nodes along the common continuation.
            let j = (child & !LEAF) as usize - 1;
            let (mut parent, mut px, mut depth) = (node, x, d + 1);
            loop {
                let id = self.new_internal(depth);
                self.children[parent][px] = id;
                let a = self.letter(i + depth)? as usize;
                let b = self.letter(j + depth)? as usize;
                if a != b {
                    self.children[id as usize][a] = LEAF | (i as u32 + 1);
                    self.children[id as usize][b] = LEAF | (j as u32 + 1);
                    break;
                }
                parent = id as usize;
                px = a;
                depth += 1;
            }
            break depth + 1;
        };
        self.n += 1;
        while self.saturation + 1 < 63 && self.counts.get(self.saturation + 1) == Some(&(1u64 << (self.saturation + 1))) {
            self.saturation += 1;
        }
        Ok(InsertReport { suffix: self.n, leaf_depth, letters: self.buf.len() as u64 })
    }

    /// Inserts suffixes until `n` are stored.
    pub fn grow_to(&mut self, n: u64) -> Result<()> {
        while self.n < n {
            self.insert_next_suffix()?;
        }
        Ok(())
    }

    /// Incrementally maintained statistics.
    pub fn stats(&self) -> TrieStats {
        TrieStats { n: self.n, height: self.height, saturation: self.saturation, profile: self.counts.clone() }
    }

    /// The same statistics from a full traversal.
    pub fn recompute_stats(&self) -> TrieStats {
        let mut profile = Vec::new();
        let mut stack = vec![(0u32, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            if profile.len() <= depth {
                profile.resize(depth + 1, 0);
            }
            profile[depth] += 1;
            for &c in &self.children[v as usize] {
                if c != EMPTY && c & LEAF == 0 {
                    stack.push((c, depth + 1));
                }
            }
        }
        let height = profile.len() - 1;
        let saturation = (0..profile.len().min(63)).take_while(|&j| profile[j] == 1u64 << j).last().unwrap_or(0);
        TrieStats { n: self.n, height, saturation, profile }
    }

    /// Depth of the deepest internal node on the branch of `s`, where
    /// `s(j)` is the letter at depth `j + 1`.
    pub fn probe_x(&self, s: impl Fn(usize) -> u8) -> usize {
        let (mut v, mut d) = (0usize, 0usize);
        loop {
            let c = self.children[v][s(d) as usize];
            if c == EMPTY || c & LEAF != 0 {
                return d;
            }
            v = c as usize;
            d += 1;
        }
    }

    /// Every stored suffix with the word encoding its leaf.
    pub fn leaves(&self) -> Vec<(u64, Word)> {
        let mut out = Vec::new();
        let mut stack = vec![(0u32, Vec::new())];
        while let Some((v, path)) = stack.pop() {
            for x in 0..2u8 {
                let c = self.children[v as usize][x as usize];
                if c == EMPTY {
                    continue;
                }
                let mut p = path.clone();
                p.push(x);
                if c & LEAF != 0 {
                    out.push(((c & !LEAF) as u64, Word::new(p).expect("binary letters")));
                } else {
                    stack.push((c, p));
                }
            }
        }
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Words encoding the internal nodes, root first, in breadth-first order.
    pub fn internal_words(&self) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut queue = std::collections::VecDeque::from([(0u32, Vec::new())]);
        while let Some((v, path)) = queue.pop_front() {
            for x in 0..2u8 {
                let c = self.children[v as usize][x as usize];
                if c != EMPTY && c & LEAF == 0 {
                    let mut p: Vec<u8> = path.clone();
                    p.push(x);
                    out.push(Word::new(p.clone()).expect("binary letters"));
                    queue.push_back((c, p));
                }
            }
        }
        out
    }

    /// Depth of the shallowest leaf.
    pub fn shortest_branch(&self) -> Option<usize> {
        self.leaves().iter().map(|(_, w)| w.len()).min()
    }
}

/// A right-infinite direction `s`: a finite prefix followed by zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Direction {
    prefix: Vec<u8>,
}

impl Direction {
    /// `1 0 0 0 ...`
    pub fn one_then_zeros() -> Self {
        Direction { prefix: vec![1] }
    }

    /// `prefix 0 0 0 ...`
    pub fn prefix_then_zeros(prefix: &Word) -> Self {
        Direction { prefix: prefix.letters().to_vec() }
    }

    pub fn letter(&self, j: usize) -> u8 {
        self.prefix.get(j).copied().unwrap_or(0)
    }

    /// `s^(k)`, the first `k` letters.
    pub fn head(&self, k: usize) -> Word {
        Word::new((0..k).map(|j| self.letter(j)).collect()).expect("binary letters")
    }
}

/// Records `X_n(s)` along the growth of a trie and the first-passage
/// times `T_k(s) = min { n : X_n(s) >= k }`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BranchProbe {
    /// `x_by_n[n - 1] = X_n(s)`.
    pub x_by_n: Vec<usize>,
    /// `t_by_k[k - 1] = T_k(s)` for every `k` reached so far.
    pub t_by_k: Vec<u64>,
}

impl BranchProbe {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the current `X_n(s)`; call once after every insertion.
    pub fn record<S: LetterSource>(&mut self, trie: &SuffixTrie<S>, s: &Direction) {
        let x = trie.probe_x(|j| s.letter(j));
        self.x_by_n.push(x);
        while self.t_by_k.len() < x {
            self.t_by_k.push(trie.n());
        }
    }

    pub fn probe_t(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.t_by_k.get(i).copied())
    }

    /// Pairs `(n, k)` violating `X_n >= k <=> T_k <= n`, over all recorded
    /// `n` and `1 <= k <= max X + 1`.
    pub fn duality_violations(&self) -> Vec<(u64, usize)> {
        let kmax = self.x_by_n.iter().copied().max().unwrap_or(0) + 1;
        let mut bad = Vec::new();
        for (i, &x) in self.x_by_n.iter().enumerate() {
            let n = i as u64 + 1;
            for k in 1..=kmax {
                let lhs = x >= k;
                let rhs = self.probe_t(k).is_some_and(|t| t <= n);
                if lhs != rhs {
                    bad.push((n, k));
                }
            }
        }
        bad
    }
}

/// Grows a trie over `source` to each checkpoint in turn, returning the
/// stats there. Checkpoints must be increasing.
pub fn stats_at<S: LetterSource>(trie: &mut SuffixTrie<S>, checkpoints: &[u64]) -> Result<Vec<TrieStats>> {
    let mut out = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        trie.grow_to(n)?;
        out.push(trie.stats());
    }
    Ok(out)
}

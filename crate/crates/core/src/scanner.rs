//! Incremental detection of `Z_n`-instances ending at the last letter.
//!
//! For a word `w` ending at position `e`, let `m_k` be the length of the
//! shortest suffix of `w` that is a `Z_k`-instance. Then `m_1 = 1`, and
//! `m_{k+1}` is obtained from the latest earlier copy of the suffix of length
//! `m_k` that leaves a nonempty gap before that suffix: if the copy starts at
//! `s`, then `m_{k+1} = |w| - s`. (Any `Z_{k+1}`-instance suffix `A B A` has
//! the shortest `Z_k` suffix as a suffix of `A`, so its first copy inside the
//! leading `A` gives a candidate at least as short.) A `Z_n`-instance ends at
//! `e` iff the chain reaches `m_n`.
//!
//! The scanner keeps a rolling hash of every prefix. Copies of short
//! suffixes are found through per-length indexes from substring hash to
//! start positions; longer ones through an index of fixed-length grams,
//! whose candidates are filtered by comparing full substring hashes. Every
//! hit is confirmed by direct comparison.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::pattern::Span;

const MOD: u64 = (1 << 61) - 1;
/// Suffixes at least this long are located through the gram index.
const GRAM: usize = 24;
const BASE: u64 = 0x1f3d_5b79_a2c4_e681 % MOD;

fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let r = (p as u64 & MOD) + (p >> 61) as u64;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

fn add_mod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

/// Incremental `Z_n` encounter detector with undo, for depth-first search.
#[derive(Clone, Debug)]
pub struct ZiminScanner {
    n: usize,
    alphabet: usize,
    word: Vec<u8>,
    prefix: Vec<u64>,
    powers: Vec<u64>,
    by_length: Vec<Option<FxHashMap<u64, Vec<u32>>>>,
    active: Vec<usize>,
    grams: FxHashMap<u64, Vec<u32>>,
    first_hit: Option<usize>,
}

impl ZiminScanner {
    /// Scanner for the empty word. Requires `n >= 1` and `1 <= alphabet_size <= 255`.
    pub fn new(n: usize, alphabet_size: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("scanner needs n >= 1".into()));
        }
        if alphabet_size == 0 || alphabet_size > 255 {
            return Err(Error::Precondition(format!(
                "alphabet size {alphabet_size} outside 1..=255"
            )));
        }
        Ok(ZiminScanner {
            n,
            alphabet: alphabet_size,
            word: Vec::new(),
            prefix: vec![0],
            powers: vec![1],
            by_length: Vec::new(),
            active: Vec::new(),
            grams: FxHashMap::default(),
            first_hit: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Whether the current word contains a `Z_n`-instance anywhere.
    pub fn encountered(&self) -> bool {
        self.first_hit.is_some()
    }

    /// Appends `letter`; returns whether a `Z_n`-instance ends at the new last position.
    ///
    /// # Panics
    /// If `letter` is not below the alphabet size.
    pub fn push(&mut self, letter: u8) -> bool {
        assert!(
            (letter as usize) < self.alphabet,
            "letter {letter} outside alphabet of size {}",
            self.alphabet
        );
        let h = add_mod(
            mul_mod(*self.prefix.last().expect("prefix hash"), BASE),
            letter as u64 + 1,
        );
        self.word.push(letter);
        self.prefix.push(h);
        if self.powers.len() < self.prefix.len() {
            let p = mul_mod(*self.powers.last().expect("power"), BASE);
            self.powers.push(p);
        }
        let len = self.word.len();
        for i in 0..self.active.len() {
            let l = self.active[i];
            if l <= len {
                let key = self.hash(len - l, len);
                self.by_length[l]
                    .as_mut()
                    .expect("active index")
                    .entry(key)
                    .or_default()
                    .push((len - l) as u32);
            }
        }
        if len >= GRAM {
            let key = self.hash(len - GRAM, len);
            self.grams.entry(key).or_default().push((len - GRAM) as u32);
        }
        let hit = self.shortest_instance_suffix().is_some();
        if hit && self.first_hit.is_none() {
            self.first_hit = Some(len);
        }
        hit
    }

    /// Removes the last letter, undoing [`ZiminScanner::push`].
    pub fn pop(&mut self) -> Option<u8> {
        let len = self.word.len();
        if len == 0 {
            return None;
        }
        for &l in &self.active {
            if l <= len {
                let key = self.hash(len - l, len);
                let index = self.by_length[l].as_mut().expect("active index");
                let starts = index.get_mut(&key).expect("indexed suffix");
                let popped = starts.pop();
                debug_assert_eq!(popped, Some((len - l) as u32));
                if starts.is_empty() {
                    index.remove(&key);
                }
            }
        }
        if len >= GRAM {
            let key = self.hash(len - GRAM, len);
            let starts = self.grams.get_mut(&key).expect("indexed gram");
            starts.pop();
            if starts.is_empty() {
                self.grams.remove(&key);
            }
        }
        if self.first_hit == Some(len) {
            self.first_hit = None;
        }
        self.prefix.pop();
        self.word.pop()
    }

    /// Functional form of [`ZiminScanner::push`]: returns the extended scanner and the flag.
    pub fn extend(&self, letter: u8) -> (ZiminScanner, bool) {
        let mut next = self.clone();
        let hit = next.push(letter);
        (next, hit)
    }

    /// Clears the word but keeps allocated buffers.
    pub fn reset(&mut self) {
        while self.pop().is_some() {}
    }

    /// Length of the shortest suffix of the current word that is a `Z_n`-instance.
    pub fn shortest_instance_suffix(&mut self) -> Option<usize> {
        self.shortest_suffix_at_level(self.n)
    }

    /// Length of the shortest suffix that is a `Z_level`-instance.
    pub fn shortest_suffix_at_level(&mut self, level: usize) -> Option<usize> {
        let len = self.word.len();
        if level == 0 {
            return Some(0);
        }
        if len == 0 {
            return None;
        }
        let mut m = 1;
        for _ in 1..level {
            if len < 2 * m + 1 {
                return None;
            }
            let start = self.latest_copy(m, len - 2 * m - 1)?;
            m = len - start;
        }
        Some(m)
    }

    /// `[m_1, m_2, ...]`: shortest `Z_k`-instance suffix lengths for
    /// `k = 1..=level`, stopping at the first level with none.
    pub fn shortest_suffix_chain(&mut self, level: usize) -> Vec<usize> {
        let len = self.word.len();
        let mut chain = Vec::with_capacity(level);
        if len == 0 || level == 0 {
            return chain;
        }
        let mut m = 1;
        chain.push(m);
        for _ in 1..level {
            if len < 2 * m + 1 {
                break;
            }
            match self.latest_copy(m, len - 2 * m - 1) {
                Some(start) => m = len - start,
                None => break,
            }
            chain.push(m);
        }
        chain
    }

    fn hash(&self, start: usize, end: usize) -> u64 {
        let sub = mul_mod(self.prefix[start], self.powers[end - start]);
        add_mod(self.prefix[end], MOD - sub)
    }

    fn ensure_index(&mut self, l: usize) {
        if self.by_length.len() <= l {
            self.by_length.resize_with(l + 1, || None);
        }
        if self.by_length[l].is_some() {
            return;
        }
        let mut index: FxHashMap<u64, Vec<u32>> = FxHashMap::default();
        let len = self.word.len();
        if len >= l {
            for s in 0..=len - l {
                index.entry(self.hash(s, s + l)).or_default().push(s as u32);
            }
        }
        self.by_length[l] = Some(index);
        self.active.push(l);
    }

    /// Latest start `s <= limit` of a copy of the length-`l` suffix.
    fn latest_copy(&mut self, l: usize, limit: usize) -> Option<usize> {
        if l >= GRAM {
            return self.latest_long_copy(l, limit);
        }
        self.ensure_index(l);
        let len = self.word.len();
        let key = self.hash(len - l, len);
        let starts = self.by_length[l].as_ref()?.get(&key)?;
        let cut = starts.partition_point(|&s| s as usize <= limit);
        let suffix = &self.word[len - l..];
        starts[..cut]
            .iter()
            .rev()
            .map(|&s| s as usize)
            .find(|&s| &self.word[s..s + l] == suffix)
    }
}

impl ZiminScanner {
    fn latest_long_copy(&self, l: usize, limit: usize) -> Option<usize> {
        let len = self.word.len();
        let from = len - l;
        let starts = self.grams.get(&self.hash(from, from + GRAM))?;
        let target = self.hash(from, len);
        let cut = starts.partition_point(|&s| s as usize <= limit);
        let suffix = &self.word[from..];
        starts[..cut]
            .iter()
            .rev()
            .map(|&s| s as usize)
            .find(|&s| self.hash(s, s + l) == target && &self.word[s..s + l] == suffix)
    }
}

/// Index-free evaluation of the shortest-suffix chain; slow but simple.
pub fn shortest_instance_suffix(w: &[u8], n: usize) -> Option<usize> {
    if n == 0 {
        return Some(0);
    }
    let len = w.len();
    if len == 0 {
        return None;
    }
    let mut m = 1;
    for _ in 1..n {
        if len < 2 * m + 1 {
            return None;
        }
        let suffix = &w[len - m..];
        let s = (0..=len - 2 * m - 1)
            .rev()
            .find(|&s| &w[s..s + m] == suffix)?;
        m = len - s;
    }
    Some(m)
}

/// First `Z_n`-instance found by feeding `w` through a scanner: the span of
/// the shortest instance ending at the earliest flagged position.
pub fn scan_for_instance(w: &[u8], n: usize, alphabet_size: usize) -> Result<Option<Span>> {
    let mut scanner = ZiminScanner::new(n, alphabet_size)?;
    for &c in w {
        if scanner.push(c) {
            let end = scanner.len();
            let m = scanner.shortest_instance_suffix().expect("flagged");
            return Ok(Some(Span::new(end - m, end)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::zimin_instance_slice;
    use proptest::prelude::*;

    /// Shortest `Z_n`-instance suffix by brute force over the recursive decider.
    fn oracle_shortest_suffix(w: &[u8], n: usize) -> Option<usize> {
        (1..=w.len()).find(|&l| zimin_instance_slice(&w[w.len() - l..], n))
    }

    #[test]
    fn extension_examples() {
        let mut s = ZiminScanner::new(2, 2).unwrap();
        assert!(!s.push(0));
        assert!(!s.push(1));
        assert!(s.push(0));

        let mut s = ZiminScanner::new(2, 2).unwrap();
        s.push(0);
        s.push(0);
        let (next, hit) = s.extend(1);
        assert!(!hit);
        assert_eq!(next.word(), &[0, 0, 1]);
        assert_eq!(s.word(), &[0, 0]);

        let s = ZiminScanner::new(1, 2).unwrap();
        assert!(s.extend(0).1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ZiminScanner::new(0, 2).is_err());
        assert!(ZiminScanner::new(2, 0).is_err());
    }

    #[test]
    fn pop_restores_state() {
        let mut s = ZiminScanner::new(3, 2).unwrap();
        for &c in &[0, 0, 1, 0, 0, 1, 1] {
            s.push(c);
        }
        let flagged_before: Vec<bool> = (0..2).map(|c| s.extend(c).1).collect();
        s.push(1);
        s.push(0);
        s.pop();
        s.pop();
        let flagged_after: Vec<bool> = (0..2).map(|c| s.extend(c).1).collect();
        assert_eq!(flagged_before, flagged_after);
    }

    #[test]
    fn long_suffixes_use_gram_index() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..40 {
            let n = 4 + trial % 2;
            let q = 2 + trial % 2;
            let mut s = ZiminScanner::new(n, q).unwrap();
            let mut model = Vec::new();
            let mut long_seen = false;
            for _ in 0..400 {
                if !model.is_empty() && rng.random_bool(0.2) {
                    s.pop();
                    model.pop();
                    continue;
                }
                let c = rng.random_range(0..q as u8);
                model.push(c);
                s.push(c);
                for level in 1..=n {
                    let want = shortest_instance_suffix(&model, level);
                    assert_eq!(s.shortest_suffix_at_level(level), want);
                    long_seen |= want.is_some_and(|m| m >= GRAM);
                }
            }
            assert!(long_seen || trial % 2 == 1);
        }
    }

    proptest! {
        #[test]
        fn chain_matches_oracle(v in prop::collection::vec(0u8..3, 1..24), n in 1usize..5) {
            let oracle = oracle_shortest_suffix(&v, n);
            prop_assert_eq!(shortest_instance_suffix(&v, n), oracle);
            let mut s = ZiminScanner::new(n, 3).unwrap();
            for &c in &v[..v.len() - 1] {
                s.push(c);
            }
            s.push(v[v.len() - 1]);
            prop_assert_eq!(s.shortest_instance_suffix(), oracle);
        }

        #[test]
        fn scan_reports_same_span_as_matcher(v in prop::collection::vec(0u8..3, 0..40), n in 1usize..5) {
            let w = crate::word::Word::new(v.clone(), 3).unwrap();
            prop_assert_eq!(scan_for_instance(&v, n, 3).unwrap(), crate::pattern::encounters_zimin(&w, n));
        }

        #[test]
        fn push_pop_sequences(ops in prop::collection::vec(prop::option::of(0u8..2), 0..80)) {
            let mut s = ZiminScanner::new(3, 2).unwrap();
            let mut model: Vec<u8> = Vec::new();
            for op in ops {
                match op {
                    Some(c) => {
                        model.push(c);
                        let hit = s.push(c);
                        prop_assert_eq!(hit, shortest_instance_suffix(&model, 3).is_some());
                    }
                    None => {
                        prop_assert_eq!(s.pop(), model.pop());
                    }
                }
                prop_assert_eq!(s.word(), &model[..]);
                let any = (1..=model.len()).any(|l| shortest_instance_suffix(&model[..l], 3).is_some());
                prop_assert_eq!(s.encountered(), any);
            }
        }
    }
}

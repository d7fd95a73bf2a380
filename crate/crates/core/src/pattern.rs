//! Deciding Zimin instances, pattern instances under non-erasing morphisms,
//! and unavoidability of patterns.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::word::{zimin, Word};

/// Largest Zimin word that [`is_unavoidable`] will build by default.
pub const DEFAULT_UNAVOIDABLE_LENGTH_CAP: usize = (1 << 10) - 1;

/// Half-open range `start..end` of letter positions in a host word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for Span {
    /// 1-indexed, inclusive on both ends.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start + 1, self.end)
    }
}

/// A word over variables, canonically renamed so that variables first
/// occur in the order `0, 1, 2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    vars: Vec<u8>,
    arity: usize,
}

impl Pattern {
    /// Canonical renaming of an arbitrary symbol sequence.
    pub fn from_symbols<T: PartialEq>(symbols: &[T]) -> Result<Self> {
        let mut seen: Vec<&T> = Vec::new();
        let mut vars = Vec::with_capacity(symbols.len());
        for s in symbols {
            let idx = match seen.iter().position(|t| *t == s) {
                Some(i) => i,
                None => {
                    if seen.len() == 255 {
                        return Err(Error::InvalidPattern("more than 255 variables".into()));
                    }
                    seen.push(s);
                    seen.len() - 1
                }
            };
            vars.push(idx as u8);
        }
        Ok(Pattern {
            arity: seen.len(),
            vars,
        })
    }

    /// Parses a pattern such as `xyxzy`; any non-whitespace character is a variable.
    pub fn parse(text: &str) -> Result<Self> {
        let symbols: Vec<char> = text.trim().chars().collect();
        if symbols.iter().any(|c| c.is_whitespace()) {
            return Err(Error::InvalidPattern(format!("whitespace inside {text:?}")));
        }
        Pattern::from_symbols(&symbols)
    }

    pub fn from_word(word: &Word) -> Self {
        Pattern::from_symbols(word.letters()).expect("words have at most 255 letters")
    }

    /// `Z_n` as a pattern.
    pub fn zimin(n: usize) -> Result<Self> {
        Ok(Pattern::from_word(&zimin(n)?))
    }

    pub fn vars(&self) -> &[u8] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: &[u8] = b"xyzuvwabcdefghijklmnopqrst";
        for &v in &self.vars {
            match NAMES.get(v as usize) {
                Some(&c) => write!(f, "{}", c as char)?,
                None => write!(f, "[{v}]")?,
            }
        }
        Ok(())
    }
}

/// Images of the pattern variables together with the host span they cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismWitness {
    pub images: Vec<Word>,
    pub span: Span,
}

impl MorphismWitness {
    /// Image of `pattern` under this morphism.
    pub fn apply(&self, pattern: &Pattern) -> Vec<u8> {
        pattern
            .vars()
            .iter()
            .flat_map(|&v| self.images[v as usize].letters().iter().copied())
            .collect()
    }

    /// Every image is nonempty and the images reassemble exactly the host span.
    pub fn validates(&self, host: &Word, pattern: &Pattern) -> bool {
        self.images.len() == pattern.arity()
            && self.images.iter().all(|a| !a.is_empty())
            && self.span.end <= host.len()
            && self.apply(pattern) == host.letters()[self.span.start..self.span.end]
    }
}

/// Smallest length of a `Z_n`-instance, `None` when it does not fit in `usize`.
pub(crate) fn zimin_length(n: usize) -> Option<usize> {
    if n >= usize::BITS as usize {
        None
    } else {
        Some((1usize << n) - 1)
    }
}

/// Recursive test: `v` is a `Z_n`-instance iff it is `A B A`
/// with `B` nonempty and `A` a `Z_{n-1}`-instance of length at least
/// `2^{n-1} - 1`. Every nonempty word is a `Z_1`-instance; only ε is a
/// `Z_0`-instance.
pub(crate) fn zimin_instance_slice(v: &[u8], n: usize) -> bool {
    match n {
        0 => v.is_empty(),
        1 => !v.is_empty(),
        _ => {
            let Some(min) = zimin_length(n) else {
                return false;
            };
            if v.len() < min {
                return false;
            }
            let len = v.len();
            let last = v[len - 1];
            (min >> 1..len.div_ceil(2)).any(|i| {
                v[i - 1] == last && v[..i] == v[len - i..] && zimin_instance_slice(&v[..i], n - 1)
            })
        }
    }
}

/// Whether `w` is an instance of `Z_n`.
pub fn is_zimin_instance(w: &Word, n: usize) -> bool {
    zimin_instance_slice(w.letters(), n)
}

/// Memoised version of [`zimin_instance_slice`] over subwords of one host word,
/// keyed by offsets.
struct InstanceMemo<'a> {
    host: &'a [u8],
    memo: FxHashMap<(u32, u32, u8), bool>,
}

impl<'a> InstanceMemo<'a> {
    fn new(host: &'a [u8]) -> Self {
        InstanceMemo {
            host,
            memo: FxHashMap::default(),
        }
    }

    fn check(&mut self, start: usize, len: usize, n: usize) -> bool {
        if n <= 1 {
            return (n == 1) == (len > 0);
        }
        let Some(min) = zimin_length(n) else {
            return false;
        };
        if len < min {
            return false;
        }
        let key = (start as u32, len as u32, n as u8);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let v = &self.host[start..start + len];
        let mut found = false;
        for i in min >> 1..len.div_ceil(2) {
            if v[i - 1] == v[len - 1] && v[..i] == v[len - i..] && self.check(start, i, n - 1) {
                found = true;
                break;
            }
        }
        self.memo.insert(key, found);
        found
    }
}

/// Some subword of `w` that is a `Z_n`-instance, or `None` if `w` avoids `Z_n`.
///
/// Subwords are tried by increasing end position, then by increasing length,
/// so the span returned is the shortest among those ending earliest.
pub fn encounters_zimin(w: &Word, n: usize) -> Option<Span> {
    let host = w.letters();
    let min = zimin_length(n)?;
    if n == 0 {
        return Some(Span::new(0, 0));
    }
    if host.len() < min {
        return None;
    }
    let mut memo = InstanceMemo::new(host);
    for end in min..=host.len() {
        for start in (0..=end - min).rev() {
            if memo.check(start, end - start, n) {
                return Some(Span::new(start, end));
            }
        }
    }
    None
}

/// A morphism mapping `p` onto the whole of `w`, if one exists.
///
/// Backtracks over image lengths for first occurrences; earlier variables
/// receive shorter images first, so the witness has the lexicographically
/// least vector of image lengths.
pub fn instance_of_pattern(w: &Word, p: &Pattern) -> Option<MorphismWitness> {
    let host = w.letters();
    if p.is_empty() {
        return host.is_empty().then(|| MorphismWitness {
            images: Vec::new(),
            span: Span::new(0, 0),
        });
    }
    if host.len() < p.len() {
        return None;
    }
    let mut assigned: Vec<Option<(usize, usize)>> = vec![None; p.arity()];
    if match_from(host, p.vars(), 0, 0, &mut assigned) {
        let images = assigned
            .iter()
            .map(|a| {
                let (s, l) = a.expect("every variable occurs");
                w.subword(s, s + l)
            })
            .collect();
        Some(MorphismWitness {
            images,
            span: Span::new(0, host.len()),
        })
    } else {
        None
    }
}

/// Letters still needed to cover `vars[k..]`.
fn min_remaining(vars: &[u8], k: usize, assigned: &[Option<(usize, usize)>]) -> usize {
    vars[k..]
        .iter()
        .map(|&v| assigned[v as usize].map_or(1, |(_, l)| l))
        .sum()
}

fn match_from(
    host: &[u8],
    vars: &[u8],
    k: usize,
    pos: usize,
    assigned: &mut [Option<(usize, usize)>],
) -> bool {
    if k == vars.len() {
        return pos == host.len();
    }
    let v = vars[k] as usize;
    match assigned[v] {
        Some((start, len)) => {
            pos + len <= host.len()
                && host[pos..pos + len] == host[start..start + len]
                && match_from(host, vars, k + 1, pos + len, assigned)
        }
        None => {
            let rest = min_remaining(vars, k + 1, assigned);
            let room = host.len() - pos;
            if room < rest + 1 {
                return false;
            }
            for len in 1..=room - rest {
                assigned[v] = Some((pos, len));
                if match_from(host, vars, k + 1, pos + len, assigned) {
                    return true;
                }
            }
            assigned[v] = None;
            false
        }
    }
}

/// Some subword of `w` that is an instance of `p`, or `None` if `w` avoids `p`.
///
/// Shortest subwords first, leftmost among equal lengths.
pub fn encounters_pattern(w: &Word, p: &Pattern) -> Option<MorphismWitness> {
    let n = w.len();
    for len in p.len().max(1)..=n {
        for start in 0..=n - len {
            let sub = w.subword(start, start + len);
            if let Some(mut witness) = instance_of_pattern(&sub, p) {
                witness.span = Span::new(start, start + len);
                return Some(witness);
            }
        }
    }
    if p.is_empty() {
        return Some(MorphismWitness {
            images: Vec::new(),
            span: Span::new(0, 0),
        });
    }
    None
}

/// Zimin's criterion: a pattern with `m` variables is unavoidable iff `Z_m`
/// encounters it. Refuses patterns whose `Z_m` is longer than
/// [`DEFAULT_UNAVOIDABLE_LENGTH_CAP`].
pub fn is_unavoidable(p: &Pattern) -> Result<bool> {
    is_unavoidable_with_cap(p, DEFAULT_UNAVOIDABLE_LENGTH_CAP)
}

pub fn is_unavoidable_with_cap(p: &Pattern, length_cap: usize) -> Result<bool> {
    let m = p.arity();
    match zimin_length(m) {
        Some(len) if len <= length_cap => {}
        _ => {
            return Err(Error::Size {
                what: format!("Z_{m} for a pattern with {m} variables"),
                limit: length_cap as u64,
            })
        }
    }
    Ok(encounters_pattern(&zimin(m)?, p).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn p(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    #[test]
    fn zimin_instance_examples() {
        assert!(is_zimin_instance(&w("a"), 1));
        assert!(is_zimin_instance(&w("aaa"), 2));
        assert!(!is_zimin_instance(&w("ab"), 2));
        assert!(is_zimin_instance(&w("abacaba"), 3));
        assert!(!is_zimin_instance(&Word::empty(2).unwrap(), 1));
        assert!(is_zimin_instance(&Word::empty(2).unwrap(), 0));
        assert!(!is_zimin_instance(&w("abab"), 2));
    }

    #[test]
    fn zimin_words_are_instances_of_smaller_zimin_words() {
        for k in 1..=10 {
            let z = zimin(k).unwrap();
            for n in 1..=k {
                assert!(is_zimin_instance(&z, n), "Z_{k} vs Z_{n}");
            }
            assert!(!is_zimin_instance(&z, k + 1));
        }
    }

    #[test]
    fn encounter_examples() {
        assert_eq!(encounters_zimin(&w("0010"), 2), Some(Span::new(1, 4)));
        assert_eq!(Span::new(1, 4).to_string(), "2-4");
        assert_eq!(encounters_zimin(&w("0011"), 2), None);
        assert_eq!(encounters_zimin(&Word::empty(2).unwrap(), 1), None);
        assert_eq!(encounters_zimin(&w("01"), 3), None);
    }

    #[test]
    fn memo_agrees_with_plain_recursion() {
        let host = zimin(5).unwrap();
        let h = host.letters();
        let mut memo = InstanceMemo::new(h);
        for n in 1..=5 {
            for s in 0..h.len() {
                for e in s..=h.len() {
                    assert_eq!(memo.check(s, e - s, n), zimin_instance_slice(&h[s..e], n));
                }
            }
        }
    }

    #[test]
    fn morphism_example_witness() {
        let host = w("abbcabbxdc");
        let pat = p("xyxzy");
        let wit = instance_of_pattern(&host, &pat).expect("instance");
        let images: Vec<String> = wit.images.iter().map(|a| a.to_text().unwrap()).collect();
        assert_eq!(images, ["abb", "c", "xd"]);
        assert!(wit.validates(&host, &pat));
    }

    #[test]
    fn instance_examples() {
        let wit = instance_of_pattern(&w("aa"), &p("xx")).unwrap();
        assert_eq!(wit.images, vec![w("a")]);
        assert!(instance_of_pattern(&w("aba"), &p("xx")).is_none());
        assert!(instance_of_pattern(&w("a"), &p("xx")).is_none());
    }

    #[test]
    fn lexicographically_least_lengths() {
        // "aaaa" = x y x with lengths (1,2) and not (1,1,..) or (2,...)
        let wit = instance_of_pattern(&w("aaaa"), &p("xyx")).unwrap();
        let lens: Vec<usize> = wit.images.iter().map(Word::len).collect();
        assert_eq!(lens, [1, 2]);
    }

    #[test]
    fn encounter_pattern_examples() {
        assert!(encounters_pattern(&w("aba"), &p("xx")).is_none());
        let wit = encounters_pattern(&w("abab"), &p("xx")).unwrap();
        assert_eq!(wit.span, Span::new(0, 4));
        assert_eq!(wit.images, vec![w("ab")]);
        let wit = encounters_pattern(&w("abc"), &p("xyz")).unwrap();
        assert!(wit.images.iter().all(|a| a.len() == 1));
        assert!(wit.validates(&w("abc"), &p("xyz")));
    }

    #[test]
    fn pattern_parsing_is_canonical() {
        assert_eq!(p("xyxzy"), p("abacb"));
        assert_eq!(p("xyxzy").vars(), &[0, 1, 0, 2, 1]);
        assert_eq!(p("xyxzy").arity(), 3);
        assert_eq!(p("xyxzy").to_string(), "xyxzy");
        assert_eq!(Pattern::zimin(3).unwrap(), p("abacaba"));
        assert!(Pattern::parse("x y").is_err());
    }

    #[test]
    fn unavoidability_examples() {
        assert!(is_unavoidable(&p("xyx")).unwrap());
        assert!(is_unavoidable(&p("x")).unwrap());
        assert!(is_unavoidable(&p("xyz")).unwrap());
        assert!(!is_unavoidable(&p("xx")).unwrap());
        assert!(!is_unavoidable(&p("xyxy")).unwrap());
        assert!(is_unavoidable(&p("xyxzxyx")).unwrap());
        let wide = Pattern::from_symbols(&(0..11).collect::<Vec<u32>>()).unwrap();
        assert!(matches!(is_unavoidable(&wide), Err(Error::Size { .. })));
    }
}

//! Words over small alphabets, Zimin words and bisecting borders.
//!
//! Letters are stored as byte-sized indices `0..alphabet_size`. Textual I/O
//! uses either decimal digits (binary words, `0`/`1`) or Latin letters
//! (`a`..`z` followed by `A`..`Z`).

use std::fmt;

use crate::error::{Error, Result};

/// Largest Zimin index accepted by the generators.
pub const DEFAULT_ZIMIN_CAP: usize = 62;

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// A finite word over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
    alphabet: u8,
}

/// How letters are printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rendering {
    /// `0`, `1`, ... (one decimal digit per letter).
    Digits,
    /// `a`..`z`, then `A`..`Z`.
    Letters,
}

impl Rendering {
    /// Binary alphabets print as digits so that word lists diff cleanly
    /// against `0`/`1` listings; everything else prints as letters.
    pub fn for_alphabet(alphabet_size: usize) -> Self {
        if alphabet_size == 2 {
            Rendering::Digits
        } else {
            Rendering::Letters
        }
    }
}

impl Word {
    pub fn new(letters: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size > 255 {
            return Err(Error::InvalidWord(format!(
                "alphabet size {alphabet_size} outside 1..=255"
            )));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= alphabet_size) {
            return Err(Error::InvalidWord(format!(
                "letter {bad} not below alphabet size {alphabet_size}"
            )));
        }
        Ok(Word {
            letters,
            alphabet: alphabet_size as u8,
        })
    }

    pub fn empty(alphabet_size: usize) -> Result<Self> {
        Word::new(Vec::new(), alphabet_size)
    }

    /// Binary word from `0`/`1` bits.
    pub fn binary(bits: &[u8]) -> Result<Self> {
        Word::new(bits.to_vec(), 2)
    }

    /// Parses a word in textual form.
    ///
    /// Digit strings give letter indices directly (alphabet size at least 2);
    /// Latin letters map `a` to 0, `b` to 1 and so on, and the alphabet is the
    /// smallest one containing every letter. An empty string is ε.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim_end_matches(['\r', '\n']);
        if text.is_empty() {
            return Word::empty(1);
        }
        if text.bytes().all(|b| b.is_ascii_digit()) {
            let letters: Vec<u8> = text.bytes().map(|b| b - b'0').collect();
            let q = letters.iter().copied().max().unwrap_or(0) as usize + 1;
            return Word::new(letters, q.max(2));
        }
        let letters = text
            .chars()
            .map(letter_index)
            .collect::<Option<Vec<u8>>>()
            .ok_or_else(|| Error::InvalidWord(format!("unrecognised character in {text:?}")))?;
        let q = letters.iter().copied().max().unwrap_or(0) as usize + 1;
        Word::new(letters, q)
    }

    /// Like [`Word::parse`], but widens the alphabet to `alphabet_size`.
    pub fn parse_with_alphabet(text: &str, alphabet_size: usize) -> Result<Self> {
        let w = Word::parse(text)?;
        if w.alphabet_size() > alphabet_size {
            return Err(Error::InvalidWord(format!(
                "{text:?} uses more than {alphabet_size} letters"
            )));
        }
        Word::new(w.letters, alphabet_size)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet as usize
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of distinct letters actually used.
    pub fn distinct_letters(&self) -> usize {
        let mut seen = [false; 256];
        for &l in &self.letters {
            seen[l as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word {
            letters: self.letters[start..end].to_vec(),
            alphabet: self.alphabet,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            alphabet: self.alphabet.max(other.alphabet),
        }
    }

    pub fn render(&self, style: Rendering) -> Result<String> {
        match style {
            Rendering::Digits => {
                if self.letters.iter().any(|&l| l > 9) {
                    return Err(Error::Domain("letters above 9 have no digit form".into()));
                }
                Ok(self.letters.iter().map(|&l| (b'0' + l) as char).collect())
            }
            Rendering::Letters => {
                if self.letters.iter().any(|&l| l as usize >= LETTERS.len()) {
                    return Err(Error::Domain(format!(
                        "only {} letters have a textual form",
                        LETTERS.len()
                    )));
                }
                Ok(self
                    .letters
                    .iter()
                    .map(|&l| LETTERS[l as usize] as char)
                    .collect())
            }
        }
    }

    /// Renders with the alphabet's default style ([`Rendering::for_alphabet`]).
    pub fn to_text(&self) -> Result<String> {
        self.render(Rendering::for_alphabet(self.alphabet_size()))
    }

    /// Letterwise bit flip of a binary word.
    pub fn complement(&self) -> Result<Word> {
        if self.alphabet != 2 {
            return Err(Error::Domain(format!(
                "complement needs a binary word, alphabet size is {}",
                self.alphabet
            )));
        }
        Ok(Word {
            letters: self.letters.iter().map(|&l| 1 - l).collect(),
            alphabet: 2,
        })
    }

    pub fn reverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().copied().collect(),
            alphabet: self.alphabet,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{:?}", self.letters),
        }
    }
}

/// Parses a word list: one word per line, an empty line standing for ε.
pub fn parse_word_list(text: &str, alphabet_size: usize) -> Result<Vec<Word>> {
    text.lines()
        .map(|line| Word::parse_with_alphabet(line.trim_end_matches('\r'), alphabet_size))
        .collect()
}

/// Inverse of [`parse_word_list`], in the alphabet's default rendering.
pub fn format_word_list(words: &[Word]) -> Result<String> {
    let mut out = String::new();
    for w in words {
        out.push_str(&w.to_text()?);
        out.push('\n');
    }
    Ok(out)
}

fn letter_index(c: char) -> Option<u8> {
    match c {
        'a'..='z' => Some(c as u8 - b'a'),
        'A'..='Z' => Some(c as u8 - b'A' + 26),
        _ => None,
    }
}

fn check_zimin_index(n: usize) -> Result<()> {
    if n > DEFAULT_ZIMIN_CAP {
        return Err(Error::Size {
            what: format!("Zimin index {n}"),
            limit: DEFAULT_ZIMIN_CAP as u64,
        });
    }
    Ok(())
}

fn zimin_buffer(n: usize) -> Result<Vec<u8>> {
    check_zimin_index(n)?;
    let len = (1usize << n) - 1;
    let mut buf = Vec::new();
    buf.try_reserve_exact(len).map_err(|_| Error::Size {
        what: format!("Zimin word of length 2^{n} - 1"),
        limit: isize::MAX as u64,
    })?;
    Ok(buf)
}

/// `Z_n` built by the doubling recursion `Z_{k+1} = Z_k x_k Z_k`.
pub fn zimin(n: usize) -> Result<Word> {
    let mut letters = zimin_buffer(n)?;
    for k in 0..n {
        let half = letters.len();
        letters.push(k as u8);
        letters.extend_from_within(..half);
    }
    Word::new(letters, n.max(1))
}

/// `Z_n` built position by position: letter `i` (1-based) is the 2-adic order of `i`.
pub fn zimin_ruler(n: usize) -> Result<Word> {
    let mut letters = zimin_buffer(n)?;
    let len = (1u64 << n) - 1;
    letters.extend((1..=len).map(|i| i.trailing_zeros() as u8));
    Word::new(letters, n.max(1))
}

/// Lengths `i >= 1` with `w[..i] == w[len-i..]` and `2i < len`, ascending.
///
/// Direct comparison for every candidate length.
pub fn bisecting_borders(w: &[u8]) -> Vec<usize> {
    let len = w.len();
    (1..len.div_ceil(2))
        .filter(|&i| w[..i] == w[len - i..])
        .collect()
}

/// Same result as [`bisecting_borders`], read off the failure function.
pub fn bisecting_borders_kmp(w: &[u8]) -> Vec<usize> {
    let len = w.len();
    if len == 0 {
        return Vec::new();
    }
    let fail = failure_function(w);
    let mut out = Vec::new();
    let mut b = fail[len - 1];
    while b > 0 {
        if 2 * b < len {
            out.push(b);
        }
        b = fail[b - 1];
    }
    out.reverse();
    out
}

/// `fail[i]` is the length of the longest proper border of `w[..=i]`.
pub fn failure_function(w: &[u8]) -> Vec<usize> {
    let mut fail = vec![0; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

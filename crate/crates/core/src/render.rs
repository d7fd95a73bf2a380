//! Plain PBM (P1) rendering of binary words, one cell per letter, rows read
//! left to right. A cell is black for letter 1. The last row is padded with
//! white cells and the pad count is kept in a `# pad=N` comment so the word
//! can be recovered exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::word::Word;

pub const DEFAULT_ROW_WIDTH: usize = 90;

/// Row layout of a rendered word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderSpec {
    pub row_width: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            row_width: DEFAULT_ROW_WIDTH,
        }
    }
}

impl RenderSpec {
    pub fn new(row_width: usize) -> Result<Self> {
        if row_width == 0 {
            return Err(Error::Domain("row width must be positive".into()));
        }
        Ok(RenderSpec { row_width })
    }

    pub fn height(&self, len: usize) -> usize {
        len.div_ceil(self.row_width)
    }

    pub fn padding(&self, len: usize) -> usize {
        self.height(len) * self.row_width - len
    }

    pub fn encode(&self, word: &Word) -> Result<String> {
        if word.alphabet_size() > 2 {
            return Err(Error::InvalidWord(format!(
                "rendering needs a binary word, got alphabet size {}",
                word.alphabet_size()
            )));
        }
        let w = self.row_width;
        let h = self.height(word.len());
        let mut out = String::with_capacity(2 * w * h + 32);
        let _ = writeln!(out, "P1");
        let _ = writeln!(out, "# pad={}", self.padding(word.len()));
        let _ = writeln!(out, "{w} {h}");
        let mut cells = word.letters().iter().copied().chain(std::iter::repeat(0));
        for _ in 0..h {
            for x in 0..w {
                if x > 0 {
                    out.push(' ');
                }
                out.push(if cells.next() == Some(1) { '1' } else { '0' });
            }
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn encode_pbm(word: &Word, row_width: usize) -> Result<String> {
    RenderSpec::new(row_width)?.encode(word)
}

/// Reads a P1 image back into the binary word it encodes, dropping the
/// trailing padding named by the `# pad=N` comment (0 if absent).
pub fn decode_pbm(text: &str) -> Result<Word> {
    let mut pad = 0usize;
    let mut tokens = Vec::new();
    for line in text.lines() {
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(&line[i + 1..])),
            None => (line, None),
        };
        if let Some(value) = comment.and_then(|c| c.trim().strip_prefix("pad=")) {
            pad = value
                .trim()
                .parse()
                .map_err(|_| Error::Pbm(format!("bad pad comment {value:?}")))?;
        }
        tokens.extend(body.split_whitespace());
    }
    let mut it = tokens.into_iter();
    if it.next() != Some("P1") {
        return Err(Error::Pbm("missing P1 magic".into()));
    }
    let mut dim = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Pbm("missing dimensions".into()))?
            .parse()
            .map_err(|_| Error::Pbm("bad dimension".into()))
    };
    let (w, h) = (dim()?, dim()?);
    // P1 pixels may also be packed without separators
    let bits: Vec<u8> = it
        .flat_map(str::bytes)
        .map(|b| match b {
            b'0' => Ok(0),
            b'1' => Ok(1),
            _ => Err(Error::Pbm(format!("bad pixel {:?}", b as char))),
        })
        .collect::<Result<_>>()?;
    let cells = w
        .checked_mul(h)
        .ok_or_else(|| Error::Pbm("image too large".into()))?;
    if bits.len() != cells {
        return Err(Error::Pbm(format!(
            "expected {cells} pixels, found {}",
            bits.len()
        )));
    }
    if pad > cells || (h > 0 && pad >= w) {
        return Err(Error::Pbm(format!(
            "pad {pad} does not fit a {w}x{h} image"
        )));
    }
    let len = cells - pad;
    if bits[len..].iter().any(|&b| b != 0) {
        return Err(Error::Pbm("padding cells must be white".into()));
    }
    Word::new(bits[..len].to_vec(), 2)
}

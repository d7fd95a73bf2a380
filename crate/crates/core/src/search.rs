//! Exhaustive search over the `q`-ary prefix tree for `f(n, q)`.
//!
//! A branch is cut as soon as its word encounters `Z_n`; since every
//! extension of such a word encounters `Z_n` as well, the surviving nodes
//! are exactly the avoiders, and `f(n, q)` is the first length with none.

use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{zimin_instance_slice, zimin_length, Span};
use crate::scanner::{shortest_instance_suffix, ZiminScanner};
use crate::word::Word;

pub const DEFAULT_LENGTH_CAP: usize = 64;
pub const DEFAULT_MAX_LISTED: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Longest word the search will build.
    pub length_cap: usize,
    /// Explore only words starting with letter 0 and scale counts by `q`.
    /// No word lists are produced in this mode.
    pub symmetry_reduced: bool,
    /// Upper limit on the number of longest avoiders kept in memory.
    pub max_listed: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            length_cap: DEFAULT_LENGTH_CAP,
            symmetry_reduced: false,
            max_listed: DEFAULT_MAX_LISTED,
        }
    }
}

impl SearchOptions {
    pub fn with_cap(length_cap: usize) -> Self {
        SearchOptions {
            length_cap,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub n: usize,
    pub q: usize,
    pub length_cap: usize,
    /// `f(n, q)`, absent when avoiders of length `length_cap` still exist.
    pub f_value: Option<usize>,
    /// Number of avoiders of each length `0, 1, ...`, up to `f - 1` (or the cap).
    pub counts: Vec<u64>,
    /// Avoiders of length `f - 1`, sorted; empty when `f` is unknown.
    pub maximal_avoiders: Vec<Word>,
    /// Set when there were more longest avoiders than `max_listed`.
    pub maximal_avoiders_truncated: bool,
    /// Words tested against the scanner, ε included.
    pub nodes_visited: u64,
    pub wall_time: Duration,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    n: usize,
    q: usize,
    length_cap: usize,
    f_value: Option<usize>,
    counts: &'a [u64],
    maximal_avoiders: Vec<String>,
    maximal_avoiders_truncated: bool,
    nodes_visited: u64,
    wall_time_ms: u64,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl SearchReport {
    pub fn total_avoiders(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let maximal_avoiders = self
            .maximal_avoiders
            .iter()
            .map(Word::to_text)
            .collect::<Result<Vec<_>>>()?;
        let json = ReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            n: self.n,
            q: self.q,
            length_cap: self.length_cap,
            f_value: self.f_value,
            counts: &self.counts,
            maximal_avoiders,
            maximal_avoiders_truncated: self.maximal_avoiders_truncated,
            nodes_visited: self.nodes_visited,
            wall_time_ms: self.wall_time.as_millis() as u64,
        };
        Ok(serde_json::to_value(json).expect("report serialises"))
    }
}

/// Partial result of a subtree search. Merging is associative and commutative.
#[derive(Clone, Debug, Default)]
struct Tally {
    counts: Vec<u64>,
    deepest: Option<usize>,
    deepest_words: Vec<Vec<u8>>,
    overflow: bool,
    nodes: u64,
}

impl Tally {
    fn record(&mut self, word: &[u8], collect: bool, max_listed: usize) {
        let len = word.len();
        if self.counts.len() <= len {
            self.counts.resize(len + 1, 0);
        }
        self.counts[len] += 1;
        if !collect {
            return;
        }
        match self.deepest {
            Some(d) if d > len => return,
            Some(d) if d == len => {}
            _ => {
                self.deepest = Some(len);
                self.deepest_words.clear();
                self.overflow = false;
            }
        }
        if self.deepest_words.len() < max_listed {
            self.deepest_words.push(word.to_vec());
        } else {
            self.overflow = true;
        }
    }

    fn merge(mut self, other: Tally, max_listed: usize) -> Tally {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.nodes += other.nodes;
        match (self.deepest, other.deepest) {
            (_, None) => {}
            (None, Some(_)) => {
                self.deepest = other.deepest;
                self.deepest_words = other.deepest_words;
                self.overflow = other.overflow;
            }
            (Some(a), Some(b)) if b > a => {
                self.deepest = other.deepest;
                self.deepest_words = other.deepest_words;
                self.overflow = other.overflow;
            }
            (Some(a), Some(b)) if a == b => {
                self.deepest_words.extend(other.deepest_words);
                self.overflow |= other.overflow;
                if self.deepest_words.len() > max_listed {
                    self.deepest_words.truncate(max_listed);
                    self.overflow = true;
                }
            }
            _ => {}
        }
        self
    }
}

/// Depth-first search of the subtree below `prefix`, counting avoiders of
/// length at most `cap`.
fn explore(
    prefix: &[u8],
    n: usize,
    q: usize,
    cap: usize,
    collect: bool,
    max_listed: usize,
) -> Result<Tally> {
    let mut scanner = ZiminScanner::new(n, q)?;
    let mut tally = Tally::default();
    for (i, &c) in prefix.iter().enumerate() {
        if scanner.push(c) {
            // Only the prefix itself was a tested node; shorter failures were
            // never reached in the undivided tree.
            tally.nodes = u64::from(i + 1 == prefix.len());
            return Ok(tally);
        }
    }
    tally.nodes = 1;
    tally.record(scanner.word(), collect, max_listed);
    let mut next: Vec<u8> = vec![0];
    while let Some(top) = next.last_mut() {
        if scanner.len() >= cap || *top as usize >= q {
            next.pop();
            if next.is_empty() {
                break;
            }
            scanner.pop();
            continue;
        }
        let c = *top;
        *top += 1;
        tally.nodes += 1;
        if scanner.push(c) {
            scanner.pop();
            continue;
        }
        tally.record(scanner.word(), collect, max_listed);
        next.push(0);
    }
    Ok(tally)
}

fn check_params(n: usize, q: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if q == 0 || q > 255 {
        return Err(Error::Precondition(format!(
            "alphabet size {q} outside 1..=255"
        )));
    }
    Ok(())
}

fn finish(
    n: usize,
    q: usize,
    options: &SearchOptions,
    tally: Tally,
    started: Instant,
) -> Result<SearchReport> {
    let cap = options.length_cap;
    let mut counts = tally.counts;
    counts.resize(cap + 1, 0);
    let f_value = counts.iter().position(|&c| c == 0);
    let mut maximal_avoiders = Vec::new();
    let mut truncated = false;
    if let Some(f) = f_value {
        counts.truncate(f);
        if !options.symmetry_reduced && f > 0 && tally.deepest == Some(f - 1) {
            maximal_avoiders = tally
                .deepest_words
                .into_iter()
                .map(|v| Word::new(v, q))
                .collect::<Result<Vec<_>>>()?;
            maximal_avoiders.sort();
            truncated = tally.overflow;
        }
    }
    Ok(SearchReport {
        n,
        q,
        length_cap: cap,
        f_value,
        counts,
        maximal_avoiders,
        maximal_avoiders_truncated: truncated,
        nodes_visited: tally.nodes,
        wall_time: started.elapsed(),
    })
}

/// `f(n, q)` by exhaustive search up to `length_cap`.
pub fn compute_f(n: usize, q: usize, length_cap: usize) -> Result<SearchReport> {
    compute_f_with(n, q, &SearchOptions::with_cap(length_cap))
}

pub fn compute_f_with(n: usize, q: usize, options: &SearchOptions) -> Result<SearchReport> {
    check_params(n, q)?;
    let started = Instant::now();
    let cap = options.length_cap;
    let tally = if options.symmetry_reduced && cap >= 1 {
        let mut sub = explore(&[0], n, q, cap, false, 0)?;
        for c in sub.counts.iter_mut().skip(1) {
            *c *= q as u64;
        }
        sub.counts[0] = 1;
        // nodes actually tested: ε plus the explored subtree
        sub.nodes += 1;
        sub
    } else {
        explore(&[], n, q, cap, true, options.max_listed)?
    };
    finish(n, q, options, tally, started)
}

/// Runs one subtree search per prefix and merges the results.
///
/// `prefixes` must contain every `q`-ary word of one common length `d`
/// exactly once, with `d <= length_cap`. The merged report equals the one
/// produced by [`compute_f_with`] (apart from wall time), whatever the
/// number of worker threads.
pub fn parallel_partition(
    prefixes: &[Word],
    n: usize,
    q: usize,
    options: &SearchOptions,
    jobs: usize,
) -> Result<SearchReport> {
    check_params(n, q)?;
    let started = Instant::now();
    let depth = validate_partition(prefixes, q)?;
    if depth > options.length_cap {
        return Err(Error::Precondition(format!(
            "partition depth {depth} exceeds length cap {}",
            options.length_cap
        )));
    }
    let max_listed = options.max_listed;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let parts: Vec<Tally> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|p| explore(p.letters(), n, q, options.length_cap, true, max_listed))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut tally = if depth == 0 {
        Tally::default()
    } else {
        explore(&[], n, q, depth - 1, true, max_listed)?
    };
    for part in parts {
        tally = tally.merge(part, max_listed);
    }
    let plain = SearchOptions {
        symmetry_reduced: false,
        ..options.clone()
    };
    finish(n, q, &plain, tally, started)
}

fn validate_partition(prefixes: &[Word], q: usize) -> Result<usize> {
    let depth = prefixes
        .first()
        .map(Word::len)
        .ok_or_else(|| Error::Precondition("empty partition".into()))?;
    let mut seen = BTreeSet::new();
    for p in prefixes {
        if p.len() != depth {
            return Err(Error::Precondition("prefixes of different lengths".into()));
        }
        if p.letters().iter().any(|&c| c as usize >= q) {
            return Err(Error::Precondition(format!(
                "prefix {p} outside a {q}-letter alphabet"
            )));
        }
        if !seen.insert(p.letters().to_vec()) {
            return Err(Error::Precondition(format!("prefix {p} listed twice")));
        }
    }
    let expected = (q as u64).checked_pow(depth as u32);
    if expected != Some(prefixes.len() as u64) {
        return Err(Error::Precondition(format!(
            "{} prefixes do not cover all {q}^{depth} words",
            prefixes.len()
        )));
    }
    Ok(depth)
}

/// All `q`-ary words of length `depth`, in lexicographic order.
pub fn all_prefixes(q: usize, depth: usize) -> Result<Vec<Word>> {
    let total = (q as u64)
        .checked_pow(depth as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::Size {
            what: format!("{q}^{depth} prefixes"),
            limit: 1 << 24,
        })?;
    (0..total)
        .map(|mut i| {
            let mut letters = vec![0u8; depth];
            for slot in letters.iter_mut().rev() {
                *slot = (i % q as u64) as u8;
                i /= q as u64;
            }
            Word::new(letters, q)
        })
        .collect()
}

/// [`compute_f_with`] split across `jobs` threads; output is independent of `jobs`.
pub fn compute_f_parallel(
    n: usize,
    q: usize,
    options: &SearchOptions,
    jobs: usize,
) -> Result<SearchReport> {
    if jobs <= 1 || options.symmetry_reduced {
        return compute_f_with(n, q, options);
    }
    let mut depth = 0;
    while (q as u64).saturating_pow(depth as u32) < 4 * jobs as u64 && depth < options.length_cap {
        depth += 1;
    }
    parallel_partition(&all_prefixes(q, depth)?, n, q, options, jobs)
}

/// Every `q`-ary word of length at most `up_to_length` that avoids `Z_n`,
/// shortest first and lexicographic within a length.
pub fn enumerate_avoiders(n: usize, q: usize, up_to_length: usize) -> Result<Avoiders> {
    check_params(n, q)?;
    Ok(Avoiders {
        scanner: ZiminScanner::new(n, q)?,
        q,
        up_to_length,
        level: 0,
        pending: VecDeque::new(),
        done: false,
    })
}

/// Iterator returned by [`enumerate_avoiders`]; holds one length level at a time.
pub struct Avoiders {
    scanner: ZiminScanner,
    q: usize,
    up_to_length: usize,
    level: usize,
    pending: VecDeque<Word>,
    done: bool,
}

impl Avoiders {
    fn fill_level(&mut self) {
        let target = self.level;
        let q = self.q;
        let s = &mut self.scanner;
        s.reset();
        if target == 0 {
            self.pending
                .push_back(Word::new(Vec::new(), q).expect("valid"));
            return;
        }
        let mut next: Vec<u8> = vec![0];
        while let Some(top) = next.last_mut() {
            if *top as usize >= q {
                next.pop();
                if next.is_empty() {
                    break;
                }
                s.pop();
                continue;
            }
            let c = *top;
            *top += 1;
            if s.push(c) {
                s.pop();
                continue;
            }
            if s.len() == target {
                self.pending
                    .push_back(Word::new(s.word().to_vec(), q).expect("valid"));
                s.pop();
            } else {
                next.push(0);
            }
        }
    }
}

impl Iterator for Avoiders {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while self.pending.is_empty() {
            if self.done || self.level > self.up_to_length {
                return None;
            }
            self.fill_level();
            self.level += 1;
            if self.pending.is_empty() {
                self.done = true;
            }
        }
        self.pending.pop_front()
    }
}

/// Outcome of [`verify_avoids`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AvoidanceVerdict {
    pub avoids: bool,
    /// The violating subword with the smallest end, then smallest start.
    pub violation: Option<Span>,
}

/// Straightforward check that no subword of length at least `2^n - 1` is a
/// `Z_n`-instance, testing every such subword with the recursive decider.
///
/// Cubic in `|w|`; meant as an independent certificate, not for search.
pub fn verify_avoids(w: &Word, n: usize) -> AvoidanceVerdict {
    let v = w.letters();
    let violation = match zimin_length(n) {
        None => None,
        Some(0) => Some(Span::new(0, 0)),
        Some(min) => (min..=v.len()).find_map(|end| {
            (0..=end - min)
                .find(|&start| zimin_instance_slice(&v[start..end], n))
                .map(|start| Span::new(start, end))
        }),
    };
    AvoidanceVerdict {
        avoids: violation.is_none(),
        violation,
    }
}

/// Longest word [`certify_avoids`] hands to the cubic [`verify_avoids`].
pub const NAIVE_VERIFY_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verifier {
    /// [`verify_avoids`].
    Naive,
    /// The index-free shortest-suffix chain evaluated on every prefix.
    SuffixChain,
}

/// Avoidance check usable on long words: [`verify_avoids`] up to
/// [`NAIVE_VERIFY_LIMIT`] letters, the suffix chain beyond. Neither shares
/// code with the hashed scanner used by the searches. A chain violation is
/// the shortest instance ending earliest.
pub fn certify_avoids(w: &Word, n: usize) -> (AvoidanceVerdict, Verifier) {
    if w.len() <= NAIVE_VERIFY_LIMIT {
        return (verify_avoids(w, n), Verifier::Naive);
    }
    let v = w.letters();
    let violation = (0..=v.len())
        .find_map(|end| shortest_instance_suffix(&v[..end], n).map(|m| Span::new(end - m, end)));
    let verdict = AvoidanceVerdict {
        avoids: violation.is_none(),
        violation,
    };
    (verdict, Verifier::SuffixChain)
}
